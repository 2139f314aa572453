//! Combinatorics of ideally triangulated punctured spheres.
//!
//! Triangles are stored as counterclockwise vertex triples. Side `k` of a
//! triangle runs from corner `k` to corner `(k + 1) % 3`; every side is glued
//! to exactly one side of some triangle, traversed in the opposite direction.
//!
//! # Subdivision family
//!
//! `subdivide(icosahedron(), m)` splits each icosahedral face (a *block*
//! with corners `P0, P1, P2`) into `4m²` small triangles using the lattice
//! points `(i, j, k)` with `i + j + k = n = 2m`, where `(i, j, k)` are
//! barycentric weights on `(P0, P1, P2)` scaled by `n`. A small triangle is
//! addressed by a *cell*:
//!
//! * up cell `(i, j, k)` with `i + j + k = n − 1`, corners
//!   `(i+1, j, k), (i, j+1, k), (i, j, k+1)`;
//! * down cell `(i, j, k)` with `i + j + k = n − 2`, corners
//!   `(i, j+1, k+1), (i+1, j, k+1), (i+1, j+1, k)`.
//!
//! Corner `a` of an up cell is the one pushed toward `P_a`; corner `a` of a
//! down cell is the one pushed away from `P_a`. The gray region is the
//! medial triangle with corners at the edge midpoints `(m, m, 0)`,
//! `(m, 0, m)`, `(0, m, m)`; a cell is gray iff all three cell coordinates are
//! at most `m − 1`. The white region around `P_a` consists of cells whose
//! `a`-coordinate is at least `m`.

use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use thiserror::Error;

pub type VertexId = usize;
pub type TriangleId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("triangle {triangle} references vertex {vertex}, but there are only {count} vertices")]
    VertexOutOfRange {
        triangle: TriangleId,
        vertex: VertexId,
        count: usize,
    },
    #[error("triangle {0} repeats a vertex")]
    RepeatedVertex(TriangleId),
    #[error("side {side} of triangle {triangle} is not glued to anything")]
    UnpairedSide { triangle: TriangleId, side: usize },
    #[error("side {side} of triangle {triangle} appears in more than one edge")]
    SideReused { triangle: TriangleId, side: usize },
    #[error("edge {edge} glues a side to itself")]
    SelfGluedSide { edge: EdgeId },
    #[error("edge {edge} references side {side} of missing triangle {triangle}")]
    BadSideReference {
        edge: EdgeId,
        triangle: TriangleId,
        side: usize,
    },
    #[error("edge {edge} glues sides whose endpoints do not match with opposite orientation")]
    InconsistentGluing { edge: EdgeId },
    #[error("directed edge {0} -> {1} occurs more than once (non-manifold or non-orientable)")]
    DuplicateDirectedEdge(VertexId, VertexId),
    #[error("vertex {0} is not used by any triangle")]
    UnusedVertex(VertexId),
    #[error("the triangles around vertex {0} do not form a single cycle")]
    DisconnectedLink(VertexId),
    #[error("Euler characteristic is {0}, expected 2")]
    EulerCharacteristic(i64),
    #[error("subdivision parameter must be at least 1, got {0}")]
    InvalidSubdivision(u32),
    #[error("input is not the base icosahedron")]
    NotIcosahedron,
    #[error("triangulation does not carry subdivision-family metadata")]
    NotFamily,
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("inconsistent family metadata: {0}")]
    BadFamily(String),
}

/// A (triangle, corner index) pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Corner {
    pub triangle: TriangleId,
    pub index: usize,
}

/// A (triangle, side index) pair; side `k` joins corners `k` and `k + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Side {
    pub triangle: TriangleId,
    pub index: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FaceColor {
    White,
    Gray,
    Uncolored,
}

/// Position of a small triangle inside its icosahedral block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockCell {
    pub block: usize,
    pub cell: [u32; 3],
    pub up: bool,
}

impl BlockCell {
    /// Lattice coordinates of corner `a`.
    pub fn corner_lattice(&self, a: usize) -> [u32; 3] {
        let mut p = self.cell;
        if self.up {
            p[a] += 1;
        } else {
            for (b, x) in p.iter_mut().enumerate() {
                if b != a {
                    *x += 1;
                }
            }
        }
        p
    }

    pub fn is_gray(&self, m: u32) -> bool {
        self.cell.iter().all(|&x| x < m)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Family {
    pub m: u32,
    /// One entry per triangle.
    pub cells: Vec<BlockCell>,
}

/// The six vertex classes of the white/gray subdivision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexType {
    /// Original icosahedral vertex (degree five).
    LargeCorner,
    /// Interior of an icosahedral edge, inside a white region.
    WhiteEdge,
    /// Interior of a white region.
    WhiteInterior,
    /// Midpoint of an icosahedral edge: four white and two gray regions meet.
    GrayCorner,
    /// Interior of a side of a gray region.
    GrayEdge,
    /// Interior of a gray region.
    GrayInterior,
    Unclassified,
}

impl VertexType {
    pub fn number(&self) -> Option<u8> {
        match self {
            VertexType::LargeCorner => Some(1),
            VertexType::WhiteEdge => Some(2),
            VertexType::WhiteInterior => Some(3),
            VertexType::GrayCorner => Some(4),
            VertexType::GrayEdge => Some(5),
            VertexType::GrayInterior => Some(6),
            VertexType::Unclassified => None,
        }
    }

    /// Classifies a lattice point `(i, j, k)`, `i + j + k = 2m`.
    pub fn of_lattice(p: [u32; 3], m: u32) -> VertexType {
        let zeros = p.iter().filter(|&&x| x == 0).count();
        let max = *p.iter().max().expect("three coordinates");
        match zeros {
            2 => VertexType::LargeCorner,
            1 if max == m => VertexType::GrayCorner,
            1 => VertexType::WhiteEdge,
            _ if max > m => VertexType::WhiteInterior,
            _ if max == m => VertexType::GrayEdge,
            _ => VertexType::GrayInterior,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Triangulation {
    vertex_count: usize,
    triangles: Vec<[VertexId; 3]>,
    opposite: Vec<[Side; 3]>,
    edges: Vec<[Side; 2]>,
    side_edge: Vec<[EdgeId; 3]>,
    stars: Vec<Vec<Corner>>,
    colors: Vec<FaceColor>,
    family: Option<Family>,
}

impl Triangulation {
    /// Builds a triangulation, deriving the gluing from matching directed
    /// edges. Requires each unordered vertex pair to bound at most one edge.
    pub fn from_triangles(
        vertex_count: usize,
        triangles: Vec<[VertexId; 3]>,
    ) -> Result<Self, SurfaceError> {
        check_vertex_refs(vertex_count, &triangles)?;
        let mut directed: HashMap<(VertexId, VertexId), Side> = HashMap::new();
        for (t, tri) in triangles.iter().enumerate() {
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(SurfaceError::RepeatedVertex(t));
            }
            for k in 0..3 {
                let key = (tri[k], tri[(k + 1) % 3]);
                if directed
                    .insert(
                        key,
                        Side {
                            triangle: t,
                            index: k,
                        },
                    )
                    .is_some()
                {
                    return Err(SurfaceError::DuplicateDirectedEdge(key.0, key.1));
                }
            }
        }
        let mut edges = Vec::with_capacity(triangles.len() * 3 / 2);
        for (t, tri) in triangles.iter().enumerate() {
            for k in 0..3 {
                let (u, w) = (tri[k], tri[(k + 1) % 3]);
                let partner = *directed.get(&(w, u)).ok_or(SurfaceError::UnpairedSide {
                    triangle: t,
                    side: k,
                })?;
                let this = Side {
                    triangle: t,
                    index: k,
                };
                if this < partner {
                    edges.push([this, partner]);
                }
            }
        }
        Self::from_gluing(vertex_count, triangles, edges)
    }

    /// Builds a triangulation from an explicit side gluing, validating it.
    pub fn from_gluing(
        vertex_count: usize,
        triangles: Vec<[VertexId; 3]>,
        edges: Vec<[Side; 2]>,
    ) -> Result<Self, SurfaceError> {
        check_vertex_refs(vertex_count, &triangles)?;
        let f = triangles.len();
        let unset = Side {
            triangle: usize::MAX,
            index: 0,
        };
        let mut opposite = vec![[unset; 3]; f];
        let mut side_edge = vec![[usize::MAX; 3]; f];
        for (e, pair) in edges.iter().enumerate() {
            if pair[0] == pair[1] {
                return Err(SurfaceError::SelfGluedSide { edge: e });
            }
            for s in pair {
                if s.triangle >= f || s.index > 2 {
                    return Err(SurfaceError::BadSideReference {
                        edge: e,
                        triangle: s.triangle,
                        side: s.index,
                    });
                }
                if side_edge[s.triangle][s.index] != usize::MAX {
                    return Err(SurfaceError::SideReused {
                        triangle: s.triangle,
                        side: s.index,
                    });
                }
                side_edge[s.triangle][s.index] = e;
            }
            let [s0, s1] = *pair;
            let ends = |s: Side| {
                let tri = triangles[s.triangle];
                (tri[s.index], tri[(s.index + 1) % 3])
            };
            let (u0, w0) = ends(s0);
            let (u1, w1) = ends(s1);
            if u0 != w1 || w0 != u1 {
                return Err(SurfaceError::InconsistentGluing { edge: e });
            }
            opposite[s0.triangle][s0.index] = s1;
            opposite[s1.triangle][s1.index] = s0;
        }
        for (t, row) in side_edge.iter().enumerate() {
            if let Some(k) = row.iter().position(|&e| e == usize::MAX) {
                return Err(SurfaceError::UnpairedSide {
                    triangle: t,
                    side: k,
                });
            }
        }
        let stars = build_stars(vertex_count, &triangles, &opposite)?;
        let chi = vertex_count as i64 - edges.len() as i64 + f as i64;
        if chi != 2 {
            return Err(SurfaceError::EulerCharacteristic(chi));
        }
        Ok(Triangulation {
            vertex_count,
            colors: vec![FaceColor::Uncolored; f],
            triangles,
            opposite,
            edges,
            side_edge,
            stars,
            family: None,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    pub fn triangles(&self) -> &[[VertexId; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, t: TriangleId) -> [VertexId; 3] {
        self.triangles[t]
    }

    pub fn vertex_at(&self, c: Corner) -> VertexId {
        self.triangles[c.triangle][c.index]
    }

    /// The side glued to `s`.
    pub fn opposite(&self, s: Side) -> Side {
        self.opposite[s.triangle][s.index]
    }

    pub fn edges(&self) -> &[[Side; 2]] {
        &self.edges
    }

    pub fn edge_of(&self, s: Side) -> EdgeId {
        self.side_edge[s.triangle][s.index]
    }

    /// Endpoints of an edge as seen from its first side.
    pub fn edge_endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        let s = self.edges[e][0];
        let tri = self.triangles[s.triangle];
        (tri[s.index], tri[(s.index + 1) % 3])
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.stars[v].len()
    }

    pub fn degree_histogram(&self) -> std::collections::BTreeMap<usize, usize> {
        let mut h = std::collections::BTreeMap::new();
        for s in &self.stars {
            *h.entry(s.len()).or_insert(0) += 1;
        }
        h
    }

    /// Corners at `v` in counterclockwise cyclic order; consecutive corners
    /// share the edge leaving `v` through the later corner's side.
    pub fn vertex_star(&self, v: VertexId) -> Result<&[Corner], SurfaceError> {
        self.stars
            .get(v)
            .map(Vec::as_slice)
            .ok_or(SurfaceError::UnknownVertex(v))
    }

    /// Next corner counterclockwise around the vertex of `c`.
    pub fn next_around(&self, c: Corner) -> Corner {
        let s = self.opposite(Side {
            triangle: c.triangle,
            index: (c.index + 2) % 3,
        });
        Corner {
            triangle: s.triangle,
            index: s.index,
        }
    }

    pub fn colors(&self) -> &[FaceColor] {
        &self.colors
    }

    pub fn color(&self, t: TriangleId) -> FaceColor {
        self.colors[t]
    }

    pub fn family(&self) -> Option<&Family> {
        self.family.as_ref()
    }

    pub fn is_colored(&self) -> bool {
        self.colors.iter().all(|c| *c != FaceColor::Uncolored)
    }

    /// Attaches colors and family metadata after validating their shape.
    pub fn with_metadata(
        mut self,
        colors: Vec<FaceColor>,
        family: Option<Family>,
    ) -> Result<Self, SurfaceError> {
        if colors.len() != self.triangles.len() {
            return Err(SurfaceError::BadFamily(format!(
                "{} colors for {} triangles",
                colors.len(),
                self.triangles.len()
            )));
        }
        if let Some(fam) = &family {
            validate_family(&self, fam)?;
        }
        self.colors = colors;
        self.family = family;
        Ok(self)
    }

    /// Lattice position of `v` within one block containing it.
    pub fn vertex_lattice(&self, v: VertexId) -> Option<(usize, [u32; 3])> {
        let fam = self.family.as_ref()?;
        let c = *self.stars.get(v)?.first()?;
        let cell = fam.cells[c.triangle];
        Some((cell.block, cell.corner_lattice(c.index)))
    }
}

fn check_vertex_refs(vertex_count: usize, triangles: &[[VertexId; 3]]) -> Result<(), SurfaceError> {
    for (t, tri) in triangles.iter().enumerate() {
        for &v in tri {
            if v >= vertex_count {
                return Err(SurfaceError::VertexOutOfRange {
                    triangle: t,
                    vertex: v,
                    count: vertex_count,
                });
            }
        }
    }
    Ok(())
}

fn build_stars(
    vertex_count: usize,
    triangles: &[[VertexId; 3]],
    opposite: &[[Side; 3]],
) -> Result<Vec<Vec<Corner>>, SurfaceError> {
    let mut corners_of: Vec<Vec<Corner>> = vec![Vec::new(); vertex_count];
    for (t, tri) in triangles.iter().enumerate() {
        for (k, &v) in tri.iter().enumerate() {
            corners_of[v].push(Corner {
                triangle: t,
                index: k,
            });
        }
    }
    let mut stars = Vec::with_capacity(vertex_count);
    for (v, corners) in corners_of.iter().enumerate() {
        let Some(&start) = corners.first() else {
            return Err(SurfaceError::UnusedVertex(v));
        };
        let mut star = vec![start];
        let mut c = start;
        loop {
            let s = opposite[c.triangle][(c.index + 2) % 3];
            c = Corner {
                triangle: s.triangle,
                index: s.index,
            };
            if c == start {
                break;
            }
            if star.len() > corners.len() {
                return Err(SurfaceError::DisconnectedLink(v));
            }
            star.push(c);
        }
        if star.len() != corners.len() {
            return Err(SurfaceError::DisconnectedLink(v));
        }
        stars.push(star);
    }
    Ok(stars)
}

fn validate_family(t: &Triangulation, fam: &Family) -> Result<(), SurfaceError> {
    let n = 2 * fam.m;
    if fam.m == 0 {
        return Err(SurfaceError::BadFamily("m must be at least 1".into()));
    }
    if fam.cells.len() != t.triangle_count() {
        return Err(SurfaceError::BadFamily(format!(
            "{} cells for {} triangles",
            fam.cells.len(),
            t.triangle_count()
        )));
    }
    for (i, c) in fam.cells.iter().enumerate() {
        let sum: u32 = c.cell.iter().sum();
        let want = if c.up { n - 1 } else { n.wrapping_sub(2) };
        if sum != want || c.block >= 20 {
            return Err(SurfaceError::BadFamily(format!(
                "triangle {i} has cell {:?}",
                c
            )));
        }
    }
    // every vertex must see the same lattice point from all of its corners
    // within a block
    for v in 0..t.vertex_count() {
        let star = &t.stars[v];
        let mut seen: HashMap<usize, [u32; 3]> = HashMap::new();
        for c in star {
            let cell = fam.cells[c.triangle];
            let p = cell.corner_lattice(c.index);
            if let Some(prev) = seen.insert(cell.block, p) {
                if prev != p {
                    return Err(SurfaceError::BadFamily(format!(
                        "vertex {v} has two lattice positions in block {}",
                        cell.block
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Faces of the icosahedron, counterclockwise when seen from outside.
pub const ICOSAHEDRON_FACES: [[VertexId; 3]; 20] = [
    [0, 11, 5],
    [0, 5, 1],
    [0, 1, 7],
    [0, 7, 10],
    [0, 10, 11],
    [1, 5, 9],
    [5, 11, 4],
    [11, 10, 2],
    [10, 7, 6],
    [7, 1, 8],
    [3, 9, 4],
    [3, 4, 2],
    [3, 2, 6],
    [3, 6, 8],
    [3, 8, 9],
    [4, 9, 5],
    [2, 4, 11],
    [6, 2, 10],
    [8, 6, 7],
    [9, 8, 1],
];

/// The base triangulation: 12 vertices of degree five, 30 edges, 20 faces.
pub fn icosahedron() -> Triangulation {
    Triangulation::from_triangles(12, ICOSAHEDRON_FACES.to_vec())
        .expect("icosahedron face list is a valid oriented sphere")
}

fn is_icosahedron(t: &Triangulation) -> bool {
    t.vertex_count() == 12
        && t.triangle_count() == 20
        && t.stars.iter().all(|s| s.len() == 5)
        && t.family.is_none()
}

/// Returns `T_m`: the icosahedron for `m = 0`, its colored subdivision
/// otherwise.
pub fn family_member(m: u32) -> Triangulation {
    let base = icosahedron();
    if m == 0 {
        return base;
    }
    let sub = subdivide(&base, m).expect("icosahedron subdivides for m >= 1");
    color_faces(&sub).expect("fresh subdivision carries family metadata")
}

#[derive(Hash, PartialEq, Eq)]
enum LatticeKey {
    Corner(VertexId),
    Edge(VertexId, VertexId, u32),
    Interior(usize, u32, u32),
}

/// Splits every face of the icosahedron into `4m²` triangles by cutting
/// each side into `2m` pieces. The 12 original vertices keep ids `0..12`.
pub fn subdivide(t0: &Triangulation, m: u32) -> Result<Triangulation, SurfaceError> {
    if m < 1 {
        return Err(SurfaceError::InvalidSubdivision(m));
    }
    if !is_icosahedron(t0) {
        return Err(SurfaceError::NotIcosahedron);
    }
    let n = 2 * m;
    let mut ids: HashMap<LatticeKey, VertexId> = HashMap::new();
    for v in 0..t0.vertex_count() {
        ids.insert(LatticeKey::Corner(v), v);
    }
    let mut next_id = t0.vertex_count();
    let mut id_of = |block: usize, corners: [VertexId; 3], p: [u32; 3]| -> VertexId {
        let nonzero: Vec<usize> = (0..3).filter(|&a| p[a] != 0).collect();
        let key = match nonzero.len() {
            1 => LatticeKey::Corner(corners[nonzero[0]]),
            2 => {
                let (a, b) = (nonzero[0], nonzero[1]);
                let (va, vb) = (corners[a], corners[b]);
                // parametrize from the smaller vertex id so both blocks agree
                if va < vb {
                    LatticeKey::Edge(va, vb, p[b])
                } else {
                    LatticeKey::Edge(vb, va, p[a])
                }
            }
            _ => LatticeKey::Interior(block, p[0], p[1]),
        };
        *ids.entry(key).or_insert_with(|| {
            let id = next_id;
            next_id += 1;
            id
        })
    };

    let mut triangles = Vec::with_capacity(20 * (n * n) as usize);
    let mut cells = Vec::with_capacity(triangles.capacity());
    for (block, &corners) in t0.triangles().iter().enumerate() {
        for i in 0..n {
            for j in 0..(n - i) {
                let k = n - 1 - i - j;
                let cell = BlockCell {
                    block,
                    cell: [i, j, k],
                    up: true,
                };
                let tri = [0, 1, 2].map(|a| id_of(block, corners, cell.corner_lattice(a)));
                triangles.push(tri);
                cells.push(cell);
            }
        }
        for i in 0..n.saturating_sub(1) {
            for j in 0..(n - 1 - i) {
                let k = n - 2 - i - j;
                let cell = BlockCell {
                    block,
                    cell: [i, j, k],
                    up: false,
                };
                let tri = [0, 1, 2].map(|a| id_of(block, corners, cell.corner_lattice(a)));
                triangles.push(tri);
                cells.push(cell);
            }
        }
    }
    let f = triangles.len();
    Triangulation::from_triangles(next_id, triangles)?
        .with_metadata(vec![FaceColor::Uncolored; f], Some(Family { m, cells }))
}

/// Colors the central `m²` cells of each block gray and the rest white.
pub fn color_faces(t: &Triangulation) -> Result<Triangulation, SurfaceError> {
    let fam = t.family().ok_or(SurfaceError::NotFamily)?;
    let colors = fam
        .cells
        .iter()
        .map(|c| {
            if c.is_gray(fam.m) {
                FaceColor::Gray
            } else {
                FaceColor::White
            }
        })
        .collect();
    let mut out = t.clone();
    out.colors = colors;
    Ok(out)
}

/// Vertex classes; every vertex is `Unclassified` off the family.
pub fn classify_vertices(t: &Triangulation) -> Vec<VertexType> {
    let Some(fam) = t.family() else {
        return vec![VertexType::Unclassified; t.vertex_count()];
    };
    (0..t.vertex_count())
        .map(|v| match t.vertex_lattice(v) {
            Some((_, p)) => VertexType::of_lattice(p, fam.m),
            None => VertexType::Unclassified,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn icosahedron_counts() {
        let t = icosahedron();
        assert_eq!(
            (t.vertex_count(), t.edge_count(), t.triangle_count()),
            (12, 30, 20)
        );
        assert!((0..12).all(|v| t.degree(v) == 5));
        assert_eq!(t.euler_characteristic(), 2);
    }

    #[test]
    fn subdivision_counts_small_m() {
        for (m, f, v, e) in [(1u32, 80, 42, 120), (3, 720, 362, 1080)] {
            let t = subdivide(&icosahedron(), m).unwrap();
            assert_eq!(t.triangle_count(), f);
            assert_eq!(t.vertex_count(), v);
            assert_eq!(t.edge_count(), e);
            assert_eq!(t.euler_characteristic(), 2);
        }
    }

    #[test]
    fn subdivide_rejects_bad_input() {
        assert_eq!(
            subdivide(&icosahedron(), 0).unwrap_err(),
            SurfaceError::InvalidSubdivision(0)
        );
        let t1 = subdivide(&icosahedron(), 1).unwrap();
        assert_eq!(subdivide(&t1, 1).unwrap_err(), SurfaceError::NotIcosahedron);
    }

    #[test]
    fn coloring_counts() {
        for m in [1u32, 2] {
            let t = family_member(m);
            let gray = t.colors().iter().filter(|c| **c == FaceColor::Gray).count();
            let white = t
                .colors()
                .iter()
                .filter(|c| **c == FaceColor::White)
                .count();
            assert_eq!(gray as u32, 20 * m * m);
            assert_eq!(white as u32, 60 * m * m);
        }
        let t = family_member(1);
        let fam = t.family().unwrap();
        for b in 0..20 {
            let in_block: Vec<_> = (0..t.triangle_count())
                .filter(|&i| fam.cells[i].block == b)
                .collect();
            let gray = in_block
                .iter()
                .filter(|&&i| t.color(i) == FaceColor::Gray)
                .count();
            assert_eq!((gray, in_block.len() - gray), (1, 3));
        }
        assert_eq!(
            color_faces(&icosahedron()).unwrap_err(),
            SurfaceError::NotFamily
        );
    }

    #[test]
    fn classification_m1() {
        let t = family_member(1);
        let types = classify_vertices(&t);
        let count = |ty| types.iter().filter(|x| **x == ty).count();
        assert_eq!(count(VertexType::LargeCorner), 12);
        assert_eq!(count(VertexType::GrayCorner), 30);
        assert_eq!(count(VertexType::Unclassified), 0);
    }

    #[test]
    fn gray_corners_meet_four_white_two_gray() {
        // brute force over the m = 1 complex
        let t = family_member(1);
        let types = classify_vertices(&t);
        for (v, ty) in types.iter().enumerate() {
            if *ty != VertexType::GrayCorner {
                continue;
            }
            let star = t.vertex_star(v).unwrap();
            let gray = star
                .iter()
                .filter(|c| t.color(c.triangle) == FaceColor::Gray)
                .count();
            assert_eq!((gray, star.len() - gray), (2, 4));
        }
    }

    #[test]
    fn non_family_is_unclassified() {
        let types = classify_vertices(&icosahedron());
        assert!(types.iter().all(|t| *t == VertexType::Unclassified));
    }

    #[test]
    fn stars_are_cyclic() {
        let t = family_member(1);
        let types = classify_vertices(&t);
        for (v, ty) in types.iter().enumerate() {
            let star = t.vertex_star(v).unwrap();
            let want = if *ty == VertexType::LargeCorner {
                5
            } else {
                6
            };
            assert_eq!(star.len(), want);
            let mut c = star[0];
            for i in 0..(2 * star.len()) {
                assert_eq!(c, star[i % star.len()]);
                assert_eq!(t.vertex_at(c), v);
                c = t.next_around(c);
            }
            assert_eq!(c, star[0]);
        }
        assert_eq!(
            t.vertex_star(10_000).unwrap_err(),
            SurfaceError::UnknownVertex(10_000)
        );
    }

    #[test]
    fn thrice_punctured_sphere() {
        let t = Triangulation::from_triangles(3, vec![[0, 1, 2], [0, 2, 1]]).unwrap();
        assert_eq!(t.edge_count(), 3);
        assert_eq!(t.euler_characteristic(), 2);
        assert!((0..3).all(|v| t.degree(v) == 2));
    }

    #[test]
    fn rejects_broken_gluings() {
        assert!(matches!(
            Triangulation::from_triangles(3, vec![[0, 1, 2], [0, 1, 2]]),
            Err(SurfaceError::DuplicateDirectedEdge(..))
        ));
        assert!(matches!(
            Triangulation::from_triangles(4, vec![[0, 1, 2], [0, 2, 3]]),
            Err(SurfaceError::UnpairedSide { .. })
        ));
        assert!(matches!(
            Triangulation::from_triangles(3, vec![[0, 1, 5], [0, 2, 1]]),
            Err(SurfaceError::VertexOutOfRange {
                triangle: 0,
                vertex: 5,
                ..
            })
        ));
        let tris = vec![[0, 1, 2], [0, 2, 1]];
        let s = |t, i| Side {
            triangle: t,
            index: i,
        };
        // side 0 of t0 is 0->1; side 1 of t1 is 2->1: endpoints disagree
        let bad = vec![[s(0, 0), s(1, 1)], [s(0, 1), s(1, 0)], [s(0, 2), s(1, 2)]];
        assert!(matches!(
            Triangulation::from_gluing(3, tris, bad),
            Err(SurfaceError::InconsistentGluing { edge: 0 })
        ));
    }
}
