//! Developing a decorated triangulation into the upper half-plane.
//!
//! Every triangle has a *frame*: corner 2 at ∞ with a height-1 horoball,
//! corner 0 at 0 and corner 1 at `α₂`, where `α` are its corner areas.
//! Gluing across an edge is the map that carries the neighbor's frame onto
//! the triangle's frame, matching the edge and splitting any horoball
//! mismatch evenly between the two endpoints. When (C) holds the mismatch
//! is zero and the gluing matches both horoballs exactly.

use crate::decor::{check_geometric, CornerDecoration, DecorError, EdgeLengths, Violation};
use crate::hyp2::{
    horoball_distance, horoballs_disjoint, Contact, GeometryError, Horoball, IdealPoint,
    IdealTriangle, Mobius, DEFAULT_TANGENCY_TOL,
};
use crate::surface::{Corner, Side, TriangleId, Triangulation, VertexId};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DevelopError {
    #[error("decoration is not geometric ({} violations, first: {:?})", .0.len(), .0.first())]
    NonGeometric(Vec<Violation>),
    #[error(transparent)]
    Decor(#[from] DecorError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("base triangle {0} out of range")]
    BaseOutOfRange(TriangleId),
    #[error("unknown cusp {0}")]
    UnknownCusp(VertexId),
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("cannot write figure: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TreeOrder {
    #[default]
    BreadthFirst,
    DepthFirst,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DevelopOptions {
    pub base: TriangleId,
    pub tree: TreeOrder,
    /// Refuse decorations that fail (A), (B) or (C).
    pub require_geometric: bool,
    pub rel_tol: f64,
}

impl Default for DevelopOptions {
    fn default() -> Self {
        DevelopOptions {
            base: 0,
            tree: TreeOrder::BreadthFirst,
            require_geometric: true,
            rel_tol: crate::decor::DEFAULT_RELATIVE_TOL,
        }
    }
}

/// Dual-tree edge through which a triangle was placed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeLink {
    pub parent: TriangleId,
    /// Side of the child that faces the parent.
    pub side: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CuspHolonomy {
    pub vertex: VertexId,
    /// Return map around the cusp, in developed coordinates.
    pub map: Mobius,
    /// Derivative at the fixed cusp; 1 exactly when the holonomy is
    /// parabolic.
    pub scaling: f64,
    /// Translation length along the height-1 horocycle.
    pub translation: f64,
}

impl CuspHolonomy {
    pub fn is_parabolic(&self, tol: f64) -> bool {
        (self.scaling - 1.0).abs() <= tol
    }
}

#[derive(Debug, Clone)]
pub struct DevelopedSurface {
    triangulation: Triangulation,
    decoration: CornerDecoration,
    pub base: TriangleId,
    pub placements: Vec<IdealTriangle>,
    pub horoballs: Vec<[Horoball; 3]>,
    /// Frame of each triangle to developed coordinates.
    pub maps: Vec<Mobius>,
    pub tree: Vec<Option<TreeLink>>,
    /// Triangles in placement order.
    pub order: Vec<TriangleId>,
}

fn frame_points(alpha: [f64; 3], j: usize) -> [IdealPoint; 3] {
    let mut p = [IdealPoint::Infinity; 3];
    p[(j + 1) % 3] = IdealPoint::Finite(0.0);
    p[(j + 2) % 3] = IdealPoint::Finite(alpha[j]);
    p
}

fn frame_horoballs(alpha: [f64; 3]) -> [Horoball; 3] {
    [
        Horoball {
            center: IdealPoint::Finite(0.0),
            size: alpha[0] * alpha[2],
        },
        Horoball {
            center: IdealPoint::Finite(alpha[2]),
            size: alpha[1] * alpha[2],
        },
        Horoball {
            center: IdealPoint::Infinity,
            size: 1.0,
        },
    ]
}

/// Map from the frame with corner `j` at ∞ to the triangle's own frame.
fn frame_change(alpha: [f64; 3], j: usize) -> Mobius {
    if j == 2 {
        return Mobius::IDENTITY;
    }
    Mobius::from_triples(frame_points(alpha, j), frame_points(alpha, 2))
        .expect("frames are positively oriented")
}

/// Map from the frame of the triangle across side `s` to the frame of
/// `s.triangle`.
pub fn gluing_map(t: &Triangulation, dec: &CornerDecoration, s: Side) -> Mobius {
    let o = t.opposite(s);
    let a = dec.areas()[s.triangle];
    let b = dec.areas()[o.triangle];
    let (k, ko) = (s.index, o.index);
    let p = a[k] * a[(k + 1) % 3];
    let q = b[ko] * b[(ko + 1) % 3];
    let mu = (p / q).sqrt();
    // both frames put the shared vertex (corner k + 1 here, corner ko there)
    // at ∞; the other shared vertex sits at α_{k+1} here and at 0 there
    let x = Mobius {
        a: mu.sqrt(),
        b: a[(k + 1) % 3] / mu.sqrt(),
        c: 0.0,
        d: 1.0 / mu.sqrt(),
    };
    frame_change(a, (k + 1) % 3)
        .compose(&x)
        .compose(&frame_change(b, ko).inverse())
}

/// `m(p)`, returning ∞ when `p` lands within rounding of the pole.
fn apply_snapped(m: &Mobius, p: IdealPoint) -> IdealPoint {
    if let IdealPoint::Finite(x) = p {
        let den = m.c * x + m.d;
        if den.abs() <= 1e-13 * ((m.c * x).abs() + m.d.abs()) {
            return IdealPoint::Infinity;
        }
    }
    m.apply(p)
}

/// Places a copy of the triangle across side `s` of a placed triangle.
fn place_neighbor(
    t: &Triangulation,
    dec: &CornerDecoration,
    s: Side,
    map: &Mobius,
    points: &[IdealPoint; 3],
) -> (TriangleId, Mobius, [IdealPoint; 3], [Horoball; 3]) {
    let o = t.opposite(s);
    let m = map.compose(&gluing_map(t, dec, s));
    let alpha = dec.areas()[o.triangle];
    let frame = frame_points(alpha, 2);
    let mut pts = [IdealPoint::Infinity; 3];
    pts[o.index] = points[(s.index + 1) % 3];
    pts[(o.index + 1) % 3] = points[s.index];
    pts[(o.index + 2) % 3] = apply_snapped(&m, frame[(o.index + 2) % 3]);
    let balls = frame_horoballs(alpha);
    let balls = [0, 1, 2].map(|i| m.apply_horoball_onto(&balls[i], pts[i]));
    (o.triangle, m, pts, balls)
}

/// Lays the triangulation out along a spanning tree of the dual graph.
/// The base triangle lands on `(0, α₂, ∞)` with a height-1 horoball at ∞.
pub fn develop(
    t: &Triangulation,
    dec: &CornerDecoration,
    opts: &DevelopOptions,
) -> Result<DevelopedSurface, DevelopError> {
    dec.check_total(t)?;
    if opts.base >= t.triangle_count() {
        return Err(DevelopError::BaseOutOfRange(opts.base));
    }
    if opts.require_geometric {
        let rep = check_geometric(t, dec, opts.rel_tol)?;
        if !rep.is_geometric() {
            return Err(DevelopError::NonGeometric(rep.violations));
        }
    }
    let n = t.triangle_count();
    let mut maps = vec![Mobius::IDENTITY; n];
    let mut points = vec![[IdealPoint::Infinity; 3]; n];
    let mut balls = vec![frame_horoballs([1.0; 3]); n];
    let mut tree = vec![None; n];
    let mut placed = vec![false; n];
    let mut order = Vec::with_capacity(n);

    let base_alpha = dec.areas()[opts.base];
    points[opts.base] = frame_points(base_alpha, 2);
    balls[opts.base] = frame_horoballs(base_alpha);
    placed[opts.base] = true;
    let mut work = VecDeque::from([opts.base]);
    while let Some(ti) = match opts.tree {
        TreeOrder::BreadthFirst => work.pop_front(),
        TreeOrder::DepthFirst => work.pop_back(),
    } {
        order.push(ti);
        let sides: Vec<usize> = match opts.tree {
            TreeOrder::BreadthFirst => vec![0, 1, 2],
            // reversed so the stack pops the lowest side first
            TreeOrder::DepthFirst => vec![2, 1, 0],
        };
        for k in sides {
            let s = Side {
                triangle: ti,
                index: k,
            };
            let o = t.opposite(s);
            if placed[o.triangle] {
                continue;
            }
            let (tj, m, pts, hb) = place_neighbor(t, dec, s, &maps[ti], &points[ti]);
            maps[tj] = m;
            points[tj] = pts;
            balls[tj] = hb;
            tree[tj] = Some(TreeLink {
                parent: ti,
                side: o.index,
            });
            placed[tj] = true;
            work.push_back(tj);
        }
    }
    if opts.tree == TreeOrder::DepthFirst {
        // depth-first placement order is the discovery order, which the
        // stack pops out of; rebuild it from the tree for stable output
        order = placement_order(&tree, opts.base);
    }
    // far from the base, lifts shrink below f64 resolution and their
    // points may coincide numerically, so no distinctness check here
    let placements = points
        .into_iter()
        .map(|points| IdealTriangle { points })
        .collect();
    Ok(DevelopedSurface {
        triangulation: t.clone(),
        decoration: dec.clone(),
        base: opts.base,
        placements,
        horoballs: balls,
        maps,
        tree,
        order,
    })
}

fn placement_order(tree: &[Option<TreeLink>], base: TriangleId) -> Vec<TriangleId> {
    let mut children: BTreeMap<TriangleId, Vec<TriangleId>> = BTreeMap::new();
    for (c, link) in tree.iter().enumerate() {
        if let Some(l) = link {
            children.entry(l.parent).or_default().push(c);
        }
    }
    let mut out = Vec::with_capacity(tree.len());
    let mut stack = vec![base];
    while let Some(x) = stack.pop() {
        out.push(x);
        if let Some(cs) = children.get(&x) {
            stack.extend(cs.iter().rev());
        }
    }
    out
}

impl DevelopedSurface {
    pub fn triangulation(&self) -> &Triangulation {
        &self.triangulation
    }

    pub fn decoration(&self) -> &CornerDecoration {
        &self.decoration
    }

    /// Largest |log| size mismatch between the horoballs two adjacent
    /// triangles put on their shared vertices, over all edges. Zero exactly
    /// when (C) holds. Measured in the frame of one of the two triangles.
    pub fn edge_consistency(&self) -> f64 {
        let t = &self.triangulation;
        let mut worst: f64 = 0.0;
        for pair in t.edges() {
            let (here, nb) = self.local_pair(pair[0]);
            let s = pair[0];
            let o = t.opposite(s);
            for (mine, theirs) in [(s.index, (o.index + 1) % 3), ((s.index + 1) % 3, o.index)] {
                worst = worst.max(log_size_gap(&here[mine], &nb[theirs]).abs());
            }
        }
        worst
    }

    /// Largest |horoball distance − edge length| over both triangles at
    /// every edge, each measured in the frame of the first.
    pub fn edge_length_error(&self, lengths: &EdgeLengths) -> Result<f64, DevelopError> {
        let t = &self.triangulation;
        let mut worst: f64 = 0.0;
        for (e, pair) in t.edges().iter().enumerate() {
            let (here, nb) = self.local_pair(pair[0]);
            let (k, ko) = (pair[0].index, t.opposite(pair[0]).index);
            let d1 = horoball_distance(&here[k], &here[(k + 1) % 3])?;
            let d2 = horoball_distance(&nb[ko], &nb[(ko + 1) % 3])?;
            let want = lengths.lengths[e];
            worst = worst.max((d1 - want).abs()).max((d2 - want).abs());
        }
        Ok(worst)
    }

    /// Horoballs of `s.triangle` in its own frame, and of its neighbor
    /// across `s` glued into that frame.
    fn local_pair(&self, s: Side) -> ([Horoball; 3], [Horoball; 3]) {
        let alpha = self.decoration.areas()[s.triangle];
        let (_, _, _, nb) = place_neighbor(
            &self.triangulation,
            &self.decoration,
            s,
            &Mobius::IDENTITY,
            &frame_points(alpha, 2),
        );
        (frame_horoballs(alpha), nb)
    }

    /// Holonomy around every cusp, in vertex order.
    pub fn holonomies(&self) -> Vec<CuspHolonomy> {
        (0..self.triangulation.vertex_count())
            .map(|v| cusp_holonomy(self, v).expect("vertex in range"))
            .collect()
    }
}

/// Signed distance between two concentric horoballs, positive when `a` is
/// the larger one.
fn log_size_gap(a: &Horoball, b: &Horoball) -> f64 {
    match a.center {
        IdealPoint::Infinity => (b.size / a.size).ln(),
        IdealPoint::Finite(_) => (a.size / b.size).ln(),
    }
}

/// Return map of a loop once around cusp `v`, through the triangles of its
/// star in counterclockwise order.
pub fn cusp_holonomy(dev: &DevelopedSurface, v: VertexId) -> Result<CuspHolonomy, DevelopError> {
    let t = &dev.triangulation;
    let star = t.vertex_star(v).map_err(|_| DevelopError::UnknownCusp(v))?;
    let first = star[0];
    let mut h = Mobius::IDENTITY;
    let mut cur = first;
    for _ in 0..star.len() {
        let s = Side {
            triangle: cur.triangle,
            index: (cur.index + 2) % 3,
        };
        h = h.compose(&gluing_map(t, &dev.decoration, s));
        let o = t.opposite(s);
        cur = Corner {
            triangle: o.triangle,
            index: o.index,
        };
    }
    debug_assert_eq!(cur, first);
    let f = frame_change(dev.decoration.areas()[first.triangle], first.index);
    let k = f.inverse().compose(&h).compose(&f);
    let scaling = k.a / k.d;
    let translation = k.b / k.d;
    let m0 = dev.maps[first.triangle];
    Ok(CuspHolonomy {
        vertex: v,
        map: m0.compose(&h).compose(&m0.inverse()),
        scaling,
        translation,
    })
}

/// Returns a copy of `dec` whose side product on side `s` is multiplied by
/// `factor`, leaving the other two side products of that triangle alone.
/// Applied to a decoration satisfying (C), exactly one edge then fails (C),
/// by that factor.
pub fn inject_edge_violation(
    dec: &CornerDecoration,
    s: Side,
    factor: f64,
) -> Result<CornerDecoration, DecorError> {
    let mut areas = dec.areas().to_vec();
    let r = factor.sqrt();
    let row = &mut areas[s.triangle];
    row[s.index] *= r;
    row[(s.index + 1) % 3] *= r;
    row[(s.index + 2) % 3] /= r;
    CornerDecoration::new(areas)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Overlap {
    /// Cusp whose neighborhood exposed the overlap.
    pub cusp: VertexId,
    pub first: VertexId,
    pub second: VertexId,
    pub distance: f64,
}

/// Pairwise horoball check over finite neighborhoods of every cusp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingReport {
    pub radius: usize,
    pub triangle_copies: usize,
    pub horoballs: usize,
    pub pairs_checked: usize,
    pub tangencies: usize,
    pub overlaps: Vec<Overlap>,
    /// Same ideal point carrying horoballs of different sizes.
    pub size_conflicts: usize,
    pub min_distance: f64,
}

impl EmbeddingReport {
    pub fn embedded(&self) -> bool {
        self.overlaps.is_empty() && self.size_conflicts == 0
    }
}

fn same_point(a: IdealPoint, b: IdealPoint) -> bool {
    match (a, b) {
        (IdealPoint::Infinity, IdealPoint::Infinity) => true,
        (IdealPoint::Finite(x), IdealPoint::Finite(y)) => {
            (x - y).abs() <= 1e-9 * (1.0 + x.abs().max(y.abs()))
        }
        _ => false,
    }
}

/// Lifts around cusp `v`: starting from one triangle of its star, placed
/// with `v` at ∞ under a height-1 horoball, every lift within `depth` dual
/// steps. Returns the horoballs with their vertex ids.
fn cusp_neighborhood(
    t: &Triangulation,
    dec: &CornerDecoration,
    v: VertexId,
    depth: usize,
) -> (usize, Vec<(Horoball, VertexId)>) {
    let first = t.vertex_star(v).expect("vertex in range")[0];
    let alpha = dec.areas()[first.triangle];
    let to_cusp = frame_change(alpha, first.index).inverse();
    let points = frame_points(alpha, first.index);
    let frame = frame_horoballs(alpha);
    let balls = [0, 1, 2].map(|i| to_cusp.apply_horoball_onto(&frame[i], points[i]));
    // the dual graph of the universal cover is a tree, so lifts reached by
    // never stepping back through the entry side are all distinct
    let mut frontier = vec![(first.triangle, to_cusp, points, None::<usize>)];
    let mut out: Vec<(Horoball, VertexId)> = Vec::new();
    let verts = t.triangle(first.triangle);
    out.extend((0..3).map(|i| (balls[i], verts[i])));
    let mut copies = 1;
    for _ in 0..depth {
        let mut next = Vec::new();
        for (ti, m, pts, entry) in &frontier {
            for k in 0..3 {
                if Some(k) == *entry {
                    continue;
                }
                let s = Side {
                    triangle: *ti,
                    index: k,
                };
                let (tj, mj, pj, bj) = place_neighbor(t, dec, s, m, pts);
                let vj = t.triangle(tj);
                out.extend((0..3).map(|i| (bj[i], vj[i])));
                next.push((tj, mj, pj, Some(t.opposite(s).index)));
                copies += 1;
            }
        }
        frontier = next;
    }
    (copies, out)
}

#[derive(Default)]
struct PairTally {
    horoballs: usize,
    pairs_checked: usize,
    tangencies: usize,
    size_conflicts: usize,
    overlaps: Vec<(VertexId, VertexId, f64)>,
    min_distance: f64,
}

fn check_horoballs(mut raw: Vec<(Horoball, VertexId)>) -> PairTally {
    let mut tally = PairTally {
        min_distance: f64::INFINITY,
        ..PairTally::default()
    };
    raw.sort_by(|a, b| match (a.0.center, b.0.center) {
        (IdealPoint::Finite(x), IdealPoint::Finite(y)) => x.total_cmp(&y),
        (IdealPoint::Infinity, IdealPoint::Infinity) => std::cmp::Ordering::Equal,
        (IdealPoint::Infinity, _) => std::cmp::Ordering::Greater,
        (_, IdealPoint::Infinity) => std::cmp::Ordering::Less,
    });
    // merge horoballs sharing a center
    let mut merged: Vec<(Horoball, VertexId)> = Vec::new();
    for (h, v) in raw {
        match merged.last() {
            Some(&(h0, v0)) if same_point(h0.center, h.center) => {
                if v0 != v {
                    tally.overlaps.push((v0, v, f64::NEG_INFINITY));
                } else if (h0.size - h.size).abs() > 1e-9 * h0.size.max(h.size) {
                    tally.size_conflicts += 1;
                }
            }
            _ => merged.push((h, v)),
        }
    }
    tally.horoballs = merged.len();
    let mut record = |a: &(Horoball, VertexId), b: &(Horoball, VertexId)| {
        let d = horoball_distance(&a.0, &b.0).expect("distinct centers");
        tally.pairs_checked += 1;
        tally.min_distance = tally.min_distance.min(d);
        match horoballs_disjoint(&a.0, &b.0, DEFAULT_TANGENCY_TOL).expect("distinct centers") {
            Contact::Tangent => tally.tangencies += 1,
            Contact::Overlapping => tally.overlaps.push((a.1, b.1, d)),
            Contact::Disjoint => {}
        }
    };
    let (finite, top): (Vec<_>, Vec<_>) = merged
        .into_iter()
        .partition(|(h, _)| !h.center.is_infinite());
    for t in &top {
        for f in &finite {
            record(t, f);
        }
    }
    let dmax = finite.iter().map(|b| b.0.size).fold(0.0, f64::max);
    let x = |b: &(Horoball, VertexId)| b.0.center.as_finite().expect("finite");
    for i in 0..finite.len() {
        for j in (i + 1)..finite.len() {
            // |dz|² < d₁d₂ ≤ dmax² is needed to overlap or touch
            if x(&finite[j]) - x(&finite[i]) > dmax * (1.0 + 1e-6) {
                break;
            }
            record(&finite[i], &finite[j]);
        }
    }
    tally
}

/// Checks, for every cusp, that the horoballs on all lifts within
/// `deg(v) + radius` dual steps of its star are pairwise disjoint
/// (tangency allowed). Each neighborhood is laid out with the cusp at ∞,
/// so the check is a certificate for those neighborhoods only.
pub fn embedded_cusp_check(dev: &DevelopedSurface, radius: usize) -> EmbeddingReport {
    let t = &dev.triangulation;
    let mut rep = EmbeddingReport {
        radius,
        triangle_copies: 0,
        horoballs: 0,
        pairs_checked: 0,
        tangencies: 0,
        overlaps: Vec::new(),
        size_conflicts: 0,
        min_distance: f64::INFINITY,
    };
    for v in 0..t.vertex_count() {
        let (copies, balls) = cusp_neighborhood(t, &dev.decoration, v, t.degree(v) + radius);
        let tally = check_horoballs(balls);
        rep.triangle_copies += copies;
        rep.horoballs += tally.horoballs;
        rep.pairs_checked += tally.pairs_checked;
        rep.tangencies += tally.tangencies;
        rep.size_conflicts += tally.size_conflicts;
        rep.min_distance = rep.min_distance.min(tally.min_distance);
        rep.overlaps.extend(
            tally
                .overlaps
                .into_iter()
                .map(|(first, second, distance)| Overlap {
                    cusp: v,
                    first,
                    second,
                    distance,
                }),
        );
    }
    rep
}

/// Cross-ratios of the quadrilateral around every edge whose two triangles
/// are adjacent in the development's tree, keyed by edge.
pub fn tree_edge_cross_ratios(dev: &DevelopedSurface) -> BTreeMap<usize, f64> {
    let t = &dev.triangulation;
    let mut out = BTreeMap::new();
    for (child, link) in dev.tree.iter().enumerate() {
        let Some(link) = link else { continue };
        let s = Side {
            triangle: child,
            index: link.side,
        };
        let o = t.opposite(s);
        let c = dev.placements[child].points;
        let p = dev.placements[o.triangle].points;
        let q = [
            c[s.index],
            c[(s.index + 1) % 3],
            c[(s.index + 2) % 3],
            p[(o.index + 2) % 3],
        ];
        // seen from the other triangle the quadruple is (b, a; d, c), which
        // has the same cross-ratio
        out.insert(t.edge_of(s), crate::hyp2::cross_ratio(q));
    }
    out
}

/// Viewport in half-plane coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl Window {
    /// Fits the developed fundamental region's finite vertices, with the
    /// height set by the widest triangle.
    pub fn fit(dev: &DevelopedSurface) -> Window {
        let xs: Vec<f64> = dev
            .placements
            .iter()
            .flat_map(|p| p.points.iter().filter_map(|q| q.as_finite()))
            .collect();
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let pad = 0.05 * (hi - lo).max(1.0);
        Window {
            x_min: lo - pad,
            x_max: hi + pad,
            y_max: 1.25,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderOptions {
    pub window: Window,
    /// Pixels per unit.
    pub scale: f64,
    pub labels: bool,
}

impl RenderOptions {
    pub fn new(window: Window) -> Self {
        RenderOptions {
            window,
            scale: 400.0,
            labels: false,
        }
    }
}

/// Draws triangle sides as geodesics and horoballs as circles (or the
/// horizontal line for the ball at ∞), clipped to the window.
pub fn render_svg_string(
    dev: &DevelopedSurface,
    opts: &RenderOptions,
) -> Result<String, DevelopError> {
    let w = opts.window;
    let ok = [w.x_min, w.x_max, w.y_max, opts.scale]
        .iter()
        .all(|x| x.is_finite())
        && w.x_min <= w.x_max
        && w.y_max >= 0.0
        && opts.scale > 0.0;
    if !ok {
        return Err(DevelopError::InvalidWindow(format!(
            "{w:?} at scale {}",
            opts.scale
        )));
    }
    let s = opts.scale;
    let width = (w.x_max - w.x_min) * s;
    let height = w.y_max * s;
    let px = |x: f64| (x - w.x_min) * s;
    let py = |y: f64| height - y * s;
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        "<!-- window x_min={} x_max={} y_max={} scale={} -->",
        w.x_min, w.x_max, w.y_max, s
    );
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width:.3}" height="{height:.3}" viewBox="0 0 {width:.3} {height:.3}">"#
    );
    let _ = writeln!(
        out,
        r#"<defs><clipPath id="view"><rect x="0" y="0" width="{width:.3}" height="{height:.3}"/></clipPath></defs>"#
    );
    let _ = writeln!(
        out,
        r#"<g clip-path="url(#view)" fill="none" stroke-width="1">"#
    );

    let min_px = 0.05;
    let mut drawn = std::collections::BTreeSet::new();
    for p in &dev.placements {
        for k in 0..3 {
            let (a, b) = (p.points[k], p.points[(k + 1) % 3]);
            let key = match (a, b) {
                (IdealPoint::Finite(x), IdealPoint::Finite(y)) => {
                    (x.min(y).to_bits(), x.max(y).to_bits())
                }
                (IdealPoint::Finite(x), IdealPoint::Infinity)
                | (IdealPoint::Infinity, IdealPoint::Finite(x)) => (x.to_bits(), u64::MAX),
                _ => continue,
            };
            if !drawn.insert(key) {
                continue;
            }
            match (a, b) {
                (IdealPoint::Finite(x), IdealPoint::Finite(y)) => {
                    let (u, v) = (x.min(y), x.max(y));
                    let r = (v - u) / 2.0;
                    if v < w.x_min || u > w.x_max || r * s < min_px {
                        continue;
                    }
                    let _ = writeln!(
                        out,
                        r#"<path stroke="black" d="M {:.4} {:.4} A {:.4} {:.4} 0 0 1 {:.4} {:.4}"/>"#,
                        px(u),
                        py(0.0),
                        r * s,
                        r * s,
                        px(v),
                        py(0.0)
                    );
                }
                (IdealPoint::Finite(x), _) | (_, IdealPoint::Finite(x)) => {
                    if x < w.x_min || x > w.x_max {
                        continue;
                    }
                    let _ = writeln!(
                        out,
                        r#"<line stroke="black" x1="{:.4}" y1="{:.4}" x2="{:.4}" y2="0"/>"#,
                        px(x),
                        py(0.0),
                        px(x)
                    );
                }
                _ => {}
            }
        }
    }

    let mut balls = std::collections::BTreeSet::new();
    for hb in &dev.horoballs {
        for h in hb {
            let key = match h.center {
                IdealPoint::Finite(x) => (x.to_bits(), h.size.to_bits()),
                IdealPoint::Infinity => (u64::MAX, h.size.to_bits()),
            };
            if !balls.insert(key) {
                continue;
            }
            match h.center {
                IdealPoint::Finite(x) => {
                    let r = h.size / 2.0;
                    if x + r < w.x_min || x - r > w.x_max || r * s < min_px {
                        continue;
                    }
                    let _ = writeln!(
                        out,
                        r#"<circle stroke="steelblue" cx="{:.4}" cy="{:.4}" r="{:.4}"/>"#,
                        px(x),
                        py(r),
                        r * s
                    );
                }
                IdealPoint::Infinity => {
                    if h.size > w.y_max {
                        continue;
                    }
                    let _ = writeln!(
                        out,
                        r#"<line stroke="steelblue" x1="0" y1="{:.4}" x2="{width:.3}" y2="{:.4}"/>"#,
                        py(h.size),
                        py(h.size)
                    );
                }
            }
        }
    }

    if opts.labels {
        let _ = writeln!(
            out,
            r#"<g font-family="sans-serif" font-size="10" fill="black" stroke="none">"#
        );
        for (ti, m) in dev.maps.iter().enumerate() {
            let a = dev.decoration.areas()[ti];
            // an interior point of the frame triangle (0, α₂, ∞)
            let z = Complex64::new(a[2] / 2.0, a[2]);
            let img = (m.a * z + m.b) / (m.c * z + m.d);
            if !(img.re.is_finite() && img.im.is_finite()) {
                continue;
            }
            if img.re < w.x_min || img.re > w.x_max || img.im > w.y_max {
                continue;
            }
            let _ = writeln!(
                out,
                r#"<text x="{:.4}" y="{:.4}" text-anchor="middle">[{:.3},{:.3},{:.3}]</text>"#,
                px(img.re),
                py(img.im),
                a[0],
                a[1],
                a[2]
            );
        }
        let _ = writeln!(out, "</g>");
    }
    let _ = writeln!(out, "</g>");
    let _ = writeln!(out, "</svg>");
    Ok(out)
}

pub fn render_svg(
    dev: &DevelopedSurface,
    opts: &RenderOptions,
    path: &Path,
) -> Result<(), DevelopError> {
    let svg = render_svg_string(dev, opts)?;
    std::fs::write(path, svg)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decor::{corner_to_edge, paper_decoration, DecorationParams, DEFAULT_RELATIVE_TOL};
    use crate::hyp2::corner_area;
    use crate::surface::{family_member, icosahedron};

    fn two_triangles() -> Triangulation {
        Triangulation::from_triangles(3, vec![[0, 1, 2], [0, 2, 1]]).unwrap()
    }

    fn ones(t: &Triangulation) -> CornerDecoration {
        CornerDecoration::uniform(t, 1.0).unwrap()
    }

    #[test]
    fn base_triangle_placement() {
        let t = two_triangles();
        let dev = develop(&t, &ones(&t), &DevelopOptions::default()).unwrap();
        let p = dev.placements[0].points;
        assert_eq!(
            p,
            [
                IdealPoint::Finite(0.0),
                IdealPoint::Finite(1.0),
                IdealPoint::Infinity
            ]
        );
        let h = dev.horoballs[0];
        assert_eq!(h[2], Horoball::at_infinity(1.0).unwrap());
        assert_eq!(h[0], Horoball::at(0.0, 1.0).unwrap());
        assert_eq!(h[1], Horoball::at(1.0, 1.0).unwrap());
    }

    #[test]
    fn glued_pair_reflects_across_edge() {
        let t = two_triangles();
        let dev = develop(&t, &ones(&t), &DevelopOptions::default()).unwrap();
        // the second triangle shares one side with the first and keeps
        // every corner area at 1
        let q = dev.placements[1];
        assert!(q.is_positively_oriented());
        for k in 0..3 {
            let a = corner_area(&q, k, &dev.horoballs[1][k]).unwrap();
            assert!((a - 1.0).abs() < 1e-12);
        }
        let shared = dev.placements[0]
            .points
            .iter()
            .filter(|p| q.points.contains(p))
            .count();
        assert_eq!(shared, 2);
        for i in 0..3 {
            for j in (i + 1)..3 {
                let d = horoball_distance(&dev.horoballs[1][i], &dev.horoballs[1][j]).unwrap();
                assert!(d.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn corner_areas_reproduced() {
        let m = 1;
        let t = family_member(m);
        let p = DecorationParams::from_recursion(m).unwrap();
        let dec = paper_decoration(&t, &p).unwrap();
        let dev = develop(&t, &dec, &DevelopOptions::default()).unwrap();
        for ti in 0..t.triangle_count() {
            assert!(dev.placements[ti].is_positively_oriented());
            for k in 0..3 {
                let a = corner_area(&dev.placements[ti], k, &dev.horoballs[ti][k]).unwrap();
                let want = dec.areas()[ti][k];
                assert!((a - want).abs() < 1e-9 * want, "triangle {ti} corner {k}");
            }
        }
    }

    #[test]
    fn paper_decoration_consistent_and_parabolic() {
        for m in 1..=3 {
            let t = family_member(m);
            let p = DecorationParams::from_recursion(m).unwrap();
            let dec = paper_decoration(&t, &p).unwrap();
            let dev = develop(&t, &dec, &DevelopOptions::default()).unwrap();
            assert!(dev.edge_consistency() < 1e-9);
            let lengths = corner_to_edge(&t, &dec, DEFAULT_RELATIVE_TOL).unwrap();
            assert!(dev.edge_length_error(&lengths).unwrap() < 1e-9);
            for h in dev.holonomies() {
                assert!(
                    h.is_parabolic(1e-9),
                    "m = {m}, cusp {}: {}",
                    h.vertex,
                    h.scaling
                );
            }
        }
    }

    #[test]
    fn icosahedron_cusp_translation() {
        let t = icosahedron();
        let dev = develop(&t, &ones(&t), &DevelopOptions::default()).unwrap();
        for h in dev.holonomies() {
            assert!((h.translation - 5.0).abs() < 1e-12);
            assert!((h.scaling - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn gluing_maps_are_mutually_inverse() {
        let t = family_member(2);
        let p = DecorationParams::from_recursion(2).unwrap();
        let dec = paper_decoration(&t, &p).unwrap();
        let dec = inject_edge_violation(
            &dec,
            Side {
                triangle: 3,
                index: 1,
            },
            1.7,
        )
        .unwrap();
        for pair in t.edges() {
            let g = gluing_map(&t, &dec, pair[0]).compose(&gluing_map(&t, &dec, pair[1]));
            let z = IdealPoint::Finite(0.37);
            let w = g.apply(z).as_finite().unwrap();
            assert!((w - 0.37).abs() < 1e-12);
        }
    }

    #[test]
    fn injected_violation_scales_both_endpoint_cusps() {
        let t = icosahedron();
        let e = std::f64::consts::E;
        let s = Side {
            triangle: 4,
            index: 0,
        };
        let dec = inject_edge_violation(&ones(&t), s, e).unwrap();
        let rep = check_geometric(&t, &dec, DEFAULT_RELATIVE_TOL).unwrap();
        let c_count = rep
            .violations
            .iter()
            .filter(|v| matches!(v, Violation::C { .. }))
            .count();
        assert_eq!(c_count, 1);
        let opts = DevelopOptions {
            require_geometric: false,
            ..DevelopOptions::default()
        };
        let dev = develop(&t, &dec, &opts).unwrap();
        let (a, b) = t.edge_endpoints(t.edge_of(s));
        for h in dev.holonomies() {
            if h.vertex == a || h.vertex == b {
                assert!((h.scaling.ln().abs() - 0.5).abs() < 1e-9);
            } else {
                assert!(h.is_parabolic(1e-9));
            }
        }
        assert!(matches!(
            develop(&t, &dec, &DevelopOptions::default()),
            Err(DevelopError::NonGeometric(_))
        ));
    }

    #[test]
    fn embedded_checks() {
        let t = icosahedron();
        let dev = develop(&t, &ones(&t), &DevelopOptions::default()).unwrap();
        let rep = embedded_cusp_check(&dev, 1);
        assert!(rep.embedded(), "{:?}", rep.overlaps.first());
        assert!(rep.tangencies > 0);

        let dec = ones(&t)
            .scaled_corner(
                Corner {
                    triangle: 0,
                    index: 2,
                },
                3.0,
            )
            .unwrap();
        let opts = DevelopOptions {
            require_geometric: false,
            ..DevelopOptions::default()
        };
        let dev = develop(&t, &dec, &opts).unwrap();
        assert!(!embedded_cusp_check(&dev, 0).overlaps.is_empty());

        let m = 2;
        let t = family_member(m);
        let p = DecorationParams::from_recursion(m).unwrap();
        let dev = develop(
            &t,
            &paper_decoration(&t, &p).unwrap(),
            &DevelopOptions::default(),
        )
        .unwrap();
        assert!(embedded_cusp_check(&dev, 1).embedded());
    }

    #[test]
    fn cross_ratios_tree_independent() {
        let m = 1;
        let t = family_member(m);
        let p = DecorationParams::from_recursion(m).unwrap();
        let dec = paper_decoration(&t, &p).unwrap();
        let d1 = develop(&t, &dec, &DevelopOptions::default()).unwrap();
        let d2 = develop(
            &t,
            &dec,
            &DevelopOptions {
                base: 17,
                ..DevelopOptions::default()
            },
        )
        .unwrap();
        let (r1, r2) = (tree_edge_cross_ratios(&d1), tree_edge_cross_ratios(&d2));
        let mut common = 0;
        for (e, x) in &r1 {
            if let Some(y) = r2.get(e) {
                common += 1;
                assert!(
                    (x - y).abs() < 1e-9 * x.abs().max(1.0),
                    "edge {e}: {x} vs {y}"
                );
            }
        }
        assert!(common > 10);
    }

    #[test]
    fn depth_first_order_covers_all() {
        let t = family_member(1);
        let dev = develop(
            &t,
            &ones(&t),
            &DevelopOptions {
                tree: TreeOrder::DepthFirst,
                ..DevelopOptions::default()
            },
        )
        .unwrap();
        let mut o = dev.order.clone();
        o.sort_unstable();
        assert_eq!(o, (0..t.triangle_count()).collect::<Vec<_>>());
    }

    #[test]
    fn svg_examples() {
        let t = icosahedron();
        let dev = develop(&t, &ones(&t), &DevelopOptions::default()).unwrap();
        let svg = render_svg_string(
            &dev,
            &RenderOptions::new(Window {
                x_min: -0.5,
                x_max: 1.5,
                y_max: 1.25,
            }),
        )
        .unwrap();
        // diameter-1 circles at 0 and 1 touching the height-1 line
        assert!(svg
            .contains(r#"<circle stroke="steelblue" cx="200.0000" cy="300.0000" r="200.0000"/>"#));
        assert!(svg
            .contains(r#"<circle stroke="steelblue" cx="600.0000" cy="300.0000" r="200.0000"/>"#));
        assert!(svg.contains(r#"y1="100.0000""#));

        let empty = render_svg_string(
            &dev,
            &RenderOptions::new(Window {
                x_min: 1000.0,
                x_max: 1001.0,
                y_max: 0.001,
            }),
        )
        .unwrap();
        assert!(!empty.contains("<circle") && !empty.contains("<path"));
        assert!(empty.trim_end().ends_with("</svg>"));

        let bad = RenderOptions::new(Window {
            x_min: 1.0,
            x_max: 0.0,
            y_max: 1.0,
        });
        assert!(render_svg_string(&dev, &bad).is_err());
    }
}
