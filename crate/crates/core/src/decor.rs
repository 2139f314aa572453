//! Corner-area decorations of ideal triangulations.
//!
//! A decoration assigns a horoball area to every (triangle, corner) pair.
//! It is *geometric* when
//!
//! * (A) every corner area is at most 2,
//! * (B) the two areas at the ends of every triangle side multiply to at
//!   most 1,
//! * (C) across every edge the two triangles give the same product of the
//!   areas at the edge's endpoints.
//!
//! The edge length between the two horoballs at the ends of an edge is
//! `−log(ab)` for corner areas `a`, `b`; under (C) that length is well
//! defined, and conversely edge lengths determine a decoration satisfying
//! (C) exactly.

use crate::surface::{
    classify_vertices, Corner, EdgeId, FaceColor, Side, TriangleId, Triangulation, VertexId,
    VertexType,
};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// The length every cusp of the subdivision family is pushed toward.
pub fn target_length() -> f64 {
    10.0 / 3f64.sqrt()
}

/// The value of c₁ that makes the gray-corner cusps exactly
/// [`target_length`]: the positive root of `2/c² + 4/c = 10/√3`.
pub fn saturating_c1() -> f64 {
    let r3 = 3f64.sqrt();
    (r3 + (3.0 + 5.0 * r3).sqrt()) / 5.0
}

/// Relative tolerance used for (A), (B) and (C).
pub const DEFAULT_RELATIVE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecorError {
    #[error("decoration covers {got} triangles, triangulation has {expected}")]
    Partial { expected: usize, got: usize },
    #[error("corner {corner} of triangle {triangle} has non-positive or non-finite area {value}")]
    NonPositiveArea {
        triangle: TriangleId,
        corner: usize,
        value: f64,
    },
    #[error("edge {edge} has side products {first} and {second}, violating (C)")]
    EdgeMismatch {
        edge: EdgeId,
        first: f64,
        second: f64,
    },
    #[error("edge lengths cover {got} edges, triangulation has {expected}")]
    PartialLengths { expected: usize, got: usize },
    #[error("triangulation is not a member of the subdivision family")]
    NotFamily,
    #[error("triangulation is not colored")]
    Uncolored,
    #[error("parameters are for m = {params}, triangulation has m = {surface}")]
    MismatchedM { params: u32, surface: u32 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("recursion hits its pole at c = L/2 = {0}")]
    Pole(f64),
    #[error("fixed points are complex for L = {0} (need L² ≥ 32)")]
    ComplexFixedPoints(f64),
    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(f64),
}

/// Positive area for every (triangle, corner).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CornerDecoration {
    areas: Vec<[f64; 3]>,
}

impl CornerDecoration {
    pub fn new(areas: Vec<[f64; 3]>) -> Result<Self, DecorError> {
        for (t, row) in areas.iter().enumerate() {
            for (k, &a) in row.iter().enumerate() {
                if !(a.is_finite() && a > 0.0) {
                    return Err(DecorError::NonPositiveArea {
                        triangle: t,
                        corner: k,
                        value: a,
                    });
                }
            }
        }
        Ok(CornerDecoration { areas })
    }

    pub fn uniform(t: &Triangulation, value: f64) -> Result<Self, DecorError> {
        CornerDecoration::new(vec![[value; 3]; t.triangle_count()])
    }

    pub fn areas(&self) -> &[[f64; 3]] {
        &self.areas
    }

    pub fn area(&self, c: Corner) -> f64 {
        self.areas[c.triangle][c.index]
    }

    pub fn len(&self) -> usize {
        self.areas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.areas.is_empty()
    }

    /// Returns a copy with one corner area multiplied by `factor`.
    pub fn scaled_corner(&self, c: Corner, factor: f64) -> Result<Self, DecorError> {
        let mut areas = self.areas.clone();
        areas[c.triangle][c.index] *= factor;
        CornerDecoration::new(areas)
    }

    pub fn check_total(&self, t: &Triangulation) -> Result<(), DecorError> {
        if self.areas.len() != t.triangle_count() {
            return Err(DecorError::Partial {
                expected: t.triangle_count(),
                got: self.areas.len(),
            });
        }
        Ok(())
    }

    /// Product of the corner areas at the two ends of side `s`.
    pub fn side_product(&self, s: Side) -> f64 {
        let row = self.areas[s.triangle];
        row[s.index] * row[(s.index + 1) % 3]
    }
}

/// Signed distance between the horoballs at the two ends of each edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeLengths {
    pub lengths: Vec<f64>,
}

impl EdgeLengths {
    pub fn zeros(t: &Triangulation) -> Self {
        EdgeLengths {
            lengths: vec![0.0; t.edge_count()],
        }
    }
}

/// One failed condition of a geometric decoration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "condition")]
pub enum Violation {
    /// (A): corner area above 2.
    A {
        triangle: TriangleId,
        corner: usize,
        area: f64,
    },
    /// (B): two corners of one triangle multiply above 1.
    B {
        triangle: TriangleId,
        side: usize,
        product: f64,
    },
    /// (C): the two sides of an edge disagree on the product.
    C {
        edge: EdgeId,
        first: f64,
        second: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometricityReport {
    pub violations: Vec<Violation>,
}

impl GeometricityReport {
    pub fn is_geometric(&self) -> bool {
        self.violations.is_empty()
    }
}

fn products_agree(p: f64, q: f64, rel_tol: f64) -> bool {
    (p - q).abs() <= rel_tol * p.abs().max(q.abs())
}

/// Reports every violation of (A), (B) and (C). Equality is accepted.
pub fn check_geometric(
    t: &Triangulation,
    dec: &CornerDecoration,
    rel_tol: f64,
) -> Result<GeometricityReport, DecorError> {
    dec.check_total(t)?;
    let mut violations = Vec::new();
    for (ti, row) in dec.areas().iter().enumerate() {
        for (k, &a) in row.iter().enumerate() {
            if a > 2.0 * (1.0 + rel_tol) {
                violations.push(Violation::A {
                    triangle: ti,
                    corner: k,
                    area: a,
                });
            }
        }
        for k in 0..3 {
            let p = row[k] * row[(k + 1) % 3];
            if p > 1.0 + rel_tol {
                violations.push(Violation::B {
                    triangle: ti,
                    side: k,
                    product: p,
                });
            }
        }
    }
    for (e, pair) in t.edges().iter().enumerate() {
        let (p, q) = (dec.side_product(pair[0]), dec.side_product(pair[1]));
        if !products_agree(p, q, rel_tol) {
            violations.push(Violation::C {
                edge: e,
                first: p,
                second: q,
            });
        }
    }
    Ok(GeometricityReport { violations })
}

/// Edge lengths `−log(ab)`, read from the first side of each edge after
/// confirming (C).
pub fn corner_to_edge(
    t: &Triangulation,
    dec: &CornerDecoration,
    rel_tol: f64,
) -> Result<EdgeLengths, DecorError> {
    dec.check_total(t)?;
    let lengths = t
        .edges()
        .iter()
        .enumerate()
        .map(|(e, pair)| {
            let (p, q) = (dec.side_product(pair[0]), dec.side_product(pair[1]));
            if products_agree(p, q, rel_tol) {
                Ok(-p.ln())
            } else {
                Err(DecorError::EdgeMismatch {
                    edge: e,
                    first: p,
                    second: q,
                })
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EdgeLengths { lengths })
}

/// Log of the corner area at corner `a` of a triangle whose sides have
/// lengths `d[0], d[1], d[2]` (side `k` joins corners `k` and `k + 1`).
pub fn corner_log_area(d: [f64; 3], a: usize) -> f64 {
    (d[(a + 1) % 3] - d[a] - d[(a + 2) % 3]) / 2.0
}

/// Inverts [`corner_to_edge`]; the result satisfies (C) exactly.
pub fn edge_to_corner(
    t: &Triangulation,
    lengths: &EdgeLengths,
) -> Result<CornerDecoration, DecorError> {
    if lengths.lengths.len() != t.edge_count() {
        return Err(DecorError::PartialLengths {
            expected: t.edge_count(),
            got: lengths.lengths.len(),
        });
    }
    let areas = (0..t.triangle_count())
        .map(|ti| {
            let d = side_lengths(t, lengths, ti);
            [0, 1, 2].map(|a| corner_log_area(d, a).exp())
        })
        .collect();
    CornerDecoration::new(areas)
}

pub(crate) fn side_lengths(t: &Triangulation, lengths: &EdgeLengths, ti: TriangleId) -> [f64; 3] {
    [0, 1, 2].map(|k| {
        lengths.lengths[t.edge_of(Side {
            triangle: ti,
            index: k,
        })]
    })
}

/// The family parameter `m` and areas `c₁..c_m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecorationParams {
    pub m: u32,
    pub c: Vec<f64>,
}

impl DecorationParams {
    pub fn new(c: Vec<f64>) -> Result<Self, DecorError> {
        if c.is_empty() {
            return Err(DecorError::InvalidParams(
                "need at least one c value".into(),
            ));
        }
        if let Some(bad) = c.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
            return Err(DecorError::InvalidParams(format!(
                "c values must be positive, got {bad}"
            )));
        }
        Ok(DecorationParams {
            m: c.len() as u32,
            c,
        })
    }

    /// Parameters generated by the recursion at [`target_length`] from
    /// [`saturating_c1`].
    pub fn from_recursion(m: u32) -> Result<Self, DecorError> {
        if m == 0 {
            return Err(DecorError::InvalidParams("m must be at least 1".into()));
        }
        DecorationParams::new(recursion_sequence(
            target_length(),
            saturating_c1(),
            m as usize,
        )?)
    }

    /// `c_j` with 1-based index, as in the labeling.
    pub fn cj(&self, j: u32) -> f64 {
        self.c[(j - 1) as usize]
    }

    /// True when every `c_j` lies in `[1, 2]`.
    pub fn admissible(&self) -> bool {
        self.c.iter().all(|&x| (1.0..=2.0).contains(&x))
    }
}

/// The white/gray labeling of the subdivision family.
///
/// White cells in the region of block corner `P_a` are paired into
/// diamonds: an up cell at row `t` (counted from `P_a`) gets
/// `[c, 1/c, 1/c]` with `c = c_{m−t}` on its corner toward `P_a`, and the
/// down cell below it carries the mirror image. Gray cells touching a
/// white cell get `[c₁, 1/c₁, 1/c₁]` with `c₁` opposite the shared side,
/// the three gray corner cells get `[1, 1, 1/c₁²]` with `1/c₁²` at the edge
/// midpoint, and the remaining gray cells get `[1, 1, 1]`.
///
/// For `m = 1` the single gray cell touches white cells on all three sides;
/// it gets `[1/c₁, 1/c₁, 1/c₁]`, the only labeling consistent with (C).
pub fn paper_decoration(
    t: &Triangulation,
    params: &DecorationParams,
) -> Result<CornerDecoration, DecorError> {
    let fam = t.family().ok_or(DecorError::NotFamily)?;
    if !t.is_colored() {
        return Err(DecorError::Uncolored);
    }
    let m = fam.m;
    if params.m != m || params.c.len() != m as usize {
        return Err(DecorError::MismatchedM {
            params: params.m,
            surface: m,
        });
    }
    let c1 = params.cj(1);
    let areas = fam
        .cells
        .iter()
        .enumerate()
        .map(|(ti, cell)| {
            let gray = t.color(ti) == FaceColor::Gray;
            if !gray {
                let a = (0..3)
                    .find(|&a| cell.cell[a] >= m)
                    .expect("white cells have a coordinate of at least m");
                let j = if cell.up {
                    cell.cell[a] + 1 - m
                } else {
                    cell.cell[a] + 2 - m
                };
                let c = params.cj(j);
                let mut row = [1.0 / c; 3];
                row[a] = c;
                return row;
            }
            if cell.up {
                return [1.0; 3];
            }
            let on_boundary: Vec<usize> = (0..3).filter(|&a| cell.cell[a] == m - 1).collect();
            match on_boundary.len() {
                3 => [1.0 / c1; 3],
                2 => {
                    let mid = (0..3)
                        .find(|a| !on_boundary.contains(a))
                        .expect("one coordinate below m - 1");
                    let mut row = [1.0; 3];
                    row[mid] = 1.0 / (c1 * c1);
                    row
                }
                1 => {
                    let mut row = [1.0 / c1; 3];
                    row[on_boundary[0]] = c1;
                    row
                }
                _ => [1.0; 3],
            }
        })
        .collect();
    CornerDecoration::new(areas)
}

/// How a vertex's closed-form area relates to the two published versions
/// of the area list, the stated one and the one derived in its proof.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormMatch {
    /// Both variants give this expression.
    Both,
    /// White-interior vertices: the statement's `4/c_{j+1} + c_j + c_{j+2}`
    /// at height `j`, which is the proof's `4/c_j + c_{j+1} + c_{j−1}` read at
    /// index `j + 1`.
    StatementIndexing,
    /// Only the statement's expression (the proof has `c₁` where the
    /// construction yields `c₂`).
    Statement,
    /// A configuration neither variant lists (small `m`).
    ConstructionOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosedForm {
    pub value: f64,
    pub form: FormMatch,
    /// Height `j` for white-region vertices.
    pub height: Option<u32>,
}

/// Closed-form cusp area of `v` under [`paper_decoration`], computed from
/// the vertex's lattice position alone.
pub fn closed_form_area(
    t: &Triangulation,
    v: VertexId,
    params: &DecorationParams,
) -> Option<ClosedForm> {
    let fam = t.family()?;
    let m = fam.m;
    if params.m != m {
        return None;
    }
    let (_, p) = t.vertex_lattice(v)?;
    let c = |j: u32| params.cj(j);
    let max = *p.iter().max()?;
    let cf = |value, form| ClosedForm {
        value,
        form,
        height: None,
    };
    Some(match VertexType::of_lattice(p, m) {
        VertexType::LargeCorner => ClosedForm {
            height: Some(m),
            ..cf(5.0 * c(m), FormMatch::Both)
        },
        VertexType::WhiteEdge => {
            let j = max - m;
            ClosedForm {
                height: Some(j),
                ..cf(4.0 / c(j + 1) + 2.0 * c(j), FormMatch::Both)
            }
        }
        VertexType::WhiteInterior => {
            let j = max - m;
            ClosedForm {
                height: Some(j),
                ..cf(
                    4.0 / c(j + 1) + c(j) + c(j + 2),
                    FormMatch::StatementIndexing,
                )
            }
        }
        VertexType::GrayCorner => {
            let c1 = c(1);
            if m == 1 {
                cf(6.0 / c1, FormMatch::ConstructionOnly)
            } else {
                cf(2.0 / (c1 * c1) + 4.0 / c1, FormMatch::Both)
            }
        }
        VertexType::GrayEdge => {
            let a = (0..3).find(|&a| p[a] == m)?;
            let pos = p[(a + 1) % 3];
            let (c1, c2) = (c(1), c(2));
            if m == 2 {
                cf(c2 + 3.0 + 2.0 / c1, FormMatch::ConstructionOnly)
            } else if pos == 1 || pos == m - 1 {
                cf(c2 + 2.0 + 3.0 / c1, FormMatch::Statement)
            } else {
                cf(c2 + 1.0 + 4.0 / c1, FormMatch::Both)
            }
        }
        VertexType::GrayInterior => {
            let k = p.iter().filter(|&&x| x == m - 1).count() as f64;
            let form = if k > 2.0 {
                FormMatch::ConstructionOnly
            } else {
                FormMatch::Both
            };
            cf(k * c(1) + 6.0 - k, form)
        }
        VertexType::Unclassified => return None,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VertexArea {
    pub vertex: VertexId,
    pub vertex_type: VertexType,
    pub area: f64,
    pub closed_form: Option<ClosedForm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CuspAreaReport {
    pub vertices: Vec<VertexArea>,
    pub min_area: f64,
    pub min_vertex: VertexId,
    pub target: f64,
    /// `min_area − target`.
    pub margin: f64,
}

impl CuspAreaReport {
    /// Largest |area − closed form| over vertices that have a closed form.
    pub fn max_closed_form_error(&self) -> Option<f64> {
        self.vertices
            .iter()
            .filter_map(|v| v.closed_form.map(|cf| (v.area - cf.value).abs()))
            .reduce(f64::max)
    }

    pub fn total_area(&self) -> f64 {
        self.vertices.iter().map(|v| v.area).sum()
    }
}

/// Per-vertex sums of corner areas over each vertex star. With `params`,
/// family vertices also carry their closed form.
pub fn cusp_areas(
    t: &Triangulation,
    dec: &CornerDecoration,
    params: Option<&DecorationParams>,
) -> Result<CuspAreaReport, DecorError> {
    dec.check_total(t)?;
    let types = classify_vertices(t);
    let vertices: Vec<VertexArea> = (0..t.vertex_count())
        .map(|v| {
            let star = t.vertex_star(v).expect("vertex in range");
            VertexArea {
                vertex: v,
                vertex_type: types[v],
                area: star.iter().map(|&c| dec.area(c)).sum(),
                closed_form: params.and_then(|p| closed_form_area(t, v, p)),
            }
        })
        .collect();
    let (min_vertex, min_area) =
        vertices
            .iter()
            .map(|v| (v.vertex, v.area))
            .fold(
                (0, f64::INFINITY),
                |best, cur| if cur.1 < best.1 { cur } else { best },
            );
    let target = target_length();
    Ok(CuspAreaReport {
        vertices,
        min_area,
        min_vertex,
        target,
        margin: min_area - target,
    })
}

/// One step `c ↦ 4/(L − 2c)`.
pub fn recursion_step(l: f64, c: f64) -> Result<f64, DecorError> {
    let den = l - 2.0 * c;
    if den == 0.0 {
        return Err(DecorError::Pole(c));
    }
    Ok(4.0 / den)
}

/// `c₁, …, c_steps` starting from `c1`.
pub fn recursion_sequence(l: f64, c1: f64, steps: usize) -> Result<Vec<f64>, DecorError> {
    let mut out = Vec::with_capacity(steps);
    if steps == 0 {
        return Ok(out);
    }
    out.push(c1);
    while out.len() < steps {
        let next = recursion_step(l, *out.last().expect("nonempty"))?;
        out.push(next);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stability {
    Attracting,
    Repelling,
    Neutral,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FixedPoint {
    pub value: f64,
    /// Derivative of the recursion map at the fixed point.
    pub multiplier: f64,
    pub stability: Stability,
}

/// Real fixed points of `x ↦ 4/(L − 2x)`, roots of `2x² − Lx + 4 = 0`,
/// smaller root first.
pub fn fixed_points(l: f64) -> Result<[FixedPoint; 2], DecorError> {
    let disc = l * l - 32.0;
    if disc < 0.0 {
        return Err(DecorError::ComplexFixedPoints(l));
    }
    let s = disc.sqrt();
    // stable quadratic roots: the product of the roots is 2
    let big = (l + s) / 4.0;
    let small = 2.0 / big;
    let classify = |x: f64| {
        let den = l - 2.0 * x;
        let multiplier = 8.0 / (den * den);
        let stability = if (multiplier - 1.0).abs() <= 1e-12 {
            Stability::Neutral
        } else if multiplier < 1.0 {
            Stability::Attracting
        } else {
            Stability::Repelling
        };
        FixedPoint {
            value: x,
            multiplier,
            stability,
        }
    };
    Ok([classify(small), classify(big)])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecursionAnalysis {
    pub l: f64,
    pub sequence: Vec<f64>,
    pub fixed_points: Option<[FixedPoint; 2]>,
    /// Sequence is non-decreasing and ends within 1e-9 of the attracting
    /// fixed point.
    pub converged: bool,
}

pub fn analyze_recursion(l: f64, c1: f64, steps: usize) -> Result<RecursionAnalysis, DecorError> {
    let sequence = recursion_sequence(l, c1, steps)?;
    let fixed = fixed_points(l).ok();
    let converged = match (fixed, sequence.last()) {
        (Some(fp), Some(&last)) => {
            let attracting = fp
                .iter()
                .find(|p| p.stability == Stability::Attracting)
                .map(|p| p.value);
            attracting.is_some_and(|x| (last - x).abs() < 1e-9)
                && sequence.windows(2).all(|w| w[1] >= w[0])
        }
        _ => false,
    };
    Ok(RecursionAnalysis {
        l,
        sequence,
        fixed_points: fixed,
        converged,
    })
}

/// Smallest family member whose cusps all exceed `10/√3 − eps` under the
/// labeling with `c₁` = [`saturating_c1`] and the recursion at `10/√3`.
pub fn choose_m_for_epsilon(eps: f64) -> Result<DecorationParams, DecorError> {
    if !(eps > 0.0) {
        return Err(DecorError::NonPositiveEpsilon(eps));
    }
    let l = target_length();
    let mut c = vec![saturating_c1()];
    while 5.0 * c.last().expect("nonempty") <= l - eps {
        let next = recursion_step(l, *c.last().expect("nonempty"))?;
        c.push(next);
    }
    DecorationParams::new(c)
}
