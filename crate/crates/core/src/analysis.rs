//! Slope lengths, the 6-Theorem gate, the Farey packing and a numerical
//! probe of transverse horoballs against that packing.

use crate::hyp2::{Horoball, IdealPoint};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("translations {0} and {1} are linearly dependent")]
    DependentBasis(Complex64, Complex64),
    #[error("slope ({0}, {1}) is not a primitive pair")]
    NotPrimitive(i64, i64),
    #[error("slope lengths must be positive and finite, got {0}")]
    BadLength(f64),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

/// Translations realizing the (1, 0) and (0, 1) slopes on a cusp torus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CuspBasis {
    tau1: Complex64,
    tau2: Complex64,
}

impl CuspBasis {
    pub fn new(tau1: Complex64, tau2: Complex64) -> Result<Self, AnalysisError> {
        let cross = (tau1.conj() * tau2).im;
        let scale = tau1.norm() * tau2.norm();
        if !(cross.abs() > 1e-12 * scale) || !scale.is_finite() {
            return Err(AnalysisError::DependentBasis(tau1, tau2));
        }
        Ok(CuspBasis { tau1, tau2 })
    }

    pub fn tau1(&self) -> Complex64 {
        self.tau1
    }

    pub fn tau2(&self) -> Complex64 {
        self.tau2
    }

    /// `p·τ₁ + q·τ₂` for any integers.
    pub fn translation(&self, p: i64, q: i64) -> Complex64 {
        self.tau1 * p as f64 + self.tau2 * q as f64
    }

    /// `|p·τ₁ + q·τ₂|` for any integers; the lattice norm.
    pub fn lattice_length(&self, p: i64, q: i64) -> f64 {
        self.translation(p, q).norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slope {
    p: i64,
    q: i64,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.unsigned_abs(), b.unsigned_abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a as i64
}

impl Slope {
    pub fn new(p: i64, q: i64) -> Result<Self, AnalysisError> {
        if gcd(p, q) != 1 {
            return Err(AnalysisError::NotPrimitive(p, q));
        }
        Ok(Slope { p, q })
    }

    pub fn p(&self) -> i64 {
        self.p
    }

    pub fn q(&self) -> i64 {
        self.q
    }
}

/// Length of the translation realizing `s`. Only the modulus is
/// meaningful; the representative translation depends on the basis.
pub fn slope_length(basis: &CuspBasis, s: Slope) -> f64 {
    basis.lattice_length(s.p, s.q)
}

/// Longest observed slope for one exceptional filling type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FillingRecord {
    pub filling: &'static str,
    pub one_cusp: f64,
    pub multi_cusp: f64,
    /// The multi-cusp record is only approached, not attained.
    pub asymptotic: bool,
}

pub fn filling_records() -> [FillingRecord; 4] {
    [
        FillingRecord {
            filling: "finite",
            one_cusp: 4.0,
            multi_cusp: 21f64.sqrt(),
            asymptotic: false,
        },
        FillingRecord {
            filling: "reducible",
            one_cusp: 4.0,
            multi_cusp: 10.0 / 3f64.sqrt(),
            asymptotic: true,
        },
        FillingRecord {
            filling: "small_seifert_fibered",
            one_cusp: 5.0,
            multi_cusp: 5.0,
            asymptotic: false,
        },
        FillingRecord {
            filling: "toroidal",
            one_cusp: 6.0,
            multi_cusp: 6.0,
            asymptotic: false,
        },
    ]
}

/// Thresholds the gate sorts lengths between.
pub fn gate_thresholds() -> [f64; 4] {
    [4.0, 5.0, 10.0 / 3f64.sqrt(), 6.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordMargin {
    pub filling: String,
    /// `length − record` against the one-cusp and multi-cusp records.
    pub one_cusp: f64,
    pub multi_cusp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateEntry {
    pub length: f64,
    /// Longer than six, so the filling is hyperbolic.
    pub hyperbolic_forced: bool,
    /// Largest threshold of [`gate_thresholds`] strictly below the length.
    pub above: Option<f64>,
    /// Smallest threshold at or above the length.
    pub below: Option<f64>,
    pub margins: Vec<RecordMargin>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateReport {
    pub entries: Vec<GateEntry>,
    /// Every slope longer than six: the filling is hyperbolic.
    pub hyperbolic_forced: bool,
    /// Some slope at most six: an exceptional filling is not excluded.
    pub exceptional_not_excluded: bool,
}

pub fn six_theorem_gate(lengths: &[f64]) -> Result<GateReport, AnalysisError> {
    if let Some(&bad) = lengths.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
        return Err(AnalysisError::BadLength(bad));
    }
    let th = gate_thresholds();
    let entries: Vec<GateEntry> = lengths
        .iter()
        .map(|&length| GateEntry {
            length,
            hyperbolic_forced: length > 6.0,
            above: th.iter().copied().rfind(|&t| t < length),
            below: th.iter().copied().find(|&t| t >= length),
            margins: filling_records()
                .iter()
                .map(|r| RecordMargin {
                    filling: r.filling.to_string(),
                    one_cusp: length - r.one_cusp,
                    multi_cusp: length - r.multi_cusp,
                })
                .collect(),
        })
        .collect();
    let forced = entries.iter().all(|e| e.hyperbolic_forced);
    Ok(GateReport {
        hyperbolic_forced: forced,
        exceptional_not_excluded: !forced,
        entries,
    })
}

/// A ball of the Farey packing at `p/q`, diameter `1/q²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FareyPoint {
    pub p: i64,
    pub q: i64,
}

impl FareyPoint {
    pub fn horoball(&self) -> Horoball {
        let q = self.q as f64;
        Horoball {
            center: IdealPoint::Finite(self.p as f64 / q),
            size: 1.0 / (q * q),
        }
    }
}

/// Fractions in `[lo, hi]` reached by at most `depth` rounds of mediants
/// between consecutive integers, in increasing order.
pub fn farey_points(depth: u32, lo: i64, hi: i64) -> Vec<FareyPoint> {
    fn between(a: FareyPoint, b: FareyPoint, depth: u32, out: &mut Vec<FareyPoint>) {
        if depth == 0 {
            return;
        }
        let m = FareyPoint {
            p: a.p + b.p,
            q: a.q + b.q,
        };
        between(a, m, depth - 1, out);
        out.push(m);
        between(m, b, depth - 1, out);
    }
    let mut out = Vec::new();
    for n in lo..=hi {
        let a = FareyPoint { p: n, q: 1 };
        out.push(a);
        if n < hi {
            between(a, FareyPoint { p: n + 1, q: 1 }, depth, &mut out);
        }
    }
    out
}

/// The packing over `[lo, hi]`: the height-1 ball at ∞ first, then the
/// Farey balls in increasing order.
pub fn dense_packing_window(depth: u32, lo: i64, hi: i64) -> Vec<Horoball> {
    let mut out = vec![Horoball {
        center: IdealPoint::Infinity,
        size: 1.0,
    }];
    out.extend(farey_points(depth, lo, hi).iter().map(FareyPoint::horoball));
    out
}

/// One period `[0, 1]` of the packing.
pub fn dense_packing(depth: u32) -> Vec<Horoball> {
    dense_packing_window(depth, 0, 1)
}

/// Largest disk radius below which the probe counts as empty.
pub const OBSTRUCTION_TOLERANCE: f64 = 1e-2;
/// Reference depth and resolution for the probe.
pub const OBSTRUCTION_REFERENCE: (u32, usize) = (6, 400);

/// Result of searching for a horoball of 3-space, tangent to the sphere
/// at infinity at signed distance `y` from the plane of the packing, that
/// misses every packing ball yet meets the plane in a disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObstructionReport {
    pub depth: u32,
    pub resolution: usize,
    pub cells: usize,
    pub feasible_cells: usize,
    /// Largest radius of the disk cut from the plane.
    pub max_disk_radius: f64,
    /// Grid point `(x, y)` attaining it.
    pub argmax: Option<(f64, f64)>,
    /// Smallest height of a disk center over feasible cells, each cell
    /// taken with its largest admissible ball.
    pub min_center_height: Option<f64>,
    /// Height of the center of the largest disk.
    pub best_center_height: Option<f64>,
    /// `best_center_height − √3/2`.
    pub center_height_minus_sqrt3_over_2: Option<f64>,
    pub tolerance: f64,
    /// No candidate disk of radius at least `tolerance`.
    pub empty_within_tolerance: bool,
    pub summary: String,
    /// Omitted unless timing was requested, so reports stay reproducible.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wall_clock_seconds: Option<f64>,
}

/// Grid search over tangency points `(x, y)` with `x ∈ [0, 1]` (one
/// period) and `0 ≤ y ≤ 1/2`. For each point the largest admissible ball
/// radius `r` is solved exactly: the ball at ∞ needs `2r ≤ 1` and a
/// packing ball at `z` of diameter `d` needs `(x − z)² + y² ≥ 2r·d`. A cell
/// is feasible when `r > y`, giving a disk of radius `√(r² − y²)` centered
/// at height `r`.
pub fn transverse_disk_obstruction(
    depth: u32,
    resolution: usize,
    timing: bool,
) -> Result<ObstructionReport, AnalysisError> {
    if resolution < 2 {
        return Err(AnalysisError::InvalidGrid(format!(
            "resolution must be at least 2, got {resolution}"
        )));
    }
    let start = Instant::now();
    // neighbors one period out on each side shadow the window's edges
    let balls: Vec<(f64, f64)> = farey_points(depth, -1, 2)
        .iter()
        .map(|f| {
            let q = f.q as f64;
            (f.p as f64 / q, 1.0 / (q * q))
        })
        .collect();
    let nx = resolution + 1;
    let ny = resolution / 2 + 1;
    let ys: Vec<f64> = (0..ny).map(|j| 0.5 * j as f64 / (ny - 1) as f64).collect();

    #[derive(Clone, Copy)]
    struct Column {
        feasible: usize,
        best: f64,
        arg: Option<(f64, f64)>,
        best_height: f64,
        min_height: f64,
    }
    let columns: Vec<Column> = (0..nx)
        .into_par_iter()
        .map(|i| {
            let x = i as f64 / resolution as f64;
            let mut col = Column {
                feasible: 0,
                best: 0.0,
                arg: None,
                best_height: 0.0,
                min_height: f64::INFINITY,
            };
            for &y in &ys {
                let r = balls.iter().fold(0.5f64, |r, &(z, d)| {
                    r.min(((x - z) * (x - z) + y * y) / (2.0 * d))
                });
                if r > y {
                    col.feasible += 1;
                    let rho = (r * r - y * y).sqrt();
                    if rho > col.best {
                        col.best = rho;
                        col.arg = Some((x, y));
                        col.best_height = r;
                    }
                    col.min_height = col.min_height.min(r);
                }
            }
            col
        })
        .collect();
    let mut feasible = 0;
    let mut best = 0.0;
    let mut arg = None;
    let mut best_height = None;
    let mut min_height = f64::INFINITY;
    for c in &columns {
        feasible += c.feasible;
        if c.best > best {
            best = c.best;
            arg = c.arg;
            best_height = Some(c.best_height);
        }
        min_height = min_height.min(c.min_height);
    }
    let min_center_height = (feasible > 0).then_some(min_height);
    let empty = best < OBSTRUCTION_TOLERANCE;
    let summary = if feasible == 0 {
        format!("no feasible candidate found at depth {depth}, resolution {resolution}")
    } else if empty {
        format!(
            "no candidate with disk radius ≥ {OBSTRUCTION_TOLERANCE} found at depth {depth}, \
             resolution {resolution} (largest {best:.3e})"
        )
    } else {
        format!(
            "feasible candidates found at depth {depth}, resolution {resolution}: \
             largest disk radius {best:.6}"
        )
    };
    Ok(ObstructionReport {
        depth,
        resolution,
        cells: nx * ny,
        feasible_cells: feasible,
        max_disk_radius: best,
        argmax: arg,
        min_center_height,
        best_center_height: best_height,
        center_height_minus_sqrt3_over_2: best_height.map(|h| h - 3f64.sqrt() / 2.0),
        tolerance: OBSTRUCTION_TOLERANCE,
        empty_within_tolerance: empty,
        summary,
        wall_clock_seconds: timing.then(|| start.elapsed().as_secs_f64()),
    })
}
