//! Searching for decorations that maximize the smallest cusp area.
//!
//! The search runs in edge-length coordinates, where (C) holds by
//! construction. (B) is the box `x ≥ 0`; (A) is linear in `x` and handled
//! by a hinge penalty during ascent and a repair step afterwards.

use crate::decor::{
    check_geometric, corner_to_edge, edge_to_corner, CornerDecoration, DecorError, EdgeLengths,
    GeometricityReport, DEFAULT_RELATIVE_TOL,
};
use crate::surface::{Side, Triangulation, VertexId};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::{LN_2, PI};
use std::fmt::Write as _;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OptimizeError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Decor(#[from] DecorError),
    #[error("initial point could not be repaired into (A)/(B) within {0} passes")]
    Infeasible(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintMode {
    /// Conditions (A) and (B).
    #[default]
    Full,
    /// Condition (B) only.
    EdgesOnly,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StepSchedule {
    pub step: f64,
    /// Step multiplier applied between temperature stages.
    pub step_decay: f64,
    /// Soft-min temperatures, one stage each.
    pub temperatures: Vec<f64>,
}

impl Default for StepSchedule {
    fn default() -> Self {
        StepSchedule {
            step: 0.05,
            step_decay: 0.7,
            temperatures: vec![0.3, 0.1, 0.03, 0.01, 0.003, 0.001],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizeConfig {
    /// Starting decoration; all corners 1 when absent. Must satisfy (C).
    pub initial: Option<CornerDecoration>,
    pub constraints: ConstraintMode,
    pub schedule: StepSchedule,
    pub restarts: usize,
    pub seed: u64,
    /// Size of the uniform perturbation of the start for restarts after
    /// the first.
    pub perturbation: f64,
    /// Stage ends when no coordinate moves more than this.
    pub tolerance: f64,
    /// Smallest step of the hard-min polish.
    pub polish_tolerance: f64,
    pub max_iterations: usize,
    pub penalty: f64,
}

impl Default for OptimizeConfig {
    fn default() -> Self {
        OptimizeConfig {
            initial: None,
            constraints: ConstraintMode::Full,
            schedule: StepSchedule::default(),
            restarts: 4,
            seed: 0,
            perturbation: 0.2,
            tolerance: 1e-10,
            polish_tolerance: 1e-7,
            max_iterations: 3000,
            penalty: 50.0,
        }
    }
}

impl OptimizeConfig {
    pub fn validate(&self) -> Result<(), OptimizeError> {
        let bad = |m: &str| Err(OptimizeError::InvalidConfig(m.into()));
        if self.restarts == 0 {
            return bad("restarts must be at least 1");
        }
        if !(self.tolerance > 0.0 && self.polish_tolerance > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.schedule.step > 0.0 && self.schedule.step_decay > 0.0) {
            return bad("step and step decay must be positive");
        }
        if self.schedule.temperatures.is_empty()
            || self.schedule.temperatures.iter().any(|t| !(*t > 0.0))
        {
            return bad("temperatures must be positive and nonempty");
        }
        if !(self.perturbation >= 0.0 && self.penalty >= 0.0) {
            return bad("perturbation and penalty must be non-negative");
        }
        if self.max_iterations == 0 {
            return bad("iteration cap must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    /// Hard minimum cusp area at the current point.
    pub objective: f64,
    pub temperature: f64,
    pub penalty: f64,
    /// Best feasible minimum so far.
    pub best: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RestartSummary {
    pub restart: usize,
    pub min_area: f64,
}

/// How the result compares with `10/√3`. Reported, never asserted.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConjectureProbe {
    pub target: f64,
    pub margin: f64,
    pub exceeds_target: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeResult {
    pub decoration: CornerDecoration,
    pub lengths: EdgeLengths,
    pub min_area: f64,
    pub min_vertex: VertexId,
    pub best_restart: usize,
    pub restarts: Vec<RestartSummary>,
    pub trace: Vec<TraceRow>,
    pub certificate: GeometricityReport,
    pub conjecture: ConjectureProbe,
}

impl OptimizeResult {
    /// Trace as CSV with a header row.
    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iteration,objective,temperature,penalty,best\n");
        for r in &self.trace {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.iteration, r.objective, r.temperature, r.penalty, r.best
            );
        }
        out
    }
}

/// Precomputed incidence for fast evaluation in edge coordinates.
struct Problem {
    sides: Vec<[usize; 3]>,
    /// Corners of each vertex as (triangle, corner index).
    stars: Vec<Vec<(usize, usize)>>,
    edge_count: usize,
    mode: ConstraintMode,
}

impl Problem {
    fn new(t: &Triangulation, mode: ConstraintMode) -> Self {
        let sides = (0..t.triangle_count())
            .map(|ti| {
                [0, 1, 2].map(|k| {
                    t.edge_of(Side {
                        triangle: ti,
                        index: k,
                    })
                })
            })
            .collect();
        let stars = (0..t.vertex_count())
            .map(|v| {
                t.vertex_star(v)
                    .expect("vertex in range")
                    .iter()
                    .map(|c| (c.triangle, c.index))
                    .collect()
            })
            .collect();
        Problem {
            sides,
            stars,
            edge_count: t.edge_count(),
            mode,
        }
    }

    fn log_areas(&self, x: &[f64]) -> Vec<[f64; 3]> {
        self.sides
            .iter()
            .map(|s| {
                let d = s.map(|e| x[e]);
                [0, 1, 2].map(|a| crate::decor::corner_log_area(d, a))
            })
            .collect()
    }

    fn cusp_areas(&self, la: &[[f64; 3]]) -> Vec<f64> {
        self.stars
            .iter()
            .map(|st| st.iter().map(|&(t, k)| la[t][k].exp()).sum())
            .collect()
    }

    fn hard_min(&self, x: &[f64]) -> (f64, VertexId) {
        let a = self.cusp_areas(&self.log_areas(x));
        argmin(&a)
    }

    /// Largest (A) excess in log terms; ≤ 0 when (A) holds.
    fn a_excess(&self, la: &[[f64; 3]]) -> f64 {
        if self.mode == ConstraintMode::EdgesOnly {
            return f64::NEG_INFINITY;
        }
        la.iter()
            .flatten()
            .map(|l| l - LN_2)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn feasible(&self, x: &[f64]) -> bool {
        x.iter().all(|&v| v >= 0.0) && self.a_excess(&self.log_areas(x)) <= 1e-12
    }

    /// Soft-min objective minus the (A) penalty, and its gradient.
    fn value_and_gradient(&self, x: &[f64], temp: f64, rho: f64) -> (f64, f64, Vec<f64>) {
        let la = self.log_areas(x);
        let areas = self.cusp_areas(&la);
        let m = areas.iter().copied().fold(f64::INFINITY, f64::min);
        let weights: Vec<f64> = areas.iter().map(|a| (-(a - m) / temp).exp()).collect();
        let z: f64 = weights.iter().sum();
        let soft = m - temp * z.ln();
        // ∂ log α_a / ∂ d = +½ on the opposite side, −½ on the two others
        let mut corner_weight = vec![[0.0; 3]; la.len()];
        for (v, st) in self.stars.iter().enumerate() {
            let w = weights[v] / z;
            for &(t, k) in st {
                corner_weight[t][k] += w * la[t][k].exp();
            }
        }
        let mut penalty = 0.0;
        if self.mode == ConstraintMode::Full {
            for (t, row) in la.iter().enumerate() {
                for k in 0..3 {
                    let excess = row[k] - LN_2;
                    if excess > 0.0 {
                        penalty += excess * excess;
                        corner_weight[t][k] -= 2.0 * rho * excess;
                    }
                }
            }
        }
        let mut g = vec![0.0; self.edge_count];
        for (t, s) in self.sides.iter().enumerate() {
            for a in 0..3 {
                let cw = corner_weight[t][a];
                g[s[(a + 1) % 3]] += 0.5 * cw;
                g[s[a]] -= 0.5 * cw;
                g[s[(a + 2) % 3]] -= 0.5 * cw;
            }
        }
        (soft - rho * penalty, penalty, g)
    }

    /// Pushes `x` into (B) and then (A) by lengthening the sides next to
    /// any corner that is too large.
    fn repair(&self, x: &mut [f64], passes: usize) -> bool {
        for _ in 0..passes {
            for v in x.iter_mut() {
                *v = v.max(0.0);
            }
            if self.mode == ConstraintMode::EdgesOnly {
                return true;
            }
            let la = self.log_areas(x);
            let mut clean = true;
            for (t, row) in la.iter().enumerate() {
                for k in 0..3 {
                    let excess = row[k] - LN_2;
                    if excess > 0.0 {
                        clean = false;
                        let s = self.sides[t];
                        x[s[k]] += excess + 1e-15;
                        x[s[(k + 2) % 3]] += excess + 1e-15;
                    }
                }
            }
            if clean {
                return true;
            }
        }
        self.feasible(x)
    }
}

fn argmin(a: &[f64]) -> (f64, VertexId) {
    a.iter().enumerate().fold(
        (f64::INFINITY, 0),
        |best, (i, &v)| {
            if v < best.0 {
                (v, i)
            } else {
                best
            }
        },
    )
}

struct RestartOutcome {
    x: Vec<f64>,
    min_area: f64,
    trace: Vec<TraceRow>,
}

fn run_restart(p: &Problem, start: &[f64], cfg: &OptimizeConfig, restart: usize) -> RestartOutcome {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(restart as u64);
    let mut x = start.to_vec();
    if restart > 0 && cfg.perturbation > 0.0 {
        for v in x.iter_mut() {
            *v += rng.gen_range(-cfg.perturbation..=cfg.perturbation);
        }
    }
    if !p.repair(&mut x, cfg.max_iterations) {
        // perturbation pushed the point somewhere repair cannot handle;
        // fall back to the unperturbed start, which was already repaired
        x = start.to_vec();
    }
    let (mut best, _) = p.hard_min(&x);
    let mut best_x = x.clone();
    let mut trace = Vec::new();
    let stages = cfg.schedule.temperatures.len();
    let per_stage = (cfg.max_iterations / stages).max(1);
    let mut step = cfg.schedule.step;
    let mut iteration = 0;
    for &temp in &cfg.schedule.temperatures {
        for _ in 0..per_stage {
            let (_, penalty, g) = p.value_and_gradient(&x, temp, cfg.penalty);
            let mut moved: f64 = 0.0;
            for (v, gi) in x.iter_mut().zip(&g) {
                let nv = (*v + step * gi).max(0.0);
                moved = moved.max((nv - *v).abs());
                *v = nv;
            }
            iteration += 1;
            let (obj, _) = p.hard_min(&x);
            if p.feasible(&x) && obj > best {
                best = obj;
                best_x.clone_from(&x);
            }
            trace.push(TraceRow {
                iteration,
                objective: obj,
                temperature: temp,
                penalty,
                best,
            });
            if moved < cfg.tolerance {
                break;
            }
        }
        step *= cfg.schedule.step_decay;
    }
    // the best iterate may sit slightly outside (A) only through rounding;
    // polish from it with the hard minimum
    let mut x = best_x;
    let mut h = 1e-2;
    while h >= cfg.polish_tolerance {
        let mut improved = true;
        while improved {
            improved = false;
            for e in 0..x.len() {
                for sign in [1.0, -1.0] {
                    let old = x[e];
                    x[e] = (old + sign * h).max(0.0);
                    let (obj, _) = p.hard_min(&x);
                    if obj > best && p.feasible(&x) {
                        best = obj;
                        improved = true;
                    } else {
                        x[e] = old;
                    }
                }
            }
            if improved {
                iteration += 1;
                trace.push(TraceRow {
                    iteration,
                    objective: best,
                    temperature: 0.0,
                    penalty: 0.0,
                    best,
                });
            }
        }
        h /= 2.0;
    }
    RestartOutcome {
        x,
        min_area: best,
        trace,
    }
}

/// Maximizes the smallest cusp area over geometric decorations of `t`.
///
/// Deterministic for a given configuration: restarts run in parallel but
/// each is sequential, and the winner is the largest minimum with ties
/// going to the lowest restart index.
pub fn maximize_min_cusp_area(
    t: &Triangulation,
    cfg: &OptimizeConfig,
) -> Result<OptimizeResult, OptimizeError> {
    cfg.validate()?;
    let p = Problem::new(t, cfg.constraints);
    let mut start = match &cfg.initial {
        Some(dec) => corner_to_edge(t, dec, DEFAULT_RELATIVE_TOL)?.lengths,
        None => vec![0.0; t.edge_count()],
    };
    if !p.repair(&mut start, cfg.max_iterations) {
        return Err(OptimizeError::Infeasible(cfg.max_iterations));
    }
    let outcomes: Vec<RestartOutcome> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| run_restart(&p, &start, cfg, r))
        .collect();
    let (best_restart, winner) = outcomes
        .iter()
        .enumerate()
        .fold(None::<(usize, &RestartOutcome)>, |acc, (i, o)| match acc {
            Some((_, b)) if b.min_area >= o.min_area => acc,
            _ => Some((i, o)),
        })
        .expect("at least one restart");
    let lengths = EdgeLengths {
        lengths: winner.x.clone(),
    };
    let decoration = edge_to_corner(t, &lengths)?;
    let report = crate::decor::cusp_areas(t, &decoration, None)?;
    let certificate = check_geometric(t, &decoration, DEFAULT_RELATIVE_TOL)?;
    let target = crate::decor::target_length();
    Ok(OptimizeResult {
        min_area: report.min_area,
        min_vertex: report.min_vertex,
        lengths,
        decoration,
        best_restart,
        restarts: outcomes
            .iter()
            .enumerate()
            .map(|(restart, o)| RestartSummary {
                restart,
                min_area: o.min_area,
            })
            .collect(),
        trace: winner.trace.clone(),
        certificate,
        conjecture: ConjectureProbe {
            target,
            margin: report.min_area - target,
            exceeds_target: report.min_area > target,
        },
    })
}

/// Sum of all cusp areas over `π` times the number of triangles.
pub fn density(t: &Triangulation, dec: &CornerDecoration) -> Result<f64, DecorError> {
    dec.check_total(t)?;
    Ok(areas_density(dec.areas()))
}

pub fn areas_density(areas: &[[f64; 3]]) -> f64 {
    let total: f64 = areas.iter().flatten().sum();
    total / (PI * areas.len() as f64)
}

/// Per-triangle corner sums against the bound 3.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CornerSumReport {
    pub max_sum: f64,
    pub max_triangle: usize,
    /// Triangles whose corner sum exceeds 3 (beyond relative rounding).
    pub over_bound: Vec<usize>,
}

/// Under (B) at most one corner of a triangle exceeds 1, so with (A) the
/// sum is at most `a + 2/a ≤ 3`. This checks the bound on actual data.
pub fn corner_sum_check(dec: &CornerDecoration) -> CornerSumReport {
    let mut rep = CornerSumReport {
        max_sum: f64::NEG_INFINITY,
        max_triangle: 0,
        over_bound: Vec::new(),
    };
    for (t, row) in dec.areas().iter().enumerate() {
        let s: f64 = row.iter().sum();
        if s > rep.max_sum {
            rep.max_sum = s;
            rep.max_triangle = t;
        }
        if s > 3.0 * (1.0 + DEFAULT_RELATIVE_TOL) {
            rep.over_bound.push(t);
        }
    }
    rep
}
