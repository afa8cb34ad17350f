//! The convex relaxation `min_{ν ∈ J_k} max_{y ∈ N_k} P(ν, y)` and its
//! simplicial solver.
//!
//! The outer loop keeps a list of extreme points `ν_1..ν_t` of `J_k`,
//! solves the inner problem on their convex hull, and asks the graph oracle
//! for `argmin_{ν ∈ J_k} P(ν, ȳ)` at the inner pseudo-marginals `ȳ`. It stops
//! once the oracle cannot improve on the hull point `ν̄ = Σ η_t ν_t`.

pub mod hull;
pub mod inner;
pub mod oracle;

use std::time::Instant;

use crate::error::{domain, Error, Result};
use crate::graph::{best_tree_edges, NuVector};
use crate::instances::rng_from_seed;
use crate::polytope::{enumerate_dk, CliqueIndex, PseudoMarginal};
use crate::setfn::{base_polytope_greedy, SetFunction};
use crate::subset::Subset;

use hull::{sparse_dot, vertex_cost, Constraints, DualPoint, HullProblem, Vertex};
use inner::InnerResult;

pub use oracle::{bilinear, mobius};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InnerMethod {
    /// Projected subgradient, steps `α_0/√t`.
    Subgradient,
    /// Restarted primal–dual hybrid gradient.
    PrimalDual,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub treewidth: usize,
    pub max_outer: usize,
    /// Inner iterations per outer iteration.
    pub inner_steps: usize,
    /// Relative tolerance of the outer optimality test.
    pub tol: f64,
    /// Rounding threshold on singleton pseudo-marginals.
    pub theta: f64,
    pub seed: u64,
    /// Cardinality budget `|A| <= m`.
    pub budget: Option<usize>,
    /// Random junction trees drawn per oracle call when `k > 1`.
    pub pool_size: usize,
    pub inner_method: InnerMethod,
    /// Relative KKT tolerance for early exit of the primal–dual method.
    pub inner_tol: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            treewidth: 1,
            max_outer: 50,
            inner_steps: 5000,
            tol: 1e-6,
            theta: 0.5,
            seed: 0,
            budget: None,
            pool_size: 32,
            inner_method: InnerMethod::PrimalDual,
            inner_tol: 1e-9,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.treewidth == 0
            || self.max_outer == 0
            || self.inner_steps == 0
            || self.pool_size == 0
        {
            return Err(domain(
                "treewidth, iteration counts and pool size must be positive",
            ));
        }
        if self.tol.is_nan() || self.tol <= 0.0 || self.inner_tol.is_nan() || self.inner_tol <= 0.0
        {
            return Err(domain("tolerances must be positive"));
        }
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(domain(format!(
                "rounding threshold {} not in (0, 1)",
                self.theta
            )));
        }
        Ok(())
    }
}

/// One row of the convergence trace.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord {
    pub iter: usize,
    pub time_ms: f64,
    /// Best (lowest) valid upper bound so far.
    pub dual_bound: f64,
    /// `min_{ν ∈ J_k} P(ν, ȳ)` (minus `max_s s·ȳ` for differences).
    pub oracle_value: f64,
    /// Best objective value of a rounded set so far.
    pub best_primal: f64,
    pub n_vertices: usize,
    pub inner_steps: usize,
    /// `P(ν̄, ȳ) − oracle_value`; approximate since `ȳ` is approximate.
    pub approx_gap: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    /// The oracle vertex does not improve on the hull point.
    Converged,
    /// The oracle returned a vertex already in the hull.
    Stalled,
    /// Outer iteration budget exhausted.
    MaxOuter,
}

#[derive(Clone, Debug)]
pub struct SaddleState {
    pub vertices: Vec<Vertex>,
    pub eta: Vec<f64>,
    pub z: Vec<f64>,
    pub lambda: f64,
    pub y: PseudoMarginal,
    pub trace: Vec<TraceRecord>,
    /// False when `k > 1`: the random-pool oracle may stop too early.
    pub oracle_exact: bool,
    pub stop: StopReason,
}

#[derive(Clone, Debug)]
pub struct Solution {
    pub dual_bound: f64,
    pub set: Subset,
    pub value: f64,
    pub state: SaddleState,
}

impl Solution {
    pub fn iterations(&self) -> usize {
        self.state.trace.len()
    }

    pub fn gap(&self) -> f64 {
        self.dual_bound - self.value
    }
}

/// `F(C)` for every coordinate of `idx`.
pub fn values_on_index<F: SetFunction + ?Sized>(f: &F, idx: &CliqueIndex) -> Vec<f64> {
    idx.subsets().iter().map(|&c| f.value(c)).collect()
}

/// Möbius coefficients of `f` on `idx`, the `y`-side coefficients of `P`.
pub fn mobius_on_index<F: SetFunction + ?Sized>(f: &F, idx: &CliqueIndex) -> Vec<f64> {
    mobius(idx, &values_on_index(f, idx))
}

fn check_index<F: SetFunction + ?Sized>(f: &F, idx: &CliqueIndex) -> Result<()> {
    if f.n() != idx.n() {
        return Err(Error::Dimension {
            expected: idx.n(),
            got: f.n(),
        });
    }
    Ok(())
}

/// `P(ν, y)`, linear in `y` and equal to `F_ν(A)` at `y_B = 1[B ⊆ A]`.
pub fn p_eval<F: SetFunction + ?Sized>(
    f: &F,
    idx: &CliqueIndex,
    nu: &NuVector,
    y: &PseudoMarginal,
) -> Result<f64> {
    check_index(f, idx)?;
    if y.y.len() != idx.len() {
        return Err(Error::Dimension {
            expected: idx.len(),
            got: y.y.len(),
        });
    }
    if nu.treewidth() > idx.k() {
        return Err(domain("ν has larger treewidth than the index"));
    }
    Ok(bilinear(idx, &mobius_on_index(f, idx), nu, &y.y))
}

/// Lagrange multipliers of the `N_k` rows (in row order: maximal clique,
/// then local submask) and of the optional budget row.
#[derive(Clone, Debug, PartialEq)]
pub struct Multipliers {
    pub z: Vec<f64>,
    pub lambda: f64,
}

impl Multipliers {
    pub fn zeros(idx: &CliqueIndex) -> Self {
        Multipliers {
            z: vec![0.0; idx.num_rows()],
            lambda: 0.0,
        }
    }
}

/// Closed-form `Q(ν, z) = max_{y ∈ [0,1]^{D_k}} L(ν, z, y)` and the
/// coefficients `a_B` of the affine form in `y`.
pub fn q_eval<F: SetFunction + ?Sized>(
    f: &F,
    idx: &CliqueIndex,
    nu: &NuVector,
    mult: &Multipliers,
    budget: Option<usize>,
) -> Result<(f64, Vec<f64>)> {
    check_index(f, idx)?;
    if mult.z.len() != idx.num_rows() {
        return Err(Error::Dimension {
            expected: idx.num_rows(),
            got: mult.z.len(),
        });
    }
    if mult.z.iter().any(|z| *z < 0.0) || mult.lambda < 0.0 {
        return Err(domain("multipliers must be non-negative"));
    }
    let mob = mobius_on_index(f, idx);
    let cons = Constraints::from_index(idx);
    let vertex = Vertex {
        nu: nu.clone(),
        s: None,
    };
    let problem = HullProblem {
        idx,
        cons: &cons,
        costs: vec![vertex_cost(idx, &mob, &vertex)],
        budget: budget.map(|m| m as f64),
        scale: 0.0,
    };
    let x = DualPoint {
        eta: vec![1.0],
        z: mult.z.clone(),
        lambda: if budget.is_some() { mult.lambda } else { 0.0 },
    };
    let a = problem.kt(&x);
    Ok((problem.q_from(&x, &a), a))
}

/// Result of the inner solve on a fixed hull.
#[derive(Clone, Debug)]
pub struct HullSolution {
    pub eta: Vec<f64>,
    pub z: Vec<f64>,
    pub y: PseudoMarginal,
    pub bound: f64,
    pub steps: usize,
}

/// Minimizes `Q(Σ η_t ν_t, z)` over the simplex and `z >= 0`.
pub fn inner_solve_hull<F: SetFunction + ?Sized>(
    f: &F,
    idx: &CliqueIndex,
    vertices: &[NuVector],
    config: &SolverConfig,
) -> Result<HullSolution> {
    check_index(f, idx)?;
    config.validate()?;
    if vertices.is_empty() {
        return Err(domain("the hull needs at least one vertex"));
    }
    let fvals = values_on_index(f, idx);
    let mob = mobius(idx, &fvals);
    let cons = Constraints::from_index(idx);
    let costs: Vec<_> = vertices
        .iter()
        .map(|nu| {
            vertex_cost(
                idx,
                &mob,
                &Vertex {
                    nu: nu.clone(),
                    s: None,
                },
            )
        })
        .collect();
    let problem = HullProblem {
        idx,
        cons: &cons,
        scale: objective_scale(&fvals, &costs),
        costs,
        budget: config.budget.map(|m| m as f64),
    };
    let t = vertices.len();
    let mut x0 = DualPoint::zeros(t, cons.len());
    x0.eta.iter_mut().for_each(|e| *e = 1.0 / t as f64);
    let res = run_inner(&problem, x0, &vec![0.0; idx.len()], config);
    Ok(HullSolution {
        eta: res.x.eta,
        z: res.x.z,
        y: PseudoMarginal { y: res.y },
        bound: res.bound,
        steps: res.steps,
    })
}

fn objective_scale(fvals: &[f64], costs: &[hull::SparseRow]) -> f64 {
    let f = fvals.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    costs
        .iter()
        .flat_map(|r| r.iter().map(|e| e.1.abs()))
        .fold(f, f64::max)
}

fn run_inner(
    problem: &HullProblem<'_>,
    x0: DualPoint,
    y0: &[f64],
    config: &SolverConfig,
) -> InnerResult {
    match config.inner_method {
        InnerMethod::Subgradient => inner::subgradient(problem, x0, config.inner_steps),
        InnerMethod::PrimalDual => {
            inner::primal_dual(problem, x0, y0, config.inner_steps, config.inner_tol)
        }
    }
}

fn oracle_rng_seed(seed: u64, round: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ round.wrapping_mul(0xD1B5_4A32_D192_ED03)
}

/// `argmin_{ν ∈ J_k} P(ν, y)` and its value.
///
/// Exact for `k = 1` (minimum spanning tree); for `k > 1` the best of
/// `config.pool_size` random maximal junction trees, drawn from a generator
/// seeded by `config.seed` and `round`.
pub fn graph_oracle<F: SetFunction + ?Sized>(
    f: &F,
    idx: &CliqueIndex,
    y: &PseudoMarginal,
    config: &SolverConfig,
    round: u64,
) -> Result<(NuVector, f64)> {
    check_index(f, idx)?;
    if y.y.len() != idx.len() {
        return Err(Error::Dimension {
            expected: idx.len(),
            got: y.y.len(),
        });
    }
    oracle_on_values(idx, &mobius_on_index(f, idx), &y.y, config, round)
}

fn oracle_on_values(
    idx: &CliqueIndex,
    mob: &[f64],
    y: &[f64],
    config: &SolverConfig,
    round: u64,
) -> Result<(NuVector, f64)> {
    if idx.k() == 1 {
        Ok(oracle::tree_oracle(idx, mob, y))
    } else {
        let mut rng = rng_from_seed(oracle_rng_seed(config.seed, round));
        oracle::pool_oracle(idx, mob, y, config.pool_size, &mut rng)
    }
}

/// `{i : y_i > θ}`.
pub fn round_threshold(singletons: &[f64], theta: f64) -> Subset {
    singletons
        .iter()
        .enumerate()
        .filter(|(_, &v)| v > theta)
        .map(|(i, _)| i)
        .collect()
}

/// The `m` largest entries, ties to the smaller index.
pub fn top_m(singletons: &[f64], m: usize) -> Subset {
    let mut order: Vec<usize> = (0..singletons.len()).collect();
    order.sort_by(|&a, &b| singletons[b].total_cmp(&singletons[a]));
    order.into_iter().take(m).collect()
}

/// What the outer loop maximizes: `f − h` subject to `|A| <= budget`.
pub(crate) struct Objective<'a> {
    pub f: &'a dyn SetFunction,
    pub h: Option<&'a dyn SetFunction>,
    pub budget: Option<usize>,
}

impl Objective<'_> {
    fn value(&self, a: Subset) -> f64 {
        match self.h {
            Some(h) => self.f.value(a) - h.value(a),
            None => self.f.value(a),
        }
    }

    fn admissible(&self, a: Subset) -> bool {
        self.budget.is_none_or(|m| a.len() <= m)
    }

    /// Threshold rounding, restricted to the budget, then one sweep of
    /// single-element add/remove improvements.
    fn round(&self, singletons: &[f64], theta: f64) -> (Subset, f64) {
        let mut a = round_threshold(singletons, theta);
        if let Some(m) = self.budget {
            a = a.intersection(top_m(singletons, m));
        }
        let mut value = self.value(a);
        for i in 0..self.f.n() {
            let cand = if a.contains(i) {
                a.without(i)
            } else {
                a.with(i)
            };
            if !self.admissible(cand) {
                continue;
            }
            let v = self.value(cand);
            if v > value {
                a = cand;
                value = v;
            }
        }
        (a, value)
    }
}

/// Maximizes `f` (subject to `config.budget`, if set) through the
/// relaxation; returns the best bound found and a rounded set.
pub fn solve<F: SetFunction + ?Sized>(f: &F, config: &SolverConfig) -> Result<Solution> {
    let objective = Objective {
        f: &f,
        h: None,
        budget: config.budget,
    };
    run(&objective, config)
}

pub(crate) fn run(obj: &Objective<'_>, config: &SolverConfig) -> Result<Solution> {
    config.validate()?;
    let f = obj.f;
    let n = f.n();
    if n < 2 {
        return Err(domain("the relaxation needs at least two elements"));
    }
    if let Some(m) = obj.budget {
        if m > n {
            return Err(domain(format!("budget {m} exceeds ground set size {n}")));
        }
    }
    let k = config.treewidth;
    let idx = enumerate_dk(n, k)?;
    let fvals = values_on_index(f, &idx);
    let mob = mobius(&idx, &fvals);
    let cons = Constraints::from_index(&idx);
    let started = Instant::now();

    let first_nu = if k == 1 {
        NuVector::from_tree(n, &best_tree_edges(&f)?)
    } else {
        let ones = vec![1.0; idx.len()];
        let mut rng = rng_from_seed(oracle_rng_seed(config.seed, 0));
        oracle::pool_oracle(&idx, &mob, &ones, config.pool_size, &mut rng)?.0
    };
    let zeros_n = vec![0.0; n];
    let first_s = match obj.h {
        Some(h) => Some(base_polytope_greedy(&h, &zeros_n)?.0.s),
        None => None,
    };
    let mut vertices = vec![Vertex {
        nu: first_nu,
        s: first_s,
    }];
    let mut problem = HullProblem {
        idx: &idx,
        cons: &cons,
        costs: vec![vertex_cost(&idx, &mob, &vertices[0])],
        budget: obj.budget.map(|m| m as f64),
        scale: 0.0,
    };

    let mut x = DualPoint::zeros(1, cons.len());
    x.eta[0] = 1.0;
    let mut y = vec![0.0; idx.len()];
    let mut dual_bound = f64::INFINITY;
    let mut best_set = Subset::EMPTY;
    let mut best_value = obj.value(Subset::EMPTY);
    let mut trace = Vec::new();
    let mut stop = StopReason::MaxOuter;

    for iter in 1..=config.max_outer {
        problem.scale = objective_scale(&fvals, &problem.costs);
        let res = run_inner(&problem, x, &y, config);
        dual_bound = dual_bound.min(res.bound);
        x = res.x;
        y = res.y;

        let p_bar: f64 = x
            .eta
            .iter()
            .zip(&problem.costs)
            .map(|(e, c)| e * sparse_dot(c, &y))
            .sum();
        let (nu, mut oracle_value) = oracle_on_values(&idx, &mob, &y, config, iter as u64)?;
        let s = match obj.h {
            Some(h) => {
                let (point, v) = base_polytope_greedy(&h, &y[..n])?;
                oracle_value -= v;
                Some(point.s)
            }
            None => None,
        };

        let (set, value) = obj.round(&y[..n], config.theta);
        if value > best_value {
            best_value = value;
            best_set = set;
        }
        trace.push(TraceRecord {
            iter,
            time_ms: started.elapsed().as_secs_f64() * 1e3,
            dual_bound,
            oracle_value,
            best_primal: best_value,
            n_vertices: vertices.len(),
            inner_steps: res.steps,
            approx_gap: p_bar - oracle_value,
        });

        if oracle_value >= p_bar - config.tol * (1.0 + p_bar.abs()) {
            stop = StopReason::Converged;
            break;
        }
        let vertex = Vertex { nu, s };
        if vertices.contains(&vertex) {
            stop = StopReason::Stalled;
            break;
        }
        if iter == config.max_outer {
            break;
        }
        problem.costs.push(vertex_cost(&idx, &mob, &vertex));
        vertices.push(vertex);
        x.eta.push(0.0);
    }

    Ok(Solution {
        dual_bound,
        set: best_set,
        value: best_value,
        state: SaddleState {
            vertices,
            eta: x.eta,
            z: x.z,
            lambda: x.lambda,
            y: PseudoMarginal { y },
            trace,
            oracle_exact: k == 1,
            stop,
        },
    })
}

#[cfg(test)]
mod tests;
