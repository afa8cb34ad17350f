//! Solvers for `min_{η ∈ Δ, z >= 0} Q(Σ η_t ν_t, z)`.
//!
//! Two first-order methods share the [`HullProblem`] operators:
//!
//! * [`subgradient`]: projected subgradient steps `α_0/√t` with ergodic
//!   averaging of the box maximizers `1[a_B > 0]`;
//! * [`primal_dual`]: primal–dual hybrid gradient on the Lagrangian, with
//!   adaptive steps, restarts to the running average and primal-weight
//!   updates. It yields high-accuracy bounds and pseudo-marginals.
//!
//! Any iterate with `η` in the simplex and `z, λ >= 0` gives a valid upper
//! bound `Q`, so the reported bound is the smallest `Q` evaluated.

use super::hull::{DualPoint, HullProblem, PrimalImage};

#[derive(Clone, Debug)]
pub struct InnerResult {
    /// Final dual point (used for `ν̄` and warm starts).
    pub x: DualPoint,
    /// Pseudo-marginals in `[0,1]^{D_k}`.
    pub y: Vec<f64>,
    /// Smallest `Q` seen.
    pub bound: f64,
    /// Dual point attaining `bound`.
    pub best_x: DualPoint,
    /// Iterations performed.
    pub steps: usize,
    /// Final KKT error estimate (zero for the subgradient method).
    pub residual: f64,
}

fn clip01(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

/// Projected subgradient with steps `α_0/√t`, `α_0 = 1 / max_C |F(C)|`.
pub fn subgradient(problem: &HullProblem<'_>, x0: DualPoint, steps: usize) -> InnerResult {
    let alpha0 = if problem.scale > 0.0 {
        1.0 / problem.scale
    } else {
        1.0
    };
    let mut x = x0;
    problem.project(&mut x);
    let mut ybar = vec![0.0; problem.dim()];
    let mut best_q = f64::INFINITY;
    let mut best_x = x.clone();
    for t in 1..=steps {
        let a = problem.kt(&x);
        let q = problem.q_from(&x, &a);
        if q < best_q {
            best_q = q;
            best_x = x.clone();
        }
        let yhat: Vec<f64> = a.iter().map(|&v| if v > 0.0 { 1.0 } else { 0.0 }).collect();
        let inv = 1.0 / t as f64;
        for (acc, v) in ybar.iter_mut().zip(&yhat) {
            *acc += (v - *acc) * inv;
        }
        let g = problem.grad_x(&problem.k(&yhat));
        x.add_scaled(-alpha0 / (t as f64).sqrt(), &g);
        problem.project(&mut x);
    }
    let q = problem.q(&x);
    if q < best_q || steps == 0 {
        best_q = best_q.min(q);
        best_x = x.clone();
    }
    ybar.iter_mut().for_each(|v| *v = clip01(*v));
    InnerResult {
        x,
        y: ybar,
        bound: best_q,
        best_x,
        steps,
        residual: 0.0,
    }
}

/// Iterations between restart checks.
const CHECK_EVERY: usize = 64;
const RESTART_SUFFICIENT: f64 = 0.2;
const RESTART_NECESSARY: f64 = 0.8;
const RESTART_ARTIFICIAL: f64 = 0.36;

struct Iterate {
    x: DualPoint,
    a: Vec<f64>,
    y: Vec<f64>,
    ky: PrimalImage,
}

struct Averages {
    x: DualPoint,
    a: Vec<f64>,
    y: Vec<f64>,
    ky: PrimalImage,
    weight: f64,
}

impl Averages {
    fn new(like: &Iterate) -> Self {
        let mut x = like.x.clone();
        x.scale(0.0);
        let mut ky = like.ky.clone();
        ky.scale(0.0);
        Averages {
            x,
            a: vec![0.0; like.a.len()],
            y: vec![0.0; like.y.len()],
            ky,
            weight: 0.0,
        }
    }

    fn add(&mut self, w: f64, it: &Iterate) {
        self.x.add_scaled(w, &it.x);
        for (s, v) in self.a.iter_mut().zip(&it.a) {
            *s += w * v;
        }
        for (s, v) in self.y.iter_mut().zip(&it.y) {
            *s += w * v;
        }
        self.ky.add_scaled(w, &it.ky);
        self.weight += w;
    }

    fn mean(&self) -> Iterate {
        let inv = 1.0 / self.weight;
        let mut x = self.x.clone();
        x.scale(inv);
        let mut ky = self.ky.clone();
        ky.scale(inv);
        Iterate {
            x,
            a: self.a.iter().map(|v| v * inv).collect(),
            y: self.y.iter().map(|v| clip01(v * inv)).collect(),
            ky,
        }
    }
}

/// KKT error and `Q` of an iterate.
fn assess(problem: &HullProblem<'_>, it: &Iterate) -> (f64, f64) {
    let q = problem.q_from(&it.x, &it.a);
    let gap = q - problem.lower(&it.ky);
    let infeasible = problem.scale.max(1.0) * problem.infeasibility(&it.ky);
    ((gap * gap + infeasible * infeasible).sqrt(), q)
}

fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v) * (u - v)).sum()
}

/// Restarted primal–dual hybrid gradient.
///
/// Stops after `max_iters` accepted iterations or once the KKT error drops
/// below `tol · (1 + scale)`.
pub fn primal_dual(
    problem: &HullProblem<'_>,
    x0: DualPoint,
    y0: &[f64],
    max_iters: usize,
    tol: f64,
) -> InnerResult {
    let scale = problem.scale;
    let threshold = tol * (1.0 + scale);
    let mut x = x0;
    problem.project(&mut x);
    let y: Vec<f64> = y0.iter().map(|&v| clip01(v)).collect();
    let mut cur = Iterate {
        a: problem.kt(&x),
        ky: problem.k(&y),
        x,
        y,
    };
    let (mut last_err, q0) = assess(problem, &cur);
    let mut best_q = q0;
    let mut best_x = cur.x.clone();
    if last_err <= threshold || max_iters == 0 {
        return InnerResult {
            best_x,
            x: cur.x,
            y: cur.y,
            bound: best_q,
            steps: 0,
            residual: last_err,
        };
    }

    let mut omega = if scale > 0.0 { 1.0 / scale } else { 1.0 };
    let max_entry = problem
        .costs
        .iter()
        .flat_map(|r| r.iter().map(|e| e.1.abs()))
        .fold(1.0f64, f64::max);
    let mut step = 1.0 / max_entry;

    let mut anchor_x = cur.x.clone();
    let mut anchor_y = cur.y.clone();
    let mut avg = Averages::new(&cur);
    let mut prev_candidate_err = f64::INFINITY;
    let mut since_restart = 0usize;
    let mut residual = last_err;
    let mut total = 0usize;

    while total < max_iters {
        loop {
            let tau = step / omega;
            let sigma = step * omega;
            let g = problem.grad_x(&cur.ky);
            let mut x_new = cur.x.clone();
            x_new.add_scaled(-tau, &g);
            problem.project(&mut x_new);
            let dx = x_new.sub(&cur.x);
            let adx = problem.kt(&dx);
            let y_new: Vec<f64> = cur
                .y
                .iter()
                .zip(cur.a.iter().zip(&adx))
                .map(|(&yv, (&av, &dv))| clip01(yv + sigma * (av + 2.0 * dv)))
                .collect();
            let interaction: f64 = y_new
                .iter()
                .zip(&cur.y)
                .zip(&adx)
                .map(|((yn, yo), d)| (yn - yo) * d)
                .sum::<f64>()
                .abs();
            let movement = 0.5 * (omega * dx.norm_sq() + dist_sq(&y_new, &cur.y) / omega);
            let limit = if interaction > 0.0 {
                movement / interaction
            } else {
                f64::INFINITY
            };
            let k = (total + 2) as f64;
            let next = ((1.0 - k.powf(-0.3)) * limit).min((1.0 + k.powf(-0.6)) * step);
            if step <= limit {
                for (a, d) in cur.a.iter_mut().zip(&adx) {
                    *a += d;
                }
                cur.x = x_new;
                cur.ky = problem.k(&y_new);
                cur.y = y_new;
                avg.add(step, &cur);
                step = next;
                break;
            }
            step = next;
        }
        total += 1;
        since_restart += 1;

        if !total.is_multiple_of(CHECK_EVERY) && total != max_iters {
            continue;
        }
        let (cur_err, cur_q) = assess(problem, &cur);
        if cur_q < best_q {
            best_q = cur_q;
            best_x = cur.x.clone();
        }
        let mean = avg.mean();
        let (avg_err, avg_q) = assess(problem, &mean);
        if avg_q < best_q {
            best_q = avg_q;
            best_x = mean.x.clone();
        }
        let (candidate, cand_err) = if avg_err < cur_err {
            (mean, avg_err)
        } else {
            // Keep the recurrence state intact; the restart below copies it.
            (
                Iterate {
                    x: cur.x.clone(),
                    a: cur.a.clone(),
                    y: cur.y.clone(),
                    ky: cur.ky.clone(),
                },
                cur_err,
            )
        };
        residual = cand_err;
        let done = cand_err <= threshold || total == max_iters;
        let restart = done
            || cand_err <= RESTART_SUFFICIENT * last_err
            || (cand_err <= RESTART_NECESSARY * last_err && cand_err > prev_candidate_err)
            || since_restart as f64 >= RESTART_ARTIFICIAL * total as f64;
        if restart {
            cur = candidate;
            let dxr = cur.x.sub(&anchor_x).norm_sq().sqrt();
            let dyr = dist_sq(&cur.y, &anchor_y).sqrt();
            if dxr > 1e-10 && dyr > 1e-10 {
                omega = (0.5 * (dyr / dxr).ln() + 0.5 * omega.ln()).exp();
            }
            anchor_x = cur.x.clone();
            anchor_y = cur.y.clone();
            last_err = cand_err;
            avg = Averages::new(&cur);
            prev_candidate_err = f64::INFINITY;
            since_restart = 0;
        } else {
            prev_candidate_err = cand_err;
        }
        if done {
            break;
        }
    }
    InnerResult {
        x: cur.x,
        y: cur.y,
        bound: best_q,
        best_x,
        steps: total,
        residual,
    }
}
