//! Differences of submodular functions and cardinality constraints, both
//! run through the simplicial solver.
//!
//! For `F − H` each hull vertex is a pair `(ν, s)` with `s` a vertex of the
//! base polytope `B(H)`; since `H(A) >= s·1_A`, the relaxation of
//! `F_ν(A) − s·1_A` still bounds `max_A F(A) − H(A)`. The second oracle is
//! the greedy algorithm on `B(H)` with the singleton pseudo-marginals as
//! weights.

use crate::error::{domain, Error, Result};
use crate::saddle::{run, Objective, Solution, SolverConfig};
use crate::setfn::{check_submodular, SetFunction, SetFunctionInstance, EXHAUSTIVE_LIMIT};
use crate::subset::Subset;

/// `A ↦ f(A) − h(A)` with both parts submodular.
#[derive(Clone, Debug)]
pub struct DifferenceInstance {
    f: SetFunctionInstance,
    h: SetFunctionInstance,
}

impl DifferenceInstance {
    /// Checks sizes and, for `n <= 14`, submodularity of both parts.
    pub fn new(f: SetFunctionInstance, h: SetFunctionInstance) -> Result<Self> {
        if f.n() != h.n() {
            return Err(Error::Dimension {
                expected: f.n(),
                got: h.n(),
            });
        }
        if f.n() <= EXHAUSTIVE_LIMIT {
            if !check_submodular(&f)? {
                return Err(domain("the first part of the difference is not submodular"));
            }
            if !check_submodular(&h)? {
                return Err(domain(
                    "the subtracted part of the difference is not submodular",
                ));
            }
        }
        Ok(DifferenceInstance { f, h })
    }

    pub fn f(&self) -> &SetFunctionInstance {
        &self.f
    }

    pub fn h(&self) -> &SetFunctionInstance {
        &self.h
    }
}

impl SetFunction for DifferenceInstance {
    fn n(&self) -> usize {
        self.f.n()
    }

    fn value(&self, a: Subset) -> f64 {
        self.f.value(a) - self.h.value(a)
    }
}

/// Upper bound on `max_A f(A) − h(A)` (subject to `config.budget`) and a
/// rounded set.
pub fn solve_difference(di: &DifferenceInstance, config: &SolverConfig) -> Result<Solution> {
    let objective = Objective {
        f: &di.f,
        h: Some(&di.h),
        budget: config.budget,
    };
    run(&objective, config)
}

/// Upper bound on `max_{|A| <= m} f(A)` and a rounded set of size at most
/// `m`. The budget row is dropped when `m = n`, where it cannot bind.
pub fn solve_cardinality<F: SetFunction + ?Sized>(
    f: &F,
    m: usize,
    config: &SolverConfig,
) -> Result<Solution> {
    let n = f.n();
    if m > n {
        return Err(domain(format!("budget {m} exceeds ground set size {n}")));
    }
    let objective = Objective {
        f: &f,
        h: None,
        budget: (m < n).then_some(m),
    };
    run(&objective, config)
}
