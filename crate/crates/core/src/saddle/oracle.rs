//! Linear minimization over `J_k`: `min_ν P(ν, y)`.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rand::Rng;

use crate::error::Result;
use crate::graph::spanning::{complete_spanning_tree, TreeGoal};
use crate::graph::{nu_from_decomposable, random_junction_tree, NuVector};
use crate::polytope::CliqueIndex;
use crate::subset::Subset;

/// Möbius coefficients `m(B) = Σ_{B' ⊆ B} (−1)^{|B∖B'|} F(B')` on `D_k`,
/// from cached values `F(C)` of a normalized function.
pub fn mobius(idx: &CliqueIndex, fvals: &[f64]) -> Vec<f64> {
    idx.subsets()
        .iter()
        .map(|&b| {
            let size = b.len();
            b.subsets()
                .filter(|s| !s.is_empty())
                .map(|s| {
                    let v = fvals[idx.position(s).expect("D_k is closed under subsets")];
                    if (size - s.len()) % 2 == 0 {
                        v
                    } else {
                        -v
                    }
                })
                .sum()
        })
        .collect()
}

/// Nonzero `(coordinate, ν_C m(B))` terms over `B ⊆ C`, for every `C` in the
/// support of `ν`, in support order.
pub(crate) fn expanded_terms<'a>(
    idx: &'a CliqueIndex,
    mob: &'a [f64],
    nu: &'a NuVector,
) -> impl Iterator<Item = (usize, f64)> + 'a {
    nu.entries().iter().flat_map(move |&(c, coef)| {
        c.subsets().filter(|b| !b.is_empty()).map(move |b| {
            let p = idx.position(b).expect("ν is supported on D_k");
            (p, coef * mob[p])
        })
    })
}

/// `P(ν, y) = Σ_C ν_C Σ_{∅ ≠ B ⊆ C} m(B) y_B`.
///
/// At `y_B = 1[B ⊆ A]` this is `Σ_C ν_C F(C ∩ A) = F_ν(A)`. The weights
/// `Σ_{C ⊇ B} ν_C` are gathered first and the terms summed in coordinate
/// order, so vectors that differ only on zero terms give identical sums.
pub fn bilinear(idx: &CliqueIndex, mob: &[f64], nu: &NuVector, y: &[f64]) -> f64 {
    let mut weight: BTreeMap<usize, f64> = BTreeMap::new();
    for &(c, coef) in nu.entries() {
        for b in c.subsets().filter(|b| !b.is_empty()) {
            *weight
                .entry(idx.position(b).expect("ν is supported on D_k"))
                .or_insert(0.0) += coef;
        }
    }
    weight.into_iter().map(|(p, w)| w * mob[p] * y[p]).sum()
}

/// Exact oracle for `k = 1`: every spanning tree puts total weight one on each
/// singleton, so the minimum is a minimum spanning tree on
/// `w_ij = (F({i,j}) − F({i}) − F({j})) y_ij`.
pub fn tree_oracle(idx: &CliqueIndex, mob: &[f64], y: &[f64]) -> (NuVector, f64) {
    let n = idx.n();
    let edges = complete_spanning_tree(
        n,
        |i, j| {
            let p = idx.position(Subset::from([i, j])).unwrap();
            mob[p] * y[p]
        },
        TreeGoal::Minimize,
    );
    let nu = NuVector::from_tree(n, &edges);
    let value = bilinear(idx, mob, &nu, y);
    (nu, value)
}

/// Best of `pool` random maximal junction trees of width `k`; an upper
/// bound on the true minimum over `J_k`. Ties go to the lexicographically
/// smaller coefficient vector.
pub fn pool_oracle<R: Rng + ?Sized>(
    idx: &CliqueIndex,
    mob: &[f64],
    y: &[f64],
    pool: usize,
    rng: &mut R,
) -> Result<(NuVector, f64)> {
    let mut best: Option<(NuVector, f64)> = None;
    for _ in 0..pool.max(1) {
        let dec = random_junction_tree(idx.n(), idx.k(), rng)?;
        let nu = nu_from_decomposable(&dec)?;
        let value = bilinear(idx, mob, &nu, y);
        let better = match &best {
            None => true,
            Some((b, v)) => match value.total_cmp(v) {
                Ordering::Less => true,
                Ordering::Equal => nu.cmp_lex(b) == Ordering::Less,
                Ordering::Greater => false,
            },
        };
        if better {
            best = Some((nu, value));
        }
    }
    Ok(best.expect("pool is nonempty"))
}
