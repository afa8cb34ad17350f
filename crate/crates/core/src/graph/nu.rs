use std::cmp::Ordering;

use crate::error::{domain, Result};
use crate::graph::decomposable::DecomposableGraph;
use crate::setfn::SetFunction;
use crate::subset::Subset;

/// Sparse coefficients `ν` over subsets of size at most `k + 1`, encoding
/// the bound `F_ν(A) = Σ_C ν_C F(C ∩ A)`.
///
/// Entries are kept in (size, lexicographic) order with zeros dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct NuVector {
    k: usize,
    coeffs: Vec<(Subset, f64)>,
}

impl NuVector {
    /// Sums duplicate subsets and drops zero coefficients.
    pub fn from_entries(
        k: usize,
        entries: impl IntoIterator<Item = (Subset, f64)>,
    ) -> Result<Self> {
        let mut raw: Vec<(Subset, f64)> = entries.into_iter().collect();
        if let Some((c, _)) = raw.iter().find(|(c, _)| c.is_empty() || c.len() > k + 1) {
            return Err(domain(format!(
                "subset {c} is not in the index for treewidth {k}"
            )));
        }
        raw.sort_by(|a, b| a.0.cmp_size_lex(b.0));
        let mut coeffs: Vec<(Subset, f64)> = Vec::with_capacity(raw.len());
        for (c, v) in raw {
            match coeffs.last_mut() {
                Some((last, acc)) if *last == c => *acc += v,
                _ => coeffs.push((c, v)),
            }
        }
        coeffs.retain(|e| e.1 != 0.0);
        Ok(NuVector { k, coeffs })
    }

    /// Spanning-tree coefficients: `ν_e = 1` per edge and
    /// `ν_{j} = 1 − deg(j)` per vertex.
    pub fn from_tree(n: usize, edges: &[(usize, usize)]) -> Self {
        let mut degree = vec![0i64; n];
        for &(i, j) in edges {
            degree[i] += 1;
            degree[j] += 1;
        }
        let singles = (0..n).map(|j| (Subset::singleton(j), (1 - degree[j]) as f64));
        let pairs = edges.iter().map(|&(i, j)| (Subset::from([i, j]), 1.0));
        NuVector::from_entries(1, singles.chain(pairs)).expect("tree entries have size <= 2")
    }

    pub fn treewidth(&self) -> usize {
        self.k
    }

    pub fn entries(&self) -> &[(Subset, f64)] {
        &self.coeffs
    }

    pub fn coeff(&self, c: Subset) -> f64 {
        self.coeffs
            .binary_search_by(|e| e.0.cmp_size_lex(c))
            .map(|pos| self.coeffs[pos].1)
            .unwrap_or(0.0)
    }

    /// `F_ν(A)`.
    pub fn value<F: SetFunction + ?Sized>(&self, f: &F, a: Subset) -> f64 {
        self.coeffs
            .iter()
            .map(|&(c, v)| v * f.value(c.intersection(a)))
            .sum()
    }

    /// `Σ_{C ∋ i} ν_C`.
    pub fn element_sum(&self, i: usize) -> f64 {
        self.coeffs
            .iter()
            .filter(|(c, _)| c.contains(i))
            .map(|e| e.1)
            .sum()
    }

    /// Total order used to break ties between candidate vertices.
    pub fn cmp_lex(&self, other: &NuVector) -> Ordering {
        for (a, b) in self.coeffs.iter().zip(&other.coeffs) {
            let ord = a.0.cmp_size_lex(b.0).then(a.1.total_cmp(&b.1));
            if ord != Ordering::Equal {
                return ord;
            }
        }
        self.coeffs.len().cmp(&other.coeffs.len())
    }
}

/// `+1` per maximal clique, `−1` per separator occurrence.
///
/// Requires a maximal junction tree: every clique of size `k + 1` and every
/// separator of size `k`.
pub fn nu_from_decomposable(dec: &DecomposableGraph) -> Result<NuVector> {
    let k = dec.treewidth();
    if k == 0 {
        return Err(domain("a graph without edges has no maximal junction tree"));
    }
    if let Some(c) = dec.cliques().iter().find(|c| c.len() != k + 1) {
        return Err(domain(format!(
            "clique {c} has size {}, expected {}",
            c.len(),
            k + 1
        )));
    }
    if let Some((s, _)) = dec.separators().iter().find(|(s, _)| s.len() != k) {
        return Err(domain(format!(
            "separator {s} has size {}, expected {k}",
            s.len()
        )));
    }
    let cliques = dec.cliques().iter().map(|&c| (c, 1.0));
    let seps = dec.separators().iter().map(|&(s, m)| (s, -(m as f64)));
    NuVector::from_entries(k, cliques.chain(seps))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_coefficients() {
        let dec = DecomposableGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let nu = nu_from_decomposable(&dec).unwrap();
        assert_eq!(nu.coeff(Subset::from([0, 1])), 1.0);
        assert_eq!(nu.coeff(Subset::from([1, 2])), 1.0);
        assert_eq!(nu.coeff(Subset::from([1])), -1.0);
        assert_eq!(nu.coeff(Subset::from([0])), 0.0);
        assert_eq!(nu.coeff(Subset::from([2])), 0.0);
        assert_eq!(nu, NuVector::from_tree(3, &[(0, 1), (1, 2)]));
    }

    #[test]
    fn star_and_edge() {
        let star = DecomposableGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let nu = nu_from_decomposable(&star).unwrap();
        assert_eq!(nu.coeff(Subset::from([0])), -2.0);
        let edge = DecomposableGraph::from_edges(2, &[(0, 1)]).unwrap();
        let nu = nu_from_decomposable(&edge).unwrap();
        assert_eq!(nu.entries(), &[(Subset::from([0, 1]), 1.0)]);
    }

    #[test]
    fn rejects_non_maximal_trees() {
        // Triangle plus pendant edge: cliques of sizes 3 and 2.
        let dec = DecomposableGraph::from_edges(4, &[(0, 1), (1, 2), (0, 2), (2, 3)]).unwrap();
        assert!(nu_from_decomposable(&dec).is_err());
        // Forest: empty separator.
        let dec = DecomposableGraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(nu_from_decomposable(&dec).is_err());
    }

    #[test]
    fn element_sums_are_one() {
        let dec = DecomposableGraph::from_edges(
            5,
            &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (3, 4), (2, 4)],
        )
        .unwrap();
        let nu = nu_from_decomposable(&dec).unwrap();
        for i in 0..5 {
            assert_eq!(nu.element_sum(i), 1.0);
        }
    }
}
