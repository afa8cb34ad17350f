//! Structure learning: the best spanning tree and random maximal junction
//! trees of a given width.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{domain, Result};
use crate::graph::decomposable::DecomposableGraph;
use crate::graph::spanning::{complete_spanning_tree, TreeGoal};
use crate::setfn::SetFunction;
use crate::subset::Subset;

/// Spanning tree minimizing `F_G(V)`.
///
/// Adding edge `{i,j}` lowers `F_G(V)` by `F({i}) + F({j}) − F({i,j})`, so
/// this is a maximum-weight spanning tree on those scores.
pub fn best_tree_structure<F: SetFunction + ?Sized>(f: &F) -> Result<DecomposableGraph> {
    let edges = best_tree_edges(f)?;
    DecomposableGraph::from_edges(f.n(), &edges)
}

pub fn best_tree_edges<F: SetFunction + ?Sized>(f: &F) -> Result<Vec<(usize, usize)>> {
    let n = f.n();
    if n < 2 {
        return Err(domain("structure learning needs at least two elements"));
    }
    let single: Vec<f64> = (0..n).map(|i| f.value(Subset::singleton(i))).collect();
    Ok(complete_spanning_tree(
        n,
        |i, j| single[i] + single[j] - f.value(Subset::from([i, j])),
        TreeGoal::Maximize,
    ))
}

/// Random `k`-tree: a random `(k+1)`-clique grown by attaching each further
/// vertex (in random order) to a random `k`-subset of a random existing
/// clique. Every such graph is a maximal junction tree of width `k`.
pub fn random_junction_tree<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    rng: &mut R,
) -> Result<DecomposableGraph> {
    if k == 0 || k + 1 > n {
        return Err(domain(format!(
            "treewidth {k} needs 1 <= k <= n - 1 (n = {n})"
        )));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let first: Vec<usize> = order[..=k].to_vec();
    let mut edges = Vec::new();
    for a in 0..first.len() {
        for b in a + 1..first.len() {
            edges.push((first[a], first[b]));
        }
    }
    let mut cliques: Vec<Vec<usize>> = vec![first];
    for &v in &order[k + 1..] {
        let host = &cliques[rng.gen_range(0..cliques.len())];
        let drop = rng.gen_range(0..host.len());
        let mut sep: Vec<usize> = host.clone();
        sep.remove(drop);
        for &u in &sep {
            edges.push((u, v));
        }
        sep.push(v);
        cliques.push(sep);
    }
    DecomposableGraph::from_edges(n, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::decomposable::decomposable_bound;
    use crate::graph::nu::nu_from_decomposable;
    use crate::instances::{rng_from_seed, CutInstance, EntropyInstance, ModularInstance};

    #[test]
    fn triangle_tree_bound() {
        let f = CutInstance::new(3, vec![(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)])
            .unwrap()
            .into_instance()
            .unwrap();
        let t = best_tree_structure(&f).unwrap();
        assert_eq!(t.graph().edges().len(), 2);
        assert_eq!(decomposable_bound(&f, &t, Subset::full(3)), 2.0);
    }

    #[test]
    fn modular_bound_is_exact() {
        let f = ModularInstance::new(vec![1.0, -0.5, 2.0, 0.25])
            .into_instance()
            .unwrap();
        let t = best_tree_structure(&f).unwrap();
        assert_eq!(
            decomposable_bound(&f, &t, Subset::full(4)),
            f.value(Subset::full(4))
        );
    }

    #[test]
    fn correlated_pair_is_linked() {
        // x0 = x1 uniform, x2 independent uniform; table over (x0, x1, x2).
        let mut p = vec![0.0; 8];
        for x2 in 0..2 {
            p[x2] = 0.25;
            p[0b110 | x2] = 0.25;
        }
        let f = EntropyInstance::new(vec![2, 2, 2], p)
            .unwrap()
            .into_instance()
            .unwrap();
        let t = best_tree_structure(&f).unwrap();
        assert!(t.graph().has_edge(0, 1));
    }

    #[test]
    fn random_k_trees_are_maximal() {
        let mut rng = rng_from_seed(9);
        for k in 1..=3 {
            for _ in 0..20 {
                let dec = random_junction_tree(8, k, &mut rng).unwrap();
                assert_eq!(dec.treewidth(), k);
                assert_eq!(dec.cliques().len(), 8 - k);
                let nu = nu_from_decomposable(&dec).unwrap();
                assert!((0..8).all(|i| nu.element_sum(i) == 1.0));
            }
        }
        assert!(random_junction_tree(3, 3, &mut rng).is_err());
    }
}
