//! Triangulated graphs: maximum cardinality search, perfect elimination
//! orderings and junction trees.

use std::collections::VecDeque;

use crate::error::{domain, Error, Result};
use crate::graph::dag::Dag;
use crate::graph::spanning::{spanning_tree, TreeGoal};
use crate::setfn::SetFunction;
use crate::subset::{Subset, MAX_ELEMENTS};

/// Simple undirected graph as adjacency masks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UndirectedGraph {
    adj: Vec<Subset>,
}

impl UndirectedGraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 || n > MAX_ELEMENTS {
            return Err(domain(format!("graph size {n} out of range")));
        }
        let mut adj = vec![Subset::EMPTY; n];
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(domain(format!("edge ({i},{j}) out of range")));
            }
            if i == j {
                return Err(domain(format!("self-loop on vertex {i}")));
            }
            adj[i].insert(j);
            adj[j].insert(i);
        }
        Ok(UndirectedGraph { adj })
    }

    pub fn complete(n: usize) -> Self {
        let full = Subset::full(n);
        UndirectedGraph {
            adj: (0..n).map(|i| full.without(i)).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, i: usize) -> Subset {
        self.adj[i]
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i].contains(j)
    }

    /// Edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n())
            .flat_map(|i| {
                self.adj[i]
                    .iter()
                    .filter(move |&j| j > i)
                    .map(move |j| (i, j))
            })
            .collect()
    }

    pub fn is_clique(&self, s: Subset) -> bool {
        s.iter().all(|v| s.without(v).is_subset_of(self.adj[v]))
    }
}

/// A perfect elimination ordering with each vertex's later neighbours.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Elimination {
    /// Vertices in elimination order, first eliminated first.
    pub order: Vec<usize>,
    /// `later[v]`: neighbours of `v` eliminated after `v` (`π_v(G)`).
    pub later: Vec<Subset>,
}

/// Maximum cardinality search; the reverse visit order is a perfect
/// elimination ordering exactly when the graph is triangulated.
///
/// On failure the error carries a chordless cycle of length at least four.
pub fn peo_and_check(g: &UndirectedGraph) -> Result<Elimination> {
    let n = g.n();
    let mut weight = vec![0usize; n];
    let mut visited = Subset::EMPTY;
    let mut visit = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !visited.contains(v))
            .max_by(|&a, &b| weight[a].cmp(&weight[b]).then(b.cmp(&a)))
            .unwrap();
        visited.insert(v);
        visit.push(v);
        for u in g.neighbors(v).iter() {
            if !visited.contains(u) {
                weight[u] += 1;
            }
        }
    }
    let order: Vec<usize> = visit.into_iter().rev().collect();
    let mut remaining = Subset::full(n);
    let mut later = vec![Subset::EMPTY; n];
    for &v in &order {
        remaining.remove(v);
        later[v] = g.neighbors(v).intersection(remaining);
    }
    for &v in &order {
        if !g.is_clique(later[v]) {
            let cycle = chordless_cycle(g).expect("a non-chordal graph has a chordless cycle");
            return Err(Error::NotTriangulated { cycle });
        }
    }
    Ok(Elimination { order, later })
}

/// Finds a chordless cycle of length >= 4 if one exists.
///
/// For a vertex `v` with non-adjacent neighbours `u`, `w`, a shortest
/// `u`–`w` path avoiding the rest of `N[v]` closes an induced cycle through
/// `v`.
pub fn chordless_cycle(g: &UndirectedGraph) -> Option<Vec<usize>> {
    let n = g.n();
    for v in 0..n {
        let nv = g.neighbors(v);
        for u in nv.iter() {
            for w in nv.iter().filter(|&w| w > u && !g.has_edge(u, w)) {
                let blocked = nv.with(v).without(u).without(w);
                if let Some(path) = shortest_path(g, u, w, blocked) {
                    let mut cycle = vec![v];
                    cycle.extend(path);
                    return Some(cycle);
                }
            }
        }
    }
    None
}

fn shortest_path(
    g: &UndirectedGraph,
    from: usize,
    to: usize,
    blocked: Subset,
) -> Option<Vec<usize>> {
    let n = g.n();
    let mut prev = vec![usize::MAX; n];
    let mut seen = blocked.with(from);
    let mut queue = VecDeque::from([from]);
    while let Some(x) = queue.pop_front() {
        if x == to {
            let mut path = vec![to];
            let mut cur = to;
            while cur != from {
                cur = prev[cur];
                path.push(cur);
            }
            path.reverse();
            return Some(path);
        }
        for y in g.neighbors(x).difference(seen).iter() {
            seen.insert(y);
            prev[y] = x;
            queue.push_back(y);
        }
    }
    None
}

/// A triangulated graph with its elimination ordering and junction tree.
#[derive(Clone, Debug, PartialEq)]
pub struct DecomposableGraph {
    graph: UndirectedGraph,
    elimination: Elimination,
    cliques: Vec<Subset>,
    tree_edges: Vec<(usize, usize)>,
    separators: Vec<(Subset, usize)>,
}

impl DecomposableGraph {
    pub fn new(graph: UndirectedGraph) -> Result<Self> {
        let elimination = peo_and_check(&graph)?;
        let (cliques, tree_edges) = build_junction_tree(&elimination);
        let separators = separator_multiset(&cliques, &tree_edges);
        Ok(DecomposableGraph {
            graph,
            elimination,
            cliques,
            tree_edges,
            separators,
        })
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        DecomposableGraph::new(UndirectedGraph::new(n, edges)?)
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn graph(&self) -> &UndirectedGraph {
        &self.graph
    }

    pub fn elimination(&self) -> &Elimination {
        &self.elimination
    }

    /// Maximal cliques in lexicographic order.
    pub fn cliques(&self) -> &[Subset] {
        &self.cliques
    }

    /// Junction-tree edges as pairs of clique indices.
    pub fn tree_edges(&self) -> &[(usize, usize)] {
        &self.tree_edges
    }

    /// Distinct separators with multiplicities, lexicographic order.
    pub fn separators(&self) -> &[(Subset, usize)] {
        &self.separators
    }

    /// Largest clique size minus one.
    pub fn treewidth(&self) -> usize {
        self.cliques.iter().map(|c| c.len()).max().unwrap_or(1) - 1
    }

    /// The DAG whose parent sets are the later neighbours `π_i(G)`.
    pub fn as_dag(&self) -> Dag {
        Dag::new(self.elimination.later.clone()).expect("elimination DAG is acyclic")
    }

    /// Running intersection: the cliques containing any vertex induce a
    /// connected subtree.
    pub fn has_running_intersection(&self) -> bool {
        (0..self.n()).all(|v| {
            let members: Vec<usize> = (0..self.cliques.len())
                .filter(|&c| self.cliques[c].contains(v))
                .collect();
            let internal = self
                .tree_edges
                .iter()
                .filter(|(a, b)| self.cliques[*a].contains(v) && self.cliques[*b].contains(v))
                .count();
            // A subforest of a tree is connected iff edges = nodes - 1.
            members.is_empty() || internal + 1 == members.len()
        })
    }
}

fn build_junction_tree(elim: &Elimination) -> (Vec<Subset>, Vec<(usize, usize)>) {
    let candidates: Vec<Subset> = elim.order.iter().map(|&v| elim.later[v].with(v)).collect();
    let mut cliques: Vec<Subset> = Vec::new();
    for (k, &c) in candidates.iter().enumerate() {
        let dominated = candidates
            .iter()
            .enumerate()
            .any(|(m, &d)| m != k && c.is_subset_of(d) && (c != d || m < k));
        if !dominated {
            cliques.push(c);
        }
    }
    cliques.sort_by(|a, b| a.cmp_lex(*b));
    let mut pairs = Vec::new();
    for a in 0..cliques.len() {
        for b in a + 1..cliques.len() {
            pairs.push((a, b, cliques[a].intersection(cliques[b]).len() as f64));
        }
    }
    let tree = spanning_tree(cliques.len(), &pairs, TreeGoal::Maximize);
    (cliques, tree)
}

fn separator_multiset(cliques: &[Subset], tree: &[(usize, usize)]) -> Vec<(Subset, usize)> {
    let mut seps: Vec<Subset> = tree
        .iter()
        .map(|&(a, b)| cliques[a].intersection(cliques[b]))
        .collect();
    seps.sort_by(|a, b| a.cmp_size_lex(*b));
    let mut out: Vec<(Subset, usize)> = Vec::new();
    for s in seps {
        match out.last_mut() {
            Some((last, m)) if *last == s => *m += 1,
            _ => out.push((s, 1)),
        }
    }
    out
}

/// Maximal cliques and separator multiset of the junction tree.
pub fn junction_tree(dec: &DecomposableGraph) -> (Vec<Subset>, Vec<(Subset, usize)>) {
    (dec.cliques.clone(), dec.separators.clone())
}

/// Junction-tree form `Σ_C F(C∩A) − Σ_{(C,D)} F(C∩D∩A)`.
///
/// Debug builds also evaluate the elimination form and assert agreement.
pub fn decomposable_bound<F: SetFunction + ?Sized>(
    f: &F,
    dec: &DecomposableGraph,
    a: Subset,
) -> f64 {
    let value = junction_form(f, dec, a);
    debug_assert!(
        {
            let other = elimination_bound(f, dec, a);
            (value - other).abs() <= 1e-9 * (1.0 + value.abs())
        },
        "junction-tree and elimination forms disagree at {a}"
    );
    value
}

fn junction_form<F: SetFunction + ?Sized>(f: &F, dec: &DecomposableGraph, a: Subset) -> f64 {
    let cliques: f64 = dec
        .cliques
        .iter()
        .map(|&c| f.value(c.intersection(a)))
        .sum();
    let seps: f64 = dec
        .separators
        .iter()
        .map(|&(s, m)| m as f64 * f.value(s.intersection(a)))
        .sum();
    cliques - seps
}

/// Elimination form `Σ_{i∈V} F(A ∩ (π_i ∪ {i})) − F(A ∩ π_i)`.
pub fn elimination_bound<F: SetFunction + ?Sized>(
    f: &F,
    dec: &DecomposableGraph,
    a: Subset,
) -> f64 {
    dec.elimination
        .order
        .iter()
        .map(|&i| {
            let pi = dec.elimination.later[i];
            f.value(pi.with(i).intersection(a)) - f.value(pi.intersection(a))
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::CutInstance;

    fn triangle_cut() -> impl SetFunction {
        CutInstance::new(3, vec![(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)])
            .unwrap()
            .into_instance()
            .unwrap()
    }

    #[test]
    fn path_is_triangulated() {
        let g = UndirectedGraph::new(3, &[(0, 1), (1, 2)]).unwrap();
        let e = peo_and_check(&g).unwrap();
        let first = e.order[0];
        assert!(first == 0 || first == 2);
        assert_eq!(e.later[first], Subset::singleton(1));
    }

    #[test]
    fn four_cycle_is_rejected_with_witness() {
        let g = UndirectedGraph::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        match peo_and_check(&g) {
            Err(Error::NotTriangulated { cycle }) => {
                assert_eq!(cycle.len(), 4);
                let set: Subset = cycle.iter().copied().collect();
                assert_eq!(set, Subset::full(4));
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn witness_cycle_is_induced() {
        // 5-cycle with a pendant triangle elsewhere.
        let g = UndirectedGraph::new(
            7,
            &[
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 4),
                (4, 0),
                (4, 5),
                (5, 6),
                (6, 4),
            ],
        )
        .unwrap();
        let Err(Error::NotTriangulated { cycle }) = peo_and_check(&g) else {
            panic!("5-cycle is not chordal");
        };
        assert!(cycle.len() >= 4);
        let k = cycle.len();
        for a in 0..k {
            for b in a + 1..k {
                let adjacent = b == a + 1 || (a == 0 && b == k - 1);
                assert_eq!(g.has_edge(cycle[a], cycle[b]), adjacent);
            }
        }
    }

    #[test]
    fn junction_tree_examples() {
        let path = DecomposableGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let (c, s) = junction_tree(&path);
        assert_eq!(c, vec![Subset::from([0, 1]), Subset::from([1, 2])]);
        assert_eq!(s, vec![(Subset::from([1]), 1)]);

        let star = DecomposableGraph::from_edges(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let (c, s) = junction_tree(&star);
        assert_eq!(
            c,
            vec![
                Subset::from([0, 1]),
                Subset::from([0, 2]),
                Subset::from([0, 3])
            ]
        );
        assert_eq!(s, vec![(Subset::from([0]), 2)]);

        let tri = DecomposableGraph::new(UndirectedGraph::complete(3)).unwrap();
        let (c, s) = junction_tree(&tri);
        assert_eq!(c, vec![Subset::full(3)]);
        assert!(s.is_empty());
        assert_eq!(tri.treewidth(), 2);
    }

    #[test]
    fn chordal_graph_properties() {
        // Two triangles sharing an edge plus a tail.
        let dec =
            DecomposableGraph::from_edges(5, &[(0, 1), (0, 2), (1, 2), (1, 3), (2, 3), (3, 4)])
                .unwrap();
        assert!(dec.has_running_intersection());
        let mult: usize = dec.separators().iter().map(|s| s.1).sum();
        assert_eq!(dec.cliques().len() - 1, mult);
        for &c in dec.cliques() {
            assert!(dec.graph().is_clique(c));
        }
    }

    #[test]
    fn bound_examples() {
        let f = triangle_cut();
        let path = DecomposableGraph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(decomposable_bound(&f, &path, Subset::full(3)), 2.0);
        assert_eq!(decomposable_bound(&f, &path, Subset::from([0, 1])), 2.0);
        let complete = DecomposableGraph::new(UndirectedGraph::complete(3)).unwrap();
        for b in 0..8u128 {
            let a = Subset::from_bits(b);
            assert_eq!(decomposable_bound(&f, &complete, a), f.value(a));
        }
    }

    #[test]
    fn forest_has_empty_separator() {
        let dec = DecomposableGraph::from_edges(4, &[(0, 1), (2, 3)]).unwrap();
        assert_eq!(dec.separators(), &[(Subset::EMPTY, 1)]);
        assert!(dec.has_running_intersection());
    }
}
