use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{domain, Result};
use crate::instances::random_tree_edges;
use crate::setfn::SetFunction;
use crate::subset::Subset;

/// Directed acyclic graph given by parent sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dag {
    n: usize,
    parents: Vec<Subset>,
    order: Vec<usize>,
}

impl Dag {
    /// Validates acyclicity and computes a topological order (Kahn's
    /// algorithm, smallest ready vertex first).
    pub fn new(parents: Vec<Subset>) -> Result<Self> {
        let n = parents.len();
        if n == 0 {
            return Err(domain("a DAG needs at least one node"));
        }
        for (i, p) in parents.iter().enumerate() {
            if !p.within(n) {
                return Err(domain(format!("parents of {i} out of range")));
            }
            if p.contains(i) {
                return Err(domain(format!("node {i} is its own parent")));
            }
        }
        let mut placed = Subset::EMPTY;
        let mut order = Vec::with_capacity(n);
        while order.len() < n {
            let next = (0..n).find(|&i| !placed.contains(i) && parents[i].is_subset_of(placed));
            match next {
                Some(i) => {
                    placed.insert(i);
                    order.push(i);
                }
                None => return Err(domain("parent sets contain a directed cycle")),
            }
        }
        Ok(Dag { n, parents, order })
    }

    pub fn empty(n: usize) -> Self {
        Dag {
            n,
            parents: vec![Subset::EMPTY; n],
            order: (0..n).collect(),
        }
    }

    /// Builds from `(parent, child)` arcs.
    pub fn from_arcs(n: usize, arcs: &[(usize, usize)]) -> Result<Self> {
        let mut parents = vec![Subset::EMPTY; n];
        for &(p, c) in arcs {
            if p >= n || c >= n {
                return Err(domain(format!("arc ({p},{c}) out of range")));
            }
            parents[c].insert(p);
        }
        Dag::new(parents)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn parents(&self, i: usize) -> Subset {
        self.parents[i]
    }

    pub fn parent_sets(&self) -> &[Subset] {
        &self.parents
    }

    pub fn topological_order(&self) -> &[usize] {
        &self.order
    }

    /// `(parent, child)` arcs sorted lexicographically.
    pub fn arcs(&self) -> Vec<(usize, usize)> {
        let mut arcs: Vec<_> = (0..self.n)
            .flat_map(|c| self.parents[c].iter().map(move |p| (p, c)))
            .collect();
        arcs.sort_unstable();
        arcs
    }

    pub fn num_arcs(&self) -> usize {
        self.parents.iter().map(|p| p.len()).sum()
    }

    #[must_use]
    pub fn without_arc(&self, parent: usize, child: usize) -> Dag {
        let mut parents = self.parents.clone();
        parents[child].remove(parent);
        // Removing an arc keeps the old order topological.
        Dag {
            n: self.n,
            parents,
            order: self.order.clone(),
        }
    }

    /// Every node of `a` has all its parents in `a`.
    pub fn is_ancestral(&self, a: Subset) -> bool {
        a.iter().all(|i| self.parents[i].is_subset_of(a))
    }

    /// Connected, with exactly one parentless root and one parent elsewhere.
    pub fn is_directed_tree(&self) -> bool {
        if self.parents.iter().any(|p| p.len() > 1) || self.num_arcs() + 1 != self.n {
            return false;
        }
        // n - 1 arcs and acyclic: connected iff it has no undirected cycle,
        // which union-find detects.
        let mut uf: Vec<usize> = (0..self.n).collect();
        fn find(uf: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while uf[r] != r {
                r = uf[r];
            }
            uf[x] = r;
            r
        }
        for (p, c) in self.arcs() {
            let (a, b) = (find(&mut uf, p), find(&mut uf, c));
            if a == b {
                return false;
            }
            uf[a] = b;
        }
        true
    }

    pub fn root(&self) -> Option<usize> {
        (0..self.n).find(|&i| self.parents[i].is_empty())
    }

    /// Random DAG: a random permutation is the topological order and each
    /// earlier node becomes a parent with probability `p`, at most
    /// `max_parents` per node.
    pub fn random<R: Rng + ?Sized>(n: usize, p: f64, max_parents: usize, rng: &mut R) -> Dag {
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(rng);
        let mut parents = vec![Subset::EMPTY; n];
        for (pos, &child) in order.iter().enumerate() {
            for &cand in &order[..pos] {
                if parents[child].len() < max_parents && rng.gen::<f64>() < p {
                    parents[child].insert(cand);
                }
            }
        }
        Dag::new(parents).expect("permutation order is acyclic")
    }

    /// Uniform random spanning tree oriented away from a random root.
    pub fn random_tree<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Dag {
        let edges = random_tree_edges(n, rng);
        let root = rng.gen_range(0..n);
        orient_tree(n, &edges, root)
    }
}

/// Orients an undirected tree away from `root`.
pub(crate) fn orient_tree(n: usize, edges: &[(usize, usize)], root: usize) -> Dag {
    let mut adj = vec![Vec::new(); n];
    for &(i, j) in edges {
        adj[i].push(j);
        adj[j].push(i);
    }
    let mut parents = vec![Subset::EMPTY; n];
    let mut seen = Subset::singleton(root);
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for &u in &adj[v] {
            if !seen.contains(u) {
                seen.insert(u);
                parents[u].insert(v);
                stack.push(u);
            }
        }
    }
    Dag::new(parents).expect("tree orientation is acyclic")
}

/// `F_G(A) = Σ_{i∈A} F(A ∩ (π_i ∪ {i})) − F(A ∩ π_i)`.
pub fn dag_bound<F: SetFunction + ?Sized>(f: &F, g: &Dag, a: Subset) -> f64 {
    a.iter()
        .map(|i| {
            let pa = g.parents(i).intersection(a);
            f.value(pa.with(i)) - f.value(pa)
        })
        .sum()
}

/// Same skeleton, every arc pointing away from `new_root`.
pub fn reroot_tree(dag: &Dag, new_root: usize) -> Result<Dag> {
    if new_root >= dag.n() {
        return Err(domain(format!("root {new_root} out of range")));
    }
    if !dag.is_directed_tree() {
        return Err(domain("reroot_tree expects a directed tree"));
    }
    let edges: Vec<_> = dag.arcs();
    Ok(orient_tree(dag.n(), &edges, new_root))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{rng_from_seed, CutInstance};

    fn triangle() -> impl SetFunction {
        CutInstance::new(3, vec![(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)])
            .unwrap()
            .into_instance()
            .unwrap()
    }

    #[test]
    fn chain_bound_on_triangle() {
        let f = triangle();
        let chain = Dag::from_arcs(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(dag_bound(&f, &chain, Subset::full(3)), 2.0);
        assert_eq!(dag_bound(&f, &chain, Subset::from([0])), 2.0);
    }

    #[test]
    fn empty_dag_gives_modular_bound() {
        let f = triangle();
        let g = Dag::empty(3);
        for b in 0..8u128 {
            let a = Subset::from_bits(b);
            let modular: f64 = a.iter().map(|i| f.value(Subset::singleton(i))).sum();
            assert_eq!(dag_bound(&f, &g, a), modular);
        }
    }

    #[test]
    fn rejects_cycles() {
        assert!(Dag::from_arcs(3, &[(0, 1), (1, 2), (2, 0)]).is_err());
        assert!(Dag::new(vec![Subset::from([0])]).is_err());
    }

    #[test]
    fn reroot_examples() {
        let path = Dag::from_arcs(3, &[(0, 1), (1, 2)]).unwrap();
        let back = reroot_tree(&path, 2).unwrap();
        assert_eq!(back.arcs(), vec![(1, 0), (2, 1)]);
        assert_eq!(reroot_tree(&path, 0).unwrap(), path);

        let star = Dag::from_arcs(4, &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let r = reroot_tree(&star, 2).unwrap();
        assert_eq!(r.arcs(), vec![(0, 1), (0, 3), (2, 0)]);

        let not_tree = Dag::from_arcs(3, &[(0, 2), (1, 2)]).unwrap();
        assert!(reroot_tree(&not_tree, 0).is_err());
        let forest = Dag::from_arcs(3, &[(0, 1)]).unwrap();
        assert!(reroot_tree(&forest, 0).is_err());
    }

    #[test]
    fn random_dags_respect_parent_cap() {
        let mut rng = rng_from_seed(3);
        for _ in 0..50 {
            let g = Dag::random(8, 0.4, 3, &mut rng);
            assert!(g.parent_sets().iter().all(|p| p.len() <= 3));
            let pos: Vec<usize> = {
                let mut pos = vec![0; 8];
                for (k, &v) in g.topological_order().iter().enumerate() {
                    pos[v] = k;
                }
                pos
            };
            for (p, c) in g.arcs() {
                assert!(pos[p] < pos[c]);
            }
            let t = Dag::random_tree(8, &mut rng);
            assert!(t.is_directed_tree());
        }
    }
}
