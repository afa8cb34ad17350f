//! Kruskal spanning trees with lexicographic tie-breaking.

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TreeGoal {
    Minimize,
    Maximize,
}

struct DisjointSets {
    parent: Vec<usize>,
}

impl DisjointSets {
    fn new(n: usize) -> Self {
        DisjointSets {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Spanning tree (forest, if disconnected) over `n` nodes from weighted
/// pairs `(i, j, w)`. Equal weights are taken in lexicographic `(i, j)` order.
/// Returned edges are sorted.
pub fn spanning_tree(
    n: usize,
    pairs: &[(usize, usize, f64)],
    goal: TreeGoal,
) -> Vec<(usize, usize)> {
    let mut sorted: Vec<(usize, usize, f64)> = pairs
        .iter()
        .map(|&(i, j, w)| (i.min(j), i.max(j), w))
        .collect();
    sorted.sort_by(|a, b| {
        let by_weight = match goal {
            TreeGoal::Minimize => a.2.total_cmp(&b.2),
            TreeGoal::Maximize => b.2.total_cmp(&a.2),
        };
        by_weight.then((a.0, a.1).cmp(&(b.0, b.1)))
    });
    let mut sets = DisjointSets::new(n);
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    for (i, j, _) in sorted {
        if sets.union(i, j) {
            tree.push((i, j));
            if tree.len() + 1 == n {
                break;
            }
        }
    }
    tree.sort_unstable();
    tree
}

/// Complete-graph spanning tree with weights from `weight(i, j)`, `i < j`.
pub fn complete_spanning_tree(
    n: usize,
    weight: impl Fn(usize, usize) -> f64,
    goal: TreeGoal,
) -> Vec<(usize, usize)> {
    let mut pairs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in i + 1..n {
            pairs.push((i, j, weight(i, j)));
        }
    }
    spanning_tree(n, &pairs, goal)
}
