//! Concrete set-function families and seeded instance generators.
//!
//! All randomness goes through [`rng_from_seed`] (ChaCha8 seeded from a
//! `u64`), which is portable across platforms.

use std::cmp::Reverse;
use std::collections::{BTreeSet, BinaryHeap};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Error, Result};
use crate::setfn::SetFunctionInstance;
use crate::subset::{Subset, MAX_ELEMENTS};

/// Largest joint probability table accepted for entropy instances.
pub const MAX_JOINT_SIZE: usize = 1 << 16;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A weight drawn uniformly from `(0, 1]`.
pub fn positive_weight<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.gen::<f64>()
}

/// Weighted cut function `F(A) = Σ_{i∈A, j∉A} d(i, j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CutInstance {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl CutInstance {
    /// Edges are stored with `i < j`; reversed pairs are flipped.
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        if n == 0 || n > MAX_ELEMENTS {
            return Err(domain(format!("cut instance size {n} out of range")));
        }
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(edges.len());
        for (a, b, w) in edges {
            let (i, j) = if a < b { (a, b) } else { (b, a) };
            if i == j {
                return Err(domain(format!("self-loop on vertex {i}")));
            }
            if j >= n {
                return Err(domain(format!("edge ({a},{b}) out of range for n={n}")));
            }
            if !(w > 0.0 && w.is_finite()) {
                return Err(domain(format!(
                    "edge ({a},{b}) has non-positive weight {w}"
                )));
            }
            if !seen.insert((i, j)) {
                return Err(domain(format!("duplicate edge ({i},{j})")));
            }
            out.push((i, j, w));
        }
        Ok(CutInstance { n, edges: out })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn value(&self, a: Subset) -> f64 {
        self.edges
            .iter()
            .filter(|(i, j, _)| a.contains(*i) != a.contains(*j))
            .map(|e| e.2)
            .sum()
    }

    pub fn into_instance(self) -> Result<SetFunctionInstance> {
        SetFunctionInstance::new(Family::Cut(self))
    }
}

/// Weighted coverage `F(A) = Σ_{u ∈ ∪_{i∈A} S_i} w_u`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverageInstance {
    weights: Vec<f64>,
    sets: Vec<Vec<usize>>,
}

impl CoverageInstance {
    pub fn new(weights: Vec<f64>, sets: Vec<Vec<usize>>) -> Result<Self> {
        if sets.is_empty() || sets.len() > MAX_ELEMENTS {
            return Err(domain("coverage instance needs 1..=128 sets"));
        }
        if let Some(w) = weights.iter().find(|w| !(**w >= 0.0 && w.is_finite())) {
            return Err(domain(format!(
                "coverage weight {w} is negative or not finite"
            )));
        }
        let m = weights.len();
        let mut sets = sets;
        for s in &mut sets {
            if let Some(u) = s.iter().find(|&&u| u >= m) {
                return Err(domain(format!("universe item {u} out of range for m={m}")));
            }
            s.sort_unstable();
            s.dedup();
        }
        Ok(CoverageInstance { weights, sets })
    }

    pub fn n(&self) -> usize {
        self.sets.len()
    }

    pub fn universe(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn value(&self, a: Subset) -> f64 {
        let mut covered = vec![0u64; self.weights.len().div_ceil(64)];
        for i in a.iter() {
            for &u in &self.sets[i] {
                covered[u / 64] |= 1 << (u % 64);
            }
        }
        // Summed in universe order so the result does not depend on `A`'s layout.
        self.weights
            .iter()
            .enumerate()
            .filter(|(u, _)| covered[u / 64] >> (u % 64) & 1 == 1)
            .map(|(_, w)| w)
            .sum()
    }

    pub fn into_instance(self) -> Result<SetFunctionInstance> {
        SetFunctionInstance::new(Family::Coverage(self))
    }
}

/// `F(A) = Σ_{i∈A} w_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct ModularInstance {
    weights: Vec<f64>,
}

impl ModularInstance {
    pub fn new(weights: Vec<f64>) -> Self {
        ModularInstance { weights }
    }

    pub fn zero(n: usize) -> Self {
        ModularInstance {
            weights: vec![0.0; n],
        }
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn value(&self, a: Subset) -> f64 {
        a.iter().map(|i| self.weights[i]).sum()
    }

    pub fn into_instance(self) -> Result<SetFunctionInstance> {
        SetFunctionInstance::new(Family::Modular(self))
    }
}

/// Joint entropy of discrete random variables, in nats.
///
/// The table is row-major: the last variable varies fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct EntropyInstance {
    cardinalities: Vec<usize>,
    probabilities: Vec<f64>,
}

impl EntropyInstance {
    pub fn new(cardinalities: Vec<usize>, probabilities: Vec<f64>) -> Result<Self> {
        let n = cardinalities.len();
        if n == 0 || n > MAX_ELEMENTS {
            return Err(domain("entropy instance needs 1..=128 variables"));
        }
        let mut size = 1usize;
        for &c in &cardinalities {
            if c == 0 {
                return Err(domain("variable cardinality must be positive"));
            }
            size = size.saturating_mul(c);
            if size > MAX_JOINT_SIZE {
                return Err(Error::Capacity {
                    what: "joint table size",
                    got: size,
                    limit: MAX_JOINT_SIZE,
                });
            }
        }
        if probabilities.len() != size {
            return Err(Error::Dimension {
                expected: size,
                got: probabilities.len(),
            });
        }
        if probabilities.iter().any(|p| !(*p >= 0.0 && p.is_finite())) {
            return Err(domain("probabilities must be non-negative"));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(domain(format!("probabilities sum to {total}, not 1")));
        }
        Ok(EntropyInstance {
            cardinalities,
            probabilities,
        })
    }

    pub fn n(&self) -> usize {
        self.cardinalities.len()
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cardinalities
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn into_instance(self) -> Result<SetFunctionInstance> {
        SetFunctionInstance::new(Family::Entropy(self))
    }

    /// Entropy of the marginal of the variables in `a`; zero for `∅`.
    pub fn entropy(&self, a: Subset) -> f64 {
        if a.is_empty() {
            return 0.0;
        }
        let n = self.n();
        // Marginal index of a joint cell: mixed radix over the kept variables.
        let mut marginal_stride = vec![0usize; n];
        let mut msize = 1usize;
        for i in (0..n).rev() {
            if a.contains(i) {
                marginal_stride[i] = msize;
                msize *= self.cardinalities[i];
            }
        }
        let mut marginal = vec![0.0; msize];
        let mut digits = vec![0usize; n];
        for &p in &self.probabilities {
            let idx: usize = digits
                .iter()
                .zip(&marginal_stride)
                .map(|(d, s)| d * s)
                .sum();
            marginal[idx] += p;
            for i in (0..n).rev() {
                digits[i] += 1;
                if digits[i] < self.cardinalities[i] {
                    break;
                }
                digits[i] = 0;
            }
        }
        -marginal
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|p| p * p.ln())
            .sum::<f64>()
    }
}

/// Free-function form of [`EntropyInstance::entropy`].
pub fn entropy_value(e: &EntropyInstance, a: Subset) -> f64 {
    e.entropy(a)
}

/// Tagged union of the supported families.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    Cut(CutInstance),
    Coverage(CoverageInstance),
    Modular(ModularInstance),
    Entropy(EntropyInstance),
    /// `A ↦ f(A) − h(A)`.
    Difference(Box<Family>, Box<Family>),
}

impl Family {
    pub fn n(&self) -> usize {
        match self {
            Family::Cut(c) => c.n(),
            Family::Coverage(c) => c.n(),
            Family::Modular(m) => m.n(),
            Family::Entropy(e) => e.n(),
            Family::Difference(f, _) => f.n(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Cut(_) => "cut",
            Family::Coverage(_) => "coverage",
            Family::Modular(_) => "modular",
            Family::Entropy(_) => "entropy",
            Family::Difference(..) => "difference",
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        match self {
            Family::Modular(m) if m.weights.iter().any(|w| !w.is_finite()) => {
                Err(domain("modular weights must be finite"))
            }
            Family::Difference(f, h) => {
                if f.n() != h.n() {
                    return Err(domain(format!(
                        "difference components have sizes {} and {}",
                        f.n(),
                        h.n()
                    )));
                }
                f.validate()?;
                h.validate()
            }
            _ => Ok(()),
        }
    }

    pub fn raw_value(&self, a: Subset) -> f64 {
        match self {
            Family::Cut(c) => c.value(a),
            Family::Coverage(c) => c.value(a),
            Family::Modular(m) => m.value(a),
            Family::Entropy(e) => e.entropy(a),
            Family::Difference(f, h) => f.raw_value(a) - h.raw_value(a),
        }
    }
}

/// Graph topologies for synthetic max-cut instances.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GraphFamily {
    /// Uniform random labelled spanning tree on `n` vertices.
    Tree { n: usize },
    /// `rows × cols` four-neighbour lattice.
    Grid { rows: usize, cols: usize },
    /// Erdős–Rényi `G(n, p)`.
    Random { n: usize, p: f64 },
}

/// Generates a cut instance with i.i.d. weights uniform on `(0, 1]`.
pub fn gen_instance(family: GraphFamily, seed: u64) -> Result<CutInstance> {
    let mut rng = rng_from_seed(seed);
    let (n, pairs) = match family {
        GraphFamily::Tree { n } => {
            if !(2..=MAX_ELEMENTS).contains(&n) {
                return Err(domain(format!("tree needs 2..=128 vertices, got {n}")));
            }
            (n, random_tree_edges(n, &mut rng))
        }
        GraphFamily::Grid { rows, cols } => {
            if rows < 2 || cols < 2 || rows * cols > MAX_ELEMENTS {
                return Err(domain(format!(
                    "grid needs rows, cols >= 2 and at most 128 cells, got {rows}x{cols}"
                )));
            }
            (rows * cols, grid_edges(rows, cols))
        }
        GraphFamily::Random { n, p } => {
            if !(2..=MAX_ELEMENTS).contains(&n) {
                return Err(domain(format!(
                    "random graph needs 2..=128 vertices, got {n}"
                )));
            }
            if !(p > 0.0 && p <= 1.0) {
                return Err(domain(format!("edge probability {p} not in (0, 1]")));
            }
            let mut pairs = Vec::new();
            for i in 0..n {
                for j in i + 1..n {
                    if rng.gen::<f64>() < p {
                        pairs.push((i, j));
                    }
                }
            }
            (n, pairs)
        }
    };
    let edges = pairs
        .into_iter()
        .map(|(i, j)| (i, j, positive_weight(&mut rng)))
        .collect();
    CutInstance::new(n, edges)
}

fn grid_edges(rows: usize, cols: usize) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for r in 0..rows {
        for c in 0..cols {
            let v = r * cols + c;
            if c + 1 < cols {
                edges.push((v, v + 1));
            }
            if r + 1 < rows {
                edges.push((v, v + cols));
            }
        }
    }
    edges
}

/// Decodes a uniformly random Prüfer sequence; edges come out with `i < j`,
/// sorted.
pub fn random_tree_edges<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<(usize, usize)> {
    if n < 2 {
        return Vec::new();
    }
    if n == 2 {
        return vec![(0, 1)];
    }
    let code: Vec<usize> = (0..n - 2).map(|_| rng.gen_range(0..n)).collect();
    let mut degree = vec![1usize; n];
    for &v in &code {
        degree[v] += 1;
    }
    let mut leaves: BinaryHeap<Reverse<usize>> =
        (0..n).filter(|&v| degree[v] == 1).map(Reverse).collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &v in &code {
        let Reverse(leaf) = leaves.pop().expect("Prüfer decoding always has a leaf");
        edges.push((leaf.min(v), leaf.max(v)));
        degree[v] -= 1;
        if degree[v] == 1 {
            leaves.push(Reverse(v));
        }
    }
    let Reverse(a) = leaves.pop().unwrap();
    let Reverse(b) = leaves.pop().unwrap();
    edges.push((a.min(b), a.max(b)));
    edges.sort_unstable();
    edges
}

/// Random coverage instance: `n` sets over a universe of `m` items, each item
/// joining each set with probability `density`, weights uniform on `(0, 1]`.
pub fn random_coverage<R: Rng + ?Sized>(
    n: usize,
    m: usize,
    density: f64,
    rng: &mut R,
) -> Result<CoverageInstance> {
    let weights = (0..m).map(|_| positive_weight(rng)).collect();
    let sets = (0..n)
        .map(|_| (0..m).filter(|_| rng.gen::<f64>() < density).collect())
        .collect();
    CoverageInstance::new(weights, sets)
}

/// Random joint distribution over `n` binary variables (flat Dirichlet).
pub fn random_entropy<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<EntropyInstance> {
    if n == 0 || n > 16 {
        return Err(domain(format!(
            "random entropy instance needs 1..=16 variables, got {n}"
        )));
    }
    let mut p: Vec<f64> = (0..1usize << n)
        .map(|_| -(1.0 - rng.gen::<f64>()).ln())
        .collect();
    let total: f64 = p.iter().sum();
    for x in &mut p {
        *x /= total;
    }
    // Fold any residual rounding into the largest cell.
    let residual = 1.0 - p.iter().sum::<f64>();
    let argmax = (0..p.len()).max_by(|&a, &b| p[a].total_cmp(&p[b])).unwrap();
    p[argmax] += residual;
    EntropyInstance::new(vec![2; n], p)
}

/// `G(n, p)` cut instance drawn from an existing generator state.
pub fn random_cut<R: Rng + ?Sized>(n: usize, p: f64, rng: &mut R) -> Result<CutInstance> {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((i, j, positive_weight(rng)));
            }
        }
    }
    CutInstance::new(n, edges)
}
