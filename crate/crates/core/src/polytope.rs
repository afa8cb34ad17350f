//! The clique index set `D_k`, the local polytope `N_k` and its integral
//! points, plus Euclidean projection onto the probability simplex.

use std::collections::HashMap;

use crate::error::{domain, Error, Result};
use crate::subset::{Subset, MAX_ELEMENTS};

/// Cap on the number of maximal cliques `C(n, k+1)`.
pub const MAX_TOP_CLIQUES: usize = 1_000_000;

/// Slack below which an `N_k` inequality counts as violated.
pub const FEASIBILITY_TOL: f64 = 1e-8;

/// Largest ground set for [`mk_membership`].
pub const MK_LIMIT: usize = 14;

/// All nonempty subsets of size at most `k + 1`, ordered by size and then
/// lexicographically. This order is the coordinate order of every vector
/// over `D_k`.
#[derive(Clone, Debug)]
pub struct CliqueIndex {
    n: usize,
    k: usize,
    subsets: Vec<Subset>,
    position: HashMap<u128, usize>,
    top_start: usize,
    /// Per maximal clique, positions of its nonempty local submasks
    /// `1..2^{k+1}`, flattened.
    local: Vec<u32>,
}

fn binomial(n: usize, r: usize) -> Option<usize> {
    if r > n {
        return Some(0);
    }
    let r = r.min(n - r);
    let mut acc: usize = 1;
    for i in 0..r {
        acc = acc.checked_mul(n - i)? / (i + 1);
    }
    Some(acc)
}

/// Size-`r` subsets of `0..n` in lexicographic order.
fn combinations(n: usize, r: usize) -> Vec<Subset> {
    let mut out = Vec::new();
    if r > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        out.push(idx.iter().copied().collect());
        let mut i = r;
        while i > 0 && idx[i - 1] == i - 1 + n - r {
            i -= 1;
        }
        if i == 0 {
            return out;
        }
        i -= 1;
        idx[i] += 1;
        for j in i + 1..r {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

impl CliqueIndex {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    pub fn subsets(&self) -> &[Subset] {
        &self.subsets
    }

    pub fn subset(&self, pos: usize) -> Subset {
        self.subsets[pos]
    }

    pub fn position(&self, c: Subset) -> Option<usize> {
        self.position.get(&c.bits()).copied()
    }

    /// Position of `{i}`; singletons come first.
    pub fn singleton(&self, i: usize) -> usize {
        i
    }

    /// The maximal cliques `D_k^max` (subsets of size `k + 1`).
    pub fn top(&self) -> &[Subset] {
        &self.subsets[self.top_start..]
    }

    pub fn num_top(&self) -> usize {
        self.subsets.len() - self.top_start
    }

    /// Number of inequalities of `N_k`: one per maximal clique and subset.
    pub fn num_rows(&self) -> usize {
        self.num_top() << (self.k + 1)
    }

    fn local_width(&self) -> usize {
        (1 << (self.k + 1)) - 1
    }

    /// Coordinate of local submask `m` (nonzero) of maximal clique `d`.
    pub fn local_position(&self, d: usize, m: usize) -> usize {
        self.local[d * self.local_width() + m - 1] as usize
    }

    /// Row `(d, c)` written as `constant + Σ sign · y[pos]`, where `c` is a
    /// local submask of maximal clique `d`. The constant carries `y_∅ = 1`.
    pub fn row(&self, d: usize, c: usize) -> (f64, Vec<(usize, f64)>) {
        let full = (1usize << (self.k + 1)) - 1;
        let mut constant = 0.0;
        let mut terms = Vec::new();
        let free = full & !c;
        // Supersets b = c | extra for every extra ⊆ free.
        let mut extra = 0usize;
        loop {
            let b = c | extra;
            let sign = if extra.count_ones().is_multiple_of(2) {
                1.0
            } else {
                -1.0
            };
            if b == 0 {
                constant += sign;
            } else {
                terms.push((self.local_position(d, b), sign));
            }
            if extra == free {
                break;
            }
            extra = (extra.wrapping_sub(free)) & free;
        }
        (constant, terms)
    }

    /// Translates a local submask of maximal clique `d` into a subset.
    pub fn local_subset(&self, d: usize, m: usize) -> Subset {
        let members: Vec<usize> = self.top()[d].iter().collect();
        members
            .iter()
            .enumerate()
            .filter(|(bit, _)| m >> bit & 1 == 1)
            .map(|(_, &v)| v)
            .collect()
    }
}

/// Builds `D_k` for `1 <= k <= n − 1`.
pub fn enumerate_dk(n: usize, k: usize) -> Result<CliqueIndex> {
    if !(2..=MAX_ELEMENTS).contains(&n) {
        return Err(domain(format!("clique index needs 2 <= n <= 128, got {n}")));
    }
    if k == 0 || k >= n {
        return Err(domain(format!(
            "treewidth {k} must satisfy 1 <= k <= n - 1 = {}",
            n - 1
        )));
    }
    let top = binomial(n, k + 1).unwrap_or(usize::MAX);
    if top > MAX_TOP_CLIQUES {
        return Err(Error::Capacity {
            what: "number of maximal cliques C(n, k+1)",
            got: top,
            limit: MAX_TOP_CLIQUES,
        });
    }
    let mut subsets = Vec::new();
    let mut top_start = 0;
    for size in 1..=k + 1 {
        if size == k + 1 {
            top_start = subsets.len();
        }
        subsets.extend(combinations(n, size));
    }
    let position: HashMap<u128, usize> = subsets
        .iter()
        .enumerate()
        .map(|(p, s)| (s.bits(), p))
        .collect();
    let width = (1usize << (k + 1)) - 1;
    let mut local = Vec::with_capacity((subsets.len() - top_start) * width);
    for d in &subsets[top_start..] {
        let members: Vec<usize> = d.iter().collect();
        for m in 1..=width {
            let s: Subset = members
                .iter()
                .enumerate()
                .filter(|(bit, _)| m >> bit & 1 == 1)
                .map(|(_, &v)| v)
                .collect();
            local.push(position[&s.bits()] as u32);
        }
    }
    Ok(CliqueIndex {
        n,
        k,
        subsets,
        position,
        top_start,
        local,
    })
}

/// A vector over `D_k` coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct PseudoMarginal {
    pub y: Vec<f64>,
}

impl PseudoMarginal {
    pub fn zeros(idx: &CliqueIndex) -> Self {
        PseudoMarginal {
            y: vec![0.0; idx.len()],
        }
    }

    /// `y_C = Π_{i∈C} x_i` for `x = 1_A`.
    pub fn from_set(idx: &CliqueIndex, a: Subset) -> Self {
        PseudoMarginal {
            y: idx
                .subsets()
                .iter()
                .map(|c| if c.is_subset_of(a) { 1.0 } else { 0.0 })
                .collect(),
        }
    }

    pub fn singletons<'a>(&'a self, idx: &CliqueIndex) -> &'a [f64] {
        &self.y[..idx.n()]
    }

    pub fn in_box(&self) -> bool {
        self.y
            .iter()
            .all(|v| *v >= -FEASIBILITY_TOL && *v <= 1.0 + FEASIBILITY_TOL)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub d: Subset,
    pub c: Subset,
    pub slack: f64,
}

fn check_dim(idx: &CliqueIndex, y: &PseudoMarginal) -> Result<()> {
    if y.y.len() != idx.len() {
        return Err(Error::Dimension {
            expected: idx.len(),
            got: y.y.len(),
        });
    }
    Ok(())
}

/// Signed local-consistency sum `Σ_{C⊆B⊆D} (−1)^{|B∖C|} y_B` for row
/// `(d, c)`.
pub fn row_value(idx: &CliqueIndex, y: &[f64], d: usize, c: usize) -> f64 {
    let (constant, terms) = idx.row(d, c);
    constant + terms.iter().map(|&(p, s)| s * y[p]).sum::<f64>()
}

/// Every `N_k` inequality with slack below `−1e-8`, in (D, C) order.
pub fn nk_violations(idx: &CliqueIndex, y: &PseudoMarginal) -> Result<Vec<Violation>> {
    check_dim(idx, y)?;
    let mut out = Vec::new();
    let rows_per = 1usize << (idx.k() + 1);
    for d in 0..idx.num_top() {
        for c in 0..rows_per {
            let slack = row_value(idx, &y.y, d, c);
            if slack < -FEASIBILITY_TOL {
                out.push(Violation {
                    d: idx.top()[d],
                    c: idx.local_subset(d, c),
                    slack,
                });
            }
        }
    }
    Ok(out)
}

/// Whether an integral `y` is the product vector of some `x ∈ {0,1}^n`.
///
/// Integral points are determined by their singleton coordinates, so the
/// only candidate is `x_i = y_{i}`.
pub fn mk_membership(idx: &CliqueIndex, y: &PseudoMarginal) -> Result<bool> {
    check_dim(idx, y)?;
    if idx.n() > MK_LIMIT {
        return Err(Error::Capacity {
            what: "ground set size for marginal-polytope membership",
            got: idx.n(),
            limit: MK_LIMIT,
        });
    }
    if let Some(v) = y.y.iter().find(|v| **v != 0.0 && **v != 1.0) {
        return Err(domain(format!(
            "membership is only decided for integral points, found {v}"
        )));
    }
    let a: Subset = (0..idx.n()).filter(|&i| y.y[i] == 1.0).collect();
    Ok(PseudoMarginal::from_set(idx, a) == *y)
}

/// Euclidean projection onto `{η >= 0, Σ η = 1}` by sorting and
/// thresholding.
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    assert!(!v.is_empty(), "cannot project an empty vector");
    let mut sorted = v.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut cumulative = 0.0;
    let mut theta = 0.0;
    for (j, &u) in sorted.iter().enumerate() {
        cumulative += u;
        let t = (cumulative - 1.0) / (j + 1) as f64;
        if u - t > 0.0 {
            theta = t;
        }
    }
    let mut out: Vec<f64> = v.iter().map(|x| (x - theta).max(0.0)).collect();
    // Remove the rounding residue from the largest coordinate.
    let total: f64 = out.iter().sum();
    let argmax = (0..out.len())
        .max_by(|&a, &b| out[a].total_cmp(&out[b]))
        .unwrap();
    out[argmax] += 1.0 - total;
    if out[argmax] < 0.0 {
        out[argmax] = 0.0;
    }
    out
}
