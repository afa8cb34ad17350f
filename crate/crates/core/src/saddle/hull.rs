//! Linear algebra of the inner problem on the convex hull of vertices.
//!
//! With `x = (η, z, λ)` and `y ∈ [0,1]^{D_k}` the Lagrangian is
//! `L(x, y) = Σ_t η_t c_t·y + Σ_r z_r (b_r + M_r·y) + λ (m − Σ_i y_i)`,
//! where `c_t` holds the coefficients of `y ↦ P(ν_t, y)`, the rows `(M_r, b_r)` are the
//! local-consistency inequalities and the last term is the optional
//! cardinality budget. Maximizing over the box gives
//! `Q(x) = b·z + λm + Σ_B max(a_B, 0)` with `a = Kᵀx`.

use std::collections::BTreeMap;

use super::oracle::expanded_terms;
use crate::graph::NuVector;
use crate::polytope::CliqueIndex;

/// Sparse row: `(coordinate, coefficient)`.
pub type SparseRow = Vec<(u32, f64)>;

/// A vertex of the hull: coefficient vector `ν` and, for differences, a
/// base-polytope point `s` of the subtracted function.
#[derive(Clone, Debug, PartialEq)]
pub struct Vertex {
    pub nu: NuVector,
    pub s: Option<Vec<f64>>,
}

/// Cost of a vertex over `D_k` coordinates: the coefficients of
/// `y ↦ P(ν, y)`, minus `s_i` on singletons. Zero entries of `s` are skipped.
pub fn vertex_cost(idx: &CliqueIndex, mob: &[f64], v: &Vertex) -> SparseRow {
    let mut dense: BTreeMap<u32, f64> = BTreeMap::new();
    for (p, val) in expanded_terms(idx, mob, &v.nu) {
        *dense.entry(p as u32).or_insert(0.0) += val;
    }
    let mut row: SparseRow = dense.into_iter().filter(|e| e.1 != 0.0).collect();
    if let Some(s) = &v.s {
        for (i, &si) in s.iter().enumerate() {
            if si == 0.0 {
                continue;
            }
            let p = idx.singleton(i) as u32;
            match row.iter_mut().find(|e| e.0 == p) {
                Some(e) => e.1 -= si,
                None => row.push((p, -si)),
            }
        }
        row.sort_by_key(|e| e.0);
    }
    row
}

pub fn sparse_dot(row: &[(u32, f64)], y: &[f64]) -> f64 {
    row.iter().map(|&(p, v)| v * y[p as usize]).sum()
}

/// Constraint rows in compressed form.
#[derive(Clone, Debug)]
pub struct Constraints {
    pub ptr: Vec<usize>,
    pub col: Vec<u32>,
    pub val: Vec<f64>,
    pub constant: Vec<f64>,
}

impl Constraints {
    pub fn from_index(idx: &CliqueIndex) -> Self {
        let per = 1usize << (idx.k() + 1);
        let mut ptr = vec![0];
        let mut col = Vec::new();
        let mut val = Vec::new();
        let mut constant = Vec::with_capacity(idx.num_rows());
        for d in 0..idx.num_top() {
            for c in 0..per {
                let (b, terms) = idx.row(d, c);
                constant.push(b);
                for (p, s) in terms {
                    col.push(p as u32);
                    val.push(s);
                }
                ptr.push(col.len());
            }
        }
        Constraints {
            ptr,
            col,
            val,
            constant,
        }
    }

    pub fn len(&self) -> usize {
        self.constant.len()
    }

    pub fn is_empty(&self) -> bool {
        self.constant.is_empty()
    }

    pub fn row_dot(&self, r: usize, y: &[f64]) -> f64 {
        let mut acc = 0.0;
        for e in self.ptr[r]..self.ptr[r + 1] {
            acc += self.val[e] * y[self.col[e] as usize];
        }
        acc
    }
}

/// Dual variables `(η, z, λ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DualPoint {
    pub eta: Vec<f64>,
    pub z: Vec<f64>,
    pub lambda: f64,
}

impl DualPoint {
    pub fn zeros(vertices: usize, rows: usize) -> Self {
        DualPoint {
            eta: vec![0.0; vertices],
            z: vec![0.0; rows],
            lambda: 0.0,
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.eta.iter().map(|v| v * v).sum::<f64>()
            + self.z.iter().map(|v| v * v).sum::<f64>()
            + self.lambda * self.lambda
    }

    pub fn sub(&self, other: &DualPoint) -> DualPoint {
        DualPoint {
            eta: self
                .eta
                .iter()
                .zip(&other.eta)
                .map(|(a, b)| a - b)
                .collect(),
            z: self.z.iter().zip(&other.z).map(|(a, b)| a - b).collect(),
            lambda: self.lambda - other.lambda,
        }
    }

    /// `self += w · other`.
    pub fn add_scaled(&mut self, w: f64, other: &DualPoint) {
        for (a, b) in self.eta.iter_mut().zip(&other.eta) {
            *a += w * b;
        }
        for (a, b) in self.z.iter_mut().zip(&other.z) {
            *a += w * b;
        }
        self.lambda += w * other.lambda;
    }

    pub fn scale(&mut self, w: f64) {
        self.eta.iter_mut().for_each(|v| *v *= w);
        self.z.iter_mut().for_each(|v| *v *= w);
        self.lambda *= w;
    }
}

/// `K y` split by block (without the constants `b` and `m`).
#[derive(Clone, Debug, PartialEq)]
pub struct PrimalImage {
    /// `c_t · y` per vertex.
    pub vert: Vec<f64>,
    /// `M_r · y` per constraint row.
    pub rows: Vec<f64>,
    /// `−Σ_i y_i`.
    pub budget: f64,
}

impl PrimalImage {
    fn zeros(vertices: usize, rows: usize) -> Self {
        PrimalImage {
            vert: vec![0.0; vertices],
            rows: vec![0.0; rows],
            budget: 0.0,
        }
    }

    pub fn add_scaled(&mut self, w: f64, other: &PrimalImage) {
        for (a, b) in self.vert.iter_mut().zip(&other.vert) {
            *a += w * b;
        }
        for (a, b) in self.rows.iter_mut().zip(&other.rows) {
            *a += w * b;
        }
        self.budget += w * other.budget;
    }

    pub fn scale(&mut self, w: f64) {
        self.vert.iter_mut().for_each(|v| *v *= w);
        self.rows.iter_mut().for_each(|v| *v *= w);
        self.budget *= w;
    }
}

/// The inner problem for a fixed list of vertices.
#[derive(Clone, Debug)]
pub struct HullProblem<'a> {
    pub idx: &'a CliqueIndex,
    pub cons: &'a Constraints,
    pub costs: Vec<SparseRow>,
    pub budget: Option<f64>,
    /// `max_B |F(B)|` or larger, the natural scale of the objective.
    pub scale: f64,
}

impl<'a> HullProblem<'a> {
    pub fn dim(&self) -> usize {
        self.idx.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.costs.len()
    }

    /// `a = Kᵀ x`.
    pub fn kt(&self, x: &DualPoint) -> Vec<f64> {
        let mut a = vec![0.0; self.dim()];
        for (row, &eta) in self.costs.iter().zip(&x.eta) {
            if eta != 0.0 {
                for &(p, v) in row {
                    a[p as usize] += eta * v;
                }
            }
        }
        let c = self.cons;
        for (r, &z) in x.z.iter().enumerate() {
            if z != 0.0 {
                for e in c.ptr[r]..c.ptr[r + 1] {
                    a[c.col[e] as usize] += z * c.val[e];
                }
            }
        }
        if self.budget.is_some() && x.lambda != 0.0 {
            for v in &mut a[..self.idx.n()] {
                *v -= x.lambda;
            }
        }
        a
    }

    /// `K y`.
    pub fn k(&self, y: &[f64]) -> PrimalImage {
        let mut out = PrimalImage::zeros(self.num_vertices(), self.cons.len());
        for (t, row) in self.costs.iter().enumerate() {
            out.vert[t] = sparse_dot(row, y);
        }
        for r in 0..self.cons.len() {
            out.rows[r] = self.cons.row_dot(r, y);
        }
        if self.budget.is_some() {
            out.budget = -y[..self.idx.n()].iter().sum::<f64>();
        }
        out
    }

    /// Constant part `b·z + λm`.
    pub fn offset(&self, x: &DualPoint) -> f64 {
        let mut acc: f64 =
            x.z.iter()
                .zip(&self.cons.constant)
                .map(|(z, b)| z * b)
                .sum();
        if let Some(m) = self.budget {
            acc += x.lambda * m;
        }
        acc
    }

    /// `Q(x)` given `a = Kᵀx`.
    pub fn q_from(&self, x: &DualPoint, a: &[f64]) -> f64 {
        self.offset(x) + a.iter().map(|v| v.max(0.0)).sum::<f64>()
    }

    pub fn q(&self, x: &DualPoint) -> f64 {
        let a = self.kt(x);
        self.q_from(x, &a)
    }

    /// Gradient of `L` in `x` at `y`, i.e. `K y + (0, b, m)`.
    pub fn grad_x(&self, ky: &PrimalImage) -> DualPoint {
        DualPoint {
            eta: ky.vert.clone(),
            z: ky
                .rows
                .iter()
                .zip(&self.cons.constant)
                .map(|(v, b)| v + b)
                .collect(),
            lambda: match self.budget {
                Some(m) => m + ky.budget,
                None => 0.0,
            },
        }
    }

    /// Violation of the `y`-side constraints, Euclidean norm.
    pub fn infeasibility(&self, ky: &PrimalImage) -> f64 {
        let mut acc: f64 = ky
            .rows
            .iter()
            .zip(&self.cons.constant)
            .map(|(v, b)| (v + b).min(0.0).powi(2))
            .sum();
        if let Some(m) = self.budget {
            acc += (m + ky.budget).min(0.0).powi(2);
        }
        acc.sqrt()
    }

    /// `min_t c_t·y`: the hull objective at `y`.
    pub fn lower(&self, ky: &PrimalImage) -> f64 {
        ky.vert.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Projects `x` onto `Δ × R₊^R × R₊`.
    pub fn project(&self, x: &mut DualPoint) {
        x.eta = crate::polytope::project_simplex(&x.eta);
        x.z.iter_mut().for_each(|v| *v = v.max(0.0));
        x.lambda = if self.budget.is_some() {
            x.lambda.max(0.0)
        } else {
            0.0
        };
    }
}
