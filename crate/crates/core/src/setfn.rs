//! Set-function oracles, exhaustive property checks and Edmonds' greedy
//! algorithm over the base polytope.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::error::{domain, Error, Result};
use crate::instances::Family;
use crate::subset::{Subset, MAX_ELEMENTS};

/// Comparison slack for quantities that are exact in principle.
pub const EPS_NUM: f64 = 1e-9;

/// Largest ground set accepted by the exhaustive checks (16384 subsets).
pub const EXHAUSTIVE_LIMIT: usize = 14;

/// Ground sets up to this size memoize evaluations by default.
pub const MEMO_DEFAULT_LIMIT: usize = 20;

/// Value oracle for a normalized set function on `{0, .., n-1}`.
///
/// Implementations must be deterministic and return `0` on the empty set.
pub trait SetFunction: Sync {
    fn n(&self) -> usize;

    fn value(&self, a: Subset) -> f64;

    fn ground(&self) -> Subset {
        Subset::full(self.n())
    }
}

impl<F: SetFunction + ?Sized> SetFunction for &F {
    fn n(&self) -> usize {
        (**self).n()
    }

    fn value(&self, a: Subset) -> f64 {
        (**self).value(a)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GroundSet {
    n: usize,
}

impl GroundSet {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(domain("ground set must have at least one element"));
        }
        if n > MAX_ELEMENTS {
            return Err(Error::Capacity {
                what: "ground set size",
                got: n,
                limit: MAX_ELEMENTS,
            });
        }
        Ok(GroundSet { n })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn full(&self) -> Subset {
        Subset::full(self.n)
    }

    pub fn check(&self, a: Subset) -> Result<()> {
        if a.within(self.n) {
            Ok(())
        } else {
            Err(domain(format!(
                "subset {a} is not contained in a ground set of size {}",
                self.n
            )))
        }
    }
}

/// A concrete set function: a family payload, its normalization offset and
/// an optional evaluation cache.
#[derive(Debug)]
pub struct SetFunctionInstance {
    ground: GroundSet,
    family: Family,
    offset: f64,
    memo: Option<Mutex<HashMap<u128, f64>>>,
}

impl SetFunctionInstance {
    /// Wraps a family; memoization is enabled for `n <= 20`.
    pub fn new(family: Family) -> Result<Self> {
        let n = family.n();
        Self::with_memo(family, n <= MEMO_DEFAULT_LIMIT)
    }

    pub fn with_memo(family: Family, memo: bool) -> Result<Self> {
        family.validate()?;
        let ground = GroundSet::new(family.n())?;
        let offset = family.raw_value(Subset::EMPTY);
        Ok(SetFunctionInstance {
            ground,
            family,
            offset,
            memo: memo.then(|| Mutex::new(HashMap::new())),
        })
    }

    pub fn ground_set(&self) -> GroundSet {
        self.ground
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn memoized(&self) -> bool {
        self.memo.is_some()
    }

    /// Checked evaluation of the normalized function.
    pub fn evaluate(&self, a: Subset) -> Result<f64> {
        self.ground.check(a)?;
        Ok(self.value(a))
    }
}

impl Clone for SetFunctionInstance {
    fn clone(&self) -> Self {
        SetFunctionInstance {
            ground: self.ground,
            family: self.family.clone(),
            offset: self.offset,
            memo: self.memo.as_ref().map(|_| Mutex::new(HashMap::new())),
        }
    }
}

impl SetFunction for SetFunctionInstance {
    fn n(&self) -> usize {
        self.ground.n
    }

    fn value(&self, a: Subset) -> f64 {
        if let Some(memo) = &self.memo {
            if let Some(&v) = memo.lock().unwrap().get(&a.bits()) {
                return v;
            }
            let v = self.family.raw_value(a) - self.offset;
            memo.lock().unwrap().insert(a.bits(), v);
            v
        } else {
            self.family.raw_value(a) - self.offset
        }
    }
}

/// A set function given by a closure; mostly useful for fixtures.
pub struct FnSetFunction<G> {
    n: usize,
    g: G,
}

impl<G: Fn(Subset) -> f64 + Sync> FnSetFunction<G> {
    pub fn new(n: usize, g: G) -> Self {
        FnSetFunction { n, g }
    }
}

impl<G: Fn(Subset) -> f64 + Sync> SetFunction for FnSetFunction<G> {
    fn n(&self) -> usize {
        self.n
    }

    fn value(&self, a: Subset) -> f64 {
        (self.g)(a)
    }
}

fn exhaustive_guard(n: usize, limit: usize) -> Result<()> {
    if n > limit {
        Err(Error::Capacity {
            what: "ground set size for exhaustive enumeration",
            got: n,
            limit,
        })
    } else {
        Ok(())
    }
}

/// Values of `f` on every subset, indexed by bitmask. Refuses `n > limit`.
pub fn value_table<F: SetFunction + ?Sized>(f: &F, limit: usize) -> Result<Vec<f64>> {
    let n = f.n();
    exhaustive_guard(n, limit)?;
    Ok((0..1u128 << n)
        .map(|b| f.value(Subset::from_bits(b)))
        .collect())
}

/// Exhaustive diminishing-returns check, `n <= 14`.
///
/// For each element `x` the minimum marginal gain over all subsets of `B` is
/// computed by a subset-min transform, so every pair `A ⊆ B` is covered
/// without enumerating pairs explicitly.
pub fn check_submodular<F: SetFunction + ?Sized>(f: &F) -> Result<bool> {
    let n = f.n();
    let table = value_table(f, EXHAUSTIVE_LIMIT)?;
    let size = 1usize << n;
    let mut low = vec![0.0; size];
    for x in 0..n {
        let xb = 1usize << x;
        for s in 0..size {
            if s & xb == 0 {
                low[s] = table[s | xb] - table[s];
            }
        }
        for j in (0..n).filter(|&j| j != x) {
            let jb = 1usize << j;
            for s in 0..size {
                if s & xb == 0 && s & jb != 0 {
                    let cand = low[s ^ jb];
                    if cand < low[s] {
                        low[s] = cand;
                    }
                }
            }
        }
        for s in 0..size {
            if s & xb == 0 {
                let gain = table[s | xb] - table[s];
                if low[s] < gain - EPS_NUM {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Exhaustive check of `F(A) <= F(B)` for all `A ⊆ B`, `n <= 14`.
pub fn check_monotone<F: SetFunction + ?Sized>(f: &F) -> Result<bool> {
    let n = f.n();
    let table = value_table(f, EXHAUSTIVE_LIMIT)?;
    let mut high = table.clone();
    for j in 0..n {
        let jb = 1usize << j;
        for s in 0..high.len() {
            if s & jb != 0 && high[s ^ jb] > high[s] {
                high[s] = high[s ^ jb];
            }
        }
    }
    Ok(high.iter().zip(&table).all(|(h, v)| *h <= v + EPS_NUM))
}

/// A point of the base polytope `B(H)`.
#[derive(Clone, Debug, PartialEq)]
pub struct BasePolytopePoint {
    pub s: Vec<f64>,
}

impl BasePolytopePoint {
    pub fn dot(&self, w: &[f64]) -> f64 {
        self.s.iter().zip(w).map(|(a, b)| a * b).sum()
    }

    /// `s(A) = Σ_{i∈A} s_i`.
    pub fn mass(&self, a: Subset) -> f64 {
        a.iter().map(|i| self.s[i]).sum()
    }
}

/// Greedy vertex of `B(H)` for the order `order`.
pub fn greedy_vertex<F: SetFunction + ?Sized>(h: &F, order: &[usize]) -> BasePolytopePoint {
    let mut s = vec![0.0; h.n()];
    let mut prefix = Subset::EMPTY;
    let mut prev = 0.0;
    for &i in order {
        prefix.insert(i);
        let cur = h.value(prefix);
        s[i] = cur - prev;
        prev = cur;
    }
    BasePolytopePoint { s }
}

/// Maximizes `w·s` over `B(H)` with Edmonds' greedy algorithm.
///
/// Elements are visited by decreasing weight; equal weights keep ascending
/// index order.
pub fn base_polytope_greedy<F: SetFunction + ?Sized>(
    h: &F,
    w: &[f64],
) -> Result<(BasePolytopePoint, f64)> {
    if w.len() != h.n() {
        return Err(Error::Dimension {
            expected: h.n(),
            got: w.len(),
        });
    }
    if w.iter().any(|x| !x.is_finite()) {
        return Err(domain("greedy weights must be finite"));
    }
    let mut order: Vec<usize> = (0..h.n()).collect();
    order.sort_by(|&a, &b| w[b].total_cmp(&w[a]));
    let point = greedy_vertex(h, &order);
    let value = point.dot(w);
    Ok((point, value))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{CutInstance, ModularInstance};

    fn triangle() -> SetFunctionInstance {
        CutInstance::new(3, vec![(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)])
            .unwrap()
            .into_instance()
            .unwrap()
    }

    #[test]
    fn evaluate_normalizes_and_checks_range() {
        let f = triangle();
        assert_eq!(f.evaluate(Subset::EMPTY).unwrap(), 0.0);
        assert_eq!(f.evaluate(Subset::from([0])).unwrap(), 2.0);
        assert!(matches!(
            f.evaluate(Subset::from([3])),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn square_of_cardinality_is_not_submodular() {
        let f = FnSetFunction::new(3, |a: Subset| (a.len() * a.len()) as f64);
        assert!(!check_submodular(&f).unwrap());
        assert!(check_monotone(&f).unwrap());
    }

    #[test]
    fn monotonicity_examples() {
        assert!(!check_monotone(&triangle()).unwrap());
        let zero = FnSetFunction::new(4, |_| 0.0);
        assert!(check_monotone(&zero).unwrap());
        assert!(check_submodular(&zero).unwrap());
    }

    #[test]
    fn exhaustive_checks_refuse_large_ground_sets() {
        let f = FnSetFunction::new(15, |a: Subset| a.len() as f64);
        assert!(matches!(check_submodular(&f), Err(Error::Capacity { .. })));
        assert!(matches!(check_monotone(&f), Err(Error::Capacity { .. })));
    }

    #[test]
    fn modular_is_submodular() {
        let f = ModularInstance::new(vec![1.5, -2.0, 0.25, 4.0])
            .into_instance()
            .unwrap();
        assert!(check_submodular(&f).unwrap());
    }

    #[test]
    fn greedy_examples() {
        let h = ModularInstance::new(vec![3.0, 1.0])
            .into_instance()
            .unwrap();
        let (s, v) = base_polytope_greedy(&h, &[0.2, 0.9]).unwrap();
        assert_eq!(s.s, vec![3.0, 1.0]);
        assert!((v - 1.5).abs() < 1e-12);

        let edge = CutInstance::new(2, vec![(0, 1, 1.0)])
            .unwrap()
            .into_instance()
            .unwrap();
        let (s, v) = base_polytope_greedy(&edge, &[0.9, 0.2]).unwrap();
        assert_eq!(s.s, vec![1.0, -1.0]);
        // Lovász extension of a unit edge cut is |y0 - y1|.
        assert!((v - (0.9f64 - 0.2).abs()).abs() < 1e-12);
        let (_, v) = base_polytope_greedy(&edge, &[0.5, 0.5]).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn greedy_rejects_bad_weights() {
        let h = triangle();
        assert!(matches!(
            base_polytope_greedy(&h, &[1.0]),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn memo_does_not_change_values() {
        let f = triangle();
        assert!(f.memoized());
        let plain = SetFunctionInstance::with_memo(f.family().clone(), false).unwrap();
        for b in 0..8u128 {
            let a = Subset::from_bits(b);
            assert_eq!(f.value(a).to_bits(), plain.value(a).to_bits());
            assert_eq!(f.value(a).to_bits(), f.value(a).to_bits());
        }
    }
}
