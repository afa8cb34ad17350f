//! Reference maximizers: exhaustive search, double greedy and local search.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::instances::rng_from_seed;
use crate::setfn::{SetFunction, EPS_NUM};
use crate::subset::Subset;

/// Largest ground set accepted by [`brute_force_max`].
pub const BRUTE_FORCE_LIMIT: usize = 22;

/// Default `ε` of [`local_search`].
pub const LOCAL_SEARCH_EPSILON: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Maximum {
    pub value: f64,
    pub set: Subset,
}

/// Exhaustive maximum; ties go to the smallest bitmask.
pub fn brute_force_max<F: SetFunction + ?Sized>(f: &F) -> Result<Maximum> {
    let n = f.n();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::Capacity {
            what: "brute-force ground set",
            got: n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let mut best = Maximum {
        value: f.value(Subset::EMPTY),
        set: Subset::EMPTY,
    };
    for bits in 1..(1u128 << n) {
        let a = Subset::from_bits(bits);
        let v = f.value(a);
        if v > best.value {
            best = Maximum { value: v, set: a };
        }
    }
    Ok(best)
}

/// Evaluates `f`, rejecting negative values.
fn nonnegative<F: SetFunction + ?Sized>(f: &F, a: Subset) -> Result<f64> {
    let v = f.value(a);
    if v < -EPS_NUM {
        return Err(Error::NegativeValue {
            subset: a,
            value: v,
        });
    }
    Ok(v)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DoubleGreedyMode {
    /// Include `i` iff `a_i >= b_i`.
    Deterministic,
    /// Include `i` with probability `a_i⁺ / (a_i⁺ + b_i⁺)`, and surely when
    /// both are zero.
    Randomized,
}

/// One pass over `0..n` keeping `X ⊆ Y`, with `a_i = F(X ∪ i) − F(X)` and
/// `b_i = F(Y ∖ i) − F(Y)`.
pub fn double_greedy<F: SetFunction + ?Sized>(
    f: &F,
    mode: DoubleGreedyMode,
    seed: u64,
) -> Result<Maximum> {
    let n = f.n();
    let mut rng = rng_from_seed(seed);
    let mut x = Subset::EMPTY;
    let mut y = Subset::full(n);
    let mut fx = nonnegative(f, x)?;
    let mut fy = nonnegative(f, y)?;
    for i in 0..n {
        let fxi = nonnegative(f, x.with(i))?;
        let fyi = nonnegative(f, y.without(i))?;
        let a = fxi - fx;
        let b = fyi - fy;
        let include = match mode {
            DoubleGreedyMode::Deterministic => a >= b,
            DoubleGreedyMode::Randomized => {
                let (ap, bp) = (a.max(0.0), b.max(0.0));
                let u: f64 = rng.gen();
                ap + bp == 0.0 || u < ap / (ap + bp)
            }
        };
        if include {
            x = x.with(i);
            fx = fxi;
        } else {
            y = y.without(i);
            fy = fyi;
        }
    }
    Ok(Maximum { value: fx, set: x })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LocalSearchResult {
    pub best: Maximum,
    /// Improving moves applied.
    pub moves: usize,
    /// Whether the move cap stopped the search before a local optimum.
    pub capped: bool,
}

/// Generous cap on improving moves for ground set size `n`.
pub fn local_search_move_cap(n: usize, epsilon: f64) -> usize {
    let n2 = (n * n).max(1) as f64;
    (1000.0 * n2 / epsilon).min(1e9) as usize + 1000
}

/// Add/remove local search from the best singleton. A move is applied when
/// it improves `F` by a factor of at least `1 + ε/n²`; moves are scanned in
/// an order reshuffled after every improvement. Returns the better of the
/// local optimum `S` and its complement.
pub fn local_search<F: SetFunction + ?Sized>(
    f: &F,
    epsilon: f64,
    seed: u64,
) -> Result<LocalSearchResult> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(crate::error::domain("local search needs ε > 0"));
    }
    let n = f.n();
    let mut rng = rng_from_seed(seed);
    let mut s = Subset::singleton(0);
    let mut fs = nonnegative(f, s)?;
    for i in 1..n {
        let v = nonnegative(f, Subset::singleton(i))?;
        if v > fs {
            s = Subset::singleton(i);
            fs = v;
        }
    }
    let factor = 1.0 + epsilon / (n * n) as f64;
    let cap = local_search_move_cap(n, epsilon);
    let mut order: Vec<usize> = (0..n).collect();
    let mut moves = 0;
    let mut capped = false;
    'search: loop {
        order.shuffle(&mut rng);
        for &i in &order {
            let t = if s.contains(i) {
                s.without(i)
            } else {
                s.with(i)
            };
            let ft = nonnegative(f, t)?;
            if ft > factor * fs {
                s = t;
                fs = ft;
                moves += 1;
                if moves >= cap {
                    capped = true;
                    break 'search;
                }
                continue 'search;
            }
        }
        break;
    }
    let complement = Subset::full(n).difference(s);
    let fc = nonnegative(f, complement)?;
    let best = if fc > fs {
        Maximum {
            value: fc,
            set: complement,
        }
    } else {
        Maximum { value: fs, set: s }
    };
    Ok(LocalSearchResult {
        best,
        moves,
        capped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{CutInstance, ModularInstance};
    use crate::setfn::FnSetFunction;

    fn triangle() -> CutInstance {
        CutInstance::new(3, vec![(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap()
    }

    fn cut(n: usize, edges: &[(usize, usize)]) -> crate::SetFunctionInstance {
        CutInstance::new(n, edges.iter().map(|&(i, j)| (i, j, 1.0)).collect())
            .unwrap()
            .into_instance()
            .unwrap()
    }

    #[test]
    fn brute_force_examples() {
        let f = triangle().into_instance().unwrap();
        assert_eq!(
            brute_force_max(&f).unwrap(),
            Maximum {
                value: 2.0,
                set: Subset::singleton(0)
            }
        );
        let m = ModularInstance::new(vec![1.0, -2.0, 3.0])
            .into_instance()
            .unwrap();
        assert_eq!(
            brute_force_max(&m).unwrap(),
            Maximum {
                value: 4.0,
                set: Subset::from([0, 2])
            }
        );
        let z = FnSetFunction::new(5, |_| 0.0);
        assert_eq!(
            brute_force_max(&z).unwrap(),
            Maximum {
                value: 0.0,
                set: Subset::EMPTY
            }
        );
        let big = FnSetFunction::new(23, |_| 0.0);
        assert!(matches!(brute_force_max(&big), Err(Error::Capacity { .. })));
    }

    #[test]
    fn double_greedy_examples() {
        let f = triangle().into_instance().unwrap();
        let r = double_greedy(&f, DoubleGreedyMode::Deterministic, 0).unwrap();
        assert_eq!(r.value, 2.0);
        assert_eq!(r.set, Subset::from([0, 2]));
        let edge = cut(2, &[(0, 1)]);
        assert_eq!(
            double_greedy(&edge, DoubleGreedyMode::Deterministic, 0)
                .unwrap()
                .value,
            1.0
        );
        let z = FnSetFunction::new(4, |_| 0.0);
        for mode in [
            DoubleGreedyMode::Deterministic,
            DoubleGreedyMode::Randomized,
        ] {
            assert_eq!(double_greedy(&z, mode, 3).unwrap().value, 0.0);
        }
    }

    #[test]
    fn randomized_double_greedy_is_seeded() {
        let f = triangle().into_instance().unwrap();
        let a = double_greedy(&f, DoubleGreedyMode::Randomized, 9).unwrap();
        let b = double_greedy(&f, DoubleGreedyMode::Randomized, 9).unwrap();
        assert_eq!(a, b);
        let mean: f64 = (0..1000)
            .map(|s| {
                double_greedy(&f, DoubleGreedyMode::Randomized, s)
                    .unwrap()
                    .value
            })
            .sum::<f64>()
            / 1000.0;
        assert!((1.0..=2.0).contains(&mean), "{mean}");
    }

    #[test]
    fn negative_values_are_rejected() {
        let m = ModularInstance::new(vec![1.0, -2.0])
            .into_instance()
            .unwrap();
        for r in [
            double_greedy(&m, DoubleGreedyMode::Deterministic, 0).map(|r| r.value),
            local_search(&m, 0.01, 0).map(|r| r.best.value),
        ] {
            match r {
                Err(Error::NegativeValue { value, .. }) => assert!(value < 0.0),
                other => panic!("{other:?}"),
            }
        }
    }

    #[test]
    fn local_search_examples() {
        let f = triangle().into_instance().unwrap();
        assert_eq!(local_search(&f, 0.01, 0).unwrap().best.value, 2.0);
        let path = cut(3, &[(0, 1), (1, 2)]);
        let r = local_search(&path, 0.01, 0).unwrap();
        assert_eq!(r.best.value, 2.0);
        assert!(!r.capped);
        let z = FnSetFunction::new(3, |_| 0.0);
        assert_eq!(local_search(&z, 0.01, 0).unwrap().best.value, 0.0);
        assert!(local_search(&z, 0.0, 0).is_err());
    }
}
