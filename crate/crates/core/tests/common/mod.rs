//! Brute-force reference computations shared by the integration tests.
//! Nothing here calls the library's own enumeration or optimization code.

#![allow(dead_code)]

use rand_chacha::ChaCha8Rng;
use submax::instances::{random_coverage, random_cut, random_entropy};
use submax::subset::Subset;
use submax::{SetFunction, SetFunctionInstance};

pub fn all_sets(n: usize) -> impl Iterator<Item = Subset> {
    (0..1u128 << n).map(Subset::from_bits)
}

/// `max F(A)` over sets accepted by `keep`, ties to the smallest bitmask.
pub fn brute_max(f: &dyn SetFunction, keep: impl Fn(Subset) -> bool) -> (f64, Subset) {
    let mut best = (f64::NEG_INFINITY, Subset::EMPTY);
    for a in all_sets(f.n()).filter(|&a| keep(a)) {
        let v = f.value(a);
        if v > best.0 {
            best = (v, a);
        }
    }
    best
}

/// `Σ_{i∈A} F(A ∩ π_i ∪ {i}) − F(A ∩ π_i)` from explicit parent lists.
pub fn dag_bound_ref(f: &dyn SetFunction, parents: &[Vec<usize>], a: Subset) -> f64 {
    let mut total = 0.0;
    for (i, pi) in parents.iter().enumerate() {
        if !a.contains(i) {
            continue;
        }
        let pa: Subset = pi.iter().copied().filter(|&p| a.contains(p)).collect();
        total += f.value(pa.with(i)) - f.value(pa);
    }
    total
}

fn find(parent: &mut [usize], mut x: usize) -> usize {
    while parent[x] != x {
        parent[x] = parent[parent[x]];
        x = parent[x];
    }
    x
}

/// Every spanning tree of `K_n`, found by testing all `(n−1)`-edge subsets
/// for acyclicity.
pub fn spanning_trees_ref(n: usize) -> Vec<Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let mut out = Vec::new();
    let m = pairs.len();
    for mask in 0u64..1 << m {
        if mask.count_ones() as usize != n - 1 {
            continue;
        }
        let mut uf: Vec<usize> = (0..n).collect();
        let mut tree = Vec::with_capacity(n - 1);
        let mut acyclic = true;
        for (e, &(i, j)) in pairs.iter().enumerate() {
            if mask >> e & 1 == 0 {
                continue;
            }
            let (ri, rj) = (find(&mut uf, i), find(&mut uf, j));
            if ri == rj {
                acyclic = false;
                break;
            }
            uf[ri] = rj;
            tree.push((i, j));
        }
        if acyclic {
            out.push(tree);
        }
    }
    out
}

/// Random non-negative submodular instance; families rotate with `t`.
pub fn random_instance(n: usize, t: usize, rng: &mut ChaCha8Rng) -> SetFunctionInstance {
    let family = match t % 3 {
        0 => random_cut(n, 0.5, rng).and_then(|c| c.into_instance()),
        1 => random_coverage(n, 2 * n, 0.3, rng).and_then(|c| c.into_instance()),
        _ => random_entropy(n, rng).and_then(|e| e.into_instance()),
    };
    family.expect("generated instances are valid")
}

/// Every pairwise diminishing-returns inequality, checked on the value table.
pub fn is_submodular_ref(f: &dyn SetFunction, tol: f64) -> bool {
    let n = f.n();
    all_sets(n).all(|a| {
        (0..n).all(|i| {
            (i + 1..n).all(|j| {
                a.contains(i)
                    || a.contains(j)
                    || f.value(a.with(i)) + f.value(a.with(j))
                        >= f.value(a.with(i).with(j)) + f.value(a) - tol
            })
        })
    })
}
