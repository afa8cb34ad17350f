use super::*;
use crate::instances::{CutInstance, ModularInstance};
use crate::setfn::FnSetFunction;

fn triangle() -> CutInstance {
    CutInstance::new(3, vec![(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]).unwrap()
}

fn path_nu() -> NuVector {
    NuVector::from_tree(3, &[(0, 1), (1, 2)])
}

fn brute_max<F: SetFunction + ?Sized>(f: &F) -> f64 {
    Subset::full(f.n())
        .subsets()
        .map(|a| f.value(a))
        .fold(f64::NEG_INFINITY, f64::max)
}

#[test]
fn p_eval_examples() {
    let f = triangle().into_instance().unwrap();
    let idx = enumerate_dk(3, 1).unwrap();
    let ones = PseudoMarginal {
        y: vec![1.0; idx.len()],
    };
    assert_eq!(p_eval(&f, &idx, &path_nu(), &ones).unwrap(), 2.0);
    assert_eq!(
        p_eval(&f, &idx, &path_nu(), &PseudoMarginal::zeros(&idx)).unwrap(),
        0.0
    );

    let single = NuVector::from_entries(1, [(Subset::singleton(0), 1.0)]).unwrap();
    let mut y = PseudoMarginal::zeros(&idx);
    y.y[idx.singleton(0)] = 0.5;
    assert_eq!(p_eval(&f, &idx, &single, &y).unwrap(), 1.0);

    let short = PseudoMarginal { y: vec![0.0; 2] };
    assert!(matches!(
        p_eval(&f, &idx, &path_nu(), &short),
        Err(Error::Dimension { .. })
    ));
}

#[test]
fn q_eval_examples() {
    let f = triangle().into_instance().unwrap();
    let idx = enumerate_dk(3, 1).unwrap();
    let (q, a) = q_eval(&f, &idx, &path_nu(), &Multipliers::zeros(&idx), None).unwrap();
    // a = (2, 2, 2) on singletons, −2 on the two tree edges, 0 on {0,2}.
    assert_eq!(q, 6.0);
    assert_eq!(a.iter().filter(|v| **v != 0.0).count(), 5);

    let zero = NuVector::from_entries(1, []).unwrap();
    let (q, _) = q_eval(&f, &idx, &zero, &Multipliers::zeros(&idx), None).unwrap();
    assert_eq!(q, 0.0);

    let mut neg = Multipliers::zeros(&idx);
    neg.z[0] = -1.0;
    assert!(q_eval(&f, &idx, &path_nu(), &neg, None).is_err());
}

#[test]
fn q_eval_matches_grid_maximum() {
    // n = 2, single edge: compare the closed form against a dense grid over
    // the three coordinates, which contains the box vertices.
    let f = CutInstance::new(2, vec![(0, 1, 1.0)])
        .unwrap()
        .into_instance()
        .unwrap();
    let idx = enumerate_dk(2, 1).unwrap();
    let nu = NuVector::from_tree(2, &[(0, 1)]);
    let mut mult = Multipliers::zeros(&idx);
    for (r, z) in mult.z.iter_mut().enumerate() {
        *z = 0.25 * (r % 3) as f64;
    }
    let (q, _) = q_eval(&f, &idx, &nu, &mult, None).unwrap();
    let mob = mobius_on_index(&f, &idx);
    let grid = [0.0, 0.5, 1.0];
    let mut best = f64::NEG_INFINITY;
    for &y0 in &grid {
        for &y1 in &grid {
            for &y01 in &grid {
                let y = [y0, y1, y01];
                let mut l = bilinear(&idx, &mob, &nu, &y);
                for (r, z) in mult.z.iter().enumerate() {
                    let (d, c) = (r / 4, r % 4);
                    l += z * crate::polytope::row_value(&idx, &y, d, c);
                }
                best = best.max(l);
            }
        }
    }
    assert!((q - best).abs() < 1e-12, "{q} vs {best}");
}

#[test]
fn inner_hull_examples() {
    let f = triangle().into_instance().unwrap();
    let idx = enumerate_dk(3, 1).unwrap();
    for method in [InnerMethod::Subgradient, InnerMethod::PrimalDual] {
        let config = SolverConfig {
            inner_method: method,
            ..SolverConfig::default()
        };
        // The path bound peaks at A = {0, 2}: F({0}) + F({2}) = 4.
        let res = inner_solve_hull(&f, &idx, &[path_nu()], &config).unwrap();
        assert!((res.bound - 4.0).abs() <= 0.05, "{method:?}: {}", res.bound);
        assert!(res.bound >= 4.0 - 1e-9);

        let zero = NuVector::from_entries(1, []).unwrap();
        let res = inner_solve_hull(&f, &idx, &[zero], &config).unwrap();
        assert!(res.bound.abs() <= 1e-9);

        let g = ModularInstance::new(vec![1.0, 1.0])
            .into_instance()
            .unwrap();
        let idx2 = enumerate_dk(2, 1).unwrap();
        let star = NuVector::from_tree(2, &[(0, 1)]);
        let res = inner_solve_hull(&g, &idx2, &[star], &config).unwrap();
        assert!((res.bound - 2.0).abs() <= 0.05, "{method:?}: {}", res.bound);
    }
}

#[test]
fn oracle_examples() {
    let f = triangle().into_instance().unwrap();
    let idx = enumerate_dk(3, 1).unwrap();
    let config = SolverConfig::default();
    let (nu, v) = graph_oracle(&f, &idx, &PseudoMarginal::zeros(&idx), &config, 1).unwrap();
    assert_eq!(v, 0.0);
    assert_eq!(nu, NuVector::from_tree(3, &[(0, 1), (0, 2)]));

    let ones = PseudoMarginal {
        y: vec![1.0; idx.len()],
    };
    assert_eq!(graph_oracle(&f, &idx, &ones, &config, 1).unwrap().1, 2.0);

    let a0 = PseudoMarginal::from_set(&idx, Subset::singleton(0));
    assert_eq!(graph_oracle(&f, &idx, &a0, &config, 1).unwrap().1, 2.0);
}

#[test]
fn rounding_examples() {
    assert_eq!(round_threshold(&[0.8, 0.3, 0.6], 0.5), Subset::from([0, 2]));
    assert_eq!(round_threshold(&[0.0; 4], 0.5), Subset::EMPTY);
    assert_eq!(round_threshold(&[1.0; 4], 0.5), Subset::full(4));
    assert_eq!(top_m(&[0.5, 0.9, 0.5, 0.1], 2), Subset::from([0, 1]));
}

#[test]
fn solve_triangle() {
    // The local polytope admits y_i = 1/2, y_ij = 0, where every tree
    // gives 3; the uniform mixture of the three trees certifies 3.
    let f = triangle().into_instance().unwrap();
    let sol = solve(&f, &SolverConfig::default()).unwrap();
    assert!((sol.dual_bound - 3.0).abs() <= 1e-4, "{}", sol.dual_bound);
    assert_eq!(sol.state.stop, StopReason::Converged);
    assert_eq!(sol.value, 2.0);
    assert_eq!(f.value(sol.set), sol.value);
    assert!(sol.state.oracle_exact);
}

#[test]
fn solve_zero_function() {
    let f = FnSetFunction::new(4, |_| 0.0);
    let sol = solve(&f, &SolverConfig::default()).unwrap();
    assert!(sol.dual_bound.abs() <= 1e-9);
    assert_eq!(sol.set, Subset::EMPTY);
    assert_eq!(sol.value, 0.0);
}

#[test]
fn solve_tree_cut_first_iteration() {
    for seed in 0..5 {
        let mut rng = rng_from_seed(seed);
        let edges = crate::instances::random_tree_edges(10, &mut rng);
        let weighted = edges
            .iter()
            .map(|&(i, j)| (i, j, crate::instances::positive_weight(&mut rng)))
            .collect();
        let f = CutInstance::new(10, weighted)
            .unwrap()
            .into_instance()
            .unwrap();
        let sol = solve(&f, &SolverConfig::default()).unwrap();
        let best = brute_max(&f);
        assert!(
            (sol.dual_bound - best).abs() <= 1e-4,
            "seed {seed}: {} vs {best}",
            sol.dual_bound
        );
        assert_eq!(sol.iterations(), 1, "seed {seed}");
        assert!(sol.value <= sol.dual_bound + 1e-9);
    }
}

#[test]
fn trace_is_monotone_and_dominates_primal() {
    let mut rng = rng_from_seed(7);
    let f = crate::instances::random_cut(8, 0.9, &mut rng)
        .unwrap()
        .into_instance()
        .unwrap();
    let config = SolverConfig {
        max_outer: 10,
        inner_steps: 2000,
        ..SolverConfig::default()
    };
    let sol = solve(&f, &config).unwrap();
    let best = brute_max(&f);
    for w in sol.state.trace.windows(2) {
        assert!(w[1].dual_bound <= w[0].dual_bound);
        assert!(w[1].best_primal >= w[0].best_primal);
    }
    for r in &sol.state.trace {
        assert!(r.dual_bound >= best - 1e-6, "{} < {best}", r.dual_bound);
        assert!(r.best_primal <= r.dual_bound);
    }
}

#[test]
fn solve_with_width_two() {
    let mut rng = rng_from_seed(3);
    let f = crate::instances::random_cut(6, 0.9, &mut rng)
        .unwrap()
        .into_instance()
        .unwrap();
    let config = SolverConfig {
        treewidth: 2,
        max_outer: 5,
        inner_steps: 1000,
        pool_size: 8,
        ..SolverConfig::default()
    };
    let sol = solve(&f, &config).unwrap();
    assert!(!sol.state.oracle_exact);
    assert!(sol.dual_bound >= brute_max(&f) - 1e-6);
}

#[test]
fn config_validation() {
    let f = triangle().into_instance().unwrap();
    for bad in [
        SolverConfig {
            theta: 1.0,
            ..SolverConfig::default()
        },
        SolverConfig {
            treewidth: 0,
            ..SolverConfig::default()
        },
        SolverConfig {
            treewidth: 3,
            ..SolverConfig::default()
        },
        SolverConfig {
            tol: 0.0,
            ..SolverConfig::default()
        },
    ] {
        assert!(solve(&f, &bad).is_err(), "{bad:?}");
    }
}

#[test]
fn subgradient_bounds_are_valid() {
    let config = SolverConfig {
        inner_method: InnerMethod::Subgradient,
        ..SolverConfig::default()
    };
    for seed in 0..5 {
        let mut rng = rng_from_seed(seed);
        let edges = crate::instances::random_tree_edges(10, &mut rng);
        let weighted = edges
            .iter()
            .map(|&(i, j)| (i, j, crate::instances::positive_weight(&mut rng)))
            .collect();
        let f = CutInstance::new(10, weighted)
            .unwrap()
            .into_instance()
            .unwrap();
        let sol = solve(&f, &config).unwrap();
        let best = brute_max(&f);
        assert!(sol.dual_bound >= best - 1e-9, "seed {seed}");
        assert!(sol.value <= best);
    }
}
