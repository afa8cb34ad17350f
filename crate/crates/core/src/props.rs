//! Randomized property suites for the graph bounds and the relaxation.
//!
//! | suite | property |
//! |-------|----------|
//! | `p1` | `F_G(A) >= F(A)` for random DAGs and all `A` |
//! | `p2` | marginal gains of `F_G` match `F` on parent subsets |
//! | `p3` | deleting an arc never decreases `F_G` |
//! | `p4` | `0 <= F_G(A) − F(A) <= F_G(V) − F(V)` on ancestral sets |
//! | `p5` | `F_G` is submodular for directed trees |
//! | `p6` | rerooting a directed tree leaves `F_G` unchanged |
//! | `p7` | elimination and junction-tree forms agree, are tight on cliques, and match `F_ν` |
//! | `p8` | integral pseudo-marginals satisfy `N_k`; the tree oracle is exact |
//!
//! Every trial draws a fresh cut, coverage or entropy instance (in rotation)
//! from a generator seeded by the suite seed and the trial number. The DAG
//! bound is injectable so that a deliberately broken bound can be shown to
//! fail the suites.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Error, Result};
use crate::graph::{
    dag_bound, decomposable_bound, nu_from_decomposable, random_junction_tree, reroot_tree, Dag,
    DecomposableGraph, NuVector, UndirectedGraph,
};
use crate::instances::{random_coverage, random_cut, random_entropy, rng_from_seed};
use crate::polytope::{enumerate_dk, mk_membership, nk_violations, PseudoMarginal};
use crate::saddle::{bilinear, mobius_on_index, oracle::tree_oracle};
use crate::setfn::{check_submodular, FnSetFunction, SetFunction, SetFunctionInstance};
use crate::subset::Subset;

/// Absolute tolerance of every comparison.
pub const PROP_TOL: f64 = 1e-9;

/// Largest ground set the suites accept.
pub const PROP_MAX_N: usize = 8;

/// Largest ground set for the exhaustive spanning-tree enumeration.
pub const ORACLE_ENUM_MAX_N: usize = 6;

/// Edge probability and parent cap of the random DAGs.
pub const DAG_EDGE_PROB: f64 = 0.4;
pub const DAG_MAX_PARENTS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Prop {
    P1,
    P2,
    P3,
    P4,
    P5,
    P6,
    P7,
    P8,
}

impl Prop {
    pub const ALL: [Prop; 8] = [
        Prop::P1,
        Prop::P2,
        Prop::P3,
        Prop::P4,
        Prop::P5,
        Prop::P6,
        Prop::P7,
        Prop::P8,
    ];

    fn index(self) -> u64 {
        self as u64 + 1
    }
}

impl fmt::Display for Prop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "p{}", self.index())
    }
}

impl FromStr for Prop {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        Prop::ALL
            .into_iter()
            .find(|p| p.to_string() == lower)
            .ok_or_else(|| domain(format!("unknown property suite {s:?}; expected p1..p8")))
    }
}

/// Parses `all` or a comma-separated list such as `p1,p3`.
pub fn parse_prop_list(s: &str) -> Result<Vec<Prop>> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(Prop::ALL.to_vec());
    }
    let mut out: Vec<Prop> = s.split(',').map(str::parse).collect::<Result<_>>()?;
    out.sort();
    out.dedup();
    Ok(out)
}

/// `F_G(A)` for a DAG; replaceable to test the suites themselves.
pub type DagBoundFn = fn(&dyn SetFunction, &Dag, Subset) -> f64;

fn reference_bound(f: &dyn SetFunction, g: &Dag, a: Subset) -> f64 {
    dag_bound(f, g, a)
}

#[derive(Clone, Copy)]
pub struct CheckConfig {
    pub n: usize,
    pub trials: usize,
    pub seed: u64,
    pub bound: DagBoundFn,
}

impl CheckConfig {
    pub fn new(n: usize, trials: usize, seed: u64) -> Self {
        CheckConfig {
            n,
            trials,
            seed,
            bound: reference_bound,
        }
    }

    pub fn with_bound(mut self, bound: DagBoundFn) -> Self {
        self.bound = bound;
        self
    }
}

impl fmt::Debug for CheckConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CheckConfig")
            .field("n", &self.n)
            .field("trials", &self.trials)
            .field("seed", &self.seed)
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PropReport {
    pub prop: Prop,
    pub trials: usize,
    pub passed: usize,
    /// Description of the first failing trial.
    pub first_failure: Option<String>,
}

impl PropReport {
    pub fn ok(&self) -> bool {
        self.passed == self.trials
    }
}

impl fmt::Display for PropReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}/{}", self.prop, self.passed, self.trials)?;
        if let Some(why) = &self.first_failure {
            write!(f, " (first failure: {why})")?;
        }
        Ok(())
    }
}

/// Outcome of one trial: `Err` carries a description of the violation.
type Trial = std::result::Result<(), String>;

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= PROP_TOL
}

/// The `t`-th random instance: cut, coverage and entropy in rotation.
pub fn trial_instance(n: usize, t: usize, rng: &mut ChaCha8Rng) -> Result<SetFunctionInstance> {
    match t % 3 {
        0 => random_cut(n, 0.5, rng)?.into_instance(),
        1 => random_coverage(n, 2 * n, 0.3, rng)?.into_instance(),
        _ => random_entropy(n, rng)?.into_instance(),
    }
}

fn trial_rng(cfg: &CheckConfig, prop: Prop, t: usize) -> ChaCha8Rng {
    rng_from_seed(
        cfg.seed
            .wrapping_mul(0x2545_F491_4F6C_DD1D)
            .wrapping_add(prop.index() << 32)
            .wrapping_add(t as u64),
    )
}

/// Runs one suite.
pub fn run_prop(prop: Prop, cfg: &CheckConfig) -> Result<PropReport> {
    if !(2..=PROP_MAX_N).contains(&cfg.n) {
        return Err(domain(format!(
            "property suites need 2 <= n <= {PROP_MAX_N}, got {}",
            cfg.n
        )));
    }
    let mut passed = 0;
    let mut first_failure = None;
    for t in 0..cfg.trials {
        let mut rng = trial_rng(cfg, prop, t);
        let f = trial_instance(cfg.n, t, &mut rng)?;
        let outcome = match prop {
            Prop::P1 => p1(cfg, &f, &mut rng),
            Prop::P2 => p2(cfg, &f, &mut rng),
            Prop::P3 => p3(cfg, &f, &mut rng),
            Prop::P4 => p4(cfg, &f, &mut rng),
            Prop::P5 => p5(cfg, &f, &mut rng),
            Prop::P6 => p6(cfg, &f, &mut rng)?,
            Prop::P7 => p7(cfg, &f, &mut rng)?,
            Prop::P8 => p8(cfg, &f, &mut rng)?,
        };
        match outcome {
            Ok(()) => passed += 1,
            Err(why) => {
                first_failure
                    .get_or_insert_with(|| format!("trial {t} ({}): {why}", f.family().name()));
            }
        }
    }
    Ok(PropReport {
        prop,
        trials: cfg.trials,
        passed,
        first_failure,
    })
}

/// Runs several suites in order.
pub fn run_props(props: &[Prop], cfg: &CheckConfig) -> Result<Vec<PropReport>> {
    props.iter().map(|&p| run_prop(p, cfg)).collect()
}

fn all_subsets(n: usize) -> impl Iterator<Item = Subset> {
    Subset::full(n).subsets()
}

fn random_dag(n: usize, rng: &mut ChaCha8Rng) -> Dag {
    Dag::random(n, DAG_EDGE_PROB, DAG_MAX_PARENTS, rng)
}

fn p1(cfg: &CheckConfig, f: &SetFunctionInstance, rng: &mut ChaCha8Rng) -> Trial {
    let g = random_dag(cfg.n, rng);
    for a in all_subsets(cfg.n) {
        let (fg, fa) = ((cfg.bound)(f, &g, a), f.value(a));
        if fg < fa - PROP_TOL {
            return Err(format!("F_G({a}) = {fg} < F({a}) = {fa}"));
        }
    }
    Ok(())
}

fn p2(cfg: &CheckConfig, f: &SetFunctionInstance, rng: &mut ChaCha8Rng) -> Trial {
    let g = random_dag(cfg.n, rng);
    for i in 0..cfg.n {
        for b in g.parents(i).subsets() {
            let bi = b.with(i);
            let lhs = (cfg.bound)(f, &g, bi) - (cfg.bound)(f, &g, b);
            let rhs = f.value(bi) - f.value(b);
            if !close(lhs, rhs) {
                return Err(format!("gain of {i} at {b}: F_G {lhs} vs F {rhs}"));
            }
        }
    }
    Ok(())
}

fn p3(cfg: &CheckConfig, f: &SetFunctionInstance, rng: &mut ChaCha8Rng) -> Trial {
    let g = random_dag(cfg.n, rng);
    for (p, c) in g.arcs() {
        let sub = g.without_arc(p, c);
        for a in all_subsets(cfg.n) {
            let (full, less) = ((cfg.bound)(f, &g, a), (cfg.bound)(f, &sub, a));
            if less < full - PROP_TOL {
                return Err(format!(
                    "removing {p}->{c} lowers F_G({a}) from {full} to {less}"
                ));
            }
        }
    }
    Ok(())
}

fn p4(cfg: &CheckConfig, f: &SetFunctionInstance, rng: &mut ChaCha8Rng) -> Trial {
    let g = random_dag(cfg.n, rng);
    let v = Subset::full(cfg.n);
    let slack_v = (cfg.bound)(f, &g, v) - f.value(v);
    for a in all_subsets(cfg.n).filter(|&a| g.is_ancestral(a)) {
        let slack = (cfg.bound)(f, &g, a) - f.value(a);
        if slack < -PROP_TOL || slack > slack_v + PROP_TOL {
            return Err(format!(
                "ancestral {a}: slack {slack} outside [0, {slack_v}]"
            ));
        }
    }
    Ok(())
}

fn p5(cfg: &CheckConfig, f: &SetFunctionInstance, rng: &mut ChaCha8Rng) -> Trial {
    let g = Dag::random_tree(cfg.n, rng);
    let bound = cfg.bound;
    let fg = FnSetFunction::new(cfg.n, |a| bound(f, &g, a));
    match check_submodular(&fg) {
        Ok(true) => Ok(()),
        Ok(false) => Err(format!(
            "tree bound with arcs {:?} is not submodular",
            g.arcs()
        )),
        Err(e) => Err(e.to_string()),
    }
}

fn p6(cfg: &CheckConfig, f: &SetFunctionInstance, rng: &mut ChaCha8Rng) -> Result<Trial> {
    let g = Dag::random_tree(cfg.n, rng);
    let root = rng.gen_range(0..cfg.n);
    let h = reroot_tree(&g, root)?;
    for a in all_subsets(cfg.n) {
        let (x, y) = ((cfg.bound)(f, &g, a), (cfg.bound)(f, &h, a));
        if !close(x, y) {
            return Ok(Err(format!(
                "rerooting at {root} changes F_G({a}): {x} vs {y}"
            )));
        }
    }
    Ok(Ok(()))
}

/// Random triangulated graph: eliminate the vertices of `G(n, 1/2)` in a
/// random order, adding fill-in edges.
fn random_chordal(n: usize, rng: &mut ChaCha8Rng) -> Result<DecomposableGraph> {
    let mut adj = vec![Subset::EMPTY; n];
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(0.5) {
                adj[i].insert(j);
                adj[j].insert(i);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut eliminated = Subset::EMPTY;
    for &v in &order {
        let later = adj[v].difference(eliminated);
        for i in later.iter() {
            adj[i] = adj[i].union(later.without(i));
        }
        eliminated.insert(v);
    }
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| adj[i].iter().filter(move |&j| j > i).map(move |j| (i, j)))
        .collect();
    DecomposableGraph::new(UndirectedGraph::new(n, &edges)?)
}

fn p7(cfg: &CheckConfig, f: &SetFunctionInstance, rng: &mut ChaCha8Rng) -> Result<Trial> {
    let n = cfg.n;
    let dec = random_chordal(n, rng)?;
    let dag = dec.as_dag();
    for a in all_subsets(n) {
        let (elim, junction) = ((cfg.bound)(f, &dag, a), decomposable_bound(f, &dec, a));
        if !close(elim, junction) {
            return Ok(Err(format!("forms differ at {a}: {elim} vs {junction}")));
        }
    }
    for &c in dec.cliques() {
        let (fg, fc) = ((cfg.bound)(f, &dag, c), f.value(c));
        if !close(fg, fc) {
            return Ok(Err(format!("not tight on clique {c}: {fg} vs {fc}")));
        }
    }
    let k = rng.gen_range(1..n);
    let jt = random_junction_tree(n, k, rng)?;
    let nu = nu_from_decomposable(&jt)?;
    for i in 0..n {
        if !close(nu.element_sum(i), 1.0) {
            return Ok(Err(format!("ν sums to {} around {i}", nu.element_sum(i))));
        }
    }
    for a in all_subsets(n) {
        let (fnu, fg) = (nu.value(f, a), decomposable_bound(f, &jt, a));
        if !close(fnu, fg) {
            return Ok(Err(format!("F_ν({a}) = {fnu} but F_G = {fg}")));
        }
    }
    Ok(Ok(()))
}

/// Decodes a Prüfer sequence into tree edges.
fn prufer_tree(n: usize, code: &[usize]) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &v in code {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &v in code {
        let leaf = (0..n).find(|&u| degree[u] == 1).expect("a leaf exists");
        edges.push((leaf.min(v), leaf.max(v)));
        degree[leaf] = 0;
        degree[v] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&u| degree[u] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// All `n^{n−2}` labelled spanning trees of `K_n`.
pub fn all_spanning_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    if n < 2 {
        return Vec::new();
    }
    let len = n - 2;
    let total = n.pow(len as u32);
    (0..total)
        .map(|mut code_index| {
            let code: Vec<usize> = (0..len)
                .map(|_| {
                    let d = code_index % n;
                    code_index /= n;
                    d
                })
                .collect();
            prufer_tree(n, &code)
        })
        .collect()
}

fn p8(cfg: &CheckConfig, f: &SetFunctionInstance, rng: &mut ChaCha8Rng) -> Result<Trial> {
    let n = cfg.n;
    for k in 1..n.min(3) {
        let idx = enumerate_dk(n, k)?;
        let x: Subset = (0..n).filter(|_| rng.gen_bool(0.5)).collect();
        let y = PseudoMarginal::from_set(&idx, x);
        let violations = nk_violations(&idx, &y)?;
        if !violations.is_empty() {
            return Ok(Err(format!(
                "integral point of {x} violates N_{k}: {violations:?}"
            )));
        }
        if !mk_membership(&idx, &y)? {
            return Ok(Err(format!(
                "integral point of {x} not recognised in M_{k}"
            )));
        }
    }

    let m = n.min(ORACLE_ENUM_MAX_N);
    let sub = FnSetFunction::new(m, |a| f.value(a));
    let idx = enumerate_dk(m, 1)?;
    let mob = mobius_on_index(&sub, &idx);
    let y: Vec<f64> = (0..idx.len()).map(|_| rng.gen::<f64>()).collect();
    let (_, oracle) = tree_oracle(&idx, &mob, &y);
    let best = all_spanning_trees(m)
        .iter()
        .map(|edges| bilinear(&idx, &mob, &NuVector::from_tree(m, edges), &y))
        .fold(f64::INFINITY, f64::min);
    if oracle != best {
        return Ok(Err(format!(
            "tree oracle {oracle} but exhaustive minimum {best}"
        )));
    }
    Ok(Ok(()))
}
