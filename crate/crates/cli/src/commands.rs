use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use log::info;
use serde_json::{json, Value};

use submax::baselines::{brute_force_max, double_greedy, local_search, DoubleGreedyMode, Maximum};
use submax::format::{parse_instance, write_instance, InstanceDocument};
use submax::graph::Dag;
use submax::instances::{gen_instance, Family, GraphFamily};
use submax::props::{parse_prop_list, run_props, CheckConfig, PROP_MAX_N};
use submax::saddle::StopReason;
use submax::{
    solve_cardinality, solve_difference, DifferenceInstance, Error, InnerMethod, SetFunction,
    SetFunctionInstance, Solution, SolverConfig, Subset,
};

use crate::trace::write_trace;
use crate::{Algo, BaselineArgs, CheckArgs, GenArgs, GenFamily, InnerArg, SolveArgs};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Input(String),
    Capacity(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Input(_) => 3,
            CliError::Capacity(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Input(m) | CliError::Capacity(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Capacity { .. } => CliError::Capacity(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

type CliResult = Result<ExitCode, CliError>;

fn usage(e: Error) -> CliError {
    match e {
        Error::Capacity { .. } => CliError::Capacity(e.to_string()),
        _ => CliError::Usage(e.to_string()),
    }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents)
        .map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
}

fn read_document(path: &Path) -> Result<InstanceDocument, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| match e {
        Error::Capacity { .. } => CliError::Capacity(format!("{}: {e}", path.display())),
        _ => CliError::Input(format!("{}: {e}", path.display())),
    })
}

pub fn gen(args: &GenArgs) -> CliResult {
    let need = |v: Option<usize>, flag: &str| {
        v.ok_or_else(|| CliError::Usage(format!("--family {:?} requires --{flag}", args.family)))
    };
    let (family, mut meta) = match args.family {
        GenFamily::Tree => {
            let n = need(args.n, "n")?;
            (GraphFamily::Tree { n }, json!({"family": "tree"}))
        }
        GenFamily::Grid => {
            let (rows, cols) = (need(args.rows, "rows")?, need(args.cols, "cols")?);
            (
                GraphFamily::Grid { rows, cols },
                json!({"family": "grid", "rows": rows, "cols": cols}),
            )
        }
        GenFamily::Random => {
            let n = need(args.n, "n")?;
            (
                GraphFamily::Random { n, p: args.p },
                json!({"family": "random", "p": args.p}),
            )
        }
    };
    meta["seed"] = json!(args.seed);
    let cut = gen_instance(family, args.seed).map_err(usage)?;
    let (n, edges) = (cut.n(), cut.edges().len());
    let text = write_instance(&InstanceDocument {
        family: Family::Cut(cut),
        meta: Some(meta),
    }) + "\n";
    match &args.output {
        Some(path) => {
            write_file(path, text.as_bytes())?;
            println!("{}: n={n} edges={edges}", path.display());
        }
        None => {
            print!("{text}");
            eprintln!("n={n} edges={edges}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn solver_config(args: &SolveArgs) -> Result<SolverConfig, CliError> {
    let config = SolverConfig {
        treewidth: args.treewidth,
        max_outer: args.max_outer,
        inner_steps: args.inner_steps,
        tol: args.tol,
        theta: args.theta,
        seed: args.seed,
        budget: args.budget,
        pool_size: args.pool_size,
        inner_method: match args.inner {
            InnerArg::Pdhg => InnerMethod::PrimalDual,
            InnerArg::Subgradient => InnerMethod::Subgradient,
        },
        inner_tol: args.inner_tol,
    };
    config.validate().map_err(usage)?;
    Ok(config)
}

fn stop_name(stop: StopReason) -> &'static str {
    match stop {
        StopReason::Converged => "converged",
        StopReason::Stalled => "stalled",
        StopReason::MaxOuter => "max-outer",
    }
}

fn instance_json(path: &Path, doc: &InstanceDocument) -> Value {
    json!({
        "path": path.display().to_string(),
        "family": doc.family.name(),
        "n": doc.family.n(),
        "meta": doc.meta.clone().unwrap_or(Value::Null),
    })
}

fn run_solver(doc: &InstanceDocument, config: &SolverConfig) -> Result<Solution, CliError> {
    let n = doc.family.n();
    if let Some(m) = config.budget {
        if m > n {
            return Err(CliError::Usage(format!(
                "--budget {m} exceeds the ground set size {n}"
            )));
        }
    }
    if config.treewidth >= n {
        return Err(CliError::Usage(format!(
            "--treewidth {} needs a ground set larger than {n}",
            config.treewidth
        )));
    }
    let solution = match &doc.family {
        Family::Difference(f, h) => {
            let di = DifferenceInstance::new(
                SetFunctionInstance::new((**f).clone())?,
                SetFunctionInstance::new((**h).clone())?,
            )?;
            solve_difference(&di, config)?
        }
        family => {
            let f = SetFunctionInstance::new(family.clone())?;
            match config.budget {
                Some(m) => {
                    let unbudgeted = SolverConfig {
                        budget: None,
                        ..config.clone()
                    };
                    solve_cardinality(&f, m, &unbudgeted)?
                }
                None => submax::solve(&f, config)?,
            }
        }
    };
    Ok(solution)
}

pub fn solve(args: &SolveArgs) -> CliResult {
    let config = solver_config(args)?;
    let doc = read_document(&args.instance)?;
    info!(
        "solving {} instance with n={} and treewidth {}",
        doc.family.name(),
        doc.family.n(),
        config.treewidth
    );
    let started = Instant::now();
    let sol = run_solver(&doc, &config)?;
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;
    for r in &sol.state.trace {
        info!(
            "iter {}: dual {} oracle {} primal {} vertices {} inner steps {}",
            r.iter, r.dual_bound, r.oracle_value, r.best_primal, r.n_vertices, r.inner_steps
        );
    }

    if let Some(path) = &args.trace {
        let mut buf = Vec::new();
        write_trace(&mut buf, &sol.state.trace, !args.no_timing)
            .map_err(|e| CliError::Input(format!("cannot format trace: {e}")))?;
        write_file(path, &buf)?;
    }

    let mut out = io::stdout().lock();
    let _ = writeln!(out, "dual_bound: {}", sol.dual_bound);
    let _ = writeln!(out, "primal: {}", sol.value);
    let _ = writeln!(out, "set: {} ({})", sol.set, sol.set.to_hex());
    let _ = writeln!(out, "gap: {}", sol.gap());
    let _ = writeln!(out, "iterations: {}", sol.iterations());
    let _ = writeln!(out, "stop: {}", stop_name(sol.state.stop));
    if !sol.state.oracle_exact {
        let _ = writeln!(out, "note: random-pool oracle; the loop may stop early");
    }

    if let Some(path) = &args.record {
        let record = json!({
            "instance": instance_json(&args.instance, &doc),
            "algorithm": "relaxation",
            "config": {
                "treewidth": config.treewidth,
                "max_outer": config.max_outer,
                "inner_steps": config.inner_steps,
                "tol": config.tol,
                "theta": config.theta,
                "seed": config.seed,
                "budget": config.budget,
                "pool_size": config.pool_size,
                "inner": format!("{:?}", args.inner).to_lowercase(),
                "inner_tol": config.inner_tol,
            },
            "result": {
                "dual_bound": sol.dual_bound,
                "value": sol.value,
                "subset": sol.set.to_hex(),
                "iterations": sol.iterations(),
                "stop": stop_name(sol.state.stop),
            },
            "trace": args.trace.as_ref().map(|p| p.display().to_string()),
            "wall_ms": wall_ms,
        });
        write_file(path, (record.to_string() + "\n").as_bytes())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn baseline(args: &BaselineArgs) -> CliResult {
    if args.runs == 0 {
        return Err(CliError::Usage("--runs must be positive".into()));
    }
    let doc = read_document(&args.instance)?;
    let f = SetFunctionInstance::new(doc.family.clone())?;
    let randomized = matches!(args.algo, Algo::DgRand | Algo::Ls);
    let runs = if randomized { args.runs } else { 1 };
    let started = Instant::now();
    let mut results: Vec<Maximum> = Vec::with_capacity(runs);
    for r in 0..runs {
        let seed = args.seed.wrapping_add(r as u64);
        let m = match args.algo {
            Algo::Brute => brute_force_max(&f)?,
            Algo::DgDet => double_greedy(&f, DoubleGreedyMode::Deterministic, seed)?,
            Algo::DgRand => double_greedy(&f, DoubleGreedyMode::Randomized, seed)?,
            Algo::Ls => {
                let out = local_search(&f, args.epsilon, seed).map_err(usage_if_domain)?;
                if out.capped {
                    log::warn!("local search hit its move cap after {} moves", out.moves);
                }
                out.best
            }
        };
        results.push(m);
    }
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;
    let values: Vec<f64> = results.iter().map(|m| m.value).collect();
    let best = results
        .iter()
        .copied()
        .fold(results[0], |b, m| if m.value > b.value { m } else { b });
    let (mean, std) = mean_std(&values);
    if runs > 1 {
        println!("value: {mean} ± {std} over {runs} runs");
        println!(
            "best: {} at {} ({})",
            best.value,
            best.set,
            best.set.to_hex()
        );
    } else {
        println!("value: {}", best.value);
        println!("set: {} ({})", best.set, best.set.to_hex());
    }
    if let Some(path) = &args.record {
        let record = json!({
            "instance": instance_json(&args.instance, &doc),
            "algorithm": format!("{:?}", args.algo).to_lowercase(),
            "config": {"seed": args.seed, "runs": runs, "epsilon": args.epsilon},
            "result": {
                "value": best.value,
                "mean": mean,
                "std": std,
                "subset": best.set.to_hex(),
            },
            "trace": Value::Null,
            "wall_ms": wall_ms,
        });
        write_file(path, (record.to_string() + "\n").as_bytes())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn usage_if_domain(e: Error) -> CliError {
    match e {
        Error::Domain(_) => CliError::Usage(e.to_string()),
        other => other.into(),
    }
}

/// The DAG bound with its second term negated.
fn broken_dag_bound(f: &dyn SetFunction, g: &Dag, a: Subset) -> f64 {
    a.iter()
        .map(|i| {
            let pi = g.parents(i);
            f.value(pi.with(i).intersection(a)) + f.value(pi.intersection(a))
        })
        .sum()
}

pub fn check(args: &CheckArgs) -> CliResult {
    let props = parse_prop_list(&args.props).map_err(usage)?;
    if !(2..=PROP_MAX_N).contains(&args.n) {
        return Err(CliError::Usage(format!(
            "--n must be between 2 and {PROP_MAX_N}, got {}",
            args.n
        )));
    }
    let mut cfg = CheckConfig::new(args.n, args.trials, args.seed);
    if args.inject_bug {
        cfg = cfg.with_bound(broken_dag_bound);
    }
    let reports = run_props(&props, &cfg)?;
    for r in &reports {
        println!("{r}");
    }
    if reports.iter().all(|r| r.ok()) {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::FAILURE)
    }
}
