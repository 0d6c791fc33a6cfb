//! `omt`: generate, evaluate, solve, export, preprocess, verify and
//! benchmark ordered median tree location instances.
//!
//! Exit codes: 0 on success, 1 on an infeasible solution or a failed
//! verification, 2 on a usage or input error.

mod bench;
mod record;

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use omt::benders::{classical_benders, BendersConfig, CutKind, EnumerationMaster, WarmStartConfig};
use omt::covering::build_cost_ladder;
use omt::fixtures;
use omt::formulations::{
    build_for_instance, check_assignment, export_lp, lift_solution, BuildOptions, Family, MilpModel, Sorting, TreeKind,
};
use omt::heuristics::{run_heuristic, HeuristicConfig, HeuristicVariant};
use omt::oracle::solve_exact;
use omt::preprocessing::{apply_fixing, build_fixing, render_tables};
use omt::{build_lambda, evaluate_objective, generate_instance, Criterion, Instance, OmtError, Solution};

use bench::{BenchConfig, BenchMethod};
use record::{Bounds, RunRecord};

#[derive(Parser)]
#[command(name = "omt", version, about = "Ordered median tree location toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded random instance as JSON.
    Gen(GenArgs),
    /// Evaluate a solution on an instance.
    Eval(EvalArgs),
    /// Solve an instance with the oracle, a heuristic or Benders.
    Solve(SolveArgs),
    /// Write a formulation in LP text format.
    Export(ExportArgs),
    /// Print the cost ladder, H bounds and the fixing matrix.
    Preprocess(PreprocessArgs),
    /// Lift a solution into a formulation and report violated rows.
    Verify(VerifyArgs),
    /// Run a seeded batch and write detailed and summary CSV tables.
    Bench(BenchArgs),
}

#[derive(Args)]
struct InstanceArgs {
    /// Instance JSON file.
    #[arg(long, conflicts_with = "fixture", required_unless_present = "fixture")]
    instance: Option<PathBuf>,
    /// Bundled instance instead of a file.
    #[arg(long, value_enum)]
    fixture: Option<Fixture>,
    /// Replace the instance λ by a criterion pattern.
    #[arg(long)]
    criterion: Option<Criterion>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Fixture {
    #[value(name = "appendixB")]
    AppendixB,
    #[value(name = "fig1")]
    Fig1,
}

impl InstanceArgs {
    fn load(&self) -> Result<Instance> {
        let inst = match (&self.instance, self.fixture) {
            (Some(path), _) => Instance::from_json(&read(path)?).with_context(|| format!("loading {}", path.display()))?,
            (None, Some(Fixture::AppendixB)) => fixtures::appendix_b(),
            (None, Some(Fixture::Fig1)) => fixtures::fig1(Criterion::Median),
            (None, None) => bail!(usage("an instance is required (--instance or --fixture)")),
        };
        match self.criterion {
            Some(c) => Ok(inst.with_lambda(build_lambda(c, inst.n()))?),
            None => Ok(inst),
        }
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    n: usize,
    #[arg(long)]
    p: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "median")]
    criterion: Criterion,
    #[arg(long, default_value_t = 1)]
    cost_min: u64,
    #[arg(long, default_value_t = 100_000)]
    cost_max: u64,
    /// Output file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    #[arg(long)]
    solution: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Oracle,
    Heuristic,
    Benders,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    #[arg(long, value_enum, default_value = "oracle")]
    method: Method,
    /// Heuristic variant: domp-mst or pmedt-domp.
    #[arg(long, default_value = "domp-mst")]
    variant: HeuristicVariant,
    /// Number of heuristic starts.
    #[arg(long, default_value_t = 1)]
    starts: usize,
    /// Heuristic search with median weights regardless of λ.
    #[arg(long)]
    force_median: bool,
    /// Benders cut family: classical or dual.
    #[arg(long, default_value = "classical")]
    cut: CutKind,
    #[arg(long, default_value_t = 100_000)]
    max_iterations: usize,
    /// Seed the Benders cut pool for this many seconds.
    #[arg(long)]
    warm_start: Option<f64>,
    /// Solution JSON output file.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Append a RunRecord row to this CSV file.
    #[arg(long)]
    record: Option<PathBuf>,
    /// Instance number written to the record.
    #[arg(long, default_value_t = 1)]
    ins: usize,
    /// Print the solution JSON instead of the objective line.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct FormulationArgs {
    #[arg(long, default_value = "F1")]
    family: Family,
    #[arg(long, default_value = "XL")]
    sorting: Sorting,
    #[arg(long, default_value = "MTZ")]
    tree: TreeKind,
    /// Use the staircase form of the x^l sorting rows.
    #[arg(long)]
    staircase: bool,
    /// Fix covering variables from the preprocessing bounds (U only).
    #[arg(long)]
    apply_fixing: bool,
}

impl FormulationArgs {
    fn build(&self, inst: &Instance, relaxed: bool) -> Result<MilpModel> {
        let opts = BuildOptions { staircase: self.staircase, relaxed, ..Default::default() };
        let mut model = build_for_instance(inst, self.family, self.sorting, self.tree, &opts)?;
        if self.apply_fixing {
            let fix = build_fixing(inst)?;
            let changed = apply_fixing(&mut model, &fix)?;
            eprintln!("fixed bounds changed: {changed}");
        }
        Ok(model)
    }
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    #[command(flatten)]
    form: FormulationArgs,
    /// Export the continuous relaxation.
    #[arg(long)]
    relaxed: bool,
    /// Output .lp file (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PreprocessArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    /// Emit JSON instead of tables.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    inst: InstanceArgs,
    #[command(flatten)]
    form: FormulationArgs,
    #[arg(long)]
    solution: PathBuf,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_delimiter = ',', default_value = "6,7,8")]
    sizes: Vec<usize>,
    /// Facility counts (default ⌊n/4⌋, ⌊n/3⌋, ⌊n/2⌋, at least 2).
    #[arg(long, value_delimiter = ',')]
    p_values: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    instances: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value = "median")]
    criterion: Criterion,
    #[arg(long, default_value_t = 1)]
    cost_min: u64,
    #[arg(long, default_value_t = 100_000)]
    cost_max: u64,
    #[arg(long, value_enum, default_value = "benders")]
    method: Method,
    #[arg(long, default_value = "classical")]
    cut: CutKind,
    #[arg(long, default_value = "domp-mst")]
    variant: HeuristicVariant,
    #[arg(long, default_value_t = 100_000)]
    max_iterations: usize,
    /// Formulation for the root relaxation column, e.g. F1,XL,MTZ.
    #[arg(long, default_value = "F1,XL,MTZ")]
    relaxation: String,
    /// Leave objR empty.
    #[arg(long)]
    no_relaxation: bool,
    /// Do not compute exact optima for the best known bounds.
    #[arg(long)]
    no_oracle: bool,
    /// Write cpu as 0 (byte-reproducible output).
    #[arg(long)]
    no_timing: bool,
    /// Write every generated instance as JSON into this directory.
    #[arg(long)]
    dump_instances: Option<PathBuf>,
    /// Detailed CSV output (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Summary CSV output (stdout after the detailed table when absent).
    #[arg(long)]
    summary: Option<PathBuf>,
}

/// Failure that maps to exit code 1.
#[derive(Debug)]
struct Failed(String);

impl std::fmt::Display for Failed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Failed {}

/// Input problem that maps to exit code 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: &str) -> Usage {
    Usage(msg.to_string())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| anyhow!(Usage(format!("cannot read {}: {e}", path.display()))))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn cmd_gen(a: &GenArgs) -> Result<()> {
    let inst = generate_instance(a.n, a.p, (a.cost_min, a.cost_max), a.seed, a.criterion)?;
    write_out(a.out.as_deref(), &(inst.to_json() + "\n"))
}

fn cmd_eval(a: &EvalArgs) -> Result<()> {
    let inst = a.inst.load()?;
    let (sol, _) = Solution::from_json(&read(&a.solution)?)?;
    let obj = evaluate_objective(&inst, &sol)?;
    println!("objective: {obj}");
    Ok(())
}

struct Solved {
    solution: Solution,
    objective: f64,
    lower: Option<f64>,
    nod: usize,
    label: String,
}

fn cmd_solve(a: &SolveArgs) -> Result<()> {
    let inst = a.inst.load()?;
    let t0 = Instant::now();
    let s = match a.method {
        Method::Oracle => {
            let r = solve_exact(&inst)?;
            Solved { solution: r.best, objective: r.objective, lower: Some(r.objective), nod: r.subsets as usize, label: "oracle".into() }
        }
        Method::Heuristic => {
            let cfg = HeuristicConfig { force_median: a.force_median, starts: a.starts.max(1), ..Default::default() };
            let r = run_heuristic(&inst, a.variant, &cfg)?;
            Solved { solution: r.solution, objective: r.objective, lower: None, nod: r.trace.len(), label: format!("heuristic-{}", a.variant) }
        }
        Method::Benders => {
            let warm_start = a.warm_start.map(|secs| WarmStartConfig {
                max_time: Duration::from_secs_f64(secs.max(0.0)),
                ..Default::default()
            });
            let cfg = BendersConfig { cut: a.cut, max_iterations: a.max_iterations, warm_start, ..Default::default() };
            let r = classical_benders(&inst, &mut EnumerationMaster::default(), &cfg)?;
            eprintln!("benders: {} iterations, {} cuts, converged {}", r.iterations, r.pool.len(), r.converged);
            Solved {
                lower: Some(r.lower_bound.min(r.objective)),
                solution: r.solution,
                objective: r.objective,
                nod: r.iterations,
                label: format!("benders-{}", a.cut),
            }
        }
    };
    let cpu = t0.elapsed().as_secs_f64();
    let json = s.solution.to_json(Some(s.objective));
    if let Some(path) = &a.out {
        fs::write(path, json.clone() + "\n").with_context(|| format!("writing {}", path.display()))?;
    }
    if a.json {
        println!("{json}");
    } else {
        println!("objective: {}", s.objective);
    }
    if let Some(path) = &a.record {
        let b = Bounds { obj_u: s.objective, obj_l: s.lower, obj_r: None, best_u: s.objective, best_l: s.lower };
        let rec = RunRecord::new(inst.n(), inst.p(), a.ins, &s.label, cpu, b, s.nod)?;
        let fresh = !path.exists() || fs::metadata(path)?.len() == 0;
        let file = fs::OpenOptions::new().create(true).append(true).open(path)?;
        record::write_records(file, &[rec], fresh)?;
    }
    Ok(())
}

fn cmd_export(a: &ExportArgs) -> Result<()> {
    let inst = a.inst.load()?;
    let model = a.form.build(&inst, a.relaxed)?;
    let (structural, _) = model.reported_size();
    eprintln!(
        "{}: {} declared variables ({structural} structural), {} constraints",
        model.name,
        model.num_vars(),
        model.num_constraints()
    );
    write_out(a.out.as_deref(), &export_lp(&model))
}

fn cmd_preprocess(a: &PreprocessArgs) -> Result<()> {
    let inst = a.inst.load()?;
    let ladder = build_cost_ladder(inst.n(), inst.cost_flat());
    let fix = build_fixing(&inst)?;
    if a.json {
        let rows: Vec<Vec<String>> = fix.rows().iter().map(|r| r.iter().map(|f| f.to_string()).collect()).collect();
        let v = serde_json::json!({
            "ladder": ladder.values,
            "h1": fix.h1,
            "h0": fix.h0,
            "exact": fix.exact,
            "fixing": rows,
        });
        println!("{}", serde_json::to_string_pretty(&v)?);
    } else {
        print!("{}", render_tables(&ladder, &fix));
    }
    Ok(())
}

fn cmd_verify(a: &VerifyArgs) -> Result<()> {
    let inst = a.inst.load()?;
    let (sol, _) = Solution::from_json(&read(&a.solution)?)?;
    let objective = evaluate_objective(&inst, &sol)?;
    let model = a.form.build(&inst, false)?;
    let asg = lift_solution(&inst, &sol, &model)?;
    let rep = check_assignment(&model, &asg)?;
    println!("model: {}", model.name);
    println!("objective: {objective}");
    println!("model objective: {}", rep.objective);
    println!("max violation: {:e}", rep.max_violation);
    let all = rep
        .violated
        .iter()
        .chain(&rep.bound_violations)
        .chain(&rep.integrality_violations)
        .chain(&rep.lazy_violations);
    for v in all.take(50) {
        println!("violated {} by {:e}", v.name, v.violation);
    }
    let matches = (rep.objective - objective).abs() <= 1e-9 * objective.abs().max(1.0);
    if !rep.is_feasible() {
        return Err(Failed(format!("{} violations", rep.num_violations())).into());
    }
    if !matches {
        return Err(Failed(format!("model objective {} differs from {objective}", rep.objective)).into());
    }
    println!("feasible: yes");
    Ok(())
}

fn parse_relaxation(s: &str) -> Result<(Family, Sorting, TreeKind)> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [f, so, t] = parts[..] else {
        bail!(usage("--relaxation expects FAMILY,SORTING,TREE"));
    };
    Ok((f.parse()?, so.parse()?, t.parse()?))
}

fn cmd_bench(a: &BenchArgs) -> Result<()> {
    let method = match a.method {
        Method::Benders => BenchMethod::Benders(a.cut),
        Method::Heuristic => BenchMethod::Heuristic(a.variant),
        Method::Oracle => bail!(usage("bench compares benders or heuristic runs against the oracle")),
    };
    let cfg = BenchConfig {
        sizes: a.sizes.clone(),
        p_values: a.p_values.clone(),
        instances: a.instances,
        seed: a.seed,
        criterion: a.criterion,
        cost_range: (a.cost_min, a.cost_max),
        method,
        max_iterations: a.max_iterations,
        relaxation: if a.no_relaxation { None } else { Some(parse_relaxation(&a.relaxation)?) },
        oracle: !a.no_oracle,
        timing: !a.no_timing,
        dump: a.dump_instances.clone(),
    };
    if let Some(dir) = &cfg.dump {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let records = bench::run_bench(&cfg)?;
    let summary = record::summarize(&records);
    let mut detailed = Vec::new();
    record::write_records(&mut detailed, &records, true)?;
    let mut sum = Vec::new();
    record::write_summary(&mut sum, &summary)?;
    match (&a.out, &a.summary) {
        (Some(o), Some(s)) => {
            fs::write(o, detailed)?;
            fs::write(s, sum)?;
        }
        (Some(o), None) => {
            fs::write(o, detailed)?;
            io::stdout().write_all(&sum)?;
        }
        (None, Some(s)) => {
            io::stdout().write_all(&detailed)?;
            fs::write(s, sum)?;
        }
        (None, None) => {
            let mut out = io::stdout();
            out.write_all(&detailed)?;
            out.write_all(b"\n")?;
            out.write_all(&sum)?;
        }
    }
    Ok(())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<Failed>().is_some() {
        return 1;
    }
    if e.downcast_ref::<Usage>().is_some() {
        return 2;
    }
    match e.downcast_ref::<OmtError>() {
        Some(OmtError::Infeasible(_) | OmtError::Lp(_)) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let res = match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Export(a) => cmd_export(a),
        Command::Preprocess(a) => cmd_preprocess(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Bench(a) => cmd_bench(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
