//! Seeded batch runs producing one RunRecord per (|V|, p, instance).

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::Result;
use omt::benders::{classical_benders, BendersConfig, CutKind, EnumerationMaster};
use omt::formulations::{build_for_instance, solve_relaxation, BuildOptions, Family, Sorting, TreeKind};
use omt::heuristics::{run_heuristic, HeuristicConfig, HeuristicVariant};
use omt::instance::standard_p_values;
use omt::oracle::{solve_exact_with, OracleConfig};
use omt::{generate_instance, Criterion, Exec, Instance};

use crate::record::{Bounds, RunRecord};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BenchMethod {
    Benders(CutKind),
    Heuristic(HeuristicVariant),
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    /// Facility counts; empty means ⌊n/4⌋, ⌊n/3⌋, ⌊n/2⌋.
    pub p_values: Vec<usize>,
    pub instances: usize,
    pub seed: u64,
    pub criterion: Criterion,
    pub cost_range: (u64, u64),
    pub method: BenchMethod,
    pub max_iterations: usize,
    /// Formulation whose root relaxation fills objR; `None` leaves it empty.
    pub relaxation: Option<(Family, Sorting, TreeKind)>,
    /// Use the exact oracle for the best known bounds.
    pub oracle: bool,
    /// Report cpu as 0 so that output is byte-reproducible.
    pub timing: bool,
    /// Directory receiving every generated instance as JSON.
    pub dump: Option<PathBuf>,
}

/// Seed of instance `ins` in group (n, p).
pub fn instance_seed(base: u64, n: usize, p: usize, ins: usize) -> u64 {
    base.wrapping_mul(1_000_003).wrapping_add((n as u64) << 32 | (p as u64) << 16 | ins as u64)
}

pub fn jobs(cfg: &BenchConfig) -> Vec<(usize, usize, usize)> {
    let mut out = Vec::new();
    for &n in &cfg.sizes {
        let ps = if cfg.p_values.is_empty() { standard_p_values(n) } else { cfg.p_values.clone() };
        for p in ps.into_iter().filter(|&p| (2..=n).contains(&p)) {
            for ins in 1..=cfg.instances {
                out.push((n, p, ins));
            }
        }
    }
    out
}

/// Root relaxation value of the chosen formulation, if it solves.
pub fn root_relaxation(inst: &Instance, form: (Family, Sorting, TreeKind)) -> Option<f64> {
    let model = build_for_instance(inst, form.0, form.1, form.2, &BuildOptions::default()).ok()?;
    solve_relaxation(&model).ok().map(|r| r.objective)
}

fn run_one(cfg: &BenchConfig, (n, p, ins): (usize, usize, usize)) -> Result<RunRecord> {
    let inst = generate_instance(n, p, cfg.cost_range, instance_seed(cfg.seed, n, p, ins), cfg.criterion)?;
    if let Some(dir) = &cfg.dump {
        fs::write(dir.join(format!("n{n}_p{p}_ins{ins}.json")), inst.to_json() + "\n")?;
    }
    let t0 = Instant::now();
    let (label, obj_u, obj_l, nod) = match cfg.method {
        BenchMethod::Benders(cut) => {
            let mut master = EnumerationMaster { exec: Exec::Sequential, ..Default::default() };
            let bc = BendersConfig { cut, max_iterations: cfg.max_iterations, warm_start: None, exec: Exec::Sequential };
            let r = classical_benders(&inst, &mut master, &bc)?;
            (format!("benders-{cut}"), r.objective, Some(r.lower_bound.min(r.objective)), r.iterations)
        }
        BenchMethod::Heuristic(variant) => {
            let hc = HeuristicConfig { exec: Exec::Sequential, ..Default::default() };
            let r = run_heuristic(&inst, variant, &hc)?;
            (format!("heuristic-{variant}"), r.objective, None, r.trace.len())
        }
    };
    let cpu = if cfg.timing { t0.elapsed().as_secs_f64() } else { 0.0 };
    let obj_r = cfg.relaxation.and_then(|form| root_relaxation(&inst, form));
    // without another lower bound the root relaxation stands in for L
    let obj_l = obj_l.or(obj_r);
    let (mut best_u, mut best_l) = (obj_u, obj_l);
    if cfg.oracle {
        let o = solve_exact_with(&inst, &OracleConfig { exec: Exec::Sequential, ..Default::default() })?;
        best_u = best_u.min(o.objective);
        best_l = Some(best_l.map_or(o.objective, |l| l.max(o.objective)));
    }
    RunRecord::new(n, p, ins, &label, cpu, Bounds { obj_u, obj_l, obj_r, best_u, best_l }, nod)
}

/// Runs every job (in parallel when available) and returns the records
/// sorted by (|V|, p, ins).
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<RunRecord>> {
    let jobs = jobs(cfg);
    let mut out = Exec::default().map_slice(&jobs, |&j| run_one(cfg, j)).into_iter().collect::<Result<Vec<_>>>()?;
    out.sort_by_key(|r| (r.v, r.p, r.ins));
    Ok(out)
}
