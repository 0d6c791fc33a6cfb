//! Sequential versus parallel execution of the enumeration kernels.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion as Bench};
use omt::heuristics::{run_heuristic, HeuristicConfig, HeuristicVariant};
use omt::oracle::{solve_exact_with, OracleConfig};
use omt::preprocessing::{build_fixing_with, PreprocConfig};
use omt::{generate_instance, Criterion, Exec};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn oracle(c: &mut Bench) {
    let mut g = c.benchmark_group("oracle");
    for (n, p) in [(14, 5), (18, 6)] {
        let inst = generate_instance(n, p, (1, 1000), 7, Criterion::KCentrum).unwrap();
        for (name, exec) in MODES {
            let cfg = OracleConfig { exec, ..Default::default() };
            g.bench_with_input(BenchmarkId::new(name, format!("n{n}_p{p}")), &inst, |b, inst| {
                b.iter(|| black_box(solve_exact_with(inst, &cfg).unwrap().objective))
            });
        }
    }
    g.finish();
}

fn preprocessing(c: &mut Bench) {
    let mut g = c.benchmark_group("preprocessing");
    for n in [8, 10] {
        let inst = generate_instance(n, n / 3, (1, 50), 11, Criterion::Median).unwrap();
        for (name, exec) in MODES {
            let cfg = PreprocConfig { exec, ..Default::default() };
            g.bench_with_input(BenchmarkId::new(name, format!("n{n}")), &inst, |b, inst| {
                b.iter(|| black_box(build_fixing_with(inst, &cfg).unwrap()))
            });
        }
    }
    g.finish();
}

fn heuristics(c: &mut Bench) {
    let mut g = c.benchmark_group("heuristics");
    let inst = generate_instance(40, 10, (1, 1000), 3, Criterion::Median).unwrap();
    for (name, exec) in MODES {
        let cfg = HeuristicConfig { exec, ..Default::default() };
        g.bench_function(BenchmarkId::new(name, "domp_mst_n40"), |b| {
            b.iter(|| black_box(run_heuristic(&inst, HeuristicVariant::DompMst, &cfg).unwrap().objective))
        });
    }
    g.finish();
}

criterion_group! {
    name = benches;
    config = Bench::default().sample_size(10);
    targets = oracle, preprocessing, heuristics
}
criterion_main!(benches);
