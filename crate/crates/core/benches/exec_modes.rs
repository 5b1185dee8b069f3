use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pctl_reduce::minsky::{run_with_period_detection, Machine, Partition, Strategy, SyncProduct};
use pctl_reduce::pctl::check::prob_until_bounded_all;
use pctl_reduce::pctl::{Checker, Formula, MarkovChain};
use pctl_reduce::reduction::{build_Psi_product, build_psi_one_counter, CompileOptions};
use pctl_reduce::witness::{model_one_counter, model_product, ResidualRule};
use pctl_reduce::{default_constants, ExecMode};

const MODES: [ExecMode; 2] = [ExecMode::Sequential, ExecMode::Parallel];

fn one_counter_case() -> (MarkovChain, Formula, usize) {
    let c = default_constants();
    let m = Machine::parse(
        "1: inc c1 goto {2}\n2: inc c1 goto {3}\n3: inc c1 goto {4}\n4: jzdec c1 zero {1} else {4}",
    )
    .unwrap();
    let run = run_with_period_detection(&m, 1000, &Strategy::first());
    let w = model_one_counter(&c, &m, &run, ResidualRule::default()).unwrap();
    let f = build_psi_one_counter(&c, &m, CompileOptions::default());
    (w.chain, f.formula, w.start)
}

fn product_case() -> (MarkovChain, Formula, usize) {
    let c = default_constants();
    let p = SyncProduct::new(
        Machine::parse("1: inc c1 goto {2}\n2: jzdec c1 zero {1} else {1}").unwrap(),
        Machine::parse("1: jzdec c1 zero {2} else {2}\n2: inc c1 goto {1}").unwrap(),
        Partition::new([1], [2]),
    )
    .unwrap();
    let run = run_with_period_detection(&p, 1000, &Strategy::first());
    let w = model_product(&c, &p, &run, ResidualRule::default()).unwrap();
    let f = build_Psi_product(&c, &p, CompileOptions::default());
    (w.chain, f.formula, w.start)
}

fn check_witness(cr: &mut Criterion) {
    let mut g = cr.benchmark_group("check_witness");
    g.sample_size(20);
    for (name, (mc, f, s)) in [
        ("one_counter", one_counter_case()),
        ("product", product_case()),
    ] {
        for mode in MODES {
            g.bench_with_input(
                BenchmarkId::new(name, format!("{mode:?}")),
                &mode,
                |b, &mode| b.iter(|| Checker::with_mode(black_box(&mc), mode).holds(&f, s)),
            );
        }
    }
    g.finish();
}

fn bounded_until(cr: &mut Criterion) {
    let (mc, _, _) = product_case();
    let a: Vec<bool> = (0..mc.len()).map(|s| !mc.has(s, "h_1")).collect();
    let b: Vec<bool> = (0..mc.len()).map(|s| mc.has(s, "l1_1")).collect();
    let mut g = cr.benchmark_group("bounded_until_16");
    g.sample_size(20);
    for mode in MODES {
        g.bench_function(format!("{mode:?}"), |bn| {
            bn.iter(|| prob_until_bounded_all(black_box(&mc), &a, &b, 16, mode))
        });
    }
    g.finish();
}

criterion_group!(benches, check_witness, bounded_until);
criterion_main!(benches);
