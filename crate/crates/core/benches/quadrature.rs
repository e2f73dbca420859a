use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use ghyper::quadrature::integrate;
use ghyper::verifier::{anchor, run_suites, Suite, VerifierConfig};
use ghyper::{Execution, MonomialBasis, QuadratureConfig};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn integrate_shapes(c: &mut Criterion) {
    let mut group = c.benchmark_group("integrate");
    for (n, d) in [(2, 4), (3, 2)] {
        let basis = MonomialBasis::new(n, d).unwrap();
        let a = anchor(&basis).unwrap();
        for (name, exec) in MODES {
            let cfg = QuadratureConfig::default().with_execution(exec);
            group.bench_with_input(BenchmarkId::new(name, format!("{n}x{d}")), &a, |b, a| {
                b.iter(|| integrate(&basis, a, &cfg).unwrap())
            });
        }
    }
    group.finish();
}

fn singularity_suite(c: &mut Criterion) {
    let mut group = c.benchmark_group("verify-thm2");
    group.sample_size(10);
    for (name, exec) in MODES {
        let mut cfg = VerifierConfig::default();
        cfg.quadrature = cfg.quadrature.with_execution(exec);
        group.bench_function(name, |b| b.iter(|| run_suites(0, &[Suite::Thm2], None, &cfg).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, integrate_shapes, singularity_suite);
criterion_main!(benches);
