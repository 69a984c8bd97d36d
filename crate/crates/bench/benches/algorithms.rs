use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion, Throughput};
use recourse_bench::{arrivals, bounded_arboricity, forest, single_edge_sequence};
use recourse_core::allflip::af_run_sequence;
use recourse_core::bmatch::bm_run_sequence;
use recourse_core::oracle::min_max_indegree;
use recourse_core::orient_sp::{greedy_run_sequence, sp_run_sequence};
use recourse_core::{AllFlipConfig, BMatchConfig, OracleMode, SpConfig};

fn shortest_path(c: &mut Criterion) {
    let mut g = c.benchmark_group("orient-sp");
    for n in [1_000, 10_000, 100_000] {
        let edges = forest(n);
        g.throughput(Throughput::Elements(n as u64));
        g.bench_with_input(BenchmarkId::new("forest", n), &edges, |b, e| {
            b.iter(|| sp_run_sequence(SpConfig::new(2), e).unwrap())
        });
    }
    let edges = forest(10_000);
    g.bench_function("greedy/10000", |b| {
        b.iter(|| greedy_run_sequence(&edges).unwrap())
    });
    for rounds in [3, 4] {
        let seq = single_edge_sequence(rounds);
        g.throughput(Throughput::Elements(seq.len() as u64));
        g.bench_with_input(BenchmarkId::new("single-edge", rounds), &seq, |b, e| {
            b.iter(|| sp_run_sequence(SpConfig::new(2), e).unwrap())
        });
    }
    g.finish();
}

fn all_flip(c: &mut Criterion) {
    let mut g = c.benchmark_group("orient-allflip");
    for forests in [1, 2, 4] {
        let edges = bounded_arboricity(2_000, forests);
        let config = AllFlipConfig::new(forests, 2 * forests).unwrap();
        g.throughput(Throughput::Elements(edges.len() as u64));
        g.bench_with_input(BenchmarkId::new("delta", forests), &edges, |b, e| {
            b.iter(|| af_run_sequence(config, e).unwrap())
        });
    }
    g.finish();
}

fn b_matching(c: &mut Criterion) {
    let mut g = c.benchmark_group("bmatch");
    for (k, cap) in [(1, 2), (2, 2), (1, 3)] {
        let input = arrivals(10_000, k);
        let config = BMatchConfig::new(k, cap).unwrap();
        g.throughput(Throughput::Elements(input.len() as u64));
        g.bench_with_input(BenchmarkId::new(format!("K{k}"), cap), &input, |b, a| {
            b.iter(|| bm_run_sequence(config, a).unwrap())
        });
    }
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let edges = bounded_arboricity(12, 2);
    c.bench_function("oracle/feasibility", |b| {
        b.iter_batched(
            || edges.clone(),
            |e| min_max_indegree(&e, OracleMode::Feasibility).unwrap(),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, shortest_path, all_flip, b_matching, oracle);
criterion_main!(benches);
