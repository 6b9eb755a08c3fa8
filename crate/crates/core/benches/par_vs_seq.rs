use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use gencol::bigo::{law_suite, LawSuiteConfig};
use gencol::colombeau::{is_moderate, is_negligible, parse_repnet, GenConfig, Interval};
use gencol::exec::Exec;
use gencol::index::{validate_index_set, FullIndex, SpecialIndex};

const MODES: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn laws(c: &mut Criterion) {
    let mut g = c.benchmark_group("law_suite_full_100");
    g.sample_size(10);
    let set = FullIndex::new();
    for (name, exec) in MODES {
        let cfg = LawSuiteConfig {
            exec,
            ..LawSuiteConfig::new(7, 100)
        };
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(law_suite(&set, &cfg)))
        });
    }
    g.finish();
}

fn validation(c: &mut Criterion) {
    let mut g = c.benchmark_group("validate_full_500");
    g.sample_size(10);
    let set = FullIndex::new();
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| black_box(validate_index_set(&set, 500, 7, exec)))
        });
    }
    g.finish();
}

fn genfun(c: &mut Criterion) {
    let mut g = c.benchmark_group("genfun");
    g.sample_size(10);
    let delta = parse_repnet("delta()^2", Interval::REAL_LINE).unwrap();
    let tiny = parse_repnet("u^12*delta(eps) + u^8*x^2", Interval::REAL_LINE).unwrap();
    for (name, exec) in MODES {
        let cfg = GenConfig {
            exec,
            ..GenConfig::default()
        };
        g.bench_function(BenchmarkId::new("moderate_delta_sq", name), |b| {
            b.iter(|| black_box(is_moderate(&delta, &SpecialIndex, &cfg).unwrap()))
        });
        g.bench_function(BenchmarkId::new("negligible", name), |b| {
            b.iter(|| black_box(is_negligible(&tiny, &SpecialIndex, &cfg).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, laws, validation, genfun);
criterion_main!(benches);
