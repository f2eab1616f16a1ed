use std::hint::black_box;

use beauville::beauville::{search_exhaustive, SearchConfig};
use beauville::counting::ClassPartition;
use beauville::par::with_workers;
use beauville::probability::{estimate_beauville_probability, EstimationConfig};
use beauville::psl2::Psl2Group;
use beauville::PermGroup;
use criterion::{criterion_group, criterion_main, Criterion};

const MODES: [(&str, usize); 2] = [("sequential", 1), ("parallel", 0)];

fn monte_carlo(c: &mut Criterion) {
    let g = Psl2Group::new(101, 1).unwrap();
    let mut group = c.benchmark_group("monte_carlo_psl2_101");
    group.sample_size(10);
    for (name, workers) in MODES {
        let cfg = EstimationConfig { samples: 5_000, workers, ..EstimationConfig::default() };
        group.bench_function(name, |b| b.iter(|| black_box(estimate_beauville_probability(&g, &cfg).successes)));
    }
    group.finish();
}

fn exhaustive_search(c: &mut Criterion) {
    let g = PermGroup::alternating(7).unwrap();
    let mut group = c.benchmark_group("exhaustive_search_a7");
    group.sample_size(10);
    for (name, workers) in MODES {
        group.bench_function(name, |b| b.iter(|| with_workers(workers, || black_box(search_exhaustive(&g, &SearchConfig::default()).is_ok()))));
    }
    group.finish();
}

fn class_counting(c: &mut Criterion) {
    let g = Psl2Group::new(7, 2).unwrap();
    let mut group = c.benchmark_group("class_partition_psl2_49");
    group.sample_size(10);
    for (name, workers) in MODES {
        group.bench_function(name, |b| b.iter(|| with_workers(workers, || black_box(ClassPartition::new(&g, 1 << 20).unwrap().len()))));
    }
    group.finish();
}

criterion_group!(benches, monte_carlo, exhaustive_search, class_counting);
criterion_main!(benches);
