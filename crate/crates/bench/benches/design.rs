use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use nfmimo::grid::GridAxis;
use nfmimo::nonparaxial::four_subarray_cubic;
use nfmimo::{
    grid_search, solve_chain, solve_four_subarrays, ArrayGeometry, GridSpec, ObjectiveChannel, SpacingTemplate, Waveband,
};

fn bench_design(c: &mut Criterion) {
    let w = Waveband::from_ghz(28.0).unwrap();
    let tx = ArrayGeometry::linear(16, w.lam(0.5)).unwrap();
    let y = w.lam(256.0);

    c.bench_function("cardano four-sub cubic", |b| b.iter(|| four_subarray_cubic(black_box(12), 12, 1.0).cardano_roots()));
    c.bench_function("solve_four_subarrays", |b| b.iter(|| solve_four_subarrays(&tx, black_box(12), 12, y, w).unwrap()));
    c.bench_function("solve_chain 3 pairs", |b| b.iter(|| solve_chain(&tx, black_box(&[8, 8, 8]), y, w).unwrap()));

    let p = solve_four_subarrays(&tx, 12, 12, y, w).unwrap().partition.unwrap();
    let spec = GridSpec::new(vec![GridAxis::new(20.0, 30.0, 1.0); 2], ObjectiveChannel::Exact);
    let mut g = c.benchmark_group("grid");
    g.sample_size(10);
    g.bench_function("grid_search 11x11 exact", |b| {
        b.iter(|| grid_search(&tx, &SpacingTemplate::Partition(p.clone()), w, black_box(&spec)).unwrap())
    });
    g.finish();
}

criterion_group!(benches, bench_design);
criterion_main!(benches);
