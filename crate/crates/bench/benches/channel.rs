use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use nfmimo::spectral::{effective_rank, gram, gram_eigenvalues};
use nfmimo::{exact_channel, expand_uniform, quartic_channel, ArrayGeometry, Point3, Waveband};

fn arrays(w: Waveband) -> (ArrayGeometry, ArrayGeometry) {
    let tx = ArrayGeometry::linear(16, w.lam(0.5)).unwrap();
    let rx = ArrayGeometry::linear(48, w.lam(256.0 / 24.0)).unwrap().with_center(Point3::new(0.0, w.lam(256.0), 0.0)).unwrap();
    (tx, rx)
}

fn bench_channel(c: &mut Criterion) {
    let w = Waveband::from_ghz(28.0).unwrap();
    let (tx, rx) = arrays(w);
    let (lt, lr) = (expand_uniform(&tx), expand_uniform(&rx));
    c.bench_function("exact_channel 48x16", |b| b.iter(|| exact_channel(black_box(&lt), black_box(&lr), w).unwrap()));
    c.bench_function("quartic_channel 48x16", |b| b.iter(|| quartic_channel(black_box(&tx), black_box(&rx), w).unwrap()));
    let h = exact_channel(&lt, &lr, w).unwrap();
    c.bench_function("effective_rank 16x16 gram", |b| {
        b.iter(|| effective_rank(&gram_eigenvalues(&gram(black_box(&h))).unwrap()).unwrap())
    });
}

criterion_group!(benches, bench_channel);
criterion_main!(benches);
