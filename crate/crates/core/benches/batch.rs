use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use ipquant::batch::map_seq;
#[cfg(feature = "parallel")]
use ipquant::batch::map_par;
use ipquant::{estimate_inner, Codec, Delta, GridParams, UnitVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

const CONFIGS: [(usize, u32); 3] = [(128, 10), (128, 100), (784, 10)];
const BATCH: usize = 64;

fn unit_vectors(d: usize, n: usize, seed: u64) -> Vec<UnitVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
            UnitVector::normalize(v).unwrap().0
        })
        .collect()
}

fn codec(d: usize, den: u32) -> Codec {
    Codec::new(GridParams::new(d, Delta::new(1, den).unwrap()).unwrap())
}

fn bench_encode(c: &mut Criterion) {
    let mut group = c.benchmark_group("encode");
    group.throughput(Throughput::Elements(BATCH as u64));
    for (d, den) in CONFIGS {
        let codec = codec(d, den);
        let xs = unit_vectors(d, BATCH, 1);
        let label = format!("d{d}_1/{den}");
        group.bench_with_input(BenchmarkId::new("seq", &label), &xs, |b, xs| {
            b.iter(|| map_seq(xs, |x| codec.encode_vector(x.coords())).unwrap())
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("par", &label), &xs, |b, xs| {
            b.iter(|| map_par(xs, |x| codec.encode_vector(x.coords())).unwrap())
        });
    }
    group.finish();
}

fn bench_decode(c: &mut Criterion) {
    let mut group = c.benchmark_group("decode");
    group.throughput(Throughput::Elements(BATCH as u64));
    for (d, den) in CONFIGS {
        let codec = codec(d, den);
        let codes = map_seq(&unit_vectors(d, BATCH, 2), |x| codec.encode_vector(x.coords())).unwrap();
        let label = format!("d{d}_1/{den}");
        group.bench_with_input(BenchmarkId::new("seq", &label), &codes, |b, codes| {
            b.iter(|| map_seq(codes, |w| codec.decode(w)).unwrap())
        });
        #[cfg(feature = "parallel")]
        group.bench_with_input(BenchmarkId::new("par", &label), &codes, |b, codes| {
            b.iter(|| map_par(codes, |w| codec.decode(w)).unwrap())
        });
    }
    group.finish();
}

fn bench_pairs(c: &mut Criterion) {
    let mut group = c.benchmark_group("estimate_pairs");
    group.throughput(Throughput::Elements(BATCH as u64));
    let (d, den) = (128, 10);
    let codec = codec(d, den);
    let codes = map_seq(&unit_vectors(d, BATCH + 1, 3), |x| codec.encode_vector(x.coords())).unwrap();
    let pairs: Vec<_> = codes.windows(2).map(|w| (w[0].clone(), w[1].clone())).collect();
    group.bench_function("seq", |b| {
        b.iter(|| map_seq(&pairs, |(x, y)| estimate_inner(&codec, x, y)).unwrap())
    });
    #[cfg(feature = "parallel")]
    group.bench_function("par", |b| {
        b.iter(|| map_par(&pairs, |(x, y)| estimate_inner(&codec, x, y)).unwrap())
    });
    group.finish();
}

fn config() -> Criterion {
    Criterion::default()
        .sample_size(10)
        .warm_up_time(Duration::from_secs(1))
        .measurement_time(Duration::from_secs(3))
}

criterion_group! {
    name = benches;
    config = config();
    targets = bench_encode, bench_decode, bench_pairs
}
criterion_main!(benches);
