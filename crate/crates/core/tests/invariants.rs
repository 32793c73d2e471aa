mod common;

use common::{dist, planted_pair, random_unit};
use ipquant::codec::{read_container, write_container};
use ipquant::{
    code_length, estimate_inner, quantize, reconstruct, Codec, CompositionIndex, Delta,
    GridParams,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SLACK: f64 = 1.0 / (1u64 << 30) as f64;

fn grid_strategy() -> impl Strategy<Value = GridParams> {
    (1usize..48, 1u32..4, 1u32..300).prop_filter_map("delta <= 1", |(d, num, den)| {
        let delta = Delta::new(num, den).ok()?;
        GridParams::new(d, delta).ok()
    })
}

fn f(x: &[f64], grid: &GridParams) -> Vec<f64> {
    reconstruct(&quantize(x, grid).unwrap()).unwrap().into_inner()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn round_trip_and_length(grid in grid_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_unit(&mut rng, grid.d());
        let codec = Codec::new(grid);
        let Ok(z) = quantize(x.coords(), &grid) else { return Ok(()) };
        let w = codec.encode(&z).unwrap();
        prop_assert_eq!(w.len_bits(), code_length(grid.d(), grid.delta()).unwrap());
        prop_assert_eq!(codec.decode(&w).unwrap(), z);
    }

    #[test]
    fn coordinate_error_and_budget(grid in grid_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_unit(&mut rng, grid.d());
        let Ok(z) = quantize(x.coords(), &grid) else { return Ok(()) };
        prop_assert!(z.magnitude_sum() <= grid.s());
        let step = grid.delta().to_f64() / (grid.d() as f64).sqrt();
        for (xi, zi) in x.coords().iter().zip(z.coords()) {
            prop_assert!((xi - *zi as f64 * step).abs() <= step / 2.0 + SLACK);
        }
        let fx = reconstruct(&z).unwrap();
        prop_assert!(dist(x.coords(), fx.coords()) <= grid.delta().to_f64() / 2.0 + SLACK);
    }

    #[test]
    fn distortion_and_inner_product(grid in grid_strategy(), seed in any::<u64>(), ip in -1.0f64..1.0) {
        prop_assume!(grid.d() >= 2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (x, y) = planted_pair(&mut rng, grid.d(), ip);
        let (Ok(zx), Ok(zy)) = (quantize(x.coords(), &grid), quantize(y.coords(), &grid)) else {
            return Ok(());
        };
        let (fx, fy) = (reconstruct(&zx).unwrap(), reconstruct(&zy).unwrap());
        let delta = grid.delta().to_f64();
        let before = dist(x.coords(), y.coords());
        let after = dist(fx.coords(), fy.coords());
        prop_assert!(after <= before + delta + SLACK);
        prop_assert!(after >= before - delta - SLACK);
        let err = (fx.dot(&fy) - x.dot(&y)).abs();
        prop_assert!(err <= before * delta + delta * delta / 2.0 + SLACK);
    }

    #[test]
    fn estimate_is_symmetric(grid in grid_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let codec = Codec::new(grid);
        let a = codec.encode_vector(random_unit(&mut rng, grid.d()).coords());
        let b = codec.encode_vector(random_unit(&mut rng, grid.d()).coords());
        let (Ok(a), Ok(b)) = (a, b) else { return Ok(()) };
        prop_assert_eq!(
            estimate_inner(&codec, &a, &b).unwrap(),
            estimate_inner(&codec, &b, &a).unwrap()
        );
    }

    #[test]
    fn requantizing_stays_close(grid in grid_strategy(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_unit(&mut rng, grid.d());
        let Ok(z) = quantize(x.coords(), &grid) else { return Ok(()) };
        let fx = reconstruct(&z).unwrap().into_inner();
        let ffx = f(&fx, &grid);
        prop_assert!(dist(&fx, &ffx) <= grid.delta().to_f64() / 2.0 + SLACK);
    }

    #[test]
    fn code_length_is_monotone(d in 1usize..300, den in 1u32..500) {
        let coarse = code_length(d, Delta::new(1, den).unwrap()).unwrap();
        let fine = code_length(d, Delta::new(1, den + 1).unwrap()).unwrap();
        let wider = code_length(d + 1, Delta::new(1, den).unwrap()).unwrap();
        prop_assert!(fine >= coarse);
        prop_assert!(wider > coarse);
    }

    #[test]
    fn rank_round_trip(grid in grid_strategy(), parts in prop::collection::vec(0u64..60, 48)) {
        let codec = Codec::new(grid);
        let mut parts = parts[..grid.d()].to_vec();
        // Trim to the budget from the back.
        let mut sum: u64 = parts.iter().sum();
        for p in parts.iter_mut().rev() {
            let cut = (*p).min(sum.saturating_sub(grid.s()));
            *p -= cut;
            sum -= cut;
        }
        let index = codec.rank(&parts).unwrap();
        prop_assert!(index.value() < codec.composition_count());
        prop_assert_eq!(codec.unrank(&index).unwrap(), parts.clone());
        let back = CompositionIndex::from(index.into_inner());
        prop_assert_eq!(codec.unrank(&back).unwrap(), parts);
    }

    #[test]
    fn container_round_trip(grid in grid_strategy(), seed in any::<u64>(), n in 0usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let codec = Codec::new(grid);
        let codes: Vec<_> = (0..n)
            .filter_map(|_| codec.encode_vector(random_unit(&mut rng, grid.d()).coords()).ok())
            .collect();
        let norms: Vec<f64> = (0..codes.len()).map(|i| 1.0 + i as f64).collect();
        let mut buf = Vec::new();
        write_container(&mut buf, &grid, &codes, Some(&norms)).unwrap();
        let back = read_container(&mut buf.as_slice()).unwrap();
        prop_assert_eq!(back.grid, grid);
        prop_assert_eq!(back.codes, codes);
        prop_assert_eq!(back.norms, Some(norms));
    }
}

#[test]
fn axis_vectors_are_fixed_points() {
    for d in [1usize, 2, 7, 64] {
        for den in [1u32, 3, 10, 100] {
            let grid = GridParams::new(d, Delta::new(1, den).unwrap()).unwrap();
            for i in 0..d {
                for sign in [1.0, -1.0] {
                    let mut x = vec![0.0; d];
                    x[i] = sign;
                    assert_eq!(f(&x, &grid), x);
                }
            }
        }
    }
}
