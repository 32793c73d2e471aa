#![allow(dead_code)]

use ipquant::quantizer::dot;
use ipquant::UnitVector;
use rand::Rng;
use rand_distr::StandardNormal;

/// Uniform point on the sphere via normalized Gaussians.
pub fn random_unit<R: Rng>(rng: &mut R, d: usize) -> UnitVector {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        if let Ok((u, _)) = UnitVector::normalize(v) {
            return u;
        }
    }
}

/// Unit vector orthogonal to `x`, by one Gram-Schmidt step on a random draw.
pub fn random_orthogonal<R: Rng>(rng: &mut R, x: &UnitVector) -> UnitVector {
    loop {
        let v = random_unit(rng, x.dim());
        let c = x.dot(&v);
        let w: Vec<f64> = v.coords().iter().zip(x.coords()).map(|(a, b)| a - c * b).collect();
        if dot(&w, &w) > 1e-6 {
            return UnitVector::normalize(w).unwrap().0;
        }
    }
}

/// `cos(t) x + sin(t) u` for a random `u` orthogonal to `x`; the pair has
/// inner product `cos(t)` up to rounding.
pub fn rotate<R: Rng>(rng: &mut R, x: &UnitVector, angle: f64) -> UnitVector {
    let u = random_orthogonal(rng, x);
    let (s, c) = angle.sin_cos();
    let y: Vec<f64> = x.coords().iter().zip(u.coords()).map(|(a, b)| c * a + s * b).collect();
    UnitVector::normalize(y).unwrap().0
}

/// Random pair with inner product `ip`.
pub fn planted_pair<R: Rng>(rng: &mut R, d: usize, ip: f64) -> (UnitVector, UnitVector) {
    let x = random_unit(rng, d);
    let y = rotate(rng, &x, ip.clamp(-1.0, 1.0).acos());
    (x, y)
}

/// Pair at an angle drawn uniformly from the range where a witness exists.
pub fn witness_geometry<R: Rng>(
    rng: &mut R,
    d: usize,
    alpha: f64,
    beta: f64,
) -> (UnitVector, UnitVector) {
    let lo = beta.acos() - alpha.acos();
    let hi = (beta.acos() + alpha.acos()).min(std::f64::consts::PI - 1e-3);
    let x1 = random_unit(rng, d);
    let angle = rng.gen_range(lo + 1e-9..hi - 1e-9);
    let x2 = rotate(rng, &x1, angle);
    (x1, x2)
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
