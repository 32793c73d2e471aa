//! Lower-bound calculators for the `(alpha, beta)` separation problem.
//!
//! Any scheme that separates inner products `>= alpha` from `<= beta` must
//! give distinct codes to every pair of points at angle at least
//! `Theta = acos(beta) - acos(alpha)`; the size of a spherical code with that
//! minimum angle therefore bounds the number of code words from below. This
//! module provides the angle gap, the witness vector that forces two points
//! apart, the cap-area and code-size estimates, and a small greedy packing
//! used to sanity-check those estimates in two to four dimensions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::quantizer::{dot, UnitVector};

/// Below this `sin(theta)` the witness construction is numerically useless.
pub const MIN_SIN: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleGap {
    pub alpha: f64,
    pub beta: f64,
    /// `acos(beta) - acos(alpha)`.
    pub theta: f64,
    /// `(pi / 2) (alpha - beta) / sqrt(1 - beta)`, never below `theta`.
    pub bound: f64,
}

fn check(alpha: f64, beta: f64) -> Result<()> {
    if alpha.is_finite() && beta.is_finite() && 0.0 <= beta && beta < alpha && alpha <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidThresholds { alpha, beta })
    }
}

pub fn theta_gap(alpha: f64, beta: f64) -> Result<AngleGap> {
    check(alpha, beta)?;
    let theta = beta.acos() - alpha.acos();
    let bound = PI / 2.0 * (alpha - beta) / (1.0 - beta).sqrt();
    debug_assert!(theta <= bound * (1.0 + 1e-12) + 1e-15, "{theta} > {bound}");
    Ok(AngleGap {
        alpha,
        beta,
        theta,
        bound,
    })
}

/// Slack on the upper angle limit of [`witness`], in radians.
const ANGLE_SLACK: f64 = 1e-9;

/// Unit vector `y` with `<x1, y> = beta` and `<x2, y> >= alpha`.
///
/// Such a `y` exists only when the angle between `x1` and `x2` lies in
/// `[Theta, acos(beta) + acos(alpha)]`; wider angles give
/// [`Error::AngleTooWide`].
pub fn witness(x1: &UnitVector, x2: &UnitVector, beta: f64, alpha: f64) -> Result<UnitVector> {
    let gap = theta_gap(alpha, beta)?;
    if x1.dim() != x2.dim() {
        return Err(Error::DimensionMismatch {
            expected: x1.dim(),
            got: x2.dim(),
        });
    }
    let cos = x1.dot(x2).clamp(-1.0, 1.0);
    let sin = (1.0 - cos * cos).sqrt();
    if sin < MIN_SIN {
        return Err(Error::DegenerateAngle);
    }
    let theta = cos.acos();
    if theta < gap.theta {
        return Err(Error::GapViolated {
            theta,
            gap: gap.theta,
        });
    }
    let limit = beta.acos() + alpha.acos();
    if theta > limit + ANGLE_SLACK {
        return Err(Error::AngleTooWide { theta, limit });
    }
    let r = (1.0 - beta * beta).sqrt();
    let c1 = beta - r * cos / sin;
    let c2 = r / sin;
    let y: Vec<f64> = x1
        .coords()
        .iter()
        .zip(x2.coords())
        .map(|(a, b)| c1 * a + c2 * b)
        .collect();
    Ok(UnitVector::normalize(y)?.0)
}

/// `ln` of the volume constant `pi^(n/2) / Gamma(n/2 + 1)`.
fn ln_ball_constant(n: usize) -> f64 {
    let half = n as f64 / 2.0;
    half * PI.ln() - ln_gamma(half + 1.0)
}

/// `2 (1 - cos theta)`, computed as `4 sin^2(theta / 2)` to keep precision
/// for small angles.
fn chord_sq(theta: f64) -> f64 {
    let s = (theta / 2.0).sin();
    4.0 * s * s
}

/// `log2` of the upper bound `c_{d-1} d (2(1 - cos theta))^((d-1)/2)` on the
/// surface area of a spherical cap of polar angle `theta`.
pub fn cap_area_bound(theta: f64, d: usize) -> f64 {
    let ln2 = std::f64::consts::LN_2;
    ln_ball_constant(d - 1) / ln2 + (d as f64).log2() + (d as f64 - 1.0) / 2.0 * chord_sq(theta).log2()
}

/// `log2` of the lower bound `(2(1 - cos theta))^(-(d-1)/2) / (3 sqrt d)` on
/// the size of a code with pairwise angles above `theta`. May be negative.
pub fn code_size_lb(theta: f64, d: usize) -> f64 {
    -(d as f64 - 1.0) / 2.0 * chord_sq(theta).log2() - (3.0 * (d as f64).sqrt()).log2()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceLowerBound {
    pub gap: AngleGap,
    /// `max(0, code_size_lb(theta, d))` bits.
    pub bits: f64,
    /// `d log2(sqrt(1 - beta) / (alpha - beta))`, the leading term.
    pub asymptotic: f64,
}

/// Bits any separating scheme needs in dimension `d`.
pub fn space_lb(alpha: f64, beta: f64, d: usize) -> Result<SpaceLowerBound> {
    let gap = theta_gap(alpha, beta)?;
    if d < 2 {
        return Err(Error::InvalidDimension);
    }
    Ok(SpaceLowerBound {
        gap,
        bits: code_size_lb(gap.theta, d).max(0.0),
        asymptotic: d as f64 * ((1.0 - beta).sqrt() / (alpha - beta)).log2(),
    })
}

/// Greedy packing produced by [`greedy_sphere_code`].
#[derive(Debug, Clone, PartialEq)]
pub struct SphereCode {
    pub points: Vec<UnitVector>,
    /// Smallest pairwise angle among the accepted points (`pi` for one point).
    pub theta: f64,
    pub target: f64,
    /// Every probe point lies within `target` of an accepted point, i.e. the
    /// caps around the code cover the sphere.
    pub saturated: bool,
}

impl SphereCode {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Errors with [`Error::BudgetTooSmall`] unless the packing looks complete.
    pub fn ensure_saturated(&self) -> Result<&Self> {
        if self.saturated {
            Ok(self)
        } else {
            Err(Error::BudgetTooSmall)
        }
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * inv;
        i /= base;
        inv /= base as f64;
    }
    out
}

/// Candidate `j` of `n` on the sphere in `d` dimensions.
///
/// The circle is swept at equal angular steps; three and four dimensions use
/// Halton points pushed through area-preserving maps.
fn candidate(d: usize, j: u64, n: u64) -> Vec<f64> {
    let tau = 2.0 * PI;
    match d {
        2 => {
            let phi = tau * j as f64 / n as f64;
            vec![phi.cos(), phi.sin()]
        }
        3 => {
            let z = 1.0 - 2.0 * radical_inverse(j, 2);
            let phi = tau * radical_inverse(j, 3);
            let r = (1.0 - z * z).max(0.0).sqrt();
            vec![r * phi.cos(), r * phi.sin(), z]
        }
        _ => {
            let u = radical_inverse(j, 2);
            let (v, w) = (tau * radical_inverse(j, 3), tau * radical_inverse(j, 5));
            let (r1, r2) = (u.sqrt(), (1.0 - u).sqrt());
            vec![r1 * v.cos(), r1 * v.sin(), r2 * w.cos(), r2 * w.sin()]
        }
    }
}

const COVERAGE_PROBES: u64 = 4096;

/// Probe points for the coverage check, disjoint from the candidate stream.
fn probe(d: usize, j: u64) -> Vec<f64> {
    if d == 2 {
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        let phi = 2.0 * PI * ((j as f64 + 0.5) * golden).fract();
        return vec![phi.cos(), phi.sin()];
    }
    candidate(d, j + (1 << 40), 0)
}

/// Deterministic greedy spherical code in `d` in `{2, 3, 4}` dimensions:
/// walk `budget` candidates and keep each one whose angle to every kept point
/// exceeds `theta`.
pub fn greedy_sphere_code(d: usize, theta: f64, budget: u64) -> Result<SphereCode> {
    if !(2..=4).contains(&d) {
        return Err(Error::InvalidDimension);
    }
    if !(theta > 0.0 && theta < PI) || budget == 0 {
        return Err(Error::GapViolated { theta, gap: 0.0 });
    }
    let max_dot = theta.cos();
    let mut points: Vec<Vec<f64>> = Vec::new();
    for j in 0..budget {
        let c = candidate(d, j, budget);
        if points.iter().all(|p| dot(p, &c) < max_dot) {
            points.push(c);
        }
    }
    let saturated = (0..COVERAGE_PROBES)
        .map(|j| probe(d, j))
        .all(|q| points.iter().any(|p| dot(p, &q) >= max_dot));
    let mut min_angle = PI;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            min_angle = min_angle.min(dot(p, q).clamp(-1.0, 1.0).acos());
        }
    }
    let points = points
        .into_iter()
        .map(|p| UnitVector::normalize(p).map(|(u, _)| u))
        .collect::<Result<Vec<_>>>()?;
    Ok(SphereCode {
        points,
        theta: min_angle,
        target: theta,
        saturated,
    })
}
