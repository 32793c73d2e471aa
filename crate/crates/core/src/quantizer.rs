//! Grid rounding of unit vectors and the parameter planners built on it.
//!
//! A vector `x` is mapped to the integer grid vector `z` with
//! `z_i = floor(x_i * sqrt(d) / delta + 1/2)`; decoding rescales `z` by
//! `delta / sqrt(d)` and renormalizes. Every unit input satisfies
//! `sum |z_i| <= floor(d / delta + d / 2)`, which is what makes the
//! enumerative code in [`crate::codec`] possible.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inputs whose norm lies in `(1, 1 + NORM_SLACK]` are renormalized before rounding.
pub const NORM_SLACK: f64 = 1.0 / (1u64 << 20) as f64;

/// Tolerance on `| ||v|| - 1 |` for a [`UnitVector`].
pub const UNIT_TOLERANCE: f64 = 1.0 / (1u64 << 40) as f64;

/// Grid resolution as an exact fraction `num / den` in `(0, 1]`.
///
/// Always stored in lowest terms, so equal values compare equal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Delta {
    num: u32,
    den: u32,
}

impl Delta {
    pub fn new(num: u32, den: u32) -> Result<Self> {
        if num == 0 || den == 0 || num > den {
            return Err(Error::InvalidDelta {
                num: num as u64,
                den: den as u64,
            });
        }
        let g = num.gcd(&den);
        Ok(Delta {
            num: num / g,
            den: den / g,
        })
    }

    pub fn num(self) -> u32 {
        self.num
    }

    pub fn den(self) -> u32 {
        self.den
    }

    /// Correctly rounded `num / den`.
    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn to_ratio(self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den))
    }

    /// Largest fraction with denominator `u32::MAX` that does not exceed `value`.
    ///
    /// The result is exact-checked against the binary64 input, so it never
    /// rounds up.
    pub fn round_down(value: f64) -> Result<Self> {
        if value.is_nan() || value <= 0.0 || !value.is_finite() {
            return Err(Error::InvalidDelta { num: 0, den: 1 });
        }
        let value = value.min(1.0);
        let den = u32::MAX;
        let exact = BigRational::from_float(value).expect("finite");
        let mut num = (value * den as f64).floor().min(den as f64) as u64;
        while num > 0 && BigRational::new(BigInt::from(num), BigInt::from(den)) > exact {
            num -= 1;
        }
        Delta::new(num as u32, den)
    }

    /// Parses a terminating decimal exactly, e.g. `"0.1"` becomes `1/10`.
    fn from_decimal(text: &str) -> Option<Self> {
        let (int_part, frac_part) = match text.split_once('.') {
            Some((i, f)) => (i, f),
            None => (text, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return None;
        }
        if !int_part.chars().all(|c| c.is_ascii_digit())
            || !frac_part.chars().all(|c| c.is_ascii_digit())
        {
            return None;
        }
        let digits = format!("{int_part}{frac_part}");
        let num: u128 = digits.trim_start_matches('0').parse().unwrap_or(0);
        let den = 10u128.checked_pow(frac_part.len() as u32)?;
        let g = num.gcd(&den);
        let (num, den) = (num / g.max(1), den / g.max(1));
        Delta::new(u32::try_from(num).ok()?, u32::try_from(den).ok()?).ok()
    }

    /// Exact `self < value` for a binary64 `value`.
    pub fn lt_f64(self, value: f64) -> bool {
        match BigRational::from_float(value) {
            Some(v) => self.to_ratio() < v,
            None => value == f64::INFINITY,
        }
    }
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Delta {
    type Err = Error;

    /// Accepts `p/q` or a terminating decimal.
    fn from_str(text: &str) -> Result<Self> {
        let text = text.trim();
        let bad = || Error::parse(0, format!("invalid grid resolution {text:?}"));
        if let Some((p, q)) = text.split_once('/') {
            let p: u32 = p.trim().parse().map_err(|_| bad())?;
            let q: u32 = q.trim().parse().map_err(|_| bad())?;
            return Delta::new(p, q);
        }
        Delta::from_decimal(text).ok_or_else(bad)
    }
}

/// Dimension plus grid resolution, with the magnitude budget `s` cached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridParams {
    d: usize,
    delta: Delta,
    s: u64,
}

impl GridParams {
    pub fn new(d: usize, delta: Delta) -> Result<Self> {
        if d == 0 || d > u32::MAX as usize {
            return Err(Error::InvalidDimension);
        }
        // floor(d/delta + d/2) = floor((2*d*den + d*num) / (2*num))
        let (num, den, dd) = (delta.num as u128, delta.den as u128, d as u128);
        let s = (2 * dd * den + dd * num) / (2 * num);
        let s = u64::try_from(s).map_err(|_| Error::InvalidDimension)?;
        Ok(GridParams { d, delta, s })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn delta(&self) -> Delta {
        self.delta
    }

    /// Upper bound on `sum |z_i|` for unit-norm inputs.
    pub fn s(&self) -> u64 {
        self.s
    }

    /// `sqrt(d) / delta`, as two correctly rounded operations.
    fn scale(&self) -> f64 {
        (self.d as f64).sqrt() / self.delta.to_f64()
    }
}

/// A binary64 vector of unit Euclidean norm (within [`UNIT_TOLERANCE`]).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitVector(Vec<f64>);

impl UnitVector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = norm2(&coords);
        if (norm - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::NormTooLarge(norm));
        }
        Ok(UnitVector(coords))
    }

    /// Divides `coords` by its norm.
    pub fn normalize(mut coords: Vec<f64>) -> Result<(Self, f64)> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = norm2(&coords);
        if norm == 0.0 {
            return Err(Error::ZeroVector);
        }
        coords.iter_mut().for_each(|c| *c /= norm);
        Ok((UnitVector(coords), norm))
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn dot(&self, other: &UnitVector) -> f64 {
        dot(&self.0, &other.0)
    }
}

impl AsRef<[f64]> for UnitVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

/// Integer grid coordinates of a quantized vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ZVector {
    z: Vec<i64>,
    grid: GridParams,
}

impl ZVector {
    /// Wraps raw grid coordinates, checking the length and the magnitude budget.
    pub fn new(z: Vec<i64>, grid: GridParams) -> Result<Self> {
        if z.len() != grid.d {
            return Err(Error::DimensionMismatch {
                expected: grid.d,
                got: z.len(),
            });
        }
        let sum = magnitude_sum(&z);
        if sum > grid.s as u128 {
            return Err(Error::BudgetExceeded {
                sum: sum.min(u64::MAX as u128) as u64,
                budget: grid.s,
            });
        }
        Ok(ZVector { z, grid })
    }

    pub fn coords(&self) -> &[i64] {
        &self.z
    }

    pub fn grid(&self) -> &GridParams {
        &self.grid
    }

    pub fn is_zero(&self) -> bool {
        self.z.iter().all(|&v| v == 0)
    }

    pub fn magnitude_sum(&self) -> u64 {
        magnitude_sum(&self.z) as u64
    }
}

fn magnitude_sum(z: &[i64]) -> u128 {
    z.iter().map(|v| v.unsigned_abs() as u128).sum()
}

/// Ascending-index dot product; no reassociation.
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b) {
        acc += x * y;
    }
    acc
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Exact `floor(y + 1/2)` for a binary64 `y`.
///
/// Computing `(y + 0.5).floor()` directly can round the addition up across an
/// integer boundary (e.g. `y = 0.5 - 2^-54`); subtracting the floor first is
/// exact for every finite `y`.
pub(crate) fn round_half_up(y: f64) -> i64 {
    let f = y.floor();
    let frac = y - f;
    let r = if frac >= 0.5 { f + 1.0 } else { f };
    r as i64
}

/// Rounds `x` to the grid.
///
/// Norms in `(1, 1 + 2^-20]` are divided out first; anything larger is
/// rejected, as is the zero vector and any vector that rounds to zero.
pub fn quantize(x: &[f64], grid: &GridParams) -> Result<ZVector> {
    if x.len() != grid.d {
        return Err(Error::DimensionMismatch {
            expected: grid.d,
            got: x.len(),
        });
    }
    if x.iter().any(|c| !c.is_finite()) {
        return Err(Error::NonFinite);
    }
    let norm = norm2(x);
    if norm == 0.0 {
        return Err(Error::ZeroVector);
    }
    if norm > 1.0 + NORM_SLACK {
        return Err(Error::NormTooLarge(norm));
    }
    let g = grid.scale();
    let z: Vec<i64> = if norm > 1.0 {
        x.iter().map(|&c| round_half_up((c / norm) * g)).collect()
    } else {
        x.iter().map(|&c| round_half_up(c * g)).collect()
    };
    let zv = ZVector::new(z, *grid)?;
    if zv.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(zv)
}

/// Maps grid coordinates back to a unit vector: `x'_i = z_i * delta / sqrt(d)`,
/// then `x' / ||x'||`.
pub fn reconstruct(z: &ZVector) -> Result<UnitVector> {
    if z.is_zero() {
        return Err(Error::ZeroVector);
    }
    let grid = z.grid;
    let step = grid.delta.to_f64() / (grid.d as f64).sqrt();
    let mut coords: Vec<f64> = z.z.iter().map(|&v| v as f64 * step).collect();
    let norm = norm2(&coords);
    coords.iter_mut().for_each(|c| *c /= norm);
    debug_assert!((norm2(&coords) - 1.0).abs() <= UNIT_TOLERANCE);
    Ok(UnitVector(coords))
}

/// Planned solution of an `(alpha, beta)` separation instance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdSpec {
    pub alpha: f64,
    pub beta: f64,
    pub delta: Delta,
    pub t: f64,
}

impl ThresholdSpec {
    /// Decision threshold `alpha - delta*sqrt(2 - 2 alpha) - delta^2 / 2` for
    /// an arbitrary grid resolution.
    pub fn threshold_for(&self, delta: Delta) -> f64 {
        threshold(self.alpha, delta.to_f64())
    }
}

fn threshold(alpha: f64, delta: f64) -> f64 {
    alpha - delta * (2.0 - 2.0 * alpha).sqrt() - delta * delta / 2.0
}

fn check_thresholds(alpha: f64, beta: f64) -> Result<()> {
    let ok = alpha.is_finite() && beta.is_finite() && 0.0 <= beta && beta < alpha && alpha <= 1.0;
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidThresholds { alpha, beta })
    }
}

/// Grid resolution and threshold that separate `<x,y> >= alpha` from
/// `<x,y> <= beta` after quantization.
///
/// `delta = (alpha - beta) / (2 sqrt(2 - 2 beta))`, rounded down to a
/// representable fraction.
pub fn plan_distinguish(alpha: f64, beta: f64) -> Result<ThresholdSpec> {
    check_thresholds(alpha, beta)?;
    let approx = (alpha - beta) / (2.0 * (2.0 - 2.0 * beta).sqrt());
    let mut delta = Delta::round_down(approx).map_err(|_| Error::InvalidThresholds { alpha, beta })?;
    // The binary64 formula may sit above the real value; walk down until the
    // exact inequality 4 num^2 (2 - 2 beta) <= den^2 (alpha - beta)^2 holds.
    let a = BigRational::from_float(alpha).expect("finite");
    let b = BigRational::from_float(beta).expect("finite");
    let two = BigRational::from_integer(BigInt::from(2));
    let gap_sq = (&a - &b) * (&a - &b);
    let radicand = &two - &two * &b;
    let mut num = delta.num as u64;
    let den = delta.den as u64;
    loop {
        let n = BigRational::from_integer(BigInt::from(num));
        let d = BigRational::from_integer(BigInt::from(den));
        let lhs = BigRational::from_integer(BigInt::from(4)) * &n * &n * &radicand;
        let rhs = &d * &d * &gap_sq;
        if lhs <= rhs || num == 0 {
            break;
        }
        num -= 1;
    }
    if num == 0 {
        return Err(Error::InvalidThresholds { alpha, beta });
    }
    if num as u32 != delta.num {
        delta = Delta::new(num as u32, den as u32)?;
    }
    Ok(ThresholdSpec {
        alpha,
        beta,
        delta,
        t: threshold(alpha, delta.to_f64()),
    })
}

/// Grid resolution `epsilon / 4`, which bounds the inner-product error of any
/// pair of unit vectors by `epsilon`.
///
/// Decimal inputs are converted exactly (`0.1` gives `1/40`); values that do
/// not fit a 32-bit fraction are rounded down.
pub fn plan_estimate(epsilon: f64) -> Result<Delta> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::InvalidEpsilon(epsilon));
    }
    let exact = Delta::from_decimal(&format!("{epsilon}")).and_then(|e| {
        let den = (e.den as u64).checked_mul(4)?;
        Delta::new(e.num, u32::try_from(den).ok()?).ok()
    });
    match exact {
        Some(delta) => Ok(delta),
        None => Delta::round_down(epsilon / 4.0).map_err(|_| Error::InvalidEpsilon(epsilon)),
    }
}

/// Whether a grid of resolution `delta` can also separate `alpha2` from `beta2`:
/// `delta < (alpha2 - beta2) / (sqrt(2 - 2 alpha2) + sqrt(2 - 2 beta2))`, with
/// the right-hand side rounded down.
pub fn shared_grid_ok(delta: Delta, alpha2: f64, beta2: f64) -> Result<bool> {
    check_thresholds(alpha2, beta2)?;
    let rhs = (alpha2 - beta2) / ((2.0 - 2.0 * alpha2).sqrt() + (2.0 - 2.0 * beta2).sqrt());
    Ok(delta.lt_f64(rhs.next_down()))
}
