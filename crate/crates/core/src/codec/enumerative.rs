//! Lexicographic ranking of bounded compositions.
//!
//! The objects ranked are sequences `(a_1, ..., a_d)` of nonnegative integers
//! with `sum a_i <= s`; there are `C(s + d, d)` of them. The rank of a sequence
//! is the number of sequences that precede it lexicographically. With `r`
//! coordinates left and budget `b`, the sequences whose next coordinate is
//! below `a` number
//!
//! ```text
//! sum_{v < a} C(b - v + r - 1, r - 1) = C(b + r, r) - C(b - a + r, r)
//! ```
//!
//! so each coordinate costs one binomial update instead of `a` of them.
//! Consecutive binomials are related by small rational factors, which keeps
//! the work proportional to `sum a_i` small-integer multiplications rather than
//! full binomial evaluations.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Product of the given small factors.
fn product<I: IntoIterator<Item = u64>>(factors: I) -> BigUint {
    let mut acc = BigUint::one();
    let mut word: u64 = 1;
    for f in factors {
        match word.checked_mul(f) {
            Some(w) => word = w,
            None => {
                acc *= word;
                word = f;
            }
        }
    }
    acc *= word;
    acc
}

/// `value * prod(numer) / prod(denom)`; the caller guarantees exactness.
fn scale_exact<I, J>(value: &BigUint, numer: I, denom: J) -> BigUint
where
    I: IntoIterator<Item = u64>,
    J: IntoIterator<Item = u64>,
{
    let p = product(numer);
    let q = product(denom);
    (value * p) / q
}

/// `C(n, k)` with arbitrary precision.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    scale_exact(&BigUint::one(), (n - k + 1)..=n, 1..=k)
}

/// Given `c = C(n, k)`, returns `C(n - steps, k)`. Requires `n - steps >= k`.
fn shift_down(c: &BigUint, n: u64, k: u64, steps: u64) -> BigUint {
    debug_assert!(n >= steps && n - steps >= k);
    if steps == 0 {
        return c.clone();
    }
    let target = n - steps;
    let fresh_cost = k.min(target - k);
    if fresh_cost <= steps {
        return binomial(target, k);
    }
    if steps <= k {
        // C(m - 1, k) = C(m, k) * (m - k) / m, applied `steps` times
        scale_exact(c, (0..steps).map(|j| n - k - j), (0..steps).map(|j| n - j))
    } else {
        // n!/(n-k)! over (n-steps)!/(n-steps-k)!
        scale_exact(c, (0..k).map(|j| target - j), (0..k).map(|j| n - j))
    }
}

/// `C(n + 1, k)` from `C(n, k)`.
fn step_up(c: &BigUint, n: u64, k: u64) -> BigUint {
    (c * (n + 1)) / (n + 1 - k)
}

/// `C(n - 1, k - 1)` from `C(n, k)`.
fn drop_rank(c: &BigUint, n: u64, k: u64) -> BigUint {
    (c * k) / n
}

/// Rank of `parts` among sequences of the same length with sum at most
/// `budget`. `total` must equal `C(budget + len, len)`; the caller checks the
/// sum.
pub(crate) fn rank(parts: &[u64], budget: u64, total: &BigUint) -> BigUint {
    let d = parts.len() as u64;
    let mut rank = BigUint::zero();
    let mut b = budget;
    let mut t1 = total.clone();
    for (i, &a) in parts.iter().enumerate() {
        let k = d - i as u64;
        let t2 = shift_down(&t1, b + k, k, a);
        rank += &t1 - &t2;
        b -= a;
        if k > 1 {
            t1 = drop_rank(&t2, b + k, k);
        }
    }
    rank
}

/// Base-2 scaled float `mantissa * 2^exp`, used to steer the unranking walk.
#[derive(Clone, Copy)]
struct Scaled {
    mantissa: f64,
    exp: i64,
}

impl Scaled {
    fn of(x: &BigUint) -> Self {
        let bits = x.bits();
        if bits <= 64 {
            return Scaled {
                mantissa: x.to_u64().unwrap_or(0) as f64,
                exp: 0,
            };
        }
        let shift = bits - 64;
        let top = (x >> shift).to_u64().unwrap_or(u64::MAX);
        Scaled {
            mantissa: top as f64,
            exp: shift as i64,
        }
    }

    fn log2(self) -> f64 {
        self.mantissa.log2() + self.exp as f64
    }
}

/// Largest `a` in `[0, b]` with `C(b - a + k, k) >= floor`, starting from
/// `t1 = C(b + k, k)`. Returns `a` and `C(b - a + k, k)`.
fn find_part(t1: &BigUint, b: u64, k: u64, floor: &BigUint) -> (u64, BigUint) {
    if b == 0 || t1 == floor {
        return (0, t1.clone());
    }
    // Float walk over ratio(a) = C(b - a + k, k) / C(b + k, k).
    let target = Scaled::of(floor).log2() - Scaled::of(t1).log2();
    // prod * 2^log_ratio tracks the ratio; stop once it drops below 2^target.
    let mut log_ratio = 0.0f64;
    let mut prod = 1.0f64;
    let mut cutoff = (target - log_ratio).exp2();
    let mut guess = 0u64;
    while guess < b {
        let j = guess;
        prod *= (b - j) as f64 / (b + k - j) as f64;
        if prod < 1e-200 {
            log_ratio += prod.log2();
            prod = 1.0;
            cutoff = (target - log_ratio).exp2();
        }
        if prod < cutoff {
            break;
        }
        guess += 1;
    }
    // Exact correction around the float estimate.
    let mut a = guess;
    let mut c = shift_down(t1, b + k, k, a);
    while &c < floor {
        // C(b - a + k + 1, k) from C(b - a + k, k)
        c = step_up(&c, b - a + k, k);
        a -= 1;
    }
    while a < b {
        let next = shift_down(&c, b - a + k, k, 1);
        if &next < floor {
            break;
        }
        c = next;
        a += 1;
    }
    (a, c)
}

/// Inverse of [`rank`]. `index` must be below `total = C(budget + len, len)`.
pub(crate) fn unrank(index: &BigUint, len: usize, budget: u64, total: &BigUint) -> Vec<u64> {
    let d = len as u64;
    let mut parts = Vec::with_capacity(len);
    let mut residual = index.clone();
    let mut b = budget;
    let mut t1 = total.clone();
    for i in 0..len {
        let k = d - i as u64;
        if k == 1 {
            // C(b - a + 1, 1) = b - a + 1, so a is the residual itself.
            let a = residual.to_u64().expect("residual below budget");
            parts.push(a);
            break;
        }
        let floor = &t1 - &residual;
        let (a, t2) = find_part(&t1, b, k, &floor);
        residual -= &t1 - &t2;
        b -= a;
        t1 = drop_rank(&t2, b + k, k);
        parts.push(a);
    }
    parts
}

/// `ceil(log2(count))` for `count >= 1`.
pub(crate) fn ceil_log2(count: &BigUint) -> usize {
    debug_assert!(!count.is_zero());
    (count - 1u32).bits() as usize
}
