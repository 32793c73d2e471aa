//! Inner-product estimation and threshold decisions on code words.

use serde::{Deserialize, Serialize};

use crate::codec::{CodeWord, Codec};
use crate::error::{Error, Result};
use crate::quantizer::{shared_grid_ok, Delta, ThresholdSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Decision {
    PassesThreshold,
    Eliminated,
}

/// Outcome of a threshold test on one pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairVerdict {
    pub decision: Decision,
    pub estimate: f64,
    pub threshold: f64,
}

impl PairVerdict {
    fn new(estimate: f64, threshold: f64) -> Self {
        let decision = if estimate >= threshold {
            Decision::PassesThreshold
        } else {
            Decision::Eliminated
        };
        PairVerdict {
            decision,
            estimate,
            threshold,
        }
    }

    pub fn passes(&self) -> bool {
        self.decision == Decision::PassesThreshold
    }
}

fn check_grid(codec: &Codec, a: &CodeWord, b: &CodeWord) -> Result<()> {
    if a.grid() != codec.grid() || b.grid() != codec.grid() {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// Inner product of the two decoded unit vectors.
pub fn estimate_inner(codec: &Codec, a: &CodeWord, b: &CodeWord) -> Result<f64> {
    check_grid(codec, a, b)?;
    let x = codec.decode_unit(a)?;
    let y = codec.decode_unit(b)?;
    Ok(x.dot(&y))
}

/// Threshold a grid of this codec must use for `spec`.
///
/// The planned grid uses `spec.t`; any other grid that still satisfies the
/// shared-grid bound gets the threshold recomputed for its own resolution.
pub fn threshold_for(codec: &Codec, spec: &ThresholdSpec) -> Result<f64> {
    let delta = codec.grid().delta();
    if delta == spec.delta {
        return Ok(spec.t);
    }
    if !shared_grid_ok(delta, spec.alpha, spec.beta)? {
        return Err(Error::SpecIncompatible {
            alpha: spec.alpha,
            beta: spec.beta,
        });
    }
    Ok(spec.threshold_for(delta))
}

/// Separates `<x,y> >= alpha` (passes) from `<x,y> <= beta` (eliminated).
/// Pairs strictly between the two may get either verdict.
pub fn distinguish(
    codec: &Codec,
    a: &CodeWord,
    b: &CodeWord,
    spec: &ThresholdSpec,
) -> Result<PairVerdict> {
    let t = threshold_for(codec, spec)?;
    Ok(PairVerdict::new(estimate_inner(codec, a, b)?, t))
}

/// Largest possible `|<f(x), f(y)> - <x, y>|` for unit inputs at distance at
/// most `dist_hint` (2 when absent): `dist * delta + delta^2 / 2`.
pub fn worst_case_error(delta: Delta, dist_hint: Option<f64>) -> f64 {
    let dist = dist_hint.unwrap_or(2.0).clamp(0.0, 2.0);
    let delta = delta.to_f64();
    dist * delta + delta * delta / 2.0
}

/// Per-pair verdicts plus the partition into survivors and eliminated pairs
/// (as indices into the input, in input order).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterOutcome {
    pub verdicts: Vec<PairVerdict>,
    pub survivors: Vec<usize>,
    pub eliminated: Vec<usize>,
}

impl FilterOutcome {
    pub(crate) fn from_verdicts(verdicts: Vec<PairVerdict>) -> Self {
        let (survivors, eliminated) = (0..verdicts.len()).partition(|&i| verdicts[i].passes());
        FilterOutcome {
            verdicts,
            survivors,
            eliminated,
        }
    }

    /// Survivor indices ordered by descending estimate (ties by index).
    pub fn survivors_by_estimate(&self) -> Vec<usize> {
        let mut out = self.survivors.clone();
        out.sort_by(|&i, &j| {
            self.verdicts[j]
                .estimate
                .total_cmp(&self.verdicts[i].estimate)
                .then(i.cmp(&j))
        });
        out
    }
}

/// Candidate-pair filter: no pair with true inner product `>= alpha` is ever
/// eliminated.
pub fn filter_pairs(
    codec: &Codec,
    pairs: &[(CodeWord, CodeWord)],
    spec: &ThresholdSpec,
) -> Result<FilterOutcome> {
    let t = threshold_for(codec, spec)?;
    let verdicts = crate::batch::map(pairs, |(a, b)| {
        estimate_inner(codec, a, b).map(|e| PairVerdict::new(e, t))
    })?;
    Ok(FilterOutcome::from_verdicts(verdicts))
}
