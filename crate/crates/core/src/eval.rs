//! Error and space measurements on a dataset.

use serde::{Deserialize, Serialize};

use crate::batch;
use crate::codec::Codec;
use crate::dataio::{sample_pairs, VectorSet};
use crate::error::Result;
use crate::estimator::worst_case_error;
use crate::quantizer::{dot, Delta, GridParams};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub dataset: String,
    pub d: usize,
    pub delta: String,
    pub delta_value: f64,
    pub s: u64,
    pub code_bits: usize,
    /// Code bits over the `32 d` bits of a binary32 vector.
    pub space_ratio: f64,
    pub median_err: f64,
    pub p90_err: f64,
    pub max_err: f64,
    pub worst_case: f64,
    pub pair_count: usize,
    pub seed: u64,
}

/// Nearest-rank percentile of sorted data.
fn percentile(sorted: &[f64], p: f64) -> f64 {
    let rank = (p * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// Absolute error of the decoded inner product for each pair.
pub fn pair_errors(
    codec: &Codec,
    set: &VectorSet,
    pairs: &[(usize, usize)],
) -> Result<Vec<f64>> {
    // Only vectors that appear in some pair are encoded.
    let mut used: Vec<usize> = pairs.iter().flat_map(|&(i, j)| [i, j]).collect();
    used.sort_unstable();
    used.dedup();
    let decoded = batch::map(&used, |&i| {
        let code = codec.encode_vector(set.vectors[i].coords())?;
        codec.decode_unit(&code)
    })?;
    let slot = |i: usize| used.binary_search(&i).expect("index was collected");
    Ok(pairs
        .iter()
        .map(|&(i, j)| {
            let truth = set.vectors[i].dot(&set.vectors[j]);
            let approx = dot(decoded[slot(i)].coords(), decoded[slot(j)].coords());
            (approx - truth).abs()
        })
        .collect())
}

/// Measures one grid resolution over `pair_count` seeded pairs.
pub fn evaluate(set: &VectorSet, delta: Delta, pair_count: usize, seed: u64) -> Result<EvalReport> {
    let grid = GridParams::new(set.d, delta)?;
    let codec = Codec::new(grid);
    let pairs = sample_pairs(set.len(), pair_count, seed)?;
    let mut errs = pair_errors(&codec, set, &pairs)?;
    errs.sort_by(f64::total_cmp);
    let (median_err, p90_err, max_err) = if errs.is_empty() {
        (0.0, 0.0, 0.0)
    } else {
        (percentile(&errs, 0.5), percentile(&errs, 0.9), errs[errs.len() - 1])
    };
    let code_bits = codec.code_length();
    Ok(EvalReport {
        dataset: set.source.clone(),
        d: set.d,
        delta: delta.to_string(),
        delta_value: delta.to_f64(),
        s: grid.s(),
        code_bits,
        space_ratio: code_bits as f64 / (32 * set.d) as f64,
        median_err,
        p90_err,
        max_err,
        worst_case: worst_case_error(delta, None),
        pair_count,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataio::{normalize, RawVectors};

    #[test]
    fn percentiles() {
        let v: Vec<f64> = (1..=10).map(|i| i as f64).collect();
        assert_eq!(percentile(&v, 0.5), 5.0);
        assert_eq!(percentile(&v, 0.9), 9.0);
        assert_eq!(percentile(&[3.0], 0.5), 3.0);
    }

    #[test]
    fn small_report() {
        let raw = RawVectors {
            d: 3,
            vectors: (0..20)
                .map(|i| {
                    let t = i as f64;
                    vec![t.sin(), t.cos(), 0.3 * t]
                })
                .collect(),
            source: "spiral".into(),
        };
        let set = normalize(&raw).unwrap();
        let r = evaluate(&set, Delta::new(1, 10).unwrap(), 200, 3).unwrap();
        assert!(r.median_err <= r.p90_err && r.p90_err <= r.max_err);
        assert!(r.max_err <= r.worst_case);
        assert_eq!(r, evaluate(&set, Delta::new(1, 10).unwrap(), 200, 3).unwrap());
    }
}
