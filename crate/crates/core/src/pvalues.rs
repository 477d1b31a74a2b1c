//! Conformal p-values.

use crate::error::{Error, Result};
use crate::scores::ScoreMatrix;

/// `(1 + #{V_i ≤ V̂}) / (n2 + 1)`.
pub fn conformal_pvalue(cal_scores: &[f64], test_score: f64) -> Result<f64> {
    if cal_scores.is_empty() {
        return Err(Error::EmptyCalibration);
    }
    let count = cal_scores.iter().filter(|&&v| v <= test_score).count();
    Ok((1 + count) as f64 / (cal_scores.len() + 1) as f64)
}

/// Tie-randomized p-value `(#{V_i < V̂} + u·(1 + #{V_i = V̂})) / (n2 + 1)`.
pub fn conformal_pvalue_randomized(cal_scores: &[f64], test_score: f64, u: f64) -> Result<f64> {
    if cal_scores.is_empty() {
        return Err(Error::EmptyCalibration);
    }
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::InvalidParameter(format!("tie-break u must lie in [0,1], got {u}")));
    }
    let less = cal_scores.iter().filter(|&&v| v < test_score).count();
    let ties = cal_scores.iter().filter(|&&v| v == test_score).count();
    Ok((less as f64 + u * (1 + ties) as f64) / (cal_scores.len() + 1) as f64)
}

/// `p_j` from row `j`: calibration block against the test entry at `n2 + j`.
pub fn pvalues_from_matrix(scores: &ScoreMatrix) -> Vec<f64> {
    (0..scores.m())
        .map(|j| {
            conformal_pvalue(scores.calibration(j), scores.test(j)[j])
                .expect("score matrix has a non-empty calibration block")
        })
        .collect()
}

/// Calibration scores kept in sorted order so that `#{V_i ≤ t}` is a binary
/// search.
#[derive(Debug, Clone)]
pub struct SortedCalibration {
    sorted: Vec<f64>,
}

impl SortedCalibration {
    pub fn new(cal_scores: &[f64]) -> Self {
        let mut sorted = cal_scores.to_vec();
        sorted.sort_by(f64::total_cmp);
        Self { sorted }
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// `#{V_i ≤ t}`.
    pub fn count_le(&self, t: f64) -> usize {
        self.sorted.partition_point(|&v| v <= t)
    }
}

/// Modified p-values `p̃_ℓ^{(j)}` for every `ℓ ≠ j` (0-based `j`), in order of
/// increasing `ℓ`:
/// `(#{V_i ≤ V̂_ℓ} + 1{V̂_j ≤ V̂_ℓ}) / (n2 + 1)`.
pub fn modified_pvalues_for_j(cal_scores: &[f64], test_scores: &[f64], j: usize) -> Result<Vec<f64>> {
    if j >= test_scores.len() {
        return Err(Error::IndexOutOfRange {
            index: j,
            len: test_scores.len(),
        });
    }
    let cal = SortedCalibration::new(cal_scores);
    let base: Vec<usize> = test_scores.iter().map(|&t| cal.count_le(t)).collect();
    Ok(modified_from_counts(&base, test_scores, j, cal.len()))
}

/// Same as [`modified_pvalues_for_j`] with `#{V_i ≤ V̂_ℓ}` precomputed.
pub(crate) fn modified_from_counts(base: &[usize], test_scores: &[f64], j: usize, n2: usize) -> Vec<f64> {
    let denom = (n2 + 1) as f64;
    let vj = test_scores[j];
    test_scores
        .iter()
        .zip(base)
        .enumerate()
        .filter(|(l, _)| *l != j)
        .map(|(_, (&vl, &b))| (b + usize::from(vj <= vl)) as f64 / denom)
        .collect()
}
