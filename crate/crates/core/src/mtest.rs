//! Benjamini–Hochberg and the calibrated selection step with pruning.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// How the pruning variables `ξ_j` are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PruneMode {
    /// i.i.d. uniform per test point.
    Hete,
    /// One uniform shared by every test point.
    #[default]
    Homo,
    /// `ξ_j ≡ 1`.
    Dtm,
}

impl std::str::FromStr for PruneMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hete" => Ok(PruneMode::Hete),
            "homo" => Ok(PruneMode::Homo),
            "dtm" => Ok(PruneMode::Dtm),
            other => Err(Error::InvalidParameter(format!("unknown prune mode '{other}'"))),
        }
    }
}

/// Everything a selection run produced. Indices are 0-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionOutcome {
    pub pvalues: Vec<f64>,
    pub aux_sizes: Vec<f64>,
    pub thresholds: Vec<f64>,
    pub xi: Vec<f64>,
    pub r_star: usize,
    pub selected: Vec<usize>,
    pub selected_models: Option<Vec<usize>>,
}

impl SelectionOutcome {
    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    pub fn contains(&self, j: usize) -> bool {
        self.selected.binary_search(&j).is_ok()
    }
}

pub(crate) fn check_level(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("FDR level q must lie in (0,1), got {q}")))
    }
}

#[inline]
fn step_threshold(q: f64, r: f64, m: usize) -> f64 {
    q * r / m as f64
}

/// `r*_BH = max{r : #{p_j ≤ q·r/m} ≥ r}`.
pub fn bh_r_star(pvalues: &[f64], q: f64) -> usize {
    let m = pvalues.len();
    let mut sorted = pvalues.to_vec();
    sorted.sort_by(f64::total_cmp);
    (1..=m)
        .rev()
        .find(|&r| sorted[r - 1] <= step_threshold(q, r as f64, m))
        .unwrap_or(0)
}

/// Benjamini–Hochberg selection set (sorted 0-based indices).
pub fn bh(pvalues: &[f64], q: f64) -> Vec<usize> {
    let m = pvalues.len();
    let r = bh_r_star(pvalues, q);
    if r == 0 {
        return Vec::new();
    }
    let t = step_threshold(q, r as f64, m);
    (0..m).filter(|&j| pvalues[j] <= t).collect()
}

/// Pruning variables for `m` test points from the `XI` substream of `seed`.
pub fn draw_xi(mode: PruneMode, m: usize, seed: u64) -> Vec<f64> {
    let mut rng = rng::stream(seed, &[rng::role::XI]);
    match mode {
        PruneMode::Hete => (0..m).map(|_| rng.random::<f64>()).collect(),
        PruneMode::Homo => vec![rng.random::<f64>(); m],
        PruneMode::Dtm => vec![1.0; m],
    }
}

fn check_inputs(pvalues: &[f64], aux_sizes: &[f64], xi: &[f64]) -> Result<()> {
    if aux_sizes.len() != pvalues.len() || xi.len() != pvalues.len() {
        return Err(Error::LengthMismatch(format!(
            "{} p-values, {} auxiliary sizes, {} pruning variables",
            pvalues.len(),
            aux_sizes.len(),
            xi.len()
        )));
    }
    if let Some(r) = aux_sizes.iter().find(|r| !(r.is_finite() && **r >= 0.0)) {
        return Err(Error::InvalidParameter(format!("auxiliary size must be finite and >= 0, got {r}")));
    }
    Ok(())
}

/// Selection with externally supplied pruning variables:
/// `S = {j : p_j ≤ s_j, ξ_j·R̂_j ≤ r*}` with `s_j = q·R̂_j/m` and
/// `r* = max{r : #{j : p_j ≤ s_j, ξ_j·R̂_j ≤ r} ≥ r}`.
pub fn optcs_select_with_xi(pvalues: &[f64], aux_sizes: &[f64], q: f64, xi: Vec<f64>) -> Result<SelectionOutcome> {
    check_inputs(pvalues, aux_sizes, &xi)?;
    check_level(q)?;
    let m = pvalues.len();
    let thresholds: Vec<f64> = aux_sizes.iter().map(|&r| step_threshold(q, r, m)).collect();
    let first_stage: Vec<usize> = (0..m).filter(|&j| pvalues[j] <= thresholds[j]).collect();
    let mut weights: Vec<f64> = first_stage.iter().map(|&j| xi[j] * aux_sizes[j]).collect();
    weights.sort_by(f64::total_cmp);
    let r_star = (1..=m)
        .rev()
        .find(|&r| weights.partition_point(|&w| w <= r as f64) >= r)
        .unwrap_or(0);
    let selected = first_stage
        .into_iter()
        .filter(|&j| xi[j] * aux_sizes[j] <= r_star as f64)
        .collect();
    Ok(SelectionOutcome {
        pvalues: pvalues.to_vec(),
        aux_sizes: aux_sizes.to_vec(),
        thresholds,
        xi,
        r_star,
        selected,
        selected_models: None,
    })
}

pub fn optcs_select(
    pvalues: &[f64],
    aux_sizes: &[f64],
    q: f64,
    mode: PruneMode,
    seed: u64,
) -> Result<SelectionOutcome> {
    optcs_select_with_xi(pvalues, aux_sizes, q, draw_xi(mode, pvalues.len(), seed))
}

/// Outcome record for a plain BH run: `R̂_j ≡ |S|`, `ξ ≡ 1`.
pub(crate) fn bh_outcome(pvalues: Vec<f64>, q: f64) -> Result<SelectionOutcome> {
    check_level(q)?;
    let m = pvalues.len();
    let selected = bh(&pvalues, q);
    let r = selected.len();
    Ok(SelectionOutcome {
        thresholds: vec![step_threshold(q, r as f64, m); m],
        aux_sizes: vec![r as f64; m],
        xi: vec![1.0; m],
        r_star: r,
        selected,
        selected_models: None,
        pvalues,
    })
}

/// `Σ_j 1{p_j ≤ q·R̂_j/m, j null} / R̂_j`, the per-run quantity bounding FDR.
pub fn fdr_decomposition_bound(pvalues: &[f64], aux_sizes: &[f64], null_mask: &[bool], q: f64) -> f64 {
    let m = pvalues.len();
    (0..m)
        .filter(|&j| null_mask[j] && aux_sizes[j] > 0.0)
        .filter(|&j| pvalues[j] <= step_threshold(q, aux_sizes[j], m))
        .map(|j| 1.0 / aux_sizes[j])
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bh_small_example() {
        assert_eq!(bh(&[0.01, 0.02, 0.5], 0.1), vec![0, 1]);
        assert_eq!(bh_r_star(&[0.01, 0.02, 0.5], 0.1), 2);
        assert!(bh(&[1.0; 5], 0.9).is_empty());
        assert_eq!(bh(&[0.0; 4], 0.05), vec![0, 1, 2, 3]);
    }

    #[test]
    fn dtm_example_by_hand() {
        let out = optcs_select(&[0.01, 0.02, 0.9], &[2.0, 2.0, 5.0], 0.3, PruneMode::Dtm, 0).unwrap();
        let expect = [0.2, 0.2, 0.5];
        for (a, b) in out.thresholds.iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        assert_eq!(out.r_star, 2);
        assert_eq!(out.selected, vec![0, 1]);
    }

    #[test]
    fn all_ones_select_nothing() {
        for mode in [PruneMode::Hete, PruneMode::Homo, PruneMode::Dtm] {
            let out = optcs_select(&[1.0; 4], &[4.0; 4], 0.5, mode, 3).unwrap();
            assert!(out.selected.is_empty());
            assert_eq!(out.r_star, 0);
        }
    }

    #[test]
    fn bh_sized_aux_reproduces_bh() {
        let p = [0.001, 0.2, 0.03, 0.04, 0.9, 0.011];
        let s = bh(&p, 0.2);
        let aux = vec![s.len() as f64; p.len()];
        for mode in [PruneMode::Hete, PruneMode::Homo, PruneMode::Dtm] {
            for seed in 0..20 {
                assert_eq!(optcs_select(&p, &aux, 0.2, mode, seed).unwrap().selected, s);
            }
        }
    }

    #[test]
    fn pruned_set_can_exceed_bh() {
        let p = [0.4, 1.0];
        let aux = [2.0, 0.0];
        assert!(bh(&p, 0.5).is_empty());
        let out = optcs_select_with_xi(&p, &aux, 0.5, vec![0.1, 0.1]).unwrap();
        assert_eq!(out.selected, vec![0]);
        assert!(optcs_select_with_xi(&p, &aux, 0.5, vec![1.0, 1.0]).unwrap().selected.is_empty());
    }

    #[test]
    fn xi_shapes() {
        let h = draw_xi(PruneMode::Hete, 5, 1);
        assert!(h.iter().all(|v| (0.0..1.0).contains(v)));
        assert_ne!(h[0], h[1]);
        let o = draw_xi(PruneMode::Homo, 5, 1);
        assert!(o.iter().all(|&v| v == o[0]));
        assert_eq!(draw_xi(PruneMode::Dtm, 3, 1), vec![1.0; 3]);
    }

    #[test]
    fn decomposition_bound_by_hand() {
        assert_eq!(fdr_decomposition_bound(&[0.01, 0.9], &[2.0, 2.0], &[true, false], 0.3), 0.5);
        assert_eq!(fdr_decomposition_bound(&[0.01, 0.9], &[2.0, 2.0], &[false, false], 0.3), 0.0);
        assert_eq!(fdr_decomposition_bound(&[1.0, 1.0], &[2.0, 2.0], &[true, true], 0.3), 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(optcs_select(&[0.1], &[-1.0], 0.1, PruneMode::Dtm, 0).is_err());
        assert!(optcs_select(&[0.1], &[1.0, 2.0], 0.1, PruneMode::Dtm, 0).is_err());
        assert!(optcs_select(&[0.1], &[1.0], 1.0, PruneMode::Dtm, 0).is_err());
    }
}
