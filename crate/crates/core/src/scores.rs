//! Clipped conformity scores and the score-generating functionals.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{oversample_balance, FittedModel, Trainer, TrainerSpec};
use crate::problem::{LabeledSample, Problem};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScoreKind {
    /// `M·1{y > c} − μ̂(x)`
    ClippedMean,
    /// `M·1{y > c} − μ̂(x)/σ̂(x)`
    ClippedStudentized,
    /// `M·1{y > c} − q̂_α(x)`
    ClippedQuantile { level: f64 },
}

/// Score family plus the clipping constant `M`. When `big_m` is absent the
/// default is 100 for the mean score and 1000 otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreConfig {
    #[serde(flatten)]
    pub kind: ScoreKind,
    #[serde(default)]
    pub big_m: Option<f64>,
}

impl ScoreConfig {
    pub fn new(kind: ScoreKind, big_m: f64) -> Self {
        Self {
            kind,
            big_m: Some(big_m),
        }
    }

    pub fn mean(big_m: f64) -> Self {
        Self::new(ScoreKind::ClippedMean, big_m)
    }

    pub fn studentized(big_m: f64) -> Self {
        Self::new(ScoreKind::ClippedStudentized, big_m)
    }

    pub fn quantile(level: f64, big_m: f64) -> Self {
        Self::new(ScoreKind::ClippedQuantile { level }, big_m)
    }

    pub fn big_m(&self) -> f64 {
        self.big_m.unwrap_or(match self.kind {
            ScoreKind::ClippedMean => 100.0,
            _ => 1000.0,
        })
    }

    pub fn validate(&self) -> Result<()> {
        let m = self.big_m();
        if !(m.is_finite() && m > 0.0) {
            return Err(Error::InvalidParameter(format!("M must be positive, got {m}")));
        }
        if let ScoreKind::ClippedQuantile { level } = self.kind {
            if !(level > 0.0 && level < 1.0) {
                return Err(Error::InvalidParameter(format!(
                    "quantile level must lie in (0,1), got {level}"
                )));
            }
        }
        Ok(())
    }
}

/// A score configuration bound to a fitted model.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreFunction {
    pub config: ScoreConfig,
    pub model: FittedModel,
}

impl ScoreFunction {
    pub fn new(config: ScoreConfig, model: FittedModel) -> Self {
        Self { config, model }
    }

    pub fn score(&self, x: &[f64], y: f64, c: f64) -> Result<f64> {
        clipped_score(self, x, y, c)
    }

    fn sample(&self, s: &LabeledSample) -> Result<f64> {
        clipped_score(self, &s.x, s.y, s.c)
    }
}

/// Clipped score `V(x, y)`; equals `V(x, c)` whenever `y ≤ c`.
pub fn clipped_score(f: &ScoreFunction, x: &[f64], y: f64, c: f64) -> Result<f64> {
    let m = f.config.big_m();
    let jump = if y > c { m } else { 0.0 };
    match f.config.kind {
        ScoreKind::ClippedMean => Ok(jump - f.model.predict_mean(x)),
        ScoreKind::ClippedStudentized => {
            let sigma = f
                .model
                .predict_spread(x)
                .ok_or(Error::MissingPredictor("spread"))?;
            if !(sigma > 0.0) {
                return Err(Error::NonPositiveSpread(sigma));
            }
            Ok(jump - f.model.predict_mean(x) / sigma)
        }
        ScoreKind::ClippedQuantile { .. } => {
            let q = f
                .model
                .predict_quantile(x)
                .ok_or(Error::MissingPredictor("quantile"))?;
            Ok(jump - q)
        }
    }
}

/// Trainer and score pairing for procedures that fit their own models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub trainer: TrainerSpec,
    pub score: ScoreConfig,
}

impl Candidate {
    pub fn new(trainer: TrainerSpec, score: ScoreConfig) -> Self {
        Self { trainer, score }
    }

    pub fn fit(&self, data: &[LabeledSample]) -> Result<ScoreFunction> {
        self.score.validate()?;
        Ok(ScoreFunction::new(self.score, self.trainer.fit(data)?))
    }
}

/// `m × (n2 + m)` matrix; row `j` holds `n2` calibration scores followed by
/// `m` test scores.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreMatrix {
    n2: usize,
    rows: Vec<Vec<f64>>,
}

impl ScoreMatrix {
    pub fn new(n2: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::EmptyTest);
        }
        if n2 == 0 {
            return Err(Error::EmptyCalibration);
        }
        for (j, r) in rows.iter().enumerate() {
            if r.len() != n2 + m {
                return Err(Error::LengthMismatch(format!(
                    "score row {} has length {}, expected {}",
                    j + 1,
                    r.len(),
                    n2 + m
                )));
            }
            if r.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite(format!("score row {}", j + 1)));
            }
        }
        Ok(Self { n2, rows })
    }

    /// Matrix whose rows all equal `shared`.
    pub fn shared(n2: usize, shared: Vec<f64>) -> Result<Self> {
        let m = shared.len().saturating_sub(n2);
        Self::new(n2, vec![shared; m])
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn m(&self) -> usize {
        self.rows.len()
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.rows[j]
    }

    pub fn calibration(&self, j: usize) -> &[f64] {
        &self.rows[j][..self.n2]
    }

    pub fn test(&self, j: usize) -> &[f64] {
        &self.rows[j][self.n2..]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }
}

/// Calibration scores followed by imputed-null test scores under one fixed
/// score function.
pub fn score_vector(f: &ScoreFunction, calibration: &[LabeledSample], problem: &Problem) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(calibration.len() + problem.m());
    for s in calibration {
        out.push(f.sample(s)?);
    }
    for t in problem.test() {
        out.push(clipped_score(f, &t.x, t.c, t.c)?);
    }
    Ok(out)
}

pub fn generate_scores_fixed(f: &ScoreFunction, problem: &Problem) -> Result<ScoreMatrix> {
    ScoreMatrix::shared(problem.n2(), score_vector(f, problem.calibration(), problem)?)
}

/// Row `j` uses candidate `selected[j]` (0-based).
pub fn generate_scores_msel(
    candidates: &[ScoreFunction],
    problem: &Problem,
    selected: &[usize],
) -> Result<ScoreMatrix> {
    if selected.len() != problem.m() {
        return Err(Error::LengthMismatch(format!(
            "{} model indices for m = {}",
            selected.len(),
            problem.m()
        )));
    }
    let mut cache: Vec<Option<Vec<f64>>> = vec![None; candidates.len()];
    let mut rows = Vec::with_capacity(selected.len());
    for &k in selected {
        if k >= candidates.len() {
            return Err(Error::IndexOutOfRange {
                index: k,
                len: candidates.len(),
            });
        }
        if cache[k].is_none() {
            cache[k] = Some(score_vector(&candidates[k], problem.calibration(), problem)?);
        }
        rows.push(cache[k].clone().unwrap());
    }
    ScoreMatrix::new(problem.n2(), rows)
}

pub(crate) fn require_binary(problem: &Problem) -> Result<()> {
    if problem.is_binary() {
        Ok(())
    } else {
        Err(Error::NotBinary)
    }
}

/// Pool of all labeled samples plus every test point with its label imputed
/// at the null value.
pub(crate) fn augmented_pool(problem: &Problem) -> Vec<LabeledSample> {
    let mut pool = problem.labeled().to_vec();
    pool.extend(problem.imputed_test());
    pool
}

pub(crate) fn fit_without<T: Trainer + ?Sized>(
    trainer: &T,
    pool: &[LabeledSample],
    leave_out: usize,
    oversample: bool,
) -> Result<FittedModel> {
    let mut data = Vec::with_capacity(pool.len() - 1);
    data.extend_from_slice(&pool[..leave_out]);
    data.extend_from_slice(&pool[leave_out + 1..]);
    if oversample {
        data = oversample_balance(&data)?;
    }
    trainer.fit(&data).map_err(|e| Error::Refit {
        index: leave_out + 1,
        source: Box::new(e),
    })
}

/// Leave-one-out scores over an explicit training pool. Position `ℓ` of the
/// output (for `ℓ` in the calibration and test blocks of `pool`) is the score
/// of `pool[ℓ]` under a model trained on `pool` without `pool[ℓ]`.
pub fn loo_scores_from_pool<T: Trainer + ?Sized>(
    trainer: &T,
    config: ScoreConfig,
    pool: &[LabeledSample],
    n1: usize,
    oversample: bool,
) -> Result<Vec<f64>> {
    config.validate()?;
    (n1..pool.len())
        .into_par_iter()
        .map(|l| {
            let model = fit_without(trainer, pool, l, oversample)?;
            ScoreFunction::new(config, model).sample(&pool[l])
        })
        .collect()
}

/// Shared leave-one-out score vector `(V_{n1+1..n}, V̂_{n+1..n+m})`.
pub fn loo_scores<T: Trainer + ?Sized>(
    trainer: &T,
    config: ScoreConfig,
    problem: &Problem,
    oversample: bool,
) -> Result<Vec<f64>> {
    require_binary(problem)?;
    loo_scores_from_pool(trainer, config, &augmented_pool(problem), problem.n1(), oversample)
}

pub fn generate_scores_full<T: Trainer + ?Sized>(
    trainer: &T,
    config: ScoreConfig,
    problem: &Problem,
    oversample: bool,
) -> Result<ScoreMatrix> {
    ScoreMatrix::shared(problem.n2(), loo_scores(trainer, config, problem, oversample)?)
}

pub fn generate_scores_full_per_candidate(
    candidates: &[(&dyn Trainer, ScoreConfig)],
    problem: &Problem,
    oversample: bool,
) -> Result<Vec<Vec<f64>>> {
    candidates
        .iter()
        .map(|(t, cfg)| loo_scores(*t, *cfg, problem, oversample))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Predictor;
    use crate::problem::{DataSplit, TestSample};
    use std::sync::atomic::{AtomicUsize, Ordering};

    fn const_fn(mu: f64, big_m: f64) -> ScoreFunction {
        ScoreFunction::new(ScoreConfig::mean(big_m), FittedModel::constant(mu))
    }

    #[test]
    fn clipped_mean_formula() {
        let f = const_fn(0.3, 100.0);
        assert!((f.score(&[], 1.0, 0.0).unwrap() - 99.7).abs() < 1e-12);
        assert_eq!(f.score(&[], 0.0, 0.0).unwrap(), -0.3);
        assert_eq!(f.score(&[], -4.0, 0.0).unwrap(), f.score(&[], 0.0, 0.0).unwrap());
    }

    #[test]
    fn clipped_studentized_formula() {
        let model = FittedModel {
            mean: Predictor::Constant(2.0),
            quantile: None,
            spread: Some(crate::models::SpreadModel {
                predictor: Predictor::Constant(4.0),
                floor: 1e-6,
            }),
        };
        let f = ScoreFunction::new(ScoreConfig::studentized(1000.0), model);
        assert_eq!(f.score(&[], -1.0, 0.0).unwrap(), -0.5);
        assert_eq!(f.score(&[], 1.0, 0.0).unwrap(), 999.5);
    }

    #[test]
    fn missing_predictors_error() {
        let f = ScoreFunction::new(ScoreConfig::studentized(1000.0), FittedModel::constant(0.0));
        assert!(matches!(f.score(&[], 0.0, 0.0), Err(Error::MissingPredictor("spread"))));
        let f = ScoreFunction::new(ScoreConfig::quantile(0.5, 1000.0), FittedModel::constant(0.0));
        assert!(matches!(f.score(&[], 0.0, 0.0), Err(Error::MissingPredictor("quantile"))));
    }

    fn toy_problem(cal_y: &[f64], m: usize) -> Problem {
        let labeled = cal_y.iter().map(|&y| LabeledSample::new(vec![0.0], y, 0.0)).collect();
        let test = (0..m).map(|j| TestSample::new(vec![j as f64], 0.0)).collect();
        Problem::new(labeled, test, DataSplit::new(0, cal_y.len(), m)).unwrap()
    }

    #[test]
    fn fixed_scores_constant_model() {
        let p = toy_problem(&[1.0, 0.0], 2);
        let sm = generate_scores_fixed(&const_fn(0.0, 1.0), &p).unwrap();
        assert_eq!(sm.m(), 2);
        for j in 0..2 {
            assert_eq!(sm.row(j), &[1.0, 0.0, 0.0, 0.0]);
        }
        let p1 = toy_problem(&[1.0, 0.0, 1.0], 1);
        let sm1 = generate_scores_fixed(&const_fn(0.0, 1.0), &p1).unwrap();
        assert_eq!((sm1.m(), sm1.row(0).len()), (1, 4));
    }

    #[test]
    fn msel_scores_pick_rows() {
        let p = toy_problem(&[1.0, 0.0], 2);
        let c = [const_fn(0.0, 1.0), const_fn(0.5, 1.0)];
        let single = generate_scores_msel(&c[..1], &p, &[0, 0]).unwrap();
        assert_eq!(single, generate_scores_fixed(&c[0], &p).unwrap());
        let mixed = generate_scores_msel(&c, &p, &[0, 1]).unwrap();
        assert_eq!(mixed.row(0), generate_scores_fixed(&c[0], &p).unwrap().row(0));
        assert_eq!(mixed.row(1), generate_scores_fixed(&c[1], &p).unwrap().row(1));
        assert!(matches!(
            generate_scores_msel(&c, &p, &[0, 2]),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    struct Counting<'a> {
        inner: &'a dyn Trainer,
        calls: AtomicUsize,
    }

    impl Trainer for Counting<'_> {
        fn fit(&self, data: &[LabeledSample]) -> Result<FittedModel> {
            self.calls.fetch_add(1, Ordering::SeqCst);
            self.inner.fit(data)
        }
    }

    struct Ignoring(f64);

    impl Trainer for Ignoring {
        fn fit(&self, _: &[LabeledSample]) -> Result<FittedModel> {
            Ok(FittedModel::constant(self.0))
        }
    }

    #[test]
    fn leave_one_out_means_by_hand() {
        // pool: y = (1, 0) labeled, one test imputed at 0
        let p = toy_problem(&[1.0, 0.0], 1);
        let counting = Counting {
            inner: &TrainerSpec::ConstantMean,
            calls: AtomicUsize::new(0),
        };
        let sm = generate_scores_full(&counting, ScoreConfig::mean(1.0), &p, false).unwrap();
        assert_eq!(sm.row(0), &[1.0, -0.5, -0.5]);
        assert_eq!(counting.calls.load(Ordering::SeqCst), 3);
    }

    #[test]
    fn data_ignoring_trainer_matches_fixed() {
        let p = toy_problem(&[1.0, 0.0, 1.0, 1.0], 3);
        let full = generate_scores_full(&Ignoring(0.25), ScoreConfig::mean(1.0), &p, true).unwrap();
        let fixed = generate_scores_fixed(&const_fn(0.25, 1.0), &p).unwrap();
        assert_eq!(full, fixed);
    }

    #[test]
    fn per_candidate_refit_count() {
        let p = toy_problem(&[1.0, 0.0, 1.0, 0.0, 1.0], 3);
        let counting = Counting {
            inner: &TrainerSpec::ConstantMean,
            calls: AtomicUsize::new(0),
        };
        let cands: Vec<(&dyn Trainer, ScoreConfig)> =
            vec![(&counting, ScoreConfig::mean(1.0)), (&counting, ScoreConfig::mean(1.0))];
        let v = generate_scores_full_per_candidate(&cands, &p, false).unwrap();
        assert_eq!(v[0], v[1]);
        assert_eq!(counting.calls.load(Ordering::SeqCst), 2 * (5 + 3));
        let single = generate_scores_full(&TrainerSpec::ConstantMean, ScoreConfig::mean(1.0), &p, false).unwrap();
        assert_eq!(single.row(0), v[0].as_slice());
    }

    #[test]
    fn full_requires_binary() {
        let p = toy_problem(&[2.0, 0.0], 1);
        assert!(matches!(
            generate_scores_full(&TrainerSpec::ConstantMean, ScoreConfig::mean(1.0), &p, false),
            Err(Error::NotBinary)
        ));
    }

    #[test]
    fn refit_failure_reports_index() {
        struct Fails;
        impl Trainer for Fails {
            fn fit(&self, _: &[LabeledSample]) -> Result<FittedModel> {
                Err(Error::SingularDesign)
            }
        }
        let p = toy_problem(&[1.0, 0.0], 1);
        let err = generate_scores_full(&Fails, ScoreConfig::mean(1.0), &p, false).unwrap_err();
        assert!(matches!(err, Error::Refit { index, .. } if (1..=3).contains(&index)));
    }
}
