//! Symmetric training algorithms.
//!
//! Every deterministic family first sorts its training set into a canonical
//! order, so the fitted model is a function of the training multiset only:
//! `train(spec, D) == train(spec, π(D))` bit-for-bit for every permutation π.
//! Leave-one-out procedures rely on this.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::problem::{canonical_cmp, canonical_sorted, LabeledSample};
use crate::rng;

/// A training algorithm mapping a labeled multiset to a fitted model.
pub trait Trainer: Send + Sync {
    fn fit(&self, data: &[LabeledSample]) -> Result<FittedModel>;
}

fn default_steps() -> usize {
    1000
}

fn default_rate() -> f64 {
    0.5
}

/// Configuration of one model-zoo family. Feature indices are 0-based columns;
/// `None` uses every feature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum TrainerSpec {
    ConstantMean,
    Ridge {
        lambda: f64,
        #[serde(default)]
        features: Option<Vec<usize>>,
        /// Also fit a spread model on absolute in-sample residuals.
        #[serde(default)]
        spread: bool,
    },
    LinearQuantile {
        alpha: f64,
        #[serde(default)]
        features: Option<Vec<usize>>,
        #[serde(default = "default_steps")]
        steps: usize,
        #[serde(default = "default_rate")]
        rate: f64,
    },
    Knn {
        k: usize,
        #[serde(default)]
        features: Option<Vec<usize>>,
    },
    ShuffledWrapper {
        inner: Box<TrainerSpec>,
        seed: u64,
    },
}

impl TrainerSpec {
    pub fn ridge(lambda: f64) -> Self {
        TrainerSpec::Ridge {
            lambda,
            features: None,
            spread: false,
        }
    }

    pub fn linear_quantile(alpha: f64) -> Self {
        TrainerSpec::LinearQuantile {
            alpha,
            features: None,
            steps: default_steps(),
            rate: default_rate(),
        }
    }

    pub fn knn(k: usize) -> Self {
        TrainerSpec::Knn { k, features: None }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParameter(msg));
        match self {
            TrainerSpec::ConstantMean => Ok(()),
            TrainerSpec::Ridge { lambda, .. } => {
                if !(lambda.is_finite() && *lambda >= 0.0) {
                    return bad(format!("ridge_lambda must be finite and >= 0, got {lambda}"));
                }
                Ok(())
            }
            TrainerSpec::LinearQuantile {
                alpha, steps, rate, ..
            } => {
                if !(*alpha > 0.0 && *alpha < 1.0) {
                    return bad(format!("quantile level must lie in (0,1), got {alpha}"));
                }
                if *steps == 0 {
                    return bad("gd_steps must be >= 1".into());
                }
                if !(rate.is_finite() && *rate > 0.0) {
                    return bad(format!("gd_rate must be positive, got {rate}"));
                }
                Ok(())
            }
            TrainerSpec::Knn { k, .. } => {
                if *k == 0 {
                    return bad("knn_k must be >= 1".into());
                }
                Ok(())
            }
            TrainerSpec::ShuffledWrapper { inner, .. } => inner.validate(),
        }
    }
}

impl Trainer for TrainerSpec {
    fn fit(&self, data: &[LabeledSample]) -> Result<FittedModel> {
        self.validate()?;
        if data.is_empty() {
            return Err(Error::EmptyTrainingData);
        }
        if let TrainerSpec::ShuffledWrapper { inner, seed } = self {
            return Shuffled::new(inner.as_ref(), *seed).fit(data);
        }
        let data = canonical_sorted(data);
        match self {
            TrainerSpec::ConstantMean => {
                let mean = data.iter().map(|s| s.y).sum::<f64>() / data.len() as f64;
                Ok(FittedModel::from_mean(Predictor::Constant(mean)))
            }
            TrainerSpec::Ridge {
                lambda,
                features,
                spread,
            } => fit_ridge(&data, *lambda, features.as_deref(), *spread),
            TrainerSpec::LinearQuantile {
                alpha,
                features,
                steps,
                rate,
            } => {
                let line = fit_linear_quantile(&data, *alpha, features.as_deref(), *steps, *rate)?;
                Ok(FittedModel {
                    mean: line.clone(),
                    quantile: Some(QuantileModel {
                        level: *alpha,
                        predictor: line,
                    }),
                    spread: None,
                })
            }
            TrainerSpec::Knn { k, features } => {
                let features = resolve_features(features.as_deref(), data[0].x.len())?;
                let points = data
                    .iter()
                    .map(|s| (select(&s.x, features.as_deref()), s.y))
                    .collect();
                Ok(FittedModel::from_mean(Predictor::Knn {
                    k: *k,
                    features,
                    points,
                }))
            }
            TrainerSpec::ShuffledWrapper { .. } => unreachable!(),
        }
    }
}

impl<T: Trainer + ?Sized> Trainer for &T {
    fn fit(&self, data: &[LabeledSample]) -> Result<FittedModel> {
        (**self).fit(data)
    }
}

/// Fits `spec` on `data`.
pub fn train(spec: &TrainerSpec, data: &[LabeledSample]) -> Result<FittedModel> {
    spec.fit(data)
}

/// Makes any trainer symmetric: the data are put in canonical order and then
/// permuted by a seeded shuffle before being handed to the inner trainer.
#[derive(Debug, Clone)]
pub struct Shuffled<T> {
    inner: T,
    seed: u64,
}

impl<T> Shuffled<T> {
    pub fn new(inner: T, seed: u64) -> Self {
        Self { inner, seed }
    }
}

impl<T: Trainer> Trainer for Shuffled<T> {
    fn fit(&self, data: &[LabeledSample]) -> Result<FittedModel> {
        let mut data = canonical_sorted(data);
        data.shuffle(&mut rng::stream(self.seed, &[]));
        self.inner.fit(&data)
    }
}

/// A deterministic point predictor.
#[derive(Debug, Clone, PartialEq)]
pub enum Predictor {
    Constant(f64),
    Linear {
        intercept: f64,
        coef: Vec<f64>,
        features: Option<Vec<usize>>,
    },
    Knn {
        k: usize,
        features: Option<Vec<usize>>,
        points: Vec<(Vec<f64>, f64)>,
    },
}

impl Predictor {
    pub fn predict(&self, x: &[f64]) -> f64 {
        match self {
            Predictor::Constant(v) => *v,
            Predictor::Linear {
                intercept,
                coef,
                features,
            } => {
                let mut acc = *intercept;
                match features {
                    Some(f) => {
                        for (w, &i) in coef.iter().zip(f) {
                            acc += w * x[i];
                        }
                    }
                    None => {
                        for (w, v) in coef.iter().zip(x) {
                            acc += w * v;
                        }
                    }
                }
                acc
            }
            Predictor::Knn {
                k,
                features,
                points,
            } => knn_predict(points, *k, &select(x, features.as_deref())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantileModel {
    pub level: f64,
    pub predictor: Predictor,
}

/// Spread model `σ̂(x) = max(inner(x), floor)`, with `floor > 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpreadModel {
    pub predictor: Predictor,
    pub floor: f64,
}

impl SpreadModel {
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.predictor.predict(x).max(self.floor)
    }
}

/// Predictor bundle produced by a trainer.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    pub mean: Predictor,
    pub quantile: Option<QuantileModel>,
    pub spread: Option<SpreadModel>,
}

impl FittedModel {
    pub fn from_mean(mean: Predictor) -> Self {
        Self {
            mean,
            quantile: None,
            spread: None,
        }
    }

    pub fn constant(v: f64) -> Self {
        Self::from_mean(Predictor::Constant(v))
    }

    pub fn predict_mean(&self, x: &[f64]) -> f64 {
        self.mean.predict(x)
    }

    pub fn predict_quantile(&self, x: &[f64]) -> Option<f64> {
        self.quantile.as_ref().map(|q| q.predictor.predict(x))
    }

    pub fn predict_spread(&self, x: &[f64]) -> Option<f64> {
        self.spread.as_ref().map(|s| s.predict(x))
    }
}

fn resolve_features(features: Option<&[usize]>, dim: usize) -> Result<Option<Vec<usize>>> {
    match features {
        None => Ok(None),
        Some(f) => {
            if let Some(&bad) = f.iter().find(|&&i| i >= dim) {
                return Err(Error::InvalidParameter(format!(
                    "feature index {bad} out of range for d={dim}"
                )));
            }
            Ok(Some(f.to_vec()))
        }
    }
}

fn select(x: &[f64], features: Option<&[usize]>) -> Vec<f64> {
    match features {
        Some(f) => f.iter().map(|&i| x[i]).collect(),
        None => x.to_vec(),
    }
}

fn solve_ridge(rows: &[Vec<f64>], targets: &[f64], lambda: f64) -> Result<(f64, Vec<f64>)> {
    let p = rows.first().map_or(0, Vec::len) + 1;
    let mut gram = DMatrix::<f64>::zeros(p, p);
    let mut rhs = DVector::<f64>::zeros(p);
    let mut z = vec![0.0; p];
    for (row, &t) in rows.iter().zip(targets) {
        z[0] = 1.0;
        z[1..].copy_from_slice(row);
        for a in 0..p {
            rhs[a] += z[a] * t;
            for b in a..p {
                gram[(a, b)] += z[a] * z[b];
            }
        }
    }
    for a in 0..p {
        for b in 0..a {
            gram[(a, b)] = gram[(b, a)];
        }
    }
    for a in 1..p {
        gram[(a, a)] += lambda;
    }
    let scale = (0..p).map(|a| gram[(a, a)]).fold(0.0, f64::max);
    let chol = gram.cholesky().ok_or(Error::SingularDesign)?;
    let l = chol.l_dirty();
    let min_pivot = (0..p).map(|a| l[(a, a)] * l[(a, a)]).fold(f64::INFINITY, f64::min);
    if !(min_pivot > 1e-12 * scale) {
        return Err(Error::SingularDesign);
    }
    let beta = chol.solve(&rhs);
    Ok((beta[0], beta.iter().skip(1).copied().collect()))
}

fn fit_ridge(
    data: &[LabeledSample],
    lambda: f64,
    features: Option<&[usize]>,
    spread: bool,
) -> Result<FittedModel> {
    let features = resolve_features(features, data[0].x.len())?;
    let rows: Vec<Vec<f64>> = data.iter().map(|s| select(&s.x, features.as_deref())).collect();
    let ys: Vec<f64> = data.iter().map(|s| s.y).collect();
    let (intercept, coef) = solve_ridge(&rows, &ys, lambda)?;
    let mean = Predictor::Linear {
        intercept,
        coef,
        features: features.clone(),
    };
    let spread = if spread {
        let resid: Vec<f64> = data.iter().map(|s| (s.y - mean.predict(&s.x)).abs()).collect();
        let mean_abs = resid.iter().sum::<f64>() / resid.len() as f64;
        let (b0, w) = solve_ridge(&rows, &resid, lambda.max(1e-8))?;
        Some(SpreadModel {
            predictor: Predictor::Linear {
                intercept: b0,
                coef: w,
                features,
            },
            floor: (0.1 * mean_abs).max(1e-6),
        })
    } else {
        None
    };
    Ok(FittedModel {
        mean,
        quantile: None,
        spread,
    })
}

/// Mean pinball (check) loss of residuals `y - f`.
pub fn pinball_loss(alpha: f64, residuals: impl IntoIterator<Item = f64>) -> f64 {
    let mut n = 0usize;
    let mut acc = 0.0;
    for r in residuals {
        n += 1;
        acc += if r >= 0.0 { alpha * r } else { (alpha - 1.0) * r };
    }
    if n == 0 {
        0.0
    } else {
        acc / n as f64
    }
}

fn fit_linear_quantile(
    data: &[LabeledSample],
    alpha: f64,
    features: Option<&[usize]>,
    steps: usize,
    rate: f64,
) -> Result<Predictor> {
    let features = resolve_features(features, data[0].x.len())?;
    let rows: Vec<Vec<f64>> = data.iter().map(|s| select(&s.x, features.as_deref())).collect();
    let ys: Vec<f64> = data.iter().map(|s| s.y).collect();
    let n = ys.len() as f64;
    let p = rows[0].len();

    // standardize so one step size suits every coordinate
    let mut center = vec![0.0; p];
    let mut scale = vec![0.0; p];
    for row in &rows {
        for (c, v) in center.iter_mut().zip(row) {
            *c += v;
        }
    }
    center.iter_mut().for_each(|c| *c /= n);
    for row in &rows {
        for f in 0..p {
            scale[f] += (row[f] - center[f]).powi(2);
        }
    }
    for s in scale.iter_mut() {
        *s = (*s / n).sqrt();
        if !(*s > 0.0) {
            *s = 1.0;
        }
    }
    let z: Vec<Vec<f64>> = rows
        .iter()
        .map(|r| (0..p).map(|f| (r[f] - center[f]) / scale[f]).collect())
        .collect();

    let mut sorted_y = ys.clone();
    sorted_y.sort_by(f64::total_cmp);
    let idx = ((alpha * n).ceil() as usize).clamp(1, ys.len()) - 1;
    let y_mean = ys.iter().sum::<f64>() / n;
    let y_sd = (ys.iter().map(|y| (y - y_mean).powi(2)).sum::<f64>() / n).sqrt();

    let mut b0 = sorted_y[idx];
    let mut w = vec![0.0; p];
    let loss = |b0: f64, w: &[f64]| {
        pinball_loss(
            alpha,
            z.iter().zip(&ys).map(|(zi, y)| {
                y - b0 - zi.iter().zip(w).map(|(a, b)| a * b).sum::<f64>()
            }),
        )
    };
    let mut best = (loss(b0, &w), b0, w.clone());
    let eta0 = rate * if y_sd > 0.0 { y_sd } else { 1.0 };
    let decay = (1e-8f64).powf(1.0 / steps as f64);
    let mut eta = eta0;
    let mut grad_w = vec![0.0; p];
    for _ in 0..steps {
        let mut grad_b = 0.0;
        grad_w.iter_mut().for_each(|g| *g = 0.0);
        for (zi, y) in z.iter().zip(&ys) {
            let r = y - b0 - zi.iter().zip(&w).map(|(a, b)| a * b).sum::<f64>();
            let g = if r > 0.0 {
                -alpha
            } else if r < 0.0 {
                1.0 - alpha
            } else {
                0.0
            };
            grad_b += g;
            for (gw, zf) in grad_w.iter_mut().zip(zi) {
                *gw += g * zf;
            }
        }
        b0 -= eta * grad_b / n;
        for (wf, gw) in w.iter_mut().zip(&grad_w) {
            *wf -= eta * gw / n;
        }
        let l = loss(b0, &w);
        if l < best.0 {
            best = (l, b0, w.clone());
        }
        eta *= decay;
    }
    let (_, b0, w) = best;
    let coef: Vec<f64> = w.iter().zip(&scale).map(|(wf, s)| wf / s).collect();
    let intercept = b0 - coef.iter().zip(&center).map(|(c, m)| c * m).sum::<f64>();
    Ok(Predictor::Linear {
        intercept,
        coef,
        features,
    })
}

fn knn_predict(points: &[(Vec<f64>, f64)], k: usize, x: &[f64]) -> f64 {
    let k = k.min(points.len());
    let mut dist: Vec<(f64, f64)> = points
        .iter()
        .map(|(p, y)| {
            let d: f64 = p.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum();
            (d, *y)
        })
        .collect();
    dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let kth = dist[k - 1].0;
    let closer: Vec<f64> = dist.iter().filter(|(d, _)| *d < kth).map(|(_, y)| *y).collect();
    let tied: Vec<f64> = dist.iter().filter(|(d, _)| *d == kth).map(|(_, y)| *y).collect();
    let tied_mean = tied.iter().sum::<f64>() / tied.len() as f64;
    (closer.iter().sum::<f64>() + (k - closer.len()) as f64 * tied_mean) / k as f64
}

/// Duplicates minority-class samples until the two classes of a binary data
/// set have equal counts.
///
/// Each minority sample gets `majority / minority - 1` extra copies; the
/// remaining `majority % minority` copies go to the first minority samples in
/// canonical order, so the output multiset does not depend on input order.
pub fn oversample_balance(data: &[LabeledSample]) -> Result<Vec<LabeledSample>> {
    if data.iter().any(|s| s.y != 0.0 && s.y != 1.0) {
        return Err(Error::NotBinary);
    }
    let ones = data.iter().filter(|s| s.y == 1.0).count();
    let zeros = data.len() - ones;
    if ones == 0 || zeros == 0 || ones == zeros {
        return Ok(data.to_vec());
    }
    let minority_label = if ones < zeros { 1.0 } else { 0.0 };
    let (minor, major) = (ones.min(zeros), ones.max(zeros));
    let mut minority: Vec<&LabeledSample> = data.iter().filter(|s| s.y == minority_label).collect();
    minority.sort_by(|a, b| canonical_cmp(a, b));

    let mut out = data.to_vec();
    out.reserve(major - minor);
    for _ in 1..major / minor {
        out.extend(minority.iter().map(|s| (*s).clone()));
    }
    out.extend(minority.iter().take(major % minor).map(|s| (*s).clone()));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn s1(x: f64, y: f64) -> LabeledSample {
        LabeledSample::new(vec![x], y, 0.0)
    }

    #[test]
    fn constant_mean_of_labels() {
        let data = vec![s1(0.0, 0.0), s1(1.0, 1.0), s1(2.0, 1.0)];
        let m = train(&TrainerSpec::ConstantMean, &data).unwrap();
        assert!((m.predict_mean(&[5.0]) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.predict_mean(&[5.0]), m.predict_mean(&[-3.0]));
    }

    #[test]
    fn ridge_without_penalty_interpolates() {
        let data = vec![s1(0.0, 0.0), s1(1.0, 1.0)];
        let m = train(&TrainerSpec::ridge(0.0), &data).unwrap();
        for x in [-1.0, 0.0, 0.5, 3.0] {
            assert!((m.predict_mean(&[x]) - x).abs() < 1e-12);
        }
    }

    #[test]
    fn ridge_rank_deficient_without_penalty_errors() {
        let data = vec![
            LabeledSample::new(vec![1.0, 2.0], 0.0, 0.0),
            LabeledSample::new(vec![2.0, 4.0], 1.0, 0.0),
            LabeledSample::new(vec![3.0, 6.0], 1.0, 0.0),
        ];
        let err = train(&TrainerSpec::ridge(0.0), &data).unwrap_err();
        assert!(matches!(err, Error::SingularDesign));
        assert!(err.to_string().contains("ridge_lambda > 0"));
        assert!(train(&TrainerSpec::ridge(0.1), &data).is_ok());
    }

    #[test]
    fn empty_data_errors() {
        assert!(matches!(
            train(&TrainerSpec::ConstantMean, &[]),
            Err(Error::EmptyTrainingData)
        ));
    }

    // Grid search over the constant predictor; the grid contains every data
    // point, where the pinball minimum is attained.
    fn grid_oracle(alpha: f64, ys: &[f64]) -> f64 {
        let lo = ys.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = ys.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let mut grid: Vec<f64> = (0..=4000).map(|i| lo + (hi - lo) * i as f64 / 4000.0).collect();
        grid.extend_from_slice(ys);
        grid.iter()
            .map(|g| pinball_loss(alpha, ys.iter().map(|y| y - g)))
            .fold(f64::INFINITY, f64::min)
    }

    fn constant_quantile(alpha: f64) -> TrainerSpec {
        TrainerSpec::LinearQuantile {
            alpha,
            features: Some(vec![]),
            steps: 1000,
            rate: 0.5,
        }
    }

    #[test]
    fn median_of_skewed_sample() {
        let data = vec![s1(0.0, 0.0), s1(1.0, 0.0), s1(2.0, 10.0)];
        let m = train(&constant_quantile(0.5), &data).unwrap();
        assert!(m.predict_quantile(&[0.0]).unwrap().abs() < 1e-6);
        let loss = pinball_loss(0.5, data.iter().map(|s| s.y - m.predict_quantile(&s.x).unwrap()));
        assert!(loss <= grid_oracle(0.5, &[0.0, 0.0, 10.0]) + 1e-6);
    }

    #[test]
    fn pinball_matches_grid_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..30 {
            let n = rng.random_range(3..40);
            let alpha = rng.random_range(0.05..0.95);
            let ys: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let data: Vec<_> = ys.iter().map(|&y| s1(0.0, y)).collect();
            let m = train(&constant_quantile(alpha), &data).unwrap();
            let fit = m.predict_quantile(&[0.0]).unwrap();
            let loss = pinball_loss(alpha, ys.iter().map(|y| y - fit));
            assert!(loss <= grid_oracle(alpha, &ys) + 1e-6, "alpha={alpha} loss={loss}");
        }
    }

    #[test]
    fn linear_quantile_tracks_slope() {
        let data: Vec<_> = (0..50).map(|i| s1(i as f64 / 10.0, 2.0 * i as f64 / 10.0 + 1.0)).collect();
        let m = train(&TrainerSpec::linear_quantile(0.5), &data).unwrap();
        assert!((m.predict_quantile(&[2.0]).unwrap() - 5.0).abs() < 0.05);
    }

    #[test]
    fn knn_averages_ties() {
        let data = vec![s1(-1.0, 0.0), s1(1.0, 1.0), s1(5.0, 7.0)];
        let m = train(&TrainerSpec::knn(1), &data).unwrap();
        assert_eq!(m.predict_mean(&[0.0]), 0.5);
        assert_eq!(m.predict_mean(&[4.0]), 7.0);
        let m2 = train(&TrainerSpec::knn(2), &data).unwrap();
        assert_eq!(m2.predict_mean(&[0.0]), 0.5);
    }

    #[test]
    fn ridge_spread_is_positive() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let data: Vec<_> = (0..40)
            .map(|_| {
                let x: f64 = rng.random_range(-1.0..1.0);
                s1(x, x + rng.random_range(-0.1..0.1))
            })
            .collect();
        let spec = TrainerSpec::Ridge {
            lambda: 0.1,
            features: None,
            spread: true,
        };
        let m = train(&spec, &data).unwrap();
        for x in [-10.0, 0.0, 10.0] {
            assert!(m.predict_spread(&[x]).unwrap() > 0.0);
        }
    }

    #[test]
    fn invalid_hyperparams() {
        assert!(train(&TrainerSpec::knn(0), &[s1(0.0, 0.0)]).is_err());
        assert!(train(&TrainerSpec::ridge(-1.0), &[s1(0.0, 0.0)]).is_err());
        assert!(train(&TrainerSpec::linear_quantile(1.0), &[s1(0.0, 0.0)]).is_err());
        let bad = TrainerSpec::Knn {
            k: 1,
            features: Some(vec![3]),
        };
        assert!(train(&bad, &[s1(0.0, 0.0)]).is_err());
    }

    fn counts(data: &[LabeledSample]) -> (usize, usize) {
        let ones = data.iter().filter(|s| s.y == 1.0).count();
        (data.len() - ones, ones)
    }

    #[test]
    fn oversample_three_fold() {
        let mut data: Vec<_> = (0..6).map(|i| s1(i as f64, 0.0)).collect();
        data.extend((0..2).map(|i| s1(10.0 + i as f64, 1.0)));
        assert_eq!(counts(&oversample_balance(&data).unwrap()), (6, 6));
    }

    #[test]
    fn oversample_balanced_unchanged() {
        let mut data: Vec<_> = (0..5).map(|i| s1(i as f64, 0.0)).collect();
        data.extend((0..5).map(|i| s1(i as f64, 1.0)));
        assert_eq!(oversample_balance(&data).unwrap(), data);
    }

    #[test]
    fn oversample_remainder_rule() {
        let mut data: Vec<_> = (0..7).map(|i| s1(i as f64, 0.0)).collect();
        data.extend([s1(12.0, 1.0), s1(10.0, 1.0), s1(11.0, 1.0)]);
        let out = oversample_balance(&data).unwrap();
        assert_eq!(counts(&out), (7, 7));
        let copies = |x: f64| out.iter().filter(|s| s.x[0] == x).count();
        // canonical first positive (x = 10) gets the extra copy
        assert_eq!(copies(10.0), 3);
        assert_eq!(copies(11.0), 2);
        assert_eq!(copies(12.0), 2);
    }

    #[test]
    fn oversample_edge_cases() {
        let one_class: Vec<_> = (0..4).map(|i| s1(i as f64, 0.0)).collect();
        assert_eq!(oversample_balance(&one_class).unwrap(), one_class);
        assert!(matches!(
            oversample_balance(&[s1(0.0, 2.0)]),
            Err(Error::NotBinary)
        ));
    }

    #[test]
    fn shuffled_wrapper_is_symmetric() {
        let data: Vec<_> = (0..9).map(|i| s1(i as f64, (i % 3) as f64)).collect();
        let mut rev = data.clone();
        rev.reverse();
        let spec = TrainerSpec::ShuffledWrapper {
            inner: Box::new(TrainerSpec::knn(3)),
            seed: 5,
        };
        assert_eq!(train(&spec, &data).unwrap(), train(&spec, &rev).unwrap());
    }
}
