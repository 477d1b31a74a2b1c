//! Synthetic data-generating processes, per-run metrics, and the
//! replication runner.

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, StudentT, Uniform};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::TrainerSpec;
use crate::mtest::{PruneMode, SelectionOutcome};
use crate::problem::{DataSplit, LabeledSample, Problem, TestSample};
use crate::procedures::{prepare, ProcedureSpec};
use crate::rng::{self, role};
use crate::scores::{Candidate, ScoreConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DgpFamily {
    #[serde(rename = "liang_1")]
    Liang1,
    #[serde(rename = "liang_2")]
    Liang2,
    #[serde(rename = "liang_3")]
    Liang3,
    #[serde(rename = "liang_4")]
    Liang4,
    #[serde(rename = "jin_1")]
    Jin1,
    #[serde(rename = "jin_2")]
    Jin2,
    #[serde(rename = "jin_3")]
    Jin3,
    #[serde(rename = "jin_4")]
    Jin4,
    #[serde(rename = "jin_cls_1")]
    JinCls1,
    #[serde(rename = "jin_cls_2")]
    JinCls2,
    #[serde(rename = "jin_cls_3")]
    JinCls3,
    #[serde(rename = "jin_cls_4")]
    JinCls4,
}

impl DgpFamily {
    pub const ALL: [DgpFamily; 12] = [
        DgpFamily::Liang1,
        DgpFamily::Liang2,
        DgpFamily::Liang3,
        DgpFamily::Liang4,
        DgpFamily::Jin1,
        DgpFamily::Jin2,
        DgpFamily::Jin3,
        DgpFamily::Jin4,
        DgpFamily::JinCls1,
        DgpFamily::JinCls2,
        DgpFamily::JinCls3,
        DgpFamily::JinCls4,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            DgpFamily::Liang1 => "liang_1",
            DgpFamily::Liang2 => "liang_2",
            DgpFamily::Liang3 => "liang_3",
            DgpFamily::Liang4 => "liang_4",
            DgpFamily::Jin1 => "jin_1",
            DgpFamily::Jin2 => "jin_2",
            DgpFamily::Jin3 => "jin_3",
            DgpFamily::Jin4 => "jin_4",
            DgpFamily::JinCls1 => "jin_cls_1",
            DgpFamily::JinCls2 => "jin_cls_2",
            DgpFamily::JinCls3 => "jin_cls_3",
            DgpFamily::JinCls4 => "jin_cls_4",
        }
    }

    pub fn is_liang(&self) -> bool {
        matches!(self, DgpFamily::Liang1 | DgpFamily::Liang2 | DgpFamily::Liang3 | DgpFamily::Liang4)
    }

    pub fn is_classification(&self) -> bool {
        matches!(self, DgpFamily::JinCls1 | DgpFamily::JinCls2 | DgpFamily::JinCls3 | DgpFamily::JinCls4)
    }
}

impl std::str::FromStr for DgpFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DgpFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown dgp '{s}'")))
    }
}

fn default_period() -> usize {
    20
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DgpSpec {
    pub family: DgpFamily,
    pub d: usize,
    pub sigma: f64,
    #[serde(default)]
    pub nu: f64,
    /// Liang families: `θ_i = 1{i mod period = 0}` (1-based `i`).
    #[serde(default = "default_period")]
    pub theta_period: usize,
    /// Extra label mixed into every substream.
    #[serde(default)]
    pub stream: u64,
}

impl DgpSpec {
    /// Family defaults: Liang `d=300, σ=3, ν=3`; Jin `d=20, σ=1`;
    /// Jin classification `d=10, σ=0.5`.
    pub fn new(family: DgpFamily) -> Self {
        let (d, sigma, nu) = if family.is_liang() {
            (300, 3.0, 3.0)
        } else if family.is_classification() {
            (10, 0.5, 0.0)
        } else {
            (20, 1.0, 0.0)
        };
        Self {
            family,
            d,
            sigma,
            nu,
            theta_period: default_period(),
            stream: 0,
        }
    }

    pub fn with_dim(mut self, d: usize) -> Self {
        self.d = d;
        self
    }

    pub fn with_period(mut self, period: usize) -> Self {
        self.theta_period = period;
        self
    }

    fn uses_t(&self) -> bool {
        matches!(self.family, DgpFamily::Liang2 | DgpFamily::Liang4)
    }

    pub fn validate(&self) -> Result<()> {
        let min_d = if self.family.is_liang() { 1 } else { 4 };
        if self.d < min_d {
            return Err(Error::Config(format!("{} needs d >= {min_d}, got {}", self.family.name(), self.d)));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::Config(format!("sigma must be positive, got {}", self.sigma)));
        }
        if self.uses_t() && !(self.nu > 2.0) {
            return Err(Error::Config(format!("nu must exceed 2, got {}", self.nu)));
        }
        if self.family.is_liang() && self.theta_period == 0 {
            return Err(Error::Config("theta_period must be positive".into()));
        }
        Ok(())
    }

    /// Regression coefficients of the Liang families.
    pub fn theta(&self) -> Vec<f64> {
        match self.family {
            DgpFamily::Liang3 => vec![1.0 / self.d as f64; self.d],
            _ => (1..=self.d)
                .map(|i| if i % self.theta_period == 0 { 1.0 } else { 0.0 })
                .collect(),
        }
    }

    /// Regression function `μ(x)`.
    pub fn mu(&self, x: &[f64]) -> f64 {
        use DgpFamily::*;
        match self.family {
            Liang1 | Liang2 | Liang3 | Liang4 => x.iter().zip(self.theta()).map(|(a, b)| a * b).sum(),
            Jin1 | Jin3 => {
                if x[1] > 0.0 {
                    4.0 * x[0] * x[2].max(0.5)
                } else {
                    4.0 * x[0] * x[2].min(-0.5)
                }
            }
            Jin2 | Jin4 | JinCls2 | JinCls4 => 2.0 * (x[0] * x[1] + x[3].exp() - 1.0),
            JinCls1 | JinCls3 => {
                let base = if x[0] * x[1] > 0.0 { 0.5 } else { 1.0 };
                base + x[3]
            }
        }
    }

    fn noise_scale(&self, mu: f64) -> f64 {
        use DgpFamily::*;
        let s = self.sigma;
        match self.family {
            Liang1 | Liang2 | Liang4 | Jin1 => s,
            Liang3 => s / (self.d as f64).sqrt(),
            Jin2 | JinCls2 => 1.5 * s,
            JinCls1 => 2.0 * s,
            Jin3 | Jin4 | JinCls3 => s * (5.5 - mu.abs()) / 2.0,
            JinCls4 => s * (5.5 - mu.abs()) / 3.0,
        }
    }

    fn draw_x<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        if self.family.is_liang() {
            if self.family == DgpFamily::Liang4 {
                let t = StudentT::new(self.nu).expect("validated nu");
                (0..self.d).map(|_| t.sample(rng)).collect()
            } else {
                (0..self.d).map(|_| StandardNormal.sample(rng)).collect()
            }
        } else {
            let u = Uniform::new_inclusive(-1.0, 1.0).expect("valid bounds");
            (0..self.d).map(|_| u.sample(rng)).collect()
        }
    }

    fn draw_noise<R: Rng + ?Sized>(&self, mu: f64, rng: &mut R) -> f64 {
        let z: f64 = if self.family == DgpFamily::Liang2 {
            StudentT::new(self.nu).expect("validated nu").sample(rng)
        } else {
            StandardNormal.sample(rng)
        };
        self.noise_scale(mu) * z
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> LabeledSample {
        let x = self.draw_x(rng);
        let mu = self.mu(&x);
        let y = mu + self.draw_noise(mu, rng);
        let y = if self.family.is_classification() {
            if y > 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            y
        };
        LabeledSample::new(x, y, 0.0)
    }
}

/// `n` i.i.d. samples with `c ≡ 0`.
pub fn sample_dgp<R: Rng + ?Sized>(spec: &DgpSpec, n: usize, rng: &mut R) -> Result<Vec<LabeledSample>> {
    spec.validate()?;
    Ok((0..n).map(|_| spec.draw(rng)).collect())
}

/// Fresh labeled and test data for one replication; test labels are kept as
/// ground truth.
pub fn sample_problem(spec: &DgpSpec, split: DataSplit, seed: u64) -> Result<Problem> {
    let labeled = sample_dgp(spec, split.n(), &mut rng::stream(seed, &[role::LABELED, spec.stream]))?;
    let test = sample_dgp(spec, split.m, &mut rng::stream(seed, &[role::TEST, spec.stream]))?
        .into_iter()
        .map(|s| TestSample::with_truth(s.x, s.c, s.y))
        .collect();
    Problem::new(labeled, test, split)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub fdp: f64,
    pub power: f64,
    pub n_selected: usize,
    /// No test point was a true non-null; power is reported as 0.
    pub h1_empty: bool,
}

/// FDP `|S∩H0|/(1∨|S|)` and power `|S∩H1|/|H1|` of one run.
pub fn compute_metrics(outcome: &SelectionOutcome, test: &[TestSample]) -> Result<Metrics> {
    let truth = test
        .iter()
        .enumerate()
        .map(|(j, t)| t.y_hidden.map(|y| y > t.c).ok_or(Error::MissingGroundTruth(j)))
        .collect::<Result<Vec<bool>>>()?;
    for &j in &outcome.selected {
        if j >= truth.len() {
            return Err(Error::IndexOutOfRange { index: j, len: truth.len() });
        }
    }
    let true_sel = outcome.selected.iter().filter(|&&j| truth[j]).count();
    let false_sel = outcome.selected.len() - true_sel;
    let h1 = truth.iter().filter(|&&t| t).count();
    Ok(Metrics {
        fdp: false_sel as f64 / outcome.selected.len().max(1) as f64,
        power: if h1 == 0 { 0.0 } else { true_sel as f64 / h1 as f64 },
        n_selected: outcome.selected.len(),
        h1_empty: h1 == 0,
    })
}

fn default_q_grid() -> Vec<f64> {
    vec![0.1, 0.2, 0.3, 0.4, 0.5]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub dgp: DgpSpec,
    pub split: DataSplit,
    pub procedures: Vec<ProcedureSpec>,
    #[serde(default = "default_q_grid")]
    pub q_grid: Vec<f64>,
    pub reps: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub prune: PruneMode,
    /// Worker threads; `None` uses the global pool.
    #[serde(default)]
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        self.dgp.validate()?;
        if self.reps == 0 {
            return Err(Error::Config("reps must be at least 1".into()));
        }
        if self.procedures.is_empty() {
            return Err(Error::Config("no procedures configured".into()));
        }
        if self.q_grid.is_empty() {
            return Err(Error::Config("empty q grid".into()));
        }
        for &q in &self.q_grid {
            crate::mtest::check_level(q).map_err(|_| Error::Config(format!("q must lie in (0,1), got {q}")))?;
        }
        if self.split.n2 == 0 {
            return Err(Error::EmptyCalibration);
        }
        if self.split.m == 0 {
            return Err(Error::EmptyTest);
        }
        if self.threads == Some(0) {
            return Err(Error::Config("threads must be positive".into()));
        }
        for p in &self.procedures {
            p.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepRow {
    pub procedure: String,
    pub q: f64,
    pub rep: usize,
    pub fdr: f64,
    pub power: f64,
    pub n_selected: usize,
    pub h1_empty: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub procedure: String,
    pub q: f64,
    pub reps: usize,
    pub mean_fdr: f64,
    pub mean_power: f64,
    pub se_fdr: f64,
    pub se_power: f64,
    pub mean_selected: f64,
    pub h1_empty_reps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    /// Ordered by procedure, then level, then replication.
    pub rows: Vec<RepRow>,
    pub summaries: Vec<Summary>,
}

impl ExperimentReport {
    pub fn summary(&self, procedure: &str, q: f64) -> Option<&Summary> {
        self.summaries.iter().find(|s| s.procedure == procedure && s.q == q)
    }
}

fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn run_rep(config: &ExperimentConfig, rep: usize) -> Result<Vec<Vec<Metrics>>> {
    let seed = rng::derive_seed(config.seed, &[role::REP, rep as u64]);
    let wrap = |e: Error| Error::Replication {
        rep,
        seed,
        source: Box::new(e),
    };
    let problem = sample_problem(&config.dgp, config.split, seed).map_err(wrap)?;
    config
        .procedures
        .iter()
        .enumerate()
        .map(|(i, spec)| {
            let proc_seed = rng::derive_seed(seed, &[i as u64]);
            let prepared = prepare(spec, &problem, proc_seed).map_err(wrap)?;
            config
                .q_grid
                .iter()
                .map(|&q| {
                    let out = prepared
                        .select(q, spec.prune.unwrap_or(config.prune), proc_seed)
                        .map_err(wrap)?;
                    compute_metrics(&out, problem.test()).map_err(wrap)
                })
                .collect()
        })
        .collect()
}

/// Runs every procedure at every level on `reps` independent draws. All
/// procedures in a replication see the same data.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let work = || -> Result<Vec<Vec<Vec<Metrics>>>> {
        (0..config.reps).into_par_iter().map(|rep| run_rep(config, rep)).collect()
    };
    let per_rep = match config.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    let mut rows = Vec::with_capacity(config.reps * config.procedures.len() * config.q_grid.len());
    let mut summaries = Vec::new();
    for (i, spec) in config.procedures.iter().enumerate() {
        let label = spec.label();
        for (k, &q) in config.q_grid.iter().enumerate() {
            let metrics: Vec<Metrics> = per_rep.iter().map(|r| r[i][k]).collect();
            for (rep, m) in metrics.iter().enumerate() {
                rows.push(RepRow {
                    procedure: label.clone(),
                    q,
                    rep,
                    fdr: m.fdp,
                    power: m.power,
                    n_selected: m.n_selected,
                    h1_empty: m.h1_empty,
                });
            }
            let fdr: Vec<f64> = metrics.iter().map(|m| m.fdp).collect();
            let power: Vec<f64> = metrics.iter().map(|m| m.power).collect();
            let sel: Vec<f64> = metrics.iter().map(|m| m.n_selected as f64).collect();
            let (mean_fdr, se_fdr) = mean_se(&fdr);
            let (mean_power, se_power) = mean_se(&power);
            summaries.push(Summary {
                procedure: label.clone(),
                q,
                reps: config.reps,
                mean_fdr,
                mean_power,
                se_fdr,
                se_power,
                mean_selected: mean_se(&sel).0,
                h1_empty_reps: metrics.iter().filter(|m| m.h1_empty).count(),
            });
        }
    }
    Ok(ExperimentReport {
        config: config.clone(),
        rows,
        summaries,
    })
}

/// Five-model bank for binary outcomes: constant, ridge, studentized ridge,
/// nearest neighbours, and a median line.
pub fn binary_zoo() -> Vec<Candidate> {
    vec![
        Candidate::new(TrainerSpec::ConstantMean, ScoreConfig::mean(100.0)),
        Candidate::new(TrainerSpec::ridge(1.0), ScoreConfig::mean(100.0)),
        Candidate::new(
            TrainerSpec::Ridge {
                lambda: 1.0,
                features: None,
                spread: true,
            },
            ScoreConfig::studentized(1000.0),
        ),
        Candidate::new(TrainerSpec::knn(15), ScoreConfig::mean(100.0)),
        Candidate::new(TrainerSpec::linear_quantile(0.5), ScoreConfig::quantile(0.5, 1000.0)),
    ]
}

/// Three-model bank for leave-one-out model selection.
pub fn full_msel_bank() -> Vec<Candidate> {
    vec![
        Candidate::new(TrainerSpec::ConstantMean, ScoreConfig::mean(100.0)),
        Candidate::new(TrainerSpec::ridge(1.0), ScoreConfig::mean(100.0)),
        Candidate::new(TrainerSpec::knn(15), ScoreConfig::mean(100.0)),
    ]
}

fn random_features(d: usize, size: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut f = sample_indices(rng, d, size.clamp(1, d)).into_vec();
    f.sort_unstable();
    f
}

/// Eleven candidates: linear quantile lines at levels 0.1..0.9, each on its
/// own random `d/10` features (`M = 100`), plus one ridge model on `d/5`
/// random features scored with the mean (`M = 100`) and studentized
/// (`M = 1000`) clipped scores.
pub fn liang_bank(d: usize, seed: u64) -> Vec<Candidate> {
    let mut rng = rng::stream(seed, &[role::BANK]);
    let mut bank: Vec<Candidate> = (1..=9)
        .map(|i| {
            let alpha = i as f64 / 10.0;
            let features = random_features(d, d / 10, &mut rng);
            Candidate::new(
                TrainerSpec::LinearQuantile {
                    alpha,
                    features: Some(features),
                    steps: 1000,
                    rate: 0.5,
                },
                ScoreConfig::quantile(alpha, 100.0),
            )
        })
        .collect();
    let features = random_features(d, d / 5, &mut rng);
    let ridge = TrainerSpec::Ridge {
        lambda: 1.0,
        features: Some(features),
        spread: true,
    };
    bank.push(Candidate::new(ridge.clone(), ScoreConfig::mean(100.0)));
    bank.push(Candidate::new(ridge, ScoreConfig::studentized(1000.0)));
    bank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::procedures::ProcedureKind;

    #[test]
    fn liang_theta_count() {
        let spec = DgpSpec::new(DgpFamily::Liang1);
        assert_eq!(spec.theta().iter().filter(|&&t| t != 0.0).count(), 15);
        assert_eq!(DgpSpec::new(DgpFamily::Liang3).theta()[7], 1.0 / 300.0);
        assert_eq!(spec.with_dim(50).with_period(10).theta().iter().sum::<f64>(), 5.0);
    }

    #[test]
    fn shapes_and_labels() {
        let mut r = rng::stream(1, &[]);
        for family in DgpFamily::ALL {
            let spec = DgpSpec::new(family);
            let data = sample_dgp(&spec, 25, &mut r).unwrap();
            assert_eq!(data.len(), 25);
            assert!(data.iter().all(|s| s.x.len() == spec.d && s.c == 0.0 && s.y.is_finite()));
            if family.is_classification() {
                assert!(data.iter().all(|s| s.y == 0.0 || s.y == 1.0));
            }
            if !family.is_liang() {
                assert!(data.iter().flat_map(|s| &s.x).all(|v| (-1.0..=1.0).contains(v)));
            }
        }
    }

    #[test]
    fn jin_cls_mean_by_hand() {
        let spec = DgpSpec::new(DgpFamily::JinCls1);
        let mut x = vec![0.0; 10];
        x[0] = 0.5;
        x[1] = 0.5;
        x[3] = 0.2;
        assert!((spec.mu(&x) - 0.7).abs() < 1e-15);
        x[1] = -0.5;
        assert!((spec.mu(&x) - 1.2).abs() < 1e-15);
        let spec = DgpSpec::new(DgpFamily::Jin2);
        assert!((spec.mu(&[0.5, 0.5, 0.0, 0.0]) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn invalid_specs() {
        let mut s = DgpSpec::new(DgpFamily::Liang2);
        s.nu = 2.0;
        assert!(s.validate().is_err());
        let mut s = DgpSpec::new(DgpFamily::Jin1);
        s.sigma = 0.0;
        assert!(s.validate().is_err());
        assert!("liang_9".parse::<DgpFamily>().is_err());
        assert_eq!("jin_cls_3".parse::<DgpFamily>().unwrap(), DgpFamily::JinCls3);
    }

    fn outcome(selected: Vec<usize>) -> SelectionOutcome {
        SelectionOutcome {
            pvalues: vec![],
            aux_sizes: vec![],
            thresholds: vec![],
            xi: vec![],
            r_star: selected.len(),
            selected,
            selected_models: None,
        }
    }

    fn truth(ys: &[f64]) -> Vec<TestSample> {
        ys.iter().map(|&y| TestSample::with_truth(vec![0.0], 0.0, y)).collect()
    }

    #[test]
    fn metrics_examples() {
        let t = truth(&[1.0, 1.0, 0.0, 1.0]);
        let m = compute_metrics(&outcome(vec![0, 1, 2]), &t).unwrap();
        assert!((m.fdp - 1.0 / 3.0).abs() < 1e-15);
        assert!((m.power - 2.0 / 3.0).abs() < 1e-15);
        let m = compute_metrics(&outcome(vec![]), &t).unwrap();
        assert_eq!((m.fdp, m.power), (0.0, 0.0));
        let m = compute_metrics(&outcome(vec![0, 1, 3]), &t).unwrap();
        assert_eq!((m.fdp, m.power), (0.0, 1.0));
        let m = compute_metrics(&outcome(vec![0]), &truth(&[0.0, -1.0])).unwrap();
        assert!(m.h1_empty);
        assert_eq!(m.power, 0.0);
        let hidden = vec![TestSample::new(vec![0.0], 0.0)];
        assert!(matches!(
            compute_metrics(&outcome(vec![]), &hidden),
            Err(Error::MissingGroundTruth(0))
        ));
    }

    fn config(reps: usize) -> ExperimentConfig {
        ExperimentConfig {
            dgp: DgpSpec::new(DgpFamily::JinCls1),
            split: DataSplit::new(20, 20, 10),
            procedures: vec![
                ProcedureSpec::new(ProcedureKind::Scs, vec![full_msel_bank()[1].clone()]),
                ProcedureSpec::new(ProcedureKind::OptcsMsel, full_msel_bank()),
            ],
            q_grid: vec![0.3],
            reps,
            seed: 11,
            prune: PruneMode::Homo,
            threads: None,
        }
    }

    #[test]
    fn single_rep_report() {
        let mut c = config(1);
        c.procedures.truncate(1);
        let r = run_experiment(&c).unwrap();
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.summaries.len(), 1);
        assert_eq!(r.summaries[0].se_fdr, 0.0);
    }

    #[test]
    fn reports_reproducible_across_threads() {
        let mut a = config(6);
        a.threads = Some(1);
        let mut b = config(6);
        b.threads = Some(3);
        let ra = run_experiment(&a).unwrap();
        let rb = run_experiment(&b).unwrap();
        assert_eq!(ra.rows, rb.rows);
        assert_eq!(ra.summaries, rb.summaries);
    }

    #[test]
    fn failing_rep_reports_seed() {
        let mut c = config(2);
        c.split = DataSplit::new(0, 20, 10);
        let err = run_experiment(&c).unwrap_err();
        assert!(matches!(err, Error::Replication { .. }));
    }

    #[test]
    fn liang_bank_shape() {
        let bank = liang_bank(50, 3);
        assert_eq!(bank.len(), 11);
        for c in &bank[..9] {
            match &c.trainer {
                TrainerSpec::LinearQuantile { features: Some(f), .. } => assert_eq!(f.len(), 5),
                other => panic!("unexpected {other:?}"),
            }
        }
        assert_eq!(bank, liang_bank(50, 3));
    }
}
