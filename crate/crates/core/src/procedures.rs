//! End-to-end selection procedures.
//!
//! Each procedure is split into a score-computation phase ([`prepare`]),
//! which does all model fitting, and a cheap selection phase
//! ([`Prepared::select`]) that runs at a given FDR level. Simulations reuse
//! one prepared state across a grid of levels.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{oversample_balance, Trainer};
use crate::mtest::{bh, bh_outcome, bh_r_star, check_level, optcs_select, PruneMode, SelectionOutcome};
use crate::problem::{LabeledSample, Problem, TestSample};
use crate::pvalues::{conformal_pvalue, conformal_pvalue_randomized, modified_from_counts, SortedCalibration};
use crate::rng::{self, role};
use crate::scores::{
    augmented_pool, clipped_score, generate_scores_fixed, loo_scores, require_binary, score_vector,
    Candidate, ScoreConfig, ScoreFunction,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProcedureKind {
    Scs,
    Greedy,
    BaseRandom,
    BaseCalSplit,
    BaseTrSplit,
    BaseSplitRatio,
    OptcsMsel,
    OptcsFull,
    OptcsFullSep,
    OptcsFullMsel,
}

impl ProcedureKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ProcedureKind::Scs => "scs",
            ProcedureKind::Greedy => "greedy",
            ProcedureKind::BaseRandom => "base_random",
            ProcedureKind::BaseCalSplit => "base_cal_split",
            ProcedureKind::BaseTrSplit => "base_tr_split",
            ProcedureKind::BaseSplitRatio => "base_split_ratio",
            ProcedureKind::OptcsMsel => "optcs_msel",
            ProcedureKind::OptcsFull => "optcs_full",
            ProcedureKind::OptcsFullSep => "optcs_full_sep",
            ProcedureKind::OptcsFullMsel => "optcs_full_msel",
        }
    }

    /// Kinds that train with leave-one-out on the binary-reduced problem.
    pub fn is_full_data(&self) -> bool {
        matches!(
            self,
            ProcedureKind::OptcsFull | ProcedureKind::OptcsFullSep | ProcedureKind::OptcsFullMsel
        )
    }

    /// Kinds with a finite-sample FDR guarantee.
    pub fn is_fdr_valid(&self) -> bool {
        !matches!(self, ProcedureKind::Greedy)
    }
}

/// Variant of the separate-training full-data procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SepMode {
    /// BH on the p-values, no pruning.
    #[default]
    RelaxedBh,
    /// Auxiliary selection sizes plus pruning.
    Rigorous,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcedureSpec {
    #[serde(default)]
    pub name: Option<String>,
    pub kind: ProcedureKind,
    pub candidates: Vec<Candidate>,
    /// Overrides the run-level pruning mode.
    #[serde(default)]
    pub prune: Option<PruneMode>,
    /// Defaults to on for `optcs_full`/`optcs_full_msel`, off otherwise.
    #[serde(default)]
    pub oversample: Option<bool>,
    #[serde(default)]
    pub split_ratios: Option<Vec<f64>>,
    #[serde(default)]
    pub sep_mode: SepMode,
    #[serde(default)]
    pub randomized_ties: bool,
}

impl ProcedureSpec {
    pub fn new(kind: ProcedureKind, candidates: Vec<Candidate>) -> Self {
        Self {
            name: None,
            kind,
            candidates,
            prune: None,
            oversample: None,
            split_ratios: None,
            sep_mode: SepMode::default(),
            randomized_ties: false,
        }
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn with_ratios(mut self, ratios: &[f64]) -> Self {
        self.split_ratios = Some(ratios.to_vec());
        self
    }

    pub fn with_prune(mut self, prune: PruneMode) -> Self {
        self.prune = Some(prune);
        self
    }

    pub fn with_oversample(mut self, on: bool) -> Self {
        self.oversample = Some(on);
        self
    }

    pub fn with_sep_mode(mut self, mode: SepMode) -> Self {
        self.sep_mode = mode;
        self
    }

    pub fn label(&self) -> String {
        self.name.clone().unwrap_or_else(|| self.kind.as_str().to_string())
    }

    pub fn oversample_or_default(&self) -> bool {
        self.oversample
            .unwrap_or(matches!(self.kind, ProcedureKind::OptcsFull | ProcedureKind::OptcsFullMsel))
    }

    pub fn validate(&self) -> Result<()> {
        if self.candidates.is_empty() {
            return Err(Error::InvalidParameter(format!("{} needs at least one candidate", self.label())));
        }
        for c in &self.candidates {
            c.trainer.validate()?;
            c.score.validate()?;
        }
        if let Some(r) = &self.split_ratios {
            if r.iter().any(|v| !(v.is_finite() && *v >= 0.0)) || !(r.iter().sum::<f64>() > 0.0) {
                return Err(Error::InvalidParameter(format!("invalid split ratios {r:?}")));
            }
        }
        Ok(())
    }
}

/// Score-phase output; selection at any level is cheap from here.
#[derive(Debug, Clone)]
pub enum Prepared {
    /// BH on fixed p-values.
    Bh { pvalues: Vec<f64>, chosen: Option<usize> },
    /// Pick the candidate whose SCS set on `selection` is largest, then run
    /// BH on that candidate's `final_pvalues`.
    ChooseThenBh {
        selection: Vec<Vec<f64>>,
        final_pvalues: Vec<Vec<f64>>,
    },
    /// Per-test-point model selection with auxiliary sizes.
    PerPointSelection(PerPointScores),
    /// Fixed p-values with precomputed auxiliary p-values per test point.
    AuxiliaryBh { pvalues: Vec<f64>, auxiliary: Vec<Vec<f64>> },
}

/// Per-candidate calibration and test scores.
#[derive(Debug, Clone)]
pub struct PerPointScores {
    n2: usize,
    test: Vec<Vec<f64>>,
    counts: Vec<Vec<usize>>,
}

impl PerPointScores {
    pub fn new(cal: Vec<Vec<f64>>, test: Vec<Vec<f64>>) -> Result<Self> {
        if cal.is_empty() || cal.len() != test.len() {
            return Err(Error::LengthMismatch("per-candidate score blocks".into()));
        }
        let n2 = cal[0].len();
        if n2 == 0 {
            return Err(Error::EmptyCalibration);
        }
        let counts = cal
            .iter()
            .zip(&test)
            .map(|(c, t)| {
                let sorted = SortedCalibration::new(c);
                t.iter().map(|&v| sorted.count_le(v)).collect()
            })
            .collect();
        Ok(Self { n2, test, counts })
    }

    fn from_shared(n2: usize, vectors: Vec<Vec<f64>>) -> Result<Self> {
        let (cal, test) = vectors
            .into_iter()
            .map(|mut v| {
                let t = v.split_off(n2);
                (v, t)
            })
            .unzip();
        Self::new(cal, test)
    }

    /// `(k̂_j, R̂_j, p_j)` for every test point.
    fn choose(&self, q: f64) -> (Vec<usize>, Vec<f64>, Vec<f64>) {
        let m = self.test[0].len();
        let denom = (self.n2 + 1) as f64;
        let mut models = Vec::with_capacity(m);
        let mut aux = Vec::with_capacity(m);
        let mut pvalues = Vec::with_capacity(m);
        for j in 0..m {
            let mut best = (0usize, 0usize);
            for (k, (test, counts)) in self.test.iter().zip(&self.counts).enumerate() {
                let mut p = modified_from_counts(counts, test, j, self.n2);
                p.push(0.0);
                let size = bh_r_star(&p, q);
                if size > best.1 {
                    best = (k, size);
                }
            }
            let (k, size) = if self.test.len() == 1 || best.1 > 0 { best } else { (0, 0) };
            models.push(k);
            aux.push(size as f64);
            pvalues.push((1 + self.counts[k][j]) as f64 / denom);
        }
        (models, aux, pvalues)
    }
}

impl Prepared {
    pub fn select(&self, q: f64, prune: PruneMode, seed: u64) -> Result<SelectionOutcome> {
        check_level(q)?;
        match self {
            Prepared::Bh { pvalues, chosen } => {
                let mut out = bh_outcome(pvalues.clone(), q)?;
                out.selected_models = chosen.map(|k| vec![k; pvalues.len()]);
                Ok(out)
            }
            Prepared::ChooseThenBh {
                selection,
                final_pvalues,
            } => {
                let mut best = (0usize, 0usize);
                for (k, p) in selection.iter().enumerate() {
                    let size = bh(p, q).len();
                    if size > best.1 {
                        best = (k, size);
                    }
                }
                let k = best.0;
                let mut out = bh_outcome(final_pvalues[k].clone(), q)?;
                out.selected_models = Some(vec![k; final_pvalues[k].len()]);
                Ok(out)
            }
            Prepared::PerPointSelection(scores) => {
                let (models, aux, pvalues) = scores.choose(q);
                let mut out = optcs_select(&pvalues, &aux, q, prune, seed)?;
                out.selected_models = Some(models);
                Ok(out)
            }
            Prepared::AuxiliaryBh { pvalues, auxiliary } => {
                let aux: Vec<f64> = auxiliary
                    .iter()
                    .map(|p| {
                        let mut p = p.clone();
                        p.push(0.0);
                        bh_r_star(&p, q) as f64
                    })
                    .collect();
                optcs_select(pvalues, &aux, q, prune, seed)
            }
        }
    }
}

/// Binary reduction `ỹ = 1{y > c}`, `c̃ = 0`; nulls stay nulls.
pub fn reduce_to_binary(problem: &Problem) -> Problem {
    let ind = |y: f64, c: f64| if y > c { 1.0 } else { 0.0 };
    let labeled = problem
        .labeled()
        .iter()
        .map(|s| LabeledSample::new(s.x.clone(), ind(s.y, s.c), 0.0))
        .collect();
    let test = problem
        .test()
        .iter()
        .map(|t| TestSample {
            x: t.x.clone(),
            c: 0.0,
            y_hidden: t.y_hidden.map(|y| ind(y, t.c)),
        })
        .collect();
    Problem::new(labeled, test, problem.split()).expect("reduction preserves validity")
}

fn fit_all(candidates: &[Candidate], data: &[LabeledSample]) -> Result<Vec<ScoreFunction>> {
    candidates.iter().map(|c| c.fit(data)).collect()
}

/// Seeded partition of `items` into folds with the given ratios. Every fold
/// must hold at least two samples.
fn split_folds<T: Clone>(items: &[T], ratios: &[f64], seed: u64) -> Result<Vec<Vec<T>>> {
    let total: f64 = ratios.iter().sum();
    let n = items.len();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(&mut rng::stream(seed, &[role::SPLIT]));
    let mut folds = Vec::with_capacity(ratios.len());
    let mut start = 0usize;
    let mut cum = 0.0;
    for (f, r) in ratios.iter().enumerate() {
        cum += r;
        let end = if f + 1 == ratios.len() {
            n
        } else {
            ((cum / total) * n as f64).round() as usize
        };
        let end = end.clamp(start, n);
        if end - start < 2 {
            return Err(Error::FoldTooSmall(format!(
                "fold {} of {:?} holds {} of {} samples",
                f + 1,
                ratios,
                end - start,
                n
            )));
        }
        folds.push(idx[start..end].iter().map(|&i| items[i].clone()).collect());
        start = end;
    }
    Ok(folds)
}

/// Training data and calibration problem for procedures that use models
/// fitted once, before calibration.
fn pretrained_blocks(spec: &ProcedureSpec, problem: &Problem, seed: u64) -> Result<(Vec<LabeledSample>, Problem)> {
    match spec.split_ratios.as_deref() {
        None => Ok((problem.preparatory().to_vec(), problem.clone())),
        Some(r) if r.len() == 2 => {
            let mut folds = split_folds(problem.labeled(), r, seed)?;
            let calib = folds.pop().unwrap();
            let train = folds.pop().unwrap();
            let n1 = train.len();
            let mut labeled = train.clone();
            labeled.extend(calib);
            Ok((train, Problem::with_preparatory(labeled, problem.test().to_vec(), n1)?))
        }
        Some(r) => Err(Error::InvalidParameter(format!(
            "{} takes two split ratios (train, calib), got {r:?}",
            spec.label()
        ))),
    }
}

/// SCS p-values of imputed `test` points against `calibration`.
fn fold_pvalues(f: &ScoreFunction, calibration: &[LabeledSample], test: &[LabeledSample]) -> Result<Vec<f64>> {
    let cal: Vec<f64> = calibration
        .iter()
        .map(|s| clipped_score(f, &s.x, s.y, s.c))
        .collect::<Result<_>>()?;
    test.iter()
        .map(|t| conformal_pvalue(&cal, clipped_score(f, &t.x, t.c, t.c)?))
        .collect()
}

fn scs_pvalues(f: &ScoreFunction, problem: &Problem, randomized: bool, seed: u64) -> Result<Vec<f64>> {
    let v = score_vector(f, problem.calibration(), problem)?;
    let (cal, test) = v.split_at(problem.n2());
    if randomized {
        let mut rng = rng::stream(seed, &[role::TIE_BREAK]);
        test.iter()
            .map(|&t| conformal_pvalue_randomized(cal, t, rng.random::<f64>()))
            .collect()
    } else {
        test.iter().map(|&t| conformal_pvalue(cal, t)).collect()
    }
}

/// Split conformal selection with a fixed score function.
pub fn run_scs(
    problem: &Problem,
    score_fn: &ScoreFunction,
    q: f64,
    randomized_ties: bool,
    seed: u64,
) -> Result<SelectionOutcome> {
    let pvalues = scs_pvalues(score_fn, problem, randomized_ties, seed)?;
    Prepared::Bh { pvalues, chosen: None }.select(q, PruneMode::Dtm, seed)
}

fn prepare_greedy(problem: &Problem, candidates: &[ScoreFunction]) -> Result<Prepared> {
    if candidates.is_empty() {
        return Err(Error::InvalidParameter("greedy needs at least one candidate".into()));
    }
    let p: Vec<Vec<f64>> = candidates
        .iter()
        .map(|f| scs_pvalues(f, problem, false, 0))
        .collect::<Result<_>>()?;
    Ok(Prepared::ChooseThenBh {
        selection: p.clone(),
        final_pvalues: p,
    })
}

/// Runs SCS with every candidate and keeps the largest selection set. Does
/// not control FDR.
pub fn run_greedy(problem: &Problem, candidates: &[ScoreFunction], q: f64, seed: u64) -> Result<SelectionOutcome> {
    prepare_greedy(problem, candidates)?.select(q, PruneMode::Dtm, seed)
}

fn prepare_msel(problem: &Problem, candidates: &[ScoreFunction]) -> Result<Prepared> {
    if candidates.is_empty() {
        return Err(Error::InvalidParameter("model selection needs at least one candidate".into()));
    }
    let vectors = candidates
        .iter()
        .map(|f| generate_scores_fixed(f, problem).map(|sm| sm.row(0).to_vec()))
        .collect::<Result<Vec<_>>>()?;
    Ok(Prepared::PerPointSelection(PerPointScores::from_shared(problem.n2(), vectors)?))
}

/// Model selection over pre-trained candidates, one model per test point.
pub fn run_optcs_msel(
    problem: &Problem,
    candidates: &[ScoreFunction],
    q: f64,
    prune: PruneMode,
    seed: u64,
) -> Result<SelectionOutcome> {
    prepare_msel(problem, candidates)?.select(q, prune, seed)
}

fn prepare_full<T: Trainer + ?Sized>(
    problem: &Problem,
    trainer: &T,
    config: ScoreConfig,
    oversample: bool,
) -> Result<Prepared> {
    let v = loo_scores(trainer, config, problem, oversample)?;
    let (cal, test) = v.split_at(problem.n2());
    let pvalues = test.iter().map(|&t| conformal_pvalue(cal, t)).collect::<Result<_>>()?;
    Ok(Prepared::Bh { pvalues, chosen: None })
}

/// Full-data conformal selection with leave-one-out training; BH without
/// pruning. Expects a binary-reduced problem.
pub fn run_optcs_full<T: Trainer + ?Sized>(
    problem: &Problem,
    trainer: &T,
    config: ScoreConfig,
    q: f64,
    oversample: bool,
    seed: u64,
) -> Result<SelectionOutcome> {
    prepare_full(problem, trainer, config, oversample)?.select(q, PruneMode::Dtm, seed)
}

fn prepare_full_sep<T: Trainer + ?Sized>(
    problem: &Problem,
    trainer: &T,
    config: ScoreConfig,
    mode: SepMode,
    oversample: bool,
) -> Result<Prepared> {
    require_binary(problem)?;
    config.validate()?;
    let n = problem.n();
    let n1 = problem.n1();
    let test = problem.test();
    let labeled = problem.labeled();
    let fit = |data: &[LabeledSample], index: usize| -> Result<ScoreFunction> {
        let data = if oversample { oversample_balance(data)? } else { data.to_vec() };
        trainer
            .fit(&data)
            .map(|model| ScoreFunction::new(config, model))
            .map_err(|e| Error::Refit {
                index,
                source: Box::new(e),
            })
    };
    let per_j: Vec<(f64, Vec<f64>)> = (0..problem.m())
        .into_par_iter()
        .map(|j| {
            let mut pool = labeled.to_vec();
            pool.push(test[j].imputed());
            // model trained without the j-th test point scores every test point
            let test_model = fit(&pool[..n], n + j + 1)?;
            let test_scores: Vec<f64> = test
                .iter()
                .map(|t| clipped_score(&test_model, &t.x, t.c, t.c))
                .collect::<Result<_>>()?;
            let mut cal_scores = Vec::with_capacity(n - n1);
            let mut cross: Vec<Vec<f64>> = Vec::new();
            for i in n1..n {
                let mut data = pool.clone();
                data.remove(i);
                let f = fit(&data, i + 1)?;
                let s = &pool[i];
                cal_scores.push(clipped_score(&f, &s.x, s.y, s.c)?);
                if mode == SepMode::Rigorous {
                    cross.push(
                        test.iter()
                            .map(|t| clipped_score(&f, &t.x, t.c, t.c))
                            .collect::<Result<_>>()?,
                    );
                }
            }
            let p = conformal_pvalue(&cal_scores, test_scores[j])?;
            let aux = if mode == SepMode::Rigorous {
                let denom = (n - n1 + 1) as f64;
                (0..test.len())
                    .filter(|&l| l != j)
                    .map(|l| {
                        let count = cal_scores
                            .iter()
                            .zip(&cross)
                            .filter(|(v, row)| **v <= row[l])
                            .count();
                        (count + usize::from(test_scores[j] <= test_scores[l])) as f64 / denom
                    })
                    .collect()
            } else {
                Vec::new()
            };
            Ok((p, aux))
        })
        .collect::<Result<_>>()?;
    let (pvalues, auxiliary): (Vec<f64>, Vec<Vec<f64>>) = per_j.into_iter().unzip();
    Ok(match mode {
        SepMode::RelaxedBh => Prepared::Bh { pvalues, chosen: None },
        SepMode::Rigorous => Prepared::AuxiliaryBh { pvalues, auxiliary },
    })
}

/// Full-data variant where each training set holds at most one imputed null.
pub fn run_optcs_full_sep<T: Trainer + ?Sized>(
    problem: &Problem,
    trainer: &T,
    config: ScoreConfig,
    q: f64,
    mode: SepMode,
    prune: PruneMode,
    seed: u64,
) -> Result<SelectionOutcome> {
    prepare_full_sep(problem, trainer, config, mode, false)?.select(q, prune, seed)
}

fn prepare_full_msel(problem: &Problem, candidates: &[(&dyn Trainer, ScoreConfig)], oversample: bool) -> Result<Prepared> {
    if candidates.is_empty() {
        return Err(Error::InvalidParameter("model selection needs at least one candidate".into()));
    }
    require_binary(problem)?;
    let pool = augmented_pool(problem);
    let vectors = candidates
        .iter()
        .map(|(t, cfg)| crate::scores::loo_scores_from_pool(*t, *cfg, &pool, problem.n1(), oversample))
        .collect::<Result<Vec<_>>>()?;
    Ok(Prepared::PerPointSelection(PerPointScores::from_shared(problem.n2(), vectors)?))
}

/// Full-data training combined with per-test-point model selection.
pub fn run_optcs_full_msel(
    problem: &Problem,
    candidates: &[(&dyn Trainer, ScoreConfig)],
    q: f64,
    prune: PruneMode,
    oversample: bool,
    seed: u64,
) -> Result<SelectionOutcome> {
    prepare_full_msel(problem, candidates, oversample)?.select(q, prune, seed)
}

fn prepare_split_baseline(spec: &ProcedureSpec, problem: &Problem, seed: u64) -> Result<Prepared> {
    let cands = &spec.candidates;
    match spec.kind {
        ProcedureKind::BaseRandom => {
            let (train, calib) = pretrained_blocks(spec, problem, seed)?;
            let k = rng::stream(seed, &[role::PICK]).random_range(0..cands.len());
            let f = cands[k].fit(&train)?;
            Ok(Prepared::Bh {
                pvalues: scs_pvalues(&f, &calib, false, seed)?,
                chosen: Some(k),
            })
        }
        ProcedureKind::BaseCalSplit => {
            let ratios = spec.split_ratios.clone().unwrap_or_else(|| vec![0.25, 0.25, 0.5]);
            if ratios.len() != 3 {
                return Err(Error::InvalidParameter("base_cal_split takes three ratios".into()));
            }
            let fns = fit_all(cands, problem.preparatory())?;
            let folds = split_folds(problem.calibration(), &ratios, seed)?;
            let imputed: Vec<LabeledSample> = problem.imputed_test();
            let mut selection = Vec::with_capacity(fns.len());
            let mut final_pvalues = Vec::with_capacity(fns.len());
            for f in &fns {
                selection.push(fold_pvalues(f, &folds[0], &folds[1])?);
                final_pvalues.push(fold_pvalues(f, &folds[2], &imputed)?);
            }
            Ok(Prepared::ChooseThenBh {
                selection,
                final_pvalues,
            })
        }
        ProcedureKind::BaseTrSplit => {
            let ratios = spec.split_ratios.clone().unwrap_or_else(|| vec![0.25, 0.25, 0.5]);
            if ratios.len() != 3 {
                return Err(Error::InvalidParameter("base_tr_split takes three ratios".into()));
            }
            let folds = split_folds(problem.preparatory(), &ratios, seed)?;
            let fns = fit_all(cands, &folds[2])?;
            let mut selection = Vec::with_capacity(fns.len());
            let mut final_pvalues = Vec::with_capacity(fns.len());
            for f in &fns {
                selection.push(fold_pvalues(f, &folds[0], &folds[1])?);
                final_pvalues.push(scs_pvalues(f, problem, false, seed)?);
            }
            Ok(Prepared::ChooseThenBh {
                selection,
                final_pvalues,
            })
        }
        ProcedureKind::BaseSplitRatio => {
            let ratios = spec
                .split_ratios
                .clone()
                .ok_or_else(|| Error::InvalidParameter("base_split_ratio needs split_ratios".into()))?;
            let imputed: Vec<LabeledSample> = problem.imputed_test();
            match ratios.len() {
                2 => {
                    if cands.len() != 1 {
                        return Err(Error::InvalidParameter(
                            "a two-way split has no selection fold; use one candidate or three ratios".into(),
                        ));
                    }
                    let folds = split_folds(problem.labeled(), &ratios, seed)?;
                    let f = cands[0].fit(&folds[0])?;
                    Ok(Prepared::Bh {
                        pvalues: fold_pvalues(&f, &folds[1], &imputed)?,
                        chosen: Some(0),
                    })
                }
                3 => {
                    let folds = split_folds(problem.labeled(), &ratios, seed)?;
                    let fns = fit_all(cands, &folds[0])?;
                    let sel = split_folds(&folds[1], &[0.5, 0.5], rng::derive_seed(seed, &[role::SPLIT]))?;
                    let mut selection = Vec::with_capacity(fns.len());
                    let mut final_pvalues = Vec::with_capacity(fns.len());
                    for f in &fns {
                        selection.push(fold_pvalues(f, &sel[0], &sel[1])?);
                        final_pvalues.push(fold_pvalues(f, &folds[2], &imputed)?);
                    }
                    Ok(Prepared::ChooseThenBh {
                        selection,
                        final_pvalues,
                    })
                }
                _ => Err(Error::InvalidParameter(format!(
                    "base_split_ratio takes two or three ratios, got {ratios:?}"
                ))),
            }
        }
        other => Err(Error::InvalidParameter(format!("{} is not a split baseline", other.as_str()))),
    }
}

/// Sample-splitting baselines: random model, calibration-fold selection,
/// training-fold selection, and ratio splits of all labeled data.
pub fn run_split_baseline(spec: &ProcedureSpec, problem: &Problem, q: f64, seed: u64) -> Result<SelectionOutcome> {
    spec.validate()?;
    prepare_split_baseline(spec, problem, seed)?.select(q, PruneMode::Dtm, seed)
}

/// Runs the score phase of any procedure.
pub fn prepare(spec: &ProcedureSpec, problem: &Problem, seed: u64) -> Result<Prepared> {
    spec.validate()?;
    let cands = &spec.candidates;
    let oversample = spec.oversample_or_default();
    match spec.kind {
        ProcedureKind::Scs => {
            let (train, calib) = pretrained_blocks(spec, problem, seed)?;
            let f = cands[0].fit(&train)?;
            Ok(Prepared::Bh {
                pvalues: scs_pvalues(&f, &calib, spec.randomized_ties, seed)?,
                chosen: None,
            })
        }
        ProcedureKind::Greedy => {
            let (train, calib) = pretrained_blocks(spec, problem, seed)?;
            prepare_greedy(&calib, &fit_all(cands, &train)?)
        }
        ProcedureKind::OptcsMsel => {
            let (train, calib) = pretrained_blocks(spec, problem, seed)?;
            prepare_msel(&calib, &fit_all(cands, &train)?)
        }
        ProcedureKind::OptcsFull => {
            let reduced = reduce_to_binary(problem);
            prepare_full(&reduced, &cands[0].trainer, cands[0].score, oversample)
        }
        ProcedureKind::OptcsFullSep => {
            let reduced = reduce_to_binary(problem);
            prepare_full_sep(&reduced, &cands[0].trainer, cands[0].score, spec.sep_mode, oversample)
        }
        ProcedureKind::OptcsFullMsel => {
            let reduced = reduce_to_binary(problem);
            let pairs: Vec<(&dyn Trainer, ScoreConfig)> =
                cands.iter().map(|c| (&c.trainer as &dyn Trainer, c.score)).collect();
            prepare_full_msel(&reduced, &pairs, oversample)
        }
        ProcedureKind::BaseRandom
        | ProcedureKind::BaseCalSplit
        | ProcedureKind::BaseTrSplit
        | ProcedureKind::BaseSplitRatio => prepare_split_baseline(spec, problem, seed),
    }
}

/// Runs any procedure end to end. `prune` applies unless `spec.prune` is set.
pub fn run_procedure(
    spec: &ProcedureSpec,
    problem: &Problem,
    q: f64,
    prune: PruneMode,
    seed: u64,
) -> Result<SelectionOutcome> {
    check_level(q)?;
    prepare(spec, problem, seed)?.select(q, spec.prune.unwrap_or(prune), seed)
}
