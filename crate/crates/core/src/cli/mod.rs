//! Command-line plumbing: run configuration, CSV interchange, and report
//! writers.

mod csvio;

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::mtest::{check_level, PruneMode};
use crate::problem::{DataSplit, Problem};
use crate::procedures::{run_procedure, ProcedureKind, ProcedureSpec, SepMode};
use crate::scores::Candidate;
use crate::simlab::{binary_zoo, full_msel_bank, liang_bank, run_experiment, DgpFamily, DgpSpec, ExperimentConfig, ExperimentReport};

pub use csvio::{read_labeled, read_test, write_labeled, write_results, write_test};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Simulate,
    Select,
}

/// DGP family with optional parameter overrides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DgpConfig {
    pub family: DgpFamily,
    #[serde(default)]
    pub d: Option<usize>,
    #[serde(default)]
    pub sigma: Option<f64>,
    #[serde(default)]
    pub nu: Option<f64>,
    #[serde(default)]
    pub theta_period: Option<usize>,
}

impl DgpConfig {
    pub fn resolve(&self) -> DgpSpec {
        let mut spec = DgpSpec::new(self.family);
        if let Some(d) = self.d {
            spec.d = d;
        }
        if let Some(s) = self.sigma {
            spec.sigma = s;
        }
        if let Some(nu) = self.nu {
            spec.nu = nu;
        }
        if let Some(p) = self.theta_period {
            spec.theta_period = p;
        }
        spec
    }
}

/// Named model banks usable in place of an explicit candidate list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bank {
    BinaryZoo,
    FullMsel,
    Liang,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcedureConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub kind: ProcedureKind,
    #[serde(default)]
    pub candidates: Option<Vec<Candidate>>,
    #[serde(default)]
    pub bank: Option<Bank>,
    #[serde(default)]
    pub prune: Option<PruneMode>,
    #[serde(default)]
    pub oversample: Option<bool>,
    #[serde(default)]
    pub split_ratios: Option<Vec<f64>>,
    #[serde(default)]
    pub sep_mode: SepMode,
    #[serde(default)]
    pub randomized_ties: bool,
}

impl ProcedureConfig {
    fn resolve(&self, dim: usize, seed: u64, oversample: Option<bool>) -> Result<ProcedureSpec> {
        let candidates = match (&self.candidates, self.bank) {
            (Some(c), None) => c.clone(),
            (None, Some(Bank::BinaryZoo)) => binary_zoo(),
            (None, Some(Bank::FullMsel)) => full_msel_bank(),
            (None, Some(Bank::Liang)) => liang_bank(dim, seed),
            _ => {
                return Err(Error::Config(format!(
                    "procedure {} needs exactly one of 'candidates' or 'bank'",
                    self.kind.as_str()
                )))
            }
        };
        let mut spec = ProcedureSpec::new(self.kind, candidates);
        spec.name = self.name.clone();
        spec.prune = self.prune;
        spec.split_ratios = self.split_ratios.clone();
        spec.sep_mode = self.sep_mode;
        spec.randomized_ties = self.randomized_ties;
        spec.oversample = self.oversample.or(oversample);
        spec.oversample = Some(spec.oversample_or_default());
        spec.validate()?;
        Ok(spec)
    }
}

fn default_reps() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub command: Option<Command>,
    #[serde(default)]
    pub dgp: Option<DgpConfig>,
    #[serde(default)]
    pub split: Option<DataSplit>,
    /// Preparatory rows of the labeled CSV (`select` only).
    #[serde(default)]
    pub n1: usize,
    #[serde(default)]
    pub labeled: Option<PathBuf>,
    #[serde(default)]
    pub test: Option<PathBuf>,
    pub procedures: Vec<ProcedureConfig>,
    #[serde(default)]
    pub q_grid: Option<Vec<f64>>,
    #[serde(default = "default_reps")]
    pub reps: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub prune: PruneMode,
    #[serde(default)]
    pub oversample: Option<bool>,
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    fn q_grid(&self) -> Result<Vec<f64>> {
        let grid = self.q_grid.clone().unwrap_or_else(|| vec![0.1, 0.2, 0.3, 0.4, 0.5]);
        if grid.is_empty() {
            return Err(Error::Config("empty q grid".into()));
        }
        for &q in &grid {
            check_level(q).map_err(|_| Error::Config(format!("q must lie in (0,1), got {q}")))?;
        }
        Ok(grid)
    }

    fn check_command(&self, expected: Command) -> Result<()> {
        match self.command {
            Some(c) if c != expected => Err(Error::Config(format!(
                "config is for '{c:?}' but '{expected:?}' was requested"
            ))),
            _ => Ok(()),
        }
    }

    fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("."))
    }

    /// Fully resolved experiment for `simulate`.
    pub fn experiment(&self) -> Result<ExperimentConfig> {
        let dgp = self
            .dgp
            .as_ref()
            .ok_or_else(|| Error::Config("simulate needs a 'dgp' section".into()))?
            .resolve();
        dgp.validate()?;
        let split = self
            .split
            .ok_or_else(|| Error::Config("simulate needs a 'split' section".into()))?;
        let procedures = self
            .procedures
            .iter()
            .map(|p| p.resolve(dgp.d, self.seed, self.oversample))
            .collect::<Result<Vec<_>>>()?;
        let config = ExperimentConfig {
            dgp,
            split,
            procedures,
            q_grid: self.q_grid()?,
            reps: self.reps,
            seed: self.seed,
            prune: self.prune,
            threads: self.threads,
        };
        config.validate()?;
        Ok(config)
    }
}

/// Runs the experiment and writes `results.csv` and `summary.json`.
pub fn cmd_simulate(config: &RunConfig) -> Result<ExperimentReport> {
    config.check_command(Command::Simulate)?;
    let experiment = config.experiment()?;
    let report = run_experiment(&experiment)?;
    let out = config.out_dir();
    fs::create_dir_all(&out)?;
    write_results(&out.join("results.csv"), &report)?;
    let mut resolved = experiment.clone();
    // worker count does not affect results
    resolved.threads = None;
    let summary = json!({
        "version": VERSION,
        "config": resolved,
        "summaries": report.summaries,
        "h1_empty_convention": "power is 0 when no test point is non-null; such replications are counted in h1_empty_reps",
        "covariates": "jin families draw X uniformly on [-1, 1]^d",
    });
    fs::write(out.join("summary.json"), serde_json::to_string_pretty(&summary)? + "\n")?;
    Ok(report)
}

/// Loads the CSV pair and runs each configured procedure at the first level
/// of the grid. Writes `selection.json`.
pub fn cmd_select(config: &RunConfig) -> Result<serde_json::Value> {
    config.check_command(Command::Select)?;
    let labeled_path = config
        .labeled
        .as_ref()
        .ok_or_else(|| Error::Config("select needs a labeled CSV".into()))?;
    let test_path = config
        .test
        .as_ref()
        .ok_or_else(|| Error::Config("select needs a test CSV".into()))?;
    let labeled = read_labeled(labeled_path)?;
    let test = read_test(test_path)?;
    if test.is_empty() {
        return Err(Error::EmptyTest);
    }
    if config.n1 >= labeled.len() {
        return Err(Error::Config(format!(
            "n1 = {} leaves no calibration rows out of {}",
            config.n1,
            labeled.len()
        )));
    }
    let problem = Problem::with_preparatory(labeled, test, config.n1)?.without_ground_truth();
    let grid = config.q_grid()?;
    if grid.len() != 1 {
        return Err(Error::Config("select takes a single q".into()));
    }
    let q = grid[0];
    let mut selections = Vec::new();
    for p in &config.procedures {
        let spec = p.resolve(problem.dim(), config.seed, config.oversample)?;
        let out = run_procedure(&spec, &problem, q, config.prune, config.seed)?;
        selections.push(json!({
            "procedure": spec.label(),
            "spec": spec,
            "selected": out.selected,
            "pvalues": out.pvalues,
            "aux_sizes": out.aux_sizes,
            "chosen_models": out.selected_models,
            "r_star": out.r_star,
        }));
    }
    let value = json!({
        "version": VERSION,
        "seed": config.seed,
        "q": q,
        "prune": config.prune,
        "n1": config.n1,
        "n2": problem.n2(),
        "m": problem.m(),
        "selections": selections,
    });
    let out = config.out_dir();
    fs::create_dir_all(&out)?;
    fs::write(out.join("selection.json"), serde_json::to_string_pretty(&value)? + "\n")?;
    Ok(value)
}

#[derive(Debug, Parser)]
#[command(name = "optcs", version, about = "FDR-controlled conformal selection")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Run a replication experiment on a synthetic DGP.
    Simulate(Overrides),
    /// Select test rows from a labeled/test CSV pair.
    Select(Overrides),
}

#[derive(Debug, Args)]
pub struct Overrides {
    #[arg(long)]
    pub config: PathBuf,
    /// One level or a comma-separated grid.
    #[arg(long, value_delimiter = ',')]
    pub q: Option<Vec<f64>>,
    #[arg(long)]
    pub reps: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub prune: Option<PruneMode>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long)]
    pub labeled: Option<PathBuf>,
    #[arg(long)]
    pub test: Option<PathBuf>,
}

impl Overrides {
    pub fn apply(&self, mut config: RunConfig) -> RunConfig {
        if let Some(q) = &self.q {
            config.q_grid = Some(q.clone());
        }
        if let Some(r) = self.reps {
            config.reps = r;
        }
        if let Some(s) = self.seed {
            config.seed = s;
        }
        if let Some(p) = self.prune {
            config.prune = p;
        }
        if let Some(o) = &self.out {
            config.out = Some(o.clone());
        }
        if let Some(t) = self.threads {
            config.threads = Some(t);
        }
        if let Some(l) = &self.labeled {
            config.labeled = Some(l.clone());
        }
        if let Some(t) = &self.test {
            config.test = Some(t.clone());
        }
        config
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        CliCommand::Simulate(o) => {
            let config = o.apply(RunConfig::load(&o.config)?);
            let report = cmd_simulate(&config)?;
            for s in &report.summaries {
                println!(
                    "{} q={} fdr={:.4}±{:.4} power={:.4}±{:.4}",
                    s.procedure, s.q, s.mean_fdr, s.se_fdr, s.mean_power, s.se_power
                );
            }
        }
        CliCommand::Select(o) => {
            let config = o.apply(RunConfig::load(&o.config)?);
            let value = cmd_select(&config)?;
            for s in value["selections"].as_array().into_iter().flatten() {
                println!("{}: {} selected", s["procedure"], s["selected"].as_array().map_or(0, |a| a.len()));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SIM: &str = r#"{
        "dgp": {"family": "jin_cls_1"},
        "split": {"n1": 20, "n2": 20, "m": 10},
        "procedures": [{"kind": "scs", "bank": "full_msel"}],
        "q_grid": [0.3],
        "reps": 2,
        "seed": 7
    }"#;

    #[test]
    fn resolves_defaults() {
        let c = RunConfig::from_json(SIM).unwrap();
        let e = c.experiment().unwrap();
        assert_eq!(e.dgp.d, 10);
        assert_eq!(e.procedures[0].oversample, Some(false));
        assert_eq!(e.prune, PruneMode::Homo);
    }

    #[test]
    fn rejects_unknown_dgp_and_bad_q() {
        assert!(RunConfig::from_json(&SIM.replace("jin_cls_1", "jin_cls_9")).is_err());
        let c = RunConfig::from_json(&SIM.replace("[0.3]", "[1.5]")).unwrap();
        assert!(c.experiment().is_err());
    }

    #[test]
    fn candidates_or_bank_required() {
        let c = RunConfig::from_json(&SIM.replace(r#", "bank": "full_msel""#, "")).unwrap();
        assert!(matches!(c.experiment(), Err(Error::Config(_))));
    }

    #[test]
    fn mismatched_command() {
        let mut c = RunConfig::from_json(SIM).unwrap();
        c.command = Some(Command::Select);
        assert!(cmd_simulate(&c).is_err());
    }
}
