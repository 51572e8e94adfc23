//! Seeded Monte-Carlo experiments: sample a scenario and its damage, sample
//! probes, run the configured algorithms and score them against the truth.
//!
//! Every random draw derives from the root seed. Trial `t` uses the child
//! seed `derive_seed(root, t)`; the damage and probe stages each get their own
//! substream from the child. The probe stream is restarted for every `gamma_c`
//! in the grid, so probe sets at a higher rate contain those at a lower one.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::Context;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::evaluation::{aggregate, score, u_edge_proportion, write_results_csv, F1Mode, TrialRow};
use crate::hazard::{failure_prob_table, sample_damage, sample_scenario, FailureProbTable, FragilityMap, ScenarioSet};
use crate::inference::{
    check_descent_invariants, exhaustive_optimal, greedy, Algorithm, GreedyOptions, InferenceError, Solution,
    EXHAUSTIVE_EDGE_LIMIT,
};
use crate::network::InfraNetwork;
use crate::probes::{sample_probes, ProbeSet};
use crate::serviceability::serviced_set;

/// Substream tag for scenario and damage sampling.
pub const STAGE_DAMAGE: u64 = 0x6461_6d61_6765;
/// Substream tag for probe sampling.
pub const STAGE_PROBES: u64 = 0x7072_6f62_6573;

/// Environment variable consulted for the seed when neither the config file
/// nor the command line sets one.
pub const SEED_ENV: &str = "FAULTMAP_SEED";

const UNIFORM_PRIOR_NOTE: &str = "scenario file gives no priors; uniform priors assumed";
const FILE_PRIOR_NOTE: &str = "priors taken from the scenario file";

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Child seed for `tag` under `parent`. Injective in `tag` for a fixed parent.
pub fn derive_seed(parent: u64, tag: u64) -> u64 {
    splitmix64(parent ^ splitmix64(tag))
}

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0:#}")]
    Data(anyhow::Error),
    #[error("trial {trial} (gamma_c = {gamma_c}, {algorithm}): no scenario explains the probes")]
    Infeasible {
        trial: usize,
        gamma_c: f64,
        algorithm: Algorithm,
    },
    #[error(transparent)]
    Inference(#[from] InferenceError),
    #[error("trial {trial}: invariant violated: {message}")]
    Invariant { trial: usize, message: String },
    #[error("trial {trial}: {source}")]
    Trial {
        trial: usize,
        #[source]
        source: anyhow::Error,
    },
}

impl ExperimentError {
    /// Process exit status: 2 config, 3 data, 4 infeasible probes, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            ExperimentError::Config(_) => 2,
            ExperimentError::Data(_) => 3,
            ExperimentError::Infeasible { .. } | ExperimentError::Inference(InferenceError::InfeasibleProbes) => 4,
            ExperimentError::Inference(InferenceError::TooLarge { .. }) => 2,
            ExperimentError::Inference(InferenceError::ShapeMismatch(_)) => 3,
            ExperimentError::Invariant { .. } | ExperimentError::Trial { .. } => 1,
        }
    }
}

fn default_budget() -> usize {
    EXHAUSTIVE_EDGE_LIMIT
}

fn default_trials() -> usize {
    30
}

fn default_gamma_i() -> f64 {
    0.3
}

fn default_algorithms() -> Vec<Algorithm> {
    vec![Algorithm::JointPathMap]
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub network: PathBuf,
    #[serde(default)]
    pub scenarios: PathBuf,
    #[serde(default)]
    pub fragility: PathBuf,
    #[serde(default)]
    pub gamma_c: Vec<f64>,
    #[serde(default = "default_gamma_i")]
    pub gamma_i: f64,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default = "default_algorithms")]
    pub algorithms: Vec<Algorithm>,
    #[serde(default)]
    pub f1_mode: F1Mode,
    #[serde(default = "default_budget")]
    pub oracle_edge_budget: usize,
    /// Worker threads; all available cores when unset.
    #[serde(default)]
    pub workers: Option<usize>,
    /// Fill `wall_ms`. Off by default so reruns are byte-identical.
    #[serde(default)]
    pub record_timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            network: PathBuf::new(),
            scenarios: PathBuf::new(),
            fragility: PathBuf::new(),
            gamma_c: Vec::new(),
            gamma_i: default_gamma_i(),
            trials: default_trials(),
            seed: None,
            algorithms: default_algorithms(),
            f1_mode: F1Mode::default(),
            oracle_edge_budget: default_budget(),
            workers: None,
            record_timing: false,
        }
    }
}

impl ExperimentConfig {
    /// Reads a JSON config; relative input paths resolve against the file's
    /// directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ExperimentError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ExperimentError::Config(format!("reading '{}': {e}", path.display())))?;
        let mut config: Self = serde_json::from_str(&text)
            .map_err(|e| ExperimentError::Config(format!("parsing '{}': {e}", path.display())))?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut config.network, &mut config.scenarios, &mut config.fragility] {
            if !p.as_os_str().is_empty() && p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(config)
    }

    pub fn seed(&self) -> Result<u64, ExperimentError> {
        self.seed
            .ok_or_else(|| ExperimentError::Config("no seed given (config, --seed or FAULTMAP_SEED)".into()))
    }

    /// Checks everything that does not need the input files.
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let bad = |m: String| Err(ExperimentError::Config(m));
        if self.gamma_c.is_empty() {
            return bad("gamma_c grid is empty".into());
        }
        for &g in self.gamma_c.iter().chain([&self.gamma_i]) {
            if !(0.0..=1.0).contains(&g) {
                return bad(format!("probe rate {g} outside [0, 1]"));
            }
        }
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.algorithms.is_empty() {
            return bad("no algorithms selected".into());
        }
        let distinct: BTreeSet<_> = self.algorithms.iter().map(|a| a.name()).collect();
        if distinct.len() != self.algorithms.len() {
            return bad("algorithm listed twice".into());
        }
        if self.workers == Some(0) {
            return bad("workers must be at least 1".into());
        }
        self.seed()?;
        Ok(())
    }

    fn check_oracle(&self, net: &InfraNetwork) -> Result<(), ExperimentError> {
        let budget = self.oracle_edge_budget.min(EXHAUSTIVE_EDGE_LIMIT);
        if self.algorithms.contains(&Algorithm::Exhaustive) && net.edge_count() > budget {
            return Err(ExperimentError::Config(format!(
                "exhaustive search requested on {} edges; the budget is {budget}",
                net.edge_count()
            )));
        }
        Ok(())
    }
}

/// Loaded network, scenarios and their failure-probability table.
#[derive(Clone, Debug)]
pub struct ExperimentInputs {
    pub net: InfraNetwork,
    pub scenarios: ScenarioSet,
    pub table: FailureProbTable,
}

impl ExperimentInputs {
    pub fn new(net: InfraNetwork, scenarios: ScenarioSet, fragility: &FragilityMap) -> Result<Self, ExperimentError> {
        let table = failure_prob_table(&net, &scenarios, fragility).map_err(|e| ExperimentError::Data(e.into()))?;
        Ok(Self { net, scenarios, table })
    }

    pub fn load(network: &Path, scenarios: &Path, fragility: &Path) -> Result<Self, ExperimentError> {
        let net = InfraNetwork::load(network).map_err(ExperimentError::Data)?;
        let scenarios = ScenarioSet::load(scenarios).map_err(ExperimentError::Data)?;
        let fragility = FragilityMap::load(fragility).map_err(ExperimentError::Data)?;
        Self::new(net, scenarios, &fragility)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExperimentMetadata {
    pub seed: u64,
    pub trials: usize,
    pub gamma_c: Vec<f64>,
    pub gamma_i: f64,
    pub algorithms: Vec<Algorithm>,
    pub f1_mode: F1Mode,
    pub f1_formula: &'static str,
    pub priors: &'static str,
    pub scenario_count: usize,
    pub node_count: usize,
    pub edge_count: usize,
    pub hop_bound: usize,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    /// Per-trial rows in trial order, then `gamma_c` grid order, then
    /// algorithm order.
    pub rows: Vec<TrialRow>,
    /// One mean row per (`gamma_c`, algorithm) pair.
    pub summaries: Vec<TrialRow>,
    pub metadata: ExperimentMetadata,
}

impl ExperimentOutput {
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        write_results_csv(&self.rows, &self.summaries, out)
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    pub fn metadata_json(&self) -> String {
        serde_json::to_string_pretty(&self.metadata).expect("metadata serializes")
    }

    /// Rows of one algorithm at one `gamma_c`.
    pub fn rows_for(&self, algorithm: Algorithm, gamma_c: f64) -> impl Iterator<Item = &TrialRow> {
        self.rows
            .iter()
            .filter(move |r| r.algorithm == algorithm.name() && r.gamma_c == gamma_c)
    }

    pub fn summary_for(&self, algorithm: Algorithm, gamma_c: f64) -> Option<&TrialRow> {
        self.summaries
            .iter()
            .find(|r| r.algorithm == algorithm.name() && r.gamma_c == gamma_c)
    }
}

/// One sampled ground truth.
#[derive(Clone, Debug, PartialEq)]
pub struct TrialTruth {
    pub seed: u64,
    pub scenario: usize,
    pub failed: crate::network::EdgeSet,
}

/// Scenario and damage for trial `trial` under `root`.
pub fn sample_truth(inputs: &ExperimentInputs, root: u64, trial: usize) -> TrialTruth {
    let seed = derive_seed(root, trial as u64);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, STAGE_DAMAGE));
    let scenario = sample_scenario(&inputs.scenarios, &mut rng);
    let failed = sample_damage(&inputs.table, scenario, &mut rng);
    TrialTruth { seed, scenario, failed }
}

/// Probe sample of `truth` at the given rates.
pub fn sample_trial_probes(
    inputs: &ExperimentInputs,
    truth: &TrialTruth,
    gamma_c: f64,
    gamma_i: f64,
) -> Result<ProbeSet, ExperimentError> {
    let serviced = serviced_set(&inputs.net, &truth.failed);
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(truth.seed, STAGE_PROBES));
    sample_probes(&serviced, &truth.failed, gamma_c, gamma_i, &mut rng)
        .map_err(|e| ExperimentError::Config(e.to_string()))
}

fn solve(
    algorithm: Algorithm,
    inputs: &ExperimentInputs,
    probes: &ProbeSet,
    budget: usize,
) -> Result<Solution, InferenceError> {
    let ExperimentInputs { net, scenarios, table } = inputs;
    match algorithm {
        Algorithm::Exhaustive => exhaustive_optimal(net, table, scenarios, probes, budget),
        other => greedy(other, net, table, scenarios, probes, GreedyOptions::default()),
    }
}

fn run_trial(inputs: &ExperimentInputs, config: &ExperimentConfig, root: u64, trial: usize) -> Result<Vec<TrialRow>, ExperimentError> {
    let truth = sample_truth(inputs, root, trial);
    let mut rows = Vec::with_capacity(config.gamma_c.len() * config.algorithms.len());
    for &gamma_c in &config.gamma_c {
        let probes = sample_trial_probes(inputs, &truth, gamma_c, config.gamma_i)?;
        let mut solved = Vec::with_capacity(config.algorithms.len());
        for &algorithm in &config.algorithms {
            let start = Instant::now();
            let solution = solve(algorithm, inputs, &probes, config.oracle_edge_budget).map_err(|e| match e {
                InferenceError::InfeasibleProbes => ExperimentError::Infeasible {
                    trial,
                    gamma_c,
                    algorithm,
                },
                other => ExperimentError::Trial {
                    trial,
                    source: other.into(),
                },
            })?;
            let elapsed = start.elapsed().as_secs_f64() * 1e3;
            check_descent_invariants(&inputs.net, &probes, &solution)
                .map_err(|message| ExperimentError::Invariant { trial, message })?;
            solved.push((solution, elapsed));
        }
        let optimal = solved
            .iter()
            .find(|(s, _)| s.algorithm == Algorithm::Exhaustive)
            .map(|(s, _)| s.cost.total);
        for (solution, elapsed) in solved {
            let s = score(&truth.failed, &solution.failed_edges, config.f1_mode);
            rows.push(TrialRow {
                trial_id: trial.to_string(),
                seed: Some(truth.seed),
                true_scenario: Some(truth.scenario),
                inferred_scenario: Some(solution.scenario),
                algorithm: solution.algorithm.name().to_string(),
                gamma_c,
                gamma_i: config.gamma_i,
                true_size: truth.failed.len() as f64,
                inferred_size: solution.failed_edges.len() as f64,
                precision: s.precision,
                recall: s.recall,
                f1: s.f1,
                u_edge_prop: u_edge_proportion(&inputs.net, &truth.failed, &solution.failed_edges),
                mdl_total: solution.cost.total,
                mdl_model: solution.cost.model_cost,
                mdl_data: solution.cost.data_cost,
                optimal_mdl: optimal,
                wall_ms: config.record_timing.then_some(elapsed),
            });
        }
    }
    Ok(rows)
}

/// Runs every trial of `config` on already loaded inputs. The input paths in
/// `config` are ignored.
pub fn run_experiment(inputs: &ExperimentInputs, config: &ExperimentConfig) -> Result<ExperimentOutput, ExperimentError> {
    config.validate()?;
    config.check_oracle(&inputs.net)?;
    let root = config.seed()?;

    let work = || {
        (0..config.trials)
            .into_par_iter()
            .map(|t| run_trial(inputs, config, root, t))
            .collect::<Result<Vec<_>, _>>()
    };
    let per_trial = match config.workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| ExperimentError::Config(format!("worker pool: {e}")))?
            .install(work),
        None => work(),
    }?;
    let rows: Vec<TrialRow> = per_trial.into_iter().flatten().collect();

    let mut summaries = Vec::new();
    for &gamma_c in &config.gamma_c {
        for &algorithm in &config.algorithms {
            let group: Vec<TrialRow> = rows
                .iter()
                .filter(|r| r.algorithm == algorithm.name() && r.gamma_c == gamma_c)
                .cloned()
                .collect();
            summaries.push(aggregate(&group).expect("every group has one row per trial"));
        }
    }

    let metadata = ExperimentMetadata {
        seed: root,
        trials: config.trials,
        gamma_c: config.gamma_c.clone(),
        gamma_i: config.gamma_i,
        algorithms: config.algorithms.clone(),
        f1_mode: config.f1_mode,
        f1_formula: match config.f1_mode {
            F1Mode::Paper => "p*r/(p+r)",
            F1Mode::Standard => "2*p*r/(p+r)",
        },
        priors: if inputs.scenarios.priors_defaulted() {
            UNIFORM_PRIOR_NOTE
        } else {
            FILE_PRIOR_NOTE
        },
        scenario_count: inputs.scenarios.len(),
        node_count: inputs.net.node_count(),
        edge_count: inputs.net.edge_count(),
        hop_bound: inputs.net.hop_bound(),
    };
    Ok(ExperimentOutput {
        rows,
        summaries,
        metadata,
    })
}

/// Loads the inputs named in `config`, runs it, and writes the results CSV to
/// `out` with the metadata beside it in `<out>.meta.json`.
pub fn cmd_pipeline(config: &ExperimentConfig, out: &Path) -> Result<ExperimentOutput, ExperimentError> {
    config.validate()?;
    let inputs = ExperimentInputs::load(&config.network, &config.scenarios, &config.fragility)?;
    let output = run_experiment(&inputs, config)?;
    write_file(out, output.to_csv_string().as_bytes())?;
    write_file(&metadata_path(out), output.metadata_json().as_bytes())?;
    Ok(output)
}

/// Sidecar path for the metadata of a results file.
pub fn metadata_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Writes the failure-probability table for the given inputs as CSV.
pub fn cmd_hazard(network: &Path, scenarios: &Path, fragility: &Path, out: &Path) -> Result<FailureProbTable, ExperimentError> {
    let inputs = ExperimentInputs::load(network, scenarios, fragility)?;
    let mut buf = Vec::new();
    inputs
        .table
        .write_csv(&mut buf)
        .map_err(|e| ExperimentError::Data(e.into()))?;
    write_file(out, &buf)?;
    Ok(inputs.table)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), ExperimentError> {
    std::fs::write(path, bytes)
        .with_context(|| format!("writing '{}'", path.display()))
        .map_err(ExperimentError::Data)
}
