use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use faultmap::evaluation::F1Mode;
use faultmap::experiment::{cmd_hazard, cmd_pipeline, ExperimentConfig, ExperimentError, ExperimentInputs, SEED_ENV};
use faultmap::inference::{exhaustive_optimal, infer, Algorithm, Solution, EXHAUSTIVE_EDGE_LIMIT};
use faultmap::probes::ProbeSet;
use faultmap::synthetic::{default_fragility, generate, SyntheticKind};
use faultmap::ScenarioSet;

#[derive(Parser)]
#[command(name = "faultmap", version, about = "Infer failed network edges from connectivity and point probes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the per-scenario, per-edge failure probability table as CSV.
    Hazard {
        #[command(flatten)]
        inputs: InputArgs,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Run seeded trials and write a results CSV plus `<out>.meta.json`.
    Pipeline {
        #[command(flatten)]
        inputs: InputArgs,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Write a synthetic network, optionally with scenarios and fragility.
    GenSynthetic {
        #[arg(long)]
        kind: SyntheticKind,
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        out: PathBuf,
        /// Also write this many scenarios with epicenters at node locations.
        #[arg(long, requires = "magnitudes")]
        scenarios_out: Option<PathBuf>,
        #[arg(long, default_value_t = 5)]
        scenario_count: usize,
        /// Magnitudes to draw scenario magnitudes from.
        #[arg(long, value_delimiter = ',')]
        magnitudes: Vec<f64>,
        #[arg(long)]
        fragility_out: Option<PathBuf>,
    },
    /// Run one algorithm on a probe file and print the solution as JSON.
    Infer {
        #[command(flatten)]
        inputs: InputArgs,
        #[arg(long)]
        probes: PathBuf,
        #[arg(long, default_value = "jointpathmap")]
        algorithm: Algorithm,
        #[arg(long, default_value_t = EXHAUSTIVE_EDGE_LIMIT)]
        oracle_edge_budget: usize,
    },
    /// Exhaustive minimum-cost solution for a probe file (small networks only).
    Oracle {
        #[command(flatten)]
        inputs: InputArgs,
        #[arg(long)]
        probes: PathBuf,
        #[arg(long, default_value_t = EXHAUSTIVE_EDGE_LIMIT)]
        oracle_edge_budget: usize,
    },
}

#[derive(Args)]
struct InputArgs {
    /// JSON experiment config; flags given on the command line override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    network: Option<PathBuf>,
    #[arg(long)]
    scenarios: Option<PathBuf>,
    #[arg(long)]
    fragility: Option<PathBuf>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, value_delimiter = ',')]
    gamma_c: Vec<f64>,
    #[arg(long)]
    gamma_i: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_delimiter = ',')]
    algorithms: Vec<Algorithm>,
    #[arg(long)]
    f1_mode: Option<F1Mode>,
    #[arg(long)]
    oracle_edge_budget: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    record_timing: bool,
}

impl InputArgs {
    fn resolve(&self) -> Result<ExperimentConfig, ExperimentError> {
        let mut config = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        for (flag, slot) in [
            (&self.network, &mut config.network),
            (&self.scenarios, &mut config.scenarios),
            (&self.fragility, &mut config.fragility),
        ] {
            if let Some(p) = flag {
                *slot = p.clone();
            }
        }
        for (name, p) in [
            ("network", &config.network),
            ("scenarios", &config.scenarios),
            ("fragility", &config.fragility),
        ] {
            if p.as_os_str().is_empty() {
                return Err(ExperimentError::Config(format!("no {name} file given")));
            }
        }
        Ok(config)
    }

    fn load(&self) -> Result<ExperimentInputs, ExperimentError> {
        let c = self.resolve()?;
        ExperimentInputs::load(&c.network, &c.scenarios, &c.fragility)
    }
}

impl GridArgs {
    fn apply(self, config: &mut ExperimentConfig) -> Result<(), ExperimentError> {
        if !self.gamma_c.is_empty() {
            config.gamma_c = self.gamma_c;
        }
        if !self.algorithms.is_empty() {
            config.algorithms = self.algorithms;
        }
        config.gamma_i = self.gamma_i.unwrap_or(config.gamma_i);
        config.trials = self.trials.unwrap_or(config.trials);
        config.f1_mode = self.f1_mode.unwrap_or(config.f1_mode);
        config.oracle_edge_budget = self.oracle_edge_budget.unwrap_or(config.oracle_edge_budget);
        config.workers = self.workers.or(config.workers);
        config.record_timing |= self.record_timing;
        config.seed = match (self.seed, config.seed) {
            (Some(s), _) | (None, Some(s)) => Some(s),
            (None, None) => match std::env::var(SEED_ENV) {
                Ok(v) => Some(
                    v.trim()
                        .parse()
                        .map_err(|_| ExperimentError::Config(format!("{SEED_ENV}='{v}' is not a u64")))?,
                ),
                Err(_) => None,
            },
        };
        Ok(())
    }
}

#[derive(Serialize)]
struct SolutionReport {
    algorithm: Algorithm,
    scenario: usize,
    failed_edges: Vec<usize>,
    serviced: Vec<usize>,
    mdl_total: f64,
    mdl_model: f64,
    mdl_data: f64,
    iterations: usize,
}

impl From<&Solution> for SolutionReport {
    fn from(s: &Solution) -> Self {
        Self {
            algorithm: s.algorithm,
            scenario: s.scenario,
            failed_edges: s.failed_edges.iter().map(|e| e.0).collect(),
            serviced: s.serviced.iter().map(|n| n.0).collect(),
            mdl_total: s.cost.total,
            mdl_model: s.cost.model_cost,
            mdl_data: s.cost.data_cost,
            iterations: s.iterations,
        }
    }
}

fn load_probes(inputs: &ExperimentInputs, path: &Path) -> Result<ProbeSet, ExperimentError> {
    ProbeSet::load(&inputs.net, path).map_err(ExperimentError::Data)
}

fn print_solution(solution: &Solution) {
    let report = SolutionReport::from(solution);
    println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
}

fn write(path: &Path, text: &str) -> Result<(), ExperimentError> {
    std::fs::write(path, text)
        .map_err(|e| ExperimentError::Data(anyhow::anyhow!("writing '{}': {e}", path.display())))
}

fn run(cli: Cli) -> Result<(), ExperimentError> {
    match cli.command {
        Command::Hazard { inputs, out } => {
            let c = inputs.resolve()?;
            let table = cmd_hazard(&c.network, &c.scenarios, &c.fragility, &out)?;
            eprintln!(
                "wrote {} x {} table to {}",
                table.scenario_count(),
                table.edge_count(),
                out.display()
            );
        }
        Command::Pipeline { inputs, grid, out } => {
            let mut config = inputs.resolve()?;
            grid.apply(&mut config)?;
            let output = cmd_pipeline(&config, &out)?;
            eprintln!(
                "wrote {} rows and {} summaries to {}",
                output.rows.len(),
                output.summaries.len(),
                out.display()
            );
        }
        Command::GenSynthetic {
            kind,
            size,
            seed,
            out,
            scenarios_out,
            scenario_count,
            magnitudes,
            fragility_out,
        } => {
            let net = generate(kind, size, seed).map_err(|e| ExperimentError::Config(e.to_string()))?;
            write(&out, &net.to_json_string())?;
            if let Some(path) = scenarios_out {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let set = ScenarioSet::at_node_locations(&net, scenario_count, &magnitudes, &mut rng)
                    .map_err(|e| ExperimentError::Config(e.to_string()))?;
                write(&path, &set.to_json_string())?;
            }
            if let Some(path) = fragility_out {
                write(&path, &default_fragility().to_json_string())?;
            }
        }
        Command::Infer {
            inputs,
            probes,
            algorithm,
            oracle_edge_budget,
        } => {
            let data = inputs.load()?;
            let probes = load_probes(&data, &probes)?;
            let solution = infer(algorithm, &data.net, &data.table, &data.scenarios, &probes, oracle_edge_budget)
                .map_err(ExperimentError::from)?;
            print_solution(&solution);
        }
        Command::Oracle {
            inputs,
            probes,
            oracle_edge_budget,
        } => {
            let data = inputs.load()?;
            let probes = load_probes(&data, &probes)?;
            let solution = exhaustive_optimal(&data.net, &data.table, &data.scenarios, &probes, oracle_edge_budget)
                .map_err(ExperimentError::from)?;
            print_solution(&solution);
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
