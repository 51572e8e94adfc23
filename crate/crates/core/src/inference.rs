//! Failure-set inference.
//!
//! [`joint_path_map`] runs, for every scenario, a greedy descent that starts
//! from the point probes and repeatedly adds the edge whose failure lowers the
//! MDL cost the most; the scenario with the cheapest final hypothesis wins.
//! [`model_cost_baseline`] and [`only_connectivity`] run the same descent on
//! reduced objectives, and [`exhaustive_optimal`] enumerates every failure
//! set on small instances.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hazard::{FailureProbTable, ScenarioSet};
use crate::mdl::{
    data_cost_from_counts, edge_code_length, failure_set_code_length, objective_cost, scenario_code_length,
    total_cost, MdlCost, Objective, STRICT_DECREASE_EPS,
};
use crate::network::{EdgeId, EdgeSet, InfraNetwork};
use crate::probes::ProbeSet;
use crate::serviceability::{serviced_set, BoundedBfs, ServicedSet};

/// Hard cap on the edge count accepted by [`exhaustive_optimal`].
pub const EXHAUSTIVE_EDGE_LIMIT: usize = 20;

#[derive(Debug, Error)]
pub enum InferenceError {
    #[error("no scenario admits a finite-cost explanation of the probes")]
    InfeasibleProbes,
    #[error("exhaustive search over {edges} edges exceeds the budget of {budget}")]
    TooLarge { edges: usize, budget: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    JointPathMap,
    ModelCost,
    OnlyConnectivity,
    Exhaustive,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::JointPathMap,
        Algorithm::ModelCost,
        Algorithm::OnlyConnectivity,
        Algorithm::Exhaustive,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::JointPathMap => "jointpathmap",
            Algorithm::ModelCost => "modelcost",
            Algorithm::OnlyConnectivity => "onlyconnectivity",
            Algorithm::Exhaustive => "exhaustive",
        }
    }

    pub fn objective(self) -> Objective {
        match self {
            Algorithm::JointPathMap | Algorithm::Exhaustive => Objective::Joint,
            Algorithm::ModelCost => Objective::ModelOnly,
            Algorithm::OnlyConnectivity => Objective::ConnectivityOnly,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown algorithm '{s}' (expected one of jointpathmap, modelcost, onlyconnectivity, exhaustive)"))
    }
}

/// One accepted greedy step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TraceStep {
    pub edge: EdgeId,
    /// Objective value after adding `edge`.
    pub cost: f64,
}

/// Greedy descent for a single scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioRun {
    pub scenario: usize,
    pub failed: EdgeSet,
    /// Objective value of the starting hypothesis.
    pub initial_cost: f64,
    /// Objective value of the final hypothesis, recomputed from scratch.
    pub final_cost: f64,
    pub trace: Vec<TraceStep>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub algorithm: Algorithm,
    pub scenario: usize,
    pub failed_edges: EdgeSet,
    pub serviced: ServicedSet,
    /// Breakdown under the algorithm's own objective.
    pub cost: MdlCost,
    pub iterations: usize,
    pub trace: Vec<TraceStep>,
    /// Every scenario's descent, in scenario order (empty for exhaustive search).
    pub runs: Vec<ScenarioRun>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct GreedyOptions {
    /// Skip the BFS for candidates that cannot change any hop distance.
    /// Never changes the selected sequence.
    pub prune: bool,
}

impl Default for GreedyOptions {
    fn default() -> Self {
        Self { prune: true }
    }
}

fn check_shapes(
    net: &InfraNetwork,
    table: &FailureProbTable,
    scenarios: &ScenarioSet,
    probes: &ProbeSet,
) -> Result<(), InferenceError> {
    let mismatch = |m: String| Err(InferenceError::ShapeMismatch(m));
    if table.scenario_count() != scenarios.len() {
        return mismatch(format!(
            "table has {} scenarios, scenario set has {}",
            table.scenario_count(),
            scenarios.len()
        ));
    }
    if table.edge_count() != net.edge_count() {
        return mismatch(format!(
            "table has {} edges, network has {}",
            table.edge_count(),
            net.edge_count()
        ));
    }
    if probes.qi.universe() != net.edge_count() || probes.qc.universe() != net.node_count() {
        return mismatch("probe sets were built for a different network".into());
    }
    Ok(())
}

/// Greedy MDL descent with point and connectivity probes.
pub fn joint_path_map(
    net: &InfraNetwork,
    table: &FailureProbTable,
    scenarios: &ScenarioSet,
    probes: &ProbeSet,
) -> Result<Solution, InferenceError> {
    greedy(Algorithm::JointPathMap, net, table, scenarios, probes, GreedyOptions::default())
}

/// Greedy descent on model cost alone, with probe containment enforced.
pub fn model_cost_baseline(
    net: &InfraNetwork,
    table: &FailureProbTable,
    scenarios: &ScenarioSet,
    probes: &ProbeSet,
) -> Result<Solution, InferenceError> {
    greedy(Algorithm::ModelCost, net, table, scenarios, probes, GreedyOptions::default())
}

/// Greedy descent for an observer that only has connectivity probes.
pub fn only_connectivity(
    net: &InfraNetwork,
    table: &FailureProbTable,
    scenarios: &ScenarioSet,
    probes: &ProbeSet,
) -> Result<Solution, InferenceError> {
    greedy(Algorithm::OnlyConnectivity, net, table, scenarios, probes, GreedyOptions::default())
}

/// Runs `algorithm`; `oracle_edge_budget` only applies to exhaustive search.
pub fn infer(
    algorithm: Algorithm,
    net: &InfraNetwork,
    table: &FailureProbTable,
    scenarios: &ScenarioSet,
    probes: &ProbeSet,
    oracle_edge_budget: usize,
) -> Result<Solution, InferenceError> {
    match algorithm {
        Algorithm::Exhaustive => exhaustive_optimal(net, table, scenarios, probes, oracle_edge_budget),
        other => greedy(other, net, table, scenarios, probes, GreedyOptions::default()),
    }
}

/// Shared greedy engine. `algorithm` must not be [`Algorithm::Exhaustive`].
pub fn greedy(
    algorithm: Algorithm,
    net: &InfraNetwork,
    table: &FailureProbTable,
    scenarios: &ScenarioSet,
    probes: &ProbeSet,
    options: GreedyOptions,
) -> Result<Solution, InferenceError> {
    assert_ne!(algorithm, Algorithm::Exhaustive, "exhaustive search is not a greedy objective");
    check_shapes(net, table, scenarios, probes)?;
    let objective = algorithm.objective();
    let observed = match objective {
        Objective::ConnectivityOnly => probes.without_point_probes(),
        _ => probes.clone(),
    };

    let runs: Vec<ScenarioRun> = (0..scenarios.len())
        .into_par_iter()
        .map(|o| descend(objective, net, table, scenarios, o, &observed, options))
        .collect();

    let mut best: Option<&ScenarioRun> = None;
    for run in &runs {
        if run.final_cost.is_finite() && best.is_none_or(|b| run.final_cost < b.final_cost) {
            best = Some(run);
        }
    }
    let best = best.ok_or(InferenceError::InfeasibleProbes)?;
    let cost = objective_cost(objective, net, table, scenarios, best.scenario, &best.failed, &observed);
    Ok(Solution {
        algorithm,
        scenario: best.scenario,
        serviced: serviced_set(net, &best.failed),
        failed_edges: best.failed.clone(),
        cost,
        iterations: best.trace.len(),
        trace: best.trace.clone(),
        runs,
    })
}

/// Objective value from the quantities a candidate can change.
struct CandidateCost<'a> {
    objective: Objective,
    probes: &'a ProbeSet,
}

impl CandidateCost<'_> {
    fn value(&self, model: f64, serviced: usize, failed: usize, covered: bool) -> f64 {
        if !covered {
            return f64::INFINITY;
        }
        model + data_cost_from_counts(serviced, failed, self.probes, self.objective)
    }
}

fn descend(
    objective: Objective,
    net: &InfraNetwork,
    table: &FailureProbTable,
    scenarios: &ScenarioSet,
    scenario: usize,
    probes: &ProbeSet,
    options: GreedyOptions,
) -> ScenarioRun {
    let row = table.row(scenario);
    let eval = CandidateCost { objective, probes };
    let mut failed = probes.qi.clone();
    let mut bfs = BoundedBfs::new(net);
    let mut scratch = BoundedBfs::new(net);
    bfs.run(net, &failed, None);

    let prior_bits = scenario_code_length(scenarios.prior(scenario));
    let mut edge_bits = failure_set_code_length(table, scenario, &failed);
    let mut serviced = bfs.serviced_count(net);
    let mut current = eval.value(prior_bits + edge_bits, serviced, failed.len(), bfs.covers(&probes.qc));
    let initial_cost = current;
    let mut trace = Vec::new();

    // Adding failures only shrinks the serviced set, so an uncovered
    // connectivity probe stays uncovered. An infinite cost with covered
    // probes (e.g. gamma_c = 1 with unprobed serviced nodes) can still drop.
    let recoverable = bfs.covers(&probes.qc);
    loop {
        if !recoverable {
            break;
        }
        let critical = if options.prune {
            Some(bfs.distance_critical_edges(net, &failed))
        } else {
            None
        };
        // Rank by decrease; from an infinite cost every finite candidate is an
        // infinite decrease, so rank those by the resulting cost instead.
        let mut best: Option<(EdgeId, f64, f64, f64, usize)> = None;
        for e in net.edge_ids() {
            if failed.contains(e) {
                continue;
            }
            let f = row[e.0];
            let delta = edge_code_length(f, true) - edge_code_length(f, false);
            let model = prior_bits + (edge_bits + delta);
            let (cand_serviced, covered) = match &critical {
                Some(c) if !c.contains(e) => (serviced, true),
                _ => {
                    scratch.run(net, &failed, Some(e));
                    (scratch.serviced_count(net), scratch.covers(&probes.qc))
                }
            };
            let cand = eval.value(model, cand_serviced, failed.len() + 1, covered);
            if !cand.is_finite() || current - cand <= STRICT_DECREASE_EPS {
                continue;
            }
            let key = if current.is_finite() { current - cand } else { -cand };
            if best.is_none_or(|b| key > b.2) {
                best = Some((e, cand, key, delta, cand_serviced));
            }
        }
        let Some((e, cand, _, delta, cand_serviced)) = best else {
            break;
        };
        failed.insert(e);
        edge_bits += delta;
        current = cand;
        serviced = cand_serviced;
        trace.push(TraceStep { edge: e, cost: cand });
        bfs.run(net, &failed, None);
        debug_assert!(bfs.covers(&probes.qc));
        debug_assert_eq!(bfs.serviced_count(net), serviced);
    }

    let final_cost = if current.is_finite() {
        objective_cost(objective, net, table, scenarios, scenario, &failed, probes).total
    } else {
        f64::INFINITY
    };
    ScenarioRun {
        scenario,
        failed,
        initial_cost,
        final_cost,
        trace,
    }
}

/// Exact minimiser of the joint MDL cost over all scenarios and all failure
/// sets containing the point probes. Ties go to the smallest scenario index,
/// then to the subset whose bitmask over the unprobed edges (ascending id,
/// lowest bit first) is smallest.
pub fn exhaustive_optimal(
    net: &InfraNetwork,
    table: &FailureProbTable,
    scenarios: &ScenarioSet,
    probes: &ProbeSet,
    max_edges: usize,
) -> Result<Solution, InferenceError> {
    let budget = max_edges.min(EXHAUSTIVE_EDGE_LIMIT);
    if net.edge_count() > budget {
        return Err(InferenceError::TooLarge {
            edges: net.edge_count(),
            budget,
        });
    }
    check_shapes(net, table, scenarios, probes)?;
    let free: Vec<EdgeId> = net.edge_ids().filter(|&e| !probes.qi.contains(e)).collect();
    let subset = |mask: u64| {
        let mut failed = probes.qi.clone();
        for (bit, &e) in free.iter().enumerate() {
            if mask >> bit & 1 == 1 {
                failed.insert(e);
            }
        }
        failed
    };

    let mut best: Option<(usize, u64, MdlCost)> = None;
    for o in 0..scenarios.len() {
        let (mask, cost) = (0..1u64 << free.len())
            .into_par_iter()
            .map(|mask| (mask, total_cost(net, table, scenarios, o, &subset(mask), probes)))
            .min_by(|a, b| a.1.total.total_cmp(&b.1.total).then(a.0.cmp(&b.0)))
            .expect("at least the empty subset");
        if cost.is_finite() && best.is_none_or(|b| cost.total < b.2.total) {
            best = Some((o, mask, cost));
        }
    }
    let (scenario, mask, cost) = best.ok_or(InferenceError::InfeasibleProbes)?;
    let failed = subset(mask);
    Ok(Solution {
        algorithm: Algorithm::Exhaustive,
        scenario,
        serviced: serviced_set(net, &failed),
        failed_edges: failed,
        cost,
        iterations: 0,
        trace: Vec::new(),
        runs: Vec::new(),
    })
}

/// Replays every scenario descent of `solution` and reports the first
/// violated invariant: point probes kept, connectivity probes serviced at
/// every step, and each step lowering the objective by more than the
/// strict-decrease tolerance.
pub fn check_descent_invariants(net: &InfraNetwork, probes: &ProbeSet, solution: &Solution) -> Result<(), String> {
    let keeps_points = solution.algorithm != Algorithm::OnlyConnectivity;
    if keeps_points && !probes.qi.is_subset(&solution.failed_edges) {
        return Err(format!("{}: point probes missing from the solution", solution.algorithm));
    }
    if !probes.qc.is_subset(&solution.serviced) {
        return Err(format!("{}: connectivity probe not serviced by the solution", solution.algorithm));
    }
    for run in &solution.runs {
        let mut failed = if keeps_points {
            probes.qi.clone()
        } else {
            EdgeSet::empty(net.edge_count())
        };
        let mut previous = run.initial_cost;
        for (step, t) in run.trace.iter().enumerate() {
            if !failed.insert(t.edge) {
                return Err(format!("scenario {} step {step}: edge {} added twice", run.scenario, t.edge));
            }
            let decrease = previous - t.cost;
            if decrease.is_nan() || decrease <= STRICT_DECREASE_EPS {
                return Err(format!(
                    "scenario {} step {step}: cost {} does not strictly decrease from {previous}",
                    run.scenario, t.cost
                ));
            }
            if !probes.qc.is_subset(&serviced_set(net, &failed)) {
                return Err(format!("scenario {} step {step}: connectivity probe lost", run.scenario));
            }
            previous = t.cost;
        }
        if failed != run.failed {
            return Err(format!("scenario {}: trace does not rebuild the final set", run.scenario));
        }
    }
    Ok(())
}
