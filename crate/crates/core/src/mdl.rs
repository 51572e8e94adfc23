//! Two-part MDL cost of a hypothesis `(o, S, I)` against observed probes.
//!
//! All code lengths are in bits. An impossible hypothesis (serviced set not
//! induced by the failures, probes not covered, or a zero-probability event)
//! has cost `f64::INFINITY`.

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::hazard::{FailureProbTable, ScenarioSet};
use crate::network::{EdgeSet, InfraNetwork};
use crate::probes::ProbeSet;
use crate::serviceability::{serviced_set, ServicedSet};

/// Minimum decrease (bits) that counts as an improvement.
pub const STRICT_DECREASE_EPS: f64 = 1e-9;

/// Cost breakdown; `total == model_cost + data_cost` whenever both are finite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MdlCost {
    pub model_cost: f64,
    pub data_cost: f64,
    pub total: f64,
    pub feasible: bool,
}

impl MdlCost {
    pub fn new(model_cost: f64, data_cost: f64, feasible: bool) -> Self {
        let total = if feasible { model_cost + data_cost } else { f64::INFINITY };
        Self {
            model_cost,
            data_cost,
            total,
            feasible,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.total.is_finite()
    }
}

/// Which terms an inference objective counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Objective {
    /// Model cost plus the full data cost.
    Joint,
    /// Model cost only; probe containment is still required.
    ModelOnly,
    /// Model cost plus the connectivity-probe data terms; point probes do not
    /// exist for this observer.
    ConnectivityOnly,
}

#[inline]
fn count_log2(count: usize, p: f64) -> f64 {
    if count == 0 {
        0.0
    } else {
        count as f64 * p.log2()
    }
}

/// `-log2 C(n, k)`, infinite when `k > n`.
pub fn neg_log2_binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return f64::INFINITY;
    }
    if k == 0 || k == n {
        return 0.0;
    }
    let ln_c = ln_gamma(n as f64 + 1.0) - ln_gamma(k as f64 + 1.0) - ln_gamma((n - k) as f64 + 1.0);
    -ln_c / std::f64::consts::LN_2
}

/// `-log2 p(o)`.
#[inline]
pub fn scenario_code_length(prior: f64) -> f64 {
    -prior.log2()
}

/// `-log2 F` for a failed edge, `-log2(1 - F)` for a working one.
#[inline]
pub fn edge_code_length(fail_prob: f64, failed: bool) -> f64 {
    if failed {
        -fail_prob.log2()
    } else {
        -(1.0 - fail_prob).log2()
    }
}

/// `-log2 Pr(I | o)` under independent edge failures.
pub fn failure_set_code_length(table: &FailureProbTable, scenario: usize, failed: &EdgeSet) -> f64 {
    table
        .row(scenario)
        .iter()
        .enumerate()
        .map(|(e, &f)| edge_code_length(f, failed.contains(crate::network::EdgeId(e))))
        .sum()
}

/// Data cost of one probe channel: sending `|Q|` and then `Q` given a
/// population of `population` elements sampled at `rate`.
pub fn channel_code_length(population: usize, probed: usize, rate: f64) -> f64 {
    if probed > population {
        return f64::INFINITY;
    }
    neg_log2_binomial(population, probed)
        - 2.0 * count_log2(probed, rate)
        - 2.0 * count_log2(population - probed, 1.0 - rate)
}

/// Data cost from set sizes alone; containment must already hold.
pub fn data_cost_from_counts(
    serviced: usize,
    failed: usize,
    probes: &ProbeSet,
    objective: Objective,
) -> f64 {
    let connectivity = channel_code_length(serviced, probes.qc.len(), probes.gamma_c);
    match objective {
        Objective::Joint => channel_code_length(failed, probes.qi.len(), probes.gamma_i) + connectivity,
        Objective::ConnectivityOnly => connectivity,
        Objective::ModelOnly => 0.0,
    }
}

/// Model cost of `(o, S, I)`; infinite when `S` is not the serviced set
/// induced by `I`.
pub fn model_cost(
    net: &InfraNetwork,
    table: &FailureProbTable,
    scenarios: &ScenarioSet,
    scenario: usize,
    failed: &EdgeSet,
    serviced: &ServicedSet,
) -> f64 {
    if serviced_set(net, failed) != *serviced {
        return f64::INFINITY;
    }
    scenario_code_length(scenarios.prior(scenario)) + failure_set_code_length(table, scenario, failed)
}

/// Data cost of the joint probes given `(S, I)`; infinite when the probes
/// could not have been drawn from them.
pub fn data_cost(serviced: &ServicedSet, failed: &EdgeSet, probes: &ProbeSet) -> f64 {
    if !probes.qc.is_subset(serviced) || !probes.qi.is_subset(failed) {
        return f64::INFINITY;
    }
    data_cost_from_counts(serviced.len(), failed.len(), probes, Objective::Joint)
}

/// Full MDL cost of hypothesis `(o, I)` with `S` induced from `I`.
pub fn total_cost(
    net: &InfraNetwork,
    table: &FailureProbTable,
    scenarios: &ScenarioSet,
    scenario: usize,
    failed: &EdgeSet,
    probes: &ProbeSet,
) -> MdlCost {
    objective_cost(Objective::Joint, net, table, scenarios, scenario, failed, probes)
}

/// Cost of `(o, I)` under the terms selected by `objective`.
pub fn objective_cost(
    objective: Objective,
    net: &InfraNetwork,
    table: &FailureProbTable,
    scenarios: &ScenarioSet,
    scenario: usize,
    failed: &EdgeSet,
    probes: &ProbeSet,
) -> MdlCost {
    let serviced = serviced_set(net, failed);
    let covered = probes.qc.is_subset(&serviced)
        && (objective == Objective::ConnectivityOnly || probes.qi.is_subset(failed));
    let model = scenario_code_length(scenarios.prior(scenario)) + failure_set_code_length(table, scenario, failed);
    let data = if covered {
        data_cost_from_counts(serviced.len(), failed.len(), probes, objective)
    } else {
        f64::INFINITY
    };
    MdlCost::new(model, data, covered)
}
