//! Seismic hazard pipeline.
//!
//! Median PGA from an attenuation relation, node failure probability from a
//! lognormal fragility curve, edge failure probability from the two endpoint
//! probabilities, and Monte-Carlo sampling of scenarios and damage states.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{EdgeSet, InfraNetwork, NodeId, NodeRole};

pub const EARTH_RADIUS_KM: f64 = 6371.0;

/// Moment magnitudes accepted by scenarios and the attenuation relation.
pub const MAGNITUDE_BAND: (f64, f64) = (4.0, 9.0);

const PRIOR_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum HazardError {
    #[error("epicentral distance must be non-negative, got {0}")]
    NegativeDistance(f64),
    #[error("magnitude {0} outside the supported band [4, 9]")]
    MagnitudeOutOfBand(f64),
    #[error("probability {0} outside [0, 1]")]
    OutOfRangeProbability(f64),
    #[error("invalid fragility parameters: median_pga={median_pga}, beta={beta}")]
    BadFragility { median_pga: f64, beta: f64 },
    #[error("no fragility parameters for node {node} (role {role})")]
    MissingFragility { node: usize, role: NodeRole },
    #[error("unknown fragility key '{0}' (expected a role name or a node id)")]
    BadFragilityKey(String),
    #[error("fragility entry for node {node} out of range ({nodes} nodes)")]
    FragilityNodeOutOfRange { node: usize, nodes: usize },
    #[error("scenario set is empty")]
    EmptyScenarioSet,
    #[error("scenario {index}: {reason}")]
    BadScenario { index: usize, reason: String },
    #[error("scenario priors sum to {0}, expected 1")]
    PriorsDoNotSumToOne(f64),
    #[error("magnitude set must be non-empty")]
    EmptyMagnitudeSet,
    #[error("malformed hazard file: {0}")]
    Json(#[from] serde_json::Error),
}

/// Great-circle distance in kilometres between two `(lat, lon)` points in degrees.
pub fn haversine_km(a: (f64, f64), b: (f64, f64)) -> f64 {
    let (lat1, lon1) = (a.0.to_radians(), a.1.to_radians());
    let (lat2, lon2) = (b.0.to_radians(), b.1.to_radians());
    let dlat = lat2 - lat1;
    let dlon = lon2 - lon1;
    let h = (dlat / 2.0).sin().powi(2) + lat1.cos() * lat2.cos() * (dlon / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().min(1.0).asin()
}

/// Median peak ground acceleration (g) at epicentral distance `distance_km`.
pub fn attenuation_median_pga(magnitude: f64, distance_km: f64) -> Result<f64, HazardError> {
    if distance_km.is_nan() || distance_km < 0.0 {
        return Err(HazardError::NegativeDistance(distance_km));
    }
    if !(MAGNITUDE_BAND.0..=MAGNITUDE_BAND.1).contains(&magnitude) {
        return Err(HazardError::MagnitudeOutOfBand(magnitude));
    }
    let r = (distance_km * distance_km + 9.3 * 9.3).sqrt();
    // ln(R/100) tends to -inf as R -> 0, so the max clamps it to zero there.
    let far_field = if distance_km > 0.0 {
        (distance_km / 100.0).ln().max(0.0)
    } else {
        0.0
    };
    let ln_pga = 2.2 + 0.81 * (magnitude - 6.0) - 1.27 * r.ln() - 0.0021 * r + 0.11 * far_field;
    Ok(ln_pga.exp())
}

/// Standard normal CDF via the complementary error function.
pub fn std_normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Lognormal fragility curve for the single "failed" damage state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FragilityParams {
    /// PGA (g) at which the component reaches the failed state with probability 0.5.
    pub median_pga: f64,
    /// Standard deviation of ln(PGA).
    pub beta: f64,
}

impl FragilityParams {
    pub fn new(median_pga: f64, beta: f64) -> Result<Self, HazardError> {
        let params = Self { median_pga, beta };
        params.validate()?;
        Ok(params)
    }

    fn validate(&self) -> Result<(), HazardError> {
        if self.median_pga > 0.0 && self.beta > 0.0 && self.median_pga.is_finite() && self.beta.is_finite() {
            Ok(())
        } else {
            Err(HazardError::BadFragility {
                median_pga: self.median_pga,
                beta: self.beta,
            })
        }
    }
}

/// Probability that a component with `params` fails under ground motion `pga`.
pub fn fragility_failure_prob(pga: f64, params: FragilityParams) -> f64 {
    if pga <= 0.0 {
        return 0.0;
    }
    std_normal_cdf((pga / params.median_pga).ln() / params.beta)
}

/// An edge fails if either endpoint fails.
pub fn edge_failure_prob(p1: f64, p2: f64) -> Result<f64, HazardError> {
    for p in [p1, p2] {
        if !(0.0..=1.0).contains(&p) {
            return Err(HazardError::OutOfRangeProbability(p));
        }
    }
    Ok((p1 + p2 - p1 * p2).clamp(0.0, 1.0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Vulnerability {
    Fragile(FragilityParams),
    Invulnerable(InvulnerableTag),
}

/// The literal string `"invulnerable"` in fragility files.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InvulnerableTag {
    Invulnerable,
}

impl Vulnerability {
    pub const INVULNERABLE: Vulnerability = Vulnerability::Invulnerable(InvulnerableTag::Invulnerable);

    pub fn fragile(median_pga: f64, beta: f64) -> Result<Self, HazardError> {
        FragilityParams::new(median_pga, beta).map(Vulnerability::Fragile)
    }

    pub fn failure_prob(&self, pga: f64) -> f64 {
        match self {
            Vulnerability::Fragile(params) => fragility_failure_prob(pga, *params),
            Vulnerability::Invulnerable(_) => 0.0,
        }
    }
}

/// Role-level fragility defaults with per-node overrides.
///
/// Unspecified transshipment nodes are invulnerable; unspecified supply and
/// demand nodes are an error.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FragilityMap {
    by_role: HashMap<NodeRole, Vulnerability>,
    by_node: BTreeMap<usize, Vulnerability>,
}

impl FragilityMap {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_role(mut self, role: NodeRole, v: Vulnerability) -> Self {
        self.by_role.insert(role, v);
        self
    }

    pub fn with_node(mut self, node: NodeId, v: Vulnerability) -> Self {
        self.by_node.insert(node.0, v);
        self
    }

    pub fn resolve(&self, net: &InfraNetwork, node: NodeId) -> Result<Vulnerability, HazardError> {
        if let Some(v) = self.by_node.get(&node.0) {
            return Ok(*v);
        }
        let role = net.role(node);
        match self.by_role.get(&role) {
            Some(v) => Ok(*v),
            None if role == NodeRole::Transshipment => Ok(Vulnerability::INVULNERABLE),
            None => Err(HazardError::MissingFragility { node: node.0, role }),
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self, HazardError> {
        let raw: BTreeMap<String, Vulnerability> = serde_json::from_str(text)?;
        let mut map = FragilityMap::new();
        for (key, v) in raw {
            if let Vulnerability::Fragile(p) = v {
                p.validate()?;
            }
            let role = match key.as_str() {
                "supply" => Some(NodeRole::Supply),
                "demand" => Some(NodeRole::Demand),
                "transshipment" => Some(NodeRole::Transshipment),
                _ => None,
            };
            match role {
                Some(role) => {
                    map.by_role.insert(role, v);
                }
                None => {
                    let id: usize = key.trim().parse().map_err(|_| HazardError::BadFragilityKey(key.clone()))?;
                    map.by_node.insert(id, v);
                }
            }
        }
        Ok(map)
    }

    pub fn to_json_string(&self) -> String {
        let mut raw: BTreeMap<String, Vulnerability> = BTreeMap::new();
        for (role, v) in &self.by_role {
            raw.insert(role.as_str().to_string(), *v);
        }
        for (id, v) in &self.by_node {
            raw.insert(id.to_string(), *v);
        }
        serde_json::to_string_pretty(&raw).expect("fragility map serializes")
    }

    /// Rejects node overrides that do not exist in `net`.
    pub fn check_against(&self, net: &InfraNetwork) -> Result<(), HazardError> {
        match self.by_node.keys().find(|&&id| id >= net.node_count()) {
            Some(&node) => Err(HazardError::FragilityNodeOutOfRange {
                node,
                nodes: net.node_count(),
            }),
            None => Ok(()),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> anyhow::Result<Self> {
        use anyhow::Context;
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading fragility file '{}'", path.display()))?;
        Self::from_json_str(&text).with_context(|| format!("parsing fragility file '{}'", path.display()))
    }
}

/// An earthquake scenario `o` with its prior `p(o)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DisasterScenario {
    /// `(lat, lon)` in degrees.
    pub epicenter: (f64, f64),
    pub magnitude: f64,
    pub prior: f64,
}

/// Validated scenario set `O`: priors in [0, 1] summing to 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ScenarioFile", into = "ScenarioFile")]
pub struct ScenarioSet {
    scenarios: Vec<DisasterScenario>,
    priors_defaulted: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct ScenarioFile {
    scenarios: Vec<ScenarioRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct ScenarioRecord {
    epicenter: (f64, f64),
    magnitude: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prior: Option<f64>,
}

impl TryFrom<ScenarioFile> for ScenarioSet {
    type Error = HazardError;
    fn try_from(file: ScenarioFile) -> Result<Self, Self::Error> {
        let given = file.scenarios.iter().filter(|r| r.prior.is_some()).count();
        if given == 0 && !file.scenarios.is_empty() {
            let points: Vec<_> = file.scenarios.iter().map(|r| (r.epicenter, r.magnitude)).collect();
            let mut set = ScenarioSet::uniform(&points)?;
            set.priors_defaulted = true;
            return Ok(set);
        }
        if let Some(index) = file.scenarios.iter().position(|r| r.prior.is_none()) {
            return Err(HazardError::BadScenario {
                index,
                reason: "prior missing while other scenarios set one".into(),
            });
        }
        ScenarioSet::new(
            file.scenarios
                .into_iter()
                .map(|r| DisasterScenario {
                    epicenter: r.epicenter,
                    magnitude: r.magnitude,
                    prior: r.prior.unwrap_or_default(),
                })
                .collect(),
        )
    }
}

impl From<ScenarioSet> for ScenarioFile {
    fn from(set: ScenarioSet) -> Self {
        ScenarioFile {
            scenarios: set
                .scenarios
                .into_iter()
                .map(|s| ScenarioRecord {
                    epicenter: s.epicenter,
                    magnitude: s.magnitude,
                    prior: Some(s.prior),
                })
                .collect(),
        }
    }
}

impl ScenarioSet {
    pub fn new(scenarios: Vec<DisasterScenario>) -> Result<Self, HazardError> {
        if scenarios.is_empty() {
            return Err(HazardError::EmptyScenarioSet);
        }
        for (index, s) in scenarios.iter().enumerate() {
            let bad = |reason: String| HazardError::BadScenario { index, reason };
            if !(0.0..=1.0).contains(&s.prior) {
                return Err(bad(format!("prior {} outside [0, 1]", s.prior)));
            }
            if !(MAGNITUDE_BAND.0..=MAGNITUDE_BAND.1).contains(&s.magnitude) {
                return Err(bad(format!("magnitude {} outside [4, 9]", s.magnitude)));
            }
            if !s.epicenter.0.is_finite() || !s.epicenter.1.is_finite() {
                return Err(bad("non-finite epicenter".into()));
            }
        }
        let total: f64 = scenarios.iter().map(|s| s.prior).sum();
        if (total - 1.0).abs() > PRIOR_SUM_TOLERANCE {
            return Err(HazardError::PriorsDoNotSumToOne(total));
        }
        Ok(Self {
            scenarios,
            priors_defaulted: false,
        })
    }

    /// Whether the file gave no priors and uniform ones were assumed.
    pub fn priors_defaulted(&self) -> bool {
        self.priors_defaulted
    }

    /// Scenarios with equal priors.
    pub fn uniform(points: &[((f64, f64), f64)]) -> Result<Self, HazardError> {
        let prior = 1.0 / points.len().max(1) as f64;
        Self::new(
            points
                .iter()
                .map(|&(epicenter, magnitude)| DisasterScenario {
                    epicenter,
                    magnitude,
                    prior,
                })
                .collect(),
        )
    }

    /// `count` scenarios with epicenters drawn from node locations and
    /// magnitudes drawn from `magnitudes`, all equally likely.
    pub fn at_node_locations<R: Rng + ?Sized>(
        net: &InfraNetwork,
        count: usize,
        magnitudes: &[f64],
        rng: &mut R,
    ) -> Result<Self, HazardError> {
        if magnitudes.is_empty() {
            return Err(HazardError::EmptyMagnitudeSet);
        }
        let points: Vec<_> = (0..count)
            .map(|_| {
                let node = net.nodes()[rng.gen_range(0..net.node_count())];
                let magnitude = magnitudes[rng.gen_range(0..magnitudes.len())];
                ((node.lat, node.lon), magnitude)
            })
            .collect();
        Self::uniform(&points)
    }

    pub fn len(&self) -> usize {
        self.scenarios.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scenarios.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<&DisasterScenario> {
        self.scenarios.get(index)
    }

    pub fn scenarios(&self) -> &[DisasterScenario] {
        &self.scenarios
    }

    pub fn prior(&self, index: usize) -> f64 {
        self.scenarios[index].prior
    }

    pub fn from_json_str(text: &str) -> Result<Self, HazardError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario set serializes")
    }

    pub fn load(path: impl AsRef<Path>) -> anyhow::Result<Self> {
        use anyhow::Context;
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading scenario file '{}'", path.display()))?;
        Self::from_json_str(&text).with_context(|| format!("parsing scenario file '{}'", path.display()))
    }
}

/// `F(e | o)` for every scenario `o` and edge `e`.
#[derive(Clone, Debug, PartialEq)]
pub struct FailureProbTable {
    rows: Vec<Vec<f64>>,
}

impl FailureProbTable {
    /// Builds a table from explicit rows; every row must have the same length
    /// and every value must lie in [0, 1].
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, HazardError> {
        let width = rows.first().map_or(0, Vec::len);
        for (index, row) in rows.iter().enumerate() {
            if row.len() != width {
                return Err(HazardError::BadScenario {
                    index,
                    reason: format!("ragged table row ({} vs {})", row.len(), width),
                });
            }
            if let Some(&p) = row.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                return Err(HazardError::OutOfRangeProbability(p));
            }
        }
        Ok(Self { rows })
    }

    pub fn scenario_count(&self) -> usize {
        self.rows.len()
    }

    pub fn edge_count(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    #[inline]
    pub fn prob(&self, scenario: usize, edge: usize) -> f64 {
        self.rows[scenario][edge]
    }

    pub fn row(&self, scenario: usize) -> &[f64] {
        &self.rows[scenario]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    /// Expected number of failed edges under `scenario`.
    pub fn expected_failures(&self, scenario: usize) -> f64 {
        self.rows[scenario].iter().sum()
    }

    /// CSV with columns `scenario_id,edge_id,prob`.
    pub fn write_csv<W: std::io::Write>(&self, out: W) -> csv::Result<()> {
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(["scenario_id", "edge_id", "prob"])?;
        for (o, row) in self.rows.iter().enumerate() {
            for (e, p) in row.iter().enumerate() {
                writer.write_record([o.to_string(), e.to_string(), p.to_string()])?;
            }
        }
        writer.flush()?;
        Ok(())
    }
}

/// Per-scenario, per-edge failure probabilities for `net`.
pub fn failure_prob_table(
    net: &InfraNetwork,
    scenarios: &ScenarioSet,
    fragility: &FragilityMap,
) -> Result<FailureProbTable, HazardError> {
    fragility.check_against(net)?;
    let vulnerability = (0..net.node_count())
        .map(|i| fragility.resolve(net, NodeId(i)))
        .collect::<Result<Vec<_>, _>>()?;

    let rows = scenarios
        .scenarios()
        .par_iter()
        .map(|scenario| {
            let node_probs = net
                .nodes()
                .iter()
                .zip(&vulnerability)
                .map(|(node, v)| {
                    if matches!(v, Vulnerability::Invulnerable(_)) {
                        return Ok(0.0);
                    }
                    let distance = haversine_km(scenario.epicenter, (node.lat, node.lon));
                    let pga = attenuation_median_pga(scenario.magnitude, distance)?;
                    Ok(v.failure_prob(pga))
                })
                .collect::<Result<Vec<f64>, HazardError>>()?;
            net.edges()
                .iter()
                .map(|&(u, v)| edge_failure_prob(node_probs[u.0], node_probs[v.0]))
                .collect::<Result<Vec<f64>, HazardError>>()
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FailureProbTable { rows })
}

/// Draws a damage state: each edge fails independently with `F(e | scenario)`.
///
/// Panics if `scenario` is not a row of `table`.
pub fn sample_damage<R: Rng + ?Sized>(table: &FailureProbTable, scenario: usize, rng: &mut R) -> EdgeSet {
    let row = table.row(scenario);
    let mut failed = EdgeSet::empty(row.len());
    for (e, &p) in row.iter().enumerate() {
        if rng.gen::<f64>() < p {
            failed.insert(crate::network::EdgeId(e));
        }
    }
    failed
}

/// Categorical draw of a scenario index by prior.
pub fn sample_scenario<R: Rng + ?Sized>(scenarios: &ScenarioSet, rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut cumulative = 0.0;
    let mut last_possible = 0;
    for (i, s) in scenarios.scenarios().iter().enumerate() {
        if s.prior > 0.0 {
            last_possible = i;
            cumulative += s.prior;
            if u < cumulative {
                return i;
            }
        }
    }
    // Priors summing to slightly under 1 leave a sliver of mass here.
    last_possible
}
