//! Scoring of inferred failure sets and aggregation of experiment rows.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{EdgeSet, InfraNetwork};
use crate::serviceability::serviced_set;

#[derive(Debug, Error)]
pub enum EvaluationError {
    #[error("cannot aggregate an empty trial list")]
    EmptyTrialList,
}

/// How F1 is formed from precision and recall.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum F1Mode {
    /// `p * r / (p + r)`, i.e. half the usual harmonic mean.
    #[default]
    Paper,
    /// The harmonic mean `2 p r / (p + r)`.
    Standard,
}

impl F1Mode {
    pub fn name(self) -> &'static str {
        match self {
            F1Mode::Paper => "paper",
            F1Mode::Standard => "standard",
        }
    }

    pub fn combine(self, precision: f64, recall: f64) -> f64 {
        let sum = precision + recall;
        if sum == 0.0 {
            return 0.0;
        }
        match self {
            F1Mode::Paper => precision * recall / sum,
            F1Mode::Standard => 2.0 * precision * recall / sum,
        }
    }
}

impl fmt::Display for F1Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for F1Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "paper" => Ok(F1Mode::Paper),
            "standard" => Ok(F1Mode::Standard),
            other => Err(format!("unknown F1 mode '{other}' (expected paper or standard)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Score {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Precision, recall and F1 of `inferred` against `truth`.
///
/// Limit cases: precision is 1 when both sets are empty and 0 when only the
/// inferred set is empty; recall is 1 whenever the truth is empty.
pub fn score(truth: &EdgeSet, inferred: &EdgeSet, mode: F1Mode) -> Score {
    let hits = inferred.intersection_len(truth) as f64;
    let precision = match (inferred.is_empty(), truth.is_empty()) {
        (true, true) => 1.0,
        (true, false) => 0.0,
        (false, _) => hits / inferred.len() as f64,
    };
    let recall = if truth.is_empty() {
        1.0
    } else {
        hits / truth.len() as f64
    };
    Score {
        precision,
        recall,
        f1: mode.combine(precision, recall),
    }
}

/// Fraction of true failures that are invisible to serviceability.
///
/// Starting from `inferred`, each edge of `truth \ inferred` (ascending id) is
/// added to a working set when doing so leaves the serviced set unchanged;
/// the count of such additions is divided by `|truth|`. Empty truth gives 0.
pub fn u_edge_proportion(net: &InfraNetwork, truth: &EdgeSet, inferred: &EdgeSet) -> f64 {
    if truth.is_empty() {
        return 0.0;
    }
    let mut working = inferred.clone();
    let baseline = serviced_set(net, &working);
    let mut added = 0usize;
    for e in truth.iter().filter(|&e| !inferred.contains(e)) {
        working.insert(e);
        if serviced_set(net, &working) == baseline {
            added += 1;
        } else {
            working.remove(e);
        }
    }
    added as f64 / truth.len() as f64
}

/// One CSV row of experiment output. Summary rows carry `trial_id = "mean"`
/// and leave per-trial identifiers blank.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRow {
    pub trial_id: String,
    pub seed: Option<u64>,
    pub true_scenario: Option<usize>,
    pub inferred_scenario: Option<usize>,
    pub algorithm: String,
    pub gamma_c: f64,
    pub gamma_i: f64,
    #[serde(rename = "|I|")]
    pub true_size: f64,
    #[serde(rename = "|Ihat|")]
    pub inferred_size: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub u_edge_prop: f64,
    pub mdl_total: f64,
    pub mdl_model: f64,
    pub mdl_data: f64,
    pub optimal_mdl: Option<f64>,
    pub wall_ms: Option<f64>,
}

fn mean<I: Iterator<Item = f64>>(values: I) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    sum / n as f64
}

fn mean_present<I: Iterator<Item = Option<f64>>>(values: I) -> Option<f64> {
    let present: Vec<f64> = values.flatten().collect();
    (!present.is_empty()).then(|| mean(present.into_iter()))
}

/// Arithmetic mean of every metric across `trials`.
///
/// Identity columns (`algorithm`, rates) are taken from the first row; the
/// caller groups rows so that these agree.
pub fn aggregate(trials: &[TrialRow]) -> Result<TrialRow, EvaluationError> {
    let first = trials.first().ok_or(EvaluationError::EmptyTrialList)?;
    Ok(TrialRow {
        trial_id: "mean".to_string(),
        seed: None,
        true_scenario: None,
        inferred_scenario: None,
        algorithm: first.algorithm.clone(),
        gamma_c: first.gamma_c,
        gamma_i: first.gamma_i,
        true_size: mean(trials.iter().map(|r| r.true_size)),
        inferred_size: mean(trials.iter().map(|r| r.inferred_size)),
        precision: mean(trials.iter().map(|r| r.precision)),
        recall: mean(trials.iter().map(|r| r.recall)),
        f1: mean(trials.iter().map(|r| r.f1)),
        u_edge_prop: mean(trials.iter().map(|r| r.u_edge_prop)),
        mdl_total: mean(trials.iter().map(|r| r.mdl_total)),
        mdl_model: mean(trials.iter().map(|r| r.mdl_model)),
        mdl_data: mean(trials.iter().map(|r| r.mdl_data)),
        optimal_mdl: mean_present(trials.iter().map(|r| r.optimal_mdl)),
        wall_ms: mean_present(trials.iter().map(|r| r.wall_ms)),
    })
}

/// Writes rows followed by summary rows, with a header.
pub fn write_results_csv<W: std::io::Write>(rows: &[TrialRow], summaries: &[TrialRow], out: W) -> csv::Result<()> {
    let mut writer = csv::Writer::from_writer(out);
    for row in rows.iter().chain(summaries) {
        writer.serialize(row)?;
    }
    if rows.is_empty() && summaries.is_empty() {
        writer.write_record([
            "trial_id",
            "seed",
            "true_scenario",
            "inferred_scenario",
            "algorithm",
            "gamma_c",
            "gamma_i",
            "|I|",
            "|Ihat|",
            "precision",
            "recall",
            "f1",
            "u_edge_prop",
            "mdl_total",
            "mdl_model",
            "mdl_data",
            "optimal_mdl",
            "wall_ms",
        ])?;
    }
    writer.flush()?;
    Ok(())
}
