//! Observed probes: connectivity probes `Q_c` sampled from the serviced set
//! and point probes `Q_I` sampled from the failed edges.

use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::network::{EdgeId, EdgeSet, InfraNetwork, NodeId, NodeRole, NodeSet};

#[derive(Debug, Error)]
pub enum ProbeError {
    #[error("sampling rate {name} = {value} outside [0, 1]")]
    BadRate { name: &'static str, value: f64 },
    #[error("connectivity probe {0} is not a demand node")]
    NotDemand(usize),
    #[error("{what} probe id {id} out of range")]
    OutOfRange { what: &'static str, id: usize },
    #[error("malformed probe file: {0}")]
    Json(#[from] serde_json::Error),
}

/// Joint probes plus the rates they were sampled with.
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeSet {
    pub qc: NodeSet,
    pub qi: EdgeSet,
    pub gamma_c: f64,
    pub gamma_i: f64,
}

fn check_rate(name: &'static str, value: f64) -> Result<(), ProbeError> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(ProbeError::BadRate { name, value })
    }
}

impl ProbeSet {
    pub fn new(
        net: &InfraNetwork,
        qc: &[usize],
        qi: &[usize],
        gamma_c: f64,
        gamma_i: f64,
    ) -> Result<Self, ProbeError> {
        check_rate("gamma_c", gamma_c)?;
        check_rate("gamma_i", gamma_i)?;
        let mut qc_set = net.empty_node_set();
        for &n in qc {
            if n >= net.node_count() {
                return Err(ProbeError::OutOfRange { what: "connectivity", id: n });
            }
            if net.role(NodeId(n)) != NodeRole::Demand {
                return Err(ProbeError::NotDemand(n));
            }
            qc_set.insert(NodeId(n));
        }
        let mut qi_set = net.empty_edge_set();
        for &e in qi {
            if e >= net.edge_count() {
                return Err(ProbeError::OutOfRange { what: "point", id: e });
            }
            qi_set.insert(EdgeId(e));
        }
        Ok(Self {
            qc: qc_set,
            qi: qi_set,
            gamma_c,
            gamma_i,
        })
    }

    /// Same observations with the point-probe channel removed.
    pub fn without_point_probes(&self) -> Self {
        Self {
            qc: self.qc.clone(),
            qi: EdgeSet::empty(self.qi.universe()),
            gamma_c: self.gamma_c,
            gamma_i: self.gamma_i,
        }
    }

    pub fn to_file_repr(&self) -> ProbeFile {
        ProbeFile {
            qc: self.qc.iter().map(|n| n.0).collect(),
            qi: self.qi.iter().map(|e| e.0).collect(),
            gamma_c: self.gamma_c,
            gamma_i: self.gamma_i,
        }
    }

    pub fn from_file_repr(net: &InfraNetwork, file: &ProbeFile) -> Result<Self, ProbeError> {
        Self::new(net, &file.qc, &file.qi, file.gamma_c, file.gamma_i)
    }

    pub fn from_json_str(net: &InfraNetwork, text: &str) -> Result<Self, ProbeError> {
        let file: ProbeFile = serde_json::from_str(text)?;
        Self::from_file_repr(net, &file)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_file_repr()).expect("probe set serializes")
    }

    pub fn load(net: &InfraNetwork, path: impl AsRef<Path>) -> anyhow::Result<Self> {
        use anyhow::Context;
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading probe file '{}'", path.display()))?;
        Self::from_json_str(net, &text).with_context(|| format!("parsing probe file '{}'", path.display()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeFile {
    pub qc: Vec<usize>,
    pub qi: Vec<usize>,
    pub gamma_c: f64,
    pub gamma_i: f64,
}

/// Independent Bernoulli sampling, `S` first then `I`, each in ascending id
/// order. One uniform draw per element, so for a fixed stream the sampled
/// sets are nested in the rates.
pub fn sample_probes<R: Rng + ?Sized>(
    serviced: &NodeSet,
    failed: &EdgeSet,
    gamma_c: f64,
    gamma_i: f64,
    rng: &mut R,
) -> Result<ProbeSet, ProbeError> {
    check_rate("gamma_c", gamma_c)?;
    check_rate("gamma_i", gamma_i)?;
    let mut qc = NodeSet::empty(serviced.universe());
    for n in serviced.iter() {
        if rng.gen::<f64>() < gamma_c {
            qc.insert(n);
        }
    }
    let mut qi = EdgeSet::empty(failed.universe());
    for e in failed.iter() {
        if rng.gen::<f64>() < gamma_i {
            qi.insert(e);
        }
    }
    Ok(ProbeSet {
        qc,
        qi,
        gamma_c,
        gamma_i,
    })
}
