//! Failed-edge inference for infrastructure networks from connectivity and
//! point probes, scored by a two-part minimum description length.

pub mod evaluation;
pub mod experiment;
pub mod fixtures;
pub mod hazard;
pub mod inference;
pub mod mdl;
pub mod network;
pub mod probes;
pub mod serviceability;
pub mod synthetic;

pub use hazard::{
    failure_prob_table, DisasterScenario, FailureProbTable, FragilityMap, FragilityParams, ScenarioSet, Vulnerability,
};
pub use inference::{
    exhaustive_optimal, infer, joint_path_map, model_cost_baseline, only_connectivity, Algorithm, InferenceError,
    Solution,
};
pub use mdl::{total_cost, MdlCost, Objective};
pub use network::{EdgeId, EdgeSet, InfraNetwork, NodeId, NodeRole, NodeSet};
pub use probes::{sample_probes, ProbeSet};
pub use serviceability::serviced_set;
