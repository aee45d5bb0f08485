//! Multiplicative ("quantum") max-flow and min-cut on capacity-weighted
//! multigraphs.
//!
//! Capacities combine by product across a cut. The min-cut side is solved
//! exactly by a classical max-flow over log-capacities (kept symbolic, see
//! [`group`]); the flow side covers rational flows, integer flows on scaled
//! networks, strict flows, their prime-exponent decompositions and the
//! teleportation protocols read off them. Small instances can be checked
//! against exhaustive search ([`flow::oracle`]) and against random tensor
//! contractions over a prime field ([`tensor`]).

pub mod classical;
pub mod cut;
pub mod error;
pub mod factor;
pub mod fixtures;
pub mod flow;
pub mod generate;
pub mod group;
pub mod network;
pub mod protocol;
pub mod scan;
pub mod tensor;

pub use cut::{enumerate_cuts, Cut};
pub use error::{Error, Result};
pub use factor::{factorize, PrimeFactorization};
pub use flow::{
    brute_force_max_flow, brute_force_qmc, brute_force_qmf, cut_ratio, exponent_flows, flow_value, integer_flow,
    is_strict, minimal_strict_scale, plan_integer_flow, quantum_min_cut, rational_max_flow, saturation_check,
    scaling_params, strictify, verify_flow, EdgeFlow, FlowKind, FlowValue, IntegerFlow, MultiplicativeFlow,
    QuantumMinCut,
};
pub use group::GroupValue;
pub use network::{Dir, EdgeId, EdgeInstance, Network, Traversal, VertexId};
pub use protocol::{extract_protocol, simulate_protocol, teleportation_pipeline, Protocol, TeleportStep};
pub use tensor::{contract_random, estimate_qmf_tilde, TensorAssignment, TensorConfig};
