//! Multiplicative flows and the constructions around them.

pub mod construct;
pub mod exponent;
pub mod mult;
pub mod oracle;

pub use construct::{
    integer_flow, minimal_strict_scale, plan_integer_flow, quantum_min_cut, rational_max_flow, saturation_check,
    scaling_params, IntegerFlow, IntegerFlowPlan, QuantumMinCut, SaturationReport, ScalingParams,
};
pub use exponent::{exponent_flows, strictify, ExponentFlow, Strictified};
pub use mult::{
    cut_ratio, flow_value, is_strict, verify_flow, EdgeFlow, FlowFile, FlowKind, FlowValue, MultiplicativeFlow,
    VerificationReport, Violation,
};
pub use oracle::{brute_force_max_flow, brute_force_min_cuts, brute_force_qmc, brute_force_qmf};
