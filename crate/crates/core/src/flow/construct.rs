//! Constructions that attain the quantum min-cut: the log-domain reduction to a
//! classical max-flow, the rational optimum, and integer flows on scaled networks.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::classical::{edge_disjoint_paths, lex_min_cut, max_flow_min_cut, DirectedCapacityGraph};
use crate::cut::Cut;
use crate::error::{Error, Result};
use crate::flow::mult::{
    flow_value, fmt_rational, verify_flow, EdgeFlow, FlowKind, MultiplicativeFlow,
};
use crate::flow::oracle::brute_force_min_cuts;
use crate::group::GroupValue;
use crate::network::{Dir, EdgeId, Network, Traversal};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuantumMinCut {
    pub value: BigUint,
    /// The residual-reachability cut of the reduction max-flow.
    pub cut: Cut,
}

fn log_reduction(net: &Network) -> DirectedCapacityGraph {
    DirectedCapacityGraph::reduction(net, |e| GroupValue::log_of(&net.edge(e).capacity))
}

/// Minimum over cuts of the capacity product, via max-flow on the log-capacity
/// reduction digraph. `exp` of the classical min-cut is read off exactly.
pub fn quantum_min_cut(net: &Network) -> QuantumMinCut {
    let (flow, arc_cut) = max_flow_min_cut(&log_reduction(net));
    let cut = Cut::from_partition(net, arc_cut.source_side).expect("residual cut separates source and sink");
    debug_assert_eq!(flow.value.count(), 0);
    debug_assert_eq!(
        flow.value.weight(),
        &BigRational::from_integer(BigInt::from(cut.capacity_product().clone()))
    );
    QuantumMinCut { value: cut.capacity_product().clone(), cut }
}

/// A single-direction rational flow whose value equals the quantum min-cut.
///
/// Opposite arc flows of each edge are netted in the log domain before reading
/// off the multiplicative values. Every value is a ratio of capacity products,
/// so the result is rational by construction. Disconnected networks get the
/// all-ones flow.
pub fn rational_max_flow(net: &Network) -> MultiplicativeFlow {
    let g = log_reduction(net);
    let (flow, _) = max_flow_min_cut(&g);
    let mut along: Vec<[GroupValue; 2]> = vec![[GroupValue::zero(), GroupValue::zero()]; net.edges().len()];
    for (arc, f) in g.arcs().iter().zip(&flow.arc_flow) {
        let e = arc.edge.expect("reduction arcs carry edges");
        let slot = usize::from(arc.tail != net.edge(e).u);
        along[e][slot] = f.clone();
    }
    let edges = along
        .into_iter()
        .map(|[fwd, bwd]| {
            let net_flow = &fwd - &bwd;
            debug_assert_eq!(net_flow.count(), 0);
            if net_flow.is_nonnegative() {
                EdgeFlow { fwd: net_flow.weight().clone(), bwd: BigRational::one() }
            } else {
                EdgeFlow { fwd: BigRational::one(), bwd: net_flow.weight().recip() }
            }
        })
        .collect();
    MultiplicativeFlow::new(FlowKind::RationalSingleDirection, edges)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SaturationViolation {
    pub cut: String,
    pub edge: EdgeId,
    pub ratio: String,
    pub capacity: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SaturationReport {
    pub cuts_checked: usize,
    pub violations: Vec<SaturationViolation>,
}

/// For a flow of value QMC, checks that every edge of every minimum cut carries
/// its full capacity outward: `f(u→v) / f(v→u) = d` with `u` on the source side.
pub fn saturation_check(net: &Network, f: &MultiplicativeFlow) -> Result<SaturationReport> {
    let qmc = quantum_min_cut(net).value;
    let value = flow_value(net, f)?;
    if !value.equals_integer(&qmc) {
        return Err(Error::Precondition(format!("flow value {value} differs from the quantum min-cut {qmc}")));
    }
    let (_, cuts) = brute_force_min_cuts(net)?;
    let mut report = SaturationReport { cuts_checked: cuts.len(), violations: Vec::new() };
    for cut in &cuts {
        for &e in cut.cut_edges() {
            let edge = net.edge(e);
            let inside = if cut.on_source_side(edge.u) { edge.u } else { edge.v };
            let ratio = f.leaving(net, e, inside) / f.entering(net, e, inside);
            if ratio != BigRational::from_integer(BigInt::from(edge.capacity.clone())) {
                report.violations.push(SaturationViolation {
                    cut: cut.display(net).to_string(),
                    edge: e,
                    ratio: fmt_rational(&ratio),
                    capacity: edge.capacity.to_string(),
                });
            }
        }
    }
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScalingParams {
    /// `Π_e d_e`; the fixed cut is a minimum cut of `n·N` for every `n ≥ n0`.
    pub n0: BigUint,
    /// Clears every numerator and denominator of the base flow.
    pub m0: BigUint,
    /// Lexicographically smallest `(|C|, Π d)` cut.
    pub cut: Cut,
    /// Rational optimum on `n0·N`.
    pub base_flow: MultiplicativeFlow,
}

impl ScalingParams {
    /// `QMC(n·N) = n^|C| · Π_C d`, valid for `n ≥ n0`.
    pub fn qmc_at(&self, n: &BigUint) -> BigUint {
        n.pow(self.cut.cardinality() as u32) * self.cut.capacity_product()
    }
}

pub fn scaling_params(net: &Network) -> Result<ScalingParams> {
    if !net.is_connected() {
        return Err(Error::Disconnected);
    }
    let n0 = net.capacity_product();
    let cut = lex_min_cut(net);
    let base_flow = rational_max_flow(&net.scale(&n0)?);
    let m0 = base_flow
        .edges()
        .iter()
        .flat_map(|ef| [&ef.fwd, &ef.bwd])
        .flat_map(|r| [r.numer(), r.denom()])
        .fold(BigUint::one(), |acc, x| acc.lcm(&x.magnitude().clone()));
    Ok(ScalingParams { n0, m0, cut, base_flow })
}

/// Everything needed to assemble integer flows for any admissible `k`.
#[derive(Clone, Debug)]
pub struct IntegerFlowPlan {
    pub params: ScalingParams,
    /// Edge-disjoint `s → t` paths, one per edge of the fixed cut.
    pub paths: Vec<Vec<Traversal>>,
    /// Smallest `k` for which every off-path edge fits its scaled capacity.
    pub k_min: BigUint,
    /// Base flow reoriented along the paths: on a path edge the direction
    /// against the path carries 1.
    reoriented: Vec<EdgeFlow>,
    on_path: BTreeMap<EdgeId, Dir>,
}

pub fn plan_integer_flow(net: &Network) -> Result<IntegerFlowPlan> {
    let params = scaling_params(net)?;
    let paths = edge_disjoint_paths(net);
    if paths.len() != params.cut.cardinality() {
        return Err(Error::Internal(format!(
            "{} disjoint paths but the fixed cut has {} edges",
            paths.len(),
            params.cut.cardinality()
        )));
    }
    let on_path: BTreeMap<EdgeId, Dir> = paths.iter().flatten().map(|t| (t.edge, t.dir)).collect();
    let scale = &params.n0 * &params.m0;
    let mut k_min = BigUint::one();
    let mut reoriented = Vec::with_capacity(net.edges().len());
    for (edge, g) in net.edges().iter().zip(params.base_flow.edges()) {
        match on_path.get(&edge.id) {
            Some(&dir) => {
                let along = g.get(dir) / g.get(dir.reverse());
                let mut ef = EdgeFlow::ones();
                *ef.get_mut(dir) = along;
                reoriented.push(ef);
            }
            None => {
                let ratio = g.ratio();
                let pq = (ratio.numer() * ratio.denom()).magnitude().clone();
                let need = pq.div_ceil(&(&scale * &edge.capacity));
                if need > k_min {
                    k_min = need;
                }
                reoriented.push(EdgeFlow {
                    fwd: BigRational::from_integer(ratio.numer().clone()),
                    bwd: BigRational::from_integer(ratio.denom().clone()),
                });
            }
        }
    }
    Ok(IntegerFlowPlan { params, paths, k_min, reoriented, on_path })
}

#[derive(Clone, Debug)]
pub struct IntegerFlow {
    pub k: BigUint,
    /// `k·n0·m0`.
    pub n: BigUint,
    pub network: Network,
    pub flow: MultiplicativeFlow,
}

impl IntegerFlowPlan {
    /// Assembles the integer flow on `(k·n0·m0)·N`.
    pub fn build(&self, net: &Network, k: &BigUint) -> Result<IntegerFlow> {
        if k < &self.k_min || k.is_zero() {
            return Err(Error::KTooSmall { k: k.clone(), k_min: self.k_min.clone() });
        }
        let km0 = BigRational::from_integer(BigInt::from(k * &self.params.m0));
        let n = k * &self.params.n0 * &self.params.m0;
        let edges = self
            .reoriented
            .iter()
            .enumerate()
            .map(|(id, g)| match self.on_path.get(&id) {
                Some(&dir) => {
                    let mut ef = EdgeFlow::ones();
                    *ef.get_mut(dir) = &km0 * g.get(dir);
                    ef
                }
                None => g.clone(),
            })
            .collect();
        let flow = MultiplicativeFlow::new(FlowKind::Integer, edges);
        let network = net.scale(&n)?;
        let report = verify_flow(&network, &flow);
        if !report.is_valid() {
            return Err(Error::Internal(format!("assembled integer flow is invalid: {}", report.violations[0])));
        }
        Ok(IntegerFlow { k: k.clone(), n, network, flow })
    }
}

/// The integer flow of value `QMC(n·N)` on `n·N` with `n = k·n0·m0`.
pub fn integer_flow(net: &Network, k: &BigUint) -> Result<IntegerFlow> {
    plan_integer_flow(net)?.build(net, k)
}

/// Smallest `n` in `1..=max_n` with `QMF_s(n·N) = QMC(n·N)`, found by exhaustive
/// search, with a maximizing strict flow.
pub fn minimal_strict_scale(
    net: &Network,
    max_n: u64,
    cap: u64,
) -> Result<Option<(u64, Network, MultiplicativeFlow)>> {
    for n in 1..=max_n {
        let scaled = net.scale_by(n)?;
        let qmc = quantum_min_cut(&scaled).value;
        let (value, flow) = crate::flow::oracle::brute_force_max_flow(&scaled, true, cap)?;
        if value.equals_integer(&qmc) {
            return Ok(Some((n, scaled, flow)));
        }
    }
    Ok(None)
}
