//! Teleportation protocols read off strict optimal flows, and their dimension
//! bookkeeping.
//!
//! A protocol is a list of steps, each moving a system of prime dimension `p`
//! along an `s → t` path. A step uses one factor `p` of the entangled pair on
//! every edge it crosses, so an edge with capacity `d` can host steps whose
//! dimensions multiply to at most `d`. Steps commute; the simulator does not
//! depend on their order.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::factor::is_prime;
use crate::flow::construct::{plan_integer_flow, quantum_min_cut};
use crate::flow::exponent::{exponent_flows, strictify, ExponentFlow, Strictified};
use crate::flow::mult::{flow_value, is_strict, verify_flow, FlowKind, MultiplicativeFlow};
use crate::network::{big_to_json, Network, Traversal, VertexId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TeleportStep {
    pub dimension: BigUint,
    pub path: Vec<Traversal>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Protocol {
    pub steps: Vec<TeleportStep>,
    pub claimed_dimension: BigUint,
}

impl Protocol {
    pub fn empty() -> Self {
        Protocol { steps: Vec::new(), claimed_dimension: BigUint::one() }
    }

    pub fn from_steps(steps: Vec<TeleportStep>) -> Self {
        let claimed_dimension = steps.iter().fold(BigUint::one(), |acc, s| acc * &s.dimension);
        Protocol { steps, claimed_dimension }
    }

    pub fn to_file(&self) -> ProtocolFile {
        ProtocolFile {
            steps: self
                .steps
                .iter()
                .map(|s| StepFile { p: big_to_json(&s.dimension), path: s.path.clone() })
                .collect(),
            dimension: big_to_json(&self.claimed_dimension),
        }
    }

    pub fn from_file(file: &ProtocolFile) -> Result<Self> {
        let big = |v: &Value| -> Result<BigUint> {
            match v {
                Value::Number(n) => n.as_u64().map(BigUint::from),
                Value::String(s) => s.parse().ok(),
                _ => None,
            }
            .ok_or_else(|| Error::Syntax(format!("expected a positive integer, got {v}")))
        };
        let steps = file
            .steps
            .iter()
            .map(|s| Ok(TeleportStep { dimension: big(&s.p)?, path: s.path.clone() }))
            .collect::<Result<_>>()?;
        Ok(Protocol { steps, claimed_dimension: big(&file.dimension)? })
    }
}

/// `{"steps":[{"p":5,"path":[{"edge":0,"dir":"fwd"}]}],"dimension":25}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolFile {
    pub steps: Vec<StepFile>,
    pub dimension: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepFile {
    pub p: Value,
    pub path: Vec<Traversal>,
}

#[derive(Clone, Debug)]
pub struct Extraction {
    pub protocol: Protocol,
    pub cycles_cancelled: usize,
    /// Exponent flows left after every step was read off.
    pub residual: BTreeMap<BigUint, ExponentFlow>,
}

impl Extraction {
    pub fn residual_is_zero(&self) -> bool {
        self.residual.values().all(ExponentFlow::is_zero)
    }
}

/// Reads a teleportation protocol off a strict integer flow; the protocol's
/// dimension is the flow value (the quantum min-cut when the flow is optimal).
///
/// Per prime, lowest first: cancel directed cycles of the exponent flow
/// (searching from the lowest vertex id), then repeatedly walk a positive path
/// from the source to the sink, lowering it by one and emitting one step.
pub fn extract_protocol(net: &Network, f: &MultiplicativeFlow) -> Result<Extraction> {
    if !f.kind().is_integer() || !verify_flow(net, &f.clone().with_kind(FlowKind::StrictInteger)).is_valid() {
        return Err(Error::Precondition("protocol extraction needs a valid strict integer flow".into()));
    }
    debug_assert!(is_strict(net, f));
    let value = flow_value(net, f)?;

    let mut flows = exponent_flows(f)?;
    let mut steps = Vec::new();
    let mut cycles_cancelled = 0;
    for flow in flows.values_mut() {
        while let Some(cycle) = find_cycle(net, flow) {
            let least = cycle.iter().map(|&t| flow.get(t)).min().expect("cycles are nonempty");
            for &t in &cycle {
                *flow.get_mut(t) -= least;
            }
            cycles_cancelled += 1;
        }
        while let Some(path) = positive_path(net, flow)? {
            for &t in &path {
                *flow.get_mut(t) -= 1;
            }
            steps.push(TeleportStep { dimension: flow.prime.clone(), path });
        }
    }
    let extraction = Extraction { protocol: Protocol::from_steps(steps), cycles_cancelled, residual: flows };
    if !extraction.residual_is_zero() {
        return Err(Error::Internal("exponent flow left over after extraction".into()));
    }
    if !value.equals_integer(&extraction.protocol.claimed_dimension) {
        return Err(Error::Internal(format!("extracted dimension differs from the flow value {value}")));
    }
    Ok(extraction)
}

fn outgoing<'a>(net: &'a Network, flow: &'a ExponentFlow, v: VertexId) -> impl Iterator<Item = Traversal> + 'a {
    net.incident(v).iter().map(move |&e| Traversal::leaving(net, e, v)).filter(move |&t| flow.get(t) > 0)
}

/// A directed cycle of positive arcs, by depth-first search from the lowest
/// vertex id.
fn find_cycle(net: &Network, flow: &ExponentFlow) -> Option<Vec<Traversal>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Open,
        Done,
    }
    let n = net.vertex_count();
    let mut mark = vec![Mark::New; n];
    for root in 0..n {
        if mark[root] != Mark::New {
            continue;
        }
        // stack of (vertex, its positive out-arcs, next index); `via` holds the arc into each frame
        let mut stack: Vec<(VertexId, Vec<Traversal>, usize)> = vec![(root, outgoing(net, flow, root).collect(), 0)];
        let mut via: Vec<Traversal> = Vec::new();
        mark[root] = Mark::Open;
        while let Some((v, arcs, next)) = stack.last_mut() {
            let v = *v;
            if *next == arcs.len() {
                mark[v] = Mark::Done;
                stack.pop();
                via.pop();
                continue;
            }
            let t = arcs[*next];
            *next += 1;
            let w = t.head(net);
            match mark[w] {
                Mark::Open => {
                    let start = stack.iter().position(|(x, _, _)| *x == w).expect("open vertices are on the stack");
                    let mut cycle: Vec<Traversal> = via[start..].to_vec();
                    cycle.push(t);
                    return Some(cycle);
                }
                Mark::New => {
                    mark[w] = Mark::Open;
                    via.push(t);
                    stack.push((w, outgoing(net, flow, w).collect(), 0));
                }
                Mark::Done => {}
            }
        }
    }
    None
}

/// Greedy positive walk from the source to the sink, lowest edge id first.
fn positive_path(net: &Network, flow: &ExponentFlow) -> Result<Option<Vec<Traversal>>> {
    let Some(first) = outgoing(net, flow, net.source()).next() else {
        return Ok(None);
    };
    let mut path = vec![first];
    let mut at = first.head(net);
    while at != net.sink() {
        if path.len() > net.edges().len() {
            return Err(Error::Internal("positive walk did not terminate".into()));
        }
        let t = outgoing(net, flow, at)
            .next()
            .ok_or_else(|| Error::Internal(format!("exponent flow of {} stalls at {}", flow.prime, net.name(at))))?;
        path.push(t);
        at = t.head(net);
    }
    Ok(Some(path))
}

/// Everything the scale → integer flow → strictify → extract → simulate chain
/// produced for one network.
#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub n: BigUint,
    pub network: Network,
    pub integer_flow: MultiplicativeFlow,
    pub strict: Strictified,
    pub extraction: Extraction,
    pub report: SimulationReport,
    pub qmc: BigUint,
}

impl PipelineRun {
    pub fn is_sound(&self) -> bool {
        self.report.is_valid() && self.report.dimension == self.qmc && self.extraction.residual_is_zero()
    }
}

/// Runs the chain at `n = k·n0·m0` (`k = k_min` by default). A network whose
/// terminals are disconnected is handled at `n = 1` with the all-ones flow.
pub fn teleportation_pipeline(net: &Network, k: Option<&BigUint>) -> Result<PipelineRun> {
    let (n, network, integer_flow) = if net.is_connected() {
        let plan = plan_integer_flow(net)?;
        let out = plan.build(net, k.unwrap_or(&plan.k_min))?;
        (out.n, out.network, out.flow)
    } else {
        (BigUint::one(), net.clone(), MultiplicativeFlow::ones(net, FlowKind::Integer))
    };
    let strict = strictify(&network, &integer_flow)?;
    let extraction = extract_protocol(&network, &strict.flow)?;
    let report = simulate_protocol(&network, &extraction.protocol);
    let qmc = quantum_min_cut(&network).value;
    Ok(PipelineRun { n, network, integer_flow, strict, extraction, report, qmc })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "kebab-case")]
pub enum ProtocolViolation {
    NotPrime { step: usize, dimension: String },
    UnknownEdge { step: usize, edge: usize },
    Disconnected { step: usize, position: usize },
    WrongEndpoints { step: usize },
    Capacity { edge: usize, usage: String, capacity: String },
    Dimension { claimed: String, delivered: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimulationReport {
    /// Per edge id, product of the dimensions of steps crossing it.
    pub usage: Vec<BigUint>,
    pub dimension: BigUint,
    pub violations: Vec<ProtocolViolation>,
}

impl SimulationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> Value {
        serde_json::json!({
            "usage": self.usage.iter().map(big_to_json).collect::<Vec<_>>(),
            "dimension": big_to_json(&self.dimension),
            "violations": self.violations,
        })
    }
}

/// Multiplies each step's dimension into the usage of every edge it crosses and
/// checks the results against capacities and the claimed dimension.
pub fn simulate_protocol(net: &Network, prot: &Protocol) -> SimulationReport {
    let mut usage = vec![BigUint::one(); net.edges().len()];
    let mut dimension = BigUint::one();
    let mut violations = Vec::new();
    for (i, step) in prot.steps.iter().enumerate() {
        if !is_prime(&step.dimension) {
            violations.push(ProtocolViolation::NotPrime { step: i, dimension: step.dimension.to_string() });
        }
        dimension *= &step.dimension;
        if let Some(t) = step.path.iter().find(|t| t.edge >= net.edges().len()) {
            violations.push(ProtocolViolation::UnknownEdge { step: i, edge: t.edge });
            continue;
        }
        let connected = step.path.windows(2).position(|w| w[0].head(net) != w[1].tail(net));
        if let Some(p) = connected {
            violations.push(ProtocolViolation::Disconnected { step: i, position: p + 1 });
        }
        let starts = step.path.first().map(|t| t.tail(net)) == Some(net.source());
        let ends = step.path.last().map(|t| t.head(net)) == Some(net.sink());
        if !starts || !ends {
            violations.push(ProtocolViolation::WrongEndpoints { step: i });
        }
        for t in &step.path {
            usage[t.edge] *= &step.dimension;
        }
    }
    for e in net.edges() {
        if usage[e.id] > e.capacity {
            violations.push(ProtocolViolation::Capacity {
                edge: e.id,
                usage: usage[e.id].to_string(),
                capacity: e.capacity.to_string(),
            });
        }
    }
    if dimension != prot.claimed_dimension {
        violations.push(ProtocolViolation::Dimension {
            claimed: prot.claimed_dimension.to_string(),
            delivered: dimension.to_string(),
        });
    }
    SimulationReport { usage, dimension, violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::flow::mult::EdgeFlow;
    use crate::network::Dir;

    fn fwd(edge: usize) -> Traversal {
        Traversal { edge, dir: Dir::Fwd }
    }

    fn strict(pairs: &[(u64, u64)]) -> MultiplicativeFlow {
        MultiplicativeFlow::new(FlowKind::StrictInteger, pairs.iter().map(|&(a, b)| EdgeFlow::integers(a, b)).collect())
    }

    fn big(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn single_path() {
        let net = fixtures::b(2, 3);
        let ex = extract_protocol(&net, &strict(&[(2, 1), (2, 1)])).unwrap();
        assert_eq!(ex.protocol.steps, vec![TeleportStep { dimension: big(2), path: vec![fwd(0), fwd(1)] }]);
        assert!(ex.residual_is_zero());
        assert!(simulate_protocol(&net, &ex.protocol).is_valid());
    }

    #[test]
    fn scaled_parallel5() {
        let net = fixtures::parallel5().scale_by(5).unwrap();
        let ex = extract_protocol(&net, &strict(&[(5, 1), (5, 1), (25, 1)])).unwrap();
        assert_eq!(
            ex.protocol.steps,
            vec![
                TeleportStep { dimension: big(5), path: vec![fwd(0), fwd(2)] },
                TeleportStep { dimension: big(5), path: vec![fwd(1), fwd(2)] },
            ]
        );
        let report = simulate_protocol(&net, &ex.protocol);
        assert!(report.is_valid());
        assert_eq!(report.dimension, big(25));
        assert_eq!(report.usage, vec![big(5), big(5), big(25)]);
    }

    #[test]
    fn value_twelve_splits_into_primes() {
        let net = fixtures::b(12, 12);
        let ex = extract_protocol(&net, &strict(&[(12, 1), (12, 1)])).unwrap();
        let dims: Vec<BigUint> = ex.protocol.steps.iter().map(|s| s.dimension.clone()).collect();
        assert_eq!(dims, vec![big(2), big(2), big(3)]);
        assert!(ex.protocol.steps.iter().all(|s| s.path == vec![fwd(0), fwd(1)]));
    }

    #[test]
    fn internal_cycles_are_cancelled() {
        // a circulation of 3 around the a-b triangle rides on the s-a-t path
        let net = Network::new(
            &["s", "a", "b", "t"],
            "s",
            "t",
            &[("s", "a", 2), ("a", "t", 2), ("a", "b", 3), ("b", "a", 3)],
        )
        .unwrap();
        let f = strict(&[(2, 1), (2, 1), (3, 1), (3, 1)]);
        assert!(verify_flow(&net, &f).is_valid());
        let ex = extract_protocol(&net, &f).unwrap();
        assert_eq!(ex.cycles_cancelled, 1);
        assert_eq!(ex.protocol.steps.len(), 1);
        assert!(ex.residual_is_zero());
    }

    #[test]
    fn empty_protocol() {
        let net = fixtures::disconnected();
        let ex = extract_protocol(&net, &MultiplicativeFlow::ones(&net, FlowKind::StrictInteger)).unwrap();
        assert!(ex.protocol.steps.is_empty());
        let report = simulate_protocol(&net, &Protocol::empty());
        assert_eq!(report.usage, vec![big(1), big(1)]);
        assert_eq!(report.dimension, big(1));
        assert!(report.is_valid());
    }

    #[test]
    fn over_capacity_is_reported() {
        let net = fixtures::b(4, 8);
        let step = TeleportStep { dimension: big(2), path: vec![fwd(0), fwd(1)] };
        let prot = Protocol::from_steps(vec![step.clone(), step.clone(), step]);
        let report = simulate_protocol(&net, &prot);
        assert_eq!(
            report.violations,
            vec![ProtocolViolation::Capacity { edge: 0, usage: "8".into(), capacity: "4".into() }]
        );
    }

    #[test]
    fn structural_problems_are_reported() {
        let net = fixtures::diamond2();
        let prot = Protocol {
            steps: vec![
                TeleportStep { dimension: big(4), path: vec![fwd(0), fwd(2)] },
                TeleportStep { dimension: big(2), path: vec![fwd(0), fwd(3)] },
                TeleportStep { dimension: big(2), path: vec![fwd(9)] },
            ],
            claimed_dimension: big(2),
        };
        let v = simulate_protocol(&net, &prot).violations;
        assert!(v.contains(&ProtocolViolation::NotPrime { step: 0, dimension: "4".into() }));
        assert!(v.contains(&ProtocolViolation::Disconnected { step: 1, position: 1 }));
        assert!(v.contains(&ProtocolViolation::UnknownEdge { step: 2, edge: 9 }));
        assert!(v.iter().any(|x| matches!(x, ProtocolViolation::Dimension { .. })));
    }

    #[test]
    fn pipeline_on_fixtures() {
        for net in [fixtures::b(2, 3), fixtures::parallel5(), fixtures::diamond2(), fixtures::disconnected()] {
            let run = teleportation_pipeline(&net, None).unwrap();
            assert!(run.is_sound(), "{:?}", run.report.violations);
            assert!(is_strict(&run.network, &run.strict.flow));
        }
        let run = teleportation_pipeline(&fixtures::disconnected(), None).unwrap();
        assert!(run.extraction.protocol.steps.is_empty());
        assert_eq!(run.report.dimension, big(1));
    }

    #[test]
    fn json_shape() {
        let prot = Protocol::from_steps(vec![TeleportStep { dimension: big(5), path: vec![fwd(0), fwd(2)] }]);
        let json = serde_json::to_string(&prot.to_file()).unwrap();
        assert_eq!(json, r#"{"steps":[{"p":5,"path":[{"edge":0,"dir":"fwd"},{"edge":2,"dir":"fwd"}]}],"dimension":5}"#);
        let back: ProtocolFile = serde_json::from_str(&json).unwrap();
        assert_eq!(Protocol::from_file(&back).unwrap(), prot);
    }

    #[test]
    fn suboptimal_strict_flows_give_smaller_protocols() {
        let net = fixtures::parallel5();
        let ex = extract_protocol(&net, &strict(&[(2, 1), (2, 1), (4, 1)])).unwrap();
        assert_eq!(ex.protocol.claimed_dimension, big(4));
        assert!(simulate_protocol(&net, &ex.protocol).is_valid());
    }

    #[test]
    fn rejects_non_strict_input() {
        let net = Network::new(&["s", "v", "t"], "s", "t", &[("s", "v", 12), ("v", "t", 3)]).unwrap();
        let f = MultiplicativeFlow::new(FlowKind::Integer, vec![EdgeFlow::integers(6, 2), EdgeFlow::integers(3, 1)]);
        assert!(matches!(extract_protocol(&net, &f), Err(Error::Precondition(_))));
    }
}
