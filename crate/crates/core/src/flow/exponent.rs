//! Per-prime exponent flows and strictification.
//!
//! For an integer flow and a prime `p`, the exponents of `p` in the direction
//! values form an ordinary additive flow: product conservation at a vertex is
//! exactly exponent conservation for every prime at once.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::factor::factorize;
use crate::flow::construct::quantum_min_cut;
use crate::flow::mult::{flow_value, is_strict, verify_flow, EdgeFlow, FlowKind, MultiplicativeFlow};
use crate::network::{Dir, Network, Traversal, VertexId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentFlow {
    pub prime: BigUint,
    pub fwd: Vec<u32>,
    pub bwd: Vec<u32>,
}

impl ExponentFlow {
    fn zero(prime: BigUint, edges: usize) -> Self {
        ExponentFlow { prime, fwd: vec![0; edges], bwd: vec![0; edges] }
    }

    pub fn get(&self, t: Traversal) -> u32 {
        match t.dir {
            Dir::Fwd => self.fwd[t.edge],
            Dir::Bwd => self.bwd[t.edge],
        }
    }

    pub fn get_mut(&mut self, t: Traversal) -> &mut u32 {
        match t.dir {
            Dir::Fwd => &mut self.fwd[t.edge],
            Dir::Bwd => &mut self.bwd[t.edge],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.fwd.iter().chain(&self.bwd).all(|&a| a == 0)
    }

    /// `(Σ in, Σ out)` at `v`.
    pub fn balance(&self, net: &Network, v: VertexId) -> (u64, u64) {
        let (mut inflow, mut outflow) = (0u64, 0u64);
        for &e in net.incident(v) {
            let out = Traversal::leaving(net, e, v);
            outflow += u64::from(self.get(out));
            inflow += u64::from(self.get(out.reverse()));
        }
        (inflow, outflow)
    }

    /// Internal vertices where inflow and outflow differ.
    pub fn conservation_violations(&self, net: &Network) -> Vec<VertexId> {
        net.internal_vertices()
            .filter(|&v| {
                let (i, o) = self.balance(net, v);
                i != o
            })
            .collect()
    }

    /// Traversals at `v` with positive exponent, leaving `v` if `outgoing`,
    /// entering it otherwise, in edge-id order.
    fn positive_at(&self, net: &Network, v: VertexId, outgoing: bool) -> Option<Traversal> {
        net.incident(v).iter().find_map(|&e| {
            let out = Traversal::leaving(net, e, v);
            let t = if outgoing { out } else { out.reverse() };
            (self.get(t) > 0).then_some(t)
        })
    }
}

/// Splits an integer flow into one exponent flow per prime, ascending.
pub fn exponent_flows(f: &MultiplicativeFlow) -> Result<BTreeMap<BigUint, ExponentFlow>> {
    let m = f.edges().len();
    let mut out: BTreeMap<BigUint, ExponentFlow> = BTreeMap::new();
    for (id, ef) in f.edges().iter().enumerate() {
        for dir in [Dir::Fwd, Dir::Bwd] {
            let x = ef.get(dir);
            if !x.is_integer() {
                return Err(Error::Precondition(format!("edge {id} carries non-integer value {x}")));
            }
            let x = x.numer().to_biguint().ok_or_else(|| Error::Precondition(format!("edge {id} is not positive")))?;
            for (p, a) in factorize(&x)?.iter() {
                let flow = out.entry(p.clone()).or_insert_with(|| ExponentFlow::zero(p.clone(), m));
                *flow.get_mut(Traversal { edge: id, dir }) = a;
            }
        }
    }
    Ok(out)
}

/// Rebuilds direction values `Π p^α` from exponent flows.
pub fn assemble(net: &Network, flows: &BTreeMap<BigUint, ExponentFlow>, kind: FlowKind) -> MultiplicativeFlow {
    let mut edges = vec![EdgeFlow::ones(); net.edges().len()];
    for flow in flows.values() {
        let p = BigInt::from(flow.prime.clone());
        for (id, ef) in edges.iter_mut().enumerate() {
            ef.fwd *= BigRational::from_integer(p.pow(flow.fwd[id]));
            ef.bwd *= BigRational::from_integer(p.pow(flow.bwd[id]));
        }
    }
    MultiplicativeFlow::new(kind, edges)
}

#[derive(Clone, Debug)]
pub struct Strictified {
    pub flow: MultiplicativeFlow,
    /// Unit-exponent cycles removed, over all primes.
    pub cycles_cancelled: usize,
    pub was_strict: bool,
}

/// Turns an integer flow of value QMC into a strict one of the same value.
///
/// For each prime in ascending order, while some unit of that prime enters the
/// source (or leaves the sink), follow positive-exponent arcs backwards from
/// it (forwards, at the sink) until a vertex repeats and lower the exponents
/// around the resulting cycle by one. With the flow at QMC the walk can never
/// cross a minimum cut, so it closes before reaching the other terminal and
/// the value is unchanged.
pub fn strictify(net: &Network, f: &MultiplicativeFlow) -> Result<Strictified> {
    if !f.kind().is_integer() {
        return Err(Error::Precondition("strictify needs an integer flow".into()));
    }
    let report = verify_flow(net, &f.clone().with_kind(FlowKind::Integer));
    if !report.is_valid() {
        return Err(Error::Precondition(format!("flow is invalid: {}", report.violations[0])));
    }
    let qmc = quantum_min_cut(net).value;
    let value = flow_value(net, f)?;
    if !value.equals_integer(&qmc) {
        return Err(Error::Precondition(format!("flow value {value} differs from the quantum min-cut {qmc}")));
    }
    if is_strict(net, f) {
        return Ok(Strictified { flow: f.clone().with_kind(FlowKind::StrictInteger), cycles_cancelled: 0, was_strict: true });
    }

    let mut flows = exponent_flows(f)?;
    let mut cycles_cancelled = 0;
    for flow in flows.values_mut() {
        loop {
            // backwards from a unit entering s, or forwards from one leaving t
            let (terminal, backwards) = if flow.positive_at(net, net.source(), false).is_some() {
                (net.source(), true)
            } else if flow.positive_at(net, net.sink(), true).is_some() {
                (net.sink(), false)
            } else {
                break;
            };
            let cycle = trace_cycle(net, flow, terminal, backwards)?;
            for t in cycle {
                *flow.get_mut(t) -= 1;
            }
            cycles_cancelled += 1;
        }
    }
    let out = assemble(net, &flows, FlowKind::StrictInteger);
    let report = verify_flow(net, &out);
    if !report.is_valid() || !flow_value(net, &out)?.equals_integer(&qmc) {
        return Err(Error::Internal("strictification broke the flow".into()));
    }
    Ok(Strictified { flow: out, cycles_cancelled, was_strict: false })
}

/// Walks positive-exponent arcs from `start` (against their direction when
/// `backwards`) until a vertex repeats; returns the arcs of the closed cycle.
fn trace_cycle(net: &Network, flow: &ExponentFlow, start: VertexId, backwards: bool) -> Result<Vec<Traversal>> {
    let mut position: Vec<Option<usize>> = vec![None; net.vertex_count()];
    let mut arcs: Vec<Traversal> = Vec::new();
    let mut at = start;
    loop {
        position[at] = Some(arcs.len());
        let other = if start == net.source() { net.sink() } else { net.source() };
        if at == other {
            return Err(Error::Precondition(format!(
                "exponent walk for prime {} reached {} without closing a cycle",
                flow.prime,
                net.name(other)
            )));
        }
        let t = flow
            .positive_at(net, at, !backwards)
            .ok_or_else(|| Error::Internal(format!("exponent flow of {} is not conserved at {}", flow.prime, net.name(at))))?;
        arcs.push(t);
        let next = if backwards { t.tail(net) } else { t.head(net) };
        if let Some(p) = position[next] {
            return Ok(arcs.split_off(p));
        }
        at = next;
    }
}

pub fn is_all_ones(f: &MultiplicativeFlow) -> bool {
    f.edges().iter().all(|ef| ef.fwd.is_one() && ef.bwd.is_one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::flow::construct::integer_flow;

    fn ints(pairs: &[(u64, u64)]) -> Vec<EdgeFlow> {
        pairs.iter().map(|&(a, b)| EdgeFlow::integers(a, b)).collect()
    }

    #[test]
    fn all_ones_has_no_primes() {
        let net = fixtures::diamond2();
        assert!(exponent_flows(&MultiplicativeFlow::ones(&net, FlowKind::Integer)).unwrap().is_empty());
    }

    #[test]
    fn single_path_twelve() {
        let net = fixtures::b(12, 12);
        let f = MultiplicativeFlow::new(FlowKind::StrictInteger, ints(&[(12, 1), (12, 1)]));
        let flows = exponent_flows(&f).unwrap();
        let two = &flows[&BigUint::from(2u32)];
        let three = &flows[&BigUint::from(3u32)];
        assert_eq!((two.fwd.clone(), two.bwd.clone()), (vec![2, 2], vec![0, 0]));
        assert_eq!(three.fwd, vec![1, 1]);
        assert!(two.conservation_violations(&net).is_empty());
        assert_eq!(assemble(&net, &flows, FlowKind::StrictInteger), f);
    }

    #[test]
    fn rejects_rational_values() {
        let f = MultiplicativeFlow::new(
            FlowKind::RationalSingleDirection,
            vec![EdgeFlow { fwd: BigRational::new(5.into(), 3.into()), bwd: BigRational::one() }],
        );
        assert!(exponent_flows(&f).is_err());
    }

    #[test]
    fn parallel5_integer_flow_exponents_conserve() {
        let net = fixtures::parallel5();
        let out = integer_flow(&net, &BigUint::from(1u32)).unwrap();
        let flows = exponent_flows(&out.flow).unwrap();
        let five = &flows[&BigUint::from(5u32)];
        assert!(five.conservation_violations(&out.network).is_empty());
        for flow in flows.values() {
            assert!(flow.conservation_violations(&out.network).is_empty());
        }
    }

    #[test]
    fn strict_input_is_returned_unchanged() {
        let net = fixtures::parallel5().scale_by(5).unwrap();
        let f = MultiplicativeFlow::new(FlowKind::Integer, ints(&[(5, 1), (5, 1), (25, 1)]));
        let out = strictify(&net, &f).unwrap();
        assert!(out.was_strict);
        assert_eq!(out.flow, f.with_kind(FlowKind::StrictInteger));
    }

    #[test]
    fn cycle_through_source_is_removed() {
        let net = fixtures::parallel5().scale_by(5).unwrap();
        // strict optimum (5, 5, 25) with an extra unit of 2 circulating s→v→s
        let f = MultiplicativeFlow::new(FlowKind::Integer, ints(&[(10, 1), (5, 2), (25, 1)]));
        assert!(verify_flow(&net, &f).is_valid());
        let out = strictify(&net, &f).unwrap();
        assert!(!out.was_strict);
        assert_eq!(out.cycles_cancelled, 1);
        assert_eq!(out.flow, MultiplicativeFlow::new(FlowKind::StrictInteger, ints(&[(5, 1), (5, 1), (25, 1)])));
    }

    #[test]
    fn cycle_through_sink_is_removed() {
        // t has two parallel edges to v; a unit of 3 leaves t and comes back
        let net = Network::new(&["s", "v", "t"], "s", "t", &[("s", "v", 4), ("v", "t", 12), ("v", "t", 3)]).unwrap();
        let f = MultiplicativeFlow::new(FlowKind::Integer, ints(&[(4, 1), (4, 3), (3, 1)]));
        assert!(verify_flow(&net, &f).is_valid());
        let out = strictify(&net, &f).unwrap();
        assert!(verify_flow(&net, &out.flow).is_valid());
        assert!(is_strict(&net, &out.flow));
        assert_eq!(flow_value(&net, &out.flow).unwrap().to_string(), "4");
    }

    #[test]
    fn suboptimal_flow_is_rejected() {
        let net = fixtures::parallel5();
        let f = MultiplicativeFlow::new(FlowKind::Integer, ints(&[(2, 1), (2, 1), (4, 1)]));
        assert!(matches!(strictify(&net, &f), Err(Error::Precondition(_))));
    }
}
