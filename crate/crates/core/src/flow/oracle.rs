//! Exhaustive-search ground truth for small networks.

use std::collections::VecDeque;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::cut::{enumerate_cuts, Cut};
use crate::error::{Error, Result};
use crate::flow::mult::{EdgeFlow, FlowKind, FlowValue, MultiplicativeFlow};
use crate::network::Network;

/// Default bound on the number of leaves of the integer-flow search tree.
pub const DEFAULT_ORACLE_CAP: u64 = 20_000_000;

/// `QMFMC_ORACLE_CAP` if set and valid, otherwise [`DEFAULT_ORACLE_CAP`].
pub fn oracle_cap_from_env() -> u64 {
    std::env::var("QMFMC_ORACLE_CAP").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(DEFAULT_ORACLE_CAP)
}

/// Minimum of `D_C` over every explicit cut.
pub fn brute_force_qmc(net: &Network) -> Result<BigUint> {
    Ok(brute_force_min_cuts(net)?.0)
}

/// The quantum min-cut together with every cut attaining it.
pub fn brute_force_min_cuts(net: &Network) -> Result<(BigUint, Vec<Cut>)> {
    let mut best: Option<BigUint> = None;
    let mut cuts = Vec::new();
    for cut in enumerate_cuts(net)? {
        match &best {
            Some(b) if cut.capacity_product() > b => {}
            Some(b) if cut.capacity_product() == b => cuts.push(cut),
            _ => {
                best = Some(cut.capacity_product().clone());
                cuts = vec![cut];
            }
        }
    }
    Ok((best.expect("at least one cut exists"), cuts))
}

/// Maximum value over all integer flows (strict ones if `strict`).
pub fn brute_force_qmf(net: &Network, strict: bool, cap: u64) -> Result<FlowValue> {
    Ok(brute_force_max_flow(net, strict, cap)?.0)
}

/// Maximum value over all integer flows, with a maximizing flow.
///
/// Every edge ranges over the pairs `(a, b)` with `a·b ≤ d_e`; conservation is
/// checked as soon as all edges at a vertex are fixed. The first edge's choices
/// are split across worker threads; ties go to the lowest choice index.
pub fn brute_force_max_flow(net: &Network, strict: bool, cap: u64) -> Result<(FlowValue, MultiplicativeFlow)> {
    let search = Search::new(net, strict, cap)?;
    let kind = if strict { FlowKind::StrictInteger } else { FlowKind::Integer };
    if search.order.is_empty() {
        return Ok((FlowValue::from_integer(&BigUint::from(1u32)), MultiplicativeFlow::ones(net, kind)));
    }
    let first = search.order[0];
    let best = search.options[first]
        .par_iter()
        .enumerate()
        .filter_map(|(i, &choice)| {
            let mut state = State::new(net.vertex_count(), search.order.len());
            state.place(&search, 0, choice);
            let mut best = None;
            if search.closes_ok(0, &state) {
                search.dfs(1, &mut state, &mut best);
            }
            state.unplace(&search, 0, choice);
            best.map(|b: Best| (i, b))
        })
        .reduce_with(|a, b| if b.1.beats(&a.1) || (!a.1.beats(&b.1) && b.0 < a.0) { b } else { a });
    let (_, best) = best.ok_or_else(|| Error::Internal("the all-ones flow is always feasible".into()))?;
    let mut edges = vec![EdgeFlow::ones(); net.edges().len()];
    for (slot, &(a, b)) in best.assignment.iter().enumerate() {
        edges[search.order[slot]] = EdgeFlow::integers(a, b);
    }
    let value = FlowValue(BigRational::new(best.num.into(), best.den.into()));
    Ok((value, MultiplicativeFlow::new(kind, edges)))
}

struct Search<'a> {
    net: &'a Network,
    /// Edge ids in placement order.
    order: Vec<usize>,
    /// Per edge id, allowed `(fwd, bwd)` pairs.
    options: Vec<Vec<(u64, u64)>>,
    /// Internal vertices whose last incident edge sits at each slot.
    closes: Vec<Vec<usize>>,
}

impl<'a> Search<'a> {
    fn new(net: &'a Network, strict: bool, cap: u64) -> Result<Self> {
        let (s, t) = (net.source(), net.sink());
        let mut options = Vec::with_capacity(net.edges().len());
        let mut size: u128 = 1;
        for e in net.edges() {
            let d = e.capacity.to_u64().filter(|&d| d <= cap).ok_or_else(|| Error::SearchTooLarge {
                size: format!(">= {}", e.capacity),
                cap,
            })?;
            // directions forced to 1 by strictness
            let fwd_fixed = strict && (e.v == s || e.u == t);
            let bwd_fixed = strict && (e.u == s || e.v == t);
            let mut opts = Vec::new();
            for a in 1..=d {
                if fwd_fixed && a > 1 {
                    break;
                }
                for b in 1..=d / a {
                    if bwd_fixed && b > 1 {
                        break;
                    }
                    opts.push((a, b));
                }
            }
            size = size.saturating_mul(opts.len() as u128);
            if size > u128::from(cap) {
                return Err(Error::SearchTooLarge { size: format!("> {cap}"), cap });
            }
            options.push(opts);
        }

        // breadth-first vertex order so vertices close early
        let mut pos = vec![usize::MAX; net.vertex_count()];
        let mut queue = VecDeque::from([s]);
        pos[s] = 0;
        let mut next = 1;
        while let Some(x) = queue.pop_front() {
            for &e in net.incident(x) {
                let y = net.edge(e).other(x);
                if pos[y] == usize::MAX {
                    pos[y] = next;
                    next += 1;
                    queue.push_back(y);
                }
            }
        }
        for p in pos.iter_mut().filter(|p| **p == usize::MAX) {
            *p = next;
            next += 1;
        }
        let mut order: Vec<usize> = (0..net.edges().len()).collect();
        order.sort_by_key(|&id| {
            let e = net.edge(id);
            (pos[e.u].max(pos[e.v]), pos[e.u].min(pos[e.v]), id)
        });
        let mut last = vec![None; net.vertex_count()];
        for (slot, &id) in order.iter().enumerate() {
            let e = net.edge(id);
            last[e.u] = Some(slot);
            last[e.v] = Some(slot);
        }
        let mut closes = vec![Vec::new(); order.len()];
        for v in net.internal_vertices() {
            if let Some(slot) = last[v] {
                closes[slot].push(v);
            }
        }
        Ok(Search { net, order, options, closes })
    }

    fn closes_ok(&self, slot: usize, state: &State) -> bool {
        self.closes[slot].iter().all(|&v| state.inflow[v] == state.outflow[v])
    }

    fn dfs(&self, slot: usize, state: &mut State, best: &mut Option<Best>) {
        if slot == self.order.len() {
            let s = self.net.source();
            let candidate = Best { num: state.outflow[s], den: state.inflow[s], assignment: state.assignment.clone() };
            if best.as_ref().is_none_or(|b| candidate.beats(b)) {
                *best = Some(candidate);
            }
            return;
        }
        let id = self.order[slot];
        for &choice in &self.options[id] {
            state.place(self, slot, choice);
            if self.closes_ok(slot, state) {
                self.dfs(slot + 1, state, best);
            }
            state.unplace(self, slot, choice);
        }
    }
}

struct State {
    inflow: Vec<u128>,
    outflow: Vec<u128>,
    assignment: Vec<(u64, u64)>,
}

impl State {
    fn new(vertices: usize, edges: usize) -> Self {
        State { inflow: vec![1; vertices], outflow: vec![1; vertices], assignment: vec![(1, 1); edges] }
    }

    fn place(&mut self, search: &Search, slot: usize, (a, b): (u64, u64)) {
        let e = search.net.edge(search.order[slot]);
        self.outflow[e.u] *= u128::from(a);
        self.inflow[e.v] *= u128::from(a);
        self.outflow[e.v] *= u128::from(b);
        self.inflow[e.u] *= u128::from(b);
        self.assignment[slot] = (a, b);
    }

    fn unplace(&mut self, search: &Search, slot: usize, (a, b): (u64, u64)) {
        let e = search.net.edge(search.order[slot]);
        self.outflow[e.u] /= u128::from(a);
        self.inflow[e.v] /= u128::from(a);
        self.outflow[e.v] /= u128::from(b);
        self.inflow[e.u] /= u128::from(b);
    }
}

struct Best {
    num: u128,
    den: u128,
    assignment: Vec<(u64, u64)>,
}

impl Best {
    fn beats(&self, other: &Best) -> bool {
        self.num * other.den > other.num * self.den
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::flow::mult::{flow_value, verify_flow};

    #[test]
    fn qmc_oracle() {
        assert_eq!(brute_force_qmc(&fixtures::parallel5()).unwrap(), BigUint::from(5u32));
        assert_eq!(brute_force_qmc(&fixtures::b(2, 3)).unwrap(), BigUint::from(2u32));
        assert_eq!(brute_force_qmc(&fixtures::parallel5().scale_by(5).unwrap()).unwrap(), BigUint::from(25u32));
        assert_eq!(brute_force_qmc(&fixtures::disconnected()).unwrap(), BigUint::from(1u32));
        let (qmc, cuts) = brute_force_min_cuts(&fixtures::diamond2()).unwrap();
        assert_eq!(qmc, BigUint::from(4u32));
        assert_eq!(cuts.len(), 4);
    }

    #[test]
    fn qmf_oracle() {
        let cap = DEFAULT_ORACLE_CAP;
        let (v, f) = brute_force_max_flow(&fixtures::parallel5(), true, cap).unwrap();
        assert_eq!(v.to_string(), "4");
        assert!(verify_flow(&fixtures::parallel5(), &f).is_valid());
        assert_eq!(flow_value(&fixtures::parallel5(), &f).unwrap(), v);

        let scaled = fixtures::parallel5().scale_by(5).unwrap();
        assert_eq!(brute_force_qmf(&scaled, true, cap).unwrap().to_string(), "25");
        assert_eq!(brute_force_qmf(&fixtures::b(2, 3), true, cap).unwrap().to_string(), "2");
        assert_eq!(brute_force_qmf(&fixtures::b(2, 3), false, cap).unwrap().to_string(), "2");
        assert_eq!(brute_force_qmf(&fixtures::diamond2(), true, cap).unwrap().to_string(), "4");
        assert_eq!(brute_force_qmf(&fixtures::disconnected(), true, cap).unwrap().to_string(), "1");
    }

    #[test]
    fn non_strict_can_reach_further() {
        // a unit flowing back into s lets the parallel edges combine to 5·… ratios
        let net = fixtures::parallel5();
        let v = brute_force_qmf(&net, false, DEFAULT_ORACLE_CAP).unwrap();
        assert!(v >= brute_force_qmf(&net, true, DEFAULT_ORACLE_CAP).unwrap());
        assert!(v <= FlowValue::from_integer(&BigUint::from(5u32)));
    }

    #[test]
    fn cap_is_enforced() {
        let err = brute_force_qmf(&fixtures::parallel5().scale_by(100).unwrap(), false, 1000).unwrap_err();
        assert!(matches!(err, Error::SearchTooLarge { cap: 1000, .. }));
    }
}
