//! Additive max-flow / min-cut over [`GroupValue`] capacities.
//!
//! Augmenting paths are shortest-first (breadth-first search), exploring arcs in
//! insertion order, so results are deterministic and the number of augmentations
//! is bounded independently of the capacity values.

use std::collections::VecDeque;

use num_traits::One;

use crate::cut::Cut;
use crate::error::{Error, Result};
use crate::group::GroupValue;
use crate::network::{Dir, EdgeId, Network, Traversal, VertexId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arc {
    pub tail: VertexId,
    pub head: VertexId,
    pub capacity: GroupValue,
    /// The network edge this arc was derived from, if any.
    pub edge: Option<EdgeId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectedCapacityGraph {
    vertex_count: usize,
    source: VertexId,
    sink: VertexId,
    arcs: Vec<Arc>,
}

impl DirectedCapacityGraph {
    pub fn new(vertex_count: usize, source: VertexId, sink: VertexId) -> Self {
        assert!(source < vertex_count && sink < vertex_count && source != sink);
        DirectedCapacityGraph { vertex_count, source, sink, arcs: Vec::new() }
    }

    pub fn add_arc(&mut self, tail: VertexId, head: VertexId, capacity: GroupValue) -> usize {
        self.push(Arc { tail, head, capacity, edge: None })
    }

    fn push(&mut self, arc: Arc) -> usize {
        assert!(arc.tail < self.vertex_count && arc.head < self.vertex_count);
        assert!(arc.capacity.is_nonnegative(), "negative arc capacity");
        self.arcs.push(arc);
        self.arcs.len() - 1
    }

    /// The digraph on which a network's cuts become additive: arcs out of the
    /// source only, arcs into the sink only, both directions for every other
    /// edge. Arcs are created in edge-id order, `u→v` before `v→u`.
    pub fn reduction(net: &Network, capacity: impl Fn(EdgeId) -> GroupValue) -> Self {
        let (s, t) = (net.source(), net.sink());
        let mut g = DirectedCapacityGraph::new(net.vertex_count(), s, t);
        for e in net.edges() {
            let c = capacity(e.id);
            for (tail, head) in [(e.u, e.v), (e.v, e.u)] {
                if head == s || tail == t {
                    continue;
                }
                g.push(Arc { tail, head, capacity: c.clone(), edge: Some(e.id) });
            }
        }
        g
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn sink(&self) -> VertexId {
        self.sink
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// Capacity of the arcs leaving `source_side`.
    pub fn cut_capacity(&self, source_side: &[bool]) -> GroupValue {
        self.arcs
            .iter()
            .filter(|a| source_side[a.tail] && !source_side[a.head])
            .map(|a| a.capacity.clone())
            .sum()
    }

    /// Residual adjacency: for each vertex, `(arc, forward?)` in arc order.
    fn residual_adjacency(&self) -> Vec<Vec<(usize, bool)>> {
        let mut adj = vec![Vec::new(); self.vertex_count];
        for (i, a) in self.arcs.iter().enumerate() {
            adj[a.tail].push((i, true));
            adj[a.head].push((i, false));
        }
        adj
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassicalFlow {
    pub arc_flow: Vec<GroupValue>,
    pub value: GroupValue,
}

impl ClassicalFlow {
    /// Checks capacity bounds and conservation at every vertex but source and sink.
    pub fn is_feasible(&self, g: &DirectedCapacityGraph) -> bool {
        if self.arc_flow.len() != g.arcs.len() {
            return false;
        }
        let mut balance = vec![GroupValue::zero(); g.vertex_count];
        for (a, f) in g.arcs.iter().zip(&self.arc_flow) {
            if !f.is_nonnegative() || *f > a.capacity {
                return false;
            }
            balance[a.head] = &balance[a.head] + f;
            balance[a.tail] = &balance[a.tail] - f;
        }
        (0..g.vertex_count).filter(|&v| v != g.source && v != g.sink).all(|v| balance[v].is_zero())
            && balance[g.sink] == self.value
    }
}

/// Arc-level cut of a [`DirectedCapacityGraph`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArcCut {
    pub source_side: Vec<bool>,
    pub arcs: Vec<usize>,
    pub capacity: GroupValue,
}

struct Solver<'a> {
    g: &'a DirectedCapacityGraph,
    flow: Vec<GroupValue>,
    adj: Vec<Vec<(usize, bool)>>,
}

impl<'a> Solver<'a> {
    fn new(g: &'a DirectedCapacityGraph) -> Self {
        Solver { g, flow: vec![GroupValue::zero(); g.arcs.len()], adj: g.residual_adjacency() }
    }

    fn residual(&self, arc: usize, forward: bool) -> GroupValue {
        if forward {
            &self.g.arcs[arc].capacity - &self.flow[arc]
        } else {
            self.flow[arc].clone()
        }
    }

    /// Breadth-first search in the residual graph; returns parent links.
    fn bfs(&self) -> Vec<Option<(usize, bool)>> {
        let mut parent = vec![None; self.g.vertex_count];
        let mut seen = vec![false; self.g.vertex_count];
        seen[self.g.source] = true;
        let mut queue = VecDeque::from([self.g.source]);
        while let Some(x) = queue.pop_front() {
            for &(arc, forward) in &self.adj[x] {
                let a = &self.g.arcs[arc];
                let y = if forward { a.head } else { a.tail };
                if seen[y] || !self.residual(arc, forward).is_positive() {
                    continue;
                }
                seen[y] = true;
                parent[y] = Some((arc, forward));
                if y == self.g.sink {
                    return parent;
                }
                queue.push_back(y);
            }
        }
        parent
    }

    fn run(&mut self) {
        loop {
            let parent = self.bfs();
            if parent[self.g.sink].is_none() {
                return;
            }
            let mut path = Vec::new();
            let mut v = self.g.sink;
            while v != self.g.source {
                let (arc, forward) = parent[v].expect("path reaches source");
                path.push((arc, forward));
                let a = &self.g.arcs[arc];
                v = if forward { a.tail } else { a.head };
            }
            let bottleneck = path
                .iter()
                .map(|&(arc, fwd)| self.residual(arc, fwd))
                .reduce(GroupValue::min)
                .expect("nonempty path");
            for (arc, forward) in path {
                self.flow[arc] = if forward {
                    &self.flow[arc] + &bottleneck
                } else {
                    &self.flow[arc] - &bottleneck
                };
            }
        }
    }

    fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.g.vertex_count];
        seen[self.g.source] = true;
        let mut stack = vec![self.g.source];
        while let Some(x) = stack.pop() {
            for &(arc, forward) in &self.adj[x] {
                let a = &self.g.arcs[arc];
                let y = if forward { a.head } else { a.tail };
                if !seen[y] && self.residual(arc, forward).is_positive() {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen
    }

    fn finish(self) -> (ClassicalFlow, ArcCut) {
        let side = self.reachable();
        let g = self.g;
        let value: GroupValue = g
            .arcs
            .iter()
            .zip(&self.flow)
            .map(|(a, f)| {
                if a.head == g.sink {
                    f.clone()
                } else if a.tail == g.sink {
                    -f
                } else {
                    GroupValue::zero()
                }
            })
            .sum();
        let arcs: Vec<usize> =
            (0..g.arcs.len()).filter(|&i| side[g.arcs[i].tail] && !side[g.arcs[i].head]).collect();
        let capacity = arcs.iter().map(|&i| g.arcs[i].capacity.clone()).sum();
        (ClassicalFlow { arc_flow: self.flow, value }, ArcCut { source_side: side, arcs, capacity })
    }
}

/// Maximum flow together with the residual-reachability minimum cut.
pub fn max_flow_min_cut(g: &DirectedCapacityGraph) -> (ClassicalFlow, ArcCut) {
    let mut solver = Solver::new(g);
    solver.run();
    solver.finish()
}

pub fn max_flow(g: &DirectedCapacityGraph) -> ClassicalFlow {
    max_flow_min_cut(g).0
}

pub fn min_cut(g: &DirectedCapacityGraph) -> ArcCut {
    max_flow_min_cut(g).1
}

/// Max flow for pure integer capacities; every per-arc flow is an integer count.
pub fn integral_max_flow(g: &DirectedCapacityGraph) -> Result<ClassicalFlow> {
    if let Some(i) = g.arcs.iter().position(|a| !a.capacity.weight().is_one()) {
        return Err(Error::Precondition(format!("arc {i} has a non-integer capacity {}", g.arcs[i].capacity)));
    }
    let flow = max_flow(g);
    debug_assert!(flow.arc_flow.iter().all(|f| f.weight().is_one()));
    Ok(flow)
}

/// Edge-disjoint `s → t` paths, as many as the minimum number of edges in a cut.
///
/// Paths are read off an integral unit-capacity flow on the reduction digraph
/// after cancelling opposite unit flows on the same edge; closed loops met
/// while walking are discarded.
pub fn edge_disjoint_paths(net: &Network) -> Vec<Vec<Traversal>> {
    let g = DirectedCapacityGraph::reduction(net, |_| GroupValue::count_only(1));
    let flow = integral_max_flow(&g).expect("unit capacities are integral");
    let mut used: Vec<bool> = flow.arc_flow.iter().map(|f| f.count() == 0).collect();

    // both directions of one edge carrying a unit cancel out
    for i in 0..g.arcs.len() {
        for j in i + 1..g.arcs.len() {
            if !used[i] && !used[j] && g.arcs[i].edge == g.arcs[j].edge && g.arcs[i].tail == g.arcs[j].head {
                used[i] = true;
                used[j] = true;
            }
        }
    }

    let mut out_arcs = vec![Vec::new(); g.vertex_count()];
    for (i, a) in g.arcs.iter().enumerate() {
        out_arcs[a.tail].push(i);
    }
    let traversal = |arc: usize| {
        let a = &g.arcs[arc];
        let e = a.edge.expect("reduction arcs carry edges");
        let dir = if net.edge(e).u == a.tail { Dir::Fwd } else { Dir::Bwd };
        Traversal { edge: e, dir }
    };

    let mut paths = Vec::new();
    while let Some(&first) = out_arcs[net.source()].iter().find(|&&i| !used[i]) {
        used[first] = true;
        let mut arcs = vec![first];
        let mut position = vec![None; g.vertex_count()];
        position[net.source()] = Some(0);
        let mut at = g.arcs[first].head;
        while at != net.sink() {
            if let Some(p) = position[at] {
                // loop back to an earlier vertex: drop it
                for a in arcs.drain(p..) {
                    position[g.arcs[a].head] = None;
                }
                position[at] = Some(p);
            } else {
                position[at] = Some(arcs.len());
            }
            let next = *out_arcs[at]
                .iter()
                .find(|&&i| !used[i])
                .expect("unit flow is conserved at internal vertices");
            used[next] = true;
            arcs.push(next);
            at = g.arcs[next].head;
        }
        paths.push(arcs.into_iter().map(traversal).collect());
    }
    paths
}

/// A cut minimizing `(number of edges, capacity product)` lexicographically.
pub fn lex_min_cut(net: &Network) -> Cut {
    let g = DirectedCapacityGraph::reduction(net, |e| {
        &GroupValue::count_only(1) + &GroupValue::log_of(&net.edge(e).capacity)
    });
    let (_, cut) = max_flow_min_cut(&g);
    Cut::from_partition(net, cut.source_side).expect("residual cut separates source and sink")
}
