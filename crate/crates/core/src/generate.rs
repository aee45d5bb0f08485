//! Random instances for property tests and benchmarks.

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::cut::Cut;
use crate::flow::mult::{verify_flow, FlowKind, MultiplicativeFlow};
use crate::network::{Network, Traversal, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NetworkShape {
    pub max_vertices: usize,
    pub max_edges: usize,
    pub min_capacity: u64,
    pub max_capacity: u64,
}

impl NetworkShape {
    pub const fn new(max_vertices: usize, max_edges: usize, max_capacity: u64) -> Self {
        NetworkShape { max_vertices, max_edges, min_capacity: 2, max_capacity }
    }
}

/// A random connected multigraph: a random spanning tree plus extra edges,
/// parallel edges allowed. Vertices are `s, v1, …, t`.
pub fn random_network<R: Rng + ?Sized>(rng: &mut R, shape: &NetworkShape) -> Network {
    assert!(shape.max_vertices >= 2 && shape.max_edges + 1 >= shape.max_vertices);
    assert!(1 <= shape.min_capacity && shape.min_capacity <= shape.max_capacity);
    let n = rng.gen_range(2..=shape.max_vertices);
    let mut names = vec!["s".to_owned()];
    names.extend((1..n - 1).map(|i| format!("v{i}")));
    names.push("t".to_owned());

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut pairs = Vec::new();
    for i in 1..n {
        let j = rng.gen_range(0..i);
        pairs.push((order[j], order[i]));
    }
    let m = rng.gen_range(n - 1..=shape.max_edges);
    while pairs.len() < m {
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n - 1);
        pairs.push((u, if v >= u { v + 1 } else { v }));
    }
    pairs.shuffle(rng);
    let edges: Vec<(&str, &str, u64)> = pairs
        .iter()
        .map(|&(u, v)| (names[u].as_str(), names[v].as_str(), rng.gen_range(shape.min_capacity..=shape.max_capacity)))
        .collect();
    Network::new(&names, "s", "t", &edges).expect("generated networks are valid")
}

/// A random valid integer flow.
///
/// Starting from all ones, repeatedly picks a random simple route — source to
/// sink, sink to source, or a closed cycle — and multiplies the flow along it
/// by a small factor when every edge on it still has room. Each such step
/// preserves conservation at every internal vertex.
pub fn random_flow<R: Rng + ?Sized>(rng: &mut R, net: &Network, rounds: usize) -> MultiplicativeFlow {
    let mut f = MultiplicativeFlow::ones(net, FlowKind::Integer);
    let (s, t) = (net.source(), net.sink());
    for _ in 0..rounds {
        let route = match rng.gen_range(0..3) {
            0 => random_route(rng, net, s, t),
            1 => random_route(rng, net, t, s),
            _ => {
                let v = rng.gen_range(0..net.vertex_count());
                random_route(rng, net, v, v)
            }
        };
        let Some(route) = route else { continue };
        let c = BigInt::from(rng.gen_range(2u32..=3));
        let fits = route.iter().all(|&w| {
            let e = f.edge(w.edge);
            let product = e.fwd.clone() * &e.bwd * BigRational::from_integer(c.clone());
            product <= BigRational::from_integer(BigInt::from(net.edge(w.edge).capacity.clone()))
        });
        if fits {
            for &w in &route {
                *f.get_mut(w) *= BigRational::from_integer(c.clone());
            }
        }
    }
    debug_assert!(verify_flow(net, &f).is_valid());
    f
}

/// Random simple path `from → to` by randomized depth-first search; for
/// `from == to` a cycle of at least two distinct edges. Uses each edge at most once.
fn random_route<R: Rng + ?Sized>(rng: &mut R, net: &Network, from: VertexId, to: VertexId) -> Option<Vec<Traversal>> {
    let mut visited = vec![false; net.vertex_count()];
    let mut path = Vec::new();
    visited[from] = from != to;
    if walk(rng, net, from, to, &mut visited, &mut path) {
        Some(path)
    } else {
        None
    }
}

fn walk<R: Rng + ?Sized>(
    rng: &mut R,
    net: &Network,
    at: VertexId,
    to: VertexId,
    visited: &mut [bool],
    path: &mut Vec<Traversal>,
) -> bool {
    if at == to && !path.is_empty() {
        return true;
    }
    let mut next: Vec<usize> = net.incident(at).to_vec();
    next.shuffle(rng);
    for e in next {
        if path.iter().any(|w: &Traversal| w.edge == e) {
            continue;
        }
        let w = Traversal::leaving(net, e, at);
        let h = w.head(net);
        if visited[h] {
            continue;
        }
        visited[h] = true;
        path.push(w);
        if walk(rng, net, h, to, visited, path) {
            return true;
        }
        path.pop();
        visited[h] = false;
    }
    false
}

/// A uniformly random source/sink partition.
pub fn random_cut<R: Rng + ?Sized>(rng: &mut R, net: &Network) -> Cut {
    let side: Vec<bool> = (0..net.vertex_count())
        .map(|v| if v == net.source() { true } else if v == net.sink() { false } else { rng.gen() })
        .collect();
    Cut::from_partition(net, side).expect("terminals are on their own sides")
}
