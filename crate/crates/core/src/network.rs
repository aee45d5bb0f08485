//! Undirected capacity-weighted multigraphs with a distinguished source and sink.

use std::collections::HashMap;
use std::fmt::Write as _;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;

/// One edge of the multigraph. Parallel edges get distinct ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeInstance {
    pub id: EdgeId,
    pub u: VertexId,
    pub v: VertexId,
    pub capacity: BigUint,
}

impl EdgeInstance {
    pub fn other(&self, x: VertexId) -> VertexId {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }

    pub fn touches(&self, x: VertexId) -> bool {
        self.u == x || self.v == x
    }
}

/// Orientation of an edge traversal relative to the `(u, v)` order of the file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Dir {
    Fwd,
    Bwd,
}

impl Dir {
    pub fn reverse(self) -> Dir {
        match self {
            Dir::Fwd => Dir::Bwd,
            Dir::Bwd => Dir::Fwd,
        }
    }
}

/// A directed use of an edge instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Traversal {
    pub edge: EdgeId,
    pub dir: Dir,
}

impl Traversal {
    pub fn tail(&self, net: &Network) -> VertexId {
        let e = &net.edges[self.edge];
        match self.dir {
            Dir::Fwd => e.u,
            Dir::Bwd => e.v,
        }
    }

    pub fn head(&self, net: &Network) -> VertexId {
        let e = &net.edges[self.edge];
        match self.dir {
            Dir::Fwd => e.v,
            Dir::Bwd => e.u,
        }
    }

    /// The traversal of `edge` that leaves `from`.
    pub fn leaving(net: &Network, edge: EdgeId, from: VertexId) -> Traversal {
        let dir = if net.edges[edge].u == from { Dir::Fwd } else { Dir::Bwd };
        Traversal { edge, dir }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Network {
    names: Vec<String>,
    lookup: HashMap<String, VertexId>,
    source: VertexId,
    sink: VertexId,
    edges: Vec<EdgeInstance>,
    incidence: Vec<Vec<EdgeId>>,
}

impl Network {
    /// Builds and validates a network. Edge ids follow the order of `edges`.
    pub fn new<S: AsRef<str>>(
        vertices: &[S],
        source: &str,
        sink: &str,
        edges: &[(&str, &str, u64)],
    ) -> Result<Network> {
        let edges: Vec<(String, String, BigUint)> = edges
            .iter()
            .map(|&(u, v, d)| (u.to_owned(), v.to_owned(), BigUint::from(d)))
            .collect();
        let names: Vec<String> = vertices.iter().map(|v| v.as_ref().to_owned()).collect();
        Network::build(names, source.to_owned(), sink.to_owned(), edges)
    }

    fn build(
        names: Vec<String>,
        source: String,
        sink: String,
        raw_edges: Vec<(String, String, BigUint)>,
    ) -> Result<Network> {
        let mut lookup = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            if lookup.insert(name.clone(), i).is_some() {
                return Err(Error::DuplicateVertex(name.clone()));
            }
        }
        let find = |name: &str| lookup.get(name).copied().ok_or_else(|| Error::UnknownVertex(name.to_owned()));
        let s = find(&source)?;
        let t = find(&sink)?;
        if s == t {
            return Err(Error::SourceIsSink(source));
        }
        let mut edges = Vec::with_capacity(raw_edges.len());
        let mut incidence = vec![Vec::new(); names.len()];
        for (id, (u, v, d)) in raw_edges.into_iter().enumerate() {
            let (u, v) = (find(&u)?, find(&v)?);
            if u == v {
                return Err(Error::SelfLoop { edge: id, vertex: names[u].clone() });
            }
            if d.is_zero() {
                return Err(Error::BadCapacity { edge: id, capacity: d.to_string() });
            }
            incidence[u].push(id);
            incidence[v].push(id);
            edges.push(EdgeInstance { id, u, v, capacity: d });
        }
        Ok(Network { names, lookup, source: s, sink: t, edges, incidence })
    }

    pub fn source(&self) -> VertexId {
        self.source
    }

    pub fn sink(&self) -> VertexId {
        self.sink
    }

    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edges(&self) -> &[EdgeInstance] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &EdgeInstance {
        &self.edges[id]
    }

    /// Edge ids incident to `v`, ascending.
    pub fn incident(&self, v: VertexId) -> &[EdgeId] {
        &self.incidence[v]
    }

    pub fn name(&self, v: VertexId) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex(&self, name: &str) -> Option<VertexId> {
        self.lookup.get(name).copied()
    }

    pub fn is_terminal(&self, v: VertexId) -> bool {
        v == self.source || v == self.sink
    }

    /// Vertices other than source and sink, ascending.
    pub fn internal_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.vertex_count()).filter(move |&v| !self.is_terminal(v))
    }

    pub fn capacity_product(&self) -> BigUint {
        self.edges.iter().fold(BigUint::one(), |acc, e| acc * &e.capacity)
    }

    /// Whether source and sink lie in the same connected component.
    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.vertex_count()];
        let mut stack = vec![self.source];
        seen[self.source] = true;
        while let Some(x) = stack.pop() {
            for &e in &self.incidence[x] {
                let y = self.edges[e].other(x);
                if !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen[self.sink]
    }

    /// The network `n·N`: same topology, every capacity multiplied by `n`.
    pub fn scale(&self, n: &BigUint) -> Result<Network> {
        if n.is_zero() {
            return Err(Error::ZeroScale);
        }
        let mut out = self.clone();
        for e in &mut out.edges {
            e.capacity *= n;
        }
        Ok(out)
    }

    pub fn scale_by(&self, n: u64) -> Result<Network> {
        self.scale(&BigUint::from(n))
    }

    pub fn from_json(text: &str) -> Result<Network> {
        let file: NetworkFile = serde_json::from_str(text).map_err(|e| Error::Syntax(e.to_string()))?;
        let source = file.source.ok_or(Error::MissingTerminal("source"))?;
        let sink = file.sink.ok_or(Error::MissingTerminal("sink"))?;
        let mut edges = Vec::with_capacity(file.edges.len());
        for (id, e) in file.edges.into_iter().enumerate() {
            let d = parse_capacity(&e.d).map_err(|capacity| Error::BadCapacity { edge: id, capacity })?;
            edges.push((e.u, e.v, d));
        }
        Network::build(file.vertices, source, sink, edges)
    }

    pub fn to_json(&self) -> String {
        let file = NetworkFile {
            vertices: self.names.clone(),
            source: Some(self.names[self.source].clone()),
            sink: Some(self.names[self.sink].clone()),
            edges: self
                .edges
                .iter()
                .map(|e| EdgeFile {
                    u: self.names[e.u].clone(),
                    v: self.names[e.v].clone(),
                    d: big_to_json(&e.capacity),
                })
                .collect(),
        };
        serde_json::to_string(&file).expect("network serializes")
    }

    /// Graphviz rendering. Edges listed in `highlight` are drawn bold red.
    pub fn to_dot(&self, labels: Option<&[String]>, highlight: &[EdgeId]) -> String {
        let mut out = String::from("graph network {\n");
        for (v, name) in self.names.iter().enumerate() {
            let shape = if v == self.source || v == self.sink { "doublecircle" } else { "circle" };
            let _ = writeln!(out, "  {:?} [shape={shape}];", name);
        }
        for e in &self.edges {
            let label = match labels {
                Some(l) => l[e.id].clone(),
                None => format!("d={}", e.capacity),
            };
            let style = if highlight.contains(&e.id) { ", color=red, penwidth=2" } else { "" };
            let _ = writeln!(
                out,
                "  {:?} -- {:?} [label={:?}, id=\"e{}\"{style}];",
                self.names[e.u], self.names[e.v], label, e.id
            );
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    vertices: Vec<String>,
    source: Option<String>,
    sink: Option<String>,
    edges: Vec<EdgeFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeFile {
    u: String,
    v: String,
    d: Value,
}

fn parse_capacity(v: &Value) -> std::result::Result<BigUint, String> {
    let d = match v {
        Value::Number(n) => match n.as_u64() {
            Some(d) => BigUint::from(d),
            None => return Err(n.to_string()),
        },
        Value::String(s) => s.parse::<BigUint>().map_err(|_| s.clone())?,
        other => return Err(other.to_string()),
    };
    if d.is_zero() {
        return Err("0".into());
    }
    Ok(d)
}

/// JSON form of a big integer: a number when it fits in `u64`, a decimal string otherwise.
pub fn big_to_json(n: &BigUint) -> Value {
    match n.to_u64() {
        Some(x) => Value::from(x),
        None => Value::String(n.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_path() {
        let net = Network::from_json(
            r#"{"vertices":["s","v","t"],"source":"s","sink":"t","edges":[{"u":"s","v":"v","d":2},{"u":"v","v":"t","d":3}]}"#,
        )
        .unwrap();
        assert_eq!(net.vertex_count(), 3);
        assert_eq!(net.edges().len(), 2);
        assert_eq!(net.edge(1).capacity, BigUint::from(3u32));
        assert_eq!(net.incident(net.vertex("v").unwrap()), &[0, 1]);
    }

    #[test]
    fn parallel_edges_keep_ids() {
        let net = Network::from_json(
            r#"{"vertices":["s","v","t"],"source":"s","sink":"t","edges":[{"u":"s","v":"v","d":2},{"u":"s","v":"v","d":3},{"u":"v","v":"t","d":5}]}"#,
        )
        .unwrap();
        let between: Vec<_> = net.edges().iter().filter(|e| e.touches(0) && e.touches(1)).map(|e| e.id).collect();
        assert_eq!(between, vec![0, 1]);
    }

    #[test]
    fn rejects_self_loop() {
        let err = Network::from_json(
            r#"{"vertices":["s","t"],"source":"s","sink":"t","edges":[{"u":"s","v":"s","d":2}]}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::SelfLoop { edge: 0, .. }));
        assert!(err.to_string().contains("self-loop"));
    }

    #[test]
    fn rejects_bad_inputs() {
        let cases = [
            (r#"{"vertices":["s","t"],"sink":"t","edges":[]}"#, "missing source"),
            (r#"{"vertices":["s","t"],"source":"s","edges":[]}"#, "missing sink"),
            (r#"{"vertices":["s","t"],"source":"s","source":"t","sink":"t","edges":[]}"#, "duplicate field"),
            (r#"{"vertices":["s","t"],"source":"s","sink":"s","edges":[]}"#, "must differ"),
            (r#"{"vertices":["s","t"],"source":"s","sink":"t","edges":[{"u":"s","v":"t","d":0}]}"#, "capacity 0"),
            (r#"{"vertices":["s","t"],"source":"s","sink":"t","edges":[{"u":"s","v":"t","d":-3}]}"#, "capacity -3"),
            (r#"{"vertices":["s","t"],"source":"s","sink":"t","edges":[{"u":"s","v":"x","d":1}]}"#, "unknown vertex"),
            (r#"{"vertices":["s","t","s"],"source":"s","sink":"t","edges":[]}"#, "duplicate vertex"),
            (r#"{"vertices":["s","t"],"source":"s","sink":"t","edges":[}"#, "malformed"),
        ];
        for (text, needle) in cases {
            let err = Network::from_json(text).unwrap_err().to_string();
            assert!(err.contains(needle), "{err:?} should mention {needle:?}");
        }
    }

    #[test]
    fn scale_multiplies_capacities() {
        let net = Network::new(&["s", "v", "t"], "s", "t", &[("s", "v", 2), ("s", "v", 3), ("v", "t", 5)]).unwrap();
        let scaled = net.scale_by(5).unwrap();
        let caps: Vec<u64> = scaled.edges().iter().map(|e| e.capacity.to_u64().unwrap()).collect();
        assert_eq!(caps, vec![10, 15, 25]);
        assert_eq!(net.scale_by(1).unwrap(), net);
        assert!(matches!(net.scale_by(0), Err(Error::ZeroScale)));
    }

    #[test]
    fn huge_capacities_round_trip_as_strings() {
        let net = Network::new(&["s", "t"], "s", "t", &[("s", "t", u64::MAX)]).unwrap();
        let big = net.scale_by(u64::MAX).unwrap();
        let json = big.to_json();
        assert!(json.contains('"'));
        assert_eq!(Network::from_json(&json).unwrap(), big);
    }

    #[test]
    fn dot_mentions_every_edge() {
        let net = Network::new(&["s", "t"], "s", "t", &[("s", "t", 2), ("s", "t", 3)]).unwrap();
        let dot = net.to_dot(None, &[1]);
        assert!(dot.contains("id=\"e0\""));
        assert!(dot.contains("d=3\", id=\"e1\", color=red"));
    }
}
