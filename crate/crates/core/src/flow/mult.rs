//! Multiplicative flows: one positive rational per direction of every edge,
//! with product-form conservation at internal vertices.

use std::fmt;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::cut::Cut;
use crate::error::{Error, Result};
use crate::network::{Dir, EdgeId, Network, Traversal, VertexId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlowKind {
    /// Positive integers with `f(u→v)·f(v→u) ≤ d`.
    Integer,
    /// Integer, and nothing flows into the source or out of the sink.
    StrictInteger,
    /// Positive rationals, one direction equal to 1, `1/d ≤ f ≤ d`.
    RationalSingleDirection,
}

impl FlowKind {
    pub fn is_integer(self) -> bool {
        matches!(self, FlowKind::Integer | FlowKind::StrictInteger)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeFlow {
    pub fwd: BigRational,
    pub bwd: BigRational,
}

impl EdgeFlow {
    pub fn ones() -> Self {
        EdgeFlow { fwd: BigRational::one(), bwd: BigRational::one() }
    }

    pub fn integers(fwd: impl Into<BigInt>, bwd: impl Into<BigInt>) -> Self {
        EdgeFlow { fwd: BigRational::from_integer(fwd.into()), bwd: BigRational::from_integer(bwd.into()) }
    }

    pub fn get(&self, dir: Dir) -> &BigRational {
        match dir {
            Dir::Fwd => &self.fwd,
            Dir::Bwd => &self.bwd,
        }
    }

    pub fn get_mut(&mut self, dir: Dir) -> &mut BigRational {
        match dir {
            Dir::Fwd => &mut self.fwd,
            Dir::Bwd => &mut self.bwd,
        }
    }

    /// `f(u→v) / f(v→u)`.
    pub fn ratio(&self) -> BigRational {
        &self.fwd / &self.bwd
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiplicativeFlow {
    kind: FlowKind,
    edges: Vec<EdgeFlow>,
}

impl MultiplicativeFlow {
    pub fn new(kind: FlowKind, edges: Vec<EdgeFlow>) -> Self {
        MultiplicativeFlow { kind, edges }
    }

    /// The empty flow: 1 in every direction.
    pub fn ones(net: &Network, kind: FlowKind) -> Self {
        MultiplicativeFlow { kind, edges: vec![EdgeFlow::ones(); net.edges().len()] }
    }

    pub fn kind(&self) -> FlowKind {
        self.kind
    }

    pub fn with_kind(mut self, kind: FlowKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn edges(&self) -> &[EdgeFlow] {
        &self.edges
    }

    pub fn edge(&self, id: EdgeId) -> &EdgeFlow {
        &self.edges[id]
    }

    pub fn edge_mut(&mut self, id: EdgeId) -> &mut EdgeFlow {
        &mut self.edges[id]
    }

    pub fn get(&self, t: Traversal) -> &BigRational {
        self.edges[t.edge].get(t.dir)
    }

    pub fn get_mut(&mut self, t: Traversal) -> &mut BigRational {
        self.edges[t.edge].get_mut(t.dir)
    }

    /// Value carried by `edge` in the direction leaving `from`.
    pub fn leaving(&self, net: &Network, edge: EdgeId, from: VertexId) -> &BigRational {
        self.get(Traversal::leaving(net, edge, from))
    }

    /// Value carried by `edge` in the direction entering `into`.
    pub fn entering(&self, net: &Network, edge: EdgeId, into: VertexId) -> &BigRational {
        self.get(Traversal::leaving(net, edge, into).reverse())
    }

    fn check_shape(&self, net: &Network) -> Result<()> {
        if self.edges.len() != net.edges().len() {
            return Err(Error::Mismatch(format!(
                "flow has {} edges, network has {}",
                self.edges.len(),
                net.edges().len()
            )));
        }
        Ok(())
    }

    /// `(Π incoming, Π outgoing)` at `v`.
    pub fn balance(&self, net: &Network, v: VertexId) -> (BigRational, BigRational) {
        let mut inflow = BigRational::one();
        let mut outflow = BigRational::one();
        for &e in net.incident(v) {
            inflow *= self.entering(net, e, v);
            outflow *= self.leaving(net, e, v);
        }
        (inflow, outflow)
    }

    pub fn to_file(&self, scale: Option<&BigUint>) -> FlowFile {
        FlowFile {
            kind: self.kind,
            scale: scale.map(|n| n.to_string()),
            edges: self
                .edges
                .iter()
                .enumerate()
                .map(|(edge, f)| EdgeFlowFile { edge, fwd: fmt_rational(&f.fwd), bwd: fmt_rational(&f.bwd) })
                .collect(),
        }
    }

    pub fn from_file(file: &FlowFile, net: &Network) -> Result<Self> {
        let mut edges: Vec<Option<EdgeFlow>> = vec![None; net.edges().len()];
        for entry in &file.edges {
            let slot = edges
                .get_mut(entry.edge)
                .ok_or_else(|| Error::Mismatch(format!("edge {} is not in the network", entry.edge)))?;
            if slot.is_some() {
                return Err(Error::Mismatch(format!("edge {} listed twice", entry.edge)));
            }
            *slot = Some(EdgeFlow { fwd: parse_rational(&entry.fwd)?, bwd: parse_rational(&entry.bwd)? });
        }
        let edges = edges
            .into_iter()
            .enumerate()
            .map(|(i, f)| f.ok_or_else(|| Error::Mismatch(format!("edge {i} missing from flow"))))
            .collect::<Result<_>>()?;
        Ok(MultiplicativeFlow { kind: file.kind, edges })
    }
}

impl Traversal {
    pub fn reverse(self) -> Traversal {
        Traversal { edge: self.edge, dir: self.dir.reverse() }
    }
}

/// Flow JSON: per edge id, both direction values as `"p/q"` strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowFile {
    pub kind: FlowKind,
    /// The `n` of the scaled network the flow lives on, when not 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<String>,
    pub edges: Vec<EdgeFlowFile>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeFlowFile {
    pub edge: EdgeId,
    pub fwd: String,
    pub bwd: String,
}

pub fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"p"` or `"p/q"` into a positive rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::BadRational(s.to_owned());
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    let r = BigRational::new(n, d);
    if !r.is_positive() {
        return Err(bad());
    }
    Ok(r)
}

/// `|f|`, an exact positive rational.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FlowValue(pub BigRational);

impl FlowValue {
    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn from_integer(n: &BigUint) -> Self {
        FlowValue(BigRational::from_integer(BigInt::from(n.clone())))
    }

    pub fn equals_integer(&self, n: &BigUint) -> bool {
        *self == FlowValue::from_integer(n)
    }
}

impl fmt::Display for FlowValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_rational(&self.0))
    }
}

/// `Π f(s→·) / Π f(·→s)`.
pub fn flow_value(net: &Network, f: &MultiplicativeFlow) -> Result<FlowValue> {
    f.check_shape(net)?;
    let (inflow, outflow) = f.balance(net, net.source());
    Ok(FlowValue(outflow / inflow))
}

/// `Π forward cut flows / Π backward cut flows`. Equal to the flow value for any
/// valid flow and any cut.
pub fn cut_ratio(net: &Network, f: &MultiplicativeFlow, cut: &Cut) -> Result<BigRational> {
    f.check_shape(net)?;
    if cut.source_side().len() != net.vertex_count() {
        return Err(Error::InvalidCut("cut belongs to a different network".into()));
    }
    let mut ratio = BigRational::one();
    for &e in cut.cut_edges() {
        let edge = net.edge(e);
        let inside = if cut.on_source_side(edge.u) { edge.u } else { edge.v };
        ratio *= f.leaving(net, e, inside);
        ratio /= f.entering(net, e, inside);
    }
    Ok(ratio)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "violation", rename_all = "kebab-case")]
pub enum Violation {
    EdgeCount { expected: usize, found: usize },
    NonPositive { edge: EdgeId, dir: Dir, value: String },
    NonInteger { edge: EdgeId, dir: Dir, value: String },
    Capacity { edge: EdgeId, product: String, capacity: String },
    Bounds { edge: EdgeId, dir: Dir, value: String, capacity: String },
    SingleDirection { edge: EdgeId, fwd: String, bwd: String },
    Conservation { vertex: String, inflow: String, outflow: String },
    NotStrict { edge: EdgeId, vertex: String, value: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EdgeCount { expected, found } => write!(f, "flow lists {found} edges, network has {expected}"),
            Violation::NonPositive { edge, dir, value } => write!(f, "edge {edge} {dir:?}: value {value} is not positive"),
            Violation::NonInteger { edge, dir, value } => write!(f, "edge {edge} {dir:?}: value {value} is not an integer"),
            Violation::Capacity { edge, product, capacity } => {
                write!(f, "edge {edge}: product {product} exceeds capacity {capacity}")
            }
            Violation::Bounds { edge, dir, value, capacity } => {
                write!(f, "edge {edge} {dir:?}: value {value} outside [1/{capacity}, {capacity}]")
            }
            Violation::SingleDirection { edge, fwd, bwd } => {
                write!(f, "edge {edge}: both directions differ from 1 ({fwd}, {bwd})")
            }
            Violation::Conservation { vertex, inflow, outflow } => {
                write!(f, "vertex {vertex}: inflow {inflow} != outflow {outflow}")
            }
            Violation::NotStrict { edge, vertex, value } => {
                write!(f, "edge {edge}: {value} flows the wrong way at terminal {vertex}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every constraint of the flow's kind; never fails, violations are
/// collected in the report.
pub fn verify_flow(net: &Network, f: &MultiplicativeFlow) -> VerificationReport {
    let mut violations = Vec::new();
    if f.edges.len() != net.edges().len() {
        violations.push(Violation::EdgeCount { expected: net.edges().len(), found: f.edges.len() });
        return VerificationReport { violations };
    }
    let one = BigRational::one();
    let mut positive = true;
    for (edge, ef) in net.edges().iter().zip(&f.edges) {
        let d = BigRational::from_integer(BigInt::from(edge.capacity.clone()));
        for dir in [Dir::Fwd, Dir::Bwd] {
            let x = ef.get(dir);
            if !x.is_positive() {
                positive = false;
                violations.push(Violation::NonPositive { edge: edge.id, dir, value: fmt_rational(x) });
            } else if f.kind.is_integer() && !x.is_integer() {
                violations.push(Violation::NonInteger { edge: edge.id, dir, value: fmt_rational(x) });
            } else if f.kind == FlowKind::RationalSingleDirection && (*x > d || x.recip() > d) {
                violations.push(Violation::Bounds {
                    edge: edge.id,
                    dir,
                    value: fmt_rational(x),
                    capacity: edge.capacity.to_string(),
                });
            }
        }
        match f.kind {
            FlowKind::Integer | FlowKind::StrictInteger => {
                let product = &ef.fwd * &ef.bwd;
                if product > d {
                    violations.push(Violation::Capacity {
                        edge: edge.id,
                        product: fmt_rational(&product),
                        capacity: edge.capacity.to_string(),
                    });
                }
            }
            FlowKind::RationalSingleDirection => {
                if ef.fwd != one && ef.bwd != one {
                    violations.push(Violation::SingleDirection {
                        edge: edge.id,
                        fwd: fmt_rational(&ef.fwd),
                        bwd: fmt_rational(&ef.bwd),
                    });
                }
            }
        }
    }
    if !positive {
        // products below are meaningless with zero or negative entries
        return VerificationReport { violations };
    }
    for v in net.internal_vertices() {
        let (inflow, outflow) = f.balance(net, v);
        if inflow != outflow {
            violations.push(Violation::Conservation {
                vertex: net.name(v).to_owned(),
                inflow: fmt_rational(&inflow),
                outflow: fmt_rational(&outflow),
            });
        }
    }
    if f.kind == FlowKind::StrictInteger {
        for (terminal, into) in [(net.source(), true), (net.sink(), false)] {
            for &e in net.incident(terminal) {
                let x = if into { f.entering(net, e, terminal) } else { f.leaving(net, e, terminal) };
                if *x != one {
                    violations.push(Violation::NotStrict {
                        edge: e,
                        vertex: net.name(terminal).to_owned(),
                        value: fmt_rational(x),
                    });
                }
            }
        }
    }
    VerificationReport { violations }
}

/// Whether nothing enters the source and nothing leaves the sink.
pub fn is_strict(net: &Network, f: &MultiplicativeFlow) -> bool {
    let one = BigRational::one();
    net.incident(net.source()).iter().all(|&e| *f.entering(net, e, net.source()) == one)
        && net.incident(net.sink()).iter().all(|&e| *f.leaving(net, e, net.sink()) == one)
}
