//! Contraction rank of tensor assignments over a prime field.
//!
//! Every edge is a leg of dimension `d_e`. Internal vertices carry a tensor
//! over their incident legs; legs at the source span the input space and legs
//! at the sink the output space. A direct source–sink edge is an identity
//! between its input and output copies. Contracting the internal legs gives a
//! linear map whose rank is what we report.
//!
//! The contracted map is a Kronecker product over the connected components of
//! the leg graph, so each component is contracted and ranked on its own and the
//! ranks multiply. That keeps, e.g., two disjoint 1024×1024 blocks from ever
//! forming a 2^20 × 2^20 matrix.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::factor::is_prime_u64;
use crate::network::{big_to_json, EdgeId, Network, VertexId};
use crate::protocol::{simulate_protocol, Protocol};

pub const DEFAULT_FIELD_PRIME: u64 = 1_000_003;
/// Largest tensor (in entries) any single contraction step may produce.
pub const DEFAULT_BUDGET: usize = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TensorConfig {
    pub field_prime: u64,
    pub budget: usize,
}

impl Default for TensorConfig {
    fn default() -> Self {
        TensorConfig { field_prime: DEFAULT_FIELD_PRIME, budget: DEFAULT_BUDGET }
    }
}

impl TensorConfig {
    fn field(&self) -> Result<Field> {
        if self.field_prime >= 1 << 32 {
            return Err(Error::Precondition(format!("field prime {} must be below 2^32", self.field_prime)));
        }
        if !is_prime_u64(self.field_prime) {
            return Err(Error::NotPrime(self.field_prime));
        }
        Ok(Field::new(self.field_prime))
    }
}

/// Arithmetic mod a prime below 2^32, with Barrett reduction of 64-bit values.
#[derive(Clone, Copy, Debug)]
struct Field {
    q: u64,
    barrett: u64,
}

impl Field {
    fn new(q: u64) -> Self {
        Field { q, barrett: u64::MAX / q }
    }

    #[inline]
    fn reduce(self, x: u64) -> u64 {
        let quot = ((u128::from(x) * u128::from(self.barrett)) >> 64) as u64;
        let mut r = x - quot * self.q;
        while r >= self.q {
            r -= self.q;
        }
        r
    }

    #[inline]
    fn mul(self, a: u64, b: u64) -> u64 {
        self.reduce(a * b)
    }

    fn pow(self, mut a: u64, mut e: u64) -> u64 {
        let mut r = 1;
        while e > 0 {
            if e & 1 == 1 {
                r = self.mul(r, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        r
    }

    fn inv(self, a: u64) -> u64 {
        self.pow(a, self.q - 2)
    }

    /// How many products of reduced values fit in a u64 sum.
    fn lazy_terms(self) -> usize {
        let sq = (self.q - 1) * (self.q - 1);
        u64::MAX.checked_div(sq).map_or(usize::MAX, |n| usize::try_from(n).unwrap_or(usize::MAX).max(1))
    }
}

/// Dense row-major tensor; the first label is the slowest-varying axis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor {
    labels: Vec<usize>,
    dims: Vec<usize>,
    data: Vec<u64>,
}

impl Tensor {
    fn filled(labels: Vec<usize>, dims: Vec<usize>, value: u64) -> Self {
        let size = dims.iter().product();
        Tensor { labels, dims, data: vec![value; size] }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn data(&self) -> &[u64] {
        &self.data
    }

    /// Entries reordered so that the axes follow `order` (a permutation of the labels).
    fn permuted(&self, order: &[usize]) -> Vec<u64> {
        if order == self.labels.as_slice() {
            return self.data.clone();
        }
        let mut strides = vec![0; self.dims.len()];
        let mut acc = 1;
        for i in (0..self.dims.len()).rev() {
            strides[i] = acc;
            acc *= self.dims[i];
        }
        let axes: Vec<usize> =
            order.iter().map(|l| self.labels.iter().position(|x| x == l).expect("label present")).collect();
        let dims: Vec<usize> = axes.iter().map(|&a| self.dims[a]).collect();
        let steps: Vec<usize> = axes.iter().map(|&a| strides[a]).collect();
        let mut out = Vec::with_capacity(self.data.len());
        let mut index = vec![0; dims.len()];
        let mut offset = 0;
        for _ in 0..self.data.len() {
            out.push(self.data[offset]);
            for ax in (0..dims.len()).rev() {
                index[ax] += 1;
                offset += steps[ax];
                if index[ax] < dims[ax] {
                    break;
                }
                offset -= steps[ax] * dims[ax];
                index[ax] = 0;
            }
        }
        out
    }

    fn contract(&self, other: &Tensor, field: Field) -> Tensor {
        let shared: Vec<usize> = self.labels.iter().copied().filter(|l| other.labels.contains(l)).collect();
        let free_a: Vec<usize> = self.labels.iter().copied().filter(|l| !shared.contains(l)).collect();
        let free_b: Vec<usize> = other.labels.iter().copied().filter(|l| !shared.contains(l)).collect();
        let dim_of = |t: &Tensor, l: usize| t.dims[t.labels.iter().position(|&x| x == l).expect("label present")];
        let m: usize = free_a.iter().map(|&l| dim_of(self, l)).product();
        let k: usize = shared.iter().map(|&l| dim_of(self, l)).product();
        let n: usize = free_b.iter().map(|&l| dim_of(other, l)).product();

        let a = self.permuted(&[free_a.clone(), shared.clone()].concat());
        let b = other.permuted(&[shared, free_b.clone()].concat());
        let lazy = field.lazy_terms();
        let mut c = vec![0u64; m * n];
        let mut acc = vec![0u64; n];
        for i in 0..m {
            acc.iter_mut().for_each(|x| *x = 0);
            for kk in 0..k {
                let x = a[i * k + kk];
                if x != 0 {
                    let row = &b[kk * n..(kk + 1) * n];
                    for (s, &y) in acc.iter_mut().zip(row) {
                        *s += x * y;
                    }
                }
                if (kk + 1) % lazy == 0 {
                    acc.iter_mut().for_each(|s| *s = field.reduce(*s));
                }
            }
            for (dst, &s) in c[i * n..(i + 1) * n].iter_mut().zip(&acc) {
                *dst = field.reduce(s);
            }
        }
        let dims = free_a.iter().map(|&l| dim_of(self, l)).chain(free_b.iter().map(|&l| dim_of(other, l))).collect();
        Tensor { labels: [free_a, free_b].concat(), dims, data: c }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Leg {
    Source,
    Sink,
    Internal,
}

/// Leg labels and the contraction schedule, which depend only on the network.
///
/// Label `e` is edge `e`; a direct source–sink edge also gets the sink-side
/// label `E + e`.
#[derive(Clone, Debug)]
struct Layout {
    edge_count: usize,
    legs: Vec<Leg>,
    dims: Vec<usize>,
    /// Internal vertices in id order with their labels (incidence order).
    vertices: Vec<(VertexId, Vec<usize>)>,
    /// Direct source–sink edges.
    direct: Vec<EdgeId>,
    components: Vec<ComponentPlan>,
}

#[derive(Clone, Debug)]
struct ComponentPlan {
    /// Indices into the node list (vertices first, then direct edges).
    members: Vec<usize>,
    /// Pairwise merges; positions index a working list that starts as `members`
    /// and gets each merge result appended.
    merges: Vec<(usize, usize)>,
}

fn too_big(needed: impl ToString, budget: usize) -> Error {
    Error::BudgetExceeded { needed: needed.to_string(), budget }
}

impl Layout {
    fn new(net: &Network, budget: usize) -> Result<Layout> {
        let (s, t) = (net.source(), net.sink());
        let edge_count = net.edges().len();
        let mut legs = vec![Leg::Internal; 2 * edge_count];
        let mut dims = vec![0; 2 * edge_count];
        let mut direct = Vec::new();
        for e in net.edges() {
            let d = e.capacity.to_usize().filter(|&d| d <= budget).ok_or_else(|| too_big(&e.capacity, budget))?;
            dims[e.id] = d;
            dims[edge_count + e.id] = d;
            if e.touches(s) && e.touches(t) {
                legs[e.id] = Leg::Source;
                legs[edge_count + e.id] = Leg::Sink;
                direct.push(e.id);
            } else if e.touches(s) {
                legs[e.id] = Leg::Source;
            } else if e.touches(t) {
                legs[e.id] = Leg::Sink;
            }
        }
        let vertices: Vec<(VertexId, Vec<usize>)> =
            net.internal_vertices().map(|v| (v, net.incident(v).to_vec())).collect();
        let mut nodes: Vec<Vec<usize>> = vertices.iter().map(|(_, ls)| ls.clone()).collect();
        nodes.extend(direct.iter().map(|&e| vec![e, edge_count + e]));

        let size = |ls: &[usize]| -> Option<usize> { ls.iter().try_fold(1usize, |acc, &l| acc.checked_mul(dims[l])) };
        for ls in &nodes {
            if size(ls).is_none_or(|n| n > budget) {
                let exact = ls.iter().fold(BigUint::one(), |acc, &l| acc * dims[l]);
                return Err(too_big(exact, budget));
            }
        }

        // components of the "shares a label" relation
        let mut parent: Vec<usize> = (0..nodes.len()).collect();
        fn root(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut owner = vec![None; 2 * edge_count];
        for (i, ls) in nodes.iter().enumerate() {
            for &l in ls {
                match owner[l] {
                    None => owner[l] = Some(i),
                    Some(j) => {
                        let (a, b) = (root(&mut parent, i), root(&mut parent, j));
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let mut groups: Vec<Vec<usize>> = Vec::new();
        let mut group_of = vec![usize::MAX; nodes.len()];
        for i in 0..nodes.len() {
            let r = root(&mut parent, i);
            if group_of[r] == usize::MAX {
                group_of[r] = groups.len();
                groups.push(Vec::new());
            }
            groups[group_of[r]].push(i);
        }

        let mut components = Vec::with_capacity(groups.len());
        for members in groups {
            let mut work: Vec<Option<Vec<usize>>> = members.iter().map(|&i| Some(nodes[i].clone())).collect();
            let mut merges = Vec::new();
            loop {
                // cheapest contraction among pairs that share a leg
                let mut best: Option<(usize, usize, usize, Vec<usize>)> = None;
                for i in 0..work.len() {
                    let Some(a) = &work[i] else { continue };
                    for (j, b) in work.iter().enumerate().skip(i + 1) {
                        let Some(b) = b else { continue };
                        if !a.iter().any(|l| b.contains(l)) {
                            continue;
                        }
                        let merged: Vec<usize> = a
                            .iter()
                            .filter(|l| !b.contains(l))
                            .chain(b.iter().filter(|l| !a.contains(l)))
                            .copied()
                            .collect();
                        let cost = size(&merged).unwrap_or(usize::MAX);
                        if best.as_ref().is_none_or(|(_, _, c, _)| cost < *c) {
                            best = Some((i, j, cost, merged));
                        }
                    }
                }
                let Some((i, j, cost, merged)) = best else { break };
                if cost > budget {
                    let exact = merged.iter().fold(BigUint::one(), |acc, &l| acc * dims[l]);
                    return Err(too_big(exact, budget));
                }
                work[i] = None;
                work[j] = None;
                work.push(Some(merged));
                merges.push((i, j));
            }
            components.push(ComponentPlan { members, merges });
        }
        Ok(Layout { edge_count, legs, dims, vertices, direct, components })
    }

    fn edge_of(&self, label: usize) -> EdgeId {
        label % self.edge_count
    }
}

/// One tensor per internal vertex, legs in incidence order.
#[derive(Clone, Debug)]
pub struct TensorAssignment {
    pub seed: Option<u64>,
    pub tensors: Vec<(VertexId, Tensor)>,
}

impl TensorAssignment {
    /// Entries drawn uniformly from F_q by a ChaCha stream, vertices in id order.
    pub fn random(net: &Network, seed: u64, config: &TensorConfig) -> Result<Self> {
        let field = config.field()?;
        let layout = Layout::new(net, config.budget)?;
        Ok(Self::random_with(&layout, seed, field))
    }

    fn random_with(layout: &Layout, seed: u64, field: Field) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let tensors = layout
            .vertices
            .iter()
            .map(|(v, labels)| {
                let dims = labels.iter().map(|&l| layout.dims[l]).collect();
                let mut t = Tensor::filled(labels.clone(), dims, 0);
                t.data.iter_mut().for_each(|x| *x = rng.gen_range(0..field.q));
                (*v, t)
            })
            .collect();
        TensorAssignment { seed: Some(seed), tensors }
    }

    /// Every entry equal to `value` mod q.
    pub fn constant(net: &Network, value: u64, config: &TensorConfig) -> Result<Self> {
        let field = config.field()?;
        let layout = Layout::new(net, config.budget)?;
        let value = value % field.q;
        let tensors = layout
            .vertices
            .iter()
            .map(|(v, labels)| {
                let dims = labels.iter().map(|&l| layout.dims[l]).collect();
                (*v, Tensor::filled(labels.clone(), dims, value))
            })
            .collect();
        Ok(TensorAssignment { seed: None, tensors })
    }

    /// 0/1 tensors routing each protocol step through its path.
    ///
    /// Each crossing of an edge by a step takes one mixed-radix digit of that
    /// edge's index (radix = the step's dimension, crossings in step order).
    /// A vertex tensor is 1 exactly when every step passing through it carries
    /// the same digit in and out and unused indices are zero, so the contracted
    /// map embeds a space of the protocol's dimension: its rank is at least
    /// that dimension.
    pub fn protocol_witness(net: &Network, prot: &Protocol, config: &TensorConfig) -> Result<Self> {
        config.field()?;
        let layout = Layout::new(net, config.budget)?;
        let report = simulate_protocol(net, prot);
        if let Some(v) = report.violations.first() {
            return Err(Error::Precondition(format!("protocol does not simulate cleanly: {v:?}")));
        }
        let (s, t) = (net.source(), net.sink());

        // per edge: radix of each crossing, in order
        let mut radices: Vec<Vec<usize>> = vec![Vec::new(); net.edges().len()];
        // per (step, position): which crossing slot on that edge
        let mut slot: Vec<Vec<usize>> = Vec::with_capacity(prot.steps.len());
        for step in &prot.steps {
            let p = step.dimension.to_usize().ok_or_else(|| too_big(&step.dimension, config.budget))?;
            for (j, w) in step.path.iter().enumerate() {
                let inner = j + 1 < step.path.len();
                if inner && (w.head(net) == s || w.head(net) == t) {
                    return Err(Error::Precondition("witness paths must not revisit a terminal".into()));
                }
            }
            slot.push(
                step.path
                    .iter()
                    .map(|w| {
                        radices[w.edge].push(p);
                        radices[w.edge].len() - 1
                    })
                    .collect(),
            );
        }
        let usage: Vec<usize> = radices.iter().map(|r| r.iter().product()).collect();
        let digit = |e: EdgeId, k: usize, x: usize| -> usize {
            let below: usize = radices[e][..k].iter().product();
            (x / below) % radices[e][k]
        };

        let tensors = layout
            .vertices
            .iter()
            .map(|&(v, ref labels)| {
                // (leg a, crossing on a, leg b, crossing on b) for every pass through v
                let mut links = Vec::new();
                for (i, step) in prot.steps.iter().enumerate() {
                    for j in 1..step.path.len() {
                        if step.path[j - 1].head(net) == v {
                            let (ea, eb) = (step.path[j - 1].edge, step.path[j].edge);
                            let ia = labels.iter().position(|&l| l == ea).expect("incident");
                            let ib = labels.iter().position(|&l| l == eb).expect("incident");
                            links.push((ia, slot[i][j - 1], ib, slot[i][j]));
                        }
                    }
                }
                let dims: Vec<usize> = labels.iter().map(|&l| layout.dims[l]).collect();
                let mut tensor = Tensor::filled(labels.clone(), dims.clone(), 0);
                let mut index = vec![0; dims.len()];
                for entry in tensor.data.iter_mut() {
                    let in_range = index.iter().zip(labels).all(|(&x, &l)| x < usage[l]);
                    if in_range
                        && links.iter().all(|&(ia, ka, ib, kb)| {
                            digit(labels[ia], ka, index[ia]) == digit(labels[ib], kb, index[ib])
                        })
                    {
                        *entry = 1;
                    }
                    for ax in (0..dims.len()).rev() {
                        index[ax] += 1;
                        if index[ax] < dims[ax] {
                            break;
                        }
                        index[ax] = 0;
                    }
                }
                (v, tensor)
            })
            .collect();
        Ok(TensorAssignment { seed: None, tensors })
    }

    pub fn contract(&self, net: &Network, config: &TensorConfig) -> Result<ContractionResult> {
        let field = config.field()?;
        let layout = Layout::new(net, config.budget)?;
        if self.tensors.len() != layout.vertices.len()
            || self.tensors.iter().zip(&layout.vertices).any(|((v, t), (w, ls))| v != w || t.labels != *ls)
        {
            return Err(Error::Mismatch("tensor assignment does not match the network".into()));
        }
        for (_, t) in &self.tensors {
            if t.dims.iter().zip(&t.labels).any(|(&d, &l)| d != layout.dims[l]) || t.data.iter().any(|&x| x >= field.q)
            {
                return Err(Error::Mismatch("tensor shape or entries do not match the network".into()));
            }
        }
        Ok(contract_with(&layout, &self.tensors, field))
    }
}

fn contract_with(layout: &Layout, tensors: &[(VertexId, Tensor)], field: Field) -> ContractionResult {
    let ec = layout.edge_count;
    let node = |i: usize| -> Tensor {
        if i < tensors.len() {
            tensors[i].1.clone()
        } else {
            let e = layout.direct[i - tensors.len()];
            let d = layout.dims[e];
            let mut t = Tensor::filled(vec![e, ec + e], vec![d, d], 0);
            (0..d).for_each(|x| t.data[x * d + x] = 1);
            t
        }
    };
    let mut factors = Vec::with_capacity(layout.components.len());
    for comp in &layout.components {
        let mut work: Vec<Option<Tensor>> = comp.members.iter().map(|&i| Some(node(i))).collect();
        for &(i, j) in &comp.merges {
            let a = work[i].take().expect("planned");
            let b = work[j].take().expect("planned");
            work.push(Some(a.contract(&b, field)));
        }
        let t = work.into_iter().flatten().next().expect("one tensor per component");
        let mut rows_l: Vec<usize> = t.labels.iter().copied().filter(|&l| layout.legs[l] == Leg::Source).collect();
        let mut cols_l: Vec<usize> = t.labels.iter().copied().filter(|&l| layout.legs[l] == Leg::Sink).collect();
        rows_l.sort_unstable();
        cols_l.sort_unstable_by_key(|&l| layout.edge_of(l));
        let rows: usize = rows_l.iter().map(|&l| layout.dims[l]).product();
        let cols: usize = cols_l.iter().map(|&l| layout.dims[l]).product();
        let mut matrix = t.permuted(&[rows_l.clone(), cols_l.clone()].concat());
        let rank = rank_mod(&mut matrix, rows, cols, field);
        factors.push(ComponentRank {
            source_edges: rows_l.iter().map(|&l| layout.edge_of(l)).collect(),
            sink_edges: cols_l.iter().map(|&l| layout.edge_of(l)).collect(),
            rows,
            cols,
            rank,
        });
    }
    let source_dim = factors.iter().fold(BigUint::one(), |acc, f| acc * f.rows);
    let sink_dim = factors.iter().fold(BigUint::one(), |acc, f| acc * f.cols);
    let rank = factors.iter().fold(BigUint::one(), |acc, f| acc * f.rank);
    ContractionResult { factors, source_dim, sink_dim, rank }
}

/// Rank by row reduction; clobbers `m`.
fn rank_mod(m: &mut [u64], rows: usize, cols: usize, field: Field) -> usize {
    let q = field.q;
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| m[r * cols + c] != 0) else { continue };
        if p != rank {
            for j in c..cols {
                m.swap(p * cols + j, rank * cols + j);
            }
        }
        let inv = field.inv(m[rank * cols + c]);
        for j in c..cols {
            m[rank * cols + j] = field.mul(m[rank * cols + j], inv);
        }
        let (top, below) = m.split_at_mut((rank + 1) * cols);
        let pivot = &top[rank * cols..];
        for row in below.chunks_exact_mut(cols) {
            let f = row[c];
            if f == 0 {
                continue;
            }
            let neg = q - f;
            for j in c..cols {
                row[j] = field.reduce(row[j] + neg * pivot[j]);
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of one connected block of the contracted map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentRank {
    pub source_edges: Vec<EdgeId>,
    pub sink_edges: Vec<EdgeId>,
    pub rows: usize,
    pub cols: usize,
    pub rank: usize,
}

/// The contracted map, as the Kronecker product of its component blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractionResult {
    pub factors: Vec<ComponentRank>,
    pub source_dim: BigUint,
    pub sink_dim: BigUint,
    pub rank: BigUint,
}

impl ContractionResult {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "source_dim": big_to_json(&self.source_dim),
            "sink_dim": big_to_json(&self.sink_dim),
            "rank": big_to_json(&self.rank),
            "factors": self.factors,
        })
    }
}

pub fn contract_random(net: &Network, seed: u64, config: &TensorConfig) -> Result<ContractionResult> {
    TensorAssignment::random(net, seed, config)?.contract(net, config)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorEstimate {
    pub field_prime: u64,
    pub seeds: Vec<u64>,
    pub ranks: Vec<BigUint>,
    pub max_rank: BigUint,
}

impl TensorEstimate {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "field_prime": self.field_prime,
            "seeds": self.seeds,
            "ranks": self.ranks.iter().map(big_to_json).collect::<Vec<_>>(),
            "max_rank": big_to_json(&self.max_rank),
        })
    }
}

/// Largest rank over `trials` random assignments with seeds `seed, seed+1, …`.
///
/// A lower bound on the maximum contraction rank; it meets it with high
/// probability when q is large, but that is not guaranteed.
pub fn estimate_qmf_tilde(net: &Network, trials: usize, seed: u64, config: &TensorConfig) -> Result<TensorEstimate> {
    let field = config.field()?;
    let layout = Layout::new(net, config.budget)?;
    let seeds: Vec<u64> = (0..trials as u64).map(|i| seed.wrapping_add(i)).collect();
    let ranks: Vec<BigUint> = seeds
        .par_iter()
        .map(|&s| {
            let a = TensorAssignment::random_with(&layout, s, field);
            contract_with(&layout, &a.tensors, field).rank
        })
        .collect();
    let max_rank = ranks.iter().max().cloned().unwrap_or_else(BigUint::zero);
    Ok(TensorEstimate { field_prime: field.q, seeds, ranks, max_rank })
}
