use std::fmt;

use num_bigint::BigUint;
use num_traits::One;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::network::{big_to_json, EdgeId, Network, VertexId};

/// A source/sink bipartition of the vertices together with its cut set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cut {
    source_side: Vec<bool>,
    cut_edges: Vec<EdgeId>,
    capacity_product: BigUint,
}

impl Cut {
    /// `source_side[v]` is true for vertices on the source side.
    pub fn from_partition(net: &Network, source_side: Vec<bool>) -> Result<Cut> {
        if source_side.len() != net.vertex_count() {
            return Err(Error::InvalidCut(format!(
                "partition covers {} vertices, network has {}",
                source_side.len(),
                net.vertex_count()
            )));
        }
        if !source_side[net.source()] {
            return Err(Error::InvalidCut("source is on the sink side".into()));
        }
        if source_side[net.sink()] {
            return Err(Error::InvalidCut("sink is on the source side".into()));
        }
        let cut_edges: Vec<EdgeId> = net
            .edges()
            .iter()
            .filter(|e| source_side[e.u] != source_side[e.v])
            .map(|e| e.id)
            .collect();
        let capacity_product = cut_edges.iter().fold(BigUint::one(), |acc, &e| acc * &net.edge(e).capacity);
        Ok(Cut { source_side, cut_edges, capacity_product })
    }

    /// Builds the cut whose source side is `side` (given by vertex names).
    pub fn from_names(net: &Network, side: &[&str]) -> Result<Cut> {
        let mut source_side = vec![false; net.vertex_count()];
        for name in side {
            let v = net.vertex(name).ok_or_else(|| Error::UnknownVertex((*name).to_owned()))?;
            source_side[v] = true;
        }
        Cut::from_partition(net, source_side)
    }

    pub fn on_source_side(&self, v: VertexId) -> bool {
        self.source_side[v]
    }

    pub fn source_side(&self) -> &[bool] {
        &self.source_side
    }

    pub fn cut_edges(&self) -> &[EdgeId] {
        &self.cut_edges
    }

    /// `D_C`, the product of cut-edge capacities.
    pub fn capacity_product(&self) -> &BigUint {
        &self.capacity_product
    }

    pub fn cardinality(&self) -> usize {
        self.cut_edges.len()
    }

    pub fn display<'a>(&'a self, net: &'a Network) -> CutDisplay<'a> {
        CutDisplay { cut: self, net }
    }

    pub fn report(&self, net: &Network) -> CutReport {
        let names = |flag: bool| {
            (0..net.vertex_count())
                .filter(|&v| self.source_side[v] == flag)
                .map(|v| net.name(v).to_owned())
                .collect()
        };
        CutReport {
            source_side: names(true),
            sink_side: names(false),
            edges: self.cut_edges.clone(),
            cardinality: self.cardinality(),
            capacity_product: big_to_json(&self.capacity_product),
        }
    }
}

/// `{s,v}|{t}` rendering with the original vertex names.
pub struct CutDisplay<'a> {
    cut: &'a Cut,
    net: &'a Network,
}

impl fmt::Display for CutDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let side = |flag: bool| {
            (0..self.net.vertex_count())
                .filter(|&v| self.cut.source_side[v] == flag)
                .map(|v| self.net.name(v))
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{{{}}}|{{{}}}", side(true), side(false))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CutReport {
    pub source_side: Vec<String>,
    pub sink_side: Vec<String>,
    pub edges: Vec<EdgeId>,
    pub cardinality: usize,
    pub capacity_product: serde_json::Value,
}

/// Largest vertex count for which cuts are enumerated explicitly.
pub const MAX_ENUMERATION_VERTICES: usize = 24;

/// All `2^(|V|-2)` cuts, in binary-counter order over the internal vertices.
pub fn enumerate_cuts(net: &Network) -> Result<impl Iterator<Item = Cut> + '_> {
    let internal: Vec<VertexId> = net.internal_vertices().collect();
    if net.vertex_count() > MAX_ENUMERATION_VERTICES {
        return Err(Error::SearchTooLarge {
            size: format!("2^{}", internal.len()),
            cap: 1 << (MAX_ENUMERATION_VERTICES - 2),
        });
    }
    Ok((0u64..1 << internal.len()).map(move |mask| {
        let mut side = vec![false; net.vertex_count()];
        side[net.source()] = true;
        for (bit, &v) in internal.iter().enumerate() {
            side[v] = mask >> bit & 1 == 1;
        }
        Cut::from_partition(net, side).expect("enumerated partitions are valid")
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn parallel5_cuts() {
        let net = fixtures::parallel5();
        let cuts: Vec<Cut> = enumerate_cuts(&net).unwrap().collect();
        assert_eq!(cuts.len(), 2);
        assert_eq!(cuts[0].capacity_product(), &BigUint::from(6u32));
        assert_eq!(cuts[1].capacity_product(), &BigUint::from(5u32));
        assert_eq!(cuts[1].display(&net).to_string(), "{s,v}|{t}");
        assert_eq!(cuts[0].cut_edges(), &[0, 1]);
    }

    #[test]
    fn rejects_bad_partitions() {
        let net = fixtures::b(2, 3);
        assert!(Cut::from_partition(&net, vec![false, false, false]).is_err());
        assert!(Cut::from_partition(&net, vec![true, true, true]).is_err());
        assert!(Cut::from_partition(&net, vec![true, true]).is_err());
        assert!(Cut::from_names(&net, &["s", "x"]).is_err());
    }
}
