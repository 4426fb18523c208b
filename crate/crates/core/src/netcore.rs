//! In-memory two-layer firm network.
//!
//! A transaction arc `(i, j)` means money flows from firm `i` to firm `j`.
//! Patent edges are unordered. Both layers are binary: parallel links collapse
//! to one and self-loops are never stored.

use std::collections::{BTreeSet, HashMap};

use crate::{Error, IndustryCode, Result};

/// Dense node index, contiguous in `0..n` within one network.
pub type FirmId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Layer {
    Transaction,
    Patent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DegreeMode {
    In,
    Out,
    Total,
    Undirected,
}

/// Outcome of a link insertion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Insert {
    Added,
    Duplicate,
    SelfLoop,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MultiLayerNetwork {
    out_adj: Vec<BTreeSet<FirmId>>,
    in_adj: Vec<BTreeSet<FirmId>>,
    patent_adj: Vec<BTreeSet<FirmId>>,
    arcs: usize,
    patent_edges: usize,
    industry: Vec<Option<IndustryCode>>,
}

impl MultiLayerNetwork {
    pub fn new(n: usize) -> Self {
        MultiLayerNetwork {
            out_adj: vec![BTreeSet::new(); n],
            in_adj: vec![BTreeSet::new(); n],
            patent_adj: vec![BTreeSet::new(); n],
            arcs: 0,
            patent_edges: 0,
            industry: vec![None; n],
        }
    }

    /// Builds a network from link lists; self-loops and duplicates are dropped.
    pub fn from_links(
        n: usize,
        arcs: impl IntoIterator<Item = (FirmId, FirmId)>,
        patent_edges: impl IntoIterator<Item = (FirmId, FirmId)>,
    ) -> Result<Self> {
        let mut net = MultiLayerNetwork::new(n);
        for (i, j) in arcs {
            net.add_arc(i, j)?;
        }
        for (i, j) in patent_edges {
            net.add_patent_edge(i, j)?;
        }
        Ok(net)
    }

    pub fn n(&self) -> usize {
        self.out_adj.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs
    }

    pub fn patent_edge_count(&self) -> usize {
        self.patent_edges
    }

    fn check(&self, v: FirmId) -> Result<()> {
        if v < self.n() {
            Ok(())
        } else {
            Err(Error::UnknownNode { id: v, n: self.n() })
        }
    }

    pub fn add_arc(&mut self, from: FirmId, to: FirmId) -> Result<Insert> {
        self.check(from)?;
        self.check(to)?;
        if from == to {
            return Ok(Insert::SelfLoop);
        }
        if !self.out_adj[from].insert(to) {
            return Ok(Insert::Duplicate);
        }
        self.in_adj[to].insert(from);
        self.arcs += 1;
        Ok(Insert::Added)
    }

    pub fn remove_arc(&mut self, from: FirmId, to: FirmId) -> Result<bool> {
        self.check(from)?;
        self.check(to)?;
        if self.out_adj[from].remove(&to) {
            self.in_adj[to].remove(&from);
            self.arcs -= 1;
            Ok(true)
        } else {
            Ok(false)
        }
    }

    pub fn add_patent_edge(&mut self, a: FirmId, b: FirmId) -> Result<Insert> {
        self.check(a)?;
        self.check(b)?;
        if a == b {
            return Ok(Insert::SelfLoop);
        }
        if !self.patent_adj[a].insert(b) {
            return Ok(Insert::Duplicate);
        }
        self.patent_adj[b].insert(a);
        self.patent_edges += 1;
        Ok(Insert::Added)
    }

    pub fn remove_patent_edge(&mut self, a: FirmId, b: FirmId) -> Result<bool> {
        self.check(a)?;
        self.check(b)?;
        if self.patent_adj[a].remove(&b) {
            self.patent_adj[b].remove(&a);
            self.patent_edges -= 1;
            Ok(true)
        } else {
            Ok(false)
        }
    }

    #[inline]
    pub fn has_arc(&self, from: FirmId, to: FirmId) -> bool {
        self.out_adj.get(from).is_some_and(|s| s.contains(&to))
    }

    #[inline]
    pub fn has_patent_edge(&self, a: FirmId, b: FirmId) -> bool {
        self.patent_adj.get(a).is_some_and(|s| s.contains(&b))
    }

    pub fn out_neighbors(&self, v: FirmId) -> &BTreeSet<FirmId> {
        &self.out_adj[v]
    }

    pub fn in_neighbors(&self, v: FirmId) -> &BTreeSet<FirmId> {
        &self.in_adj[v]
    }

    /// Patent neighbours of `v`; never contains `v` itself.
    pub fn patent_neighbors(&self, v: FirmId) -> Result<&BTreeSet<FirmId>> {
        self.check(v)?;
        Ok(&self.patent_adj[v])
    }

    pub(crate) fn patent_adj(&self, v: FirmId) -> &BTreeSet<FirmId> {
        &self.patent_adj[v]
    }

    /// Arcs in lexicographic order.
    pub fn arcs(&self) -> impl Iterator<Item = (FirmId, FirmId)> + '_ {
        self.out_adj
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.iter().map(move |&j| (i, j)))
    }

    /// Patent edges as `(min, max)` pairs in lexicographic order.
    pub fn patent_edges(&self) -> impl Iterator<Item = (FirmId, FirmId)> + '_ {
        self.patent_adj
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.range(i + 1..).map(move |&j| (i, j)))
    }

    pub fn industry(&self, v: FirmId) -> Option<IndustryCode> {
        self.industry.get(v).copied().flatten()
    }

    pub fn set_industry(&mut self, v: FirmId, code: Option<IndustryCode>) -> Result<()> {
        self.check(v)?;
        self.industry[v] = code;
        Ok(())
    }

    pub fn industries(&self) -> &[Option<IndustryCode>] {
        &self.industry
    }

    pub fn degree_sequence(&self, layer: Layer, mode: DegreeMode) -> Result<Vec<usize>> {
        let adj_len = |adj: &[BTreeSet<FirmId>]| adj.iter().map(BTreeSet::len).collect();
        match (layer, mode) {
            (Layer::Transaction, DegreeMode::Out) => Ok(adj_len(&self.out_adj)),
            (Layer::Transaction, DegreeMode::In) => Ok(adj_len(&self.in_adj)),
            (Layer::Transaction, DegreeMode::Total) => Ok(self
                .out_adj
                .iter()
                .zip(&self.in_adj)
                .map(|(o, i)| o.len() + i.len())
                .collect()),
            (Layer::Patent, DegreeMode::Undirected) => Ok(adj_len(&self.patent_adj)),
            _ => Err(Error::InvalidMode { layer, mode }),
        }
    }

    /// Sub-network on `keep`, relabelled to contiguous ids in ascending order
    /// of the original ids. Links survive iff both endpoints are kept.
    pub fn induced_subgraph(&self, keep: &BTreeSet<FirmId>) -> Result<MultiLayerNetwork> {
        if let Some(&bad) = keep.iter().find(|&&v| v >= self.n()) {
            return Err(Error::UnknownNode { id: bad, n: self.n() });
        }
        let relabel: HashMap<FirmId, FirmId> =
            keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        let mut sub = MultiLayerNetwork::new(keep.len());
        for (&old, new) in keep.iter().zip(0..) {
            sub.industry[new] = self.industry[old];
            for j in &self.out_adj[old] {
                if let Some(&nj) = relabel.get(j) {
                    sub.add_arc(new, nj)?;
                }
            }
            for j in self.patent_adj[old].range(old + 1..) {
                if let Some(&nj) = relabel.get(j) {
                    sub.add_patent_edge(new, nj)?;
                }
            }
        }
        Ok(sub)
    }

    /// Removes every link; node set and labels are kept.
    pub fn clear_links(&mut self) {
        for s in self
            .out_adj
            .iter_mut()
            .chain(&mut self.in_adj)
            .chain(&mut self.patent_adj)
        {
            s.clear();
        }
        self.arcs = 0;
        self.patent_edges = 0;
    }
}
