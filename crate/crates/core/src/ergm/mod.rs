//! Multi-layer p* (exponential random graph) model with pseudolikelihood
//! estimation.
//!
//! A link slot is one binary variable: an ordered pair on the transaction
//! layer or an unordered pair on the patent layer. Each configuration count
//! `z(x)` enters the model linearly, and the full conditional of a slot is a
//! logistic function of the change statistics `z(x+) - z(x-)`. Maximizing
//! the pseudolikelihood is therefore a logistic regression of observed slot
//! values on change statistics.
//!
//! Configuration counting rules:
//!
//! | kind | counted object |
//! |------|----------------|
//! | `ChoiceTrans` | transaction arcs |
//! | `ChoicePatent` | patent edges |
//! | `Multiplicity` | ordered arcs `i -> j` whose pair also has a patent edge |
//! | `Reciprocity` | unordered pairs with arcs both ways |
//! | `MultiReciprocity` | reciprocated pairs that also have a patent edge |
//! | `Transitivity` | `(a; {b, c})` with `a -> b`, `a -> c` and patent `{b, c}` |

mod logistic;
mod significance;

pub use logistic::{fit_logistic_design, FitOutcome, LogisticDesign, LogisticFit, SEPARATION_CAP};
pub use significance::{
    deviance_threshold, significance_report, significance_report_with, Model, ModelResult,
    SignificanceReport, DEFAULT_DELTA, MIN_NODES,
};

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::{FirmId, Layer, MultiLayerNetwork, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConfigKind {
    ChoiceTrans,
    ChoicePatent,
    Multiplicity,
    Reciprocity,
    MultiReciprocity,
    Transitivity,
}

impl ConfigKind {
    pub const ALL: [ConfigKind; 6] = [
        ConfigKind::ChoiceTrans,
        ConfigKind::ChoicePatent,
        ConfigKind::Multiplicity,
        ConfigKind::Reciprocity,
        ConfigKind::MultiReciprocity,
        ConfigKind::Transitivity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConfigKind::ChoiceTrans => "choice_trans",
            ConfigKind::ChoicePatent => "choice_patent",
            ConfigKind::Multiplicity => "multiplicity",
            ConfigKind::Reciprocity => "reciprocity",
            ConfigKind::MultiReciprocity => "multi_reciprocity",
            ConfigKind::Transitivity => "transitivity",
        }
    }
}

impl std::str::FromStr for ConfigKind {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        ConfigKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| crate::Error::Value(format!("unknown configuration {s:?}")))
    }
}

/// One link variable. Patent slots always have `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkSlot {
    pub i: FirmId,
    pub j: FirmId,
    pub layer: Layer,
}

impl LinkSlot {
    pub fn transaction(from: FirmId, to: FirmId) -> Self {
        debug_assert_ne!(from, to);
        LinkSlot {
            i: from,
            j: to,
            layer: Layer::Transaction,
        }
    }

    pub fn patent(a: FirmId, b: FirmId) -> Self {
        debug_assert_ne!(a, b);
        LinkSlot {
            i: a.min(b),
            j: a.max(b),
            layer: Layer::Patent,
        }
    }

    pub fn is_set(&self, net: &MultiLayerNetwork) -> bool {
        match self.layer {
            Layer::Transaction => net.has_arc(self.i, self.j),
            Layer::Patent => net.has_patent_edge(self.i, self.j),
        }
    }

    /// Sets or clears the link; returns whether the network changed.
    pub fn assign(&self, net: &mut MultiLayerNetwork, present: bool) -> Result<bool> {
        use crate::netcore::Insert;
        match (self.layer, present) {
            (Layer::Transaction, true) => Ok(net.add_arc(self.i, self.j)? == Insert::Added),
            (Layer::Transaction, false) => net.remove_arc(self.i, self.j),
            (Layer::Patent, true) => Ok(net.add_patent_edge(self.i, self.j)? == Insert::Added),
            (Layer::Patent, false) => net.remove_patent_edge(self.i, self.j),
        }
    }
}

/// `n(n-1)` transaction slots in row-major order, then `n(n-1)/2` patent slots.
pub fn slot_universe(n: usize) -> impl Iterator<Item = LinkSlot> {
    let trans = (0..n).flat_map(move |i| {
        (0..n).filter(move |&j| j != i).map(move |j| LinkSlot::transaction(i, j))
    });
    let patent = (0..n).flat_map(move |i| (i + 1..n).map(move |j| LinkSlot::patent(i, j)));
    trans.chain(patent)
}

pub fn slot_count(n: usize) -> usize {
    let ordered = n * n.saturating_sub(1);
    ordered + ordered / 2
}

fn common(a: &BTreeSet<FirmId>, b: &BTreeSet<FirmId>) -> u64 {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small.iter().filter(|v| large.contains(v)).count() as u64
}

/// Configuration count `z(x)` on the observed network.
pub fn count_statistic(net: &MultiLayerNetwork, kind: ConfigKind) -> u64 {
    match kind {
        ConfigKind::ChoiceTrans => net.arc_count() as u64,
        ConfigKind::ChoicePatent => net.patent_edge_count() as u64,
        ConfigKind::Multiplicity => net
            .arcs()
            .filter(|&(i, j)| net.has_patent_edge(i, j))
            .count() as u64,
        ConfigKind::Reciprocity => net
            .arcs()
            .filter(|&(i, j)| i < j && net.has_arc(j, i))
            .count() as u64,
        ConfigKind::MultiReciprocity => net
            .arcs()
            .filter(|&(i, j)| i < j && net.has_arc(j, i) && net.has_patent_edge(i, j))
            .count() as u64,
        ConfigKind::Transitivity => net
            .patent_edges()
            .map(|(b, c)| common(net.in_neighbors(b), net.in_neighbors(c)))
            .sum(),
    }
}

/// `z(x+) - z(x-)` for one slot, computed locally from the neighbourhoods of
/// the slot's endpoints. The slot's own current value is irrelevant.
pub fn change_statistic(net: &MultiLayerNetwork, slot: LinkSlot, kind: ConfigKind) -> u64 {
    let LinkSlot { i, j, layer } = slot;
    match (layer, kind) {
        (Layer::Transaction, ConfigKind::ChoiceTrans) => 1,
        (Layer::Transaction, ConfigKind::ChoicePatent) => 0,
        (Layer::Transaction, ConfigKind::Multiplicity) => net.has_patent_edge(i, j) as u64,
        (Layer::Transaction, ConfigKind::Reciprocity) => net.has_arc(j, i) as u64,
        (Layer::Transaction, ConfigKind::MultiReciprocity) => {
            (net.has_arc(j, i) && net.has_patent_edge(i, j)) as u64
        }
        // New arc a -> b closes (a; {b, c}) for every c with a -> c and patent {b, c}.
        (Layer::Transaction, ConfigKind::Transitivity) => {
            common(net.out_neighbors(i), net.patent_adj(j))
        }
        (Layer::Patent, ConfigKind::ChoiceTrans) => 0,
        (Layer::Patent, ConfigKind::ChoicePatent) => 1,
        (Layer::Patent, ConfigKind::Multiplicity) => {
            net.has_arc(i, j) as u64 + net.has_arc(j, i) as u64
        }
        (Layer::Patent, ConfigKind::Reciprocity) => 0,
        (Layer::Patent, ConfigKind::MultiReciprocity) => {
            (net.has_arc(i, j) && net.has_arc(j, i)) as u64
        }
        // New patent {b, c} closes (a; {b, c}) for every common in-neighbour a.
        (Layer::Patent, ConfigKind::Transitivity) => {
            common(net.in_neighbors(i), net.in_neighbors(j))
        }
    }
}

/// Pseudolikelihood design: one row per slot of the universe, response is the
/// observed link value, features are change statistics in `kinds` order.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignTable {
    pub kinds: Vec<ConfigKind>,
    pub design: LogisticDesign,
}

/// Builds the design. The two choice kinds are always present and come
/// first; other kinds keep their given order, duplicates removed.
pub fn build_design(net: &MultiLayerNetwork, kinds: &[ConfigKind]) -> DesignTable {
    let mut all = vec![ConfigKind::ChoiceTrans, ConfigKind::ChoicePatent];
    for &k in kinds {
        if !all.contains(&k) {
            all.push(k);
        }
    }
    let n = net.n();
    let width = all.len();

    let row = |slot: LinkSlot, resp: &mut Vec<u8>, feats: &mut Vec<f64>| {
        resp.push(slot.is_set(net) as u8);
        feats.extend(all.iter().map(|&k| change_statistic(net, slot, k) as f64));
    };
    let trans: Vec<(Vec<u8>, Vec<f64>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut resp = Vec::with_capacity(n);
            let mut feats = Vec::with_capacity(n * width);
            for j in (0..n).filter(|&j| j != i) {
                row(LinkSlot::transaction(i, j), &mut resp, &mut feats);
            }
            (resp, feats)
        })
        .collect();
    let patent: Vec<(Vec<u8>, Vec<f64>)> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut resp = Vec::with_capacity(n - i);
            let mut feats = Vec::with_capacity((n - i) * width);
            for j in i + 1..n {
                row(LinkSlot::patent(i, j), &mut resp, &mut feats);
            }
            (resp, feats)
        })
        .collect();

    let mut responses = Vec::with_capacity(slot_count(n));
    let mut features = Vec::with_capacity(slot_count(n) * width);
    for (r, f) in trans.into_iter().chain(patent) {
        responses.extend(r);
        features.extend(f);
    }
    DesignTable {
        kinds: all,
        design: LogisticDesign::new(width, features, responses)
            .expect("rows are built with matching width"),
    }
}

/// Pseudolikelihood fit of one model.
#[derive(Debug, Clone, PartialEq)]
pub struct ErgmFit {
    pub kinds: Vec<ConfigKind>,
    /// `None` for kinds whose change statistic is zero on every slot.
    pub lambdas: Vec<Option<f64>>,
    /// Deviance `-2 ln PL` at the maximum.
    pub g2pl: f64,
    pub outcome: FitOutcome,
    pub iterations: usize,
    pub max_gradient: f64,
}

impl ErgmFit {
    pub fn converged(&self) -> bool {
        self.outcome == FitOutcome::Converged
    }

    pub fn lambda(&self, kind: ConfigKind) -> Option<f64> {
        self.kinds
            .iter()
            .position(|&k| k == kind)
            .and_then(|p| self.lambdas[p])
    }
}

impl DesignTable {
    pub fn rows(&self) -> usize {
        self.design.rows()
    }

    /// Fits the model restricted to `kinds` (each must be a column of this
    /// table).
    pub fn fit(&self, kinds: &[ConfigKind]) -> Result<ErgmFit> {
        let cols: Vec<usize> = kinds
            .iter()
            .map(|k| {
                self.kinds.iter().position(|c| c == k).ok_or_else(|| {
                    crate::Error::Value(format!("{} is not a column of the design", k.name()))
                })
            })
            .collect::<Result<_>>()?;
        let fit = fit_logistic_design(&self.design, &cols)?;
        Ok(ErgmFit {
            kinds: kinds.to_vec(),
            lambdas: fit.coefficients,
            g2pl: fit.deviance,
            outcome: fit.outcome,
            iterations: fit.iterations,
            max_gradient: fit.max_gradient,
        })
    }
}

/// Maximum pseudolikelihood fit using every column of the design.
pub fn fit_logistic(design: &DesignTable) -> Result<ErgmFit> {
    design.fit(&design.kinds)
}

#[cfg(test)]
mod tests;
