//! Industry split and bounded extraction of a patent-connected sub-network.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;

use crate::{seeded_rng, Error, FirmId, IndustryCode, MultiLayerNetwork, Result};

pub const DEFAULT_CAP: usize = 1000;

/// One network per industry code (all 34 present, possibly empty), keeping
/// only nodes of that code and links inside the industry. Unlabeled nodes
/// belong to no industry.
pub fn split_by_industry(net: &MultiLayerNetwork) -> BTreeMap<IndustryCode, MultiLayerNetwork> {
    let mut members: BTreeMap<IndustryCode, BTreeSet<FirmId>> =
        IndustryCode::all().map(|c| (c, BTreeSet::new())).collect();
    for (v, code) in net.industries().iter().enumerate() {
        if let Some(code) = code {
            members.get_mut(code).expect("all codes present").insert(v);
        }
    }
    members
        .into_iter()
        .map(|(code, keep)| {
            let sub = net
                .induced_subgraph(&keep)
                .expect("member ids come from the network");
            (code, sub)
        })
        .collect()
}

/// Node set reached by breadth-first expansion over patent edges from a
/// maximum-patent-degree node (ties broken uniformly at random).
///
/// Levels are added whole: expansion stops once no frontier remains or the
/// total after adding a level exceeds `cap`. The result can therefore be
/// larger than `cap` by up to the size of the last level.
pub fn connected_members(
    net: &MultiLayerNetwork,
    cap: usize,
    seed: u64,
) -> Result<(FirmId, BTreeSet<FirmId>)> {
    if net.n() == 0 {
        return Err(Error::EmptyNetwork);
    }
    let degree = |v: FirmId| net.patent_adj(v).len();
    let max = (0..net.n()).map(degree).max().expect("non-empty");
    let tied: Vec<FirmId> = (0..net.n()).filter(|&v| degree(v) == max).collect();
    let start = tied[seeded_rng(seed).random_range(0..tied.len())];

    let mut seen = BTreeSet::from([start]);
    let mut frontier = vec![start];
    while !frontier.is_empty() && seen.len() <= cap {
        let mut next = Vec::new();
        for &v in &frontier {
            for &u in net.patent_adj(v) {
                if seen.insert(u) {
                    next.push(u);
                }
            }
        }
        next.sort_unstable();
        frontier = next;
    }
    Ok((start, seen))
}

/// Induced sub-network (both layers) on [`connected_members`].
pub fn extract_connected(net: &MultiLayerNetwork, cap: usize, seed: u64) -> Result<MultiLayerNetwork> {
    let (_, members) = connected_members(net, cap, seed)?;
    net.induced_subgraph(&members)
}

/// Networks large enough to analyze, plus the codes that were dropped.
pub fn analyzable(
    nets: BTreeMap<IndustryCode, MultiLayerNetwork>,
) -> (BTreeMap<IndustryCode, MultiLayerNetwork>, Vec<IndustryCode>) {
    let mut dropped = Vec::new();
    let kept = nets
        .into_iter()
        .filter(|(code, net)| {
            let ok = net.n() >= crate::ergm::MIN_NODES;
            if !ok {
                dropped.push(*code);
            }
            ok
        })
        .collect();
    (kept, dropped)
}
