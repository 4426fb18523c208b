use super::*;
use crate::{seeded_rng, Error};
use rand::Rng;

fn random_net(n: usize, p_arc: f64, p_pat: f64, seed: u64) -> MultiLayerNetwork {
    let mut rng = seeded_rng(seed);
    let mut net = MultiLayerNetwork::new(n);
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random::<f64>() < p_arc {
                net.add_arc(i, j).unwrap();
            }
            if i < j && rng.random::<f64>() < p_pat {
                net.add_patent_edge(i, j).unwrap();
            }
        }
    }
    net
}

/// Dense-matrix recount, independent of the adjacency-set code paths.
fn brute_count(net: &MultiLayerNetwork, kind: ConfigKind) -> u64 {
    let n = net.n();
    let t = |i: usize, j: usize| net.arcs().any(|a| a == (i, j)) as u64;
    let p = |i: usize, j: usize| net.patent_edges().any(|e| e == (i.min(j), i.max(j))) as u64;
    let mut z = 0;
    for a in 0..n {
        for b in 0..n {
            if a == b {
                continue;
            }
            z += match kind {
                ConfigKind::ChoiceTrans => t(a, b),
                ConfigKind::ChoicePatent => (a < b) as u64 * p(a, b),
                ConfigKind::Multiplicity => t(a, b) * p(a, b),
                ConfigKind::Reciprocity => (a < b) as u64 * t(a, b) * t(b, a),
                ConfigKind::MultiReciprocity => (a < b) as u64 * t(a, b) * t(b, a) * p(a, b),
                ConfigKind::Transitivity => (0..n)
                    .filter(|&c| c != a && c > b)
                    .map(|c| t(a, b) * t(a, c) * p(b, c))
                    .sum(),
            };
        }
    }
    z
}

fn recount_difference(net: &MultiLayerNetwork, slot: LinkSlot, kind: ConfigKind) -> u64 {
    let mut plus = net.clone();
    slot.assign(&mut plus, true).unwrap();
    let mut minus = net.clone();
    slot.assign(&mut minus, false).unwrap();
    brute_count(&plus, kind) - brute_count(&minus, kind)
}

#[test]
fn empty_network_counts() {
    let net = MultiLayerNetwork::new(5);
    for k in ConfigKind::ALL {
        assert_eq!(count_statistic(&net, k), 0);
    }
}

#[test]
fn dyad_counts_by_hand() {
    let net = MultiLayerNetwork::from_links(2, [(0, 1), (1, 0)], [(0, 1)]).unwrap();
    assert_eq!(count_statistic(&net, ConfigKind::Reciprocity), 1);
    assert_eq!(count_statistic(&net, ConfigKind::Multiplicity), 2);
    assert_eq!(count_statistic(&net, ConfigKind::MultiReciprocity), 1);
}

#[test]
fn triad_counts_by_hand() {
    let net = MultiLayerNetwork::from_links(3, [(0, 1), (0, 2)], [(1, 2)]).unwrap();
    assert_eq!(count_statistic(&net, ConfigKind::Transitivity), 1);
    assert_eq!(count_statistic(&net, ConfigKind::Multiplicity), 0);
}

#[test]
fn simple_change_statistics() {
    let net = random_net(8, 0.3, 0.3, 1);
    for slot in slot_universe(8).filter(|s| s.layer == Layer::Transaction) {
        assert_eq!(change_statistic(&net, slot, ConfigKind::ChoiceTrans), 1);
    }
    let mut net = MultiLayerNetwork::new(3);
    let slot = LinkSlot::transaction(0, 1);
    assert_eq!(change_statistic(&net, slot, ConfigKind::Reciprocity), 0);
    net.add_arc(1, 0).unwrap();
    assert_eq!(change_statistic(&net, slot, ConfigKind::Reciprocity), 1);
}

#[test]
fn change_statistics_match_full_recount() {
    for seed in 0..20 {
        let n = 6 + (seed as usize % 15);
        let net = random_net(n, 0.25, 0.2, 100 + seed);
        for slot in slot_universe(n) {
            for kind in ConfigKind::ALL {
                assert_eq!(
                    change_statistic(&net, slot, kind),
                    recount_difference(&net, slot, kind),
                    "seed {seed} slot {slot:?} kind {kind:?}"
                );
            }
        }
    }
}

#[test]
fn counts_match_brute_force() {
    for seed in 0..10 {
        let net = random_net(15, 0.2, 0.2, seed);
        for kind in ConfigKind::ALL {
            assert_eq!(count_statistic(&net, kind), brute_count(&net, kind));
        }
    }
}

#[test]
fn counts_invariant_under_relabeling() {
    use rand::seq::SliceRandom;
    let mut rng = seeded_rng(7);
    for seed in 0..10 {
        let n = 18;
        let net = random_net(n, 0.2, 0.2, 50 + seed);
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let relabeled = MultiLayerNetwork::from_links(
            n,
            net.arcs().map(|(i, j)| (perm[i], perm[j])),
            net.patent_edges().map(|(i, j)| (perm[i], perm[j])),
        )
        .unwrap();
        for kind in ConfigKind::ALL {
            assert_eq!(count_statistic(&net, kind), count_statistic(&relabeled, kind));
        }
    }
}

#[test]
fn design_shapes() {
    let d = build_design(&MultiLayerNetwork::new(2), &[]);
    assert_eq!(d.rows(), 3);
    assert_eq!(d.kinds, vec![ConfigKind::ChoiceTrans, ConfigKind::ChoicePatent]);

    let d = build_design(&MultiLayerNetwork::new(10), &[ConfigKind::Transitivity]);
    assert_eq!(d.rows(), slot_count(10));
    assert!(d.design.responses().iter().all(|&r| r == 0));
}

#[test]
fn design_rows_match_recount() {
    let net = random_net(30, 0.08, 0.08, 9);
    let d = build_design(&net, &ConfigKind::ALL);
    assert_eq!(d.rows(), 30 * 29 + 30 * 29 / 2);
    // spot-check every 7th row against the dense oracle
    for (r, slot) in slot_universe(30).enumerate().step_by(7) {
        let (x, y) = d.design.row(r);
        assert_eq!(y, slot.is_set(&net) as u8);
        for (c, &kind) in d.kinds.iter().enumerate() {
            assert_eq!(x[c] as u64, recount_difference(&net, slot, kind));
        }
    }
}

#[test]
fn augmented_models_never_worsen_deviance() {
    for seed in 0..6 {
        let net = random_net(25, 0.1, 0.08, 300 + seed);
        let design = build_design(&net, &ConfigKind::ALL);
        let choice = design.fit(&Model::Choice.kinds()).unwrap();
        assert!(choice.converged());
        assert!(choice.max_gradient < 1e-8);
        for m in &Model::ALL[1..] {
            let fit = design.fit(&m.kinds()).unwrap();
            assert!(fit.g2pl <= choice.g2pl + 1e-6, "{m:?}");
        }
    }
}

#[test]
fn thresholds() {
    assert!((deviance_threshold(72, 2, 0.001).unwrap() - 8.9).abs() < 0.05);
    assert!((deviance_threshold(355, 2, 0.001).unwrap() - 218.4).abs() < 0.05);
    assert!((deviance_threshold(17, 2, 0.001).unwrap() - 0.47).abs() < 0.01);
    let base = deviance_threshold(50, 2, 0.001).unwrap();
    assert!(deviance_threshold(51, 2, 0.001).unwrap() > base);
    assert!(deviance_threshold(50, 3, 0.001).unwrap() > base);
    assert!(deviance_threshold(50, 2, 0.002).unwrap() > base);
    assert!(deviance_threshold(1, 2, 0.001).is_err());
    assert!(deviance_threshold(5, 0, 0.001).is_err());
    assert!(deviance_threshold(5, 2, 1.0).is_err());
}

#[test]
fn small_networks_are_rejected() {
    assert!(matches!(
        significance_report(&MultiLayerNetwork::new(9), "x"),
        Err(Error::TooSmall { n: 9, min: 10 })
    ));
}

#[test]
fn report_stars_follow_threshold() {
    let net = random_net(30, 0.1, 0.1, 77);
    let rep = significance_report(&net, "test").unwrap();
    assert_eq!(rep.models.len(), 5);
    assert!(!rep.significant(Model::Choice));
    for m in Model::ALL {
        let drop = rep.g2pl(Model::Choice) - rep.g2pl(m);
        assert_eq!(rep.significant(m), m != Model::Choice && drop > rep.alpha_threshold);
    }
}
