//! Ground-truth generators: discrete power-law draws, Gibbs sampling from the
//! link-configuration model, and forward sampling of four-variable networks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bayesnet::{parent_config, parent_config_count, Dag4, PairRecord, Variable};
use crate::ergm::{change_statistic, slot_universe, ConfigKind, LinkSlot};
use crate::powerlaw::DiscretePowerLaw;
use crate::{seeded_rng, Error, IndustryCode, MultiLayerNetwork, Result, INDUSTRY_COUNT};

pub const DEFAULT_SWEEPS: usize = 200;
const CPT_TOLERANCE: f64 = 1e-9;

/// Largest value the inverse-CDF search will return.
const SEARCH_LIMIT: u64 = 1 << 62;

/// I.i.d. draws by inverting the ccdf: the draw for a uniform `u` in (0, 1]
/// is the largest `x` with `P(X >= x) >= u`.
pub fn sample_power_law(count: usize, alpha: f64, x_min: u64, seed: u64) -> Result<Vec<u64>> {
    let law = DiscretePowerLaw::new(alpha, x_min)?;
    let mut rng = seeded_rng(seed);
    (0..count)
        .map(|_| {
            let u = 1.0 - rng.random::<f64>();
            invert_ccdf(&law, u)
        })
        .collect()
}

fn invert_ccdf(law: &DiscretePowerLaw, u: f64) -> Result<u64> {
    let mut lo = law.x_min;
    let mut step = 1u64;
    // doubling: find hi with ccdf(hi) < u
    let mut hi = loop {
        let probe = lo.saturating_add(step).min(SEARCH_LIMIT);
        if law.ccdf(probe)? < u {
            break probe;
        }
        if probe == SEARCH_LIMIT {
            return Ok(SEARCH_LIMIT);
        }
        lo = probe;
        step = step.saturating_mul(2);
    };
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if law.ccdf(mid)? >= u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}

fn logistic(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// Gibbs chain on `n` nodes started from the empty network. Each sweep visits
/// every link slot once in a fresh random order and redraws it from its full
/// conditional, the logistic of `Σ λ_k Δz_k`.
pub fn gibbs_sample_ergm(
    n: usize,
    kinds: &[ConfigKind],
    lambdas: &[f64],
    sweeps: usize,
    seed: u64,
) -> Result<MultiLayerNetwork> {
    if kinds.len() != lambdas.len() {
        return Err(Error::Shape(format!(
            "{} configurations but {} parameters",
            kinds.len(),
            lambdas.len()
        )));
    }
    if sweeps == 0 {
        return Err(Error::Domain("sweeps must be at least 1".into()));
    }
    if let Some(l) = lambdas.iter().find(|l| !l.is_finite()) {
        return Err(Error::Domain(format!("parameter {l} is not finite")));
    }
    let mut rng = seeded_rng(seed);
    let mut net = MultiLayerNetwork::new(n);
    let mut slots: Vec<LinkSlot> = slot_universe(n).collect();
    for _ in 0..sweeps {
        slots.shuffle(&mut rng);
        for &slot in &slots {
            let t: f64 = kinds
                .iter()
                .zip(lambdas)
                .map(|(&k, &l)| l * change_statistic(&net, slot, k) as f64)
                .sum();
            let on = rng.random::<f64>() < logistic(t);
            slot.assign(&mut net, on)?;
        }
    }
    Ok(net)
}

/// Conditional probability tables, one per variable. `tables[v][j]` is the
/// distribution of `v` under parent configuration `j` as indexed by
/// [`parent_config`].
#[derive(Debug, Clone, PartialEq)]
pub struct Cpts {
    pub tables: [Vec<Vec<f64>>; 4],
}

impl Cpts {
    pub fn validate(&self, dag: &Dag4) -> Result<()> {
        for v in Variable::ALL {
            let table = &self.tables[v.index()];
            let q = parent_config_count(dag.parent_mask(v));
            if table.len() != q {
                return Err(Error::InvalidCpt(format!(
                    "{v}: {} parent configurations, expected {q}",
                    table.len()
                )));
            }
            for (j, row) in table.iter().enumerate() {
                if row.len() != v.cardinality() {
                    return Err(Error::InvalidCpt(format!(
                        "{v} row {j}: {} states, expected {}",
                        row.len(),
                        v.cardinality()
                    )));
                }
                if row.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
                    return Err(Error::InvalidCpt(format!("{v} row {j}: invalid probability")));
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > CPT_TOLERANCE {
                    return Err(Error::InvalidCpt(format!("{v} row {j}: sums to {sum}")));
                }
            }
        }
        Ok(())
    }
}

/// Ancestral sampling in topological order.
pub fn forward_sample_bn(dag: &Dag4, cpts: &Cpts, count: usize, seed: u64) -> Result<Vec<PairRecord>> {
    cpts.validate(dag)?;
    let order = dag.topological_order().expect("Dag4 is acyclic");
    let mut rng = seeded_rng(seed);
    (0..count)
        .map(|_| {
            let mut states = [0usize; 4];
            for &v in &order {
                let j = parent_config(dag.parent_mask(v), |p| states[p.index()]);
                states[v.index()] = draw(&cpts.tables[v.index()][j], rng.random::<f64>());
            }
            PairRecord::from_states(states)
        })
        .collect()
}

fn draw(row: &[f64], u: f64) -> usize {
    let mut acc = 0.0;
    for (k, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    // rounding left u above the running sum: last state with mass
    row.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Industry weights proportional to `1 / (k + 1)^power`: a few large
/// industries and a long tail.
fn industry_weights(power: f64) -> Vec<f64> {
    let raw: Vec<f64> = (0..INDUSTRY_COUNT).map(|k| (1.0 + k as f64).powf(-power)).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / total).collect()
}

/// Affinity of an industry for transactions, in [-1, 1].
fn affinity(k: usize) -> f64 {
    ((k * 7 % INDUSTRY_COUNT) as f64 / (INDUSTRY_COUNT - 1) as f64) * 2.0 - 1.0
}

/// Generator with structure `IndustryA -> Trans <- IndustryB`,
/// `Trans -> Patent`. The transaction probability depends on both industries
/// and the patent probability only on the transaction link.
pub fn demo_bn() -> (Dag4, Cpts) {
    use Variable::*;
    let dag = Dag4::from_edges(&[
        (IndustryA, TransactionLink),
        (IndustryB, TransactionLink),
        (TransactionLink, PatentLink),
    ])
    .expect("acyclic");
    let weights = industry_weights(2.0);
    let mut trans = Vec::with_capacity(INDUSTRY_COUNT * INDUSTRY_COUNT);
    for a in 0..INDUSTRY_COUNT {
        for b in 0..INDUSTRY_COUNT {
            let p = logistic(-0.5 + 5.0 * affinity(a) - 5.0 * affinity(b));
            trans.push(vec![1.0 - p, p]);
        }
    }
    let cpts = Cpts {
        tables: [
            vec![weights.clone()],
            vec![weights],
            trans,
            vec![vec![0.9, 0.1], vec![0.2, 0.8]],
        ],
    };
    (dag, cpts)
}

/// Gives every node of `net` an industry label with probability proportional
/// to `1 / code`.
pub fn label_industries(net: &mut MultiLayerNetwork, seed: u64) -> Result<()> {
    let weights = industry_weights(1.0);
    let mut rng = seeded_rng(seed);
    for v in 0..net.n() {
        let k = draw(&weights, rng.random::<f64>());
        net.set_industry(v, Some(IndustryCode::from_index(k)?))?;
    }
    Ok(())
}
