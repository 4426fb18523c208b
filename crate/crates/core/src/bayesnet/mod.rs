//! Four-variable Bayesian network over sampled firm pairs: pair sampling,
//! record construction, BDeu scoring, exhaustive structure search and
//! conditional G-tests.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;
use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::gamma::ln_gamma;

use crate::{seeded_rng, Error, FirmId, IndustryCode, MultiLayerNetwork, Result, INDUSTRY_COUNT};


pub const DEFAULT_ESS: f64 = 4.0;
/// Consecutive fruitless rounds after which pair sampling gives up.
pub const STALL_ROUNDS: usize = 10_000;
/// Number of DAGs on four labeled nodes.
pub const DAG_COUNT: usize = 543;
pub const RECORD_HEADER: &str = "ind_a\tind_b\ttrans\tpatent";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Variable {
    IndustryA = 0,
    IndustryB = 1,
    TransactionLink = 2,
    PatentLink = 3,
}

impl Variable {
    pub const ALL: [Variable; 4] = [
        Variable::IndustryA,
        Variable::IndustryB,
        Variable::TransactionLink,
        Variable::PatentLink,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Variable {
        Self::ALL[i]
    }

    pub fn cardinality(self) -> usize {
        match self {
            Variable::IndustryA | Variable::IndustryB => INDUSTRY_COUNT,
            Variable::TransactionLink | Variable::PatentLink => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Variable::IndustryA => "industry_a",
            Variable::IndustryB => "industry_b",
            Variable::TransactionLink => "trans",
            Variable::PatentLink => "patent",
        }
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::Value(format!("unknown variable {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PairRecord {
    pub industry_a: IndustryCode,
    pub industry_b: IndustryCode,
    pub transaction_link: bool,
    pub patent_link: bool,
}

impl PairRecord {
    /// Zero-based state of one variable.
    pub fn state(&self, v: Variable) -> usize {
        match v {
            Variable::IndustryA => self.industry_a.index(),
            Variable::IndustryB => self.industry_b.index(),
            Variable::TransactionLink => self.transaction_link as usize,
            Variable::PatentLink => self.patent_link as usize,
        }
    }

    pub fn from_states(states: [usize; 4]) -> Result<Self> {
        let flag = |s: usize| match s {
            0 => Ok(false),
            1 => Ok(true),
            _ => Err(Error::Value(format!("binary state {s} out of range"))),
        };
        Ok(PairRecord {
            industry_a: IndustryCode::from_index(states[0])?,
            industry_b: IndustryCode::from_index(states[1])?,
            transaction_link: flag(states[2])?,
            patent_link: flag(states[3])?,
        })
    }
}

/// DAG over [`Variable::ALL`], stored as one parent bitmask per node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Dag4 {
    parents: [u8; 4],
}

impl Dag4 {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn from_edges(edges: &[(Variable, Variable)]) -> Result<Self> {
        let mut parents = [0u8; 4];
        for &(from, to) in edges {
            if from == to {
                return Err(Error::Domain(format!("self edge on {from}")));
            }
            parents[to.index()] |= 1 << from.index();
        }
        Self::from_parent_masks(parents)
    }

    pub fn from_parent_masks(parents: [u8; 4]) -> Result<Self> {
        let dag = Dag4 { parents };
        if parents.iter().enumerate().any(|(v, &m)| m >= 16 || m & (1 << v) != 0) {
            return Err(Error::Domain(format!("bad parent masks {parents:?}")));
        }
        if dag.topological_order().is_none() {
            return Err(Error::Domain(format!("cycle in {dag}")));
        }
        Ok(dag)
    }

    pub fn parent_mask(&self, v: Variable) -> u8 {
        self.parents[v.index()]
    }

    pub fn parents(&self, v: Variable) -> Vec<Variable> {
        mask_members(self.parents[v.index()])
    }

    pub fn has_edge(&self, from: Variable, to: Variable) -> bool {
        self.parents[to.index()] & (1 << from.index()) != 0
    }

    pub fn edges(&self) -> Vec<(Variable, Variable)> {
        let mut out = Vec::new();
        for to in Variable::ALL {
            for from in self.parents(to) {
                out.push((from, to));
            }
        }
        out.sort();
        out
    }

    pub fn edge_count(&self) -> usize {
        self.parents.iter().map(|m| m.count_ones() as usize).sum()
    }

    /// Kahn order, `None` if the graph has a cycle.
    pub fn topological_order(&self) -> Option<Vec<Variable>> {
        let mut placed = 0u8;
        let mut order = Vec::with_capacity(4);
        while order.len() < 4 {
            let next = (0..4).find(|&v| placed & (1 << v) == 0 && self.parents[v] & !placed == 0)?;
            placed |= 1 << next;
            order.push(Variable::from_index(next));
        }
        Some(order)
    }

    fn adjacent(&self, a: usize, b: usize) -> bool {
        (self.parents[a] >> b) & 1 == 1 || (self.parents[b] >> a) & 1 == 1
    }

    /// Unshielded colliders `a -> c <- b`, with `a < b`.
    pub fn v_structures(&self) -> Vec<(Variable, Variable, Variable)> {
        let mut out = Vec::new();
        for c in 0..4 {
            let ps = mask_members(self.parents[c]);
            for (x, &a) in ps.iter().enumerate() {
                for &b in &ps[x + 1..] {
                    if !self.adjacent(a.index(), b.index()) {
                        out.push((a, b, Variable::from_index(c)));
                    }
                }
            }
        }
        out.sort();
        out
    }

    pub fn skeleton(&self) -> Vec<(Variable, Variable)> {
        let mut out: Vec<_> = self
            .edges()
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        out.sort();
        out
    }

    pub fn markov_equivalent(&self, other: &Dag4) -> bool {
        self.skeleton() == other.skeleton() && self.v_structures() == other.v_structures()
    }
}

impl fmt::Display for Dag4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let edges = self.edges();
        if edges.is_empty() {
            return f.write_str("(empty)");
        }
        for (k, (a, b)) in edges.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{a}->{b}")?;
        }
        Ok(())
    }
}

fn mask_members(mask: u8) -> Vec<Variable> {
    (0..4).filter(|v| mask & (1 << v) != 0).map(Variable::from_index).collect()
}

/// Every DAG on the four variables, in a fixed order (empty graph first).
pub fn all_dags() -> Vec<Dag4> {
    const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    let mut out = Vec::with_capacity(DAG_COUNT);
    for code in 0..3usize.pow(6) {
        let mut parents = [0u8; 4];
        let mut c = code;
        for &(a, b) in &PAIRS {
            match c % 3 {
                1 => parents[b] |= 1 << a,
                2 => parents[a] |= 1 << b,
                _ => {}
            }
            c /= 3;
        }
        if let Ok(d) = Dag4::from_parent_masks(parents) {
            out.push(d);
        }
    }
    out
}

/// Number of parent configurations and the mixed-radix index of one record's
/// configuration. Parents are taken in ascending variable order, the first
/// being the most significant digit.
pub fn parent_config_count(parents: u8) -> usize {
    mask_members(parents).iter().map(|p| p.cardinality()).product()
}

pub fn parent_config(parents: u8, states: impl Fn(Variable) -> usize) -> usize {
    mask_members(parents)
        .into_iter()
        .fold(0, |acc, p| acc * p.cardinality() + states(p))
}

/// Unordered firm pairs from repeated neighbourhood rounds: pick a start node
/// uniformly, take it together with its one-step neighbours in both layers,
/// and add every pair among them. Rounds are whole, so the output can exceed
/// `target`. Pairs are `(min, max)` in first-seen order.
pub fn sample_pairs(net: &MultiLayerNetwork, target: usize, seed: u64) -> Result<Vec<(FirmId, FirmId)>> {
    if net.n() == 0 {
        return Err(Error::EmptyNetwork);
    }
    let mut rng = seeded_rng(seed);
    let mut seen = HashSet::new();
    let mut pairs = Vec::new();
    let mut idle = 0;
    while pairs.len() < target {
        let start = rng.random_range(0..net.n());
        let mut chosen: Vec<FirmId> = net
            .out_neighbors(start)
            .iter()
            .chain(net.in_neighbors(start))
            .chain(net.patent_adj(start))
            .copied()
            .chain([start])
            .collect();
        chosen.sort_unstable();
        chosen.dedup();
        let before = pairs.len();
        for (x, &a) in chosen.iter().enumerate() {
            for &b in &chosen[x + 1..] {
                if seen.insert((a, b)) {
                    pairs.push((a, b));
                }
            }
        }
        if pairs.len() == before {
            idle += 1;
            if idle >= STALL_ROUNDS {
                return Err(Error::Stalled { collected: pairs.len(), target });
            }
        } else {
            idle = 0;
        }
    }
    Ok(pairs)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuiltRecords {
    pub records: Vec<PairRecord>,
    /// Pairs skipped because an endpoint has no industry label.
    pub unlabeled: usize,
}

/// Orients each pair and reads off its four variables. When exactly one
/// transaction direction exists its source is A; otherwise the smaller id is A.
pub fn build_records(pairs: &[(FirmId, FirmId)], net: &MultiLayerNetwork) -> Result<BuiltRecords> {
    let mut records = Vec::with_capacity(pairs.len());
    let mut unlabeled = 0;
    for &(x, y) in pairs {
        for v in [x, y] {
            if v >= net.n() {
                return Err(Error::UnknownNode { id: v, n: net.n() });
            }
        }
        let (a, b) = match (net.has_arc(x, y), net.has_arc(y, x)) {
            (true, false) => (x, y),
            (false, true) => (y, x),
            _ => (x.min(y), x.max(y)),
        };
        let (Some(ia), Some(ib)) = (net.industry(a), net.industry(b)) else {
            unlabeled += 1;
            continue;
        };
        records.push(PairRecord {
            industry_a: ia,
            industry_b: ib,
            transaction_link: net.has_arc(a, b),
            patent_link: net.has_patent_edge(a, b),
        });
    }
    Ok(BuiltRecords { records, unlabeled })
}

/// Log BDeu marginal likelihood of one node given a parent set.
pub fn family_score(records: &[PairRecord], node: Variable, parents: u8, ess: f64) -> Result<f64> {
    if !(ess > 0.0 && ess.is_finite()) {
        return Err(Error::Domain(format!("ess must be positive, got {ess}")));
    }
    if parents & (1 << node.index()) != 0 {
        return Err(Error::Domain(format!("{node} cannot be its own parent")));
    }
    let r = node.cardinality();
    let q = parent_config_count(parents);
    let mut counts = vec![0u32; q * r];
    for rec in records {
        let j = parent_config(parents, |p| rec.state(p));
        counts[j * r + rec.state(node)] += 1;
    }
    let a_jk = ess / (r * q) as f64;
    let a_j = ess / q as f64;
    let (lg_a_jk, lg_a_j) = (ln_gamma(a_jk), ln_gamma(a_j));
    let mut score = 0.0;
    for row in counts.chunks(r) {
        let n_j: u32 = row.iter().sum();
        if n_j == 0 {
            continue;
        }
        score += lg_a_j - ln_gamma(a_j + n_j as f64);
        for &n_jk in row.iter().filter(|&&c| c > 0) {
            score += ln_gamma(a_jk + n_jk as f64) - lg_a_jk;
        }
    }
    Ok(score)
}

pub fn bde_score(records: &[PairRecord], dag: &Dag4, ess: f64) -> Result<f64> {
    if records.is_empty() {
        return Err(Error::InsufficientData("no records".into()));
    }
    Variable::ALL
        .iter()
        .map(|&v| family_score(records, v, dag.parent_mask(v), ess))
        .sum()
}

#[derive(Debug, Clone)]
pub struct StructureResult {
    pub best_dag: Dag4,
    pub best_score: f64,
    /// All [`DAG_COUNT`] candidates in [`all_dags`] order.
    pub score_table: Vec<(Dag4, f64)>,
    /// Candidates whose score ties the best.
    pub equivalence_class: Vec<Dag4>,
}

/// Score ties are judged relative to the magnitude of the best score, since
/// the log-gamma sums carry rounding proportional to it.
pub const TIE_TOLERANCE: f64 = 1e-9;

fn tie_tolerance(best: f64) -> f64 {
    TIE_TOLERANCE * best.abs().max(1.0)
}

pub fn learn_structure(records: &[PairRecord], ess: f64) -> Result<StructureResult> {
    if records.is_empty() {
        return Err(Error::InsufficientData("no records".into()));
    }
    let families: Vec<(usize, u8)> = (0..4)
        .flat_map(|v| (0..16u8).filter(move |m| m & (1 << v) == 0).map(move |m| (v, m)))
        .collect();
    let scored: Vec<f64> = families
        .par_iter()
        .map(|&(v, m)| family_score(records, Variable::from_index(v), m, ess))
        .collect::<Result<_>>()?;
    let memo: BTreeMap<(usize, u8), f64> = families.into_iter().zip(scored).collect();

    let score_table: Vec<(Dag4, f64)> = all_dags()
        .into_iter()
        .map(|d| {
            let s = (0..4).map(|v| memo[&(v, d.parents[v])]).sum();
            (d, s)
        })
        .collect();
    let best_score = score_table.iter().map(|&(_, s)| s).fold(f64::NEG_INFINITY, f64::max);
    let tol = tie_tolerance(best_score);
    let equivalence_class: Vec<Dag4> = score_table
        .iter()
        .filter(|&&(_, s)| best_score - s <= tol)
        .map(|&(d, _)| d)
        .collect();
    Ok(StructureResult {
        best_dag: equivalence_class[0],
        best_score,
        score_table,
        equivalence_class,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CiResult {
    pub g: f64,
    pub df: usize,
    pub p_value: f64,
    /// Conditioning strata that carried at least one degree of freedom.
    pub strata: usize,
}

/// Likelihood-ratio test of `x ⊥ y | given`. Each non-empty stratum
/// contributes `(rows seen - 1)(columns seen - 1)` degrees of freedom.
pub fn ci_test(records: &[PairRecord], x: Variable, y: Variable, given: &[Variable]) -> Result<CiResult> {
    if records.is_empty() {
        return Err(Error::InsufficientData("no records".into()));
    }
    if x == y || given.contains(&x) || given.contains(&y) {
        return Err(Error::Domain("test variables must be distinct from each other and the conditioning set".into()));
    }
    let mask = given.iter().fold(0u8, |m, v| m | 1 << v.index());
    let (rx, ry) = (x.cardinality(), y.cardinality());
    let mut strata: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    for rec in records {
        let z = parent_config(mask, |p| rec.state(p));
        strata.entry(z).or_insert_with(|| vec![0; rx * ry])[rec.state(x) * ry + rec.state(y)] += 1;
    }

    let mut g = 0.0;
    let mut df = 0;
    let mut used = 0;
    for table in strata.values() {
        let rows: Vec<f64> = table.chunks(ry).map(|r| r.iter().sum::<u32>() as f64).collect();
        let cols: Vec<f64> = (0..ry)
            .map(|c| (0..rx).map(|r| table[r * ry + c]).sum::<u32>() as f64)
            .collect();
        let n: f64 = rows.iter().sum();
        let nr = rows.iter().filter(|&&v| v > 0.0).count();
        let nc = cols.iter().filter(|&&v| v > 0.0).count();
        if nr < 2 || nc < 2 {
            continue;
        }
        df += (nr - 1) * (nc - 1);
        used += 1;
        for (i, &row) in rows.iter().enumerate() {
            for (j, &col) in cols.iter().enumerate() {
                let o = table[i * ry + j] as f64;
                if o > 0.0 {
                    g += 2.0 * o * (o * n / (row * col)).ln();
                }
            }
        }
    }
    if df == 0 {
        return Err(Error::InsufficientData(format!(
            "every stratum of {x} vs {y} is degenerate"
        )));
    }
    let g = g.max(0.0);
    let dist = ChiSquared::new(df as f64).map_err(|e| Error::Domain(e.to_string()))?;
    Ok(CiResult { g, df, p_value: dist.sf(g), strata: used })
}

pub fn write_records<W: Write>(mut w: W, records: &[PairRecord]) -> Result<()> {
    writeln!(w, "{RECORD_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{}\t{}\t{}\t{}",
            r.industry_a.get(),
            r.industry_b.get(),
            r.transaction_link as u8,
            r.patent_link as u8
        )?;
    }
    Ok(())
}

pub fn read_records<R: BufRead>(r: R) -> Result<Vec<PairRecord>> {
    let mut out = Vec::new();
    let mut lines = r.lines().enumerate();
    let header = lines.next().map(|(_, h)| h).transpose()?;
    if header.as_deref().map(str::trim_end) != Some(RECORD_HEADER) {
        return Err(Error::Parse { line: 1, msg: format!("expected header {RECORD_HEADER:?}") });
    }
    for (i, line) in lines {
        let line = line?;
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let bad = |msg: String| Error::Parse { line: lineno, msg };
        let fields: Vec<&str> = line.trim_end_matches(['\r', '\n']).split('\t').collect();
        if fields.len() != 4 {
            return Err(bad(format!("expected 4 fields, found {}", fields.len())));
        }
        let code = |s: &str| s.trim().parse::<IndustryCode>().map_err(|e| bad(e.to_string()));
        let flag = |s: &str| match s.trim() {
            "0" => Ok(false),
            "1" => Ok(true),
            other => Err(bad(format!("expected 0 or 1, found {other:?}"))),
        };
        out.push(PairRecord {
            industry_a: code(fields[0])?,
            industry_b: code(fields[1])?,
            transaction_link: flag(fields[2])?,
            patent_link: flag(fields[3])?,
        });
    }
    Ok(out)
}
