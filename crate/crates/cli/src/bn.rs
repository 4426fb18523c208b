//! Pair-record subcommands: bnlearn and bnci.

use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;
use firmnet::bayesnet::{
    build_records, ci_test, learn_structure, read_records, sample_pairs, write_records, PairRecord,
    Variable, DEFAULT_ESS,
};

use crate::load::{echo, load_network, read_file, write_with, NetworkArgs, Tsv};
use crate::Common;

/// Records come from a file, or are sampled from the network.
#[derive(Args)]
pub struct RecordSource {
    /// Pair-record TSV: ind_a, ind_b, trans, patent.
    #[arg(long, conflicts_with_all = ["trans", "patents", "industries", "corp_tokens"])]
    pub records: Option<PathBuf>,
    #[arg(long, required_unless_present = "records")]
    pub trans: Option<PathBuf>,
    #[arg(long, required_unless_present = "records")]
    pub patents: Option<PathBuf>,
    #[arg(long, required_unless_present = "records")]
    pub industries: Option<PathBuf>,
    #[arg(long)]
    pub corp_tokens: Option<PathBuf>,
    /// Number of distinct firm pairs to sample.
    #[arg(long, default_value_t = 10_000)]
    pub pairs: usize,
    /// Seed for pair sampling.
    #[arg(long, required_unless_present = "records")]
    pub seed: Option<u64>,
}

impl RecordSource {
    fn load(&self, common: &Common) -> Result<Vec<PairRecord>> {
        if let Some(path) = &self.records {
            let recs = read_file(path, read_records)?;
            if recs.is_empty() {
                bail!("{}: no records", path.display());
            }
            return Ok(recs);
        }
        let (Some(trans), Some(patents), Some(industries), Some(seed)) =
            (&self.trans, &self.patents, &self.industries, self.seed)
        else {
            unreachable!("clap enforces the network arguments");
        };
        let args = NetworkArgs {
            trans: trans.clone(),
            patents: patents.clone(),
            corp_tokens: self.corp_tokens.clone(),
        };
        let merged = load_network(&args, Some(industries))?;
        let pairs = sample_pairs(&merged.network, self.pairs, seed).context("pair sampling")?;
        let built = build_records(&pairs, &merged.network)?;
        eprintln!(
            "sampled {} pairs; {} skipped for unlabeled endpoints",
            pairs.len(),
            built.unlabeled
        );
        write_with(&common.out, "records.tsv", |w| write_records(w, &built.records))?;
        if built.records.is_empty() {
            bail!("no labeled pairs to analyze");
        }
        Ok(built.records)
    }
}

#[derive(Args)]
pub struct BnlearnArgs {
    #[command(flatten)]
    pub source: RecordSource,
    /// Equivalent sample size of the BDeu prior.
    #[arg(long, default_value_t = DEFAULT_ESS)]
    pub ess: f64,
    #[command(flatten)]
    pub common: Common,
}

pub fn bnlearn(a: BnlearnArgs) -> Result<()> {
    if !(a.ess > 0.0 && a.ess.is_finite()) {
        bail!("--ess must be positive, got {}", a.ess);
    }
    let recs = a.source.load(&a.common)?;
    let result = learn_structure(&recs, a.ess)?;
    let out = &a.common.out;

    let mut scores = Tsv::create(out, "bn_scores.tsv", &["dag", "edges", "score", "tied_best", "equivalent_to_best"])?;
    for (d, s) in &result.score_table {
        scores.row(&[
            d.to_string(),
            d.edge_count().to_string(),
            format!("{s:.6}"),
            yes_no(result.equivalence_class.contains(d)),
            yes_no(d.markov_equivalent(&result.best_dag)),
        ])?;
    }
    scores.finish()?;

    let mut best = Tsv::create(out, "bn_best.tsv", &["from", "to"])?;
    for (x, y) in result.best_dag.edges() {
        best.row(&[x.name(), y.name()])?;
    }
    let path = best.finish()?;
    println!("# best score {:.6}, {} tied DAGs", result.best_score, result.equivalence_class.len());
    echo(&path)
}

fn yes_no(b: bool) -> String {
    if b { "yes" } else { "no" }.to_string()
}

/// One test written as `x,y` or `x,y|z1,z2`.
#[derive(Clone, Debug)]
pub struct TestSpec {
    x: Variable,
    y: Variable,
    given: Vec<Variable>,
}

impl std::str::FromStr for TestSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (pair, given) = s.split_once('|').unwrap_or((s, ""));
        let vars = |t: &str| -> Result<Vec<Variable>, String> {
            t.split(',')
                .map(str::trim)
                .filter(|v| !v.is_empty())
                .map(|v| v.parse::<Variable>().map_err(|e| e.to_string()))
                .collect()
        };
        let xy = vars(pair)?;
        if xy.len() != 2 {
            return Err(format!("expected two test variables in {s:?}"));
        }
        Ok(TestSpec { x: xy[0], y: xy[1], given: vars(given)? })
    }
}

fn default_tests() -> Vec<TestSpec> {
    ["trans,patent", "patent,industry_a|trans", "patent,industry_b|trans", "industry_a,industry_b"]
        .iter()
        .map(|s| s.parse().expect("valid built-in test"))
        .collect()
}

#[derive(Args)]
pub struct BnciArgs {
    #[command(flatten)]
    pub source: RecordSource,
    /// Test as `x,y|given,...` over industry_a, industry_b, trans, patent. Repeatable.
    #[arg(long = "test")]
    pub tests: Vec<TestSpec>,
    /// Significance level for the reject column.
    #[arg(long, default_value_t = 0.05)]
    pub level: f64,
    #[command(flatten)]
    pub common: Common,
}

pub fn bnci(a: BnciArgs) -> Result<()> {
    let recs = a.source.load(&a.common)?;
    let tests = if a.tests.is_empty() { default_tests() } else { a.tests.clone() };
    let mut t = Tsv::create(&a.common.out, "bnci.tsv", &["x", "y", "given", "g", "df", "p_value", "reject"])?;
    for spec in &tests {
        let given = if spec.given.is_empty() {
            "-".to_string()
        } else {
            spec.given.iter().map(|v| v.name()).collect::<Vec<_>>().join(",")
        };
        let mut row = vec![spec.x.name().to_string(), spec.y.name().to_string(), given];
        match ci_test(&recs, spec.x, spec.y, &spec.given) {
            Ok(r) => row.extend([
                format!("{:.6}", r.g),
                r.df.to_string(),
                format!("{:.6e}", r.p_value),
                yes_no(r.p_value < a.level),
            ]),
            Err(firmnet::Error::InsufficientData(msg)) => {
                eprintln!("bnci: {msg}");
                row.extend(["NA", "0", "NA", "NA"].map(String::from));
            }
            Err(e) => return Err(e.into()),
        }
        t.row(&row)?;
    }
    echo(&t.finish()?)
}
