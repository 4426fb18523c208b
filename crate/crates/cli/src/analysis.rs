//! Network subcommands: ingest, plfit, iotables, subnet, ergm.

use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::Args;
use firmnet::ergm::{significance_report_with, FitOutcome, Model, DEFAULT_DELTA, MIN_NODES};
use firmnet::iotables::{
    build_patent_matrix, build_transaction_matrix, load_money_matrix, log_log_correlation,
    matrix_correlation, IndustryMatrix,
};
use firmnet::powerlaw::{fit_power_law, DiscretePowerLaw};
use firmnet::subnet::{extract_connected, split_by_industry, DEFAULT_CAP};
use firmnet::{DegreeMode, IndustryCode, Layer, MultiLayerNetwork, INDUSTRY_COUNT};
use rayon::prelude::*;

use crate::load::{echo, load_network, positive, read_file, read_integers, NetworkArgs, Tsv};
use crate::Common;

#[derive(Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub net: NetworkArgs,
    /// Industry map TSV: name, addr, industry_code.
    #[arg(long)]
    pub industries: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

pub fn ingest(a: IngestArgs) -> Result<()> {
    let merged = load_network(&a.net, a.industries.as_deref())?;
    let out = &a.common.out;
    let net = &merged.network;

    let mut nodes = Tsv::create(out, "nodes.tsv", &["id", "name", "addr", "industry"])?;
    for (id, key) in merged.registry.iter().enumerate() {
        let code = net.industry(id).map_or("-".to_string(), |c| c.to_string());
        nodes.row(&[id.to_string(), key.name().to_string(), key.address().to_string(), code])?;
    }
    nodes.finish()?;

    let mut arcs = Tsv::create(out, "arcs.tsv", &["src", "dst"])?;
    for (i, j) in net.arcs() {
        arcs.row(&[i.to_string(), j.to_string()])?;
    }
    arcs.finish()?;

    let mut edges = Tsv::create(out, "patent_edges.tsv", &["a", "b"])?;
    for (i, j) in net.patent_edges() {
        edges.row(&[i.to_string(), j.to_string()])?;
    }
    edges.finish()?;

    let series = [
        ("trans_in", Layer::Transaction, DegreeMode::In),
        ("trans_out", Layer::Transaction, DegreeMode::Out),
        ("patent", Layer::Patent, DegreeMode::Undirected),
    ];
    let mut rank = Tsv::create(out, "degree_rank.tsv", &["series", "rank", "degree"])?;
    for (name, layer, mode) in series {
        let degrees = net.degree_sequence(layer, mode)?;
        let text: String = degrees.iter().map(|d| format!("{d}\n")).collect();
        std::fs::write(out.join(format!("degrees_{name}.txt")), text)?;
        let mut positive: Vec<usize> = degrees.into_iter().filter(|&d| d > 0).collect();
        positive.sort_unstable_by(|x, y| y.cmp(x));
        for (r, d) in positive.iter().enumerate() {
            rank.row(&[name.to_string(), (r + 1).to_string(), d.to_string()])?;
        }
    }
    rank.finish()?;

    let mut report = Tsv::create(out, "ingest_report.tsv", &["item", "count"])?;
    for (item, count) in merged.report.rows() {
        report.row(&[item.to_string(), count.to_string()])?;
    }
    echo(&report.finish()?)
}

#[derive(Args)]
pub struct PlfitArgs {
    /// Degree sequence, one integer per line. Zeros are outside the support and are skipped.
    #[arg(long)]
    pub degrees: PathBuf,
    #[command(flatten)]
    pub common: Common,
}

pub fn plfit(a: PlfitArgs) -> Result<()> {
    let all = read_integers(&a.degrees)?;
    let data: Vec<u64> = all.iter().copied().filter(|&d| d > 0).collect();
    if data.len() < all.len() {
        eprintln!("plfit: skipped {} zero values", all.len() - data.len());
    }
    let fit = fit_power_law(&data).map_err(|e| crate::load::located(&a.degrees, e))?;
    let out = &a.common.out;
    let mut t = Tsv::create(out, "plfit.tsv", &["alpha", "xmin", "ks", "n_tail"])?;
    t.row(&[
        format!("{:.6}", fit.alpha),
        fit.x_min.to_string(),
        format!("{:.6}", fit.ks),
        fit.n_tail.to_string(),
    ])?;
    let path = t.finish()?;

    let law = DiscretePowerLaw::new(fit.alpha, fit.x_min)?;
    let mut tail: Vec<u64> = data.into_iter().filter(|&d| d >= fit.x_min).collect();
    tail.sort_unstable();
    let mut ccdf = Tsv::create(out, "plfit_ccdf.tsv", &["x", "empirical_ccdf", "fitted_ccdf"])?;
    let n = tail.len() as f64;
    let mut i = 0;
    while i < tail.len() {
        let x = tail[i];
        ccdf.row(&[x.to_string(), format!("{:.6e}", (tail.len() - i) as f64 / n), format!("{:.6e}", law.ccdf(x)?)])?;
        while i < tail.len() && tail[i] == x {
            i += 1;
        }
    }
    ccdf.finish()?;
    echo(&path)
}

#[derive(Args)]
pub struct IotablesArgs {
    #[command(flatten)]
    pub net: NetworkArgs,
    /// Industry map TSV: name, addr, industry_code.
    #[arg(long)]
    pub industries: PathBuf,
    /// Money table CSV: 34 rows of 34 comma-separated values.
    #[arg(long)]
    pub money: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

fn write_matrix(out: &std::path::Path, name: &str, m: &IndustryMatrix) -> Result<()> {
    let codes: Vec<String> = IndustryCode::all().map(|c| c.to_string()).collect();
    let mut header = vec!["row"];
    header.extend(codes.iter().map(String::as_str));
    let mut t = Tsv::create(out, name, &header)?;
    for r in IndustryCode::all() {
        let mut row = vec![r.to_string()];
        row.extend(IndustryCode::all().map(|c| fmt_cell(m.get(r, c))));
        t.row(&row)?;
    }
    t.finish()?;
    Ok(())
}

fn fmt_cell(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{v:.0}")
    } else {
        format!("{v}")
    }
}

pub fn iotables(a: IotablesArgs) -> Result<()> {
    let merged = load_network(&a.net, Some(&a.industries))?;
    let out = &a.common.out;
    let trans = build_transaction_matrix(&merged.network);
    let patent = build_patent_matrix(&merged.network);
    let money = match &a.money {
        Some(p) => Some(read_file(p, load_money_matrix)?),
        None => None,
    };
    write_matrix(out, "matrix_transactions.tsv", &trans.matrix)?;
    write_matrix(out, "matrix_patents.tsv", &patent.matrix)?;
    if let Some(m) = &money {
        write_matrix(out, "matrix_money.tsv", m)?;
    }
    eprintln!(
        "iotables: {} arcs and {} patent edges had an unlabeled endpoint",
        trans.unlabeled_links, patent.unlabeled_links
    );

    let mut pairs: Vec<(&str, &IndustryMatrix, &IndustryMatrix)> = Vec::new();
    if let Some(m) = &money {
        pairs.push(("money_patent", m, &patent.matrix));
    }
    pairs.push(("trans_patent", &trans.matrix, &patent.matrix));
    if let Some(m) = &money {
        pairs.push(("trans_money", &trans.matrix, m));
    }
    let mut t = Tsv::create(out, "correlations.tsv", &["pair", "pearson", "log_log_pearson"])?;
    for (name, x, y) in pairs {
        let show = |r: firmnet::Result<f64>| r.map_or("NA".to_string(), |v| format!("{v:.6}"));
        t.row(&[name.to_string(), show(matrix_correlation(x, y)), show(log_log_correlation(x, y))])?;
        let mut s = Tsv::create(out, &format!("scatter_{name}.tsv"), &["row", "col", "x", "y"])?;
        for r in IndustryCode::all() {
            for c in IndustryCode::all() {
                s.row(&[r.to_string(), c.to_string(), fmt_cell(x.get(r, c)), fmt_cell(y.get(r, c))])?;
            }
        }
        s.finish()?;
    }
    echo(&t.finish()?)
}

/// Split plus extraction for every industry, in code order.
struct Extraction {
    code: IndustryCode,
    industry: MultiLayerNetwork,
    extracted: MultiLayerNetwork,
}

fn industry_seed(seed: u64, code: IndustryCode) -> u64 {
    seed.wrapping_mul(INDUSTRY_COUNT as u64 + 1).wrapping_add(code.get() as u64)
}

fn extract_all(net: &MultiLayerNetwork, cap: usize, seed: u64, only: Option<IndustryCode>) -> Vec<Extraction> {
    let parts: Vec<(IndustryCode, MultiLayerNetwork)> = split_by_industry(net)
        .into_iter()
        .filter(|(c, _)| only.is_none_or(|o| o == *c))
        .collect();
    parts
        .into_par_iter()
        .map(|(code, industry)| {
            let extracted = extract_connected(&industry, cap, industry_seed(seed, code))
                .unwrap_or_else(|_| MultiLayerNetwork::new(0));
            Extraction { code, industry, extracted }
        })
        .collect()
}

#[derive(Args)]
pub struct SubnetArgs {
    #[command(flatten)]
    pub net: NetworkArgs,
    /// Industry map TSV: name, addr, industry_code.
    #[arg(long)]
    pub industries: PathBuf,
    /// Stop expanding once the extracted node count exceeds this.
    #[arg(long, default_value_t = DEFAULT_CAP, value_parser = positive)]
    pub cap: usize,
    /// Seed for maximum-degree tie breaking.
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub common: Common,
}

pub fn subnet(a: SubnetArgs) -> Result<()> {
    let merged = load_network(&a.net, Some(&a.industries))?;
    let parts = extract_all(&merged.network, a.cap, a.seed, None);
    let mut t = Tsv::create(
        &a.common.out,
        "subnet.tsv",
        &[
            "industry",
            "industry_nodes",
            "industry_arcs",
            "industry_patent_edges",
            "nodes",
            "arcs",
            "patent_edges",
            "analyzed",
        ],
    )?;
    for p in &parts {
        t.row(&[
            p.code.to_string(),
            p.industry.n().to_string(),
            p.industry.arc_count().to_string(),
            p.industry.patent_edge_count().to_string(),
            p.extracted.n().to_string(),
            p.extracted.arc_count().to_string(),
            p.extracted.patent_edge_count().to_string(),
            if p.extracted.n() >= MIN_NODES { "yes" } else { "no" }.to_string(),
        ])?;
    }
    echo(&t.finish()?)
}

#[derive(Args)]
pub struct ErgmArgs {
    #[command(flatten)]
    pub net: NetworkArgs,
    /// Industry map TSV: name, addr, industry_code.
    #[arg(long)]
    pub industries: PathBuf,
    /// Analyze only this industry code.
    #[arg(long)]
    pub industry: Option<IndustryCode>,
    #[arg(long, default_value_t = DEFAULT_CAP, value_parser = positive)]
    pub cap: usize,
    /// Probability level in the deviance threshold.
    #[arg(long, default_value_t = DEFAULT_DELTA)]
    pub delta: f64,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub common: Common,
}

pub const ERGM_HEADER: [&str; 8] = [
    "industry",
    "nodes",
    "alpha",
    "choice",
    "multiplicity",
    "reciprocity",
    "multi_reciprocity",
    "transitivity",
];

fn outcome_name(o: FitOutcome) -> &'static str {
    match o {
        FitOutcome::Converged => "converged",
        FitOutcome::Separation => "separation",
        FitOutcome::IterationLimit => "iteration_limit",
    }
}

pub fn ergm(a: ErgmArgs) -> Result<()> {
    if !(a.delta > 0.0 && a.delta < 1.0) {
        bail!("--delta must lie in (0, 1), got {}", a.delta);
    }
    let merged = load_network(&a.net, Some(&a.industries))?;
    let parts = extract_all(&merged.network, a.cap, a.seed, a.industry);
    let reports: Vec<_> = parts
        .par_iter()
        .map(|p| {
            if p.extracted.n() < MIN_NODES {
                None
            } else {
                Some(significance_report_with(&p.extracted, &p.code.to_string(), a.delta))
            }
        })
        .collect();

    let out = &a.common.out;
    let mut table = Tsv::create(out, "ergm.tsv", &ERGM_HEADER)?;
    let mut lambdas = Tsv::create(
        out,
        "ergm_lambdas.tsv",
        &["industry", "model", "configuration", "lambda", "outcome", "iterations"],
    )?;
    for (p, report) in parts.iter().zip(reports) {
        let mut row = vec![p.code.to_string(), p.extracted.n().to_string()];
        match report {
            None => {
                row.push(format!("skipped: fewer than {MIN_NODES} nodes"));
                row.extend(std::iter::repeat_n("-".to_string(), 5));
            }
            Some(Err(e)) => {
                row.push(format!("error: {e}"));
                row.extend(std::iter::repeat_n("-".to_string(), 5));
            }
            Some(Ok(r)) => {
                row.push(format!("{:.1}", r.alpha_threshold));
                for m in Model::ALL {
                    let star = if r.significant(m) { "*" } else { "" };
                    row.push(format!("{:.1}{star}", r.g2pl(m)));
                }
                for res in &r.models {
                    for (k, l) in res.fit.kinds.iter().zip(&res.fit.lambdas) {
                        lambdas.row(&[
                            p.code.to_string(),
                            res.model.name().to_string(),
                            k.name().to_string(),
                            l.map_or("NA".to_string(), |v| format!("{v:.6}")),
                            outcome_name(res.fit.outcome).to_string(),
                            res.fit.iterations.to_string(),
                        ])?;
                    }
                }
            }
        }
        table.row(&row)?;
    }
    lambdas.finish()?;
    echo(&table.finish()?)
}
