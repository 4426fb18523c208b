//! Synthetic inputs written in the same formats the analysis commands read.

use std::path::Path;

use anyhow::{bail, Result};
use clap::{Args, Subcommand};
use firmnet::bayesnet::write_records;
use firmnet::ergm::ConfigKind;
use firmnet::ingest::{INDUSTRY_HEADER, PATENT_HEADER, TRANSACTION_HEADER};
use firmnet::iotables::build_transaction_matrix;
use firmnet::synthgen::{demo_bn, forward_sample_bn, gibbs_sample_ergm, label_industries, sample_power_law, DEFAULT_SWEEPS};
use firmnet::{seeded_rng, IndustryCode, MultiLayerNetwork};
use rand::Rng;
use rayon::prelude::*;

use crate::load::{write_with, Tsv};
use crate::Common;

#[derive(Subcommand)]
pub enum SynthCommand {
    /// Power-law degree sequence, optionally with uniform values below x_min mixed in.
    Powerlaw(PowerlawArgs),
    /// One industry network drawn from the link-configuration model by Gibbs sampling.
    Ergm(ErgmArgs),
    /// Pair records from the demo Bayesian network.
    Bn(BnArgs),
    /// Multi-industry demo network with a money table, for the end-to-end pipeline.
    Network(NetworkArgs),
}

impl SynthCommand {
    pub fn common(&self) -> &Common {
        match self {
            SynthCommand::Powerlaw(a) => &a.common,
            SynthCommand::Ergm(a) => &a.common,
            SynthCommand::Bn(a) => &a.common,
            SynthCommand::Network(a) => &a.common,
        }
    }
}

pub fn run(cmd: SynthCommand) -> Result<()> {
    match cmd {
        SynthCommand::Powerlaw(a) => powerlaw(a),
        SynthCommand::Ergm(a) => ergm(a),
        SynthCommand::Bn(a) => bn(a),
        SynthCommand::Network(a) => network(a),
    }
}

#[derive(Args)]
pub struct PowerlawArgs {
    #[arg(long, default_value_t = 10_000)]
    pub count: usize,
    #[arg(long, default_value_t = 2.5)]
    pub alpha: f64,
    #[arg(long, default_value_t = 5)]
    pub xmin: u64,
    /// Extra draws uniform on 1..xmin-1.
    #[arg(long, default_value_t = 0)]
    pub noise: usize,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub common: Common,
}

fn powerlaw(a: PowerlawArgs) -> Result<()> {
    if a.noise > 0 && a.xmin < 2 {
        bail!("--noise needs --xmin of at least 2");
    }
    let mut draws = sample_power_law(a.count, a.alpha, a.xmin, a.seed)?;
    let mut rng = seeded_rng(a.seed ^ 0x5eed);
    draws.extend((0..a.noise).map(|_| rng.random_range(1..a.xmin)));
    let text: String = draws.iter().map(|d| format!("{d}\n")).collect();
    std::fs::write(a.common.out.join("degrees.txt"), text)?;
    eprintln!("wrote {} values", draws.len());
    Ok(())
}

#[derive(Args)]
pub struct ErgmArgs {
    #[arg(long, default_value_t = 100)]
    pub nodes: usize,
    #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
    pub choice_trans: f64,
    #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
    pub choice_patent: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub multiplicity: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub reciprocity: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub multi_reciprocity: f64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub transitivity: f64,
    #[arg(long, default_value_t = DEFAULT_SWEEPS)]
    pub sweeps: usize,
    /// Industry code given to every firm.
    #[arg(long, default_value = "13")]
    pub industry: IndustryCode,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub common: Common,
}

fn ergm(a: ErgmArgs) -> Result<()> {
    let lambdas = [
        a.choice_trans,
        a.choice_patent,
        a.multiplicity,
        a.reciprocity,
        a.multi_reciprocity,
        a.transitivity,
    ];
    let mut net = gibbs_sample_ergm(a.nodes, &ConfigKind::ALL, &lambdas, a.sweeps, a.seed)?;
    for v in 0..net.n() {
        net.set_industry(v, Some(a.industry))?;
    }
    write_network(&a.common.out, &net)?;
    eprintln!("{} nodes, {} arcs, {} patent edges", net.n(), net.arc_count(), net.patent_edge_count());
    Ok(())
}

#[derive(Args)]
pub struct BnArgs {
    #[arg(long, default_value_t = 20_000)]
    pub count: usize,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub common: Common,
}

fn bn(a: BnArgs) -> Result<()> {
    let (dag, cpts) = demo_bn();
    let recs = forward_sample_bn(&dag, &cpts, a.count, a.seed)?;
    write_with(&a.common.out, "records.tsv", |w| write_records(w, &recs))?;
    eprintln!("generating structure: {dag}");
    Ok(())
}

#[derive(Args)]
pub struct NetworkArgs {
    #[arg(long, default_value_t = 2000)]
    pub firms: usize,
    #[arg(long, default_value_t = 50)]
    pub sweeps: usize,
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub common: Common,
}

/// Within-industry parameters of the demo: sparse layers, links attract
/// each other across layers, and transactions tend to be reciprocated.
const DEMO_LAMBDAS: [f64; 6] = [-3.0, -3.5, 2.0, 1.0, 0.0, 0.0];

fn network(a: NetworkArgs) -> Result<()> {
    if a.firms == 0 {
        bail!("--firms must be positive");
    }
    let mut labels = MultiLayerNetwork::new(a.firms);
    label_industries(&mut labels, a.seed)?;
    let members: Vec<(IndustryCode, Vec<usize>)> = IndustryCode::all()
        .map(|c| (c, (0..a.firms).filter(|&v| labels.industry(v) == Some(c)).collect()))
        .collect();
    let blocks: Vec<MultiLayerNetwork> = members
        .par_iter()
        .map(|(c, ids)| {
            let seed = a.seed.wrapping_mul(1_000_003).wrapping_add(c.get() as u64);
            gibbs_sample_ergm(ids.len(), &ConfigKind::ALL, &DEMO_LAMBDAS, a.sweeps, seed)
        })
        .collect::<firmnet::Result<_>>()?;

    let mut net = labels;
    for ((_, ids), block) in members.iter().zip(&blocks) {
        for (i, j) in block.arcs() {
            net.add_arc(ids[i], ids[j])?;
        }
        for (i, j) in block.patent_edges() {
            net.add_patent_edge(ids[i], ids[j])?;
        }
    }
    let mut rng = seeded_rng(a.seed ^ 0xc0ffee);
    let within = net.arc_count();
    for _ in 0..within / 10 {
        let (i, j) = (rng.random_range(0..a.firms), rng.random_range(0..a.firms));
        if net.industry(i) != net.industry(j) {
            net.add_arc(i, j)?;
            if rng.random::<f64>() < 0.2 {
                net.add_patent_edge(i, j)?;
            }
        }
    }
    write_network(&a.common.out, &net)?;

    // money grows with transaction counts, with noise and a small base flow
    let counts = build_transaction_matrix(&net).matrix;
    let mut text = String::new();
    for r in IndustryCode::all() {
        let row: Vec<String> = IndustryCode::all()
            .map(|c| {
                let v = counts.get(r, c) * rng.random_range(0.5..2.0) + rng.random_range(0.0..1.0);
                format!("{v:.3}")
            })
            .collect();
        text.push_str(&row.join(","));
        text.push('\n');
    }
    std::fs::write(a.common.out.join("money.csv"), text)?;
    eprintln!("{} firms, {} arcs, {} patent edges", net.n(), net.arc_count(), net.patent_edge_count());
    Ok(())
}

fn firm_name(v: usize) -> String {
    format!("Firm {v:05} Co., Ltd.")
}

fn firm_addr(v: usize) -> String {
    format!("{} Chome, Demo City", v + 1)
}

/// Writes `transactions.tsv`, `patents.tsv` (one two-applicant patent per
/// edge) and `industries.tsv`.
pub fn write_network(out: &Path, net: &MultiLayerNetwork) -> Result<()> {
    let cols = |h: &str| h.split('\t').map(str::to_string).collect::<Vec<_>>();
    let mut t = Tsv::create(out, "transactions.tsv", &cols(TRANSACTION_HEADER))?;
    for (i, j) in net.arcs() {
        t.row(&[firm_name(i), firm_addr(i), firm_name(j), firm_addr(j)])?;
    }
    t.finish()?;
    let mut p = Tsv::create(out, "patents.tsv", &cols(PATENT_HEADER))?;
    for (k, (i, j)) in net.patent_edges().enumerate() {
        let id = format!("P{:07}", k + 1);
        p.row(&[id.clone(), firm_name(i), firm_addr(i)])?;
        p.row(&[id, firm_name(j), firm_addr(j)])?;
    }
    p.finish()?;
    let mut m = Tsv::create(out, "industries.tsv", &cols(INDUSTRY_HEADER))?;
    for v in 0..net.n() {
        if let Some(c) = net.industry(v) {
            m.row(&[firm_name(v), firm_addr(v), c.get().to_string()])?;
        }
    }
    m.finish()?;
    Ok(())
}
