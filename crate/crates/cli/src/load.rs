//! File loading with diagnostics that name the file and line, and TSV output.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context, Result};
use clap::Args;
use firmnet::ingest::{self, EntityKey, FirmFilter, Merged};
use firmnet::{Error, IndustryCode};

/// Source files for the merged network.
#[derive(Args, Clone)]
pub struct NetworkArgs {
    /// Transaction TSV: src_name, src_addr, dst_name, dst_addr.
    #[arg(long)]
    pub trans: PathBuf,
    /// Patent TSV: patent_id, applicant_name, applicant_addr.
    #[arg(long)]
    pub patents: PathBuf,
    /// Corporate-status tokens, one per line; applicants whose name contains
    /// none of them are dropped. Without this file every applicant is kept.
    #[arg(long)]
    pub corp_tokens: Option<PathBuf>,
}

pub fn read_file<T>(path: &Path, parse: impl FnOnce(BufReader<File>) -> firmnet::Result<T>) -> Result<T> {
    let file = File::open(path).with_context(|| format!("{}: cannot open", path.display()))?;
    parse(BufReader::new(file)).map_err(|e| located(path, e))
}

pub fn located(path: &Path, e: Error) -> anyhow::Error {
    match e {
        Error::Parse { line, msg } => anyhow!("{}:{line}: {msg}", path.display()),
        other => anyhow!("{}: {other}", path.display()),
    }
}

pub fn load_network(args: &NetworkArgs, industries: Option<&Path>) -> Result<Merged> {
    let filter = match &args.corp_tokens {
        Some(p) => read_file(p, FirmFilter::from_reader)?,
        None => FirmFilter::AcceptAll,
    };
    let trans = read_file(&args.trans, ingest::parse_transactions)?;
    let patents = read_file(&args.patents, ingest::parse_patents)?;
    let mut merged = ingest::merge(&trans, &patents, &filter);
    if let Some(path) = industries {
        let map: BTreeMap<EntityKey, IndustryCode> = read_file(path, ingest::parse_industry_map)?;
        merged.apply_industries(&map);
    }
    Ok(merged)
}

/// Integers, one per line; blank lines and `#` comments are skipped.
pub fn read_integers(path: &Path) -> Result<Vec<u64>> {
    read_file(path, |r| {
        let mut out = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            out.push(t.parse().map_err(|_| Error::Parse {
                line: i + 1,
                msg: format!("{t:?} is not a non-negative integer"),
            })?);
        }
        Ok(out)
    })
}

/// Tab-separated table writer.
pub struct Tsv {
    path: PathBuf,
    w: BufWriter<File>,
}

impl Tsv {
    pub fn create<S: AsRef<str>>(dir: &Path, name: &str, header: &[S]) -> Result<Self> {
        let path = dir.join(name);
        let file = File::create(&path).with_context(|| format!("{}: cannot create", path.display()))?;
        let mut t = Tsv { path, w: BufWriter::new(file) };
        t.row(header)?;
        Ok(t)
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) -> Result<()> {
        let line = fields.iter().map(AsRef::as_ref).collect::<Vec<_>>().join("\t");
        writeln!(self.w, "{line}").with_context(|| format!("{}: write failed", self.path.display()))
    }

    pub fn finish(mut self) -> Result<PathBuf> {
        self.w.flush().with_context(|| format!("{}: write failed", self.path.display()))?;
        Ok(self.path)
    }
}

/// Writes raw bytes produced by `fill` to `dir/name`.
pub fn write_with(
    dir: &Path,
    name: &str,
    fill: impl FnOnce(&mut BufWriter<File>) -> firmnet::Result<()>,
) -> Result<PathBuf> {
    let path = dir.join(name);
    let file = File::create(&path).with_context(|| format!("{}: cannot create", path.display()))?;
    let mut w = BufWriter::new(file);
    fill(&mut w).map_err(|e| located(&path, e))?;
    w.flush().with_context(|| format!("{}: write failed", path.display()))?;
    Ok(path)
}

/// Prints a written table to stdout.
pub fn echo(path: &Path) -> Result<()> {
    let text = std::fs::read_to_string(path).with_context(|| format!("{}: cannot read", path.display()))?;
    print!("{text}");
    Ok(())
}

pub fn positive(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(format!("expected a positive integer, found {s:?}")),
    }
}
