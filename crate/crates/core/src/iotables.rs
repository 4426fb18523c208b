//! Industry-by-industry matrices: money flows from an input-output table, and
//! transaction and joint-patent counts aggregated from the firm network.
//!
//! Rows are output (selling) industries, columns input (buying) industries.

use std::io::BufRead;

use crate::{Error, IndustryCode, MultiLayerNetwork, Result, INDUSTRY_COUNT};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Money,
    TransactionCount,
    PatentCount,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndustryMatrix {
    kind: MatrixKind,
    cells: Vec<f64>,
}

impl IndustryMatrix {
    pub fn zeros(kind: MatrixKind) -> Self {
        IndustryMatrix {
            kind,
            cells: vec![0.0; INDUSTRY_COUNT * INDUSTRY_COUNT],
        }
    }

    /// Row-major cells; must hold 34x34 non-negative values.
    pub fn from_cells(kind: MatrixKind, cells: Vec<f64>) -> Result<Self> {
        if cells.len() != INDUSTRY_COUNT * INDUSTRY_COUNT {
            return Err(Error::Shape(format!(
                "expected {} cells, got {}",
                INDUSTRY_COUNT * INDUSTRY_COUNT,
                cells.len()
            )));
        }
        if let Some(v) = cells.iter().find(|v| !v.is_finite() || **v < 0.0) {
            return Err(Error::Value(format!("cell value {v} is not a finite non-negative number")));
        }
        Ok(IndustryMatrix { kind, cells })
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn get(&self, row: IndustryCode, col: IndustryCode) -> f64 {
        self.cells[row.index() * INDUSTRY_COUNT + col.index()]
    }

    fn bump(&mut self, row: IndustryCode, col: IndustryCode) {
        self.cells[row.index() * INDUSTRY_COUNT + col.index()] += 1.0;
    }

    pub fn cells(&self) -> &[f64] {
        &self.cells
    }

    pub fn total(&self) -> f64 {
        self.cells.iter().sum()
    }

    pub fn is_symmetric(&self) -> bool {
        (0..INDUSTRY_COUNT).all(|r| {
            (0..r).all(|c| {
                self.cells[r * INDUSTRY_COUNT + c].to_bits()
                    == self.cells[c * INDUSTRY_COUNT + r].to_bits()
            })
        })
    }
}

/// Reads the 34x34 money table: one comma-separated row per industry in code
/// order, units of billions of yen. Blank lines are ignored.
pub fn load_money_matrix(reader: impl BufRead) -> Result<IndustryMatrix> {
    let mut cells = Vec::with_capacity(INDUSTRY_COUNT * INDUSTRY_COUNT);
    let mut rows = 0;
    for (idx, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        rows += 1;
        if rows > INDUSTRY_COUNT {
            return Err(Error::Shape(format!("more than {INDUSTRY_COUNT} rows")));
        }
        let row: Vec<&str> = line.split(',').collect();
        if row.len() != INDUSTRY_COUNT {
            return Err(Error::Shape(format!(
                "line {}: expected {INDUSTRY_COUNT} columns, found {}",
                idx + 1,
                row.len()
            )));
        }
        for field in row {
            let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
                line: idx + 1,
                msg: format!("{field:?} is not a number"),
            })?;
            if !v.is_finite() || v < 0.0 {
                return Err(Error::Value(format!("line {}: negative or non-finite cell {v}", idx + 1)));
            }
            cells.push(v);
        }
    }
    if rows != INDUSTRY_COUNT {
        return Err(Error::Shape(format!("expected {INDUSTRY_COUNT} rows, found {rows}")));
    }
    IndustryMatrix::from_cells(MatrixKind::Money, cells)
}

/// Matrix plus the number of links skipped because an endpoint had no
/// industry label.
#[derive(Debug, Clone, PartialEq)]
pub struct CountedMatrix {
    pub matrix: IndustryMatrix,
    pub unlabeled_links: usize,
}

/// `cell(a, b)` = number of arcs `i -> j` with `industry(i) = a` and
/// `industry(j) = b`.
pub fn build_transaction_matrix(net: &MultiLayerNetwork) -> CountedMatrix {
    let mut matrix = IndustryMatrix::zeros(MatrixKind::TransactionCount);
    let mut unlabeled_links = 0;
    for (i, j) in net.arcs() {
        match (net.industry(i), net.industry(j)) {
            (Some(a), Some(b)) => matrix.bump(a, b),
            _ => unlabeled_links += 1,
        }
    }
    CountedMatrix {
        matrix,
        unlabeled_links,
    }
}

/// Patent edges between industries `a != b` add one to both `(a, b)` and
/// `(b, a)`; edges inside one industry add one to the diagonal.
pub fn build_patent_matrix(net: &MultiLayerNetwork) -> CountedMatrix {
    let mut matrix = IndustryMatrix::zeros(MatrixKind::PatentCount);
    let mut unlabeled_links = 0;
    for (i, j) in net.patent_edges() {
        match (net.industry(i), net.industry(j)) {
            (Some(a), Some(b)) if a == b => matrix.bump(a, a),
            (Some(a), Some(b)) => {
                matrix.bump(a, b);
                matrix.bump(b, a);
            }
            _ => unlabeled_links += 1,
        }
    }
    CountedMatrix {
        matrix,
        unlabeled_links,
    }
}

fn pearson(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::DegenerateVariance("first matrix"));
    }
    if syy == 0.0 {
        return Err(Error::DegenerateVariance("second matrix"));
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Pearson correlation over all 1,156 aligned cell pairs, diagonal included.
pub fn matrix_correlation(a: &IndustryMatrix, b: &IndustryMatrix) -> Result<f64> {
    pearson(&a.cells, &b.cells)
}

/// Pearson correlation of `ln` values over the cells positive in both
/// matrices.
pub fn log_log_correlation(a: &IndustryMatrix, b: &IndustryMatrix) -> Result<f64> {
    let (xs, ys): (Vec<f64>, Vec<f64>) = a
        .cells
        .iter()
        .zip(&b.cells)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .unzip();
    if xs.len() < 2 {
        return Err(Error::InsufficientData("fewer than two cells positive in both matrices".into()));
    }
    pearson(&xs, &ys)
}
