//! Bernoulli logistic regression by iteratively reweighted least squares.
//!
//! Rows sharing a feature vector are pooled into one binomial group before
//! iterating, which leaves the likelihood unchanged and keeps the cost of a
//! Newton step independent of the number of link slots.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

pub const GRADIENT_TOLERANCE: f64 = 1e-8;
pub const MAX_ITERATIONS: usize = 100;
const STEP_TOLERANCE: f64 = 1e-6;
/// Coefficients beyond this magnitude are treated as diverging.
pub const SEPARATION_CAP: f64 = 30.0;

/// Row-major feature matrix with binary responses.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticDesign {
    width: usize,
    features: Vec<f64>,
    responses: Vec<u8>,
}

impl LogisticDesign {
    pub fn new(width: usize, features: Vec<f64>, responses: Vec<u8>) -> Result<Self> {
        if features.len() != width * responses.len() {
            return Err(Error::Shape(format!(
                "{} feature values for {} rows of width {width}",
                features.len(),
                responses.len()
            )));
        }
        if responses.iter().any(|&r| r > 1) {
            return Err(Error::Value("responses must be 0 or 1".into()));
        }
        Ok(LogisticDesign {
            width,
            features,
            responses,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn rows(&self) -> usize {
        self.responses.len()
    }

    pub fn row(&self, r: usize) -> (&[f64], u8) {
        (
            &self.features[r * self.width..(r + 1) * self.width],
            self.responses[r],
        )
    }

    pub fn responses(&self) -> &[u8] {
        &self.responses
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FitOutcome {
    Converged,
    /// At least one coefficient diverged and was capped at
    /// `±SEPARATION_CAP`; the remaining ones were optimized with it fixed.
    Separation,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticFit {
    /// One entry per requested column; `None` for all-zero columns.
    pub coefficients: Vec<Option<f64>>,
    /// `-2` times the maximized log-likelihood.
    pub deviance: f64,
    pub outcome: FitOutcome,
    pub iterations: usize,
    /// Max-norm of the score over the freely estimated coefficients.
    pub max_gradient: f64,
}

struct Group {
    x: Vec<f64>,
    ones: f64,
    total: f64,
}

/// `ln(1 / (1 + e^-eta))` without overflow.
fn log_sigmoid(eta: f64) -> f64 {
    if eta >= 0.0 {
        -(-eta).exp().ln_1p()
    } else {
        eta - eta.exp().ln_1p()
    }
}

fn sigmoid(eta: f64) -> f64 {
    if eta >= 0.0 {
        1.0 / (1.0 + (-eta).exp())
    } else {
        let e = eta.exp();
        e / (1.0 + e)
    }
}

fn log_lik(groups: &[Group], beta: &[f64]) -> f64 {
    groups
        .iter()
        .map(|g| {
            let eta = dot(&g.x, beta);
            g.ones * log_sigmoid(eta) + (g.total - g.ones) * log_sigmoid(-eta)
        })
        .sum()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Maximum-likelihood fit on the given design columns.
pub fn fit_logistic_design(design: &LogisticDesign, cols: &[usize]) -> Result<LogisticFit> {
    if design.rows() == 0 {
        return Err(Error::InsufficientData("design has no rows".into()));
    }
    if let Some(&c) = cols.iter().find(|&&c| c >= design.width) {
        return Err(Error::Value(format!("column {c} outside design width {}", design.width)));
    }

    let mut pooled: BTreeMap<Vec<u64>, (f64, f64)> = BTreeMap::new();
    for r in 0..design.rows() {
        let (x, y) = design.row(r);
        let key: Vec<u64> = cols.iter().map(|&c| (x[c] + 0.0).to_bits()).collect();
        let e = pooled.entry(key).or_insert((0.0, 0.0));
        e.0 += y as f64;
        e.1 += 1.0;
    }

    let active: Vec<usize> = (0..cols.len())
        .filter(|&k| pooled.keys().any(|key| f64::from_bits(key[k]) != 0.0))
        .collect();
    let groups: Vec<Group> = pooled
        .into_iter()
        .map(|(key, (ones, total))| Group {
            x: active.iter().map(|&k| f64::from_bits(key[k])).collect(),
            ones,
            total,
        })
        .collect();

    let p = active.len();
    let mut beta = vec![0.0; p];
    let mut frozen = vec![false; p];
    let mut ll = log_lik(&groups, &beta);
    let mut iterations = 0;
    let mut max_gradient;
    let mut outcome = FitOutcome::IterationLimit;

    loop {
        let free: Vec<usize> = (0..p).filter(|&k| !frozen[k]).collect();
        let mut grad = DVector::<f64>::zeros(free.len());
        let mut hess = DMatrix::<f64>::zeros(free.len(), free.len());
        for g in &groups {
            let mu = sigmoid(dot(&g.x, &beta));
            let resid = g.ones - g.total * mu;
            let w = g.total * mu * (1.0 - mu);
            for (a, &ka) in free.iter().enumerate() {
                grad[a] += resid * g.x[ka];
                for (b, &kb) in free.iter().enumerate().take(a + 1) {
                    hess[(a, b)] += w * g.x[ka] * g.x[kb];
                }
            }
        }
        for a in 0..free.len() {
            for b in 0..a {
                hess[(b, a)] = hess[(a, b)];
            }
        }
        max_gradient = grad.amax();
        let chol = hess.cholesky().ok_or(Error::Singular)?;
        if iterations == 0 {
            // At beta = 0 the weights are uniform, so this is a rank check on
            // the pooled design itself.
            let diag = chol.l_dirty().diagonal();
            let (lo, hi) = (diag.min(), diag.max());
            if lo.is_nan() || lo <= 0.0 || (lo / hi).powi(2) < 1e-12 {
                return Err(Error::Singular);
            }
        }
        let step = chol.solve(&grad);
        // Under separation the score vanishes while Newton steps stay of
        // order one, so both must be small.
        if max_gradient < GRADIENT_TOLERANCE && step.amax() < STEP_TOLERANCE {
            // One last full step is within the quadratic-convergence region.
            for (a, &k) in free.iter().enumerate() {
                beta[k] += step[a];
            }
            ll = log_lik(&groups, &beta);
            outcome = if frozen.iter().any(|&f| f) {
                FitOutcome::Separation
            } else {
                FitOutcome::Converged
            };
            break;
        }
        if iterations >= MAX_ITERATIONS {
            break;
        }
        iterations += 1;

        let mut scale = 1.0;
        let mut candidate = beta.clone();
        for _ in 0..50 {
            for (a, &k) in free.iter().enumerate() {
                candidate[k] = beta[k] + scale * step[a];
            }
            let cand_ll = log_lik(&groups, &candidate);
            if cand_ll >= ll - 1e-12 * ll.abs() {
                ll = cand_ll;
                break;
            }
            scale *= 0.5;
        }
        beta = candidate;

        let mut capped = false;
        for k in 0..p {
            if !frozen[k] && beta[k].abs() > SEPARATION_CAP {
                beta[k] = SEPARATION_CAP.copysign(beta[k]);
                frozen[k] = true;
                capped = true;
            }
        }
        if capped {
            ll = log_lik(&groups, &beta);
            if frozen.iter().all(|&f| f) {
                max_gradient = 0.0;
                outcome = FitOutcome::Separation;
                break;
            }
        }
    }

    let mut coefficients = vec![None; cols.len()];
    for (a, &k) in active.iter().enumerate() {
        coefficients[k] = Some(beta[a]);
    }
    Ok(LogisticFit {
        coefficients,
        deviance: -2.0 * ll,
        outcome,
        iterations,
        max_gradient,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn balanced_constant_feature() {
        let n = 40;
        let design = LogisticDesign::new(
            1,
            vec![1.0; n],
            (0..n).map(|r| (r % 2) as u8).collect(),
        )
        .unwrap();
        let fit = fit_logistic_design(&design, &[0]).unwrap();
        assert_eq!(fit.outcome, FitOutcome::Converged);
        assert_eq!(fit.coefficients, vec![Some(0.0)]);
        assert!((fit.deviance - 2.0 * n as f64 * 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn all_ones_separates() {
        let design = LogisticDesign::new(1, vec![1.0; 10], vec![1; 10]).unwrap();
        let fit = fit_logistic_design(&design, &[0]).unwrap();
        assert_eq!(fit.outcome, FitOutcome::Separation);
        assert_eq!(fit.coefficients, vec![Some(SEPARATION_CAP)]);
        assert!(fit.deviance < 1e-9);
    }

    #[test]
    fn zero_columns_are_dropped() {
        let design = LogisticDesign::new(2, vec![1.0, 0.0, 1.0, 0.0, 1.0, 0.0], vec![1, 0, 0]).unwrap();
        let fit = fit_logistic_design(&design, &[0, 1]).unwrap();
        assert!(fit.coefficients[1].is_none());
        let expected = (1.0f64 / 2.0).ln(); // log-odds of 1/3
        assert!((fit.coefficients[0].unwrap() - expected).abs() < 1e-9);
    }

    #[test]
    fn collinear_columns_are_singular() {
        let design = LogisticDesign::new(2, vec![1.0, 2.0, 2.0, 4.0, 1.0, 2.0], vec![1, 0, 0]).unwrap();
        assert!(matches!(fit_logistic_design(&design, &[0, 1]), Err(Error::Singular)));
    }

    #[test]
    fn shape_checks() {
        assert!(LogisticDesign::new(2, vec![1.0], vec![1]).is_err());
        assert!(LogisticDesign::new(1, vec![1.0], vec![2]).is_err());
        let d = LogisticDesign::new(1, vec![], vec![]).unwrap();
        assert!(fit_logistic_design(&d, &[0]).is_err());
    }
}
