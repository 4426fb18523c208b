//! Deviance threshold and the per-network significance table.

use super::{build_design, ConfigKind, ErgmFit};
use crate::{Error, MultiLayerNetwork, Result};

/// Threshold parameter used for every reported table.
pub const DEFAULT_DELTA: f64 = 0.001;
/// Networks below this size are not analyzed.
pub const MIN_NODES: usize = 10;

/// Minimum deviance drop for one added parameter to count as significant:
/// `-2 n (n-1) r log10(1 - delta)`.
///
/// The base-10 logarithm gives the reference thresholds (8.9 at n = 72,
/// 4,194.5 at n = 1,554); the natural logarithm would give values 2.3 times
/// larger.
pub fn deviance_threshold(n: usize, layers: usize, delta: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("threshold needs n >= 2, got {n}")));
    }
    if layers < 1 {
        return Err(Error::Domain("threshold needs at least one layer".into()));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!("delta must lie in (0, 1), got {delta}")));
    }
    let n = n as f64;
    Ok(-2.0 * n * (n - 1.0) * layers as f64 * (1.0 - delta).log10())
}

/// The base model and the four single-parameter extensions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Model {
    Choice,
    Multiplicity,
    Reciprocity,
    MultiReciprocity,
    Transitivity,
}

impl Model {
    pub const ALL: [Model; 5] = [
        Model::Choice,
        Model::Multiplicity,
        Model::Reciprocity,
        Model::MultiReciprocity,
        Model::Transitivity,
    ];

    pub fn extra(self) -> Option<ConfigKind> {
        match self {
            Model::Choice => None,
            Model::Multiplicity => Some(ConfigKind::Multiplicity),
            Model::Reciprocity => Some(ConfigKind::Reciprocity),
            Model::MultiReciprocity => Some(ConfigKind::MultiReciprocity),
            Model::Transitivity => Some(ConfigKind::Transitivity),
        }
    }

    pub fn kinds(self) -> Vec<ConfigKind> {
        let mut k = vec![ConfigKind::ChoiceTrans, ConfigKind::ChoicePatent];
        k.extend(self.extra());
        k
    }

    pub fn name(self) -> &'static str {
        match self {
            Model::Choice => "choice",
            Model::Multiplicity => "multiplicity",
            Model::Reciprocity => "reciprocity",
            Model::MultiReciprocity => "multi_reciprocity",
            Model::Transitivity => "transitivity",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelResult {
    pub model: Model,
    pub fit: ErgmFit,
    /// Deviance drop relative to the choice model exceeds the threshold.
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignificanceReport {
    pub label: String,
    pub n: usize,
    pub alpha_threshold: f64,
    /// Always in [`Model::ALL`] order.
    pub models: Vec<ModelResult>,
}

impl SignificanceReport {
    pub fn result(&self, model: Model) -> &ModelResult {
        &self.models[Model::ALL.iter().position(|&m| m == model).expect("all models present")]
    }

    pub fn g2pl(&self, model: Model) -> f64 {
        self.result(model).fit.g2pl
    }

    pub fn significant(&self, model: Model) -> bool {
        self.result(model).significant
    }
}

pub fn significance_report(net: &MultiLayerNetwork, label: &str) -> Result<SignificanceReport> {
    significance_report_with(net, label, DEFAULT_DELTA)
}

/// Fits the choice model and each single-parameter extension on one shared
/// design, and flags extensions whose deviance drop exceeds
/// [`deviance_threshold`] with two layers.
pub fn significance_report_with(
    net: &MultiLayerNetwork,
    label: &str,
    delta: f64,
) -> Result<SignificanceReport> {
    if net.n() < MIN_NODES {
        return Err(Error::TooSmall {
            n: net.n(),
            min: MIN_NODES,
        });
    }
    let alpha_threshold = deviance_threshold(net.n(), 2, delta)?;
    let design = build_design(net, &ConfigKind::ALL);
    let choice = design.fit(&Model::Choice.kinds())?;
    let mut models = vec![ModelResult {
        model: Model::Choice,
        fit: choice.clone(),
        significant: false,
    }];
    for model in &Model::ALL[1..] {
        let fit = design.fit(&model.kinds())?;
        let significant = choice.g2pl - fit.g2pl > alpha_threshold;
        models.push(ModelResult {
            model: *model,
            fit,
            significant,
        });
    }
    Ok(SignificanceReport {
        label: label.to_string(),
        n: net.n(),
        alpha_threshold,
        models,
    })
}
