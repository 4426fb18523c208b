//! Analysis toolkit for a two-layer firm network: directed transaction arcs
//! (money flows from source to target) and undirected joint-patent edges on
//! one shared node set.
//!
//! The crate covers the whole pipeline:
//!
//! - [`ingest`]: TSV parsing, firm identity resolution and layer merging
//! - [`netcore`]: the in-memory [`MultiLayerNetwork`]
//! - [`powerlaw`]: discrete power-law fitting with KS-based `x_min` selection
//! - [`iotables`]: 34x34 industry matrices and their correlations
//! - [`ergm`]: configuration statistics and p* pseudolikelihood estimation
//! - [`subnet`]: industry split and bounded patent-connected extraction
//! - [`bayesnet`]: pair sampling, BDe scoring and exhaustive structure search
//! - [`synthgen`]: ground-truth generators used to validate every estimator

pub mod bayesnet;
pub mod ergm;
mod error;
pub mod industry;
pub mod ingest;
pub mod iotables;
pub mod netcore;
pub mod powerlaw;
pub mod subnet;
pub mod synthgen;

pub use error::{Error, Result};
pub use industry::{IndustryCode, INDUSTRY_COUNT};
pub use netcore::{DegreeMode, FirmId, Layer, MultiLayerNetwork};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The RNG used by every seeded routine. ChaCha keeps streams identical
/// across platforms for a given seed.
pub type Rng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
