//! Sparse overlapping group (SOG) lasso.
//!
//! The crate is organised bottom-up:
//!
//! * [`groups`]: overlapping group layouts and the covariate-duplication map
//!   that turns them into disjoint blocks of an expanded coefficient space.
//! * [`penalty`]: evaluation of the SOG norm `h(x)` as an infimum over
//!   group decompositions.
//! * [`prox`]: soft / group soft thresholding and their composition.
//! * [`solver`]: accelerated proximal gradient fits, debiasing,
//!   cross-validation and multitask stacking.
//! * [`simulate`]: ground truth, Gaussian designs and label models.
//! * [`meanwidth`]: Monte-Carlo mean-width and chi-square checks.
//! * [`cli`]: file formats and experiment drivers behind the `soglasso` binary.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod groups;
pub mod linalg;
pub mod meanwidth;
pub mod penalty;
pub mod prox;
pub mod simulate;
pub mod solver;

pub use error::{Error, Result};
pub use groups::{DuplicationMap, GroupLayout};
pub use penalty::{Decomposition, PenaltyParams};
pub use prox::ProxStep;
pub use simulate::{DesignSpec, GroundTruth, ObservationModel};
pub use solver::{FitResult, Loss, SolverConfig};
