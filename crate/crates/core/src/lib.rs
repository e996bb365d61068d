//! Pinned AUC and the threshold-agnostic subgroup bias metrics.
//!
//! Pinned AUC measures a classifier on a "pinned" sample made of one identity
//! subgroup plus an equally sized sample of the whole dataset. Because ROC-AUC
//! is a Mann-Whitney U statistic, the pinned value splits exactly into four
//! weighted pairwise AUCs (background/background, subgroup/subgroup and the two
//! cross terms). The weights are pair counts, so they move whenever the class
//! balance inside the subgroup differs from the background, even when the
//! scorer itself does not change. The cross terms, taken on their own, are the
//! BPSN and BNSP AUCs, which together with Subgroup AUC do not suffer from this.
//!
//! The crate is organised as:
//!
//! - [`metrics`]: rank statistics, pinned-set construction, the four-term
//!   decomposition and the subgroup metrics.
//! - [`datagen`]: template-based synthetic datasets and class-balance skewing.
//! - [`simscore`]: parametric simulated scorers with closed-form AUC oracles.
//! - [`experiments`]: repeated skew-and-measure trials and two-model tables.
//! - [`io`]: csv/jsonl ingestion, report writers and a remote scoring client.
//! - [`cli`]: the command surface used by the `pinned-auc` binary.
//!
//! ```
//! use pinned_auc::metrics::{auc, mann_whitney_u};
//!
//! let negatives = [0.2, 0.4];
//! let positives = [0.3, 0.6];
//! assert_eq!(mann_whitney_u(&negatives, &positives).unwrap().value(), 3.0);
//! assert_eq!(auc(&negatives, &positives).unwrap(), 0.75);
//! ```

pub mod cli;
pub mod datagen;
mod error;
pub mod experiments;
pub mod io;
pub mod metrics;
pub mod seed;
pub mod simscore;

pub use error::{Error, Result};
