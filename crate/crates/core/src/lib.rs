//! Cross-platform activity panel analytics.
//!
//! Ties together daily social-media activity (SMA) streams and e-commerce
//! platform activity (EPA) streams per vendor, and provides the full
//! analysis pipeline on top of them:
//!
//! * [`panel`]: domain types, activity streams and aligned vendor panels
//! * [`ingest`]: CSV loading, validation, and panel assembly
//! * [`synth`]: deterministic synthetic panel generation with plantable
//!   SMA-to-EPA coupling
//! * [`oracle`]: naive reference implementations used by test suites
//! * [`correlation`]: full-series, rolling-window, and lag-shifted Pearson
//!   correlation scans
//! * [`features`]: the 66-dimensional SMA feature grid
//! * [`labeling`]: cumulative EPA targets and quantile class labels
//! * [`learn`]: from-scratch random forest and multinomial logistic
//!   regression
//! * [`eval`]: sliding temporal cross-validation, metrics, grid
//!   experiments, and significance tests

pub mod correlation;
pub mod date;
pub mod error;
pub mod eval;
pub mod export;
pub mod features;
pub mod ingest;
pub mod labeling;
pub mod learn;
pub mod oracle;
pub mod panel;
pub mod rng;
pub mod synth;

pub use date::{Date, DateRange};
pub use error::{Error, Result};
pub use panel::{ActivityType, DailySeries, FillPolicy, VendorPanel};
