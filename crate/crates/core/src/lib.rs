//! Workbench for syntactic valence lexicons.
//!
//! * [`lexicon`]: entry and frame data model and the tab-separated
//!   interchange format.
//! * [`merge`]: fusion of two lexicons and the manual-validation queue.
//! * [`checker`]: frame-matching analyzability oracle with failure diagnosis.
//! * [`passage`]: Passage-style annotations, boundary-relaxed matching,
//!   precision / recall / f-measure and coverage.
//! * [`mining`]: comparative error mining over analyzability outcomes.
//! * [`freq`]: most frequent lemmas from a form frequency table.

pub mod checker;
pub mod error;
pub mod freq;
pub mod lexicon;
pub mod merge;
pub mod mining;
pub mod passage;
pub mod report;
mod text;

pub use error::{Error, Result};
