//! Separability decisions for multipartite quantum states of rank at most four.

pub mod chow;
pub mod engine;
pub mod error;
pub mod gallery;
pub mod grassmann;
pub mod io;
pub mod oracle;
pub mod ppt;
pub mod product;
mod serde_util;
pub mod tensor;
pub mod tolerance;

pub use engine::{classify, classify_with, length_bounds, ClassificationReport, ClassifyOptions, Rule, Verdict};
pub use error::{Error, Result};
pub use tensor::{CMat, CVec, MultiState, SubsetMask, C64};
pub use tolerance::ToleranceConfig;
