//! Consecutive pattern avoidance: exact counts, transfer-operator spectra,
//! closed forms and graph certificates.
//!
//! ```
//! use pattern_spectra::enumerate::pyramid_count;
//! use pattern_spectra::PatternSet;
//!
//! let s: PatternSet = "{123,231,312}".parse().unwrap();
//! assert_eq!(pyramid_count(&s, 6).get(6).unwrap().to_string(), "96");
//! ```

pub mod closedform;
pub mod enumerate;
pub mod error;
pub mod graphs;
pub mod pattern;
pub mod spectral;

pub use error::{Error, Result};
pub use pattern::{DescentSet, DescentWord, Pattern, PatternSet};

// Runs the guide's snippets as doc-tests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/patterns.md")]
    mod patterns {}
    #[doc = include_str!("../../../book/src/counting.md")]
    mod counting {}
    #[doc = include_str!("../../../book/src/operator.md")]
    mod operator {}
    #[doc = include_str!("../../../book/src/closed-forms.md")]
    mod closed_forms {}
    #[doc = include_str!("../../../book/src/graphs.md")]
    mod graphs {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
