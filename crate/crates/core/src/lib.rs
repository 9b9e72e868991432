//! Sequence spaces `d_p`, their multiplier algebras and the spectral theory
//! of the right shift, as numerical experiments with certified bounds.
//!
//! * [`seqcore`]: finite sequences, the `d_p` family of norms, convolution.
//! * [`multiplier`]: certified brackets on multiplier norms.
//! * [`spectral`]: resolvents, range witnesses and symbol spectra of `S` and `T_b`.
//! * [`families`]: infinite symbol families and a symbolic membership classifier.
//! * [`report`] and [`repro`]: experiment reports and the acceptance suite.

pub mod error;
pub mod families;
pub mod multiplier;
pub mod report;
pub mod repro;
pub mod seqcore;
pub mod spectral;

pub use error::{Error, Result};
pub use seqcore::{canonical, convolve, eval_symbol, norm, suffix_majorant, Exponent, FinSeq, NormKind, NormTag};
