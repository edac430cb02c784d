//! First-order simulation of leftmost-outermost β-reduction.
//!
//! λ-terms are lambda-lifted into λ-TRSs (orthogonal TRSs with one scope
//! symbol per abstraction) and evaluated by the losim-TRS, whose search and
//! contract steps track the leftmost-outermost β-reduction of the denoted
//! λ-term. Every step can be instrumented with the λ-term depth of the
//! denoted term, and [`verify`] checks the depth-increase bounds, the
//! projection/lifting correspondence and the context lemmas on concrete
//! traces. [`dag`] runs the same strategy on maximally shared graphs.

pub mod dag;
pub mod expand;
pub mod export;
pub mod lambda;
pub mod losim;
pub mod lrep;
pub mod ltrs;
pub mod par;
pub mod position;
pub mod repsim;
pub mod verify;

use std::fmt;

pub use position::Position;

/// Default node budget for expansions.
pub const DEFAULT_MAX_NODES: usize = 1_000_000;

/// A run stopped after `limit` steps without reaching a normal form.
#[derive(Debug, Clone, thiserror::Error)]
#[error("step limit of {limit} exceeded")]
pub struct StepLimitExceeded<T: fmt::Debug> {
    pub limit: usize,
    pub partial: T,
}

impl<T: fmt::Debug> StepLimitExceeded<T> {
    pub fn into_partial(self) -> T {
        self.partial
    }
}

/// Either outcome of a bounded run, as a trace.
pub fn trace_or_partial<T: fmt::Debug>(r: Result<T, StepLimitExceeded<T>>) -> (T, bool) {
    match r {
        Ok(t) => (t, true),
        Err(e) => (e.partial, false),
    }
}
