//! Statement-level fault localization.
//!
//! * [`spectra`]: coverage spectra and Ochiai suspiciousness.
//! * [`blues`]: bug-report driven statement retrieval over a structured
//!   BM25 index of source statements.
//! * [`rafl`]: aggregation of several top-k lists into one by cross-entropy
//!   minimization of weighted Spearman footrule distance.
//! * [`eval`]: top-k accuracy against known buggy statements.
//! * [`cli`]: the `faultloc` command line.

pub mod blues;
pub mod cli;
pub mod eval;
pub mod rafl;
pub mod ranked;
pub mod spectra;

pub use ranked::{RankedEntry, RankedList, RankedListError, StatementId};

/// A rayon pool with `threads` workers (rayon's default when `None`).
/// Parallel work in this crate runs on whatever pool it is called from, so
/// wrap calls in [`rayon::ThreadPool::install`] to bound them.
pub fn thread_pool(
    threads: Option<usize>,
) -> Result<rayon::ThreadPool, rayon::ThreadPoolBuildError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    builder.build()
}
