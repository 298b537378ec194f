//! Truncated q-Fock spaces over one or two modes.
//!
//! Words over the mode alphabet form the basis; the q-inner product is given
//! by the recursive deletion formula and computed by [`GramCache`]. Dense
//! matrices live on a [`FockSpace`], while [`FockVector`] carries sparse
//! vectors of unbounded level for long one-letter tails.

mod gram;
mod kernel;
mod sparse;
mod space;
mod word;

pub use gram::GramCache;
pub use kernel::{CompletenessReport, RANK_TOL};
pub use sparse::FockVector;
pub use space::{pn_eval, FockSpace, OperatorKind, OperatorRep, MAX_DIM};
pub use word::FockWord;
