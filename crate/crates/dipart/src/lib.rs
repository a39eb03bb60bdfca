//! Exact counting of nonnegative integer solutions to two-row linear
//! Diophantine systems (`D x = s` with a 2 x m nonnegative generator
//! matrix), by reduction to weighted sums of scalar partition functions.
//!
//! The crate is organized around the reduction pipeline:
//!
//! - [`matrix`]: domain types, validation, and the 2x2 determinant /
//!   row-elimination primitives.
//! - [`spf`](mod@spf): exact scalar partition function evaluation,
//!   including the signed-generator normalization used by reduction terms.
//! - [`oracle`]: brute-force enumeration used as ground truth everywhere.
//! - [`reduction`]: per-column reduction terms — classic single terms and
//!   generalized weighted ("bar") sums — and whole-reduction evaluation.
//! - [`coeffs`]: the expansion coefficients of the generalized reduction,
//!   computed two independent ways (direct enumeration and a recursive
//!   matrix-reduction scheme).
//! - [`decomposer`]: the top-level strategy that validates, groups
//!   collinear columns into convolutions, routes each remaining column to
//!   the classic or generalized path, and reports chamber boundaries.
//! - [`cli`]: problem-file parsing and the command-line front end.
//!
//! All domain types are immutable values and every operation is a pure
//! function (evaluation caches are owned locally by each call tree), so the
//! whole API can be used from concurrent contexts without synchronization.

pub mod cli;
pub mod coeffs;
pub mod corpus;
pub mod decomposer;
pub mod matrix;
pub mod oracle;
pub mod reduction;
pub mod spf;

pub use matrix::{
    det2, eliminate, validate, AugmentedMatrix, Column, Count, GeneratorMatrix, SignedCount,
    Target, ValidatedMatrix,
};
pub use spf::{spf, spf_scaled, spf_signed, SignedSpfQuery};
