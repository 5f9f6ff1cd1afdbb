//! Exact arithmetic for q-analogues of multiple zeta values.
//!
//! This crate computes mono-brackets, bi-brackets and q-multiple zeta values
//! as truncated q-series over arbitrary-precision rationals, implements the
//! stuffle and shuffle algebras of bi-bracket words together with the
//! partition relation, and carries the exact linear-algebra machinery that
//! expresses length-2 bi-brackets of odd total weight through length-1
//! products.
//!
//! Every computation is exact; there is no floating point on any value path.
//!
//! The `examples/` directory is the best starting point: each example is a
//! runnable walkthrough of one capability (`cargo run --example brackets`,
//! `cargo run --example solve_relations`, ...). A thin `qbracket` binary
//! exposes the same functionality as subcommands.

pub mod arith;
pub mod bialgebra;
pub mod brackets;
pub mod error;
pub mod linsys;
pub mod qmzv;
pub mod qseries;
pub mod verify;

pub use arith::{bernoulli, binomial, lambda_coeff, Rat};
pub use bialgebra::{
    diamond, partition, partition_lincomb, shuffle, stuffle, BiWord, Letter, LinComb, MultiPoly,
};
pub use brackets::{
    bi_bracket, d_q_symbolic, evaluate, length1_reduce, mono_bracket, BiIndex, BracketCache,
    DerivationTower,
};
pub use error::QbracketError;
pub use linsys::{
    binomial_lemma_check, full_system, generating_identity_check, inverse_formula, j_matrix,
    lambda_deficiency, md_span_fit, p_matrix, q_matrix, reduced_system, rho, sigma, solve_length2,
    verify_inverse, RatMatrix, WordBasis,
};
pub use qmzv::{
    dual, harmonic_sum, hoffman_check, hoffman_difference, mzv_estimate, ohno_q_check, q_stuffle,
    s_q, shuffle_bin, stuffle_y, tau, verify_q_stuffle, zeta_q, BinLetter, BinWord, MZIndex,
};
pub use qseries::{bracket_factor, eulerian_poly, QSeries, RatPoly, SeriesCmp};
