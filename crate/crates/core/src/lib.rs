//! Exact computation around fractional sums of the k-fold divisor function:
//! S(x) = sum_{n <= x} tau_k([x/n]) = C x + E(x).
//!
//! The crate provides
//! - [`divisor`]: tau_k by sieve and by point evaluation, with the
//!   summatory function and a binary table format;
//! - [`fracsum`]: two independent exact routes to S(x), quotient blocks,
//!   and the exact rational block-decomposition identity;
//! - [`constant`]: the main-term constant with a rigorous tail bound;
//! - [`scan`]: empirical error-term measurement and slope fitting;
//! - [`vaaler`]: the sawtooth, its trigonometric approximation, and the
//!   Fejer majorant, with inequality scans;
//! - [`expsum`]: direct exponential-sum evaluation against the van der
//!   Corput and three-variable bounds;
//! - [`exppair`] / [`ledger`]: exact-rational exponent-pair calculus and
//!   the dyadic case bookkeeping.

pub mod constant;
pub mod divisor;
pub mod error;
pub mod expsum;
pub mod exppair;
pub mod fixed;
pub mod fracsum;
pub mod kahan;
pub mod ledger;
pub mod primes;
pub mod scan;
pub mod vaaler;

pub use constant::{main_constant, main_constant_truncated, tail_bound, MainConstant};
pub use divisor::{divisor_summatory, factorize, sieve_tau_k, tau_k_at, DivisorTable, Factorization};
pub use error::{Error, Result};
pub use exppair::{
    apply_word, parse_rational, rational_string, reference_theta, search_theta, ExponentPair,
    Rational, SearchResult,
};
pub use expsum::{
    expsum_single, triple_sum_eval, vdc_bound, TripleSumParams, TripleSumReport, TripleSumSpec,
};
pub use fixed::Fixed;
pub use fracsum::{
    decomposition_check, fracsum_blocks, fracsum_blocks_with_stats, fracsum_naive,
    quotient_blocks, BlockSumStats, DecompositionReport, QuotientBlock,
};
pub use ledger::{case_ledger, CaseBound, LedgerReport};
pub use scan::{error_scan, ErrorSample, ScanReport};
pub use vaaler::{
    fejer_delta, psi_star, sawtooth, vaaler_gap_scan, vaaler_scan_rows, vaaler_w, GapRow, GapScan,
    VaalerKernel,
};
