//! Exact evaluation of S(x) = sum_{n <= x} tau_k([x/n]) by two independent
//! routes, plus the exact rational check of the block decomposition that
//! the error-term analysis rests on.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Zero};
use rayon::prelude::*;

use crate::divisor::{sieve_tau_k, tau_k_at, DivisorTable};
use crate::error::{Error, Result};
use crate::primes::isqrt;

/// O(x) evaluation refuses beyond this point; the block route has no limit.
pub const NAIVE_GUARD: u64 = 100_000_000;
/// Guard for the exact-rational decomposition check.
pub const DECOMPOSITION_GUARD: u64 = 100_000;

/// A maximal interval of n on which [x/n] is constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuotientBlock {
    /// common value of [x/n] on the block
    pub q: u64,
    pub n_lo: u64,
    pub n_hi: u64,
    pub count: u64,
}

/// Partition {1..x} into quotient blocks; there are at most
/// 2*floor(sqrt(x)) + 1 of them, with q strictly decreasing.
pub fn quotient_blocks(x: u64) -> Vec<QuotientBlock> {
    let mut blocks = Vec::new();
    let mut n = 1u64;
    while n <= x {
        let q = x / n;
        let n_hi = x / q;
        blocks.push(QuotientBlock {
            q,
            n_lo: n,
            n_hi,
            count: n_hi - n + 1,
        });
        n = n_hi + 1;
    }
    blocks
}

/// Brute-force route: one table lookup per n. The oracle the fast route is
/// checked against.
pub fn fracsum_naive(k: u32, x: u64) -> Result<u128> {
    if x < 1 {
        return Err(Error::invalid("x must be >= 1"));
    }
    if x > NAIVE_GUARD {
        return Err(Error::resource(format!(
            "x = {x} exceeds the O(x) guard {NAIVE_GUARD}; use fracsum_blocks"
        )));
    }
    let table = sieve_tau_k(k, x)?;
    fracsum_naive_with_table(&table, x)
}

/// Same O(x) loop over a caller-provided table (so sweeps can reuse one
/// sieve). Requires `x <= table.limit()`.
pub fn fracsum_naive_with_table(table: &DivisorTable, x: u64) -> Result<u128> {
    if x < 1 || x > table.limit() {
        return Err(Error::invalid(format!(
            "x = {x} outside table range 1..={}",
            table.limit()
        )));
    }
    let values = table.values();
    let mut sum: u128 = 0;
    for n in 1..=x {
        sum = sum
            .checked_add(values[(x / n) as usize] as u128)
            .ok_or_else(|| Error::resource("fracsum exceeds 128 bits"))?;
    }
    Ok(sum)
}

/// Counters for the block route: the acceptance gate bounds `point_evals`
/// by 2*sqrt(x) + 1.
#[derive(Debug, Clone, Copy)]
pub struct BlockSumStats {
    pub value: u128,
    pub blocks: u64,
    pub point_evals: u64,
}

/// O(sqrt(x)) route: group n by constant quotient and evaluate tau_k once
/// per block. Point evaluations run in parallel for large x; the sum is
/// exact integer arithmetic, so the schedule cannot change the result.
pub fn fracsum_blocks_with_stats(k: u32, x: u64) -> Result<BlockSumStats> {
    if x < 1 {
        return Err(Error::invalid("x must be >= 1"));
    }
    let blocks = quotient_blocks(x);
    let n_blocks = blocks.len() as u64;
    if n_blocks > 2 * isqrt(x) + 1 {
        return Err(Error::Invariant(format!(
            "{n_blocks} blocks exceeds 2*sqrt(x)+1 for x = {x}"
        )));
    }
    let term = |b: &QuotientBlock| -> Result<u128> {
        Ok(tau_k_at(k, b.q)? as u128 * b.count as u128)
    };
    let terms: Result<Vec<u128>> = if blocks.len() >= 1024 {
        blocks.par_iter().map(term).collect()
    } else {
        blocks.iter().map(term).collect()
    };
    let mut value: u128 = 0;
    for t in terms? {
        value = value
            .checked_add(t)
            .ok_or_else(|| Error::resource("fracsum exceeds 128 bits"))?;
    }
    Ok(BlockSumStats {
        value,
        blocks: n_blocks,
        point_evals: n_blocks,
    })
}

/// The block-route sum itself.
pub fn fracsum_blocks(k: u32, x: u64) -> Result<u128> {
    Ok(fracsum_blocks_with_stats(k, x)?.value)
}

/// Sawtooth at an exact rational: r - floor(r) - 1/2. At integers -1/2,
/// matching the floating-point convention in [`crate::vaaler::sawtooth`].
pub fn sawtooth_rational(r: &BigRational) -> BigRational {
    r - r.floor() - BigRational::new(BigInt::one(), BigInt::from(2))
}

/// Both sides of the block decomposition identity.
#[derive(Debug, Clone)]
pub struct DecompositionReport {
    pub k: u32,
    pub x: u64,
    pub n_split: u64,
    /// sum_{N < n <= x} tau_k([x/n]), by direct table lookups
    pub lhs: u128,
    /// the same sum reassembled per quotient value d as
    /// tau_k(d) * (x/d - x/(d+1) - psi(x/d) + psi(x/(d+1))),
    /// in exact rational arithmetic
    pub rhs: BigRational,
    pub equal: bool,
}

/// Verify the decomposition identity exactly.
///
/// d ranges over the exact quotient values of n in (N, x]; the lowest block
/// may be clipped at N, in which case the lower endpoint x/(d+1) is replaced
/// by N (the spec's exact-boundary convention). Inequality of the two sides
/// is reported, not raised.
pub fn decomposition_check(k: u32, x: u64, n_split: u64) -> Result<DecompositionReport> {
    if x < 2 {
        return Err(Error::invalid("x must be >= 2"));
    }
    if x > DECOMPOSITION_GUARD {
        return Err(Error::resource(format!(
            "x = {x} exceeds the exact-rational guard {DECOMPOSITION_GUARD}"
        )));
    }
    if n_split < 1 || n_split >= x {
        return Err(Error::invalid(format!(
            "need 1 <= N < x, got N = {n_split}, x = {x}"
        )));
    }
    // quotients of n in (N, x] never exceed x/(N+1)
    let table = sieve_tau_k(k, x / (n_split + 1))?;

    let mut lhs: u128 = 0;
    for n in (n_split + 1)..=x {
        lhs += table.value(x / n) as u128;
    }

    let rx = BigRational::from_integer(BigInt::from(x));
    let n_rat = BigRational::from_integer(BigInt::from(n_split));
    let mut rhs = BigRational::zero();
    let mut n = n_split + 1;
    while n <= x {
        let d = x / n;
        let n_hi = x / d;
        let upper = &rx / BigRational::from_integer(BigInt::from(d));
        let lower_full = &rx / BigRational::from_integer(BigInt::from(d + 1));
        let lower = if lower_full < n_rat {
            n_rat.clone()
        } else {
            lower_full
        };
        let term = (&upper - &lower) - sawtooth_rational(&upper) + sawtooth_rational(&lower);
        rhs += BigRational::from_integer(BigInt::from(table.value(d))) * term;
        n = n_hi + 1;
    }

    let equal = rhs == BigRational::from_integer(BigInt::from(lhs));
    Ok(DecompositionReport {
        k,
        x,
        n_split,
        lhs,
        rhs,
        equal,
    })
}
