//! The main-term constant C = sum_n tau_k(n) / (n (n+1)) with rigorous tail
//! control.
//!
//! The partial sum is accumulated in exact fixed-point arithmetic (38
//! fractional digits, floor-truncated per term). The tail beyond the
//! truncation point is bounded by partial summation from the premise
//! `sum_{n<=t} tau_k(n) <= t (1 + ln t)^(k-1)`, which is itself verified
//! numerically before anything trusts it:
//!
//!   tail(N) <= T_k(N)/(N(N+1)) + 2 * I_{k-1}(N),
//!   I_m(N)  = integral_N^inf (1+ln t)^m / t^2 dt
//!           = (1+ln N)^m / N + m * I_{m-1}(N),   I_0 = 1/N.

use num::bigint::BigInt;
use num::{BigUint, Zero};

use crate::divisor::{sieve_tau_k, DivisorTable, MAX_SIEVE_LIMIT};
use crate::error::{Error, Result};
use crate::fixed::Fixed;
use crate::primes::isqrt;

/// Dense sieve ceiling for constant evaluation; k = 1 and k = 2 stream past
/// it in O(window) memory, higher orders get a resource error.
pub const DENSE_CONSTANT_LIMIT: u64 = 1 << 24;

/// Segmented window length for the streaming tau_2 path.
const SEGMENT_WINDOW: u64 = 1 << 20;

/// Absolute ceiling for any truncation point.
pub const TRUNCATION_CEILING: u64 = 4_000_000_000;

/// Truncated main-term constant with an explicit tail bound.
#[derive(Debug, Clone)]
pub struct MainConstant {
    k: u32,
    truncation_n: u64,
    value: Fixed,
    tail_bound: f64,
}

impl MainConstant {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn truncation_n(&self) -> u64 {
        self.truncation_n
    }

    /// Exact partial sum sum_{n <= N} tau_k(n)/(n(n+1)) at fixed-point
    /// resolution (truncation below 10^-38 per term).
    pub fn value(&self) -> &Fixed {
        &self.value
    }

    pub fn value_f64(&self) -> f64 {
        self.value.to_f64()
    }

    /// Upper bound on the discarded tail sum_{n > N} tau_k(n)/(n(n+1)).
    pub fn tail_bound(&self) -> f64 {
        self.tail_bound
    }

    pub fn decimal_string(&self, sig: usize) -> String {
        self.value.to_decimal_string(sig)
    }
}

/// `(1 + ln n)^(k-1) / (n+1) + 2 I_{k-1}(n)`: the spec tail bound.
pub fn tail_bound(k: u32, n: u64) -> f64 {
    assert!(k >= 1 && n >= 1);
    let nf = n as f64;
    let log_term = 1.0 + nf.ln();
    // I_m by the integration-by-parts recursion
    let mut integral = 1.0 / nf; // I_0
    for m in 1..k {
        integral = log_term.powi(m as i32) / nf + m as f64 * integral;
    }
    log_term.powi(k as i32 - 1) / (nf + 1.0) + 2.0 * integral
}

/// Smallest power-of-two-refined truncation point with
/// `tail_bound(k, N) <= target`.
pub fn truncation_for_tail(k: u32, target: f64) -> Result<u64> {
    if !(target > 0.0) {
        return Err(Error::invalid("target tail must be positive"));
    }
    // The bound is eventually decreasing; probe upward first.
    let mut hi = 32u64;
    while tail_bound(k, hi) > target {
        hi = hi.saturating_mul(2);
        if hi > TRUNCATION_CEILING {
            return Err(Error::resource(format!(
                "target tail {target} needs truncation beyond {TRUNCATION_CEILING}"
            )));
        }
    }
    let mut lo = hi / 2;
    // Bisect down to the first qualifying N in (lo, hi].
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if tail_bound(k, mid) <= target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Streaming source of tau_k(n) for n = 1..=limit, in order.
enum TauStream<'a> {
    Dense { table: DivisorTable, next: u64 },
    Borrowed { table: &'a DivisorTable, next: u64 },
    Ones { next: u64 },
    SegmentedTau2(SegmentedTau2),
}

impl TauStream<'_> {
    fn next_value(&mut self) -> u64 {
        match self {
            TauStream::Dense { table, next } => {
                let v = table.value(*next);
                *next += 1;
                v
            }
            TauStream::Borrowed { table, next } => {
                let v = table.value(*next);
                *next += 1;
                v
            }
            TauStream::Ones { next } => {
                *next += 1;
                1
            }
            TauStream::SegmentedTau2(s) => s.next_value(),
        }
    }
}

/// Windowed divisor-count sieve: tau(n) for one window costs
/// sum_{d <= sqrt(hi)} (window/d) increments, so the whole stream is
/// O(limit log sqrt(limit)) time in O(window) memory.
struct SegmentedTau2 {
    limit: u64,
    lo: u64,
    window: Vec<u32>,
    pos: usize,
}

impl SegmentedTau2 {
    fn new(limit: u64) -> Self {
        SegmentedTau2 {
            limit,
            lo: 1,
            window: Vec::new(),
            pos: 0,
        }
    }

    fn fill(&mut self) {
        let hi = (self.lo + SEGMENT_WINDOW).min(self.limit + 1); // exclusive
        let len = (hi - self.lo) as usize;
        self.window.clear();
        self.window.resize(len, 0);
        // count divisor pairs (d, n/d) with d <= sqrt(n)
        for d in 1..=isqrt(hi - 1) {
            let dd = d * d;
            if dd >= hi {
                break;
            }
            let start = self.lo.max(dd);
            let mut m = start.div_ceil(d) * d;
            while m < hi {
                self.window[(m - self.lo) as usize] += if m == dd { 1 } else { 2 };
                m += d;
            }
        }
        self.pos = 0;
    }

    fn next_value(&mut self) -> u64 {
        if self.pos >= self.window.len() {
            self.lo += self.window.len() as u64;
            self.fill();
        }
        let v = self.window[self.pos];
        self.pos += 1;
        v as u64
    }
}

fn sum_scaled_terms(mut stream: TauStream<'_>, truncation_n: u64) -> Fixed {
    // 10^38 fits u128, so each term tau * 10^38 / (n(n+1)) splits into a
    // quotient and remainder part without big-integer work.
    const SCALE: u128 = 100_000_000_000_000_000_000_000_000_000_000_000_000u128;
    let mut acc = BigUint::zero();
    let mut partial: u128 = 0;
    for n in 1..=truncation_n {
        let tau = stream.next_value() as u128;
        let den = n as u128 * (n as u128 + 1);
        let q = SCALE / den;
        let r = SCALE % den;
        let term = match tau.checked_mul(q) {
            Some(tq) => match (tau * r).checked_div(den) {
                Some(tr) => tq.checked_add(tr),
                None => None,
            },
            None => None,
        };
        match term {
            Some(t) if partial <= u128::MAX - t => partial += t,
            Some(t) => {
                acc += BigUint::from(partial);
                partial = t;
            }
            None => {
                // absurdly large tau (huge k); fall back to exact big math
                acc += BigUint::from(tau) * BigUint::from(SCALE) / BigUint::from(den);
            }
        }
    }
    acc += BigUint::from(partial);
    Fixed::from_mantissa(BigInt::from(acc))
}

fn stream_for(k: u32, truncation_n: u64, table: Option<&DivisorTable>) -> Result<TauStream<'_>> {
    if let Some(t) = table {
        if t.k() == k && t.limit() >= truncation_n {
            return Ok(TauStream::Borrowed { table: t, next: 1 });
        }
    }
    if k == 1 {
        return Ok(TauStream::Ones { next: 1 });
    }
    if truncation_n <= DENSE_CONSTANT_LIMIT && truncation_n <= MAX_SIEVE_LIMIT {
        return Ok(TauStream::Dense {
            table: sieve_tau_k(k, truncation_n)?,
            next: 1,
        });
    }
    if k == 2 {
        return Ok(TauStream::SegmentedTau2(SegmentedTau2::new(truncation_n)));
    }
    Err(Error::resource(format!(
        "truncation {truncation_n} for k = {k} exceeds the dense sieve budget \
         {DENSE_CONSTANT_LIMIT} and no streaming path exists for this order"
    )))
}

/// Constant with tail bound at most `target_tail`.
pub fn main_constant(k: u32, target_tail: f64) -> Result<MainConstant> {
    main_constant_with_table(k, target_tail, None)
}

/// Same, reusing a caller-provided sieve when it covers the truncation.
pub fn main_constant_with_table(
    k: u32,
    target_tail: f64,
    table: Option<&DivisorTable>,
) -> Result<MainConstant> {
    if k < 1 {
        return Err(Error::invalid("k must be >= 1"));
    }
    let truncation_n = truncation_for_tail(k, target_tail)?;
    main_constant_truncated_with_table(k, truncation_n, table)
}

/// Constant truncated at an explicit N (the tail bound is reported, not
/// chosen).
pub fn main_constant_truncated(k: u32, truncation_n: u64) -> Result<MainConstant> {
    main_constant_truncated_with_table(k, truncation_n, None)
}

pub fn main_constant_truncated_with_table(
    k: u32,
    truncation_n: u64,
    table: Option<&DivisorTable>,
) -> Result<MainConstant> {
    if k < 1 || truncation_n < 1 {
        return Err(Error::invalid("k and truncation must be >= 1"));
    }
    let stream = stream_for(k, truncation_n, table)?;
    let value = sum_scaled_terms(stream, truncation_n);
    Ok(MainConstant {
        k,
        truncation_n,
        value,
        tail_bound: tail_bound(k, truncation_n),
    })
}

/// Check `sum_{n<=t} tau_k(n) <= t (1 + ln t)^(k-1)` for every t up to the
/// table limit; the tail bound is meaningless if this premise fails.
pub fn verify_summatory_premise(table: &DivisorTable) -> Result<()> {
    let k = table.k();
    let mut running: u128 = 0;
    for t in 1..=table.limit() {
        running += table.value(t) as u128;
        let bound = t as f64 * (1.0 + (t as f64).ln()).powi(k as i32 - 1);
        if running as f64 > bound {
            return Err(Error::Invariant(format!(
                "summatory premise fails at k={k}, t={t}: sum={running} > {bound}"
            )));
        }
    }
    Ok(())
}
