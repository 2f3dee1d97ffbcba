//! The k-fold divisor function: bulk sieving, point evaluation, and the
//! summatory function.
//!
//! `tau_k(n)` counts ordered k-tuples of positive integers with product n.
//! Bulk ranges are sieved by iterated divisor convolution; isolated large
//! arguments are evaluated through the prime-power law
//! `tau_k(p^a) = binomial(a+k-1, k-1)`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::primes::{icbrt, is_prime, isqrt, primes_up_to};

/// Hard cap on sieve allocations (8 bytes per entry).
pub const MAX_SIEVE_LIMIT: u64 = 1 << 28;

/// Sieved values of `tau_k(n)` for `1 <= n <= limit`.
///
/// Immutable after construction; safe to share across threads.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorTable {
    k: u32,
    limit: u64,
    /// 1-based: `values[n]` holds tau_k(n); slot 0 is unused and zero.
    values: Vec<u64>,
}

impl DivisorTable {
    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    /// `tau_k(n)`; panics if `n` is outside `1..=limit`.
    #[inline]
    pub fn value(&self, n: u64) -> u64 {
        assert!(n >= 1 && n <= self.limit, "n={n} outside table range");
        self.values[n as usize]
    }

    pub fn get(&self, n: u64) -> Option<u64> {
        if n >= 1 && n <= self.limit {
            Some(self.values[n as usize])
        } else {
            None
        }
    }

    /// Raw 1-based value slice (`[0]` is a zero sentinel).
    pub fn values(&self) -> &[u64] {
        &self.values
    }
}

/// Build the full `tau_k` table up to `limit` by k-1 passes of divisor
/// convolution with the all-ones function. Each pass costs
/// O(limit log limit) and is branch-light; this beats per-n factorization
/// for bulk ranges.
pub fn sieve_tau_k(k: u32, limit: u64) -> Result<DivisorTable> {
    if k < 1 {
        return Err(Error::invalid("k must be >= 1"));
    }
    if limit < 1 {
        return Err(Error::invalid("limit must be >= 1"));
    }
    if limit > MAX_SIEVE_LIMIT {
        return Err(Error::resource(format!(
            "sieve limit {limit} exceeds budget {MAX_SIEVE_LIMIT}"
        )));
    }
    let n = limit as usize;
    // tau_1 is identically 1: the recursion base.
    let mut cur = vec![1u64; n + 1];
    cur[0] = 0;
    for _ in 1..k {
        let mut next = vec![0u64; n + 1];
        for d in 1..=n {
            let cd = cur[d];
            let mut m = d;
            while m <= n {
                next[m] = next[m]
                    .checked_add(cd)
                    .ok_or(Error::CountOverflow { k, n: m as u64 })?;
                m += d;
            }
        }
        cur = next;
    }
    Ok(DivisorTable {
        k,
        limit,
        values: cur,
    })
}

/// `binomial(a + k - 1, a)`, the tau_k value of a prime power p^a.
fn tau_prime_power(k: u32, a: u32, n: u64) -> Result<u64> {
    let top = a as u64 + k as u64 - 1;
    let r = (a as u64).min(k as u64 - 1);
    let mut c: u64 = 1;
    for i in 1..=r {
        // binom(top-r+i, i) = binom(top-r+i-1, i-1) * (top-r+i) / i is
        // integral at every step, and intermediates never exceed the result.
        let num = c as u128 * (top - r + i) as u128;
        let v = num / i as u128;
        if v > u64::MAX as u128 {
            return Err(Error::CountOverflow { k, n });
        }
        c = v as u64;
    }
    Ok(c)
}

/// Point evaluation of `tau_k(n)` without a table.
///
/// Trial-divides by primes up to the cube root, then classifies the
/// remaining cofactor as 1, a prime, a prime square, or a product of two
/// distinct primes; only the exponent pattern matters for the count, so the
/// two-prime cofactor never has to be split.
pub fn tau_k_at(k: u32, n: u64) -> Result<u64> {
    if k < 1 {
        return Err(Error::invalid("k must be >= 1"));
    }
    if n == 0 {
        return Err(Error::invalid("n must be >= 1"));
    }
    if k == 1 || n == 1 {
        return Ok(1);
    }
    let mut m = n;
    let mut result: u64 = 1;
    let mut mul = |f: u64| -> Result<()> {
        result = result
            .checked_mul(f)
            .ok_or(Error::CountOverflow { k, n })?;
        Ok(())
    };
    for &p in primes_up_to(icbrt(n)).iter() {
        if (p as u128) * (p as u128) * (p as u128) > m as u128 {
            break;
        }
        if m % p == 0 {
            let mut a = 0u32;
            while m % p == 0 {
                m /= p;
                a += 1;
            }
            mul(tau_prime_power(k, a, n)?)?;
        }
    }
    // All prime factors of the cofactor exceed its cube root, so there are
    // at most two of them.
    if m > 1 {
        if is_prime(m) {
            mul(k as u64)?;
        } else {
            let s = isqrt(m);
            if s * s == m {
                debug_assert!(is_prime(s));
                mul(tau_prime_power(k, 2, n)?)?;
            } else {
                // two distinct primes
                mul(k as u64)?;
                mul(k as u64)?;
            }
        }
    }
    Ok(result)
}

/// A complete prime factorization with a deterministic primality certificate
/// behind every listed prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub n: u64,
    /// (prime, exponent) pairs sorted by prime; empty for n = 1.
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    /// Recompute the product; always equals `n`.
    pub fn product(&self) -> u64 {
        self.factors
            .iter()
            .fold(1u64, |acc, &(p, a)| acc * p.pow(a))
    }
}

/// Factor `n` by trial division with a Miller-Rabin early exit on the
/// remaining cofactor.
pub fn factorize(n: u64) -> Result<Factorization> {
    if n == 0 {
        return Err(Error::invalid("n must be >= 1"));
    }
    let mut m = n;
    let mut factors: Vec<(u64, u32)> = Vec::new();
    let mut d: u64 = 2;
    'outer: while m > 1 {
        if is_prime(m) {
            factors.push((m, 1));
            break;
        }
        while d.checked_mul(d).map_or(false, |dd| dd <= m) {
            if m % d == 0 {
                let mut a = 0u32;
                while m % d == 0 {
                    m /= d;
                    a += 1;
                }
                factors.push((d, a));
                continue 'outer;
            }
            d = if d == 2 { 3 } else { d + 2 };
        }
        // no divisor up to sqrt(m): m is prime
        factors.push((m, 1));
        break;
    }
    Ok(Factorization { n, factors })
}

/// `sum_{n <= t} tau_k(n)` over a sieved table, in 128 bits.
pub fn divisor_summatory(table: &DivisorTable, t: u64) -> Result<u128> {
    if t < 1 || t > table.limit {
        return Err(Error::invalid(format!(
            "t={t} outside table range 1..={}",
            table.limit
        )));
    }
    let mut sum: u128 = 0;
    for n in 1..=t as usize {
        sum = sum
            .checked_add(table.values[n] as u128)
            .ok_or_else(|| Error::resource("summatory sum exceeds 128 bits"))?;
    }
    Ok(sum)
}

const TABLE_MAGIC: &[u8; 8] = b"TAUKSIEV";
const LITTLE_ENDIAN_TAG: u8 = 1;

impl DivisorTable {
    /// Binary dump: magic, endianness tag, k, limit, then the values as
    /// little-endian u64. Lets error scans reuse sieves across runs.
    pub fn write_to(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        w.write_all(TABLE_MAGIC)?;
        w.write_all(&[LITTLE_ENDIAN_TAG])?;
        w.write_all(&self.k.to_le_bytes())?;
        w.write_all(&self.limit.to_le_bytes())?;
        for n in 1..=self.limit as usize {
            w.write_all(&self.values[n].to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_from(path: &Path) -> Result<DivisorTable> {
        let mut r = BufReader::new(File::open(path)?);
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != TABLE_MAGIC {
            return Err(Error::BadTableFile("bad magic".into()));
        }
        let mut tag = [0u8; 1];
        r.read_exact(&mut tag)?;
        if tag[0] != LITTLE_ENDIAN_TAG {
            return Err(Error::BadTableFile(format!(
                "unsupported endianness tag {}",
                tag[0]
            )));
        }
        let mut k_bytes = [0u8; 4];
        r.read_exact(&mut k_bytes)?;
        let k = u32::from_le_bytes(k_bytes);
        let mut limit_bytes = [0u8; 8];
        r.read_exact(&mut limit_bytes)?;
        let limit = u64::from_le_bytes(limit_bytes);
        if k < 1 || limit < 1 || limit > MAX_SIEVE_LIMIT {
            return Err(Error::BadTableFile(format!(
                "implausible header k={k} limit={limit}"
            )));
        }
        let mut values = vec![0u64; limit as usize + 1];
        let mut buf = [0u8; 8];
        for n in 1..=limit as usize {
            r.read_exact(&mut buf)?;
            values[n] = u64::from_le_bytes(buf);
        }
        if values[1] != 1 {
            return Err(Error::BadTableFile("values[1] != 1".into()));
        }
        Ok(DivisorTable { k, limit, values })
    }
}
