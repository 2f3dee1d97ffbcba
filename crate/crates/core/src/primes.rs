//! Prime sieving, deterministic 64-bit primality, and integer roots.

/// Primes up to and including `limit`, by an odd-only Eratosthenes sieve.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut primes = vec![2];
    // composite[i] covers the odd number 2i+1
    let mut composite = vec![false; n / 2 + 1];
    let mut p = 3usize;
    while p * p <= n {
        if !composite[p / 2] {
            let mut m = p * p;
            while m <= n {
                composite[m / 2] = true;
                m += 2 * p;
            }
        }
        p += 2;
    }
    for i in 1..=(n.saturating_sub(1)) / 2 {
        if !composite[i] {
            primes.push((2 * i + 1) as u64);
        }
    }
    primes
}

#[inline]
fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all 64-bit inputs.
///
/// The seven-base witness set is verified to have no strong pseudoprime
/// below 2^64, so the answer is exact, not probabilistic.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 7] = [2, 325, 9375, 28178, 450775, 9780504, 1795265022];
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// `⌊√n⌋` exactly, via a float seed corrected to the true floor.
pub fn isqrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as u64;
    while r > 0 && r.checked_mul(r).map_or(true, |rr| rr > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).map_or(false, |rr| rr <= n) {
        r += 1;
    }
    r
}

/// `⌊n^(1/3)⌋` exactly.
pub fn icbrt(n: u64) -> u64 {
    if n == 0 {
        return 0;
    }
    let cube = |x: u64| x as u128 * x as u128 * x as u128;
    let mut r = (n as f64).cbrt() as u64;
    while r > 0 && cube(r) > n as u128 {
        r -= 1;
    }
    while cube(r + 1) <= n as u128 {
        r += 1;
    }
    r
}
