//! Exact-rational exponent-pair calculus.
//!
//! Pairs live in the region 0 <= kappa <= 1/2 <= lambda <= 1 with
//! kappa + lambda <= 1 and are transformed by the van der Corput processes
//!     A(k, l) = (k/(2k+2), (k+l+1)/(2k+2))
//!     B(k, l) = (l - 1/2, k + 1/2)
//! Words like "BAAAAA" are read right to left: A five times, then B.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// `n/d` as an exact rational.
pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Render a rational as the exact string `p/q` (always with denominator).
pub fn rational_string(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parse `p/q` or a bare integer. Floats are rejected: exactness matters
/// everywhere this is used.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if s.is_empty() || s.contains('.') {
        return Err(Error::invalid(format!(
            "expected exact rational 'p/q', got '{s}'"
        )));
    }
    let (numer, denom) = match s.split_once('/') {
        Some((n, d)) => (n, d),
        None => (s, "1"),
    };
    let n: BigInt = numer
        .parse()
        .map_err(|_| Error::invalid(format!("bad numerator in '{s}'")))?;
    let d: BigInt = denom
        .parse()
        .map_err(|_| Error::invalid(format!("bad denominator in '{s}'")))?;
    if d.is_zero() {
        return Err(Error::invalid(format!("zero denominator in '{s}'")));
    }
    Ok(BigRational::new(n, d))
}

/// An admissible exponent pair, always kept in reduced canonical form
/// (the `Ratio` representation enforces gcd 1 and positive denominator).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExponentPair {
    kappa: Rational,
    lambda: Rational,
}

impl ExponentPair {
    pub fn new(kappa: Rational, lambda: Rational) -> Result<Self> {
        let half = rat(1, 2);
        if kappa.is_negative() {
            return Err(Error::invalid(format!(
                "kappa = {} violates kappa >= 0",
                rational_string(&kappa)
            )));
        }
        if kappa > half {
            return Err(Error::invalid(format!(
                "kappa = {} violates kappa <= 1/2",
                rational_string(&kappa)
            )));
        }
        if lambda < half {
            return Err(Error::invalid(format!(
                "lambda = {} violates lambda >= 1/2",
                rational_string(&lambda)
            )));
        }
        if lambda > Rational::one() {
            return Err(Error::invalid(format!(
                "lambda = {} violates lambda <= 1",
                rational_string(&lambda)
            )));
        }
        if &kappa + &lambda > Rational::one() {
            return Err(Error::invalid(format!(
                "({}, {}) violates kappa + lambda <= 1",
                rational_string(&kappa),
                rational_string(&lambda)
            )));
        }
        Ok(ExponentPair { kappa, lambda })
    }

    pub fn from_i64(kn: i64, kd: i64, ln: i64, ld: i64) -> Result<Self> {
        Self::new(rat(kn, kd), rat(ln, ld))
    }

    pub fn kappa(&self) -> &Rational {
        &self.kappa
    }

    pub fn lambda(&self) -> &Rational {
        &self.lambda
    }

    /// The A process. Maps the admissible region into itself, so the
    /// result is asserted rather than returned as a fallible value.
    pub fn a_process(&self) -> ExponentPair {
        let denom = rat(2, 1) * &self.kappa + rat(2, 1);
        let kappa = &self.kappa / &denom;
        let lambda = (&self.kappa + &self.lambda + Rational::one()) / denom;
        ExponentPair::new(kappa, lambda).expect("A preserves admissibility")
    }

    /// The B process; fails with the violated constraint if the swap-shift
    /// leaves the admissible region.
    pub fn b_process(&self) -> Result<ExponentPair> {
        let half = rat(1, 2);
        ExponentPair::new(&self.lambda - &half, &self.kappa + &half)
    }

    /// Error exponent (2k + l + 3)/(4k + l + 7) attached to this pair, in
    /// lowest terms.
    pub fn theta(&self) -> Rational {
        let two = rat(2, 1);
        let num = &two * &self.kappa + &self.lambda + rat(3, 1);
        let den = &two * &two * &self.kappa + &self.lambda + rat(7, 1);
        num / den
    }

    pub fn kappa_f64(&self) -> f64 {
        self.kappa.to_f64().unwrap_or(f64::NAN)
    }

    pub fn lambda_f64(&self) -> f64 {
        self.lambda.to_f64().unwrap_or(f64::NAN)
    }
}

impl std::fmt::Display for ExponentPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "({}, {})",
            rational_string(&self.kappa),
            rational_string(&self.lambda)
        )
    }
}

/// Apply a word over {A, B}, rightmost character first.
pub fn apply_word(word: &str, pair: &ExponentPair) -> Result<ExponentPair> {
    if word.is_empty() {
        return Err(Error::invalid("empty word"));
    }
    let mut current = pair.clone();
    for (step, op) in word.chars().rev().enumerate() {
        current = match op {
            'A' | 'a' => current.a_process(),
            'B' | 'b' => current.b_process().map_err(|e| {
                let applied: String = word.chars().rev().take(step + 1).collect();
                Error::invalid(format!(
                    "word '{word}' left the admissible region after applying \
                     '{applied}' (rightmost first): {e}"
                ))
            })?,
            other => {
                return Err(Error::invalid(format!(
                    "word may contain only A and B, got '{other}'"
                )))
            }
        };
    }
    Ok(current)
}

/// Baseline error exponent (5k-1)/(10k-1) for the order-k divisor function.
pub fn reference_theta(k: u32) -> Result<Rational> {
    if k < 2 {
        return Err(Error::invalid("reference exponent defined for k >= 2"));
    }
    Ok(rat(5 * k as i64 - 1, 10 * k as i64 - 1))
}

/// Outcome of an exhaustive word search.
#[derive(Debug, Clone)]
pub struct SearchResult {
    /// Empty string means the seed itself was optimal.
    pub word: String,
    pub pair: ExponentPair,
    pub theta: Rational,
    pub seed_index: usize,
}

/// Enumerate every word of length 0..=max_word_len over {A, B} applied to
/// each seed, skipping branches that leave the admissible region.
///
/// Ties break deterministically: smaller theta, then shorter word, then
/// lexicographically smaller word, then earlier seed.
pub fn search_theta(max_word_len: u32, seeds: &[ExponentPair]) -> Result<SearchResult> {
    if seeds.is_empty() {
        return Err(Error::invalid("search needs at least one seed"));
    }
    let mut best: Option<SearchResult> = None;
    // ops in application order; the displayed word is the reverse
    let mut consider = |ops: &[char], pair: &ExponentPair, seed_index: usize| {
        let word: String = ops.iter().rev().collect();
        let theta = pair.theta();
        let better = match &best {
            None => true,
            Some(b) => {
                (theta.clone(), word.len(), word.clone(), seed_index)
                    < (b.theta.clone(), b.word.len(), b.word.clone(), b.seed_index)
            }
        };
        if better {
            best = Some(SearchResult {
                word,
                pair: pair.clone(),
                theta,
                seed_index,
            });
        }
    };

    for (seed_index, seed) in seeds.iter().enumerate() {
        let mut stack: Vec<(ExponentPair, Vec<char>)> = vec![(seed.clone(), Vec::new())];
        while let Some((pair, ops)) = stack.pop() {
            consider(&ops, &pair, seed_index);
            if ops.len() as u32 == max_word_len {
                continue;
            }
            let mut next_a = ops.clone();
            next_a.push('A');
            stack.push((pair.a_process(), next_a));
            if let Ok(b) = pair.b_process() {
                let mut next_b = ops;
                next_b.push('B');
                stack.push((b, next_b));
            }
        }
    }
    Ok(best.expect("seed list is nonempty"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(kn: i64, kd: i64, ln: i64, ld: i64) -> ExponentPair {
        ExponentPair::from_i64(kn, kd, ln, ld).unwrap()
    }

    #[test]
    fn a_process_examples() {
        assert_eq!(pair(1, 2, 1, 2).a_process(), pair(1, 6, 2, 3));
        assert_eq!(pair(0, 1, 1, 1).a_process(), pair(0, 1, 1, 1));
        // (13/84, 55/84) -> (13/194, 76/97); 152/194 reduces to 76/97
        assert_eq!(pair(13, 84, 55, 84).a_process(), pair(13, 194, 152, 194));
    }

    #[test]
    fn b_process_examples() {
        assert_eq!(pair(1, 2, 1, 2).b_process().unwrap(), pair(0, 1, 1, 1));
        // B fixes (13/84, 55/84): 55/84 - 1/2 = 13/84 and 13/84 + 1/2 = 55/84
        assert_eq!(
            pair(13, 84, 55, 84).b_process().unwrap(),
            pair(13, 84, 55, 84)
        );
    }

    #[test]
    fn admissibility_rejected() {
        assert!(ExponentPair::from_i64(-1, 2, 1, 2).is_err());
        assert!(ExponentPair::from_i64(2, 3, 3, 4).is_err());
        assert!(ExponentPair::from_i64(1, 4, 1, 4).is_err());
        assert!(ExponentPair::from_i64(1, 4, 5, 4).is_err());
        assert!(ExponentPair::from_i64(1, 2, 2, 3).is_err()); // sum > 1
    }

    #[test]
    fn word_application() {
        let bi = pair(13, 84, 55, 84);
        let result = apply_word("BAAAAA", &bi).unwrap();
        assert_eq!(result, pair(1653, 3494, 1760, 3494));

        assert!(apply_word("", &bi).is_err());
        assert!(apply_word("BAC", &bi).is_err());
        assert_eq!(apply_word("BB", &pair(1, 2, 1, 2)).unwrap(), pair(1, 2, 1, 2));
    }

    #[test]
    fn theta_values() {
        assert_eq!(pair(1, 2, 1, 2).theta(), rat(9, 19));
        assert_eq!(pair(0, 1, 1, 2).theta(), rat(7, 15));
        let improved = apply_word("BAAAAA", &pair(13, 84, 55, 84)).unwrap();
        assert!(improved.theta() < rat(9, 19));
        assert_eq!(improved.theta(), rat(7774, 16415));
    }

    #[test]
    fn reference_theta_values() {
        assert_eq!(reference_theta(2).unwrap(), rat(9, 19));
        assert_eq!(reference_theta(3).unwrap(), rat(14, 29));
        assert!(reference_theta(1).is_err());
        // asymptote: theta -> 1/2 from below
        let far = reference_theta(1000).unwrap();
        assert!((far.to_f64().unwrap() - 0.5).abs() < 1e-3);
    }

    #[test]
    fn search_len_zero_returns_seed() {
        let r = search_theta(0, &[pair(1, 2, 1, 2)]).unwrap();
        assert_eq!(r.word, "");
        assert_eq!(r.theta, rat(9, 19));
    }

    #[test]
    fn search_dominates_fixed_word() {
        let bi = pair(13, 84, 55, 84);
        let ba5 = apply_word("BAAAAA", &bi).unwrap();
        let r = search_theta(6, &[bi]).unwrap();
        assert!(r.theta <= ba5.theta());
    }

    #[test]
    fn search_matches_bruteforce_enumeration() {
        // Independent oracle: enumerate the 15 words of length <= 3 directly.
        let seed = pair(0, 1, 1, 1);
        let mut best = seed.theta();
        let mut words: Vec<String> = vec![String::new()];
        for len in 1..=3 {
            for bits in 0..(1u32 << len) {
                let word: String = (0..len)
                    .map(|i| if bits >> i & 1 == 0 { 'A' } else { 'B' })
                    .collect();
                words.push(word);
            }
        }
        for w in &words {
            if w.is_empty() {
                continue;
            }
            if let Ok(p) = apply_word(w, &seed) {
                let t = p.theta();
                if t < best {
                    best = t;
                }
            }
        }
        let r = search_theta(3, &[seed.clone()]).unwrap();
        assert_eq!(r.theta, best);
        assert!(r.theta <= seed.theta());
        assert_eq!(seed.theta(), rat(1, 2));
    }

    #[test]
    fn parse_rational_formats() {
        assert_eq!(parse_rational("9/19").unwrap(), rat(9, 19));
        assert_eq!(parse_rational("3").unwrap(), rat(3, 1));
        assert_eq!(parse_rational("-1/2").unwrap(), rat(-1, 2));
        assert!(parse_rational("0.5").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn rational_strings_are_reduced() {
        let p = apply_word("BAAAAA", &pair(13, 84, 55, 84)).unwrap();
        // 1760/3494 reduces to 880/1747; the canonical form is reduced
        assert_eq!(rational_string(p.lambda()), "880/1747");
        assert_eq!(rational_string(p.kappa()), "1653/3494");
        assert_eq!(rational_string(&p.theta()), "7774/16415");
    }
}
