//! Direct numerical evaluation of the exponential sums behind the error
//! term, with the van der Corput and three-variable bounds alongside for
//! comparison. The bounds carry unspecified implied constants, so ratios
//! are diagnostics, never assertions; the only hard invariant is the
//! triangle inequality against the term count.

use std::f64::consts::TAU;

use num::complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exppair::ExponentPair;
use crate::kahan::KahanComplex;

/// e(t) = exp(2 pi i t), reduced to the unit interval first.
#[inline]
fn e_of(t: f64) -> Complex64 {
    Complex64::from_polar(1.0, TAU * (t - t.floor()))
}

/// |sum_{D < d <= 2D} e(h x / (d + delta))| by direct compensated
/// summation; `shift_one` selects the delta = 1 branch of the denominator.
pub fn expsum_single(h: u64, x: f64, d_range: u64, shift_one: bool) -> f64 {
    let delta = if shift_one { 1.0 } else { 0.0 };
    let hx = h as f64 * x;
    let mut acc = KahanComplex::new();
    for d in (d_range + 1)..=(2 * d_range) {
        acc.add(e_of(hx / (d as f64 + delta)));
    }
    acc.value().norm()
}

/// Van der Corput bound `Y^kappa X^lambda + Y^(-1)` with X = D and
/// Y = h x / D, the first-derivative scale of the phase over (D, 2D].
pub fn vdc_bound(h: u64, x: f64, d_range: u64, pair: &ExponentPair) -> f64 {
    let big_x = d_range as f64;
    let y = h as f64 * x / big_x;
    y.powf(pair.kappa_f64()) * big_x.powf(pair.lambda_f64()) + y.recip()
}

/// Hard cap on directly evaluated triple-sum terms.
pub const TRIPLE_SUM_TERM_BUDGET: u64 = 100_000_000;
/// Cap on the materialized (h, n) coefficient array.
pub const TRIPLE_SUM_COEFF_BUDGET: u64 = 10_000_000;
/// |delta_shift| budget (the lemma wants |delta| <= 1/epsilon).
pub const DELTA_SHIFT_BUDGET: f64 = 1e6;

/// Scalar parameters of the three-variable sum
/// `S_delta = sum_{h~H} sum_{m~M} sum_{n~N} a_{h,n} b_m
///            e(X (M^beta N^gamma / H^alpha) h^alpha / (m^beta n^gamma + delta))`
/// where `v ~ V` means `V < v <= 2V`.
#[derive(Debug, Clone, Serialize)]
pub struct TripleSumParams {
    pub x: f64,
    pub h: u64,
    pub m: u64,
    pub n: u64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub delta_shift: f64,
    /// how the coefficient arrays were produced, for the JSON record
    pub coefficients: String,
}

/// Parameters plus materialized coefficient arrays, validated on build.
#[derive(Debug, Clone)]
pub struct TripleSumSpec {
    params: TripleSumParams,
    /// a_{h,n}, row-major over (h, n); |a| <= 1
    a: Vec<Complex64>,
    /// b_m; |b| <= 1
    b: Vec<Complex64>,
}

impl TripleSumSpec {
    pub fn new(
        mut params: TripleSumParams,
        a: Vec<Complex64>,
        b: Vec<Complex64>,
        coefficients_label: String,
    ) -> Result<Self> {
        params.coefficients = coefficients_label;
        if params.x <= 0.0 || !params.x.is_finite() {
            return Err(Error::invalid("X must be positive and finite"));
        }
        if params.h < 1 || params.m < 1 || params.n < 1 {
            return Err(Error::invalid("H, M, N must be >= 1"));
        }
        if params.alpha <= 0.0 || params.beta <= 0.0 || params.gamma <= 0.0 {
            return Err(Error::invalid("alpha, beta, gamma must be positive"));
        }
        if params.delta_shift.abs() > DELTA_SHIFT_BUDGET {
            return Err(Error::invalid(format!(
                "|delta_shift| exceeds budget {DELTA_SHIFT_BUDGET}"
            )));
        }
        // uniformity window of the bound: H <= N^(gamma-1) M^beta
        let window = (params.n as f64).powf(params.gamma - 1.0) * (params.m as f64).powf(params.beta);
        if params.h as f64 > window * (1.0 + 1e-12) {
            return Err(Error::invalid(format!(
                "H = {} outside the uniformity window N^(gamma-1) M^beta = {window}",
                params.h
            )));
        }
        // the smallest denominator must stay positive
        let min_denom = ((params.m + 1) as f64).powf(params.beta)
            * ((params.n + 1) as f64).powf(params.gamma)
            + params.delta_shift;
        if min_denom <= 0.0 {
            return Err(Error::invalid(
                "delta_shift makes a phase denominator non-positive",
            ));
        }
        let an = params
            .h
            .checked_mul(params.n)
            .filter(|&c| c <= TRIPLE_SUM_COEFF_BUDGET)
            .ok_or_else(|| {
                Error::resource(format!(
                    "coefficient array H*N exceeds budget {TRIPLE_SUM_COEFF_BUDGET}"
                ))
            })?;
        if a.len() as u64 != an {
            return Err(Error::invalid(format!(
                "a has {} entries, expected H*N = {an}",
                a.len()
            )));
        }
        if b.len() as u64 != params.m {
            return Err(Error::invalid(format!(
                "b has {} entries, expected M = {}",
                b.len(),
                params.m
            )));
        }
        for (i, z) in a.iter().enumerate() {
            if z.norm() > 1.0 + 1e-12 {
                return Err(Error::invalid(format!("|a[{i}]| = {} > 1", z.norm())));
            }
        }
        for (i, z) in b.iter().enumerate() {
            if z.norm() > 1.0 + 1e-12 {
                return Err(Error::invalid(format!("|b[{i}]| = {} > 1", z.norm())));
            }
        }
        Ok(TripleSumSpec { params, a, b })
    }

    /// All coefficients equal to 1.
    pub fn unit(params: TripleSumParams) -> Result<Self> {
        let a = vec![Complex64::new(1.0, 0.0); (params.h * params.n) as usize];
        let b = vec![Complex64::new(1.0, 0.0); params.m as usize];
        Self::new(params, a, b, "unit".to_string())
    }

    /// All coefficients zero (the sum must vanish).
    pub fn zeroed(params: TripleSumParams) -> Result<Self> {
        let a = vec![Complex64::new(0.0, 0.0); (params.h * params.n) as usize];
        let b = vec![Complex64::new(0.0, 0.0); params.m as usize];
        Self::new(params, a, b, "zero".to_string())
    }

    /// Unimodular coefficients with reproducible random phases.
    pub fn random_phases(params: TripleSumParams, seed: u64) -> Result<Self> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |len: usize| -> Vec<Complex64> {
            (0..len)
                .map(|_| Complex64::from_polar(1.0, TAU * rng.gen::<f64>()))
                .collect()
        };
        let a = draw((params.h * params.n) as usize);
        let b = draw(params.m as usize);
        Self::new(params, a, b, format!("random_phase(seed={seed})"))
    }

    pub fn params(&self) -> &TripleSumParams {
        &self.params
    }

    pub fn term_count(&self) -> u64 {
        self.params.h * self.params.m * self.params.n
    }
}

/// Diagnostic record for one evaluated triple sum.
#[derive(Debug, Clone, Serialize)]
pub struct TripleSumReport {
    pub spec: TripleSumParams,
    pub terms: u64,
    pub magnitude: f64,
    /// four-term right side of the three-variable bound at
    /// (kappa, lambda) = (1/2, 1/2), epsilon = 0
    pub lemma_bound: f64,
    /// magnitude / lemma_bound: recorded, not asserted (the implied
    /// constant is unspecified)
    pub ratio: f64,
}

/// Evaluate the triple sum directly and compare with the bound.
///
/// The accumulation order is fixed (h, then n, then m) with compensated
/// summation, so results are identical regardless of thread count.
pub fn triple_sum_eval(spec: &TripleSumSpec) -> Result<TripleSumReport> {
    let p = &spec.params;
    let terms = p
        .h
        .checked_mul(p.m)
        .and_then(|hm| hm.checked_mul(p.n))
        .filter(|&t| t <= TRIPLE_SUM_TERM_BUDGET)
        .ok_or_else(|| {
            Error::resource(format!(
                "H*M*N exceeds direct-evaluation budget {TRIPLE_SUM_TERM_BUDGET}"
            ))
        })?;

    // hoist the power tables out of the triple loop
    let hpow: Vec<f64> = (1..=p.h)
        .map(|i| ((p.h + i) as f64).powf(p.alpha))
        .collect();
    let mpow: Vec<f64> = (1..=p.m)
        .map(|j| ((p.m + j) as f64).powf(p.beta))
        .collect();
    let npow: Vec<f64> = (1..=p.n)
        .map(|l| ((p.n + l) as f64).powf(p.gamma))
        .collect();
    let scale = p.x * (p.m as f64).powf(p.beta) * (p.n as f64).powf(p.gamma)
        / (p.h as f64).powf(p.alpha);

    let mut acc = KahanComplex::new();
    for hi in 0..p.h as usize {
        let ch = scale * hpow[hi];
        for ni in 0..p.n as usize {
            let a = spec.a[hi * p.n as usize + ni];
            if a.norm_sqr() == 0.0 {
                continue;
            }
            let np = npow[ni];
            for mi in 0..p.m as usize {
                let denom = mpow[mi] * np + p.delta_shift;
                acc.add(a * spec.b[mi] * e_of(ch / denom));
            }
        }
    }
    let magnitude = acc.value().norm();
    if magnitude > terms as f64 * (1.0 + 1e-9) + 1e-9 {
        return Err(Error::Invariant(format!(
            "triple sum magnitude {magnitude} exceeds term count {terms}"
        )));
    }

    let (xf, hf, mf, nf) = (p.x, p.h as f64, p.m as f64, p.n as f64);
    let lemma_bound = (xf.sqrt() * hf.powf(2.5) * mf.powi(2) * nf.powf(2.5)).powf(1.0 / 3.0)
        + hf * mf.sqrt() * nf
        + hf.sqrt() * mf * nf.sqrt()
        + hf * mf * nf / xf.sqrt();

    Ok(TripleSumReport {
        spec: p.clone(),
        terms,
        magnitude,
        lemma_bound,
        ratio: magnitude / lemma_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exppair::ExponentPair;

    fn params(x: f64, h: u64, m: u64, n: u64) -> TripleSumParams {
        TripleSumParams {
            x,
            h,
            m,
            n,
            alpha: 1.0,
            beta: 1.0,
            gamma: 1.0,
            delta_shift: 0.0,
            coefficients: String::new(),
        }
    }

    #[test]
    fn expsum_zero_phase_sums_to_length() {
        // h x = 0 makes every term 1
        assert_eq!(expsum_single(7, 0.0, 100, false), 100.0);
        assert_eq!(expsum_single(7, 0.0, 100, true), 100.0);
    }

    #[test]
    fn expsum_triangle_inequality() {
        let d = 1000u64;
        let m = expsum_single(1, (d * d) as f64, d, false);
        assert!(m <= d as f64 + 1e-9);
        let m2 = expsum_single(3, 1.7e7, 4096, true);
        assert!(m2 <= 4096.0 + 1e-9);
    }

    #[test]
    fn expsum_matches_naive_loop() {
        // same sum without compensation, small enough that both agree
        let (h, x, d) = (2u64, 12345.678f64, 500u64);
        let mut re = 0.0;
        let mut im = 0.0;
        for dd in (d + 1)..=(2 * d) {
            let t = h as f64 * x / dd as f64;
            re += (TAU * t).cos();
            im += (TAU * t).sin();
        }
        let naive = (re * re + im * im).sqrt();
        assert!((expsum_single(h, x, d, false) - naive).abs() < 1e-9);
    }

    #[test]
    fn vdc_bound_examples() {
        let half = ExponentPair::from_i64(1, 2, 1, 2).unwrap();
        // Y = X reproduces the trivial bound X (plus 1/X)
        let d = 1000u64;
        let b = vdc_bound(1, (d * d) as f64, d, &half);
        assert!((b - (d as f64 + 1e-3)).abs() < 1e-9);
        // trivial pair (0, 1): X + 1/Y
        let trivial = ExponentPair::from_i64(0, 1, 1, 1).unwrap();
        let b2 = vdc_bound(5, 2000.0, 100, &trivial);
        assert!((b2 - (100.0 + 1.0 / 100.0)).abs() < 1e-12);
    }

    #[test]
    fn triple_sum_zero_coefficients() {
        let spec = TripleSumSpec::zeroed(params(1000.0, 2, 4, 4)).unwrap();
        let report = triple_sum_eval(&spec).unwrap();
        assert_eq!(report.magnitude, 0.0);
    }

    #[test]
    fn triple_sum_integral_phases_hit_term_count() {
        // H=M=N=1: single term (h,m,n) = (2,2,2), phase = X*(1*1/1)*2/4 = X/2.
        // X = 2 makes the phase integral, so the term is exactly 1.
        let spec = TripleSumSpec::unit(params(2.0, 1, 1, 1)).unwrap();
        let report = triple_sum_eval(&spec).unwrap();
        assert!((report.magnitude - 1.0).abs() < 1e-12);

        // H=M=N=2: phases 288 h / (m n) are integral for h, m, n in (2,4].
        let spec = TripleSumSpec::unit(params(144.0, 2, 2, 2)).unwrap();
        let report = triple_sum_eval(&spec).unwrap();
        assert!(
            (report.magnitude - report.terms as f64).abs() < 1e-9,
            "magnitude {} vs {}",
            report.magnitude,
            report.terms
        );
    }

    #[test]
    fn triple_sum_respects_trivial_bound() {
        let spec =
            TripleSumSpec::random_phases(params(1000.0, 4, 32, 32), 42).unwrap();
        let report = triple_sum_eval(&spec).unwrap();
        assert!(report.magnitude <= report.terms as f64 + 1e-9);
        assert!(report.lemma_bound > 0.0);
        assert!(report.ratio.is_finite());
    }

    #[test]
    fn triple_sum_deterministic_for_fixed_seed() {
        let s1 =
            TripleSumSpec::random_phases(params(999.0, 3, 8, 16), 7).unwrap();
        let s2 =
            TripleSumSpec::random_phases(params(999.0, 3, 8, 16), 7).unwrap();
        let r1 = triple_sum_eval(&s1).unwrap();
        let r2 = triple_sum_eval(&s2).unwrap();
        assert_eq!(r1.magnitude, r2.magnitude);
    }

    #[test]
    fn spec_validation() {
        // H above the uniformity window N^(gamma-1) M^beta = M
        assert!(TripleSumSpec::unit(params(10.0, 40, 8, 8)).is_err());
        // delta_shift beyond budget
        let mut p = params(10.0, 2, 4, 4);
        p.delta_shift = 1e7;
        assert!(TripleSumSpec::unit(p).is_err());
        // mismatched coefficient lengths
        let p = params(10.0, 2, 4, 4);
        let a = vec![Complex64::new(1.0, 0.0); 3];
        let b = vec![Complex64::new(1.0, 0.0); 4];
        assert!(TripleSumSpec::new(p.clone(), a, b, "bad".into()).is_err());
        // coefficient magnitude above 1
        let a = vec![Complex64::new(1.5, 0.0); 8];
        let b = vec![Complex64::new(1.0, 0.0); 4];
        assert!(TripleSumSpec::new(p, a, b, "big".into()).is_err());
    }

    #[test]
    fn term_budget_enforced() {
        let p = params(10.0, 1000, 1000, 1000);
        // coefficient budget trips first: H*N = 10^6 is fine, H*M*N = 10^9 is not
        let spec = TripleSumSpec::unit(p);
        match spec {
            Ok(s) => {
                assert!(matches!(triple_sum_eval(&s), Err(Error::Resource(_))));
            }
            Err(Error::Resource(_)) => {}
            Err(e) => panic!("unexpected error {e}"),
        }
    }
}
