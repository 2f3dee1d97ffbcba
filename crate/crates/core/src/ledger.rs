//! Exponent bookkeeping for the dyadic case analysis at (kappa, lambda) =
//! (1/2, 1/2), in exact rational arithmetic at epsilon = 0.
//!
//! With N = x^nu_N the dyadic parameter D = x^nu_D ranges over
//! [nu_N, 1 - nu_N]. Every case bound is an affine function of nu_D, so the
//! maximum over the closed range sits at an endpoint and stays exact.

use num::{One, Zero};

use crate::error::{Error, Result};
use crate::exppair::{rat, Rational};

/// One affine bound exponent: value(nu_D) = slope * nu_D + intercept.
#[derive(Debug, Clone)]
pub struct AffineExponent {
    pub slope: Rational,
    pub intercept: Rational,
}

impl AffineExponent {
    fn new(slope: Rational, intercept: Rational) -> Self {
        AffineExponent { slope, intercept }
    }

    pub fn eval(&self, nu_d: &Rational) -> Rational {
        &self.slope * nu_d + &self.intercept
    }

    /// Maximum over the closed interval [lo, hi]; affine, so an endpoint.
    fn max_over(&self, lo: &Rational, hi: &Rational) -> (Rational, Rational) {
        let at_lo = self.eval(lo);
        let at_hi = self.eval(hi);
        if at_hi >= at_lo {
            (hi.clone(), at_hi)
        } else {
            (lo.clone(), at_lo)
        }
    }
}

/// One case row: the bound exponent, where its maximum over the admissible
/// nu_D range sits, and any side constraint on nu_D.
#[derive(Debug, Clone)]
pub struct CaseBound {
    pub label: String,
    /// Human-readable origin of the bound term.
    pub term: String,
    pub bound: AffineExponent,
    pub max_at: Rational,
    pub max_value: Rational,
    /// The exponent of the smoothing length H, where one applies (Case I).
    pub h_exponent: Option<AffineExponent>,
    /// nu_D threshold above which H >= 1 (Case I feasibility).
    pub h_feasible_from: Option<Rational>,
}

/// Full report: the N-term exponent, the per-case maxima over the nu_D
/// range, and their overall maximum.
#[derive(Debug, Clone)]
pub struct LedgerReport {
    pub nu_n: Rational,
    /// Exponent contributed by the initial segment n <= N: exactly nu_N.
    pub n_term_exponent: Rational,
    /// Closed admissible range of nu_D; None when nu_N > 1 - nu_N.
    pub nu_d_range: Option<(Rational, Rational)>,
    pub cases: Vec<CaseBound>,
    pub overall: Rational,
}

/// Evaluate the case ledger at a given N-exponent.
pub fn case_ledger(nu_n: &Rational) -> Result<LedgerReport> {
    if nu_n <= &Rational::zero() || nu_n >= &Rational::one() {
        return Err(Error::invalid(format!(
            "nu_N = {} must lie strictly between 0 and 1",
            nu_n
        )));
    }
    let lo = nu_n.clone();
    let hi = Rational::one() - nu_n;
    let mut cases = Vec::new();
    let mut overall = nu_n.clone();

    if lo <= hi {
        // Case I: D_k >= D^(2/3); bound D^(2/9) x^(1/3) with smoothing
        // length H = D^(7/9) x^(-1/3).
        let case_i = AffineExponent::new(rat(2, 9), rat(1, 3));
        let (at, val) = case_i.max_over(&lo, &hi);
        overall = overall.max(val.clone());
        cases.push(CaseBound {
            label: "I".into(),
            term: "D^(2/9) x^(1/3)".into(),
            bound: case_i,
            max_at: at,
            max_value: val,
            h_exponent: Some(AffineExponent::new(rat(7, 9), rat(-1, 3))),
            h_feasible_from: Some(rat(3, 7)),
        });

        // Cases II and III share the three-term bound
        // x^(1/6) D^(1/2) D^(1/12) + D^(3/4) + x^(-1/2) D^(3/2).
        let shared: [(&str, Rational, Rational); 3] = [
            ("x^(1/6) D^(1/2) D^(1/12)", rat(7, 12), rat(1, 6)),
            ("D^(3/4)", rat(3, 4), rat(0, 1)),
            ("x^(-1/2) D^(3/2)", rat(3, 2), rat(-1, 2)),
        ];
        for (idx, (term, slope, intercept)) in shared.into_iter().enumerate() {
            let bound = AffineExponent::new(slope, intercept);
            let (at, val) = bound.max_over(&lo, &hi);
            overall = overall.max(val.clone());
            cases.push(CaseBound {
                label: format!("II/III.{}", idx + 1),
                term: term.into(),
                bound,
                max_at: at,
                max_value: val,
                h_exponent: None,
                h_feasible_from: None,
            });
        }
    }

    Ok(LedgerReport {
        nu_n: nu_n.clone(),
        n_term_exponent: nu_n.clone(),
        nu_d_range: if lo <= hi { Some((lo, hi)) } else { None },
        cases,
        overall,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ledger_at_nine_nineteenths() {
        let report = case_ledger(&rat(9, 19)).unwrap();
        let case_i = &report.cases[0];
        assert_eq!(case_i.max_value, rat(77, 171));
        assert_eq!(case_i.max_at, rat(10, 19));
        assert_eq!(report.overall, rat(9, 19));
        // the N-term exponent balances the case maxima exactly
        assert_eq!(report.n_term_exponent, report.overall);
        // the leading II/III term also peaks at exactly 9/19
        assert_eq!(report.cases[1].max_value, rat(9, 19));
    }

    #[test]
    fn ledger_at_one_half() {
        let report = case_ledger(&rat(1, 2)).unwrap();
        assert_eq!(report.cases[0].max_value, rat(4, 9));
        assert_eq!(report.overall, rat(1, 2));
        let range = report.nu_d_range.clone().unwrap();
        assert_eq!(range.0, range.1);
    }

    #[test]
    fn h_feasibility_threshold() {
        // 3/7 = 57/133 < 9/19 = 63/133: H >= 1 over the whole D range
        let report = case_ledger(&rat(9, 19)).unwrap();
        let threshold = report.cases[0].h_feasible_from.clone().unwrap();
        assert!(threshold < rat(9, 19));
        let h = report.cases[0].h_exponent.clone().unwrap();
        assert!(h.eval(&rat(9, 19)) > Rational::zero());
        assert_eq!(h.eval(&rat(3, 7)), Rational::zero());
    }

    #[test]
    fn degenerate_range_keeps_n_term() {
        let report = case_ledger(&rat(3, 4)).unwrap();
        assert!(report.nu_d_range.is_none());
        assert!(report.cases.is_empty());
        assert_eq!(report.overall, rat(3, 4));
    }

    #[test]
    fn out_of_range_rejected() {
        assert!(case_ledger(&rat(0, 1)).is_err());
        assert!(case_ledger(&rat(1, 1)).is_err());
        assert!(case_ledger(&rat(-1, 2)).is_err());
        assert!(case_ledger(&rat(5, 4)).is_err());
    }

    #[test]
    fn overall_dominates_every_case() {
        for (n, d) in [(1i64, 3i64), (2, 5), (9, 19), (1, 2), (47, 100)] {
            let nu = rat(n, d);
            let report = case_ledger(&nu).unwrap();
            assert!(report.overall >= report.n_term_exponent);
            for case in &report.cases {
                assert!(report.overall >= case.max_value);
                // affine max really is attained inside the range
                let (lo, hi) = report.nu_d_range.clone().unwrap();
                assert!(case.max_at >= lo && case.max_at <= hi);
            }
        }
    }
}
