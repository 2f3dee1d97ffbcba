//! Empirical measurement of the error term E(x) = S(x) - C x against the
//! proven exponent, with a log-log slope fit.
//!
//! The theorem gives an upper bound, not an asymptotic, so the fitted slope
//! is an observation the scan reports rather than asserts.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;

use crate::constant::{main_constant_with_table, MainConstant};
use crate::divisor::DivisorTable;
use crate::error::{Error, Result};
use crate::fixed::Fixed;
use crate::fracsum::fracsum_blocks;

/// One measurement of the error term.
#[derive(Debug, Clone)]
pub struct ErrorSample {
    pub x: u64,
    /// exact S(x) from the block route
    pub s: u128,
    /// exact S - C_N * x at fixed-point resolution
    pub e: Fixed,
    pub elapsed_s: f64,
    /// true when tail_bound * x >= |E| / 10, i.e. the truncation
    /// uncertainty drowns the measurement (E = 0 is always flagged)
    pub tail_flagged: bool,
}

impl ErrorSample {
    pub fn e_f64(&self) -> f64 {
        self.e.to_f64()
    }
}

/// Scan output: per-x samples plus the two slope statistics.
#[derive(Debug, Clone)]
pub struct ScanReport {
    pub k: u32,
    pub constant: MainConstant,
    pub samples: Vec<ErrorSample>,
    /// least-squares slope of log10|E| against log10 x over samples with
    /// E != 0; None when fewer than two usable samples exist
    pub slope: Option<f64>,
    /// max over usable samples of log|E|/log x, an outlier-robust second read
    pub max_exponent: Option<f64>,
    /// x values whose measurement is drowned by the truncation tail
    pub flagged: Vec<u64>,
}

/// Measure E(x) over an ascending list of x values.
///
/// Samples are computed in parallel; each is pure and the output order is
/// the input order, so thread count cannot change the report.
pub fn error_scan(k: u32, xs: &[u64], target_tail: f64) -> Result<ScanReport> {
    error_scan_with_table(k, xs, target_tail, None)
}

pub fn error_scan_with_table(
    k: u32,
    xs: &[u64],
    target_tail: f64,
    table: Option<&DivisorTable>,
) -> Result<ScanReport> {
    if xs.is_empty() {
        return Err(Error::invalid("x list must be nonempty"));
    }
    if xs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("x list must be strictly ascending"));
    }
    if xs[0] < 1 {
        return Err(Error::invalid("x must be >= 1"));
    }
    let constant = main_constant_with_table(k, target_tail, table)?;

    let sums: Result<Vec<(u128, f64)>> = xs
        .par_iter()
        .map(|&x| {
            let start = Instant::now();
            let s = fracsum_blocks(k, x)?;
            Ok((s, start.elapsed().as_secs_f64()))
        })
        .collect();
    let sums = sums?;

    let mut samples = Vec::with_capacity(xs.len());
    let mut flagged = Vec::new();
    for (&x, &(s, elapsed_s)) in xs.iter().zip(sums.iter()) {
        let e = Fixed::from_int(s).sub(&constant.value().mul_u64(x));
        let abs_e = e.abs().to_f64();
        let tail_flagged = constant.tail_bound() * x as f64 >= abs_e / 10.0;
        if tail_flagged {
            flagged.push(x);
        }
        samples.push(ErrorSample {
            x,
            s,
            e,
            elapsed_s,
            tail_flagged,
        });
    }

    let usable: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| !s.e.is_zero())
        .map(|s| (s.x as f64, s.e.abs().to_f64()))
        .collect();
    let slope = fit_slope(
        &usable
            .iter()
            .map(|&(x, e)| (x.log10(), e.log10()))
            .collect::<Vec<_>>(),
    );
    let max_exponent = usable
        .iter()
        .filter(|&&(x, _)| x > 1.0)
        .map(|&(x, e)| e.ln() / x.ln())
        .fold(None, |acc: Option<f64>, v| {
            Some(acc.map_or(v, |a| a.max(v)))
        });

    Ok(ScanReport {
        k,
        constant,
        samples,
        slope,
        max_exponent,
        flagged,
    })
}

/// Ordinary least squares slope through (x_i, y_i); None without at least
/// two points of distinct abscissa.
pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points
        .iter()
        .map(|p| (p.0 - mean_x) * (p.1 - mean_y))
        .sum();
    Some(sxy / sxx)
}

/// CSV body for a scan: header plus one row per sample. Callers prepend
/// their own comment line.
pub fn write_scan_csv<W: Write>(w: &mut W, report: &ScanReport) -> std::io::Result<()> {
    writeln!(
        w,
        "x,S,C_truncN,C_value,tail_bound,E,log10x,log10absE,elapsed_s"
    )?;
    for s in &report.samples {
        let abs_e = s.e.abs().to_f64();
        let log10abs_e = abs_e.log10();
        writeln!(
            w,
            "{},{},{},{},{:e},{},{:.6},{:.6},{:.3}",
            s.x,
            s.s,
            report.constant.truncation_n(),
            report.constant.decimal_string(30),
            report.constant.tail_bound(),
            s.e.to_decimal_string(15),
            (s.x as f64).log10(),
            log10abs_e,
            s.elapsed_s
        )?;
    }
    Ok(())
}
