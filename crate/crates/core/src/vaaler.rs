//! The sawtooth function, Vaaler's trigonometric approximation of it, and
//! the Fejer-kernel majorant that controls the approximation error.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Sawtooth `psi(t) = t - floor(t) - 1/2`, the convention under which the
/// block decomposition is an exact identity. At integers psi = -1/2.
#[inline]
pub fn sawtooth(t: f64) -> f64 {
    t - t.floor() - 0.5
}

/// Vaaler's weight `W(t) = pi t (1-|t|) cot(pi t) + |t|` for |t| < 1, with
/// the limit value W(0) = 1.
///
/// Near zero the cotangent expression cancels catastrophically, so |t| below
/// 1e-6 switches to the series pi t cot(pi t) = 1 - (pi t)^2/3 - (pi t)^4/45.
pub fn vaaler_w(t: f64) -> Result<f64> {
    let a = t.abs();
    if a >= 1.0 {
        return Err(Error::invalid(format!("vaaler_w needs |t| < 1, got {t}")));
    }
    let pt_cot = if a < 1e-6 {
        let u = (PI * t) * (PI * t);
        1.0 - u / 3.0 - u * u / 45.0
    } else {
        PI * t * (PI * t).cos() / (PI * t).sin()
    };
    Ok(pt_cot * (1.0 - a) + a)
}

/// Degree-H trigonometric approximation of the sawtooth: the coefficients
/// `W(h/(H+1)) / (2 pi h)` of Vaaler's polynomial.
#[derive(Debug, Clone)]
pub struct VaalerKernel {
    h_max: u32,
    coefficients: Vec<f64>,
}

impl VaalerKernel {
    pub fn new(h_max: u32) -> Result<Self> {
        if h_max < 1 {
            return Err(Error::invalid("H must be >= 1"));
        }
        let mut coefficients = Vec::with_capacity(h_max as usize);
        for h in 1..=h_max {
            // h/(H+1) < 1 strictly, so the weight is always finite
            let w = vaaler_w(h as f64 / (h_max as f64 + 1.0))?;
            coefficients.push(w / (2.0 * PI * h as f64));
        }
        Ok(VaalerKernel {
            h_max,
            coefficients,
        })
    }

    pub fn h_max(&self) -> u32 {
        self.h_max
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// psi*(x): the +h and -h terms pair into real sines, so the value is
    /// exactly real: sum_h W(h/(H+1)) sin(2 pi h x) / (pi h).
    pub fn psi_star(&self, x: f64) -> f64 {
        let mut sum = 0.0;
        for (i, c) in self.coefficients.iter().enumerate() {
            let h = (i + 1) as f64;
            sum += 2.0 * c * (2.0 * PI * h * x).sin();
        }
        sum
    }
}

/// One-shot psi*(x) for a given degree; scans should reuse a [`VaalerKernel`].
pub fn psi_star(x: f64, h_max: u32) -> Result<f64> {
    Ok(VaalerKernel::new(h_max)?.psi_star(x))
}

/// Fejer majorant
/// `delta(x) = (2H+2)^(-1) sum_{|h|<=H} (1 - |h|/(H+1)) e(hx)`,
/// evaluated in closed form as
/// `(sin(pi(H+1)x) / sin(pi x))^2 / (2(H+1)^2)`
/// away from integers and by the direct sum where the denominator vanishes.
/// Analytically non-negative.
pub fn fejer_delta(x: f64, h_max: u32) -> f64 {
    let s = (PI * x).sin();
    if s.abs() > 1e-8 {
        let hp1 = h_max as f64 + 1.0;
        let r = (PI * hp1 * x).sin() / s;
        r * r / (2.0 * hp1 * hp1)
    } else {
        fejer_delta_direct(x, h_max)
    }
}

/// Direct O(H) evaluation of the Fejer majorant; the conjugate terms pair
/// into cosines. Used near integers and as a cross-check path.
pub fn fejer_delta_direct(x: f64, h_max: u32) -> f64 {
    let hp1 = h_max as f64 + 1.0;
    let mut sum = 1.0;
    for h in 1..=h_max {
        sum += 2.0 * (1.0 - h as f64 / hp1) * (2.0 * PI * h as f64 * x).cos();
    }
    sum / (2.0 * hp1)
}

/// One scanned point of the Vaaler inequality |psi* - psi| <= delta.
#[derive(Debug, Clone, Serialize)]
pub struct GapRow {
    pub x: f64,
    pub psi: f64,
    pub psi_star: f64,
    pub delta: f64,
    /// |psi* - psi| - delta; non-positive wherever the inequality holds.
    pub gap: f64,
}

/// Result of scanning the inequality over a grid.
#[derive(Debug, Clone)]
pub struct GapScan {
    pub h_max: u32,
    pub points: usize,
    /// max over the grid of |psi*(x) - psi(x)| - delta(x)
    pub max_violation: f64,
    /// grid point attaining the maximum (first one, scanning left to right)
    pub argmax: f64,
    pub min_delta: f64,
}

/// Deterministic scan grid on [0, 1] plus points hugging the integers,
/// where the sawtooth jumps and the inequality is tight.
pub fn gap_scan_grid(grid_size: u32) -> Vec<f64> {
    let g = grid_size as f64;
    let mut points: Vec<f64> = (0..=grid_size).map(|j| j as f64 / g).collect();
    for m in [0.0f64, 1.0] {
        for eps in [1e-9, 1e-12] {
            points.push(m + eps);
            points.push(m - eps);
        }
    }
    points
}

fn gap_row(kernel: &VaalerKernel, x: f64) -> GapRow {
    let psi = sawtooth(x);
    let psi_star = kernel.psi_star(x);
    let delta = fejer_delta(x, kernel.h_max());
    GapRow {
        x,
        psi,
        psi_star,
        delta,
        gap: (psi_star - psi).abs() - delta,
    }
}

/// Per-point rows for the scan CSV.
pub fn vaaler_scan_rows(h_max: u32, grid_size: u32) -> Result<Vec<GapRow>> {
    if grid_size < 2 {
        return Err(Error::invalid("grid size must be >= 2"));
    }
    let kernel = VaalerKernel::new(h_max)?;
    Ok(gap_scan_grid(grid_size)
        .par_iter()
        .map(|&x| gap_row(&kernel, x))
        .collect())
}

/// Scan the inequality on the grid; the reported max violation must sit at
/// rounding level for the inequality to count as verified.
pub fn vaaler_gap_scan(h_max: u32, grid_size: u32) -> Result<GapScan> {
    let rows = vaaler_scan_rows(h_max, grid_size)?;
    // deterministic reduction: first index wins ties regardless of schedule
    let mut max_violation = f64::NEG_INFINITY;
    let mut argmax = 0.0;
    let mut min_delta = f64::INFINITY;
    for row in &rows {
        if row.gap > max_violation {
            max_violation = row.gap;
            argmax = row.x;
        }
        if row.delta < min_delta {
            min_delta = row.delta;
        }
    }
    Ok(GapScan {
        h_max,
        points: rows.len(),
        max_violation,
        argmax,
        min_delta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sawtooth_examples() {
        assert_eq!(sawtooth(0.25), -0.25);
        assert_eq!(sawtooth(7.0), -0.5);
        assert_eq!(sawtooth(-0.25), 0.25);
        for t in [-3.7f64, -0.1, 0.0, 0.3, 12.9] {
            let v = sawtooth(t);
            assert!((-0.5..0.5).contains(&v), "psi({t}) = {v}");
        }
    }

    #[test]
    fn vaaler_w_examples() {
        // cot(pi/2) = 0 leaves only |t|
        assert!((vaaler_w(0.5).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(vaaler_w(0.0).unwrap(), 1.0);
        // limit approached numerically from t = 1e-8
        assert!((vaaler_w(1e-8).unwrap() - 1.0).abs() < 1e-12);
        // evenness
        for t in [0.1f64, 0.25, 0.5, 0.9, 1e-7] {
            let a = vaaler_w(t).unwrap();
            let b = vaaler_w(-t).unwrap();
            assert!((a - b).abs() < 1e-12);
        }
        assert!(vaaler_w(1.0).is_err());
        assert!(vaaler_w(-1.5).is_err());
    }

    #[test]
    fn series_and_direct_w_agree() {
        // both evaluation branches near the 1e-6 switch point
        for t in [9e-7f64, 1.1e-6, 5e-7, 2e-6] {
            let direct = PI * t * (PI * t).cos() / (PI * t).sin() * (1.0 - t) + t;
            assert!((vaaler_w(t).unwrap() - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn psi_star_examples() {
        for h in [1u32, 5, 40] {
            assert_eq!(psi_star(0.0, h).unwrap(), 0.0);
            assert!(psi_star(0.5, h).unwrap().abs() < 1e-13);
        }
        // single-term value W(1/2) sin(pi/2)/pi = 1/(2 pi)
        let v = psi_star(0.25, 1).unwrap();
        assert!((v - 0.5 / PI).abs() < 1e-15);
    }

    #[test]
    fn psi_star_complex_path_is_real() {
        use num::complex::Complex64;
        let kernel = VaalerKernel::new(25).unwrap();
        for &x in &[0.1, 0.37, 0.5, 0.99, 1.6] {
            let mut z = Complex64::new(0.0, 0.0);
            let hp1 = 26.0;
            for h in 1..=25i32 {
                for sign in [1i32, -1] {
                    let hh = (sign * h) as f64;
                    let w = vaaler_w(hh / hp1).unwrap();
                    let coef = Complex64::new(0.0, 2.0 * PI * hh).finv() * w;
                    z += coef * Complex64::from_polar(1.0, 2.0 * PI * hh * x);
                }
            }
            assert!(z.im.abs() < 1e-12, "imaginary residue {}", z.im);
            assert!((z.re - kernel.psi_star(x)).abs() < 1e-12);
        }
    }

    #[test]
    fn fejer_examples() {
        assert!((fejer_delta(0.0, 1) - 0.5).abs() < 1e-15);
        for h in [1u32, 4, 10, 100] {
            assert!((fejer_delta(0.0, h) - 0.5).abs() < 1e-13);
        }
        assert!(fejer_delta(0.5, 1).abs() < 1e-15);
    }

    #[test]
    fn fejer_paths_agree() {
        // closed form vs direct sum at pseudo-random non-integer points
        let mut x = 0.123456789f64;
        for _ in 0..1000 {
            x = (x * 997.0 + 0.618).fract();
            for h in [1u32, 4, 10, 50] {
                let a = fejer_delta(x, h);
                let b = fejer_delta_direct(x, h);
                assert!((a - b).abs() < 1e-10, "x={x} H={h}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn fejer_nonnegative_on_grid() {
        for h in [1u32, 4, 10, 100] {
            for j in 0..=2000 {
                let x = j as f64 / 2000.0;
                assert!(fejer_delta(x, h) >= -1e-12);
            }
        }
    }

    #[test]
    fn gap_scan_holds_inequality() {
        for h in [1u32, 4, 10] {
            let scan = vaaler_gap_scan(h, 1000).unwrap();
            assert!(
                scan.max_violation <= 1e-9,
                "H={h}: violation {}",
                scan.max_violation
            );
            assert!(scan.min_delta >= -1e-12);
        }
    }

    #[test]
    fn gap_tight_at_integers() {
        // |psi*(0) - psi(0)| = 1/2 = delta(0): the bound is attained
        let kernel = VaalerKernel::new(7).unwrap();
        let gap = (kernel.psi_star(0.0) - sawtooth(0.0)).abs() - fejer_delta(0.0, 7);
        assert!(gap.abs() < 1e-15);
    }

    #[test]
    fn psi_star_odd_symmetry() {
        let kernel = VaalerKernel::new(33).unwrap();
        for j in 1..100 {
            let x = j as f64 / 101.0;
            let a = kernel.psi_star(1.0 - x);
            let b = -kernel.psi_star(x);
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn grid_includes_integer_neighborhood() {
        let grid = gap_scan_grid(100);
        assert!(grid.contains(&0.0));
        assert!(grid.contains(&1.0));
        assert!(grid.iter().any(|&x| x < 0.0));
        assert!(grid.iter().any(|&x| (x - 1.0).abs() < 1e-10 && x > 1.0));
    }
}
