//! Exact fixed-point decimals for main-term constants and error terms.
//!
//! `f64` carries ~16 significant digits; the main-term constants are carried
//! to 38 fractional digits so that 30+ significant digits survive any
//! downstream subtraction. A value is a `BigInt` mantissa with an implied
//! denominator of `10^38`.

use std::sync::OnceLock;

use num::bigint::BigInt;
use num::{BigUint, Signed, ToPrimitive, Zero};

/// Fractional decimal digits carried by every [`Fixed`] value.
pub const SCALE_DIGITS: u32 = 38;

fn scale_factor() -> &'static BigUint {
    static SCALE: OnceLock<BigUint> = OnceLock::new();
    SCALE.get_or_init(|| BigUint::from(10u32).pow(SCALE_DIGITS))
}

/// value = mantissa / 10^38, exact.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Default)]
pub struct Fixed {
    mantissa: BigInt,
}

impl Fixed {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_mantissa(mantissa: BigInt) -> Self {
        Fixed { mantissa }
    }

    /// Exact representation of the integer `v`.
    pub fn from_int(v: u128) -> Self {
        Fixed {
            mantissa: BigInt::from(v) * BigInt::from(scale_factor().clone()),
        }
    }

    /// `floor(num/den)` at fixed-point resolution; the truncation error is
    /// below one unit in the 38th fractional digit.
    pub fn from_ratio_floor(num: u128, den: u128) -> Self {
        assert!(den != 0);
        let scaled = BigUint::from(num) * scale_factor();
        Fixed {
            mantissa: BigInt::from(scaled / BigUint::from(den)),
        }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn abs(&self) -> Fixed {
        Fixed {
            mantissa: self.mantissa.abs(),
        }
    }

    pub fn add(&self, rhs: &Fixed) -> Fixed {
        Fixed {
            mantissa: &self.mantissa + &rhs.mantissa,
        }
    }

    pub fn sub(&self, rhs: &Fixed) -> Fixed {
        Fixed {
            mantissa: &self.mantissa - &rhs.mantissa,
        }
    }

    pub fn mul_u64(&self, x: u64) -> Fixed {
        Fixed {
            mantissa: &self.mantissa * BigInt::from(x),
        }
    }

    pub fn to_f64(&self) -> f64 {
        // BigInt -> f64 keeps the top 53 bits; dividing by 1e38 afterwards
        // preserves full double precision for our magnitudes.
        self.mantissa.to_f64().unwrap_or(f64::NAN) / 1e38
    }

    /// Decimal rendering rounded (half away from zero) to `sig` significant
    /// digits. Deterministic, no float round-trip.
    pub fn to_decimal_string(&self, sig: usize) -> String {
        assert!(sig >= 1);
        if self.mantissa.is_zero() {
            return "0".to_string();
        }
        let negative = self.mantissa.is_negative();
        let abs = self.mantissa.magnitude().clone();
        let digits = abs.to_string();
        let ndigits = digits.len();

        // Round |mantissa| to `sig` significant digits, tracking the implied
        // power of ten of the retained integer.
        let (rounded, mut exp10) = if ndigits <= sig {
            (abs, -(SCALE_DIGITS as i64))
        } else {
            let drop = (ndigits - sig) as u32;
            let unit = BigUint::from(10u32).pow(drop);
            let half = &unit / 2u32;
            let q = (&abs + &half) / &unit;
            (q, drop as i64 - SCALE_DIGITS as i64)
        };
        // Rounding may carry into an extra digit (e.g. 999 -> 1000); the
        // trailing zero stays, it is still `sig` significant digits.
        let mut body = rounded.to_string();

        // Lay out `body * 10^exp10` in plain decimal notation.
        let laid_out = if exp10 >= 0 {
            body.push_str(&"0".repeat(exp10 as usize));
            body
        } else {
            let frac = (-exp10) as usize;
            if body.len() > frac {
                body.insert(body.len() - frac, '.');
                body
            } else {
                let pad = frac - body.len();
                let mut s = String::from("0.");
                s.push_str(&"0".repeat(pad));
                s.push_str(&body);
                s
            }
        };
        if negative {
            format!("-{laid_out}")
        } else {
            laid_out
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_floor_basics() {
        // 1/2 = 0.5 exactly at scale 38
        let half = Fixed::from_ratio_floor(1, 2);
        assert_eq!(half.to_decimal_string(3), "0.500");
        assert!((half.to_f64() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn truncation_is_floor() {
        // 1/3 = 0.333... truncated, so 3*(1/3) < 1
        let third = Fixed::from_ratio_floor(1, 3);
        let one = Fixed::from_int(1);
        let three_thirds = third.mul_u64(3);
        assert!(three_thirds < one);
        assert!(one.sub(&three_thirds).to_f64() < 1e-37);
    }

    #[test]
    fn decimal_string_rounding() {
        let v = Fixed::from_ratio_floor(2, 3); // 0.6666...
        assert_eq!(v.to_decimal_string(4), "0.6667");
        // Carry across the leading digit keeps the extra rounded zero.
        let w = Fixed::from_ratio_floor(9999, 10000);
        assert_eq!(w.to_decimal_string(3), "1.000");
        let neg = Fixed::zero().sub(&Fixed::from_ratio_floor(1, 8));
        assert_eq!(neg.to_decimal_string(3), "-0.125");
    }

    #[test]
    fn integer_rendering() {
        assert_eq!(Fixed::from_int(17).to_decimal_string(5), "17.000");
        assert_eq!(Fixed::zero().to_decimal_string(5), "0");
    }

    #[test]
    fn ordering_tracks_value() {
        let a = Fixed::from_ratio_floor(1, 7);
        let b = Fixed::from_ratio_floor(1, 6);
        assert!(a < b);
    }
}
