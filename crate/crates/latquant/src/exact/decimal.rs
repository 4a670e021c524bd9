//! High-precision decimal evaluation of exact values and their fractional
//! powers, used for reporting quantities like `G` whose exact form leaves
//! the working field (e.g. `Vol^(2/n)` for general `n`).

use super::{ExactScalar, Rational};
use num_bigint::BigInt;
use num_integer::{Integer, Roots};
use num_traits::{Signed, ToPrimitive, Zero};

const GUARD: u32 = 12;

/// Fixed-point value `mant / 10^scale`.
#[derive(Debug, Clone)]
pub struct Dec {
    pub mant: BigInt,
    pub scale: u32,
}

impl Dec {
    fn pow10(k: u32) -> BigInt {
        BigInt::from(10u8).pow(k)
    }

    /// Truncate a rational to fixed point (rounding toward zero).
    pub fn from_rational(r: &Rational, scale: u32) -> Dec {
        let mant = (r.numer() * Self::pow10(scale)).div_floor(r.denom());
        Dec { mant, scale }
    }

    /// Evaluate `p + q√d` to fixed point.
    pub fn from_scalar(x: &ExactScalar, scale: u32) -> Dec {
        match x.field_d() {
            None => Self::from_rational(x.rational_part(), scale),
            Some(d) => {
                let p = Self::from_rational(x.rational_part(), scale);
                let q = &x.quadratic_part();
                // √d at the working scale: floor(√(d·10^(2·scale)))
                let root = (BigInt::from(d) * Self::pow10(2 * scale)).sqrt();
                let q_scaled = (q.numer() * root).div_floor(q.denom());
                Dec {
                    mant: p.mant + q_scaled,
                    scale,
                }
            }
        }
    }

    pub fn mul(&self, other: &Dec) -> Dec {
        assert_eq!(self.scale, other.scale);
        Dec {
            mant: (&self.mant * &other.mant).div_floor(&Self::pow10(self.scale)),
            scale: self.scale,
        }
    }

    pub fn div(&self, other: &Dec) -> Dec {
        assert_eq!(self.scale, other.scale);
        assert!(!other.mant.is_zero());
        Dec {
            mant: (&self.mant * Self::pow10(self.scale)).div_floor(&other.mant),
            scale: self.scale,
        }
    }

    /// Integer `n`-th root in fixed point (value must be nonnegative).
    pub fn nth_root(&self, n: u32) -> Dec {
        assert!(!self.mant.is_negative());
        // (mant/10^s)^(1/n) = nthroot(mant · 10^(s(n−1))) / 10^s
        let scaled = &self.mant * Self::pow10(self.scale * (n - 1));
        Dec {
            mant: scaled.nth_root(n),
            scale: self.scale,
        }
    }

    pub fn to_f64(&self) -> f64 {
        let r = Rational::new(self.mant.clone(), Self::pow10(self.scale));
        r.to_f64().unwrap_or(f64::NAN)
    }

    /// Decimal string with `digits` fractional digits (truncated).
    pub fn to_string_digits(&self, digits: u32) -> String {
        assert!(digits <= self.scale);
        let neg = self.mant.is_negative();
        let mant = self.mant.abs() / Self::pow10(self.scale - digits);
        let (int, frac) = mant.div_rem(&Self::pow10(digits));
        let sign = if neg { "-" } else { "" };
        format!("{sign}{int}.{frac:0>width$}", width = digits as usize)
    }
}

/// Decimal string of an exact scalar, truncated to `digits` fractional
/// digits (computed with guard digits).
pub fn scalar_decimal(x: &ExactScalar, digits: u32) -> String {
    Dec::from_scalar(x, digits + GUARD).to_string_digits(digits)
}

/// `base^(num/den)` as fixed point, for positive `base` in the working
/// field. Computed as the `den`-th root of the exact power `base^num`.
pub fn pow_frac(base: &ExactScalar, num: i64, den: u32, digits: u32) -> Dec {
    assert!(base.is_positive(), "fractional power of nonpositive base");
    let scale = digits + GUARD;
    let exact_pow = base.pow_i64(num);
    Dec::from_scalar(&exact_pow, scale).nth_root(den)
}

/// Quantizer constant `G = U / (n · Vol^((n+2)/n))` as a high-precision
/// decimal string with `digits` fractional digits.
pub fn quantizer_decimal(u: &ExactScalar, vol: &ExactScalar, n: u32, digits: u32) -> String {
    let scale = digits + GUARD;
    let u_dec = Dec::from_scalar(u, scale);
    let denom = pow_frac(vol, n as i64 + 2, n, digits).mul(&Dec::from_scalar(
        &ExactScalar::from_int(n as i64),
        scale,
    ));
    u_dec.div(&denom).to_string_digits(digits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn r(n: i64, m: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(m))
    }

    #[test]
    fn sqrt3_to_thirty_digits() {
        let s = ExactScalar::sqrt_d(r(1, 1), 3);
        let text = scalar_decimal(&s, 30);
        assert_eq!(text, "1.732050807568877293527446341505");
    }

    #[test]
    fn rational_decimal() {
        assert_eq!(scalar_decimal(&ExactScalar::ratio(1, 12), 10), "0.0833333333");
        assert_eq!(scalar_decimal(&ExactScalar::ratio(-1, 8), 4), "-0.1250");
    }

    #[test]
    fn k12_quantizer_decimal() {
        // G(K12) = 797361941/(6567561000·√3): scalar U = 12·797361941/243243000,
        // Vol = 27, n = 12.
        let u = ExactScalar::from_rational(r(797361941 * 12, 243243000));
        let vol = ExactScalar::from_int(27);
        let g = quantizer_decimal(&u, &vol, 12, 10);
        assert!(g.starts_with("0.0700956"), "{g}");
    }

    #[test]
    fn fractional_power() {
        // 27^(14/12) = 27·√3 ≈ 46.7653718043596
        let d = pow_frac(&ExactScalar::from_int(27), 14, 12, 20);
        assert!((d.to_f64() - 27.0 * 3f64.sqrt()).abs() < 1e-12);
    }
}
