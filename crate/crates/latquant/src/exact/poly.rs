//! Laurent polynomials in one parameter, with exact coefficients.

use super::{ExactError, ExactScalar, Rational};
use num_traits::{Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// A Laurent polynomial `Σ c_e · a^e` with integer exponents that may be
/// negative. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ParamPolynomial {
    coeffs: BTreeMap<i64, ExactScalar>,
}

impl ParamPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_coeffs(coeffs: impl IntoIterator<Item = (i64, ExactScalar)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in coeffs {
            p.add_term(e, c);
        }
        p
    }

    pub fn constant(c: ExactScalar) -> Self {
        Self::from_coeffs([(0, c)])
    }

    /// The monomial `c·a^e`.
    pub fn monomial(e: i64, c: ExactScalar) -> Self {
        Self::from_coeffs([(e, c)])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn add_term(&mut self, e: i64, c: ExactScalar) {
        if c.is_zero() {
            return;
        }
        match self.coeffs.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get() + &c;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn coeff(&self, e: i64) -> ExactScalar {
        self.coeffs.get(&e).cloned().unwrap_or_else(ExactScalar::zero)
    }

    /// Exponent/coefficient pairs in ascending exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &ExactScalar)> {
        self.coeffs.iter().map(|(e, c)| (*e, c))
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    pub fn map_coeffs(&self, f: impl Fn(&ExactScalar) -> ExactScalar) -> Self {
        Self::from_coeffs(self.terms().map(|(e, c)| (e, f(c))))
    }

    /// Substitute `a^k` for `a`, i.e. map exponent `e ↦ k·e`.
    pub fn stretch_exponents(&self, k: i64) -> Self {
        Self::from_coeffs(self.terms().map(|(e, c)| (e * k, c.clone())))
    }

    /// Multiply by `a^k`.
    pub fn shift_exponents(&self, k: i64) -> Self {
        Self::from_coeffs(self.terms().map(|(e, c)| (e + k, c.clone())))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in other.terms() {
            out.add_term(e, -c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in other.terms() {
                out.add_term(e1 + e2, c1 * c2);
            }
        }
        out
    }

    pub fn scale(&self, c: &ExactScalar) -> Self {
        self.map_coeffs(|x| x * c)
    }

    /// Formal derivative `d/da`.
    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.terms()
                .filter(|(e, _)| *e != 0)
                .map(|(e, c)| (e - 1, c * &ExactScalar::from_int(e))),
        )
    }

    /// Evaluate at a rational `a`. Requires `a ≠ 0` when negative exponents
    /// are present.
    pub fn eval_rational(&self, a: &Rational) -> ExactScalar {
        assert!(
            !a.is_zero() || self.min_exponent().map_or(true, |e| e >= 0),
            "evaluation at 0 with negative exponents"
        );
        let mut acc = ExactScalar::zero();
        let sa = ExactScalar::from_rational(a.clone());
        for (e, c) in self.terms() {
            acc = &acc + &(c * &sa.pow_i64(e));
        }
        acc
    }

    pub fn eval_scalar(&self, a: &ExactScalar) -> ExactScalar {
        let mut acc = ExactScalar::zero();
        for (e, c) in self.terms() {
            acc = &acc + &(c * &a.pow_i64(e));
        }
        acc
    }

    pub fn eval_f64(&self, a: f64) -> f64 {
        self.terms()
            .map(|(e, c)| c.shadow() * a.powi(e as i32))
            .sum()
    }

    /// Exact sign of the value at a rational point.
    pub fn sign_at(&self, a: &Rational) -> std::cmp::Ordering {
        self.eval_rational(a).sign()
    }

    /// Serialize as an exponent → exact-string map (deterministic order).
    pub fn to_string_map(&self) -> BTreeMap<i64, String> {
        self.terms().map(|(e, c)| (e, c.to_string_exact())).collect()
    }
}

impl fmt::Display for ParamPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (e, c) in self.coeffs.iter().rev() {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({})*a^{}", c.to_string_exact(), e)?;
        }
        Ok(())
    }
}

/// Interpolate a Laurent polynomial on the given exponent basis through
/// exactly computed samples `(a_i, value_i)`.
///
/// The first `basis.len()` samples fix the coefficients through an exact
/// linear solve; any further samples are consistency checks that must be
/// reproduced with zero error, otherwise the basis is wrong and a
/// [`ExactError::FitMismatch`] is returned.
pub fn laurent_fit(
    samples: &[(Rational, ExactScalar)],
    basis: &[i64],
) -> Result<ParamPolynomial, ExactError> {
    let k = basis.len();
    if samples.len() < k {
        return Err(ExactError::Degenerate(format!(
            "{} samples for {} basis exponents",
            samples.len(),
            k
        )));
    }
    {
        let mut seen = std::collections::HashSet::new();
        for (a, _) in samples {
            if !a.is_positive() {
                return Err(ExactError::Degenerate(format!("sample abscissa {a} not positive")));
            }
            if !seen.insert(a.clone()) {
                return Err(ExactError::Degenerate(format!("duplicate abscissa {a}")));
            }
        }
    }

    // rows: [a_i^{e_0}, ..., a_i^{e_{k-1}} | value_i]
    let mut m: Vec<Vec<ExactScalar>> = Vec::with_capacity(k);
    for (a, v) in samples.iter().take(k) {
        let sa = ExactScalar::from_rational(a.clone());
        let mut row: Vec<ExactScalar> = basis.iter().map(|e| sa.pow_i64(*e)).collect();
        row.push(v.clone());
        m.push(row);
    }

    // Gaussian elimination with exact pivots.
    let mut coeffs = vec![ExactScalar::zero(); k];
    for col in 0..k {
        let pivot = (col..k)
            .find(|&r| !m[r][col].is_zero())
            .ok_or_else(|| ExactError::Degenerate("singular interpolation system".into()))?;
        m.swap(col, pivot);
        let inv = m[col][col].inverse();
        for x in m[col][col..].iter_mut() {
            *x = &*x * &inv;
        }
        for r in 0..k {
            if r != col && !m[r][col].is_zero() {
                let factor = m[r][col].clone();
                for c in col..=k {
                    let delta = &factor * &m[col][c];
                    m[r][c] = &m[r][c] - &delta;
                }
            }
        }
    }
    for (i, c) in coeffs.iter_mut().enumerate() {
        *c = m[i][k].clone();
    }

    let poly = ParamPolynomial::from_coeffs(basis.iter().copied().zip(coeffs));

    // held-out exactness
    for (a, v) in samples.iter().skip(k) {
        if &poly.eval_rational(a) != v {
            return Err(ExactError::FitMismatch(a.to_string()));
        }
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn r(n: i64, m: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(m))
    }

    #[test]
    fn fit_a_plus_inverse_a() {
        // g(a) = a + 1/a sampled at 1, 2, 3
        let samples: Vec<(Rational, ExactScalar)> = [1, 2, 3]
            .iter()
            .map(|&n| {
                let a = r(n, 1);
                let v = ExactScalar::from_rational(&a + a.recip());
                (a, v)
            })
            .collect();
        let p = laurent_fit(&samples, &[-1, 1]).unwrap();
        assert_eq!(p.coeff(-1), ExactScalar::one());
        assert_eq!(p.coeff(1), ExactScalar::one());
        assert_eq!(p.coeff(0), ExactScalar::zero());
    }

    #[test]
    fn fit_constant() {
        let samples = vec![
            (r(1, 2), ExactScalar::ratio(7, 3)),
            (r(5, 2), ExactScalar::ratio(7, 3)),
        ];
        let p = laurent_fit(&samples, &[0]).unwrap();
        assert_eq!(p.coeff(0), ExactScalar::ratio(7, 3));
    }

    #[test]
    fn inconsistent_overdetermined_fit_fails() {
        // quadratic data on a linear basis
        let samples: Vec<(Rational, ExactScalar)> = [1, 2, 3]
            .iter()
            .map(|&n| (r(n, 1), ExactScalar::from_int(n * n)))
            .collect();
        assert!(matches!(
            laurent_fit(&samples, &[0, 1]),
            Err(ExactError::FitMismatch(_))
        ));
    }

    #[test]
    fn derivative_of_laurent() {
        // d/da (a⁻¹ + a³) = −a⁻² + 3a²
        let p = ParamPolynomial::from_coeffs([
            (-1, ExactScalar::one()),
            (3, ExactScalar::one()),
        ]);
        let d = p.derivative();
        assert_eq!(d.coeff(-2), ExactScalar::from_int(-1));
        assert_eq!(d.coeff(2), ExactScalar::from_int(3));
    }

    #[test]
    fn eval_matches_shadow() {
        let p = ParamPolynomial::from_coeffs([
            (-1, ExactScalar::ratio(1, 3)),
            (2, ExactScalar::ratio(-7, 5)),
        ]);
        let a = r(3, 2);
        let exact = p.eval_rational(&a).shadow();
        let float = p.eval_f64(1.5);
        assert!((exact - float).abs() < 1e-12);
    }
}
