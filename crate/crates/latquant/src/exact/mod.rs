//! Exact scalar arithmetic over `Q` and a single quadratic extension `Q(√d)`.
//!
//! Every geometric quantity in this crate is an [`ExactScalar`]: a rational
//! number or an element `p + q√d` of a quadratic field, together with an `f64`
//! shadow that is refreshed from the exact value on every construction. The
//! shadow is used for pre-filtering and pivot selection; all decisions that
//! affect results are made on the exact value.
//!
//! A lattice context fixes one `d` (e.g. `d = 3` for the Coxeter–Todd
//! lattice). Mixing two different extensions is rejected.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};
use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

pub mod decimal;
pub mod poly;
pub mod roots;

pub use poly::ParamPolynomial;
pub use roots::{isolate_positive_roots, IsolatingInterval};

/// Arbitrary-precision rational, always reduced with positive denominator.
pub type Rational = BigRational;

/// Errors from the exact arithmetic layer.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("field mismatch: cannot combine sqrt({0}) with sqrt({1})")]
    FieldMismatch(u64, u64),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("fit mismatch: sample at a = {0} not reproduced by the fitted polynomial")]
    FitMismatch(String),
    #[error("value has no square root in the working field")]
    NoExactSqrt,
    #[error("cannot parse exact scalar from {0:?}")]
    Parse(String),
}

/// `p + q√d` with `p, q` rational and `d > 1` squarefree. `q` may be zero
/// only transiently inside arithmetic; [`ExactScalar`] collapses that case
/// to its rational variant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadraticNumber {
    pub p: Rational,
    pub q: Rational,
    pub d: u64,
}

impl QuadraticNumber {
    /// Sign of `p + q√d`, computed without floating point by comparing
    /// `p²` against `d·q²` when the two terms have opposite signs.
    pub fn sign(&self) -> Ordering {
        let sp = rat_sign(&self.p);
        let sq = rat_sign(&self.q);
        match (sp, sq) {
            (Ordering::Equal, s) | (s, Ordering::Equal) => s,
            (a, b) if a == b => a,
            (a, b) => {
                let p2 = &self.p * &self.p;
                let dq2 = &self.q * &self.q * Rational::from(BigInt::from(self.d));
                match p2.cmp(&dq2) {
                    Ordering::Greater => a,
                    Ordering::Less => b,
                    // p² = d·q² with d squarefree > 1 forces p = q = 0.
                    Ordering::Equal => Ordering::Equal,
                }
            }
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.p.to_f64().unwrap_or(f64::NAN)
            + self.q.to_f64().unwrap_or(f64::NAN) * (self.d as f64).sqrt()
    }
}

fn rat_sign(r: &Rational) -> Ordering {
    if r.is_zero() {
        Ordering::Equal
    } else if r.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

#[derive(Debug, Clone)]
enum Value {
    Rat(Rational),
    Quad(QuadraticNumber),
}

/// A number in `Q` or `Q(√d)` with a cached floating-point shadow.
///
/// Equality, ordering and hashing act on the exact value only. Arithmetic
/// between scalars of *different* quadratic extensions panics; contexts
/// never mix extensions, and [`exact_compare`] offers a checked entry point.
#[derive(Debug, Clone)]
pub struct ExactScalar {
    value: Value,
    shadow: f64,
}

impl ExactScalar {
    pub fn from_rational(r: Rational) -> Self {
        let shadow = r.to_f64().unwrap_or(f64::NAN);
        ExactScalar {
            value: Value::Rat(r),
            shadow,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(Rational::from(BigInt::from(n)))
    }

    /// `n/m` as an exact scalar. Panics if `m = 0`.
    pub fn ratio(n: i64, m: i64) -> Self {
        Self::from_rational(Rational::new(BigInt::from(n), BigInt::from(m)))
    }

    /// `p + q√d`; collapses to the rational variant when `q = 0`.
    pub fn quadratic(p: Rational, q: Rational, d: u64) -> Self {
        assert!(d > 1, "quadratic extension needs d > 1");
        if q.is_zero() {
            Self::from_rational(p)
        } else {
            let quad = QuadraticNumber { p, q, d };
            let shadow = quad.to_f64();
            ExactScalar {
                value: Value::Quad(quad),
                shadow,
            }
        }
    }

    /// `q√d` shorthand.
    pub fn sqrt_d(q: Rational, d: u64) -> Self {
        Self::quadratic(Rational::zero(), q, d)
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    pub fn is_zero(&self) -> bool {
        match &self.value {
            Value::Rat(r) => r.is_zero(),
            Value::Quad(_) => false,
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(&self.value, Value::Rat(r) if r.is_one())
    }

    /// The rational part `p`; for rationals this is the value itself.
    pub fn rational_part(&self) -> &Rational {
        match &self.value {
            Value::Rat(r) => r,
            Value::Quad(x) => &x.p,
        }
    }

    /// The coefficient of `√d` (zero for rationals).
    pub fn quadratic_part(&self) -> Rational {
        match &self.value {
            Value::Rat(_) => Rational::zero(),
            Value::Quad(x) => x.q.clone(),
        }
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match &self.value {
            Value::Rat(r) => Some(r),
            Value::Quad(_) => None,
        }
    }

    /// The extension tag: `None` for plain rationals.
    pub fn field_d(&self) -> Option<u64> {
        match &self.value {
            Value::Rat(_) => None,
            Value::Quad(x) => Some(x.d),
        }
    }

    /// Floating-point shadow, refreshed from the exact value at construction.
    pub fn shadow(&self) -> f64 {
        self.shadow
    }

    /// Recompute the shadow from the exact value.
    pub fn refreshed_shadow(&self) -> f64 {
        match &self.value {
            Value::Rat(r) => r.to_f64().unwrap_or(f64::NAN),
            Value::Quad(x) => x.to_f64(),
        }
    }

    pub fn sign(&self) -> Ordering {
        match &self.value {
            Value::Rat(r) => rat_sign(r),
            Value::Quad(x) => x.sign(),
        }
    }

    pub fn is_positive(&self) -> bool {
        self.sign() == Ordering::Greater
    }

    pub fn is_negative(&self) -> bool {
        self.sign() == Ordering::Less
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    /// Galois conjugate `p − q√d`; identity on rationals.
    pub fn conjugate(&self) -> Self {
        match &self.value {
            Value::Rat(_) => self.clone(),
            Value::Quad(x) => Self::quadratic(x.p.clone(), -x.q.clone(), x.d),
        }
    }

    /// Multiplicative inverse. Panics on zero.
    pub fn inverse(&self) -> Self {
        match &self.value {
            Value::Rat(r) => {
                assert!(!r.is_zero(), "division by zero");
                Self::from_rational(r.recip())
            }
            Value::Quad(x) => {
                // (p + q√d)⁻¹ = (p − q√d) / (p² − d·q²)
                let norm = &x.p * &x.p - &x.q * &x.q * Rational::from(BigInt::from(x.d));
                assert!(!norm.is_zero(), "division by zero");
                Self::quadratic(&x.p / &norm, -&x.q / &norm, x.d)
            }
        }
    }

    /// Exact square root within the working field, if one exists:
    /// rationals may land in `Q` or on the `q√d` axis, and `p + q√d`
    /// is denested via `(a + b√d)² = a² + db² + 2ab√d` when possible.
    pub fn sqrt_exact(&self, d_hint: Option<u64>) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        match &self.value {
            Value::Rat(r) => {
                if let Some(s) = rational_sqrt(r) {
                    return Some(Self::from_rational(s));
                }
                if let Some(d) = d_hint {
                    // r = s²·d  ⇒  √r = s√d
                    let rd = r / Rational::from(BigInt::from(d));
                    if let Some(s) = rational_sqrt(&rd) {
                        return Some(Self::sqrt_d(s, d));
                    }
                }
                None
            }
            Value::Quad(x) => {
                // want a, b with a² + d·b² = p and 2ab = q
                let d = Rational::from(BigInt::from(x.d));
                let disc = &x.p * &x.p - &d * &x.q * &x.q;
                let t = rational_sqrt(&disc)?;
                for tt in [t.clone(), -t] {
                    let a2 = (&x.p + &tt) / Rational::from(BigInt::from(2));
                    if a2.is_negative() {
                        continue;
                    }
                    if let Some(a) = rational_sqrt(&a2) {
                        if a.is_zero() {
                            continue;
                        }
                        let b = &x.q / (Rational::from(BigInt::from(2)) * &a);
                        let cand = Self::quadratic(a, b, x.d);
                        if cand.is_positive() && &(&cand * &cand) == self {
                            return Some(cand);
                        }
                        let cand = -cand;
                        if cand.is_positive() && &(&cand * &cand) == self {
                            return Some(cand);
                        }
                    }
                }
                None
            }
        }
    }

    /// Exact `n`-th root within the working field, if one exists.
    pub fn nth_root_exact(&self, n: u32, d_hint: Option<u64>) -> Option<Self> {
        if n == 1 {
            return Some(self.clone());
        }
        if let Some(r) = self.as_rational() {
            if let Some(s) = rational_nth_root(r, n) {
                return Some(Self::from_rational(s));
            }
            if let Some(d) = d_hint {
                // (s√d)^n rational only for even n: s^n · d^(n/2)
                if n % 2 == 0 {
                    let dk = Rational::from(BigInt::from(d).pow(n / 2));
                    if let Some(s) = rational_nth_root(&(r / dk), n) {
                        return Some(Self::sqrt_d(s, d));
                    }
                }
            }
            None
        } else if n % 2 == 0 {
            self.sqrt_exact(d_hint)
                .and_then(|s| s.nth_root_exact(n / 2, d_hint))
        } else {
            None
        }
    }

    pub fn pow_i64(&self, e: i64) -> Self {
        if e == 0 {
            return Self::one();
        }
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut acc = Self::one();
        for _ in 0..e.unsigned_abs() {
            acc = &acc * &base;
        }
        acc
    }

    /// Serialize as `"p/q"` or `"p/q+r/s*sqrt(d)"`.
    pub fn to_string_exact(&self) -> String {
        match &self.value {
            Value::Rat(r) => fmt_rational(r),
            Value::Quad(x) => {
                let qs = fmt_rational(&x.q.abs());
                let op = if x.q.is_negative() { "-" } else { "+" };
                format!("{}{}{}*sqrt({})", fmt_rational(&x.p), op, qs, x.d)
            }
        }
    }

    /// Parse the formats produced by [`Self::to_string_exact`].
    pub fn parse(s: &str) -> Result<Self, ExactError> {
        let s = s.trim();
        if let Some(idx) = s.find("sqrt(") {
            let d: u64 = s[idx + 5..]
                .trim_end_matches(')')
                .parse()
                .map_err(|_| ExactError::Parse(s.into()))?;
            let head = &s[..idx].trim_end_matches('*');
            // split head into p and signed q at the last +/- that is not leading
            let bytes = head.as_bytes();
            let mut split = None;
            for i in (1..bytes.len()).rev() {
                if bytes[i] == b'+' || bytes[i] == b'-' {
                    if bytes[i - 1] == b'/' {
                        continue;
                    }
                    split = Some(i);
                    break;
                }
            }
            let (p_str, q_str) = match split {
                Some(i) => (&head[..i], &head[i..]),
                None => ("0", &head[..]),
            };
            let p = parse_rational(p_str)?;
            let q_str = q_str.trim_end_matches('*');
            let q = if q_str.is_empty() || q_str == "+" {
                Rational::one()
            } else if q_str == "-" {
                -Rational::one()
            } else {
                parse_rational(q_str)?
            };
            Ok(Self::quadratic(p, q, d))
        } else {
            Ok(Self::from_rational(parse_rational(s)?))
        }
    }

    fn promote(&self, d: u64) -> QuadraticNumber {
        match &self.value {
            Value::Rat(r) => QuadraticNumber {
                p: r.clone(),
                q: Rational::zero(),
                d,
            },
            Value::Quad(x) => {
                assert_eq!(x.d, d, "field mismatch: sqrt({}) vs sqrt({})", x.d, d);
                x.clone()
            }
        }
    }

    fn common_d(&self, other: &Self) -> Option<u64> {
        match (self.field_d(), other.field_d()) {
            (None, None) => None,
            (Some(d), None) | (None, Some(d)) => Some(d),
            (Some(a), Some(b)) => {
                assert_eq!(a, b, "field mismatch: sqrt({a}) vs sqrt({b})");
                Some(a)
            }
        }
    }
}

fn fmt_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        format!("{}", r.numer())
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn parse_rational(s: &str) -> Result<Rational, ExactError> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| ExactError::Parse(s.into()))?;
    let d: BigInt = den.parse().map_err(|_| ExactError::Parse(s.into()))?;
    if d.is_zero() {
        return Err(ExactError::Parse(s.into()));
    }
    Ok(Rational::new(n, d))
}

/// Exact rational square root, if `r` is a perfect square.
pub fn rational_sqrt(r: &Rational) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = int_sqrt_exact(r.numer())?;
    let d = int_sqrt_exact(r.denom())?;
    Some(Rational::new(n, d))
}

/// Exact rational `n`-th root, if one exists.
pub fn rational_nth_root(r: &Rational, n: u32) -> Option<Rational> {
    if r.is_negative() && n % 2 == 0 {
        return None;
    }
    let num = int_nth_root_exact(r.numer(), n)?;
    let den = int_nth_root_exact(r.denom(), n)?;
    Some(Rational::new(num, den))
}

fn int_sqrt_exact(n: &BigInt) -> Option<BigInt> {
    int_nth_root_exact(n, 2)
}

fn int_nth_root_exact(n: &BigInt, k: u32) -> Option<BigInt> {
    use num_integer::Roots;
    if n.is_negative() {
        if k % 2 == 0 {
            return None;
        }
        return int_nth_root_exact(&-n, k).map(|r| -r);
    }
    let r = n.nth_root(k);
    if num_traits::Pow::pow(r.clone(), k) == *n {
        Some(r)
    } else {
        None
    }
}

/// Sign of `x − y`, computed exactly. Errors when the operands live in
/// different quadratic extensions.
pub fn exact_compare(x: &ExactScalar, y: &ExactScalar) -> Result<Ordering, ExactError> {
    match (x.field_d(), y.field_d()) {
        (Some(a), Some(b)) if a != b => Err(ExactError::FieldMismatch(a, b)),
        _ => Ok((x - y).sign()),
    }
}

impl PartialEq for ExactScalar {
    fn eq(&self, other: &Self) -> bool {
        match (&self.value, &other.value) {
            (Value::Rat(a), Value::Rat(b)) => a == b,
            (Value::Quad(a), Value::Quad(b)) => a == b,
            _ => false,
        }
    }
}
impl Eq for ExactScalar {}

impl Hash for ExactScalar {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &self.value {
            Value::Rat(r) => {
                0u8.hash(state);
                r.hash(state);
            }
            Value::Quad(x) => {
                1u8.hash(state);
                x.hash(state);
            }
        }
    }
}

impl PartialOrd for ExactScalar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactScalar {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).sign()
    }
}

macro_rules! impl_binop {
    ($trait:ident, $method:ident, |$a:ident, $b:ident| $rat:expr, |$x:ident, $y:ident, $d:ident| $quad:expr) => {
        impl std::ops::$trait<&ExactScalar> for &ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &ExactScalar) -> ExactScalar {
                match self.common_d(rhs) {
                    None => {
                        let ($a, $b) = (self.rational_part(), rhs.rational_part());
                        ExactScalar::from_rational($rat)
                    }
                    Some(d) => {
                        let ($x, $y, $d) = (self.promote(d), rhs.promote(d), d);
                        $quad
                    }
                }
            }
        }
        impl std::ops::$trait<ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                std::ops::$trait::$method(&self, &rhs)
            }
        }
        impl std::ops::$trait<&ExactScalar> for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: &ExactScalar) -> ExactScalar {
                std::ops::$trait::$method(&self, rhs)
            }
        }
    };
}

impl_binop!(Add, add, |a, b| a + b, |x, y, d| ExactScalar::quadratic(
    x.p + y.p,
    x.q + y.q,
    d
));
impl_binop!(Sub, sub, |a, b| a - b, |x, y, d| ExactScalar::quadratic(
    x.p - y.p,
    x.q - y.q,
    d
));
impl_binop!(Mul, mul, |a, b| a * b, |x, y, d| {
    let dd = Rational::from(BigInt::from(d));
    ExactScalar::quadratic(&x.p * &y.p + &dd * &x.q * &y.q, &x.p * &y.q + &x.q * &y.p, d)
});

impl std::ops::Div<&ExactScalar> for &ExactScalar {
    type Output = ExactScalar;
    fn div(self, rhs: &ExactScalar) -> ExactScalar {
        self * &rhs.inverse()
    }
}
impl std::ops::Div<ExactScalar> for ExactScalar {
    type Output = ExactScalar;
    fn div(self, rhs: ExactScalar) -> ExactScalar {
        &self / &rhs
    }
}

impl std::ops::Neg for &ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        match &self.value {
            Value::Rat(r) => ExactScalar::from_rational(-r),
            Value::Quad(x) => ExactScalar::quadratic(-x.p.clone(), -x.q.clone(), x.d),
        }
    }
}
impl std::ops::Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        -&self
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_string_exact())
    }
}

/// Rational from an `f64` that is known to be exactly representable
/// (used only in tests and small constructions).
pub fn rational_from_f64_exact(x: f64) -> Rational {
    Rational::from_f64(x).expect("finite float")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, m: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(m))
    }

    #[test]
    fn compare_rational_vs_sqrt3() {
        // 1 < (2/3)·√3 since 1² < 4/3
        let one = ExactScalar::one();
        let x = ExactScalar::sqrt_d(r(2, 3), 3);
        assert_eq!(exact_compare(&one, &x).unwrap(), Ordering::Less);
    }

    #[test]
    fn sqrt3_squared_is_rational_three() {
        let s = ExactScalar::sqrt_d(r(1, 1), 3);
        let sq = &s * &s;
        assert_eq!(sq, ExactScalar::from_int(3));
        assert_eq!(
            exact_compare(&sq, &ExactScalar::from_int(3)).unwrap(),
            Ordering::Equal
        );
    }

    #[test]
    fn paper_decimal_is_a_rounding() {
        // 797361941/243243000 vs the printed decimal 3.2780468
        let exact = ExactScalar::from_rational(r(797361941, 243243000));
        let rounded = ExactScalar::from_rational(r(32780468, 10_000_000));
        assert_eq!(exact_compare(&exact, &rounded).unwrap(), Ordering::Greater);
    }

    #[test]
    fn field_mismatch_is_an_error() {
        let a = ExactScalar::sqrt_d(r(1, 1), 2);
        let b = ExactScalar::sqrt_d(r(1, 1), 3);
        assert!(matches!(
            exact_compare(&a, &b),
            Err(ExactError::FieldMismatch(2, 3))
        ));
    }

    #[test]
    fn conjugate_product_is_rational() {
        let x = ExactScalar::quadratic(r(3, 2), r(-5, 7), 3);
        let n = &x * &x.conjugate();
        assert!(n.as_rational().is_some());
        // (3/2)² − 3·(5/7)² = 9/4 − 75/49
        assert_eq!(n, ExactScalar::from_rational(r(9 * 49 - 75 * 4, 196)));
    }

    #[test]
    fn inverse_roundtrip() {
        let x = ExactScalar::quadratic(r(3, 2), r(-5, 7), 3);
        assert!((&x * &x.inverse()).is_one());
    }

    #[test]
    fn sqrt_denesting() {
        // (1 + √3)² = 4 + 2√3
        let v = ExactScalar::quadratic(r(4, 1), r(2, 1), 3);
        let s = v.sqrt_exact(Some(3)).unwrap();
        assert_eq!(s, ExactScalar::quadratic(r(1, 1), r(1, 1), 3));
        // √(3/4) = (1/2)√3
        let v = ExactScalar::from_rational(r(3, 4));
        assert_eq!(v.sqrt_exact(Some(3)).unwrap(), ExactScalar::sqrt_d(r(1, 2), 3));
        // √2 is not in Q(√3)
        assert!(ExactScalar::from_int(2).sqrt_exact(Some(3)).is_none());
    }

    #[test]
    fn nth_root() {
        // 729^(1/12) = √3
        let v = ExactScalar::from_int(729);
        assert_eq!(
            v.nth_root_exact(12, Some(3)).unwrap(),
            ExactScalar::sqrt_d(r(1, 1), 3)
        );
        assert_eq!(
            ExactScalar::from_rational(r(8, 27)).nth_root_exact(3, None).unwrap(),
            ExactScalar::from_rational(r(2, 3))
        );
    }

    #[test]
    fn shadow_tracks_value() {
        let x = ExactScalar::quadratic(r(1, 3), r(2, 5), 3);
        let expect = 1.0 / 3.0 + 0.4 * 3f64.sqrt();
        assert!((x.shadow() - expect).abs() < 1e-14);
        assert!((x.refreshed_shadow() - expect).abs() < 1e-14);
    }

    #[test]
    fn parse_roundtrip() {
        for s in [
            ExactScalar::ratio(-22, 7),
            ExactScalar::from_int(5),
            ExactScalar::quadratic(r(1, 2), r(-3, 4), 3),
            ExactScalar::sqrt_d(r(1, 1), 2),
        ] {
            let text = s.to_string_exact();
            assert_eq!(ExactScalar::parse(&text).unwrap(), s, "{text}");
        }
    }
}
