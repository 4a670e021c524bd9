//! Real-root isolation for exact polynomials via Sturm sequences.

use super::poly::ParamPolynomial;
use super::{ExactError, ExactScalar, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use std::cmp::Ordering;

/// Dense polynomial with exact coefficients, ascending by degree.
#[derive(Debug, Clone, PartialEq, Eq)]
struct DensePoly(Vec<ExactScalar>);

impl DensePoly {
    fn normalize(mut v: Vec<ExactScalar>) -> Self {
        while v.last().is_some_and(|c| c.is_zero()) {
            v.pop();
        }
        DensePoly(v)
    }

    fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    fn lead(&self) -> &ExactScalar {
        self.0.last().expect("nonzero polynomial")
    }

    fn eval(&self, x: &Rational) -> ExactScalar {
        let sx = ExactScalar::from_rational(x.clone());
        let mut acc = ExactScalar::zero();
        for c in self.0.iter().rev() {
            acc = &(&acc * &sx) + c;
        }
        acc
    }

    fn sign_at(&self, x: &Rational) -> Ordering {
        self.eval(x).sign()
    }

    fn derivative(&self) -> Self {
        if self.0.len() <= 1 {
            return DensePoly(vec![]);
        }
        DensePoly::normalize(
            self.0[1..]
                .iter()
                .enumerate()
                .map(|(i, c)| c * &ExactScalar::from_int(i as i64 + 1))
                .collect(),
        )
    }

    /// Remainder of `self / rhs` (field coefficients, exact).
    fn rem(&self, rhs: &Self) -> Self {
        assert!(!rhs.is_zero());
        let mut r = self.0.clone();
        let dd = rhs.degree();
        let lead_inv = rhs.lead().inverse();
        while r.len() > dd {
            let k = r.len() - 1;
            let factor = &r[k] * &lead_inv;
            if !factor.is_zero() {
                for (j, c) in rhs.0.iter().enumerate() {
                    let idx = k - dd + j;
                    let delta = &factor * c;
                    r[idx] = &r[idx] - &delta;
                }
            }
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        DensePoly(r)
    }

    /// Scale so the leading coefficient has magnitude one (sign preserved).
    fn scaled_by_abs_lead(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let s = self.lead().abs().inverse();
        DensePoly(self.0.iter().map(|c| c * &s).collect())
    }

    fn gcd(&self, other: &Self) -> Self {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).scaled_by_abs_lead();
            a = b;
            b = r;
        }
        a
    }

    /// Exact quotient, panicking unless the division is exact.
    fn div_exact(&self, rhs: &Self) -> Self {
        assert!(!rhs.is_zero());
        let mut r = self.0.clone();
        let dd = rhs.degree();
        let lead_inv = rhs.lead().inverse();
        let mut q = vec![ExactScalar::zero(); self.0.len().saturating_sub(dd)];
        while r.len() > dd {
            let k = r.len() - 1;
            let factor = &r[k] * &lead_inv;
            q[k - dd] = factor.clone();
            for (j, c) in rhs.0.iter().enumerate() {
                let idx = k - dd + j;
                let delta = &factor * c;
                r[idx] = &r[idx] - &delta;
            }
            r.pop();
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        assert!(r.is_empty(), "inexact polynomial division");
        DensePoly::normalize(q)
    }
}

/// Sturm sequence of a squarefree polynomial.
struct Sturm {
    seq: Vec<DensePoly>,
}

impl Sturm {
    fn new(f: &DensePoly) -> Self {
        let mut seq = vec![f.clone(), f.derivative()];
        while !seq.last().unwrap().is_zero() {
            let n = seq.len();
            let r = seq[n - 2].rem(&seq[n - 1]);
            if r.is_zero() {
                break;
            }
            let neg = DensePoly(r.0.iter().map(|c| -c).collect()).scaled_by_abs_lead();
            seq.push(neg);
        }
        Sturm { seq }
    }

    fn variations_at(&self, x: &Rational) -> usize {
        let mut count = 0;
        let mut last = Ordering::Equal;
        for p in &self.seq {
            if p.is_zero() {
                continue;
            }
            let s = p.sign_at(x);
            if s == Ordering::Equal {
                continue;
            }
            if last != Ordering::Equal && s != last {
                count += 1;
            }
            last = s;
        }
        count
    }

    /// Number of distinct real roots in the half-open interval `(a, b]`.
    fn count_roots(&self, a: &Rational, b: &Rational) -> usize {
        self.variations_at(a).saturating_sub(self.variations_at(b))
    }
}

/// An interval `(lo, hi)` containing exactly one real root of the stored
/// squarefree polynomial, with opposite signs at the endpoints.
#[derive(Debug, Clone)]
pub struct IsolatingInterval {
    pub lo: Rational,
    pub hi: Rational,
    poly: DensePoly,
    /// The Laurent polynomial whose positive roots were isolated.
    pub source: ParamPolynomial,
}

impl IsolatingInterval {
    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from(BigInt::from(2))
    }

    pub fn contains(&self, x: &Rational) -> bool {
        *x > self.lo && *x < self.hi
    }

    /// Shrink the interval by exact-sign bisection until it is narrower
    /// than `width`.
    pub fn refine(&mut self, width: &Rational) {
        let two = Rational::from(BigInt::from(2));
        while self.width() > *width {
            let mid = self.midpoint();
            match self.poly.sign_at(&mid) {
                Ordering::Equal => {
                    // mid is the root; shrink symmetrically around it
                    let quarter = width / Rational::from(BigInt::from(4));
                    let lo = &mid - &quarter;
                    let hi = &mid + &quarter;
                    self.lo = if lo > self.lo { lo } else { self.lo.clone() };
                    self.hi = if hi < self.hi { hi } else { self.hi.clone() };
                    return;
                }
                s => {
                    if s == self.poly.sign_at(&self.lo) {
                        self.lo = mid;
                    } else {
                        self.hi = mid;
                    }
                }
            }
            let _ = &two;
        }
    }

    /// Refine until the width is below `10^-digits` and return the midpoint.
    pub fn refine_to_digits(&mut self, digits: u32) -> Rational {
        let w = Rational::new(BigInt::one(), BigInt::from(10u32).pow(digits));
        self.refine(&w);
        self.midpoint()
    }
}

fn laurent_to_dense(f: &ParamPolynomial) -> DensePoly {
    let shift = f.min_exponent().map_or(0, |e| (-e).max(0));
    let g = f.shift_exponents(shift);
    let deg = g.max_exponent().unwrap_or(0) as usize;
    let mut v = vec![ExactScalar::zero(); deg + 1];
    for (e, c) in g.terms() {
        v[e as usize] = c.clone();
    }
    DensePoly::normalize(v)
}

/// Isolate all distinct real roots of `f` in the open window
/// `(window.0, window.1)`, ordered ascending.
///
/// `f` may have negative exponents; multiplying by a positive power of `a`
/// does not change roots on the positive axis. Roots exactly at the window
/// endpoints are excluded.
pub fn isolate_positive_roots(
    f: &ParamPolynomial,
    window: (&Rational, &Rational),
) -> Result<Vec<IsolatingInterval>, ExactError> {
    if f.is_zero() {
        return Err(ExactError::Degenerate("zero polynomial".into()));
    }
    let (lo, hi) = window;
    if lo.is_negative() {
        return Err(ExactError::Degenerate("window must lie in a ≥ 0".into()));
    }
    if lo >= hi {
        return Ok(vec![]);
    }
    let dense = laurent_to_dense(f);
    if dense.degree() == 0 {
        return Ok(vec![]);
    }
    // squarefree part: f / gcd(f, f')
    let g = dense.gcd(&dense.derivative());
    let sf = if g.degree() == 0 {
        dense
    } else {
        dense.div_exact(&g)
    };
    let sturm = Sturm::new(&sf);

    let mut out = Vec::new();
    let total = sturm.count_roots(lo, hi);
    // exclude a root exactly at the upper endpoint
    let total = total - usize::from(sf.sign_at(hi) == Ordering::Equal);
    if total == 0 {
        return Ok(out);
    }
    let mut stack = vec![(lo.clone(), hi.clone(), total)];
    while let Some((a, b, count)) = stack.pop() {
        if count == 1 && sf.sign_at(&a) != Ordering::Equal && sf.sign_at(&b) != Ordering::Equal {
            out.push(IsolatingInterval {
                lo: a,
                hi: b,
                poly: sf.clone(),
                source: f.clone(),
            });
            continue;
        }
        // choose a split point that is not itself a root
        let two = Rational::from(BigInt::from(2));
        let mut mid = (&a + &b) / &two;
        let mut jitter = 1u32;
        while sf.sign_at(&mid) == Ordering::Equal {
            // exact root at the split: nudge by (b-a)/2^k
            jitter += 3;
            mid = &a + (&b - &a) * Rational::new(BigInt::one(), BigInt::from(2u32.pow(jitter)));
        }
        let left = sturm.count_roots(&a, &mid);
        let right = count - left;
        if left > 0 {
            stack.push((a, mid.clone(), left));
        }
        if right > 0 {
            stack.push((mid, b, right));
        }
    }
    out.sort_by(|x, y| x.lo.cmp(&y.lo));
    Ok(out)
}

/// Count distinct real roots in the half-open window `(lo, hi]`, exactly.
pub fn count_roots_in(f: &ParamPolynomial, lo: &Rational, hi: &Rational) -> usize {
    let dense = laurent_to_dense(f);
    if dense.degree() == 0 {
        return 0;
    }
    let g = dense.gcd(&dense.derivative());
    let sf = if g.degree() == 0 {
        dense
    } else {
        dense.div_exact(&g)
    };
    Sturm::new(&sf).count_roots(lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, m: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(m))
    }

    fn poly(coeffs: &[(i64, i64)]) -> ParamPolynomial {
        ParamPolynomial::from_coeffs(
            coeffs
                .iter()
                .map(|&(e, c)| (e, ExactScalar::from_int(c))),
        )
    }

    #[test]
    fn isolates_sqrt_two() {
        let f = poly(&[(2, 1), (0, -2)]); // v² − 2
        let roots = isolate_positive_roots(&f, (&r(0, 1), &r(2, 1))).unwrap();
        assert_eq!(roots.len(), 1);
        let mut iv = roots.into_iter().next().unwrap();
        iv.refine(&r(1, 1_000_000));
        let mid = iv.midpoint();
        let v = mid.numer().to_string().parse::<f64>().unwrap()
            / mid.denom().to_string().parse::<f64>().unwrap();
        assert!((v - std::f64::consts::SQRT_2).abs() < 1e-5);
    }

    #[test]
    fn window_excludes_outside_roots() {
        // (v−1)(v−3) = v² − 4v + 3 on (0, 2): only the root at 1
        let f = poly(&[(2, 1), (1, -4), (0, 3)]);
        let roots = isolate_positive_roots(&f, (&r(0, 1), &r(2, 1))).unwrap();
        assert_eq!(roots.len(), 1);
        assert!(roots[0].contains(&r(1, 1)) || roots[0].midpoint() == r(1, 1));
    }

    #[test]
    fn exact_rational_root_is_isolated() {
        // root exactly at 1/2 plus one at 5
        let f = poly(&[(2, 2), (1, -11), (0, 5)]); // 2v² − 11v + 5 = (2v−1)(v−5)
        let roots = isolate_positive_roots(&f, (&r(0, 1), &r(10, 1))).unwrap();
        assert_eq!(roots.len(), 2);
        let mut first = roots[0].clone();
        first.refine(&r(1, 1_000_000_000));
        assert!(first.contains(&r(1, 2)) || first.midpoint() == r(1, 2));
    }

    #[test]
    fn zero_polynomial_is_degenerate() {
        let f = ParamPolynomial::zero();
        assert!(isolate_positive_roots(&f, (&r(0, 1), &r(1, 1))).is_err());
    }

    #[test]
    fn multiple_roots_are_handled() {
        // (v−1)²(v−2): squarefree part should isolate both 1 and 2
        let f = poly(&[(3, 1), (2, -4), (1, 5), (0, -2)]);
        let roots = isolate_positive_roots(&f, (&r(0, 1), &r(3, 1))).unwrap();
        assert_eq!(roots.len(), 2);
    }

    #[test]
    fn count_matches_constructed_roots() {
        // roots at 1/4, 1/2, 3/4, 7/4 → f = ∏ (4v − k)
        let mut f = ParamPolynomial::constant(ExactScalar::one());
        for k in [1i64, 2, 3, 7] {
            let factor = ParamPolynomial::from_coeffs([
                (1, ExactScalar::from_int(4)),
                (0, ExactScalar::from_int(-k)),
            ]);
            f = f.mul(&factor);
        }
        assert_eq!(count_roots_in(&f, &r(0, 1), &r(1, 1)), 3);
        assert_eq!(count_roots_in(&f, &r(1, 2), &r(2, 1)), 2);
        assert_eq!(count_roots_in(&f, &r(1, 4), &r(3, 4)), 2); // (1/4, 3/4]
    }
}
