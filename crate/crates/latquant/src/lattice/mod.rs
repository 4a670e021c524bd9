//! Lattice representation, closest-point search, relevant vectors, the
//! catalog of named lattices, lamination/product constructors, a Monte
//! Carlo estimator for `G`, and Zador's sphere bound.

use crate::exact::{decimal, ExactScalar, Rational};
use crate::linalg::{determinant, ExactMatrix, ExactVector};
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use std::cmp::Ordering;
use std::collections::HashMap;

pub mod catalog;
pub mod cvp;
pub mod monte_carlo;

pub use cvp::CvpSolver;
pub use monte_carlo::{monte_carlo_g, MonteCarloEstimate};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("unknown catalog lattice {0:?}")]
    UnknownLattice(String),
    #[error("generator matrix is singular")]
    SingularGenerator,
    #[error("symmetry generator {0} is invalid: {1}")]
    InvalidSymmetry(usize, String),
}

/// An `n`-dimensional lattice given by an invertible row-generator matrix,
/// an optional quadratic-field tag and optional symmetry generators.
///
/// Symmetry generators act on row vectors as `x ↦ x·M`; at construction
/// each one is checked to be exactly orthogonal and to map the lattice onto
/// itself (each `b·M` lattice-decodes to integers).
#[derive(Clone)]
pub struct Lattice {
    pub name: String,
    pub generator: ExactMatrix,
    pub field_d: Option<u64>,
    pub symmetry_generators: Vec<ExactMatrix>,
    det: ExactScalar,
    generator_inverse: ExactMatrix,
}

impl Lattice {
    pub fn new(
        name: impl Into<String>,
        generator: ExactMatrix,
        field_d: Option<u64>,
        symmetry_generators: Vec<ExactMatrix>,
    ) -> Result<Self, LatticeError> {
        let det = determinant(&generator).map_err(|_| LatticeError::SingularGenerator)?;
        if det.is_zero() {
            return Err(LatticeError::SingularGenerator);
        }
        let generator_inverse = generator
            .inverse()
            .map_err(|_| LatticeError::SingularGenerator)?;
        let lat = Lattice {
            name: name.into(),
            generator,
            field_d,
            symmetry_generators,
            det,
            generator_inverse,
        };
        for (i, g) in lat.symmetry_generators.iter().enumerate() {
            if !g.is_orthogonal() {
                return Err(LatticeError::InvalidSymmetry(i, "not orthogonal".into()));
            }
            if !lat.preserves_lattice(g) {
                return Err(LatticeError::InvalidSymmetry(
                    i,
                    "does not map the lattice to itself".into(),
                ));
            }
        }
        Ok(lat)
    }

    pub fn dim(&self) -> usize {
        self.generator.rows()
    }

    pub fn det(&self) -> &ExactScalar {
        &self.det
    }

    /// `Vol(Λ) = |det B|`.
    pub fn volume(&self) -> ExactScalar {
        self.det.abs()
    }

    pub fn generator_inverse(&self) -> &ExactMatrix {
        &self.generator_inverse
    }

    /// Does `v` belong to the lattice? Exact: `v·B⁻¹ ∈ Zⁿ`.
    pub fn contains(&self, v: &ExactVector) -> bool {
        self.coords_of(v).is_some()
    }

    /// Integer coordinates of a lattice vector, if it is one.
    pub fn coords_of(&self, v: &ExactVector) -> Option<Vec<i64>> {
        let c = v.apply_matrix(&self.generator_inverse);
        let mut out = Vec::with_capacity(c.dim());
        for x in c.comps() {
            let r = x.as_rational()?;
            if !r.denom().is_one() {
                return None;
            }
            out.push(r.numer().to_i64()?);
        }
        Some(out)
    }

    /// Exact check that `x ↦ x·M` maps the lattice onto itself.
    pub fn preserves_lattice(&self, m: &ExactMatrix) -> bool {
        self.generator
            .row_vectors()
            .iter()
            .all(|b| self.contains(&b.apply_matrix(m)))
    }

    pub fn point(&self, z: &[i64]) -> ExactVector {
        let mut acc = ExactVector::zeros(self.dim());
        for (i, &zi) in z.iter().enumerate() {
            if zi != 0 {
                acc = acc.add(&self.generator.row(i).scale(&ExactScalar::from_int(zi)));
            }
        }
        acc
    }

    /// Uniform rescaling `s·Λ` (G is invariant under this).
    pub fn scaled(&self, s: &Rational) -> Result<Self, LatticeError> {
        if !s.is_positive() {
            return Err(LatticeError::Parameter("scale must be positive".into()));
        }
        let c = ExactScalar::from_rational(s.clone());
        let rows = self
            .generator
            .row_vectors()
            .iter()
            .map(|r| r.scale(&c))
            .collect();
        Lattice::new(
            format!("{}*({})", s, self.name),
            ExactMatrix::new(rows),
            self.field_d,
            self.symmetry_generators.clone(),
        )
    }
}

/// The set of Voronoi-relevant vectors, closed under negation and sorted
/// canonically, with an index for exact membership tests.
pub struct RelevantVectorSet {
    vectors: Vec<ExactVector>,
    index: HashMap<ExactVector, u32>,
}

impl RelevantVectorSet {
    pub fn from_vectors(mut vectors: Vec<ExactVector>) -> Self {
        vectors.sort_by(compare_vectors);
        vectors.dedup();
        let index = vectors
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i as u32))
            .collect();
        RelevantVectorSet { vectors, index }
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vectors(&self) -> &[ExactVector] {
        &self.vectors
    }

    pub fn get(&self, i: u32) -> &ExactVector {
        &self.vectors[i as usize]
    }

    pub fn index_of(&self, v: &ExactVector) -> Option<u32> {
        self.index.get(v).copied()
    }

    /// Exact check of the defining property: `v/2` lies on the Voronoi
    /// boundary iff `2·(v/2)·w ≤ ‖w‖²` for all `w` in the set.
    pub fn half_on_boundary(&self, v: &ExactVector) -> bool {
        let half = v.scale(&ExactScalar::ratio(1, 2));
        self.vectors.iter().all(|w| {
            let lhs = &half.dot(w) * &ExactScalar::from_int(2);
            lhs <= w.norm_sq()
        })
    }
}

/// Canonical (lexicographic, exact) vector ordering used for deterministic
/// merges.
pub fn compare_vectors(a: &ExactVector, b: &ExactVector) -> Ordering {
    for (x, y) in a.comps().iter().zip(b.comps()) {
        match x.cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.dim().cmp(&b.dim())
}

/// Find the Voronoi-relevant vectors of `L`.
///
/// For each of the `2ⁿ − 1` nonzero cosets of `Λ/2Λ`, the minimal-norm coset
/// members are found by sphere enumeration certified exactly; the coset
/// contributes `±v` exactly when the minimizer pair is unique up to sign.
/// Coset minimizations run in parallel and are merged in canonical order.
pub fn relevant_vectors(l: &Lattice) -> RelevantVectorSet {
    let n = l.dim();
    let two = ExactScalar::from_int(2);
    let doubled = ExactMatrix::new(
        l.generator
            .row_vectors()
            .iter()
            .map(|r| r.scale(&two))
            .collect(),
    );
    let solver2 = CvpSolver::new(&doubled);

    let cosets: Vec<u64> = (1..(1u64 << n)).collect();
    let mut found: Vec<ExactVector> = cosets
        .into_par_iter()
        .flat_map_iter(|mask| {
            let z: Vec<i64> = (0..n).map(|i| ((mask >> i) & 1) as i64).collect();
            let w = l.point(&z);
            // minimal-norm members of w + 2Λ: closest points of 2Λ to −w
            let target = w.neg();
            let winners = solver2.closest_points_exact(&target);
            let members: Vec<ExactVector> =
                winners.into_iter().map(|(_, p)| w.add(&p)).collect();
            if members.len() == 2 && members[0] == members[1].neg() {
                members
            } else {
                Vec::new()
            }
        })
        .collect();
    found.sort_by(compare_vectors);
    RelevantVectorSet::from_vectors(found)
}

/// All lattice points of `L` at minimal distance from the exact point `x`.
pub fn closest_lattice_points(l: &Lattice, x: &ExactVector) -> Vec<ExactVector> {
    let solver = CvpSolver::new(&l.generator);
    solver
        .closest_points_exact(x)
        .into_iter()
        .map(|(_, p)| p)
        .collect()
}

/// Stack `L1` with layer offset `h` and spacing `a`: block generator
/// `[[B₁, 0], [h, a]]`.
pub fn laminate(l1: &Lattice, h: &ExactVector, a: &Rational) -> Result<Lattice, LatticeError> {
    if !a.is_positive() {
        return Err(LatticeError::Parameter(format!("a = {a} must be positive")));
    }
    if h.dim() != l1.dim() {
        return Err(LatticeError::Parameter(format!(
            "offset has dimension {}, lattice has {}",
            h.dim(),
            l1.dim()
        )));
    }
    let mut rows: Vec<ExactVector> = l1
        .generator
        .row_vectors()
        .iter()
        .map(|r| {
            let mut c = r.comps().to_vec();
            c.push(ExactScalar::zero());
            ExactVector::new(c)
        })
        .collect();
    let mut last = h.comps().to_vec();
    last.push(ExactScalar::from_rational(a.clone()));
    rows.push(ExactVector::new(last));
    let field = merge_field(l1.field_d, field_of(h));
    Lattice::new(
        format!("{}-laminated(a={})", l1.name, a),
        ExactMatrix::new(rows),
        field,
        Vec::new(),
    )
}

fn field_of(v: &ExactVector) -> Option<u64> {
    v.comps().iter().find_map(|c| c.field_d())
}

fn merge_field(a: Option<u64>, b: Option<u64>) -> Option<u64> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => {
            assert_eq!(x, y, "mixed quadratic extensions");
            Some(x)
        }
    }
}

/// The product lattice `Λ₁ × aΛ₂` (block-diagonal generator).
pub fn product_lattice(l1: &Lattice, l2: &Lattice, a: &Rational) -> Result<Lattice, LatticeError> {
    if !a.is_positive() {
        return Err(LatticeError::Parameter(format!("a = {a} must be positive")));
    }
    let (n1, n2) = (l1.dim(), l2.dim());
    let sa = ExactScalar::from_rational(a.clone());
    let mut rows = Vec::with_capacity(n1 + n2);
    for r in l1.generator.row_vectors() {
        let mut c = r.comps().to_vec();
        c.extend(std::iter::repeat_with(ExactScalar::zero).take(n2));
        rows.push(ExactVector::new(c));
    }
    for r in l2.generator.row_vectors() {
        let mut c = vec![ExactScalar::zero(); n1];
        c.extend(r.comps().iter().map(|x| x * &sa));
        rows.push(ExactVector::new(c));
    }
    let field = merge_field(l1.field_d, l2.field_d);
    Lattice::new(
        format!("{}x{}(a={})", l1.name, l2.name, a),
        ExactMatrix::new(rows),
        field,
        Vec::new(),
    )
}

/// Closed-form optimum of a product family `Λ₁ × aΛ₂` given the exact
/// constants of the factors: `a_opt = V₁^{1/n₁}/V₂^{1/n₂}·√(G₁/G₂)` and
/// `G(a_opt)ⁿ = G₁^{n₁}·G₂^{n₂}`.
pub struct ProductOptimum {
    /// exact `G(a_opt)ⁿ`
    pub g_pow_n: ExactScalar,
    pub n: u32,
    pub a_opt: f64,
    pub g_opt: f64,
    /// `G(a_opt)` as a high-precision decimal string
    pub g_opt_decimal: String,
}

pub fn product_optimum(
    g1: &ExactScalar,
    v1: &ExactScalar,
    n1: u32,
    g2: &ExactScalar,
    v2: &ExactScalar,
    n2: u32,
    digits: u32,
) -> Result<ProductOptimum, LatticeError> {
    for (name, x) in [("G1", g1), ("V1", v1), ("G2", g2), ("V2", v2)] {
        if !x.is_positive() {
            return Err(LatticeError::Parameter(format!("{name} must be positive")));
        }
    }
    let n = n1 + n2;
    let g_pow_n = &g1.pow_i64(n1 as i64) * &g2.pow_i64(n2 as i64);
    let g_opt_dec = decimal::Dec::from_scalar(&g_pow_n, n * (digits + 14) / n + 14 + digits)
        .nth_root(n);
    let a_opt = v1.shadow().powf(1.0 / n1 as f64) / v2.shadow().powf(1.0 / n2 as f64)
        * (g1.shadow() / g2.shadow()).sqrt();
    Ok(ProductOptimum {
        g_pow_n,
        n,
        a_opt,
        g_opt: g_opt_dec.to_f64(),
        g_opt_decimal: g_opt_dec.to_string_digits(digits),
    })
}

/// Exact `(U, Vol)` of a product lattice `Λ₁ × aΛ₂` at rational `a`:
/// `U(a) = U₁·V₂·a^{n₂} + U₂·V₁·a^{n₂+2}` and `Vol = V₁V₂a^{n₂}`.
pub fn product_g_parts(
    u1: &ExactScalar,
    v1: &ExactScalar,
    u2: &ExactScalar,
    v2: &ExactScalar,
    n2: u32,
    a: &Rational,
) -> (ExactScalar, ExactScalar) {
    let sa = ExactScalar::from_rational(a.clone());
    let u = &(&(u1 * v2) * &sa.pow_i64(n2 as i64)) + &(&(u2 * v1) * &sa.pow_i64(n2 as i64 + 2));
    let vol = &(v1 * v2) * &sa.pow_i64(n2 as i64);
    (u, vol)
}

/// Zador's sphere bound `Γ(1+n/2)^{2/n} / ((n+2)π)`.
///
/// For `n = 1` the bound is exactly `1/12` and is attained by `Z¹`, whose
/// Voronoi cell is the 1-ball; otherwise a floating-point value is
/// returned, computed from the exact half-integer Gamma value.
pub struct ZadorBound {
    pub value: f64,
    pub exact: Option<ExactScalar>,
}

pub fn zador_bound(n: u32) -> Result<ZadorBound, LatticeError> {
    if n < 1 {
        return Err(LatticeError::Parameter("n must be ≥ 1".into()));
    }
    if n == 1 {
        return Ok(ZadorBound {
            value: 1.0 / 12.0,
            exact: Some(ExactScalar::ratio(1, 12)),
        });
    }
    // Γ(1 + n/2): (n/2)! for even n, (n/2)(n/2−1)…(1/2)·√π for odd n
    let ln_gamma = if n % 2 == 0 {
        (2..=(n / 2)).map(|k| (k as f64).ln()).sum::<f64>()
    } else {
        let mut acc = 0.5 * std::f64::consts::PI.ln();
        let mut x = n as f64 / 2.0;
        while x > 0.0 {
            acc += x.ln();
            x -= 1.0;
        }
        acc
    };
    let value = ((2.0 / n as f64) * ln_gamma).exp() / ((n as f64 + 2.0) * std::f64::consts::PI);
    Ok(ZadorBound { value, exact: None })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn rat(n: i64, m: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(m))
    }

    #[test]
    fn z2_relevant_vectors() {
        let l = catalog::by_name("Z2", None).unwrap();
        let rv = relevant_vectors(&l);
        assert_eq!(rv.len(), 4);
        for v in rv.vectors() {
            assert!(rv.half_on_boundary(v));
        }
    }

    #[test]
    fn a2_relevant_vectors_brute_force() {
        let l = catalog::by_name("A2", None).unwrap();
        let rv = relevant_vectors(&l);
        assert_eq!(rv.len(), 6);
        // brute-force oracle over all small cosets of Λ/2Λ
        let mut expected = Vec::new();
        for z1 in -4i64..=4 {
            for z2 in -4i64..=4 {
                if (z1, z2) == (0, 0) {
                    continue;
                }
                let v = l.point(&[z1, z2]);
                let mut min_sq: Option<ExactScalar> = None;
                let mut count = 0;
                for w1 in -4i64..=4 {
                    for w2 in -4i64..=4 {
                        if (w1 - z1) % 2 != 0 || (w2 - z2) % 2 != 0 {
                            continue;
                        }
                        let u = l.point(&[w1, w2]);
                        let d = u.norm_sq();
                        match &min_sq {
                            Some(m) if d > *m => {}
                            Some(m) if d == *m => count += 1,
                            _ => {
                                min_sq = Some(d);
                                count = 1;
                            }
                        }
                    }
                }
                if count == 2 && min_sq == Some(v.norm_sq()) {
                    expected.push(v);
                }
            }
        }
        expected.sort_by(compare_vectors);
        expected.dedup();
        assert_eq!(expected.len(), 6);
        assert_eq!(rv.vectors(), &expected[..]);
    }

    #[test]
    fn closest_points_z2() {
        let l = catalog::by_name("Z2", None).unwrap();
        let x = ExactVector::from_rationals(vec![rat(1, 2), rat(0, 1)]);
        let pts = closest_lattice_points(&l, &x);
        assert_eq!(pts.len(), 2);
        // deep hole of the unit square: 4 closest points
        let x = ExactVector::from_rationals(vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(closest_lattice_points(&l, &x).len(), 4);
    }

    #[test]
    fn closest_points_a2_deep_hole() {
        let l = catalog::by_name("A2", None).unwrap();
        let hole = catalog::known_deep_hole("A2").unwrap();
        let pts = closest_lattice_points(&l, &hole);
        assert_eq!(pts.len(), 3);
        // brute-force check over a coefficient box ‖z‖∞ ≤ 3
        let mut best: Option<ExactScalar> = None;
        let mut count = 0;
        for z1 in -3i64..=3 {
            for z2 in -3i64..=3 {
                let d = l.point(&[z1, z2]).sub(&hole).norm_sq();
                match &best {
                    Some(m) if d > *m => {}
                    Some(m) if d == *m => count += 1,
                    _ => {
                        best = Some(d);
                        count = 1;
                    }
                }
            }
        }
        assert_eq!(count, 3);
    }

    #[test]
    fn laminate_z1() {
        let z1 = catalog::by_name("Z1", None).unwrap();
        let h = ExactVector::from_rationals(vec![rat(1, 2)]);
        let l = laminate(&z1, &h, &rat(1, 1)).unwrap();
        assert_eq!(l.dim(), 2);
        assert_eq!(l.generator.entry(1, 0), &ExactScalar::ratio(1, 2));
        assert_eq!(l.generator.entry(1, 1), &ExactScalar::one());
        assert!(laminate(&z1, &h, &rat(-1, 2)).is_err());
    }

    #[test]
    fn product_of_z_with_itself() {
        let z1 = catalog::by_name("Z1", None).unwrap();
        let g = ExactScalar::ratio(1, 12);
        let v = ExactScalar::one();
        let opt = product_optimum(&g, &v, 1, &g, &v, 1, 12).unwrap();
        assert!((opt.a_opt - 1.0).abs() < 1e-12);
        assert_eq!(opt.g_pow_n, ExactScalar::ratio(1, 144));
        assert!(opt.g_opt_decimal.starts_with("0.08333333"), "{}", opt.g_opt_decimal);
        let prod = product_lattice(&z1, &z1, &rat(1, 1)).unwrap();
        assert_eq!(prod.dim(), 2);
        assert_eq!(prod.volume(), ExactScalar::one());
    }

    #[test]
    fn zador_values() {
        assert_eq!(zador_bound(1).unwrap().exact, Some(ExactScalar::ratio(1, 12)));
        let z2 = zador_bound(2).unwrap().value;
        assert!((z2 - 1.0 / (4.0 * std::f64::consts::PI)).abs() < 1e-15);
        let z13 = zador_bound(13).unwrap().value;
        assert!(z13 < 0.0699012856);
        assert!(z13 > 0.06);
        assert!(zador_bound(0).is_err());
    }

    #[test]
    fn scaled_lattice_keeps_symmetries() {
        let l = catalog::by_name("Z3", None).unwrap();
        let s = l.scaled(&rat(3, 2)).unwrap();
        assert_eq!(s.volume(), ExactScalar::ratio(27, 8));
    }
}
