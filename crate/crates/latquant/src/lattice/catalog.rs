//! Catalog of named lattices with exact generators and symmetry generators.
//!
//! Addressable names: `Z<n>`, `A2`, `A3` (face-centered cubic form), `D<n>`
//! for `n ≥ 2`, `K12` (Coxeter–Todd) and `K12-laminated` (deep-hole
//! lamination of `K12`, which takes the layer spacing `a` as a parameter).
//!
//! `A<n>` for general `n` needs coordinates outside a single quadratic
//! extension and is not provided.

use super::{laminate, Lattice, LatticeError};
use crate::exact::{ExactScalar, Rational};
use crate::linalg::{ExactMatrix, ExactVector};
use num_bigint::BigInt;

fn rat(n: i64, m: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(m))
}

/// `(p + q√3)/den` as an exact scalar.
fn q3(p: i64, q: i64, den: i64) -> ExactScalar {
    ExactScalar::quadratic(rat(p, den), rat(q, den), 3)
}

/// 2×2 block with entries `(p + q√3)/den`.
#[derive(Clone, Copy)]
struct Block {
    e: [[(i64, i64); 2]; 2],
    den: i64,
}

impl Block {
    const ZERO: Block = Block {
        e: [[(0, 0); 2]; 2],
        den: 1,
    };

    fn neg(self) -> Block {
        let mut e = self.e;
        for row in &mut e {
            for x in row {
                *x = (-x.0, -x.1);
            }
        }
        Block { e, den: self.den }
    }

    fn transpose(self) -> Block {
        Block {
            e: [
                [self.e[0][0], self.e[1][0]],
                [self.e[0][1], self.e[1][1]],
            ],
            den: self.den,
        }
    }

    fn halved(self) -> Block {
        Block {
            e: self.e,
            den: self.den * 2,
        }
    }

    fn doubled(self) -> Block {
        let mut e = self.e;
        for row in &mut e {
            for x in row {
                *x = (2 * x.0, 2 * x.1);
            }
        }
        Block { e, den: self.den }
    }

    fn scalar(&self, i: usize, j: usize) -> ExactScalar {
        let (p, q) = self.e[i][j];
        q3(p, q, self.den)
    }
}

// A ≜ ½[2 0; −1 √3], W ≜ ½[−1 √3; −1 −√3], S ≜ [1 0; 0 −1],
// V ≜ ½[1 √3; −√3 1], Y ≜ ½[−1 −√3; −√3 1], Y' ≜ ½[−1 √3; √3 1]
const BLOCK_A: Block = Block {
    e: [[(2, 0), (0, 0)], [(-1, 0), (0, 1)]],
    den: 2,
};
const BLOCK_W: Block = Block {
    e: [[(-1, 0), (0, 1)], [(-1, 0), (0, -1)]],
    den: 2,
};
const BLOCK_S: Block = Block {
    e: [[(1, 0), (0, 0)], [(0, 0), (-1, 0)]],
    den: 1,
};
const BLOCK_V: Block = Block {
    e: [[(1, 0), (0, 1)], [(0, -1), (1, 0)]],
    den: 2,
};
const BLOCK_Y: Block = Block {
    e: [[(-1, 0), (0, -1)], [(0, -1), (1, 0)]],
    den: 2,
};
const BLOCK_YP: Block = Block {
    e: [[(-1, 0), (0, 1)], [(0, 1), (1, 0)]],
    den: 2,
};
const BLOCK_I: Block = Block {
    e: [[(1, 0), (0, 0)], [(0, 0), (1, 0)]],
    den: 1,
};

/// Assemble a matrix from 2×2 blocks, with `extra` trailing diagonal
/// scalar entries (used for the 13th coordinate of laminated K12).
fn assemble(blocks: &[Vec<Block>], extra_diag: &[ExactScalar]) -> ExactMatrix {
    let nb = blocks.len();
    let dim = 2 * nb + extra_diag.len();
    let mut rows = Vec::with_capacity(dim);
    for (bi, brow) in blocks.iter().enumerate() {
        assert_eq!(brow.len(), nb);
        for r in 0..2 {
            let mut comps = Vec::with_capacity(dim);
            for b in brow {
                comps.push(b.scalar(r, 0));
                comps.push(b.scalar(r, 1));
            }
            comps.extend(std::iter::repeat_with(ExactScalar::zero).take(extra_diag.len()));
            rows.push(ExactVector::new(comps));
            let _ = bi;
        }
    }
    for (k, x) in extra_diag.iter().enumerate() {
        let mut comps = vec![ExactScalar::zero(); dim];
        comps[2 * nb + k] = x.clone();
        rows.push(ExactVector::new(comps));
    }
    ExactMatrix::new(rows)
}

/// The Coxeter–Todd lattice `K12`: exact generator and the three symmetry
/// generators of its full automorphism group (order 78 382 080).
pub fn k12() -> Lattice {
    let o = Block::ZERO;
    let a = BLOCK_A;
    let w = BLOCK_W;
    let a2 = BLOCK_A.doubled();
    let generator = assemble(
        &[
            vec![a2, o, o, o, o, o],
            vec![o, a2, o, o, o, o],
            vec![o, o, a2, o, o, o],
            vec![a, w, w, a, o, o],
            vec![w, a, w, o, a, o],
            vec![w, w, a, o, o, a],
        ],
        &[],
    );

    let i = BLOCK_I;
    let s = BLOCK_S;
    let m1 = assemble(
        &[
            vec![o, i, o, o, o, o],
            vec![i, o, o, o, o, o],
            vec![o, o, i, o, o, o],
            vec![o, o, o, o, i, o],
            vec![o, o, o, i, o, o],
            vec![o, o, o, o, o, i],
        ],
        &[],
    );
    let m2 = assemble(
        &[
            vec![o, o, o, o, o, s],
            vec![o, o, o, o, s, o],
            vec![o, o, o, s, o, o],
            vec![o, o, s, o, o, o],
            vec![o, s, o, o, o, o],
            vec![s, o, o, o, o, o],
        ],
        &[],
    );
    let v = BLOCK_V;
    let vt = BLOCK_V.transpose();
    let hi = BLOCK_I.halved();
    let m3 = assemble(
        &[
            vec![hi, v.halved(), hi.neg(), o, v.halved(), o],
            vec![vt.halved(), hi, vt.halved(), o, hi.neg(), o],
            vec![hi.neg(), v.halved(), hi, o, v.halved(), o],
            vec![o, o, o, i, o, o],
            vec![vt.halved(), hi.neg(), vt.halved(), o, hi, o],
            vec![o, o, o, o, o, i],
        ],
        &[],
    );

    Lattice::new("K12", generator, Some(3), vec![m1, m2, m3])
        .expect("K12 catalog data is consistent")
}

/// The deep hole `v₁` of `K12` used as the lamination offset
/// (`⅓·(0,…,0, 2√3, 0, 2√3)`, squared norm 8/3).
pub fn k12_deep_hole() -> ExactVector {
    let mut comps = vec![ExactScalar::zero(); 12];
    comps[9] = q3(0, 2, 3);
    comps[11] = q3(0, 2, 3);
    ExactVector::new(comps)
}

/// Representative relevant vectors of `K12` (largest/smallest class).
pub fn k12_facet_normals() -> (ExactVector, ExactVector) {
    // n₁ = ½(0,0,0,0,0,2√3,1,√3,1,√3,2,0), ‖n₁‖² = 6
    let mut c1 = vec![ExactScalar::zero(); 12];
    c1[5] = q3(0, 1, 1);
    c1[6] = q3(1, 0, 2);
    c1[7] = q3(0, 1, 2);
    c1[8] = q3(1, 0, 2);
    c1[9] = q3(0, 1, 2);
    c1[10] = q3(1, 0, 1);
    // n₂ = (0,…,0,1,−√3), ‖n₂‖² = 4
    let mut c2 = vec![ExactScalar::zero(); 12];
    c2[10] = q3(1, 0, 1);
    c2[11] = q3(0, -1, 1);
    (ExactVector::new(c1), ExactVector::new(c2))
}

/// Symmetry generators of laminated `K12` (group order 622 080),
/// as discovered by the relevant-vector stabilizer construction.
pub fn laminated_k12_symmetry_generators() -> Vec<ExactMatrix> {
    let o = Block::ZERO;
    let i = BLOCK_I;
    let s = BLOCK_S;
    let v = BLOCK_V;
    let vt = BLOCK_V.transpose();
    let y = BLOCK_Y;
    let yp = BLOCK_YP;
    let one = ExactScalar::one();

    // all listed blocks carry an overall factor ½
    let h = |b: Block| b.halved();
    let m1 = assemble(
        &[
            vec![o, h(i), o, h(v), h(i.neg()), h(v.neg())],
            vec![o, h(v.neg()), h(v), o, h(i.neg()), h(i)],
            vec![h(vt.doubled()), o, o, o, o, o],
            vec![o, o, h(i.neg()), h(v), h(v), h(i)],
            vec![o, h(i), h(v), h(i.neg()), h(v), o],
            vec![o, h(v), h(i), h(i), o, h(v)],
        ],
        &[one.clone()],
    );
    let m2 = assemble(
        &[
            vec![o, h(s.neg()), o, h(y), h(s.neg()), h(y)],
            vec![h(s.doubled()), o, o, o, o, o],
            vec![o, h(yp), o, h(s.neg()), h(yp.neg()), h(s)],
            vec![o, o, h(s.neg().doubled()), o, o, o],
            vec![o, h(yp), o, h(s), h(yp.neg()), h(s.neg())],
            vec![o, h(s.neg()), o, h(y.neg()), h(s.neg()), h(y.neg())],
        ],
        &[one],
    );
    // M₃ = diag(I₈, −I₅)
    let mut rows = Vec::with_capacity(13);
    for k in 0..13 {
        let mut comps = vec![ExactScalar::zero(); 13];
        comps[k] = if k < 8 {
            ExactScalar::one()
        } else {
            ExactScalar::from_int(-1)
        };
        rows.push(ExactVector::new(comps));
    }
    let m3 = ExactMatrix::new(rows);
    vec![m1, m2, m3]
}

/// The deep-hole lamination of `K12` at layer spacing `a`, with the stored
/// symmetry generators validated against the lattice.
pub fn laminated_k12(a: &Rational) -> Result<Lattice, LatticeError> {
    let base = k12();
    let lam = laminate(&base, &k12_deep_hole(), a)?;
    Lattice::new(
        format!("K12-laminated(a={a})"),
        lam.generator.clone(),
        Some(3),
        laminated_k12_symmetry_generators(),
    )
}

fn zn(n: usize) -> Lattice {
    let generator = ExactMatrix::identity(n);
    let sym = signed_permutation_generators(n);
    Lattice::new(format!("Z{n}"), generator, None, sym).expect("Zn data is consistent")
}

/// Generators of the signed-permutation group (order 2ⁿ·n!): a transposition,
/// an n-cycle and one sign flip.
fn signed_permutation_generators(n: usize) -> Vec<ExactMatrix> {
    let mut gens = Vec::new();
    let mut flip = ExactMatrix::identity(n)
        .row_vectors()
        .to_vec();
    flip[0] = flip[0].neg();
    gens.push(ExactMatrix::new(flip));
    if n >= 2 {
        gens.push(permutation_matrix(n, |i| match i {
            0 => 1,
            1 => 0,
            k => k,
        }));
    }
    if n >= 3 {
        gens.push(permutation_matrix(n, |i| (i + 1) % n));
    }
    gens
}

/// Matrix of the coordinate permutation `x_i ↦ position σ(i)` under the
/// row action `x ↦ x·P`.
fn permutation_matrix(n: usize, sigma: impl Fn(usize) -> usize) -> ExactMatrix {
    let mut rows = Vec::with_capacity(n);
    for i in 0..n {
        let mut comps = vec![ExactScalar::zero(); n];
        comps[sigma(i)] = ExactScalar::one();
        rows.push(ExactVector::new(comps));
    }
    ExactMatrix::new(rows)
}

fn a2() -> Lattice {
    let generator = ExactMatrix::new(vec![
        ExactVector::new(vec![ExactScalar::one(), ExactScalar::zero()]),
        ExactVector::new(vec![ExactScalar::ratio(1, 2), q3(0, 1, 2)]),
    ]);
    // rotation by 60° and a reflection generate the order-12 point group
    let rot = ExactMatrix::new(vec![
        ExactVector::new(vec![ExactScalar::ratio(1, 2), q3(0, 1, 2)]),
        ExactVector::new(vec![q3(0, -1, 2), ExactScalar::ratio(1, 2)]),
    ]);
    let refl = ExactMatrix::new(vec![
        ExactVector::new(vec![ExactScalar::one(), ExactScalar::zero()]),
        ExactVector::new(vec![ExactScalar::zero(), ExactScalar::from_int(-1)]),
    ]);
    Lattice::new("A2", generator, Some(3), vec![rot, refl]).expect("A2 data is consistent")
}

fn a3() -> Lattice {
    // face-centered cubic realization {x ∈ Z³ : Σx even}
    let generator = ExactMatrix::from_ints(&[&[1, 1, 0], &[0, 1, 1], &[1, 0, 1]]);
    Lattice::new("A3", generator, None, signed_permutation_generators(3))
        .expect("A3 data is consistent")
}

fn dn(n: usize) -> Result<Lattice, LatticeError> {
    if n < 2 {
        return Err(LatticeError::Parameter("D<n> needs n ≥ 2".into()));
    }
    let mut rows = Vec::with_capacity(n);
    let mut first = vec![0i64; n];
    first[0] = 1;
    first[1] = 1;
    rows.push(first);
    for i in 0..n - 1 {
        let mut r = vec![0i64; n];
        r[i] = 1;
        r[i + 1] = -1;
        rows.push(r);
    }
    let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
    let generator = ExactMatrix::from_ints(&refs);
    Lattice::new(format!("D{n}"), generator, None, signed_permutation_generators(n))
}

/// Look up a catalog lattice by name. `K12-laminated` takes the layer
/// spacing `a` (defaults to the paper's working value 34/33).
pub fn by_name(name: &str, a: Option<&Rational>) -> Result<Lattice, LatticeError> {
    let name = name.trim();
    if let Some(ns) = name.strip_prefix('Z') {
        if let Ok(n) = ns.parse::<usize>() {
            if n >= 1 && n <= 24 {
                return Ok(zn(n));
            }
        }
    }
    if let Some(ns) = name.strip_prefix('D') {
        if let Ok(n) = ns.parse::<usize>() {
            if n <= 24 {
                return dn(n);
            }
        }
    }
    match name {
        "A2" => Ok(a2()),
        "A3" => Ok(a3()),
        "K12" => Ok(k12()),
        "K12-laminated" => {
            let default_a = rat(34, 33);
            laminated_k12(a.unwrap_or(&default_a))
        }
        _ => Err(LatticeError::UnknownLattice(name.into())),
    }
}

/// Known deep holes (vertices of the Voronoi cell at maximal distance) for
/// catalog lattices that have one recorded.
pub fn known_deep_hole(name: &str) -> Option<ExactVector> {
    if let Some(ns) = name.strip_prefix('Z') {
        if let Ok(n) = ns.parse::<usize>() {
            return Some(ExactVector::new(vec![ExactScalar::ratio(1, 2); n]));
        }
    }
    if let Some(ns) = name.strip_prefix('D') {
        if let Ok(n) = ns.parse::<usize>() {
            if n >= 4 {
                // all-halves point, squared norm n/4
                return Some(ExactVector::new(vec![ExactScalar::ratio(1, 2); n]));
            }
        }
    }
    match name {
        "A2" => Some(ExactVector::new(vec![ExactScalar::ratio(1, 2), q3(0, 1, 6)])),
        "A3" => Some(ExactVector::from_ints(&[1, 0, 0])),
        "K12" => Some(k12_deep_hole()),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::determinant;

    #[test]
    fn k12_determinant_is_27() {
        let l = k12();
        let det = determinant(&l.generator).unwrap();
        assert_eq!(det.abs(), ExactScalar::from_int(27));
        assert_eq!(l.volume(), ExactScalar::from_int(27));
    }

    #[test]
    fn k12_symmetries_validate() {
        // Lattice::new already checks orthogonality and lattice preservation
        let l = k12();
        assert_eq!(l.symmetry_generators.len(), 3);
    }

    #[test]
    fn k12_deep_hole_norm() {
        let v1 = k12_deep_hole();
        assert_eq!(v1.norm_sq(), ExactScalar::ratio(8, 3));
        let (n1, n2) = k12_facet_normals();
        assert_eq!(n1.norm_sq(), ExactScalar::from_int(6));
        assert_eq!(n2.norm_sq(), ExactScalar::from_int(4));
    }

    #[test]
    fn laminated_k12_validates_and_scales_volume() {
        let a = rat(34, 33);
        let l = laminated_k12(&a).unwrap();
        assert_eq!(l.dim(), 13);
        // |det B(a)| = 27a
        assert_eq!(
            l.volume(),
            ExactScalar::from_rational(rat(27 * 34, 33))
        );
        assert_eq!(l.symmetry_generators.len(), 3);
    }

    #[test]
    fn catalog_names() {
        assert!(by_name("Z4", None).is_ok());
        assert!(by_name("D4", None).is_ok());
        assert!(by_name("A2", None).is_ok());
        assert!(by_name("A3", None).is_ok());
        assert!(by_name("A4", None).is_err());
        assert!(by_name("Q7", None).is_err());
    }

    #[test]
    fn a2_deep_hole_is_a_hole() {
        let hole = known_deep_hole("A2").unwrap();
        // squared distance to origin is 1/3 (circumradius² of the hexagon)
        assert_eq!(hole.norm_sq(), ExactScalar::ratio(1, 3));
    }

    #[test]
    fn dn_volume() {
        for n in 2..=8 {
            let l = dn(n).unwrap();
            assert_eq!(l.volume(), ExactScalar::from_int(2), "D{n}");
        }
    }
}
