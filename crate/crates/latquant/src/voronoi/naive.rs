//! Fully naive all-pairs construction, used as an independent oracle in
//! small dimensions: exhaustive vertex enumeration over normal
//! combinations, the complete (unreduced) face hierarchy, and second
//! moments by recursive simplex decomposition.

use super::{in_voronoi_cell, on_facet_plane, VertexPool};
use crate::exact::ExactScalar;
use crate::lattice::{Lattice, RelevantVectorSet};
use crate::linalg::{rank_exact, solve_vertex_lift, ExactMatrix, ExactVector};
use std::collections::HashMap;

/// The complete face hierarchy with every face constructed explicitly.
pub struct NaiveCell {
    pub pool: VertexPool,
    /// levels[d] = all d-faces as sorted vertex-index sets
    pub levels: Vec<Vec<Vec<u32>>>,
    pub volume: ExactScalar,
    pub second_moment: ExactScalar,
    pub tensor: ExactMatrix,
}

/// Enumerate all vertices by intersecting every combination of `n`
/// linearly independent relevant-vector planes and keeping the points
/// inside the cell. Exponential; intended for `n ≤ 4`.
pub fn naive_vertices(lattice: &Lattice, relevant: &RelevantVectorSet) -> VertexPool {
    let n = lattice.dim();
    let m = relevant.len();
    let mut pool = VertexPool::new();
    let mut combo: Vec<usize> = (0..n).collect();
    loop {
        let normals: Vec<ExactVector> = combo
            .iter()
            .map(|&i| relevant.get(i as u32).clone())
            .collect();
        if rank_exact(&normals) == n {
            if let Ok(x) = solve_vertex_lift(&normals) {
                if in_voronoi_cell(&x, relevant) {
                    pool.insert(x);
                }
            }
        }
        // next combination
        let mut i = n;
        loop {
            if i == 0 {
                return pool;
            }
            i -= 1;
            if combo[i] + (n - i) < m {
                combo[i] += 1;
                for j in i + 1..n {
                    combo[j] = combo[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Build the complete hierarchy by the all-pairs method and compute exact
/// moments by simplex decomposition (independent of the reduced pipeline).
pub fn naive_cell(lattice: &Lattice, relevant: &RelevantVectorSet) -> NaiveCell {
    let n = lattice.dim();
    let pool = naive_vertices(lattice, relevant);

    // facets: all vertices on each plane
    let mut levels: Vec<Vec<Vec<u32>>> = vec![Vec::new(); n + 1];
    levels[n] = vec![(0..pool.len() as u32).collect()];
    let mut facets: Vec<Vec<u32>> = Vec::new();
    for i in 0..relevant.len() as u32 {
        let normal = relevant.get(i);
        let verts: Vec<u32> = (0..pool.len() as u32)
            .filter(|&v| on_facet_plane(pool.get(v), normal))
            .collect();
        facets.push(verts);
    }
    levels[n - 1] = facets;

    // all-pairs intersection downwards
    for d in (0..=n.saturating_sub(2)).rev() {
        let parents = &levels[d + 1];
        let mut seen: HashMap<Vec<u32>, ()> = HashMap::new();
        let mut out: Vec<Vec<u32>> = Vec::new();
        for i in 0..parents.len() {
            for j in i + 1..parents.len() {
                let inter = intersect_sorted(&parents[i], &parents[j]);
                if inter.is_empty() || seen.contains_key(&inter) {
                    continue;
                }
                if affine_rank(&pool, &inter) == d {
                    seen.insert(inter.clone(), ());
                    out.push(inter);
                }
            }
        }
        levels[d] = out;
        if n < 2 {
            break;
        }
    }

    // moments by recursive simplex decomposition of the whole cell
    let mut volume = ExactScalar::zero();
    let mut tensor = zero_tensor(n);
    for simplex in triangulate(&pool, &levels, n, &levels[n][0]) {
        let (v, t) = simplex_moments(&simplex);
        volume = &volume + &v;
        tensor = add_tensor(&tensor, &t);
    }
    let second_moment = trace(&tensor);
    NaiveCell {
        pool,
        levels,
        volume,
        second_moment,
        tensor,
    }
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    a.iter().filter(|x| b.binary_search(x).is_ok()).copied().collect()
}

fn affine_rank(pool: &VertexPool, verts: &[u32]) -> usize {
    if verts.len() <= 1 {
        return 0;
    }
    let v0 = pool.get(verts[0]);
    let diffs: Vec<ExactVector> = verts[1..].iter().map(|&v| pool.get(v).sub(v0)).collect();
    rank_exact(&diffs)
}

/// Fan triangulation of a `d`-face from its first vertex: one `d`-simplex
/// per `(d−1)`-simplex of each boundary face not containing that vertex.
/// Returns lists of `d+1` points.
fn triangulate(
    pool: &VertexPool,
    levels: &[Vec<Vec<u32>>],
    d: usize,
    face: &[u32],
) -> Vec<Vec<ExactVector>> {
    if d == 0 {
        return vec![vec![pool.get(face[0]).clone()]];
    }
    let apex = pool.get(face[0]).clone();
    let mut out = Vec::new();
    for c in levels[d - 1].iter().filter(|c| is_subset(c, face)) {
        if c.binary_search(&face[0]).is_ok() {
            continue; // cone only over boundary faces avoiding the apex
        }
        for mut s in triangulate(pool, levels, d - 1, c) {
            s.insert(0, apex.clone());
            out.push(s);
        }
    }
    out
}

fn is_subset(a: &[u32], b: &[u32]) -> bool {
    a.iter().all(|x| b.binary_search(x).is_ok())
}

fn zero_tensor(n: usize) -> ExactMatrix {
    ExactMatrix::new(vec![ExactVector::zeros(n); n])
}

fn add_tensor(a: &ExactMatrix, b: &ExactMatrix) -> ExactMatrix {
    ExactMatrix::new(
        (0..a.rows())
            .map(|i| a.row(i).add(b.row(i)))
            .collect(),
    )
}

fn trace(m: &ExactMatrix) -> ExactScalar {
    let mut t = ExactScalar::zero();
    for i in 0..m.rows() {
        t = &t + m.entry(i, i);
    }
    t
}

/// Exact volume and second-moment tensor (about the origin) of a full-
/// dimensional simplex given as `n+1` vertices: `Vol = |det|/n!` and
/// `U = Vol/((n+1)(n+2)) · (Σᵢ wᵢᵀwᵢ + (Σᵢwᵢ)ᵀ(Σᵢwᵢ))`.
pub fn simplex_moments(vertices: &[ExactVector]) -> (ExactScalar, ExactMatrix) {
    let n = vertices.len() - 1;
    let dim = vertices[0].dim();
    assert_eq!(n, dim, "simplex must be full-dimensional");
    let rows: Vec<ExactVector> = vertices[1..]
        .iter()
        .map(|v| v.sub(&vertices[0]))
        .collect();
    let det = crate::linalg::determinant(&ExactMatrix::new(rows)).expect("square");
    let mut fact = ExactScalar::one();
    for k in 2..=n as i64 {
        fact = &fact * &ExactScalar::from_int(k);
    }
    let vol = det.abs() / fact;

    let mut sum = ExactVector::zeros(dim);
    let mut outer_sum = zero_tensor(dim);
    for v in vertices {
        sum = sum.add(v);
        outer_sum = add_tensor(&outer_sum, &outer(v, v));
    }
    let total = add_tensor(&outer_sum, &outer(&sum, &sum));
    let scale = &vol
        / &(&ExactScalar::from_int((n as i64 + 1) * (n as i64 + 2)) * &ExactScalar::one());
    let tensor = ExactMatrix::new(
        (0..dim)
            .map(|i| total.row(i).scale(&scale))
            .collect(),
    );
    (vol, tensor)
}

fn outer(a: &ExactVector, b: &ExactVector) -> ExactMatrix {
    ExactMatrix::new(
        a.comps()
            .iter()
            .map(|ai| ExactVector::new(b.comps().iter().map(|bj| ai * bj).collect()))
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{catalog, relevant_vectors};
    use num_bigint::BigInt;

    #[test]
    fn unit_square_moments() {
        let l = catalog::by_name("Z2", None).unwrap();
        let rv = relevant_vectors(&l);
        let cell = naive_cell(&l, &rv);
        assert_eq!(cell.pool.len(), 4);
        assert_eq!(cell.volume, ExactScalar::one());
        // ∫ x²+y² over the unit square about its center = 1/6
        assert_eq!(cell.second_moment, ExactScalar::ratio(1, 6));
        assert_eq!(cell.tensor.entry(0, 0), &ExactScalar::ratio(1, 12));
        assert_eq!(cell.tensor.entry(0, 1), &ExactScalar::zero());
    }

    #[test]
    fn hexagon_moments_match_closed_form() {
        let l = catalog::by_name("A2", None).unwrap();
        let rv = relevant_vectors(&l);
        let cell = naive_cell(&l, &rv);
        assert_eq!(cell.pool.len(), 6);
        // Vol = √3/2
        let half_sqrt3 = ExactScalar::sqrt_d(
            crate::exact::Rational::new(BigInt::from(1), BigInt::from(2)),
            3,
        );
        assert_eq!(cell.volume, half_sqrt3);
        // G = 5/(36√3) ⇒ U = G·n·Vol² = 5√3/72
        let expected_u = ExactScalar::sqrt_d(
            crate::exact::Rational::new(BigInt::from(5), BigInt::from(72)),
            3,
        );
        assert_eq!(cell.second_moment, expected_u);
    }

    #[test]
    fn simplex_formula_against_hand_integral() {
        // right triangle (0,0),(1,0),(0,1): Vol 1/2, ∫x² = 1/12, ∫xy = 1/24
        let t = vec![
            ExactVector::from_ints(&[0, 0]),
            ExactVector::from_ints(&[1, 0]),
            ExactVector::from_ints(&[0, 1]),
        ];
        let (v, u) = simplex_moments(&t);
        assert_eq!(v, ExactScalar::ratio(1, 2));
        assert_eq!(u.entry(0, 0), &ExactScalar::ratio(1, 12));
        assert_eq!(u.entry(1, 1), &ExactScalar::ratio(1, 12));
        assert_eq!(u.entry(0, 1), &ExactScalar::ratio(1, 24));
    }
}
