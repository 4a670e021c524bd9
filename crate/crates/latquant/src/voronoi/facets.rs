//! Facet assembly: attach to each relevant vector the vertices lying in
//! its plane.

use super::{on_facet_plane, BuildConfig, Face, VertexPool, VoronoiError};
use crate::lattice::RelevantVectorSet;
use crate::linalg::{rank_exact, ExactVector};
use rayon::prelude::*;

/// For each relevant vector, gather the vertices with
/// `|2v·n − ‖n‖²| ≤ ε` on shadows, certify each inclusion exactly, and
/// build the facet face. A facet whose vertex set spans less than `n−1`
/// affine dimensions is a consistency error (the vertex set is
/// incomplete).
pub fn assemble_facets(
    relevant: &RelevantVectorSet,
    pool: &VertexPool,
    dim: usize,
    config: &BuildConfig,
) -> Result<Vec<Face>, VoronoiError> {
    let eps = config.eps;
    let results: Vec<Result<Face, VoronoiError>> = (0..relevant.len() as u32)
        .into_par_iter()
        .map(|i| {
            let normal = relevant.get(i);
            let nsq = normal.norm_sq_shadow();
            let tol = eps.max(1e-12) * nsq.max(1.0);
            let mut verts: Vec<u32> = Vec::new();
            for (vi, v) in pool.vertices.iter().enumerate() {
                let slack = 2.0 * dot(v.shadow(), normal.shadow()) - nsq;
                if slack.abs() <= tol.max(1e-7) && on_facet_plane(v, normal) {
                    verts.push(vi as u32);
                }
            }
            if affine_rank_at_least(pool, &verts, dim - 1) < dim - 1 {
                return Err(VoronoiError::Consistency(format!(
                    "facet {i} has affine dimension < {} ({} vertices)",
                    dim - 1,
                    verts.len()
                )));
            }
            let mut f = Face::new(verts);
            f.normal = Some(i);
            Ok(f)
        })
        .collect();
    results.into_iter().collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Exact affine rank of a vertex-index set, stopping early once `cap` is
/// reached (returns `min(affine rank, cap)`).
pub fn affine_rank_at_least(pool: &VertexPool, verts: &[u32], cap: usize) -> usize {
    if verts.len() <= 1 {
        return 0;
    }
    let v0 = pool.get(verts[0]);
    let mut basis: Vec<ExactVector> = Vec::new();
    for &vi in &verts[1..] {
        let d = pool.get(vi).sub(v0);
        let mut probe = basis.clone();
        probe.push(d);
        if rank_exact(&probe) == probe.len() {
            basis = probe;
            if basis.len() >= cap {
                return cap;
            }
        }
    }
    basis.len()
}

/// Floating-point affine dimension of a vertex set (shadow pre-filter).
pub fn affine_rank_float(pool: &VertexPool, verts: &[u32], eps: f64) -> usize {
    if verts.len() <= 1 {
        return 0;
    }
    let v0 = pool.get(verts[0]);
    let diffs: Vec<ExactVector> = verts[1..]
        .iter()
        .map(|&vi| pool.get(vi).sub(v0))
        .collect();
    crate::linalg::rank_float(&diffs, eps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{catalog, relevant_vectors};
    use crate::symmetry::MatrixGroup;
    use crate::voronoi::vertices::find_vertices;

    #[test]
    fn z2_facets_have_two_vertices() {
        let l = catalog::by_name("Z2", None).unwrap();
        let rv = relevant_vectors(&l);
        let g = MatrixGroup::new(l.symmetry_generators.clone()).unwrap();
        let cfg = BuildConfig {
            vertex_streak: 40,
            ..Default::default()
        };
        let out = find_vertices(&l, &g, &rv, &cfg).unwrap();
        let facets = assemble_facets(&rv, &out.pool, 2, &cfg).unwrap();
        assert_eq!(facets.len(), 4);
        for f in &facets {
            assert_eq!(f.vertices.len(), 2);
        }
    }

    #[test]
    fn a2_facets_have_two_vertices() {
        let l = catalog::by_name("A2", None).unwrap();
        let rv = relevant_vectors(&l);
        let g = MatrixGroup::new(l.symmetry_generators.clone()).unwrap();
        let cfg = BuildConfig {
            vertex_streak: 40,
            ..Default::default()
        };
        let out = find_vertices(&l, &g, &rv, &cfg).unwrap();
        let facets = assemble_facets(&rv, &out.pool, 2, &cfg).unwrap();
        assert_eq!(facets.len(), 6);
        for f in &facets {
            assert_eq!(f.vertices.len(), 2, "hexagon edges have 2 vertices");
        }
    }
}
