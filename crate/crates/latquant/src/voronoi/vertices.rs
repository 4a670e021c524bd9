//! Numerical vertex search with exact lifting, translation expansion and
//! orbit classification.

use super::{in_voronoi_cell, BuildConfig, VertexPool, VoronoiError};
use crate::exact::ExactScalar;
use crate::lattice::{CvpSolver, Lattice, RelevantVectorSet};
use crate::linalg::{rank_float, select_independent, solve_vertex_lift, ExactVector};
use crate::symmetry::{orbit_with_witnesses, ClassifiedVectors, MatrixGroup, VectorOrbit};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

/// Result of the vertex search: the shared pool and its classification
/// under the full symmetry group.
pub struct VertexSearchOutcome {
    pub pool: VertexPool,
    pub classes: ClassifiedVectors,
    /// numerically found seeds that produced all classes
    pub seeds_used: usize,
}

/// Find all vertices of the Voronoi cell.
///
/// Repeatedly maximizes a perturbed linear objective over the cell on
/// floating-point shadows, lifts the optimum exactly from `n` independent
/// tight facet normals, certifies membership exactly, and expands every new
/// class through lattice translations (`v − m` for nearest lattice points
/// `m`) and through the symmetry orbit. The search stops after a configured
/// streak of rounds that produce no new class; completeness is certified
/// later by the volume consistency check, which is exact.
pub fn find_vertices(
    lattice: &Lattice,
    group: &MatrixGroup,
    relevant: &RelevantVectorSet,
    config: &BuildConfig,
) -> Result<VertexSearchOutcome, VoronoiError> {
    let n = lattice.dim();
    let solver = CvpSolver::new(&lattice.generator);
    let normals_shadow: Vec<&[f64]> = relevant.vectors().iter().map(|v| v.shadow()).collect();
    let norms_sq: Vec<f64> = relevant
        .vectors()
        .iter()
        .map(|v| v.norm_sq_shadow())
        .collect();

    let mut pool = VertexPool::new();
    let mut orbits: Vec<VectorOrbit> = Vec::new();
    let mut lookup: HashMap<ExactVector, (u32, u32)> = HashMap::new();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut seeds_used = 0usize;

    // accept a certified vertex: classify it, expand its orbit into the
    // pool, then chase lattice translations of the representative
    let mut accept = |v: ExactVector,
                      pool: &mut VertexPool,
                      orbits: &mut Vec<VectorOrbit>,
                      lookup: &mut HashMap<ExactVector, (u32, u32)>|
     -> Result<bool, VoronoiError> {
        if pool.position(&v).is_some() {
            return Ok(false);
        }
        let mut queue = vec![v];
        let mut grew = false;
        while let Some(rep) = queue.pop() {
            if pool.position(&rep).is_some() {
                continue;
            }
            grew = true;
            let class = orbits.len() as u32;
            let orbit = orbit_with_witnesses(group, &rep, usize::MAX)?;
            for (pos, p) in orbit.points.iter().enumerate() {
                pool.insert(p.clone());
                lookup.insert(p.clone(), (class, pos as u32));
            }
            // translations: v − m is a vertex for every nearest lattice
            // point m of v (the Voronoi cells are translated copies)
            for (_, m) in solver.closest_points_exact(&rep) {
                let t = rep.sub(&m);
                if pool.position(&t).is_none() {
                    queue.push(t);
                }
            }
            orbits.push(orbit);
        }
        Ok(grew)
    };

    let mut streak = 0u32;
    let mut round = 0usize;
    while streak < config.vertex_streak {
        round += 1;
        // objective: a relevant vector plus a relative perturbation
        let base = &normals_shadow[round % normals_shadow.len()];
        let scale = 1e-3 * norms_sq[round % norms_sq.len()].sqrt();
        let c: Vec<f64> = base
            .iter()
            .map(|x| x + scale * (rng.gen::<f64>() - 0.5))
            .collect();

        let Some(x) = maximize_over_cell(&c, &normals_shadow, &norms_sq, n) else {
            streak += 1;
            continue;
        };
        // collect near-tight normals and lift exactly
        let mut tight: Vec<u32> = (0..normals_shadow.len() as u32)
            .filter(|&i| {
                let s = 2.0 * dot(&x, normals_shadow[i as usize]) - norms_sq[i as usize];
                s.abs() <= 1e-7 * norms_sq[i as usize].max(1.0)
            })
            .collect();
        if tight.len() < n {
            streak += 1;
            continue;
        }
        // order candidates by float pivoting quality, then select an
        // exactly independent subset
        tight.sort_unstable();
        let tight_vecs: Vec<ExactVector> = tight
            .iter()
            .map(|&i| relevant.get(i).clone())
            .collect();
        if rank_float(&tight_vecs, config.eps) < n {
            streak += 1;
            continue;
        }
        let Some(chosen) = select_independent(&tight_vecs, n) else {
            streak += 1;
            continue;
        };
        let chosen_vecs: Vec<ExactVector> =
            chosen.iter().map(|&i| tight_vecs[i].clone()).collect();
        let Ok(vertex) = solve_vertex_lift(&chosen_vecs) else {
            streak += 1;
            continue;
        };
        if pool.position(&vertex).is_some() {
            streak += 1;
            continue;
        }
        // exact certification of Voronoi membership; a lift that fails is
        // a rejected sample, not an error
        if !in_voronoi_cell(&vertex, relevant) {
            streak += 1;
            continue;
        }
        seeds_used += 1;
        if accept(vertex, &mut pool, &mut orbits, &mut lookup)? {
            streak = 0;
        } else {
            streak += 1;
        }
    }

    if pool.is_empty() {
        return Err(VoronoiError::Consistency(
            "vertex search found no vertices (bad relevant-vector set?)".into(),
        ));
    }
    Ok(VertexSearchOutcome {
        pool,
        classes: ClassifiedVectors {
            orbits,
            lookup,
        },
        seeds_used,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Maximize `c·x` over the cell `{x : 2x·nᵢ ≤ ‖nᵢ‖²}` by an active-set ray
/// walk from the interior point 0: move along the objective projected onto
/// the current active set's complement, add the blocking constraint, and
/// stop at a corner with `n` active constraints. The walk is heuristic
/// (floating point); all acceptance decisions downstream are exact.
fn maximize_over_cell(
    c: &[f64],
    normals: &[&[f64]],
    norms_sq: &[f64],
    n: usize,
) -> Option<Vec<f64>> {
    let mut x = vec![0.0; n];
    let mut active: Vec<usize> = Vec::new();
    let mut basis: Vec<Vec<f64>> = Vec::new(); // orthogonalized active normals
    let mut dir = c.to_vec();
    for _ in 0..n {
        // project the objective onto the complement of the active normals
        let mut d = dir.clone();
        for b in &basis {
            let coef = dot(&d, b) / dot(b, b);
            for (di, bi) in d.iter_mut().zip(b) {
                *di -= coef * bi;
            }
        }
        let dn = dot(&d, &d).sqrt();
        if dn < 1e-12 * (dot(c, c).sqrt() + 1.0) {
            break;
        }
        // first blocking constraint along d
        let mut best_t = f64::INFINITY;
        let mut best_i = usize::MAX;
        for (i, nv) in normals.iter().enumerate() {
            if active.contains(&i) {
                continue;
            }
            let dn_i = dot(&d, nv);
            if dn_i <= 1e-12 * dn {
                continue;
            }
            let t = (norms_sq[i] / 2.0 - dot(&x, nv)) / dn_i;
            if t < best_t {
                best_t = t;
                best_i = i;
            }
        }
        if best_i == usize::MAX || !best_t.is_finite() {
            return None; // unbounded: relevant set cannot be right
        }
        for (xi, di) in x.iter_mut().zip(&d) {
            *xi += best_t * di;
        }
        active.push(best_i);
        // extend the orthogonal basis with the new normal
        let mut b = normals[best_i].to_vec();
        for ob in &basis {
            let coef = dot(&b, ob) / dot(ob, ob);
            for (bi, oi) in b.iter_mut().zip(ob) {
                *bi -= coef * oi;
            }
        }
        if dot(&b, &b) > 1e-18 {
            basis.push(b);
        }
        dir = c.to_vec();
    }
    Some(x)
}

/// Exact check used by verification: every stored vertex satisfies the
/// cell inequalities and lies on at least `n` facet planes.
pub fn vertex_is_valid(v: &ExactVector, relevant: &RelevantVectorSet, n: usize) -> bool {
    if !in_voronoi_cell(v, relevant) {
        return false;
    }
    let two = ExactScalar::from_int(2);
    let tight: Vec<ExactVector> = relevant
        .vectors()
        .iter()
        .filter(|w| &v.dot(w) * &two == w.norm_sq())
        .cloned()
        .collect();
    tight.len() >= n && select_independent(&tight, n).is_some()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{catalog, relevant_vectors};
    use num_bigint::BigInt;

    #[test]
    fn z2_vertices() {
        let l = catalog::by_name("Z2", None).unwrap();
        let rv = relevant_vectors(&l);
        let g = MatrixGroup::new(l.symmetry_generators.clone()).unwrap();
        let cfg = BuildConfig {
            vertex_streak: 40,
            ..Default::default()
        };
        let out = find_vertices(&l, &g, &rv, &cfg).unwrap();
        assert_eq!(out.pool.len(), 4);
        assert_eq!(out.classes.orbits.len(), 1);
        let half = crate::exact::Rational::new(BigInt::from(1), BigInt::from(2));
        let corner =
            ExactVector::from_rationals(vec![half.clone(), half]);
        assert!(out.pool.position(&corner).is_some());
        for v in &out.pool.vertices {
            assert!(vertex_is_valid(v, &rv, 2));
        }
    }

    #[test]
    fn a2_vertices_are_the_hexagon() {
        let l = catalog::by_name("A2", None).unwrap();
        let rv = relevant_vectors(&l);
        let g = MatrixGroup::new(l.symmetry_generators.clone()).unwrap();
        let cfg = BuildConfig {
            vertex_streak: 40,
            ..Default::default()
        };
        let out = find_vertices(&l, &g, &rv, &cfg).unwrap();
        assert_eq!(out.pool.len(), 6);
        assert_eq!(out.classes.orbits.len(), 1);
        // all at squared distance 1/3
        for v in &out.pool.vertices {
            assert_eq!(v.norm_sq(), ExactScalar::ratio(1, 3));
        }
    }
}
