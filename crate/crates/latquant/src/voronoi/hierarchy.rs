//! Top-down construction of the reduced face hierarchy.

use super::classify::{classify_faces, iterated_classify};
use super::facets::{affine_rank_at_least, affine_rank_float, assemble_facets};
use super::vertices::VertexSearchOutcome;
use super::{ActingContext, BuildConfig, Classification, Face, VertexPool, VoronoiError};
use crate::lattice::{Lattice, RelevantVectorSet};
use crate::symmetry::{to_permutation_group, MatrixGroup, Perm, PermutationGroup};
use rayon::prelude::*;
use std::collections::HashMap;
use std::sync::Arc;

/// The symmetry-reduced face hierarchy: `levels[d]` holds the constructed
/// `d`-faces (all children of the chosen representatives, classified), with
/// `levels[n]` the cell itself.
pub struct FaceHierarchy {
    pub dim: usize,
    pub levels: Vec<Vec<Face>>,
    pub pool: Arc<VertexPool>,
    pub relevant: Arc<RelevantVectorSet>,
    pub ctx: Arc<ActingContext>,
    /// number of classes per dimension 0..=n
    pub class_counts: Vec<usize>,
    /// orders of the subgroups used for iterated classification
    pub subgroup_chain_orders: Vec<u128>,
}

impl FaceHierarchy {
    pub fn total_classes(&self) -> usize {
        self.class_counts.iter().sum()
    }

    pub fn representatives(&self, d: usize) -> impl Iterator<Item = (usize, &Face)> {
        self.levels[d]
            .iter()
            .enumerate()
            .filter(|(_, f)| f.is_representative())
    }

    /// Constructed-face count (all levels), the quantity the reduction is
    /// about: far smaller than the total number of faces of the cell.
    pub fn constructed_faces(&self) -> usize {
        self.levels.iter().map(|l| l.len()).sum()
    }
}

/// Create the children of all representatives of `current` by pairwise
/// vertex-set intersection with the children of one representative parent
/// ("relevant siblings"), deduplicated by vertex set with merged parents.
///
/// `above` is the level the parents of `current` live in. Returns the new
/// level; parent/child links into `current` are updated in place.
pub fn intersect_faces(
    current: &mut [Face],
    above: &[Face],
    pool: &VertexPool,
    config: &BuildConfig,
) -> Result<Vec<Face>, VoronoiError> {
    let d_parent = affine_dim_of(current, pool, config);
    let reps: Vec<usize> = (0..current.len())
        .filter(|&i| current[i].is_representative())
        .collect();

    // per representative, compute candidate children in parallel
    let current_ref: &[Face] = current;
    let candidates: Vec<Result<Vec<(usize, usize, Vec<u32>)>, VoronoiError>> = reps
        .par_iter()
        .map(|&r| {
            let p1 = &current_ref[r];
            // children of one representative parent of P1
            let siblings: &[u32] = {
                let rep_parent = p1
                    .parents
                    .iter()
                    .find(|&&p| above[p as usize].is_representative());
                match rep_parent {
                    Some(&p) => &above[p as usize].children,
                    None => {
                        return Err(VoronoiError::Structural(
                            "face has no representative parent".into(),
                        ))
                    }
                }
            };
            let mut out = Vec::new();
            for &s in siblings {
                let s = s as usize;
                if s == r {
                    continue;
                }
                let p2 = &current_ref[s];
                let inter = intersect_sorted(&p1.vertices, &p2.vertices);
                if inter.is_empty() {
                    continue;
                }
                // dimension filter: shadow rank first, exact only on accepts
                let want = d_parent - 1;
                if affine_rank_float(pool, &inter, config.eps) != want {
                    continue;
                }
                if affine_rank_at_least(pool, &inter, want + 1) != want {
                    continue;
                }
                out.push((r, s, inter));
            }
            Ok(out)
        })
        .collect();

    // deterministic sequential merge with vertex-set deduplication
    let mut children: Vec<Face> = Vec::new();
    let mut seen: HashMap<Vec<u32>, u32> = HashMap::new();
    for group in candidates {
        for (r, s, verts) in group? {
            let child_idx = match seen.get(&verts) {
                Some(&c) => c,
                None => {
                    let c = children.len() as u32;
                    seen.insert(verts.clone(), c);
                    children.push(Face::new(verts));
                    c
                }
            };
            for parent in [r as u32, s as u32] {
                if !children[child_idx as usize].parents.contains(&parent) {
                    children[child_idx as usize].parents.push(parent);
                    current[parent as usize].children.push(child_idx);
                }
            }
        }
    }
    Ok(children)
}

fn affine_dim_of(faces: &[Face], pool: &VertexPool, config: &BuildConfig) -> usize {
    // all faces of a level share their dimension; measure the first
    let f = &faces[0];
    let fl = affine_rank_float(pool, &f.vertices, config.eps);
    debug_assert_eq!(affine_rank_at_least(pool, &f.vertices, fl + 1), fl);
    fl
}

fn intersect_sorted(a: &[u32], b: &[u32]) -> Vec<u32> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn is_subset_sorted(a: &[u32], b: &[u32]) -> bool {
    let mut j = 0;
    for &x in a {
        while j < b.len() && b[j] < x {
            j += 1;
        }
        if j == b.len() || b[j] != x {
            return false;
        }
        j += 1;
    }
    true
}

/// Compute and cache `N(F)` for every face of a level: the normals of all
/// facets whose vertex set contains the face's vertex set.
pub fn cache_facet_normals(
    faces: &mut [Face],
    facets: &[Face],
    dim: usize,
    level_dim: usize,
) -> Result<(), VoronoiError> {
    let normals: Vec<Arc<Vec<u32>>> = faces
        .par_iter()
        .map(|f| {
            let mut ns: Vec<u32> = Vec::new();
            for facet in facets {
                if is_subset_sorted(&f.vertices, &facet.vertices) {
                    ns.push(facet.normal.expect("facet has a normal"));
                }
            }
            Arc::new(ns)
        })
        .collect();
    for (f, ns) in faces.iter_mut().zip(normals) {
        if ns.len() < dim - level_dim {
            return Err(VoronoiError::Consistency(format!(
                "face has {} normals, expected at least {}",
                ns.len(),
                dim - level_dim
            )));
        }
        f.facet_normals = Some(ns);
    }
    Ok(())
}

/// Classify the facet level directly from the relevant-vector classes:
/// facets are equivalent exactly when their normals are, with the same
/// witnesses.
fn classify_facets(faces: &mut [Face], ctx: &ActingContext, next_class_id: &mut u32) {
    let mut rep_of_class: HashMap<u32, u32> = HashMap::new();
    // representatives: orbit roots first (deterministic)
    let order: Vec<usize> = {
        let mut idx: Vec<usize> = (0..faces.len()).collect();
        idx.sort_by_key(|&i| {
            let ni = faces[i].normal.unwrap();
            let (c, pos) = ctx.normal_class_of[ni as usize];
            (c, pos)
        });
        idx
    };
    for i in order {
        let ni = faces[i].normal.unwrap();
        let (c, pos) = ctx.normal_class_of[ni as usize];
        match rep_of_class.get(&c) {
            None => {
                debug_assert_eq!(pos, 0);
                rep_of_class.insert(c, i as u32);
                faces[i].class = Classification::Representative {
                    class_id: *next_class_id,
                };
                *next_class_id += 1;
            }
            Some(&rep) => {
                let orbit = &ctx.normal_classes.orbits[c as usize];
                let w = orbit.witness_perm(pos, &ctx.group.gen_perms);
                faces[i].class = Classification::Member { rep, witness: w };
            }
        }
    }
}

/// Classify the vertex level directly from the vertex classes.
fn classify_zero_faces(faces: &mut [Face], ctx: &ActingContext, next_class_id: &mut u32) {
    let mut rep_of_class: HashMap<u32, (u32, Perm)> = HashMap::new();
    let mut order: Vec<usize> = (0..faces.len()).collect();
    order.sort_by_key(|&i| {
        let v = faces[i].vertices[0];
        ctx.vertex_class_of[v as usize]
    });
    for i in order {
        let v = faces[i].vertices[0];
        let (c, pos) = ctx.vertex_class_of[v as usize];
        let orbit = &ctx.vertex_classes.orbits[c as usize];
        let w_i = orbit.witness_perm(pos, &ctx.group.gen_perms);
        match rep_of_class.get(&c) {
            None => {
                rep_of_class.insert(c, (i as u32, w_i));
                faces[i].class = Classification::Representative {
                    class_id: *next_class_id,
                };
                *next_class_id += 1;
            }
            Some((rep, w_rep)) => {
                // root --w_rep--> rep vertex, root --w_i--> this vertex:
                // witness = w_rep⁻¹ then w_i (matrix product M_rep⁻¹·M_i)
                let w = w_rep.inverse().compose(&w_i);
                faces[i].class = Classification::Member {
                    rep: *rep,
                    witness: w,
                };
            }
        }
    }
}

/// Build the full reduced hierarchy: facets, then for `d = n−2 … 0`
/// classify the parents (iterated subgroup scheme) and intersect the
/// representatives' children.
pub fn construct_face_hierarchy(
    lattice: &Lattice,
    group: &MatrixGroup,
    relevant: Arc<RelevantVectorSet>,
    vertex_outcome: VertexSearchOutcome,
    config: &BuildConfig,
) -> Result<FaceHierarchy, VoronoiError> {
    let n = lattice.dim();
    let pool = Arc::new(vertex_outcome.pool);
    let pg = Arc::new(to_permutation_group(group, &relevant)?);
    let ctx = Arc::new(ActingContext::new(
        pg.clone(),
        &pool,
        &relevant,
        Some(Arc::new(vertex_outcome.classes)),
    )?);

    // facets and the top face
    let mut facets = assemble_facets(&relevant, &pool, n, config)?;
    let facet_snapshot = facets.clone();
    cache_facet_normals(&mut facets, &facet_snapshot, n, n - 1)?;
    let mut top = Face::new((0..pool.len() as u32).collect());
    top.class = Classification::Representative { class_id: 0 };
    top.children = (0..facets.len() as u32).collect();
    for f in facets.iter_mut() {
        f.parents.push(0);
    }

    let mut levels: Vec<Vec<Face>> = vec![Vec::new(); n + 1];
    levels[n] = vec![top];
    levels[n - 1] = facets;

    let mut next_class_id = 1u32;
    let mut subgroup_orders: Vec<u128> = Vec::new();
    // contexts for the iterated classification, built once available
    let mut chain_ctxs: Vec<Arc<ActingContext>> = Vec::new();

    for d in (0..=n.saturating_sub(2)).rev() {
        if n < 2 {
            break;
        }
        // classify level d+1
        if d + 1 == n - 1 {
            classify_facets(&mut levels[n - 1], &ctx, &mut next_class_id);
        } else if chain_ctxs.is_empty() {
            let mut level = std::mem::take(&mut levels[d + 1]);
            classify_faces(&mut level, &ctx, &pool, config.perm_budget, &mut next_class_id)?;
            levels[d + 1] = level;
        } else {
            let mut level = std::mem::take(&mut levels[d + 1]);
            let mut chain = chain_ctxs.clone();
            chain.push(ctx.clone());
            iterated_classify(&mut level, &chain, &pool, config.perm_budget, &mut next_class_id)?;
            levels[d + 1] = level;
        }

        // after the (n−2)-level is classified, assemble the subgroup chain
        // from facet and (n−2)-face stabilizers
        if d + 1 == n - 1 && n >= 3 {
            chain_ctxs = build_subgroup_chain(&pg, &pool, &relevant, &levels, n, config)?;
            subgroup_orders = chain_ctxs.iter().map(|c| c.order()).collect();
        }

        // intersect to create level d
        let (current, above) = {
            let (lo, hi) = levels.split_at_mut(d + 2);
            (&mut lo[d + 1], &hi[0][..])
        };
        let children = intersect_faces(current, above, &pool, config)?;
        levels[d] = children;
        if levels[d].is_empty() && d > 0 {
            return Err(VoronoiError::Consistency(format!(
                "no faces of dimension {d} were constructed"
            )));
        }
        let facets_snapshot = levels[n - 1].clone();
        cache_facet_normals(&mut levels[d], &facets_snapshot, n, d)?;
    }

    // the 0-faces are classified straight from the vertex classification
    if n >= 2 {
        classify_zero_faces(&mut levels[0], &ctx, &mut next_class_id);
    } else {
        // n = 1: the loop never ran; classify facet level (the two endpoints)
        classify_facets(&mut levels[0], &ctx, &mut next_class_id);
    }

    let class_counts: Vec<usize> = levels
        .iter()
        .map(|l| l.iter().filter(|f| f.is_representative()).count())
        .collect();

    Ok(FaceHierarchy {
        dim: n,
        levels,
        pool,
        relevant,
        ctx,
        class_counts,
        subgroup_chain_orders: subgroup_orders,
    })
}

/// Subgroup chain for iterated classification: stabilizers of the
/// representative facets and of the representative `(n−2)`-faces (their
/// normal sets), filtered to orders in `[min_order, |G|)`, ascending, at
/// most `cap` of them.
fn build_subgroup_chain(
    pg: &Arc<PermutationGroup>,
    pool: &Arc<VertexPool>,
    relevant: &Arc<RelevantVectorSet>,
    levels: &[Vec<Face>],
    n: usize,
    config: &BuildConfig,
) -> Result<Vec<Arc<ActingContext>>, VoronoiError> {
    let mut subgroups: Vec<Arc<PermutationGroup>> = Vec::new();
    for (_, f) in levels[n - 1]
        .iter()
        .enumerate()
        .filter(|(_, f)| f.is_representative())
    {
        let ni = f.normal.unwrap();
        subgroups.push(Arc::new(pg.stabilizer_of_point(ni)));
    }
    for f in levels[n - 2].iter().filter(|f| f.is_representative()) {
        let ns = f.facet_normals.as_ref().unwrap();
        if let Some(s) = pg.stabilizer_of_point_set(ns, config.set_orbit_cap) {
            subgroups.push(Arc::new(s));
        }
    }
    let full = pg.order();
    subgroups.retain(|s| s.order() >= config.subgroup_min_order && s.order() < full);
    subgroups.sort_by_key(|s| s.order());
    subgroups.truncate(config.subgroup_cap);

    let mut ctxs = Vec::with_capacity(subgroups.len());
    for s in subgroups {
        ctxs.push(Arc::new(ActingContext::new(s, pool, relevant, None)?));
    }
    Ok(ctxs)
}
