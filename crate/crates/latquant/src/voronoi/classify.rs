//! Face classification: fingerprints, defining sets, classification under
//! one group, and the iterated scheme over a subgroup chain.

use super::transform::find_transformation;
use super::{ActingContext, Classification, Face, VertexPool, VoronoiError};
use rayon::prelude::*;
use std::collections::HashMap;

/// Which of `V(F)` / `N(F)` a defining set is drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DefiningKind {
    Vertex,
    Normal,
}

/// Group-invariant summary of a face: sorted per-class counts over
/// `V(F) ∪ N(F)`. Equivalent faces always share fingerprints.
pub type Fingerprint = Vec<(u8, u32, u32)>;

pub fn fingerprint(face: &Face, ctx: &ActingContext) -> Fingerprint {
    let mut counts: HashMap<(u8, u32), u32> = HashMap::new();
    for &v in face.vertices.iter() {
        *counts
            .entry((0, ctx.vertex_class_of[v as usize].0))
            .or_insert(0) += 1;
    }
    for &ni in face
        .facet_normals
        .as_ref()
        .expect("facet normals cached before classification")
        .iter()
    {
        *counts
            .entry((1, ctx.normal_class_of[ni as usize].0))
            .or_insert(0) += 1;
    }
    let mut fp: Fingerprint = counts
        .into_iter()
        .map(|((k, c), m)| (k, c, m))
        .collect();
    fp.sort_unstable();
    fp
}

/// The defining set used by the transformation search, chosen per the
/// class-respecting permutation counts: the set (vertices or normals) with
/// the smaller count of class-preserving permutations wins; ties go to the
/// smaller set, then to the normals.
pub struct DefiningSet {
    pub kind: DefiningKind,
    /// vertex-pool or ground indices
    pub ids: Vec<u32>,
    /// ∏ multiplicity! over classes, saturating
    pub permutation_count: u128,
}

fn permutation_count<I: Iterator<Item = u32>>(classes: I) -> u128 {
    let mut mult: HashMap<u32, u32> = HashMap::new();
    for c in classes {
        *mult.entry(c).or_insert(0) += 1;
    }
    let mut total: u128 = 1;
    for (_, m) in mult {
        for k in 2..=m as u128 {
            total = total.saturating_mul(k);
        }
    }
    total
}

pub fn choose_defining_set(face: &Face, ctx: &ActingContext) -> DefiningSet {
    let verts = face.vertices.as_ref();
    let normals = face
        .facet_normals
        .as_ref()
        .expect("facet normals cached")
        .as_ref();
    let pv = permutation_count(verts.iter().map(|&v| ctx.vertex_class_of[v as usize].0));
    let pn = permutation_count(normals.iter().map(|&i| ctx.normal_class_of[i as usize].0));
    let use_vertices = match pv.cmp(&pn) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => verts.len() < normals.len(),
    };
    if use_vertices {
        DefiningSet {
            kind: DefiningKind::Vertex,
            ids: verts.clone(),
            permutation_count: pv,
        }
    } else {
        DefiningSet {
            kind: DefiningKind::Normal,
            ids: normals.to_vec(),
            permutation_count: pn,
        }
    }
}

/// Classify faces of one dimension under the acting context: split by
/// fingerprint, then search for transformations against the running
/// representative list within each bucket. Buckets are independent and run
/// in parallel; class ids are assigned deterministically afterwards.
///
/// Every found equivalence is certified exactly: the witness must map the
/// representative's vertex set onto the member's vertex set.
pub fn classify_faces(
    faces: &mut [Face],
    ctx: &ActingContext,
    pool: &VertexPool,
    perm_budget: u64,
    next_class_id: &mut u32,
) -> Result<(), VoronoiError> {
    // bucket by fingerprint
    let mut buckets: HashMap<Fingerprint, Vec<usize>> = HashMap::new();
    for (i, f) in faces.iter().enumerate() {
        buckets.entry(fingerprint(f, ctx)).or_default().push(i);
    }
    let mut ordered: Vec<(Fingerprint, Vec<usize>)> = buckets.into_iter().collect();
    ordered.sort_unstable_by(|a, b| a.0.cmp(&b.0));

    // each bucket yields (face index → rep-or-member decision)
    struct BucketOut {
        reps: Vec<usize>,
        members: Vec<(usize, usize, crate::symmetry::Perm)>, // (face, rep, witness)
    }
    let faces_ref: &[Face] = faces;
    let outs: Vec<Result<BucketOut, VoronoiError>> = ordered
        .par_iter()
        .map(|(_, idxs)| {
            let mut reps: Vec<usize> = Vec::new();
            let mut members = Vec::new();
            for &i in idxs {
                let mut assigned = false;
                for &r in &reps {
                    match find_transformation(&faces_ref[r], &faces_ref[i], ctx, perm_budget)? {
                        Some(w) => {
                            if !ctx.witness_maps_vertex_set(
                                pool,
                                &w,
                                &faces_ref[r].vertices,
                                &faces_ref[i].vertices,
                            ) {
                                return Err(VoronoiError::Consistency(
                                    "transformation witness fails the exact vertex-set check"
                                        .into(),
                                ));
                            }
                            members.push((i, r, w));
                            assigned = true;
                            break;
                        }
                        None => continue,
                    }
                }
                if !assigned {
                    reps.push(i);
                }
            }
            Ok(BucketOut { reps, members })
        })
        .collect();

    for out in outs {
        let out = out?;
        for r in out.reps {
            faces[r].class = Classification::Representative {
                class_id: *next_class_id,
            };
            *next_class_id += 1;
        }
        for (i, r, w) in out.members {
            faces[i].class = Classification::Member {
                rep: r as u32,
                witness: w,
            };
        }
    }
    Ok(())
}

/// Iterated classification: classify under the smallest subgroup first,
/// then let each subsequent (larger) group compare only the current
/// representatives, merging classes. Members of a merged representative are
/// re-pointed transitively with composite witnesses, each verified exactly.
/// The chain must end with the full group.
pub fn iterated_classify(
    faces: &mut [Face],
    chain: &[std::sync::Arc<ActingContext>],
    pool: &VertexPool,
    perm_budget: u64,
    next_class_id: &mut u32,
) -> Result<(), VoronoiError> {
    assert!(!chain.is_empty());
    // first pass classifies everything (class ids are provisional until the
    // final group has run)
    let mut provisional = 0u32;
    classify_faces(faces, &chain[0], pool, perm_budget, &mut provisional)?;

    for ctx in &chain[1..] {
        // current representatives
        let rep_idx: Vec<usize> = (0..faces.len())
            .filter(|&i| faces[i].is_representative())
            .collect();
        // classify the representatives under the larger group
        let mut sub: Vec<Face> = rep_idx.iter().map(|&i| faces[i].clone()).collect();
        for f in &mut sub {
            f.class = Classification::Unclassified;
        }
        let mut sub_class = 0u32;
        classify_faces(&mut sub, ctx, pool, perm_budget, &mut sub_class)?;
        // merge: any representative that became a member re-points its
        // whole class
        for (k, f) in sub.iter().enumerate() {
            if let Classification::Member { rep, witness } = &f.class {
                let old_rep = rep_idx[k];
                let new_rep = rep_idx[*rep as usize];
                // members of old_rep now map through old_rep's witness
                for i in 0..faces.len() {
                    if i == old_rep {
                        continue;
                    }
                    if let Classification::Member { rep: r0, witness: w0 } = &faces[i].class {
                        if *r0 as usize == old_rep {
                            // new_rep → old_rep (witness) → member (w0)
                            let composite = witness.compose(w0);
                            if !ctx.witness_maps_vertex_set(
                                pool,
                                &composite,
                                &faces[new_rep].vertices,
                                &faces[i].vertices,
                            ) {
                                return Err(VoronoiError::Consistency(
                                    "composite witness fails the exact vertex-set check".into(),
                                ));
                            }
                            faces[i].class = Classification::Member {
                                rep: new_rep as u32,
                                witness: composite,
                            };
                        }
                    }
                }
                faces[old_rep].class = Classification::Member {
                    rep: new_rep as u32,
                    witness: witness.clone(),
                };
            }
        }
    }

    // final, stable class ids
    for f in faces.iter_mut() {
        if f.is_representative() {
            f.class = Classification::Representative {
                class_id: *next_class_id,
            };
            *next_class_id += 1;
        }
    }
    Ok(())
}
