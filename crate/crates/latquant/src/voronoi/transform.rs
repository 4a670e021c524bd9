//! The transformation search: decide whether two faces are equivalent
//! under the acting group and produce a mapping group element.

use super::classify::{choose_defining_set, DefiningKind};
use super::{ActingContext, Face, VoronoiError};
use crate::symmetry::{coset_intersect, transformation_coset, Coset, Perm};
use std::collections::HashMap;

/// Evaluate whether `f2 = g·f1` for some `g` in the acting group and
/// return one such `g`.
///
/// The defining sets of both faces are partitioned into class-aligned
/// subsets ordered by size; a depth-first search over the per-subset
/// permutations maintains the pool of remaining transformations as coset
/// intersections. Any element of a nonempty final pool is returned; `None`
/// after exhausting the permutations means the faces are inequivalent.
///
/// Callers are expected to have matched fingerprints already; mismatched
/// class structure returns `None` immediately.
pub fn find_transformation(
    f1: &Face,
    f2: &Face,
    ctx: &ActingContext,
    budget: u64,
) -> Result<Option<Perm>, VoronoiError> {
    if f1.vertices == f2.vertices {
        return Ok(Some(Perm::identity(ctx.group.degree())));
    }
    let d1 = choose_defining_set(f1, ctx);
    let d2 = choose_defining_set(f2, ctx);
    if d1.kind != d2.kind || d1.ids.len() != d2.ids.len() {
        return Ok(None);
    }
    let kind = d1.kind;

    // partition by class id, aligned across the two faces
    let class_of = |id: u32| -> (u32, u32) {
        match kind {
            DefiningKind::Vertex => ctx.vertex_class_of[id as usize],
            DefiningKind::Normal => ctx.normal_class_of[id as usize],
        }
    };
    let partition = |ids: &[u32]| -> Vec<(u32, Vec<(u32, u32)>)> {
        let mut by_class: HashMap<u32, Vec<(u32, u32)>> = HashMap::new();
        for &id in ids {
            let (c, pos) = class_of(id);
            by_class.entry(c).or_default().push((id, pos));
        }
        let mut subsets: Vec<(u32, Vec<(u32, u32)>)> = by_class.into_iter().collect();
        subsets.sort_by_key(|(c, _)| *c);
        subsets.sort_by_key(|(_, v)| v.len()); // stable: classes stay ordered
        subsets
    };
    let xs = partition(&d1.ids);
    let ys = partition(&d2.ids);
    if xs.len() != ys.len()
        || xs
            .iter()
            .zip(&ys)
            .any(|(a, b)| a.0 != b.0 || a.1.len() != b.1.len())
    {
        return Ok(None);
    }

    let mut search = Search {
        ctx,
        kind,
        xs: &xs,
        ys: &ys,
        budget,
        checked: 0,
        pair_cache: HashMap::new(),
    };
    let start = Coset::full_group(&ctx.group);
    let result = search.filter_transforms(0, start)?;
    Ok(result.and_then(|c| c.any_element()))
}

struct Search<'a> {
    ctx: &'a ActingContext,
    kind: DefiningKind,
    xs: &'a [(u32, Vec<(u32, u32)>)],
    ys: &'a [(u32, Vec<(u32, u32)>)],
    budget: u64,
    checked: u64,
    /// cache of T_xy cosets per (subset, x position, y position)
    pair_cache: HashMap<(usize, u32, u32), Coset>,
}

impl Search<'_> {
    fn pair_coset(&mut self, j: usize, x: (u32, u32), y: (u32, u32)) -> Coset {
        let class = self.xs[j].0;
        let key = (j, x.1, y.1);
        if let Some(c) = self.pair_cache.get(&key) {
            return c.clone();
        }
        let orbit = match self.kind {
            DefiningKind::Vertex => &self.ctx.vertex_classes.orbits[class as usize],
            DefiningKind::Normal => &self.ctx.normal_classes.orbits[class as usize],
        };
        let stab = self.ctx.rep_stabilizer(self.kind, class);
        let coset = transformation_coset(&self.ctx.group, orbit, &stab, x.1, y.1);
        self.pair_cache.insert(key, coset.clone());
        coset
    }

    /// Depth-first over subset pairs, iterating the permutations of `Y_j`
    /// and intersecting the pool with each vector pair's transformations.
    fn filter_transforms(&mut self, j: usize, pool: Coset) -> Result<Option<Coset>, VoronoiError> {
        if j == self.xs.len() {
            return Ok(Some(pool));
        }
        let k = self.xs[j].1.len();
        let mut sigma: Vec<usize> = (0..k).collect();
        loop {
            self.checked += 1;
            if self.checked > self.budget {
                return Err(VoronoiError::BudgetExceeded {
                    checked: self.checked,
                });
            }
            let mut p = pool.clone();
            let mut ok = true;
            for (idx, &s) in sigma.iter().enumerate() {
                let x = self.xs[j].1[idx];
                let y = self.ys[j].1[s];
                let t = self.pair_coset(j, x, y);
                p = coset_intersect(&self.ctx.group, &p, &t)?;
                if p.is_empty() {
                    ok = false;
                    break;
                }
            }
            if ok {
                if let Some(found) = self.filter_transforms(j + 1, p)? {
                    return Ok(Some(found));
                }
            }
            if !next_permutation(&mut sigma) {
                break;
            }
        }
        Ok(None)
    }
}

/// Lexicographic next permutation; returns false after the last one.
fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_enumeration() {
        let mut p = vec![0, 1, 2];
        let mut count = 1;
        while next_permutation(&mut p) {
            count += 1;
        }
        assert_eq!(count, 6);
        assert_eq!(p, vec![0, 1, 2].iter().rev().cloned().collect::<Vec<_>>());
    }
}
