//! Coset algebra for the transformation search: cosets `g·H` of stabilizer
//! subgroups, their intersections, and the `T_xy = g_xy·Stab(x)` sets of
//! all transformations between two equivalent vectors.

use super::chain::StabChain;
use super::group::{PermutationGroup, VectorOrbit};
use super::perm::Perm;
use super::SymmetryError;
use crate::linalg::ExactVector;
use std::sync::Arc;

/// Explicit-enumeration threshold: below this subgroup size, coset
/// intersections fall back to element-set intersection.
pub const COSET_ENUMERATION_THRESHOLD: usize = 5_000;

/// A left coset `rep·H` of a subgroup of the ambient permutation group, or
/// the empty set.
#[derive(Clone)]
pub enum Coset {
    Empty,
    Of {
        rep: Perm,
        sub: Arc<PermutationGroup>,
        /// When the subgroup is the stabilizer of a single vector `x` and
        /// the coset is `{g : g·x = y}`, the pair is recorded to enable
        /// orbit-based intersection without backtracking.
        constraint: Option<(ExactVector, ExactVector)>,
    },
}

impl Coset {
    pub fn full_group(g: &Arc<PermutationGroup>) -> Coset {
        Coset::Of {
            rep: Perm::identity(g.degree()),
            sub: g.clone(),
            constraint: None,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Coset::Empty)
    }

    /// Number of elements (`|H|`), 0 for the empty coset.
    pub fn size(&self) -> u128 {
        match self {
            Coset::Empty => 0,
            Coset::Of { sub, .. } => sub.order(),
        }
    }

    pub fn contains(&self, g: &Perm) -> bool {
        match self {
            Coset::Empty => false,
            Coset::Of { rep, sub, .. } => sub.contains_perm(&g.compose(&rep.inverse())),
        }
    }

    /// Any element of the coset.
    pub fn any_element(&self) -> Option<Perm> {
        match self {
            Coset::Empty => None,
            Coset::Of { rep, .. } => Some(rep.clone()),
        }
    }

    /// Sample random elements (representative times random subgroup
    /// elements).
    pub fn sample(&self, count: usize, rng: &mut impl rand::Rng) -> Vec<Perm> {
        match self {
            Coset::Empty => Vec::new(),
            Coset::Of { rep, sub, .. } => (0..count)
                .map(|_| sub.chain.random_element(rng).compose(rep))
                .collect(),
        }
    }
}

/// All transformations taking the classified vector `x` into `y` (which
/// must lie in the same orbit): the left coset `g_xy·Stab(x)`, with
/// `g_xy = g_y·g_x⁻¹` from the stored witnesses and `Stab(x)` obtained by
/// conjugating the cached representative stabilizer.
pub fn transformation_coset(
    group: &Arc<PermutationGroup>,
    orbit: &VectorOrbit,
    rep_stabilizer: &Arc<PermutationGroup>,
    x_pos: u32,
    y_pos: u32,
) -> Coset {
    let g_x = orbit.witness_perm(x_pos, &group.gen_perms);
    let g_y = orbit.witness_perm(y_pos, &group.gen_perms);
    // rep·g_x = x, so a map x → y is g_x⁻¹·g_y (apply g_x⁻¹ first)
    let g_xy = g_x.inverse().compose(&g_y);
    let stab_x = if x_pos == 0 {
        rep_stabilizer.clone()
    } else {
        let chain = rep_stabilizer.chain.conjugated(&g_x);
        Arc::new(subgroup_with_chain(group, chain))
    };
    // left coset: every element first fixes x, then moves it to y
    Coset::Of {
        rep: g_xy.clone(),
        sub: stab_x,
        constraint: Some((
            orbit.points[x_pos as usize].clone(),
            orbit.points[y_pos as usize].clone(),
        )),
    }
}

pub(crate) fn subgroup_with_chain(
    parent: &Arc<PermutationGroup>,
    chain: StabChain,
) -> PermutationGroup {
    let gen_perms = chain.generators().to_vec();
    let matrix_gens = gen_perms
        .iter()
        .map(|p| parent.action.matrix_of_perm(p))
        .collect();
    PermutationGroup {
        action: parent.action.clone(),
        matrix_gens,
        gen_perms,
        chain,
    }
}

/// Intersect two cosets over the same parent group.
///
/// `g₁H₁ ∩ g₂H₂` is empty or a single coset of `H₁∩H₂`. When the right
/// operand carries a vector constraint `{g : g·x = y}`, the intersection is
/// computed directly from the orbit of `x` under `H₁` (no backtracking);
/// otherwise subgroups below [`COSET_ENUMERATION_THRESHOLD`] are
/// intersected by explicit element enumeration, and larger ones by a
/// backtrack search over aligned stabilizer chains.
pub fn coset_intersect(
    parent: &Arc<PermutationGroup>,
    a: &Coset,
    b: &Coset,
) -> Result<Coset, SymmetryError> {
    let (a_rep, a_sub) = match a {
        Coset::Empty => return Ok(Coset::Empty),
        Coset::Of { rep, sub, .. } => (rep, sub),
    };
    let (b_rep, b_sub, b_constraint) = match b {
        Coset::Empty => return Ok(Coset::Empty),
        Coset::Of {
            rep,
            sub,
            constraint,
        } => (rep, sub, constraint),
    };

    if let Some((x, y)) = b_constraint {
        return Ok(constrain_coset(parent, a_rep, a_sub, x, y));
    }

    // u ∈ H₁ ∩ w·H₂ with w = a_rep⁻¹·b_rep ⟹ result = (a_rep·u)·(H₁∩H₂)
    let w = b_rep.compose(&a_rep.inverse());
    let small = a_sub.order().min(b_sub.order());
    if small <= COSET_ENUMERATION_THRESHOLD as u128 {
        let (enumerate, other, via_w) = if a_sub.order() <= b_sub.order() {
            (a_sub, b_sub, true)
        } else {
            (b_sub, a_sub, false)
        };
        let elements = enumerate
            .chain
            .elements(COSET_ENUMERATION_THRESHOLD)
            .expect("order checked");
        let mut matches: Vec<Perm> = Vec::new();
        for e in elements {
            // members of H₁ ∩ wH₂ expressed through the enumerated side
            let candidate = if via_w {
                e // e ∈ H₁; test e ∈ w∘H₂
            } else {
                e.compose(&w) // w∘e with e ∈ H₂; test membership in H₁
            };
            let ok = if via_w {
                b_sub.contains_perm(&candidate.compose(&w.inverse()))
            } else {
                a_sub.contains_perm(&candidate)
            };
            if ok {
                matches.push(candidate);
            }
        }
        let Some(u0) = matches.first().cloned() else {
            return Ok(Coset::Empty);
        };
        let u0_inv = u0.inverse();
        let k_gens: Vec<super::perm::PermRef> = matches
            .iter()
            .map(|u| Arc::new(u.compose(&u0_inv)))
            .collect();
        let chain = StabChain::build(parent.degree(), &k_gens, &[]);
        return Ok(Coset::Of {
            rep: u0.compose(a_rep),
            sub: Arc::new(subgroup_with_chain(parent, chain)),
            constraint: None,
        });
    }

    super::backtrack::intersect_by_backtrack(parent, a_rep, a_sub, &w, b_sub)
}

/// `{g ∈ rep·H : g·x = y}`: restrict a coset by one vector constraint.
///
/// Elements act as "subgroup element `h`, then `rep`", so the constraint
/// pulls back to `x·M_h = y·M_rep⁻¹`: an orbit lookup of `x` under `H`,
/// whose witness and point stabilizer give the restricted coset.
fn constrain_coset(
    parent: &Arc<PermutationGroup>,
    rep: &Perm,
    sub: &Arc<PermutationGroup>,
    x: &ExactVector,
    y: &ExactVector,
) -> Coset {
    // elements of rep·H act as (h then rep); need rep(h(x)) = y ⇔ h(x) = rep⁻¹(y)
    let rep_matrix_inv = parent
        .action
        .matrix_of_perm(rep)
        .inverse()
        .expect("orthogonal");
    let target = y.apply_matrix(&rep_matrix_inv);
    // orbit of x under H with witnesses
    let mg = super::group::MatrixGroup {
        generators: sub.matrix_gens.clone(),
        dim: parent.action.vectors[0].dim(),
    };
    let Ok(orbit) = super::group::orbit_with_witnesses(&mg, x, usize::MAX) else {
        return Coset::Empty;
    };
    let Some(pos) = orbit.position_of(&target) else {
        return Coset::Empty;
    };
    let u0 = orbit.witness_perm(pos, &sub.gen_perms);
    let stab = sub.stabilizer_of_orbit_member(&orbit, 0);
    Coset::Of {
        rep: u0.compose(rep),
        sub: Arc::new(stab),
        constraint: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{catalog, relevant_vectors};
    use crate::symmetry::group::{to_permutation_group, MatrixGroup};

    fn z3_group() -> (Arc<PermutationGroup>, crate::lattice::RelevantVectorSet) {
        let l = catalog::by_name("Z3", None).unwrap();
        let rv = relevant_vectors(&l);
        let mg = MatrixGroup::new(l.symmetry_generators.clone()).unwrap();
        (Arc::new(to_permutation_group(&mg, &rv).unwrap()), rv)
    }

    #[test]
    fn full_group_coset_and_identity_intersection() {
        let (g, _) = z3_group();
        assert_eq!(g.order(), 48); // signed permutations of 3 coordinates
        let a = Coset::full_group(&g);
        let b = Coset::full_group(&g);
        let c = coset_intersect(&g, &a, &b).unwrap();
        assert_eq!(c.size(), 48);
    }

    #[test]
    fn disjoint_cosets_of_same_subgroup() {
        let (g, rv) = z3_group();
        // stabilizer of the ground point for e₁
        let e1 = crate::linalg::ExactVector::from_ints(&[1, 0, 0]);
        let p = rv.index_of(&e1).unwrap();
        let stab = Arc::new(g.stabilizer_of_point(p));
        assert_eq!(stab.order(), 8); // signed perms of the other two coords
        // an element moving e₁: coset g·H ≠ H
        let mover = g
            .chain
            .elements(100)
            .unwrap()
            .into_iter()
            .find(|e| e.apply(p) != p)
            .unwrap();
        let a = Coset::Of {
            rep: Perm::identity(g.degree()),
            sub: stab.clone(),
            constraint: None,
        };
        let b = Coset::Of {
            rep: mover,
            sub: stab.clone(),
            constraint: None,
        };
        let c = coset_intersect(&g, &a, &b).unwrap();
        assert!(c.is_empty());
        // a ∩ a = a
        let c = coset_intersect(&g, &a, &a).unwrap();
        assert_eq!(c.size(), 8);
        assert!(c.contains(&Perm::identity(g.degree())));
    }

    #[test]
    fn identity_cosets_intersect_to_subgroup_intersection() {
        let (g, rv) = z3_group();
        let e1 = rv.index_of(&crate::linalg::ExactVector::from_ints(&[1, 0, 0])).unwrap();
        let e2 = rv.index_of(&crate::linalg::ExactVector::from_ints(&[0, 1, 0])).unwrap();
        let h1 = Arc::new(g.stabilizer_of_point(e1));
        let h2 = Arc::new(g.stabilizer_of_point(e2));
        let a = Coset::Of {
            rep: Perm::identity(g.degree()),
            sub: h1,
            constraint: None,
        };
        let b = Coset::Of {
            rep: Perm::identity(g.degree()),
            sub: h2,
            constraint: None,
        };
        let c = coset_intersect(&g, &a, &b).unwrap();
        // elements fixing both e₁ and e₂: signed flip of the third axis
        assert_eq!(c.size(), 2);
    }
}
