//! Matrix groups, their faithful permutation images on relevant-vector
//! ground sets, orbits with witnesses, and stabilizer constructions.

use super::chain::StabChain;
use super::perm::{Perm, PermRef};
use super::SymmetryError;
use crate::exact::ExactScalar;
use crate::lattice::{compare_vectors, RelevantVectorSet};
use crate::linalg::{rank_exact, select_independent, ExactMatrix, ExactVector};
use num_traits::{Signed, ToPrimitive};
use std::collections::HashMap;
use std::sync::Arc;

/// A finite group of exact orthogonal matrices acting on row vectors as
/// `x ↦ x·M`.
#[derive(Clone)]
pub struct MatrixGroup {
    pub generators: Vec<ExactMatrix>,
    pub dim: usize,
}

impl MatrixGroup {
    pub fn new(generators: Vec<ExactMatrix>) -> Result<Self, SymmetryError> {
        assert!(!generators.is_empty(), "need at least one generator");
        let dim = generators[0].rows();
        for (i, g) in generators.iter().enumerate() {
            if g.rows() != dim || g.cols() != dim {
                return Err(SymmetryError::Domain(format!(
                    "generator {i} has shape {}×{}",
                    g.rows(),
                    g.cols()
                )));
            }
            if !g.is_orthogonal() {
                return Err(SymmetryError::NotOrthogonal(i));
            }
        }
        Ok(MatrixGroup { generators, dim })
    }

    pub fn trivial(dim: usize) -> Self {
        MatrixGroup {
            generators: vec![ExactMatrix::identity(dim)],
            dim,
        }
    }
}

/// A group orbit of an exact vector, stored as a breadth-first tree whose
/// edges are labeled by generator indices. Every orbit member carries an
/// implicit witness word; [`VectorOrbit::witness_matrix`] evaluates it to a
/// single matrix.
pub struct VectorOrbit {
    pub points: Vec<ExactVector>,
    pub parent: Vec<u32>,
    pub gen_of: Vec<u16>,
    pub index: HashMap<ExactVector, u32>,
}

impl VectorOrbit {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn representative(&self) -> &ExactVector {
        &self.points[0]
    }

    pub fn position_of(&self, v: &ExactVector) -> Option<u32> {
        self.index.get(v).copied()
    }

    /// Generator indices along the tree path root → `pos`.
    pub fn witness_word(&self, pos: u32) -> Vec<u16> {
        let mut word = Vec::new();
        let mut cur = pos;
        while cur != 0 {
            word.push(self.gen_of[cur as usize]);
            cur = self.parent[cur as usize];
        }
        word.reverse();
        word
    }

    /// The witness `g` with `points[pos] = rep · g`, as a matrix product.
    pub fn witness_matrix(&self, pos: u32, gens: &[ExactMatrix]) -> ExactMatrix {
        let dim = gens[0].rows();
        let mut m = ExactMatrix::identity(dim);
        for k in self.witness_word(pos) {
            m = m.mul(&gens[k as usize]);
        }
        m
    }

    /// The same witness as a permutation of a ground set, given the
    /// generator permutations aligned with the matrix generators.
    pub fn witness_perm(&self, pos: u32, gen_perms: &[PermRef]) -> Perm {
        let degree = gen_perms
            .first()
            .map(|p| p.degree())
            .expect("need generators");
        let mut p = Perm::identity(degree);
        for k in self.witness_word(pos) {
            p = p.compose(&gen_perms[k as usize]);
        }
        p
    }
}

/// Breadth-first orbit closure of `v` under the group generators,
/// recording parent/generator witnesses. Errors if the orbit exceeds `cap`.
pub fn orbit_with_witnesses(
    group: &MatrixGroup,
    v: &ExactVector,
    cap: usize,
) -> Result<VectorOrbit, SymmetryError> {
    let mut orbit = VectorOrbit {
        points: vec![v.clone()],
        parent: vec![0],
        gen_of: vec![0],
        index: HashMap::new(),
    };
    orbit.index.insert(v.clone(), 0);
    let mut i = 0;
    while i < orbit.points.len() {
        for (k, g) in group.generators.iter().enumerate() {
            let img = orbit.points[i].apply_matrix(g);
            if !orbit.index.contains_key(&img) {
                if orbit.points.len() >= cap {
                    return Err(SymmetryError::OrbitCapExceeded(cap));
                }
                let pos = orbit.points.len() as u32;
                orbit.index.insert(img.clone(), pos);
                orbit.points.push(img);
                orbit.parent.push(i as u32);
                orbit.gen_of.push(k as u16);
            }
        }
        i += 1;
    }
    Ok(orbit)
}

/// Partition of a finite vector set into group orbits, with witness trees
/// and a deterministic class numbering (ascending canonical order of the
/// first-encountered representative).
pub struct ClassifiedVectors {
    pub orbits: Vec<VectorOrbit>,
    pub lookup: HashMap<ExactVector, (u32, u32)>,
}

impl ClassifiedVectors {
    pub fn class_of(&self, v: &ExactVector) -> Option<(u32, u32)> {
        self.lookup.get(v).copied()
    }

    pub fn class_count(&self) -> usize {
        self.orbits.len()
    }
}

/// Classify `vectors` (canonically sorted) under the group. When
/// `require_closed` is set, an orbit escaping the input set is an
/// invariance error.
pub fn classify_vectors(
    group: &MatrixGroup,
    vectors: &[ExactVector],
    require_closed: bool,
) -> Result<ClassifiedVectors, SymmetryError> {
    let input: HashMap<&ExactVector, ()> = vectors.iter().map(|v| (v, ())).collect();
    let mut out = ClassifiedVectors {
        orbits: Vec::new(),
        lookup: HashMap::new(),
    };
    let mut sorted: Vec<&ExactVector> = vectors.iter().collect();
    sorted.sort_by(|a, b| compare_vectors(a, b));
    for v in sorted {
        if out.lookup.contains_key(v) {
            continue;
        }
        let class = out.orbits.len() as u32;
        let orbit = orbit_with_witnesses(group, v, usize::MAX)?;
        for (pos, p) in orbit.points.iter().enumerate() {
            if require_closed && !input.contains_key(p) {
                return Err(SymmetryError::GroundNotInvariant);
            }
            out.lookup.insert(p.clone(), (class, pos as u32));
        }
        out.orbits.push(orbit);
    }
    Ok(out)
}

/// The ground set a permutation image acts on, with the machinery to move
/// between matrices and permutations: a spanning basis of ground vectors
/// pins every orthogonal map down uniquely.
pub struct GroundAction {
    pub vectors: Vec<ExactVector>,
    pub index: HashMap<ExactVector, u32>,
    basis_indices: Vec<usize>,
    basis_inverse: ExactMatrix,
}

impl GroundAction {
    pub fn new(vectors: Vec<ExactVector>) -> Result<Self, SymmetryError> {
        let dim = vectors.first().map(|v| v.dim()).unwrap_or(0);
        let basis_indices =
            select_independent(&vectors, dim).ok_or(SymmetryError::UnfaithfulAction)?;
        let basis = ExactMatrix::new(
            basis_indices
                .iter()
                .map(|&i| vectors[i].clone())
                .collect(),
        );
        let basis_inverse = basis
            .inverse()
            .map_err(|_| SymmetryError::UnfaithfulAction)?;
        let index = vectors
            .iter()
            .enumerate()
            .map(|(i, v)| (v.clone(), i as u32))
            .collect();
        Ok(GroundAction {
            vectors,
            index,
            basis_indices,
            basis_inverse,
        })
    }

    pub fn degree(&self) -> usize {
        self.vectors.len()
    }

    /// The permutation induced by `x ↦ x·M`, or an invariance error if the
    /// ground set is not mapped onto itself.
    pub fn perm_of_matrix(&self, m: &ExactMatrix) -> Result<Perm, SymmetryError> {
        let mut images = Vec::with_capacity(self.vectors.len());
        for v in &self.vectors {
            let img = v.apply_matrix(m);
            match self.index.get(&img) {
                Some(&i) => images.push(i),
                None => return Err(SymmetryError::GroundNotInvariant),
            }
        }
        Ok(Perm::from_images(images))
    }

    /// The unique orthogonal matrix inducing the permutation.
    pub fn matrix_of_perm(&self, p: &Perm) -> ExactMatrix {
        let rows = self
            .basis_indices
            .iter()
            .map(|&i| self.vectors[p.apply(i as u32) as usize].clone())
            .collect();
        self.basis_inverse.mul(&ExactMatrix::new(rows))
    }
}

/// A matrix group's faithful image on a ground set of vectors, with a
/// stabilizer chain for orders, membership and stabilizers.
pub struct PermutationGroup {
    pub action: Arc<GroundAction>,
    pub matrix_gens: Vec<ExactMatrix>,
    pub gen_perms: Vec<PermRef>,
    pub chain: StabChain,
}

impl PermutationGroup {
    pub fn degree(&self) -> usize {
        self.action.degree()
    }

    pub fn order(&self) -> u128 {
        self.chain.order()
    }

    pub fn contains_perm(&self, p: &Perm) -> bool {
        self.chain.contains(p)
    }

    pub fn contains_matrix(&self, m: &ExactMatrix) -> bool {
        match self.action.perm_of_matrix(m) {
            Ok(p) => self.chain.contains(&p),
            Err(_) => false,
        }
    }

    pub fn matrix_of_perm(&self, p: &Perm) -> ExactMatrix {
        self.action.matrix_of_perm(p)
    }

    /// Stabilizer of a ground point, by rebuilding the chain with the point
    /// as first base point.
    pub fn stabilizer_of_point(&self, point: u32) -> PermutationGroup {
        let rebased = StabChain::build(self.degree(), &self.gen_perms, &[point]);
        let sub = rebased.stabilizer_suffix(1);
        self.subgroup_from_chain(sub)
    }

    fn subgroup_from_chain(&self, chain: StabChain) -> PermutationGroup {
        let gen_perms: Vec<PermRef> = chain.generators().to_vec();
        let matrix_gens = gen_perms
            .iter()
            .map(|p| self.action.matrix_of_perm(p))
            .collect();
        PermutationGroup {
            action: self.action.clone(),
            matrix_gens,
            gen_perms,
            chain,
        }
    }

    /// Stabilizer of a classified vector (any orbit member, not necessarily
    /// a ground point): Schreier generators over the orbit tree, terminated
    /// by the orbit–stabilizer order; non-representatives are obtained by
    /// conjugating the representative stabilizer with their witness.
    pub fn stabilizer_of_orbit_member(&self, orbit: &VectorOrbit, pos: u32) -> PermutationGroup {
        let target = self.order() / orbit.len() as u128;
        let mut chain = StabChain::build(self.degree(), &[], &[]);
        // transversal perms along the breadth-first tree, built incrementally
        let mut transversal: Vec<Perm> = Vec::with_capacity(orbit.len());
        transversal.push(Perm::identity(self.degree()));
        for i in 1..orbit.len() {
            let t = transversal[orbit.parent[i] as usize]
                .compose(&self.gen_perms[orbit.gen_of[i] as usize]);
            transversal.push(t);
        }
        'outer: for i in 0..orbit.len() {
            for (k, g) in self.gen_perms.iter().enumerate() {
                let img = orbit.points[i].apply_matrix(&self.matrix_gens[k]);
                let j = orbit.position_of(&img).expect("orbit closed");
                let schreier = transversal[i]
                    .compose(g)
                    .compose(&transversal[j as usize].inverse());
                chain.add_generator(schreier);
                if chain.order() == target {
                    break 'outer;
                }
            }
        }
        debug_assert_eq!(chain.order(), target);
        let rep_stab = self.subgroup_from_chain(chain);
        if pos == 0 {
            rep_stab
        } else {
            let w = orbit.witness_perm(pos, &self.gen_perms);
            self.subgroup_from_chain(rep_stab.chain.conjugated(&w))
        }
    }

    /// Setwise stabilizer of a set of ground points, via the orbit of the
    /// set (as a sorted key) and Schreier generators. `None` when the set
    /// orbit exceeds `cap`.
    pub fn stabilizer_of_point_set(&self, set: &[u32], cap: usize) -> Option<PermutationGroup> {
        let mut key: Vec<u32> = set.to_vec();
        key.sort_unstable();
        key.dedup();
        let mut keys: Vec<Vec<u32>> = vec![key.clone()];
        let mut pos: HashMap<Vec<u32>, u32> = HashMap::new();
        pos.insert(key, 0);
        let mut parent = vec![0u32];
        let mut gen_of = vec![0u16];
        let mut i = 0;
        while i < keys.len() {
            for (k, g) in self.gen_perms.iter().enumerate() {
                let mut img: Vec<u32> = keys[i].iter().map(|&x| g.apply(x)).collect();
                img.sort_unstable();
                if !pos.contains_key(&img) {
                    if keys.len() >= cap {
                        return None;
                    }
                    pos.insert(img.clone(), keys.len() as u32);
                    keys.push(img);
                    parent.push(i as u32);
                    gen_of.push(k as u16);
                }
            }
            i += 1;
        }
        let target = self.order() / keys.len() as u128;
        let mut transversal: Vec<Perm> = Vec::with_capacity(keys.len());
        transversal.push(Perm::identity(self.degree()));
        for t in 1..keys.len() {
            let p = transversal[parent[t] as usize].compose(&self.gen_perms[gen_of[t] as usize]);
            transversal.push(p);
        }
        let mut chain = StabChain::build(self.degree(), &[], &[]);
        'outer: for t in 0..keys.len() {
            for (k, g) in self.gen_perms.iter().enumerate() {
                let mut img: Vec<u32> = keys[t].iter().map(|&x| g.apply(x)).collect();
                img.sort_unstable();
                let j = pos[&img];
                let schreier = transversal[t]
                    .compose(g)
                    .compose(&transversal[j as usize].inverse());
                chain.add_generator(schreier);
                if chain.order() == target {
                    break 'outer;
                }
            }
        }
        debug_assert_eq!(chain.order(), target);
        Some(self.subgroup_from_chain(chain))
    }
}

/// Construct the faithful permutation image of a matrix group on a ground
/// set (typically the relevant vectors): each generator becomes a
/// permutation of ground indices, faithfulness is certified by the ground
/// set spanning `Rⁿ`, and a BSGS is built by Schreier–Sims.
pub fn to_permutation_group(
    group: &MatrixGroup,
    ground: &RelevantVectorSet,
) -> Result<PermutationGroup, SymmetryError> {
    let vectors = ground.vectors().to_vec();
    if rank_exact(&vectors) != group.dim {
        return Err(SymmetryError::UnfaithfulAction);
    }
    let action = Arc::new(GroundAction::new(vectors)?);
    let mut gen_perms = Vec::with_capacity(group.generators.len());
    for g in &group.generators {
        gen_perms.push(Arc::new(action.perm_of_matrix(g)?));
    }
    let chain = StabChain::build(action.degree(), &gen_perms, &[]);
    Ok(PermutationGroup {
        action,
        matrix_gens: group.generators.clone(),
        gen_perms,
        chain,
    })
}

/// Exact floor of a scalar (largest integer ≤ value).
fn scalar_floor(x: &ExactScalar) -> i64 {
    let guess = x.shadow().floor() as i64;
    let mut k = guess;
    // exact adjustment around the shadow estimate
    while ExactScalar::from_int(k) > *x {
        k -= 1;
    }
    while ExactScalar::from_int(k + 1) <= *x {
        k += 1;
    }
    k
}

/// Fractional coordinates of `w` in the basis `b_inv` (i.e. `w·B⁻¹ mod 1`),
/// the exact key of the coset `w + Λ`.
fn coset_key(w: &ExactVector, b_inv: &ExactMatrix) -> Vec<ExactScalar> {
    w.apply_matrix(b_inv)
        .comps()
        .iter()
        .map(|c| c - &ExactScalar::from_int(scalar_floor(c)))
        .collect()
}

/// Discover the symmetry group of a laminated lattice `[[B₁,0],[h,a]]`:
/// the base group is embedded in one dimension higher, `diag(I,−1)` is
/// adjoined to double the order, and the stabilizer of the relevant-vector
/// set inside that extension is returned.
///
/// Stabilizing the relevant vectors is equivalent to preserving the lattice
/// they generate, which for block generators reduces to the congruence
/// `g·h ≡ ±h (mod Λ₁)`; the stabilizer is assembled from Schreier
/// generators over the orbit of `h` modulo `Λ₁` (an invariant block system).
pub fn discover_laminated_symmetry(
    base_group: &MatrixGroup,
    laminated: &crate::lattice::Lattice,
    relevant: &RelevantVectorSet,
) -> Result<MatrixGroup, SymmetryError> {
    let n1 = base_group.dim;
    if laminated.dim() != n1 + 1 {
        return Err(SymmetryError::Domain(format!(
            "laminated lattice has dimension {}, base group acts on {}",
            laminated.dim(),
            n1
        )));
    }
    // split the block generator
    let b1 = ExactMatrix::new(
        (0..n1)
            .map(|i| {
                ExactVector::new(laminated.generator.row(i).comps()[..n1].to_vec())
            })
            .collect(),
    );
    let b1_inv = b1.inverse().map_err(|_| {
        SymmetryError::Domain("degenerate base block in laminated generator".into())
    })?;
    let h = ExactVector::new(laminated.generator.row(n1).comps()[..n1].to_vec());

    // precondition: the base group must be an automorphism group of Λ₁
    for (i, g) in base_group.generators.iter().enumerate() {
        let conj = b1.mul(g).mul(&b1_inv);
        let integral = (0..n1).all(|r| {
            conj.row(r).comps().iter().all(|c| {
                c.as_rational()
                    .is_some_and(|q| num_traits::One::is_one(q.denom()))
            })
        });
        if !integral {
            return Err(SymmetryError::Invariance(format!(
                "base generator {i} does not preserve the base lattice"
            )));
        }
    }

    // orbit of h under the base group, with the mod-Λ₁ block system
    let orbit = orbit_with_witnesses(base_group, &h, 10_000_000)?;
    let mut block_of = vec![0u32; orbit.len()];
    let mut block_first: Vec<u32> = Vec::new();
    let mut block_ids: HashMap<Vec<ExactScalar>, u32> = HashMap::new();
    for (i, w) in orbit.points.iter().enumerate() {
        let key = coset_key(w, &b1_inv);
        let id = *block_ids.entry(key).or_insert_with(|| {
            block_first.push(i as u32);
            (block_first.len() - 1) as u32
        });
        block_of[i] = id;
    }
    let n_blocks = block_first.len();

    // breadth-first tree over blocks, edges labeled by base generators
    let mut b_parent = vec![u32::MAX; n_blocks];
    let mut b_gen = vec![0u16; n_blocks];
    let mut order: Vec<u32> = vec![block_of[0]];
    b_parent[block_of[0] as usize] = block_of[0];
    let mut qi = 0;
    while qi < order.len() {
        let blk = order[qi];
        let node = block_first[blk as usize];
        for (k, g) in base_group.generators.iter().enumerate() {
            let img = orbit.points[node as usize].apply_matrix(g);
            let img_blk = block_of[orbit.position_of(&img).expect("orbit closed") as usize];
            if b_parent[img_blk as usize] == u32::MAX {
                b_parent[img_blk as usize] = blk;
                b_gen[img_blk as usize] = k as u16;
                order.push(img_blk);
            }
        }
        qi += 1;
    }
    if order.len() != n_blocks {
        return Err(SymmetryError::Invariance(
            "block system is not transitive under the base group".into(),
        ));
    }

    // transversal matrices to each block
    let mut b_trans: Vec<Option<ExactMatrix>> = vec![None; n_blocks];
    b_trans[block_of[0] as usize] = Some(ExactMatrix::identity(n1));
    for &blk in &order[1..] {
        let p = b_parent[blk as usize];
        let m = b_trans[p as usize]
            .as_ref()
            .unwrap()
            .mul(&base_group.generators[b_gen[blk as usize] as usize]);
        b_trans[blk as usize] = Some(m);
    }

    // Schreier generators of the stabilizer of block(h)
    let mut seen = std::collections::HashSet::new();
    let mut stab_gens: Vec<ExactMatrix> = Vec::new();
    for blk in 0..n_blocks as u32 {
        let node = block_first[blk as usize];
        for (k, g) in base_group.generators.iter().enumerate() {
            let img = orbit.points[node as usize].apply_matrix(g);
            let img_blk = block_of[orbit.position_of(&img).unwrap() as usize];
            let s = b_trans[blk as usize]
                .as_ref()
                .unwrap()
                .mul(g)
                .mul(&b_trans[img_blk as usize].as_ref().unwrap().inverse().unwrap());
            if s.is_identity() {
                continue;
            }
            let sig: Vec<Vec<String>> = s.to_string_rows();
            if seen.insert(sig) {
                stab_gens.push(s);
            }
        }
    }

    // element mapping block(h) to block(−h), if any (the reflection part)
    let neg_key = coset_key(&h.neg(), &b1_inv);
    let reflect = block_ids
        .get(&neg_key)
        .map(|&blk| b_trans[blk as usize].as_ref().unwrap().clone());

    // thin the Schreier generators through the (faithful) action on the
    // orbit of h, keeping only a generating subset
    let faithful = rank_exact(&orbit.points) == n1;
    let thinned: Vec<ExactMatrix> = if faithful {
        let act = |m: &ExactMatrix| -> Perm {
            Perm::from_images(
                orbit
                    .points
                    .iter()
                    .map(|p| orbit.position_of(&p.apply_matrix(m)).unwrap())
                    .collect(),
            )
        };
        let mut chain = StabChain::build(orbit.len(), &[], &[]);
        let mut kept = Vec::new();
        for m in stab_gens {
            let p = act(&m);
            if !chain.contains(&p) {
                chain.add_generator(p);
                kept.push(m);
            }
        }
        kept
    } else {
        stab_gens
    };

    // embed into n1+1 dimensions; adjoin diag(reflect, −1) when it exists
    let embed = |m: &ExactMatrix, last: i64| -> ExactMatrix {
        let mut rows: Vec<ExactVector> = (0..n1)
            .map(|i| {
                let mut c = m.row(i).comps().to_vec();
                c.push(ExactScalar::zero());
                ExactVector::new(c)
            })
            .collect();
        let mut lastrow = vec![ExactScalar::zero(); n1 + 1];
        lastrow[n1] = ExactScalar::from_int(last);
        rows.push(ExactVector::new(lastrow));
        ExactMatrix::new(rows)
    };
    let mut result: Vec<ExactMatrix> = thinned.iter().map(|m| embed(m, 1)).collect();
    if let Some(r) = reflect {
        result.push(embed(&r, -1));
    }
    if result.is_empty() {
        result.push(ExactMatrix::identity(n1 + 1));
    }

    // verify the result stabilizes the relevant-vector set
    for (i, g) in result.iter().enumerate() {
        for v in relevant.vectors() {
            if relevant.index_of(&v.apply_matrix(g)).is_none() {
                return Err(SymmetryError::Invariance(format!(
                    "discovered generator {i} does not preserve the relevant vectors"
                )));
            }
        }
    }
    MatrixGroup::new(result)
}

/// Exact integer test for a rational scalar.
pub fn scalar_is_integer(x: &ExactScalar) -> bool {
    x.as_rational()
        .is_some_and(|q| num_traits::One::is_one(q.denom()))
}
