//! Base and strong generating set: stabilizer chains via the deterministic
//! Schreier–Sims algorithm, with explicit transversals.

use super::perm::{Perm, PermRef};
use rand::Rng;
use std::sync::Arc;

/// One level of a stabilizer chain: the group generated by `gens` acts on
/// the orbit of `point`; deeper levels describe the stabilizer of `point`.
#[derive(Clone)]
pub struct Level {
    pub point: u32,
    pub gens: Vec<PermRef>,
    pub orbit: Vec<u32>,
    transversal: Vec<Option<PermRef>>,
    transversal_inv: Vec<Option<PermRef>>,
    /// closure-checked prefix: all Schreier generators from
    /// `orbit[..processed.0] × gens[..processed.1]` sift to the identity
    processed: (usize, usize),
}

impl Level {
    fn new(degree: usize, point: u32) -> Level {
        let mut transversal = vec![None; degree];
        let mut transversal_inv = vec![None; degree];
        let id: PermRef = Arc::new(Perm::identity(degree));
        transversal[point as usize] = Some(id.clone());
        transversal_inv[point as usize] = Some(id);
        Level {
            point,
            gens: Vec::new(),
            orbit: vec![point],
            transversal,
            transversal_inv,
            processed: (0, 0),
        }
    }

    /// Append-only breadth-first extension of the orbit under the current
    /// generators. Existing transversal entries are never rewritten, so
    /// closure bookkeeping stays valid.
    fn extend_orbit(&mut self) {
        let mut i = 0;
        while i < self.orbit.len() {
            let beta = self.orbit[i];
            let t_beta = self.transversal[beta as usize].clone().expect("orbit point");
            for g in &self.gens {
                let gamma = g.apply(beta);
                if self.transversal[gamma as usize].is_none() {
                    let t: PermRef = Arc::new(t_beta.compose(g));
                    self.transversal_inv[gamma as usize] = Some(Arc::new(t.inverse()));
                    self.transversal[gamma as usize] = Some(t);
                    self.orbit.push(gamma);
                }
            }
            i += 1;
        }
    }

    pub fn transversal_to(&self, beta: u32) -> Option<&PermRef> {
        self.transversal[beta as usize].as_ref()
    }

    fn transversal_inv_to(&self, beta: u32) -> Option<&PermRef> {
        self.transversal_inv[beta as usize].as_ref()
    }

    pub fn in_orbit(&self, beta: u32) -> bool {
        self.transversal[beta as usize].is_some()
    }
}

/// A stabilizer chain for the group generated by its level-0 generators.
#[derive(Clone)]
pub struct StabChain {
    degree: usize,
    pub levels: Vec<Level>,
}

impl StabChain {
    /// Build a chain by Schreier–Sims. Every `prescribed` point becomes a
    /// base point (in order), even if its orbit turns out trivial; extra
    /// base points are appended as needed.
    pub fn build(degree: usize, gens: &[PermRef], prescribed: &[u32]) -> StabChain {
        let mut chain = StabChain {
            degree,
            levels: Vec::new(),
        };
        for &p in prescribed {
            assert!((p as usize) < degree);
            chain.levels.push(Level::new(degree, p));
        }
        for g in gens {
            chain.insert_generator(g.clone(), 0);
        }
        if chain.levels.is_empty() {
            // trivial group: keep a single dummy level so the structure is uniform
            chain.levels.push(Level::new(degree, 0));
        }
        chain.complete();
        chain
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.point).collect()
    }

    pub fn order(&self) -> u128 {
        self.levels.iter().map(|l| l.orbit.len() as u128).product()
    }

    /// Insert a generator known to fix the base points before `from_level`;
    /// it is added to every level it qualifies for, from `from_level` down
    /// to the first base point it moves (extending the base if it fixes
    /// them all). Returns that deepest level index.
    fn insert_generator(&mut self, g: PermRef, from_level: usize) -> usize {
        if g.is_identity() {
            return from_level;
        }
        let mut j = from_level;
        while j < self.levels.len() && g.apply(self.levels[j].point) == self.levels[j].point {
            j += 1;
        }
        if j == self.levels.len() {
            let p = g.first_moved().expect("non-identity");
            self.levels.push(Level::new(self.degree, p));
        }
        for lev in self.levels[from_level..=j].iter_mut() {
            lev.gens.push(g.clone());
            lev.extend_orbit();
        }
        j
    }

    /// Sift `g` through the chain starting at `level`. `Ok(())` means `g`
    /// is represented by the chain; otherwise the non-identity residue and
    /// the level where sifting stopped are returned.
    fn sift_from(&self, mut g: Perm, level: usize) -> Result<(), (Perm, usize)> {
        for k in level..self.levels.len() {
            let beta = g.apply(self.levels[k].point);
            match self.levels[k].transversal_inv_to(beta) {
                None => return Err((g, k)),
                Some(t_inv) => {
                    g = g.compose(t_inv);
                }
            }
        }
        if g.is_identity() {
            Ok(())
        } else {
            Err((g, self.levels.len()))
        }
    }

    pub fn contains(&self, g: &Perm) -> bool {
        self.sift_from(g.clone(), 0).is_ok()
    }

    /// Process Schreier generators until every level is closed.
    ///
    /// Residues are inserted strictly below the level being processed, so a
    /// level's own orbit and generator list never change mid-pass, and sift
    /// success is monotone under insertions (transversals are append-only).
    fn complete(&mut self) {
        loop {
            // deepest level with unprocessed (orbit point, generator) pairs
            let dirty = (0..self.levels.len()).rev().find(|&k| {
                let l = &self.levels[k];
                l.processed != (l.orbit.len(), l.gens.len())
            });
            let Some(k) = dirty else { break };
            let (o_done, g_done) = self.levels[k].processed;
            let (o_now, g_now) = (self.levels[k].orbit.len(), self.levels[k].gens.len());

            for oi in 0..o_now {
                for gi in 0..g_now {
                    if oi < o_done && gi < g_done {
                        continue;
                    }
                    let beta = self.levels[k].orbit[oi];
                    let s = self.levels[k].gens[gi].clone();
                    let t_beta = self.levels[k]
                        .transversal_to(beta)
                        .expect("orbit point")
                        .clone();
                    let gamma = s.apply(beta);
                    let t_gamma_inv = self.levels[k]
                        .transversal_inv_to(gamma)
                        .expect("orbit closed")
                        .clone();
                    let schreier = t_beta.compose(&s).compose(&t_gamma_inv);
                    if let Err((residue, _)) = self.sift_from(schreier, k + 1) {
                        self.insert_generator(Arc::new(residue), k + 1);
                    }
                }
            }
            self.levels[k].processed = (o_now, g_now);
        }
    }

    /// The stabilizer of the first `depth` base points: the chain formed by
    /// the remaining levels (a valid BSGS for that subgroup).
    pub fn stabilizer_suffix(&self, depth: usize) -> StabChain {
        let mut levels: Vec<Level> = self.levels[depth.min(self.levels.len())..].to_vec();
        if levels.is_empty() {
            levels.push(Level::new(self.degree, 0));
        }
        StabChain {
            degree: self.degree,
            levels,
        }
    }

    /// Generators of the whole group (level-0 generators).
    pub fn generators(&self) -> &[PermRef] {
        &self.levels[0].gens
    }

    /// The conjugate chain for `g⁻¹·G·g` (base points mapped through `g`).
    pub fn conjugated(&self, g: &Perm) -> StabChain {
        let g_inv = g.inverse();
        let conj = |p: &PermRef| -> PermRef { Arc::new(g_inv.compose(p).compose(g)) };
        let levels = self
            .levels
            .iter()
            .map(|l| {
                let mut transversal = vec![None; self.degree];
                let mut transversal_inv = vec![None; self.degree];
                for &beta in &l.orbit {
                    let t = conj(l.transversal_to(beta).unwrap());
                    transversal_inv[g.apply(beta) as usize] = Some(Arc::new(t.inverse()));
                    transversal[g.apply(beta) as usize] = Some(t);
                }
                Level {
                    point: g.apply(l.point),
                    gens: l.gens.iter().map(conj).collect(),
                    orbit: l.orbit.iter().map(|&b| g.apply(b)).collect(),
                    transversal,
                    transversal_inv,
                    processed: (l.orbit.len(), l.gens.len()),
                }
            })
            .collect();
        StabChain {
            degree: self.degree,
            levels,
        }
    }

    /// All elements, if the group order does not exceed `limit`.
    pub fn elements(&self, limit: usize) -> Option<Vec<Perm>> {
        if self.order() > limit as u128 {
            return None;
        }
        let mut out = vec![Perm::identity(self.degree)];
        for level in self.levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * level.orbit.len());
            for &beta in &level.orbit {
                let t = level.transversal_to(beta).unwrap();
                for e in &out {
                    // element = deeper part first, then the transversal
                    next.push(e.compose(t));
                }
            }
            out = next;
        }
        Some(out)
    }

    /// Uniformly random group element.
    pub fn random_element(&self, rng: &mut impl Rng) -> Perm {
        let mut g = Perm::identity(self.degree);
        for level in self.levels.iter().rev() {
            let beta = level.orbit[rng.gen_range(0..level.orbit.len())];
            g = g.compose(level.transversal_to(beta).unwrap());
        }
        g
    }

    /// Grow the group by one generator (used by known-order Schreier
    /// constructions); re-closes the chain.
    pub fn add_generator(&mut self, g: Perm) {
        if self.contains(&g) {
            return;
        }
        self.insert_generator(Arc::new(g), 0);
        self.complete();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn arc(v: Vec<u32>) -> PermRef {
        Arc::new(Perm::from_images(v))
    }

    #[test]
    fn symmetric_group_order() {
        // S5 from a transposition and a 5-cycle
        let gens = vec![arc(vec![1, 0, 2, 3, 4]), arc(vec![1, 2, 3, 4, 0])];
        let chain = StabChain::build(5, &gens, &[]);
        assert_eq!(chain.order(), 120);
        // membership: any product of generators
        let g = gens[0].compose(&gens[1]).compose(&gens[1]);
        assert!(chain.contains(&g));
    }

    #[test]
    fn alternating_group_and_non_membership() {
        // A4 from two 3-cycles
        let gens = vec![arc(vec![1, 2, 0, 3]), arc(vec![0, 2, 3, 1])];
        let chain = StabChain::build(4, &gens, &[]);
        assert_eq!(chain.order(), 12);
        // a transposition is odd: not a member
        assert!(!chain.contains(&Perm::from_images(vec![1, 0, 2, 3])));
    }

    #[test]
    fn prescribed_base_gives_point_stabilizer() {
        let gens = vec![arc(vec![1, 0, 2, 3, 4]), arc(vec![1, 2, 3, 4, 0])];
        let chain = StabChain::build(5, &gens, &[2]);
        assert_eq!(chain.order(), 120);
        assert_eq!(chain.levels[0].point, 2);
        let stab = chain.stabilizer_suffix(1);
        assert_eq!(stab.order(), 24); // S4 on the remaining points
        for g in stab.elements(100).unwrap() {
            assert_eq!(g.apply(2), 2);
        }
    }

    #[test]
    fn elements_enumeration() {
        let gens = vec![arc(vec![1, 2, 0])];
        let chain = StabChain::build(3, &gens, &[]);
        assert_eq!(chain.order(), 3);
        let els = chain.elements(10).unwrap();
        assert_eq!(els.len(), 3);
        // too-small limit
        assert!(chain.elements(2).is_none());
    }

    #[test]
    fn conjugated_chain_is_valid() {
        let gens = vec![arc(vec![1, 0, 2, 3])]; // swap 0,1
        let chain = StabChain::build(4, &gens, &[]);
        let g = Perm::from_images(vec![2, 3, 0, 1]);
        let conj = chain.conjugated(&g);
        assert_eq!(conj.order(), 2);
        // conjugate group swaps 2,3
        assert!(conj.contains(&Perm::from_images(vec![0, 1, 3, 2])));
        assert!(!conj.contains(&Perm::from_images(vec![1, 0, 2, 3])));
    }

    #[test]
    fn trivial_group() {
        let chain = StabChain::build(4, &[], &[]);
        assert_eq!(chain.order(), 1);
        assert!(chain.contains(&Perm::identity(4)));
        assert!(!chain.contains(&Perm::from_images(vec![1, 0, 2, 3])));
    }

    #[test]
    fn random_elements_are_members() {
        let gens = vec![arc(vec![1, 0, 2, 3, 4]), arc(vec![1, 2, 3, 4, 0])];
        let chain = StabChain::build(5, &gens, &[]);
        let mut rng = rand::thread_rng();
        for _ in 0..20 {
            let g = chain.random_element(&mut rng);
            assert!(chain.contains(&g));
        }
    }
}
