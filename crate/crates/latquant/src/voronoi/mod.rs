//! Vertex discovery and the symmetry-reduced face hierarchy of a Voronoi
//! cell.
//!
//! The hierarchy is built top-down: facets from the relevant vectors, then
//! for each dimension the parent level is classified into equivalence
//! classes under the lattice symmetry group and only the children of the
//! chosen representatives are constructed by intersecting vertex sets. The
//! reduced structure still carries every class of faces and the complete
//! child sets of all representatives, which is exactly what the recursive
//! second-moment formulas need.

use crate::exact::ExactScalar;
use crate::lattice::RelevantVectorSet;
use crate::linalg::ExactVector;
use crate::symmetry::{ClassifiedVectors, MatrixGroup, Perm, PermutationGroup, SymmetryError};
use std::collections::HashMap;
use std::sync::{Arc, RwLock};

pub mod classify;
pub mod facets;
pub mod hierarchy;
pub mod naive;
pub mod transform;
pub mod vertices;

pub use classify::{choose_defining_set, classify_faces, iterated_classify, DefiningKind};
pub use facets::assemble_facets;
pub use hierarchy::{construct_face_hierarchy, intersect_faces, FaceHierarchy};
pub use transform::find_transformation;
pub use vertices::{find_vertices, VertexSearchOutcome};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum VoronoiError {
    #[error("consistency error: {0}")]
    Consistency(String),
    #[error("structural error: {0}")]
    Structural(String),
    #[error("permutation budget exceeded after {checked} permutations")]
    BudgetExceeded { checked: u64 },
    #[error(transparent)]
    Symmetry(#[from] SymmetryError),
}

/// Tuning knobs for the construction; the defaults match the values used
/// throughout the test suite.
#[derive(Debug, Clone)]
pub struct BuildConfig {
    /// relative tolerance of floating-point pre-filters
    pub eps: f64,
    /// stop the vertex search after this many consecutive rounds without a
    /// new class
    pub vertex_streak: u32,
    /// permutation budget per face pair in the transformation search
    pub perm_budget: u64,
    /// at most this many subgroups in the iterated-classification chain
    pub subgroup_cap: usize,
    /// ignore candidate subgroups below this order
    pub subgroup_min_order: u128,
    /// cap on set-orbit enumeration when building face stabilizers
    pub set_orbit_cap: usize,
    pub seed: u64,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            eps: 1e-9,
            vertex_streak: 500,
            perm_budget: 10_000_000,
            subgroup_cap: 16,
            subgroup_min_order: 12,
            set_orbit_cap: 2_000_000,
            seed: 1,
        }
    }
}

/// The shared pool of exact vertices; faces store sorted indices into it.
pub struct VertexPool {
    pub vertices: Vec<ExactVector>,
    pub index: HashMap<ExactVector, u32>,
}

impl VertexPool {
    pub fn new() -> Self {
        VertexPool {
            vertices: Vec::new(),
            index: HashMap::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn get(&self, i: u32) -> &ExactVector {
        &self.vertices[i as usize]
    }

    pub fn position(&self, v: &ExactVector) -> Option<u32> {
        self.index.get(v).copied()
    }

    pub fn insert(&mut self, v: ExactVector) -> u32 {
        if let Some(&i) = self.index.get(&v) {
            return i;
        }
        let i = self.vertices.len() as u32;
        self.index.insert(v.clone(), i);
        self.vertices.push(v);
        i
    }
}

impl Default for VertexPool {
    fn default() -> Self {
        Self::new()
    }
}

/// Classification state of a face.
#[derive(Clone)]
pub enum Classification {
    Unclassified,
    Representative { class_id: u32 },
    Member { rep: u32, witness: Perm },
}

impl Classification {
    pub fn is_representative(&self) -> bool {
        matches!(self, Classification::Representative { .. })
    }
}

/// A face of the Voronoi cell: a convex polytope given by its vertex set,
/// with hierarchy links. Facets additionally carry their relevant vector
/// (`normal`); `facet_normals` caches `N(F)`, the normals of all facets the
/// face lies in.
#[derive(Clone)]
pub struct Face {
    pub vertices: Arc<Vec<u32>>,
    pub parents: Vec<u32>,
    pub children: Vec<u32>,
    pub normal: Option<u32>,
    pub facet_normals: Option<Arc<Vec<u32>>>,
    pub class: Classification,
}

impl Face {
    pub fn new(vertices: Vec<u32>) -> Face {
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Face {
            vertices: Arc::new(vertices),
            parents: Vec::new(),
            children: Vec::new(),
            normal: None,
            facet_normals: None,
            class: Classification::Unclassified,
        }
    }

    pub fn is_representative(&self) -> bool {
        self.class.is_representative()
    }
}

/// A symmetry group together with the classifications of the vertex pool
/// and the relevant vectors under it, plus a stabilizer cache keyed by
/// class representative. Fingerprints, defining sets and transformation
/// cosets are all expressed against an acting context.
pub struct ActingContext {
    pub group: Arc<PermutationGroup>,
    pub vertex_classes: Arc<ClassifiedVectors>,
    /// per vertex-pool index: (class, position in orbit)
    pub vertex_class_of: Vec<(u32, u32)>,
    pub normal_classes: Arc<ClassifiedVectors>,
    /// per ground index: (class, position in orbit)
    pub normal_class_of: Vec<(u32, u32)>,
    stab_cache: RwLock<HashMap<(DefiningKind, u32), Arc<PermutationGroup>>>,
}

impl ActingContext {
    pub fn new(
        group: Arc<PermutationGroup>,
        pool: &VertexPool,
        ground: &RelevantVectorSet,
        vertex_classes: Option<Arc<ClassifiedVectors>>,
    ) -> Result<Self, SymmetryError> {
        let mg = MatrixGroup {
            generators: group.matrix_gens.clone(),
            dim: ground.vectors().first().map(|v| v.dim()).unwrap_or(0),
        };
        let vertex_classes = match vertex_classes {
            Some(c) => c,
            None => Arc::new(crate::symmetry::classify_vectors(&mg, &pool.vertices, true)?),
        };
        let normal_classes = Arc::new(crate::symmetry::classify_vectors(
            &mg,
            ground.vectors(),
            true,
        )?);
        let vertex_class_of = pool
            .vertices
            .iter()
            .map(|v| vertex_classes.class_of(v).expect("classified"))
            .collect();
        let normal_class_of = ground
            .vectors()
            .iter()
            .map(|v| normal_classes.class_of(v).expect("classified"))
            .collect();
        Ok(ActingContext {
            group,
            vertex_classes,
            vertex_class_of,
            normal_classes,
            normal_class_of,
            stab_cache: RwLock::new(HashMap::new()),
        })
    }

    pub fn order(&self) -> u128 {
        self.group.order()
    }

    /// Cached stabilizer of a class representative (vertex or normal).
    /// Concurrent duplicate computations are allowed; results are equal by
    /// construction and the last write wins.
    pub fn rep_stabilizer(&self, kind: DefiningKind, class: u32) -> Arc<PermutationGroup> {
        if let Some(s) = self.stab_cache.read().unwrap().get(&(kind, class)) {
            return s.clone();
        }
        let orbit = match kind {
            DefiningKind::Vertex => &self.vertex_classes.orbits[class as usize],
            DefiningKind::Normal => &self.normal_classes.orbits[class as usize],
        };
        let stab = Arc::new(self.group.stabilizer_of_orbit_member(orbit, 0));
        self.stab_cache
            .write()
            .unwrap()
            .insert((kind, class), stab.clone());
        stab
    }

    /// Exact check that `witness` maps one sorted vertex-index set onto
    /// another, as sets.
    pub fn witness_maps_vertex_set(
        &self,
        pool: &VertexPool,
        witness: &Perm,
        from: &[u32],
        to: &[u32],
    ) -> bool {
        if from.len() != to.len() {
            return false;
        }
        let m = self.group.matrix_of_perm(witness);
        let mut mapped: Vec<u32> = Vec::with_capacity(from.len());
        for &i in from {
            let img = pool.get(i).apply_matrix(&m);
            match pool.position(&img) {
                Some(j) => mapped.push(j),
                None => return false,
            }
        }
        mapped.sort_unstable();
        mapped == to
    }
}

/// Exact equality `2·v·n = ‖n‖²`: the facet plane condition.
pub fn on_facet_plane(v: &ExactVector, normal: &ExactVector) -> bool {
    &v.dot(normal) * &ExactScalar::from_int(2) == normal.norm_sq()
}

/// Exact inequalities `2·v·n ≤ ‖n‖²` against all relevant vectors:
/// membership of `v` in the Voronoi cell.
pub fn in_voronoi_cell(v: &ExactVector, relevant: &RelevantVectorSet) -> bool {
    relevant
        .vectors()
        .iter()
        .all(|n| &v.dot(n) * &ExactScalar::from_int(2) <= n.norm_sq())
}
