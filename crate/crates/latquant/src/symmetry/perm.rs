//! Permutations of `{0, …, degree−1}` stored as image arrays.

use std::fmt;
use std::sync::Arc;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Perm {
    images: Box<[u32]>,
}

impl Perm {
    pub fn identity(degree: usize) -> Perm {
        Perm {
            images: (0..degree as u32).collect(),
        }
    }

    pub fn from_images(images: Vec<u32>) -> Perm {
        debug_assert!({
            let mut seen = vec![false; images.len()];
            images.iter().all(|&x| {
                let ok = (x as usize) < seen.len() && !seen[x as usize];
                if ok {
                    seen[x as usize] = true;
                }
                ok
            })
        });
        Perm {
            images: images.into_boxed_slice(),
        }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.images[x as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `self` followed by `then`: `(self ∘-then)(x) = then(self(x))`.
    pub fn compose(&self, then: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), then.degree());
        Perm {
            images: self.images.iter().map(|&x| then.images[x as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm {
            images: inv.into_boxed_slice(),
        }
    }

    /// Conjugate `g⁻¹·self·g` (maps `g(x) ↦ g(self(x))`).
    pub fn conjugated(&self, g: &Perm) -> Perm {
        g.inverse().compose(self).compose(g)
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    /// Smallest point moved by the permutation, if any.
    pub fn first_moved(&self) -> Option<u32> {
        self.images
            .iter()
            .enumerate()
            .find(|(i, &x)| *i as u32 != x)
            .map(|(i, _)| i as u32)
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm[")?;
        for (i, x) in self.images.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

pub type PermRef = Arc<Perm>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compose_order() {
        // a: 0→1→2→0 cycle; b: swap 0,1
        let a = Perm::from_images(vec![1, 2, 0]);
        let b = Perm::from_images(vec![1, 0, 2]);
        let ab = a.compose(&b); // apply a, then b
        assert_eq!(ab.apply(0), 0); // a:0→1, b:1→0
        assert_eq!(ab.apply(1), 2);
        assert!(a.compose(&a.inverse()).is_identity());
    }

    #[test]
    fn conjugation_moves_fixed_points() {
        let swap01 = Perm::from_images(vec![1, 0, 2, 3]);
        let g = Perm::from_images(vec![2, 3, 0, 1]);
        let c = swap01.conjugated(&g);
        // swap01 fixes 2; conjugate fixes g(2) = 0
        assert_eq!(c.apply(0), 0);
        assert_eq!(c.apply(2), 3);
    }
}
