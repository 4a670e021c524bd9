//! Closest-point search by sphere enumeration on floating-point shadows,
//! certified exactly.
//!
//! The enumerator is a Fincke–Pohst/Schnorr–Euchner style depth-first search
//! on the Cholesky factor of the Gram matrix. It shrinks the search radius
//! whenever a better point is found, then re-enumerates every candidate
//! within a small safety margin of the best radius; the true minimal set is
//! finally certified by exact distance comparisons.

use crate::exact::ExactScalar;
use crate::linalg::{ExactMatrix, ExactVector};

/// Relative safety margin applied to the best floating-point radius before
/// exact certification.
const ENUM_MARGIN: f64 = 1e-6;

/// Reusable enumeration state for one generator matrix.
pub struct CvpSolver {
    n: usize,
    /// lower-triangular Cholesky factor of the Gram matrix B·Bᵀ
    chol: Vec<Vec<f64>>,
    b_inv_shadow: Vec<Vec<f64>>,
    pub generator: ExactMatrix,
}

impl CvpSolver {
    pub fn new(generator: &ExactMatrix) -> Self {
        let n = generator.rows();
        assert_eq!(n, generator.cols());
        let rows: Vec<&[f64]> = (0..n).map(|i| generator.row(i).shadow()).collect();
        let mut gram = vec![vec![0.0; n]; n];
        for i in 0..n {
            for j in 0..n {
                gram[i][j] = dot(rows[i], rows[j]);
            }
        }
        let chol = cholesky(&gram);
        let b_inv_shadow = invert_f64(
            &(0..n)
                .map(|i| rows[i].to_vec())
                .collect::<Vec<_>>(),
        );
        CvpSolver {
            n,
            chol,
            b_inv_shadow,
            generator: generator.clone(),
        }
    }

    /// Coefficients of `t` in the lattice basis (floating point).
    fn coords(&self, t: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|j| (0..self.n).map(|i| t[i] * self.b_inv_shadow[i][j]).sum())
            .collect()
    }

    /// All integer coefficient vectors `z` with `‖zB − t‖² ≤ bound`,
    /// shrinking `bound` to track the minimum when `shrink` is set.
    fn enumerate(&self, u: &[f64], mut bound: f64, shrink: bool) -> Vec<(Vec<i64>, f64)> {
        let n = self.n;
        let l = &self.chol;
        let mut out: Vec<(Vec<i64>, f64)> = Vec::new();
        // depth-first from coordinate n-1 down to 0; acc[j] holds
        // Σ_{i>level} (z_i − u_i)·L[i][j]
        let mut z = vec![0i64; n];
        struct Frame {
            level: usize,
            lo: i64,
            hi: i64,
            cur: i64,
            partial: f64,
            acc: Vec<f64>,
        }
        let root_range = |bound: f64, acc: &[f64], level: usize, partial: f64| -> (i64, i64) {
            let rem = bound - partial;
            if rem < 0.0 {
                return (1, 0);
            }
            let lkk = l[level][level];
            let center = u[level] - acc[level] / lkk;
            let half = rem.sqrt() / lkk;
            (
                (center - half - 1e-9).ceil() as i64,
                (center + half + 1e-9).floor() as i64,
            )
        };
        let (lo, hi) = root_range(bound, &vec![0.0; n], n - 1, 0.0);
        let mut stack = vec![Frame {
            level: n - 1,
            lo,
            hi,
            cur: lo,
            partial: 0.0,
            acc: vec![0.0; n],
        }];
        while let Some(frame) = stack.last_mut() {
            if frame.cur > frame.hi {
                stack.pop();
                continue;
            }
            let level = frame.level;
            let zi = frame.cur;
            frame.cur += 1;
            let x = zi as f64 - u[level];
            let term = x * l[level][level] + frame.acc[level];
            let cost = frame.partial + term * term;
            if cost > bound {
                continue;
            }
            z[level] = zi;
            if level == 0 {
                if shrink && cost < bound {
                    bound = cost;
                }
                out.push((z.clone(), cost));
            } else {
                let mut acc = frame.acc.clone();
                for j in 0..level {
                    acc[j] += x * l[level][j];
                }
                let (lo, hi) = root_range(bound, &acc, level - 1, cost);
                stack.push(Frame {
                    level: level - 1,
                    lo,
                    hi,
                    cur: lo,
                    partial: cost,
                    acc,
                });
            }
        }
        out
    }

    /// Floating-point nearest lattice point: coefficient vector and squared
    /// distance. Used where exactness is not required (Monte Carlo).
    pub fn nearest_float(&self, t: &[f64]) -> (Vec<i64>, f64) {
        let u = self.coords(t);
        // Babai rounding provides the initial radius
        let z0: Vec<i64> = u.iter().map(|x| x.round() as i64).collect();
        let d0 = self.dist_sq_float(&z0, t);
        let mut best = (z0, d0);
        for (z, c) in self.enumerate(&u, d0 * (1.0 + 1e-12) + 1e-12, true) {
            if c < best.1 {
                best = (z, c);
            }
        }
        best
    }

    fn dist_sq_float(&self, z: &[i64], t: &[f64]) -> f64 {
        let mut d = 0.0;
        for j in 0..self.n {
            let mut x = -t[j];
            for i in 0..self.n {
                x += z[i] as f64 * self.generator.row(i).shadow()[j];
            }
            d += x * x;
        }
        d
    }

    /// All lattice points at the exact minimal distance from the exact
    /// target `x`: enumeration on shadows with a safety margin, then exact
    /// distance comparison over the candidates.
    pub fn closest_points_exact(&self, x: &ExactVector) -> Vec<(Vec<i64>, ExactVector)> {
        let t: Vec<f64> = x.shadow().to_vec();
        let (_, best) = self.nearest_float(&t);
        let scale = (0..self.n)
            .map(|i| self.chol[i][i] * self.chol[i][i])
            .fold(0.0f64, f64::max);
        let bound = best * (1.0 + ENUM_MARGIN) + 1e-12 * scale.max(1.0);
        let u = self.coords(&t);
        let candidates = self.enumerate(&u, bound, false);

        let mut best_sq: Option<ExactScalar> = None;
        let mut winners: Vec<(Vec<i64>, ExactVector)> = Vec::new();
        for (z, _) in candidates {
            let p = self.point_exact(&z);
            let d = p.sub(x).norm_sq();
            match &best_sq {
                Some(b) if d > *b => {}
                Some(b) if d == *b => winners.push((z, p)),
                _ => {
                    best_sq = Some(d);
                    winners.clear();
                    winners.push((z, p));
                }
            }
        }
        winners.sort_by(|a, b| a.0.cmp(&b.0));
        winners
    }

    /// Exact lattice point for integer coefficients.
    pub fn point_exact(&self, z: &[i64]) -> ExactVector {
        let mut acc = ExactVector::zeros(self.n);
        for (i, &zi) in z.iter().enumerate() {
            if zi != 0 {
                acc = acc.add(&self.generator.row(i).scale(&ExactScalar::from_int(zi)));
            }
        }
        acc
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn cholesky(g: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = g.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = g[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                assert!(s > 0.0, "Gram matrix not positive definite");
                l[i][j] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    l
}

fn invert_f64(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, piv);
        let d = a[col][col];
        assert!(d.abs() > 1e-300, "singular shadow matrix");
        for x in a[col].iter_mut() {
            *x /= d;
        }
        for r in 0..n {
            if r != col {
                let f = a[r][col];
                if f != 0.0 {
                    let piv_row = a[col].clone();
                    for (x, p) in a[r].iter_mut().zip(&piv_row) {
                        *x -= f * p;
                    }
                }
            }
        }
    }
    a.into_iter().map(|row| row[n..].to_vec()).collect()
}
