//! Small dense complex linear algebra.
//!
//! Everything in the quantizer and precoder-extraction paths works on
//! matrices no larger than a few hundred entries, so the routines here are
//! plain row-major loops: matrix products, a partial-pivot Gauss solver and a
//! cyclic Jacobi eigensolver for Hermitian matrices. No BLAS, no platform
//! dependence, identical results on every target.

use crate::error::{Error, Result};
use num_complex::Complex64;

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m.data[r * cols + c] = f(r, c);
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| {
            if r == c {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    #[inline]
    pub fn at(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn col(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self.at(r, c)).collect()
    }

    /// Conjugate transpose.
    pub fn hermitian(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |r, c| self.at(c, r).conj())
    }

    /// Plain transpose (no conjugation).
    pub fn transpose(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |r, c| self.at(c, r))
    }

    pub fn mul(&self, other: &CMat) -> CMat {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = CMat::zeros(self.rows, other.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self.at(r, k);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for c in 0..other.cols {
                    out.data[r * other.cols + c] += a * other.at(k, c);
                }
            }
        }
        out
    }

    /// Matrix–vector product.
    pub fn mul_vec(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "matvec dimension mismatch");
        (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .map(|c| self.at(r, c) * v[c])
                    .sum::<Complex64>()
            })
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }
}

/// Inner product `a^H b` (conjugating the first argument).
pub fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Euclidean norm.
pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn scale(v: &[Complex64], s: Complex64) -> Vec<Complex64> {
    v.iter().map(|z| z * s).collect()
}

/// Solve `A X = B` for square `A` via Gauss elimination with partial
/// pivoting. `B` may have any number of columns.
pub fn solve(a: &CMat, b: &CMat) -> Result<CMat> {
    if a.rows != a.cols {
        return Err(Error::Shape(format!(
            "solve expects a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    if a.rows != b.rows {
        return Err(Error::Shape(format!(
            "solve rhs has {} rows, expected {}",
            b.rows, a.rows
        )));
    }
    let n = a.rows;
    let m = b.cols;
    let mut lhs = a.clone();
    let mut rhs = b.clone();
    let scale_ref = lhs.max_abs().max(1e-300);

    for col in 0..n {
        let mut piv = col;
        let mut piv_mag = lhs.at(col, col).norm();
        for r in col + 1..n {
            let mag = lhs.at(r, col).norm();
            if mag > piv_mag {
                piv = r;
                piv_mag = mag;
            }
        }
        if piv_mag < 1e-13 * scale_ref {
            return Err(Error::Numerical(format!(
                "singular system (pivot {piv_mag:.3e} at column {col})"
            )));
        }
        if piv != col {
            for c in 0..n {
                lhs.data.swap(col * n + c, piv * n + c);
            }
            for c in 0..m {
                rhs.data.swap(col * m + c, piv * m + c);
            }
        }
        let inv = Complex64::new(1.0, 0.0) / lhs.at(col, col);
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = lhs.at(r, col) * inv;
            if f == Complex64::new(0.0, 0.0) {
                continue;
            }
            for c in col..n {
                let v = lhs.at(r, c) - f * lhs.at(col, c);
                lhs.set(r, c, v);
            }
            for c in 0..m {
                let v = rhs.at(r, c) - f * rhs.at(col, c);
                rhs.set(r, c, v);
            }
        }
    }
    for r in 0..n {
        let inv = Complex64::new(1.0, 0.0) / lhs.at(r, r);
        for c in 0..m {
            let v = rhs.at(r, c) * inv;
            rhs.set(r, c, v);
        }
    }
    Ok(rhs)
}

/// Solve `X A = B` for square `A` (right division) via the transposed system.
pub fn solve_right(a: &CMat, b: &CMat) -> Result<CMat> {
    Ok(solve(&a.transpose(), &b.transpose())?.transpose())
}

/// Eigendecomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues in descending order and the matching eigenvectors as
/// columns of a unitary matrix. Intended for the small Gram matrices that
/// appear in precoder extraction (n ≤ 8 or so).
pub fn hermitian_eigen(a: &CMat) -> Result<(Vec<f64>, CMat)> {
    if a.rows != a.cols {
        return Err(Error::Shape(format!(
            "eigen expects a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    let n = a.rows;
    let mut m = a.clone();
    let mut v = CMat::identity(n);
    let scale_ref = m.max_abs().max(1e-300);

    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in p + 1..n {
                off = off.max(m.at(p, q).norm());
            }
        }
        if off < 1e-15 * scale_ref {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m.at(p, q);
                let c_mag = apq.norm();
                if c_mag < 1e-18 * scale_ref {
                    continue;
                }
                // Phase factor turning the (p,q) block real-symmetric,
                // then a real Jacobi rotation zeroing the off-diagonal.
                let phase = apq / c_mag;
                let app = m.at(p, p).re;
                let aqq = m.at(q, q).re;
                let tau = (aqq - app) / (2.0 * c_mag);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let cs = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * cs;

                // J restricted to (p,q): [[cs, sn], [-conj(phase)*sn, conj(phase)*cs]]
                let jpp = Complex64::new(cs, 0.0);
                let jpq = Complex64::new(sn, 0.0);
                let jqp = -phase.conj() * sn;
                let jqq = phase.conj() * cs;

                // A <- J^H A J
                for r in 0..n {
                    let xp = m.at(r, p);
                    let xq = m.at(r, q);
                    m.set(r, p, xp * jpp + xq * jqp);
                    m.set(r, q, xp * jpq + xq * jqq);
                }
                for c in 0..n {
                    let xp = m.at(p, c);
                    let xq = m.at(q, c);
                    m.set(p, c, jpp.conj() * xp + jqp.conj() * xq);
                    m.set(q, c, jpq.conj() * xp + jqq.conj() * xq);
                }
                // Clamp the rotated-away entries to exactly zero.
                m.set(p, q, Complex64::new(0.0, 0.0));
                m.set(q, p, Complex64::new(0.0, 0.0));

                // V <- V J
                for r in 0..n {
                    let xp = v.at(r, p);
                    let xq = v.at(r, q);
                    v.set(r, p, xp * jpp + xq * jqp);
                    v.set(r, q, xp * jpq + xq * jqq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let eig: Vec<f64> = (0..n).map(|i| m.at(i, i).re).collect();
    order.sort_by(|&i, &j| eig[j].partial_cmp(&eig[i]).unwrap());
    let values = order.iter().map(|&i| eig[i]).collect();
    let vectors = CMat::from_fn(n, n, |r, c| v.at(r, order[c]));
    Ok((values, vectors))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn random_cmat(rng: &mut SplitMix64, rows: usize, cols: usize) -> CMat {
        CMat::from_fn(rows, cols, |_, _| rng.complex_normal())
    }

    #[test]
    fn solve_recovers_known_solution() {
        let mut rng = SplitMix64::new(11);
        for _ in 0..20 {
            let a = random_cmat(&mut rng, 5, 5);
            let x = random_cmat(&mut rng, 5, 3);
            let b = a.mul(&x);
            let got = solve(&a, &b).unwrap();
            for (u, w) in got.data.iter().zip(&x.data) {
                assert!((u - w).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn solve_right_recovers_known_solution() {
        let mut rng = SplitMix64::new(12);
        let a = random_cmat(&mut rng, 4, 4);
        let x = random_cmat(&mut rng, 3, 4);
        let b = x.mul(&a);
        let got = solve_right(&a, &b).unwrap();
        for (u, w) in got.data.iter().zip(&x.data) {
            assert!((u - w).norm() < 1e-9);
        }
    }

    #[test]
    fn solve_rejects_singular() {
        let a = CMat::from_fn(3, 3, |r, _| Complex64::new(r as f64, 0.0));
        let b = CMat::zeros(3, 1);
        assert!(matches!(solve(&a, &b), Err(Error::Numerical(_))));
    }

    #[test]
    fn eigen_reconstructs_hermitian_matrix() {
        let mut rng = SplitMix64::new(13);
        for n in [2usize, 3, 4, 6] {
            let g = random_cmat(&mut rng, n, n);
            let a = g.hermitian().mul(&g); // Hermitian PSD
            let (vals, vecs) = hermitian_eigen(&a).unwrap();
            // Descending order
            for w in vals.windows(2) {
                assert!(w[0] >= w[1] - 1e-12);
            }
            // A v_i = λ_i v_i
            for i in 0..n {
                let vi = vecs.col(i);
                let av = a.mul_vec(&vi);
                for r in 0..n {
                    assert!(
                        (av[r] - vi[r] * vals[i]).norm() < 1e-9 * vals[0].max(1.0),
                        "eigenpair {i} mismatch at n={n}"
                    );
                }
            }
            // Unitary eigenvector matrix
            let gram = vecs.hermitian().mul(&vecs);
            for r in 0..n {
                for c in 0..n {
                    let want = if r == c { 1.0 } else { 0.0 };
                    assert!((gram.at(r, c) - Complex64::new(want, 0.0)).norm() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn eigen_matches_power_iteration_on_dominant_pair() {
        let mut rng = SplitMix64::new(14);
        let g = random_cmat(&mut rng, 4, 4);
        let a = g.hermitian().mul(&g);
        let (vals, vecs) = hermitian_eigen(&a).unwrap();

        // Independent oracle: plain power iteration.
        let mut x: Vec<Complex64> = (0..4).map(|_| rng.complex_normal()).collect();
        for _ in 0..2000 {
            let y = a.mul_vec(&x);
            let nn = norm(&y);
            x = scale(&y, Complex64::new(1.0 / nn, 0.0));
        }
        let lam = dot(&x, &a.mul_vec(&x)).re;
        assert!((lam - vals[0]).abs() < 1e-8 * vals[0]);
        let overlap = dot(&x, &vecs.col(0)).norm();
        assert!((overlap - 1.0).abs() < 1e-6, "overlap {overlap}");
    }
}
