//! Independent oracles for the integration suites: a dense LU solver and a
//! cyclic Jacobi eigendecomposition, kept deliberately separate from the
//! library's factorization path.

#![allow(dead_code)]
#![allow(clippy::needless_range_loop)]

use rotldl::PackedSymMatrix;

/// Plain dense row-major square matrix.
#[derive(Clone)]
pub struct Dense {
    pub n: usize,
    pub a: Vec<Vec<f64>>,
}

impl Dense {
    pub fn from_packed(p: &PackedSymMatrix) -> Self {
        let n = p.dim();
        let a = (0..n)
            .map(|i| (0..n).map(|j| p.get(i, j)).collect())
            .collect();
        Dense { n, a }
    }

    pub fn identity(n: usize) -> Self {
        let mut a = vec![vec![0.0; n]; n];
        for (i, row) in a.iter_mut().enumerate() {
            row[i] = 1.0;
        }
        Dense { n, a }
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        self.a
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// LU with partial pivoting; returns None for an exactly singular matrix.
pub struct Lu {
    n: usize,
    lu: Vec<Vec<f64>>,
    piv: Vec<usize>,
    sign: f64,
}

impl Lu {
    pub fn new(m: &Dense) -> Option<Lu> {
        let n = m.n;
        let mut lu = m.a.clone();
        let mut piv: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        for k in 0..n {
            let mut p = k;
            for i in k + 1..n {
                if lu[i][k].abs() > lu[p][k].abs() {
                    p = i;
                }
            }
            if lu[p][k] == 0.0 {
                return None;
            }
            if p != k {
                lu.swap(p, k);
                piv.swap(p, k);
                sign = -sign;
            }
            let d = lu[k][k];
            for i in k + 1..n {
                let l = lu[i][k] / d;
                lu[i][k] = l;
                for j in k + 1..n {
                    lu[i][j] -= l * lu[k][j];
                }
            }
        }
        Some(Lu { n, lu, piv, sign })
    }

    pub fn det(&self) -> f64 {
        let mut d = self.sign;
        for k in 0..self.n {
            d *= self.lu[k][k];
        }
        d
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut x: Vec<f64> = self.piv.iter().map(|&p| b[p]).collect();
        for k in 0..n {
            for i in k + 1..n {
                x[i] -= self.lu[i][k] * x[k];
            }
        }
        for k in (0..n).rev() {
            x[k] /= self.lu[k][k];
            for i in 0..k {
                x[i] -= self.lu[i][k] * x[k];
            }
        }
        x
    }
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix:
/// `A = V diag(lambda) V^t` with `V` orthogonal. Sweeps until the
/// off-diagonal mass is negligible.
pub fn jacobi_eigen(p: &PackedSymMatrix) -> (Vec<f64>, Dense) {
    let n = p.dim();
    let mut a = Dense::from_packed(p).a;
    let mut v = Dense::identity(n).a;
    let scale = p
        .as_slice()
        .iter()
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(f64::MIN_POSITIVE);

    for _sweep in 0..50 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in i + 1..n {
                off = off.max(a[i][j].abs());
            }
        }
        if off <= 1e-15 * scale {
            break;
        }
        for p_ in 0..n {
            for q in p_ + 1..n {
                let apq = a[p_][q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let theta = 0.5 * (a[q][q] - a[p_][p_]) / apq;
                let t = theta.signum() / (theta.abs() + (1.0 + theta * theta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p_], a[k][q]);
                    a[k][p_] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p_][k], a[q][k]);
                    a[p_][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k][p_], v[k][q]);
                    v[k][p_] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let lambda = (0..n).map(|i| a[i][i]).collect();
    (lambda, Dense { n, a: v })
}

/// Number of eigenvalues above the tolerance in magnitude.
pub fn jacobi_rank(p: &PackedSymMatrix, tol: f64) -> usize {
    let (lambda, _) = jacobi_eigen(p);
    lambda.iter().filter(|l| l.abs() > tol).count()
}

/// Minimum-norm least-squares solution through the eigendecomposition:
/// invert the eigenvalues above `tol`, zero the rest.
pub fn pinv_solve(p: &PackedSymMatrix, b: &[f64], tol: f64) -> Vec<f64> {
    let n = p.dim();
    let (lambda, v) = jacobi_eigen(p);
    // x = V diag(lambda^+) V^t b
    let mut vtb = vec![0.0; n];
    for (k, item) in vtb.iter_mut().enumerate() {
        *item = (0..n).map(|i| v.a[i][k] * b[i]).sum();
    }
    for (item, l) in vtb.iter_mut().zip(&lambda) {
        if l.abs() > tol {
            *item /= l;
        } else {
            *item = 0.0;
        }
    }
    (0..n)
        .map(|i| (0..n).map(|k| v.a[i][k] * vtb[k]).sum())
        .collect()
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let d: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let scale = norm2(b).max(1e-300);
    d / scale
}
