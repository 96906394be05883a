//! Fundamental null basis and minimum-norm minimal-least-squares solves on
//! top of the rotated-Rook factorization.
//!
//! With the factors partitioned by the rank `r`, the null space of
//! `L D L^t` is spanned by `N = [-K; I]` where `K = (L11^t)^{ -1} L21^t`.
//! `K` is computed once by triangular back-substitution and stored over the
//! `L21^t` block, after which the minimum-norm least-squares solution of
//! `A x = b` costs two triangular solves, a diagonal scale, and two solves
//! with a well-conditioned SPD matrix of dimension `min(r, n - r)`. All
//! right-hand side work happens in place on one working vector.

use crate::factor::RotatedFactorization;
use crate::packed::{norm2, pidx, PackedSymMatrix};
use crate::Error;

/// Which rank branch of the solver ran.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `2r <= n`: reduced systems of dimension `r`.
    LowRank,
    /// `2r > n`: reduced systems of dimension `n - r`.
    HighRank,
}

/// Result of a minimum-norm least-squares solve.
#[derive(Clone, Debug)]
pub struct SolveReport {
    /// The minimum-norm least-squares solution.
    pub x: Vec<f64>,
    /// Rank of the factorization that produced it.
    pub rank: usize,
    /// `||b - A x||` evaluated through the stored factors.
    pub residual_norm: f64,
    /// Which rank branch executed.
    pub branch: Branch,
}

/// A completed factorization whose `L21^t` block has been overwritten with
/// `K = (L11^t)^{-1} L21^t`; the fundamental null basis is `N = [-K; I]`
/// and the implicit identity block is never stored.
#[derive(Clone, Debug)]
pub struct NullAugmentedFactorization {
    fact: RotatedFactorization,
}

/// Computes the fundamental null basis, consuming the factorization.
///
/// Column by column, `K = (L11^t)^{-1} L21^t` is formed by back-substitution
/// in place over the `L21^t` block; `L11` is unit triangular so this cannot
/// fail. For `r = n` the block is empty and the basis is empty.
pub fn compute_null_basis(f: RotatedFactorization) -> NullAugmentedFactorization {
    let mut fact = f;
    let n = fact.dim();
    let r = fact.rank();
    {
        let data = fact.packed_mut().as_mut_slice();
        for col in r..n {
            for i in (0..r).rev() {
                let mut v = data[pidx(i, col, n)];
                for j in i + 1..r {
                    v -= data[pidx(i, j, n)] * data[pidx(j, col, n)];
                }
                data[pidx(i, col, n)] = v;
            }
        }
    }
    NullAugmentedFactorization { fact }
}

impl NullAugmentedFactorization {
    #[inline]
    pub fn dim(&self) -> usize {
        self.fact.dim()
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.fact.rank()
    }

    /// The wrapped factorization (diagonal `D`, `L11^t`, and the `K` block).
    #[inline]
    pub fn factorization(&self) -> &RotatedFactorization {
        &self.fact
    }

    /// Entry `K[i][c]` of the stored `r x (n-r)` block (`N1 = -K`).
    #[inline]
    pub fn k_entry(&self, i: usize, c: usize) -> f64 {
        let n = self.dim();
        let r = self.rank();
        debug_assert!(i < r && c < n - r);
        self.fact.packed().as_slice()[pidx(i, r + c, n)]
    }

    /// Column `c` of the fundamental null basis `N = [-K; I]` as a full
    /// `n`-vector. Note this is a basis for the null space of `L D L^t`;
    /// null vectors of `A` itself are `M N e_c`.
    pub fn null_basis_column(&self, c: usize) -> Vec<f64> {
        let n = self.dim();
        let r = self.rank();
        assert!(c < n - r, "null basis has n - rank columns");
        let mut v = vec![0.0; n];
        for i in 0..r {
            v[i] = -self.k_entry(i, c);
        }
        v[r + c] = 1.0;
        v
    }

    /// `y1 += sign * K x2`.
    fn k_mul_add(&self, x2: &[f64], y1: &mut [f64], sign: f64) {
        let n = self.dim();
        let r = self.rank();
        let data = self.fact.packed().as_slice();
        for (i, y) in y1.iter_mut().enumerate() {
            let row = &data[pidx(i, r, n)..pidx(i, r, n) + (n - r)];
            let dot: f64 = row.iter().zip(x2.iter()).map(|(a, b)| a * b).sum();
            *y += sign * dot;
        }
    }

    /// `K^t x1` as a fresh vector.
    fn kt_apply(&self, x1: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let r = self.rank();
        let data = self.fact.packed().as_slice();
        let mut y = vec![0.0; n - r];
        for (i, &xi) in x1.iter().enumerate() {
            let row = &data[pidx(i, r, n)..pidx(i, r, n) + (n - r)];
            for (yc, &kic) in y.iter_mut().zip(row) {
                *yc += kic * xi;
            }
        }
        y
    }

    /// Forward substitution `L11 v <- v` (unit lower triangular).
    fn l11_solve_in_place(&self, v: &mut [f64]) {
        let n = self.dim();
        let r = self.rank();
        let data = self.fact.packed().as_slice();
        for j in 0..r {
            let vj = v[j];
            let row = &data[pidx(j, j, n) + 1..pidx(j, j, n) + (r - j)];
            for (i, &l) in row.iter().enumerate() {
                v[j + 1 + i] -= l * vj;
            }
        }
    }

    /// Back substitution `L11^t v <- v` (unit upper triangular).
    fn l11t_solve_in_place(&self, v: &mut [f64]) {
        let n = self.dim();
        let r = self.rank();
        let data = self.fact.packed().as_slice();
        for i in (0..r).rev() {
            let row = &data[pidx(i, i, n) + 1..pidx(i, i, n) + (r - i)];
            let mut acc = v[i];
            for (k, &u) in row.iter().enumerate() {
                acc -= u * v[i + 1 + k];
            }
            v[i] = acc;
        }
    }

    /// `v <- L11^t v` (multiply, not solve).
    fn l11t_mul_in_place(&self, v: &mut [f64]) {
        let n = self.dim();
        let r = self.rank();
        let data = self.fact.packed().as_slice();
        for i in 0..r {
            let row = &data[pidx(i, i, n) + 1..pidx(i, i, n) + (r - i)];
            let mut acc = v[i];
            for (k, &u) in row.iter().enumerate() {
                acc += u * v[i + 1 + k];
            }
            v[i] = acc;
        }
    }

    /// `v <- L11 v` (multiply, not solve).
    fn l11_mul_in_place(&self, v: &mut [f64]) {
        let n = self.dim();
        let r = self.rank();
        let data = self.fact.packed().as_slice();
        for i in (0..r).rev() {
            let mut acc = v[i];
            for j in 0..i {
                acc += data[pidx(j, i, n)] * v[j];
            }
            v[i] = acc;
        }
    }

    /// `I + K K^t`, the reduced SPD matrix of the low-rank branch (r x r).
    fn gram_small(&self) -> PackedSymMatrix {
        let n = self.dim();
        let r = self.rank();
        let data = self.fact.packed().as_slice();
        let mut g = PackedSymMatrix::zeros(r);
        for i in 0..r {
            let ri = &data[pidx(i, r, n)..pidx(i, r, n) + (n - r)];
            for j in i..r {
                let rj = &data[pidx(j, r, n)..pidx(j, r, n) + (n - r)];
                let dot: f64 = ri.iter().zip(rj).map(|(a, b)| a * b).sum();
                g.set(i, j, dot + if i == j { 1.0 } else { 0.0 });
            }
        }
        g
    }

    /// `K^t K + I`, the reduced SPD matrix of the high-rank branch
    /// ((n-r) x (n-r)).
    fn gram_large(&self) -> PackedSymMatrix {
        let n = self.dim();
        let r = self.rank();
        let m = n - r;
        let data = self.fact.packed().as_slice();
        let mut g = PackedSymMatrix::zeros(m);
        {
            let gd = g.as_mut_slice();
            for i in 0..r {
                let row = &data[pidx(i, r, n)..pidx(i, r, n) + m];
                for c in 0..m {
                    let kic = row[c];
                    if kic == 0.0 {
                        continue;
                    }
                    let dst = &mut gd[pidx(c, c, m)..pidx(c, c, m) + (m - c)];
                    for (x, &kid) in dst.iter_mut().zip(&row[c..]) {
                        *x += kic * kid;
                    }
                }
            }
            for c in 0..m {
                gd[pidx(c, c, m)] += 1.0;
            }
        }
        g
    }

    /// Minimum-norm least-squares solve; the branch follows the detected
    /// rank (`2r <= n` or not).
    pub fn solve_min_norm(&self, b: &[f64]) -> Result<SolveReport, Error> {
        self.solve_min_norm_impl(b, None)
    }

    /// Like [`solve_min_norm`](Self::solve_min_norm) but with the rank
    /// branch forced; both branches are algebraically valid for any
    /// `0 < r < n`, which makes their agreement testable.
    pub fn solve_min_norm_forced(&self, b: &[f64], branch: Branch) -> Result<SolveReport, Error> {
        self.solve_min_norm_impl(b, Some(branch))
    }

    fn solve_min_norm_impl(&self, b: &[f64], force: Option<Branch>) -> Result<SolveReport, Error> {
        let n = self.dim();
        let r = self.rank();
        assert_eq!(b.len(), n, "right-hand side length must match dimension");

        if r == 0 {
            return Ok(SolveReport {
                x: vec![0.0; n],
                rank: 0,
                residual_norm: norm2(b),
                branch: Branch::LowRank,
            });
        }

        let branch = force.unwrap_or(if 2 * r <= n {
            Branch::LowRank
        } else {
            Branch::HighRank
        });

        // c = M^t b, worked on in place from here.
        let mut w = b.to_vec();
        self.fact.apply_mt_in_place(&mut w);

        match branch {
            Branch::LowRank => {
                let chol = Cholesky::new(self.gram_small())?;
                let (w1, w2) = w.split_at_mut(r);
                // c1 - N1 c2 = c1 + K c2
                self.k_mul_add(w2, w1, 1.0);
                // (I + K K^t)^{-1} gives L11 z1; two triangular solves and a
                // diagonal scale then reach w_p1 = (L11^t)^{-1} D^{-1} z1.
                chol.solve_in_place(w1);
                self.l11_solve_in_place(w1);
                for (i, v) in w1.iter_mut().enumerate() {
                    *v /= self.fact.d(i);
                }
                self.l11t_solve_in_place(w1);
                // Minimum norm: w_min1 = (I + K K^t)^{-1} w_p1, w_min2 = K^t w_min1.
                chol.solve_in_place(w1);
                let t = self.kt_apply(w1);
                w2.copy_from_slice(&t);
            }
            Branch::HighRank => {
                let chol = Cholesky::new(self.gram_large())?;
                let (w1, w2) = w.split_at_mut(r);
                // alpha solves (K^t K + I) alpha = K^t c1 - c2.
                let t = self.kt_apply(w1);
                for (v, ti) in w2.iter_mut().zip(t) {
                    *v = ti - *v;
                }
                chol.solve_in_place(w2);
                // u1 = c1 + N1 alpha = c1 - K alpha.
                self.k_mul_add(w2, w1, -1.0);
                self.l11_solve_in_place(w1);
                for (i, v) in w1.iter_mut().enumerate() {
                    *v /= self.fact.d(i);
                }
                self.l11t_solve_in_place(w1);
                // beta solves (K^t K + I) beta = K^t w_p1; w_min = (w_p1 - K beta; beta).
                let t = self.kt_apply(w1);
                w2.copy_from_slice(&t);
                chol.solve_in_place(w2);
                self.k_mul_add(w2, w1, -1.0);
            }
        }

        // Residual through the factors: A x = M L D L^t M^t x with
        // M^t x = w, L21 expressed via K.
        let residual_norm = self.residual_from_w(b, &w);
        self.fact.apply_m_in_place(&mut w);
        Ok(SolveReport {
            x: w,
            rank: r,
            residual_norm,
            branch,
        })
    }

    /// `||b - A x||` evaluated as `||b - M q||` with
    /// `q1 = L11 D11 L11^t (w1 + K w2)`, `q2 = K^t q1`.
    fn residual_from_w(&self, b: &[f64], w: &[f64]) -> f64 {
        let r = self.rank();
        let mut g = w[..r].to_vec();
        self.k_mul_add(&w[r..], &mut g, 1.0);
        self.l11t_mul_in_place(&mut g);
        for (i, v) in g.iter_mut().enumerate() {
            *v *= self.fact.d(i);
        }
        self.l11_mul_in_place(&mut g);
        let tail = self.kt_apply(&g);
        let mut q = g;
        q.extend_from_slice(&tail);
        self.fact.apply_m_in_place(&mut q);
        let diff: f64 = b.iter().zip(&q).map(|(bi, qi)| (bi - qi) * (bi - qi)).sum();
        diff.sqrt()
    }
}

/// Dense Cholesky (`A = U^t U`) factored in place over the packed upper
/// storage of the reduced SPD matrix.
struct Cholesky {
    factored: PackedSymMatrix,
}

impl Cholesky {
    fn new(g: PackedSymMatrix) -> Result<Self, Error> {
        let m = g.dim();
        let mut a = g;
        let data = a.as_mut_slice();
        for k in 0..m {
            let mut d = data[pidx(k, k, m)];
            for t in 0..k {
                let u = data[pidx(t, k, m)];
                d -= u * u;
            }
            if d <= 0.0 {
                return Err(Error::NotPositiveDefinite);
            }
            let ukk = d.sqrt();
            data[pidx(k, k, m)] = ukk;
            for j in k + 1..m {
                let mut v = data[pidx(k, j, m)];
                for t in 0..k {
                    v -= data[pidx(t, k, m)] * data[pidx(t, j, m)];
                }
                data[pidx(k, j, m)] = v / ukk;
            }
        }
        Ok(Cholesky { factored: a })
    }

    fn solve_in_place(&self, v: &mut [f64]) {
        let m = self.factored.dim();
        debug_assert_eq!(v.len(), m);
        let u = self.factored.as_slice();
        // U^t y = v
        for i in 0..m {
            let mut acc = v[i];
            for t in 0..i {
                acc -= u[pidx(t, i, m)] * v[t];
            }
            v[i] = acc / u[pidx(i, i, m)];
        }
        // U x = y
        for i in (0..m).rev() {
            let mut acc = v[i];
            for j in i + 1..m {
                acc -= u[pidx(i, j, m)] * v[j];
            }
            v[i] = acc / u[pidx(i, i, m)];
        }
    }
}

/// Solves a symmetric positive definite system by dense Cholesky.
pub fn spd_solve(g: &PackedSymMatrix, rhs: &[f64]) -> Result<Vec<f64>, Error> {
    assert_eq!(rhs.len(), g.dim(), "dimension mismatch");
    let chol = Cholesky::new(g.clone())?;
    let mut x = rhs.to_vec();
    chol.solve_in_place(&mut x);
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::factor::factorize;
    use crate::packed::sym_matvec;

    fn solve_all(rows: &[Vec<f64>], b: &[f64]) -> SolveReport {
        let a = PackedSymMatrix::from_rows(rows);
        let (f, _) = factorize(a, None).unwrap();
        compute_null_basis(f).solve_min_norm(b).unwrap()
    }

    #[test]
    fn spd_solve_examples() {
        let id = PackedSymMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0]]);
        assert_eq!(spd_solve(&id, &[2.0, -1.0]).unwrap(), vec![2.0, -1.0]);

        let d = PackedSymMatrix::from_rows(&[vec![2.0, 0.0], vec![0.0, 2.0]]);
        let x = spd_solve(&d, &[2.0, 4.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);

        let g = PackedSymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let x = spd_solve(&g, &[3.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn spd_solve_rejects_indefinite() {
        let g = PackedSymMatrix::from_rows(&[vec![1.0, 5.0], vec![5.0, 1.0]]);
        assert_eq!(
            spd_solve(&g, &[1.0, 1.0]).unwrap_err(),
            Error::NotPositiveDefinite
        );
    }

    #[test]
    fn null_basis_of_diag_1_0() {
        let a = PackedSymMatrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 0.0]]);
        let (f, _) = factorize(a, None).unwrap();
        assert_eq!(f.rank(), 1);
        let nb = compute_null_basis(f);
        assert_eq!(nb.k_entry(0, 0), 0.0);
        assert_eq!(nb.null_basis_column(0), vec![0.0, 1.0]);
    }

    #[test]
    fn null_basis_of_rank_one_2x2() {
        let a = PackedSymMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        let (f, _) = factorize(a.clone(), None).unwrap();
        assert_eq!(f.rank(), 1);
        let nb = compute_null_basis(f);
        // A (M N) = 0, checked by direct multiplication.
        let col = nb.null_basis_column(0);
        let mn = nb.factorization().apply_m(&col);
        let y = sym_matvec(&a, &mn);
        assert!(norm2(&y) <= 1e-14);
    }

    #[test]
    fn solve_identity() {
        let rep = solve_all(&[vec![1.0, 0.0], vec![0.0, 1.0]], &[0.3, -0.7]);
        assert_eq!(rep.x, vec![0.3, -0.7]);
        assert_eq!(rep.rank, 2);
        assert!(rep.residual_norm <= 1e-15);
    }

    #[test]
    fn solve_diag_1_0() {
        let rep = solve_all(&[vec![1.0, 0.0], vec![0.0, 0.0]], &[1.0, 1.0]);
        assert!((rep.x[0] - 1.0).abs() < 1e-15);
        assert_eq!(rep.x[1], 0.0);
        assert!((rep.residual_norm - 1.0).abs() < 1e-15);
        assert_eq!(rep.branch, Branch::LowRank);
    }

    #[test]
    fn solve_rank_one_pseudoinverse() {
        // A+ = [[1,1],[1,1]]/4, so x = A+ (1,0) = (1/4, 1/4).
        let rep = solve_all(&[vec![1.0, 1.0], vec![1.0, 1.0]], &[1.0, 0.0]);
        assert!((rep.x[0] - 0.25).abs() < 1e-15);
        assert!((rep.x[1] - 0.25).abs() < 1e-15);
        assert!((rep.residual_norm - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn solve_rank_zero() {
        let rep = solve_all(&[vec![0.0, 0.0], vec![0.0, 0.0]], &[3.0, 4.0]);
        assert_eq!(rep.x, vec![0.0, 0.0]);
        assert_eq!(rep.rank, 0);
        assert_eq!(rep.residual_norm, 5.0);
    }

    #[test]
    fn forced_branches_agree() {
        let a = PackedSymMatrix::from_rows(&[
            vec![1.0, 2.0, 0.5],
            vec![2.0, -1.0, 1.0],
            vec![0.5, 1.0, 0.3],
        ]);
        let (f, _) = factorize(a, None).unwrap();
        let nb = compute_null_basis(f);
        let b = [0.4, -1.0, 2.0];
        let lo = nb.solve_min_norm_forced(&b, Branch::LowRank).unwrap();
        let hi = nb.solve_min_norm_forced(&b, Branch::HighRank).unwrap();
        for (a, b) in lo.x.iter().zip(&hi.x) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }
}
