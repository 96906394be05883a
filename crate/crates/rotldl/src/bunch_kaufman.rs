//! Bunch-Kaufman factorization (diagonal pivoting with partial pivoting),
//! the comparison baseline for the rotated-Rook method.
//!
//! Unblocked, packed-storage `A = P L D L^t P^t` with `D` block diagonal of
//! 1x1 and 2x2 pivots and the classic threshold `alpha = (1 + sqrt(17)) / 8`.
//! The interchanges are applied to the whole working matrix, multiplier
//! region included, so the permutation collects into the outer factor `P`.

use crate::factor::swap_sym;
use crate::packed::{pidx, PackedSymMatrix};
use crate::Error;

/// Bunch-Kaufman factors in packed storage.
///
/// `piv` uses one entry per column: a non-negative value `p` marks a 1x1
/// pivot whose step swapped coordinates `(k, p)` (`p = k` for no swap); a
/// 2x2 block at `(k, k+1)` stores `-(p + 1)` in both entries, where the step
/// swapped `(k + 1, p)`.
#[derive(Clone, Debug)]
pub struct BkFactorization {
    n: usize,
    packed: PackedSymMatrix,
    piv: Vec<i64>,
    nblocks: usize,
}

impl BkFactorization {
    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of diagonal pivot blocks.
    #[inline]
    pub fn nblocks(&self) -> usize {
        self.nblocks
    }

    #[inline]
    pub fn packed(&self) -> &PackedSymMatrix {
        &self.packed
    }

    #[inline]
    pub fn pivots(&self) -> &[i64] {
        &self.piv
    }

    /// True when position `k` starts a 2x2 pivot block. Only meaningful for
    /// positions reached by a forward scan that skips block seconds; use
    /// [`block_starts`](Self::block_starts) for arbitrary traversal.
    #[inline]
    pub fn is_block_start(&self, k: usize) -> bool {
        self.piv[k] < 0
    }

    /// Pivot blocks in forward order as `(start, is_2x2)`.
    pub fn block_starts(&self) -> Vec<(usize, bool)> {
        let mut out = Vec::with_capacity(self.nblocks);
        let mut k = 0;
        while k < self.n {
            if self.piv[k] < 0 {
                out.push((k, true));
                k += 2;
            } else {
                out.push((k, false));
                k += 1;
            }
        }
        out
    }

    /// Swap partner of the step at position `k`.
    #[inline]
    pub(crate) fn swap_target(&self, k: usize) -> usize {
        let p = self.piv[k];
        if p >= 0 {
            p as usize
        } else {
            (-p - 1) as usize
        }
    }
}

const ALPHA: f64 = 0.6403882032022076; // (1 + sqrt(17)) / 8

/// Factorizes a symmetric, numerically nonsingular matrix in place.
pub fn bk_factorize(a: PackedSymMatrix) -> Result<BkFactorization, Error> {
    let n = a.dim();
    let mut packed = a;
    if packed.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let mut piv = vec![0i64; n];
    let mut nblocks = 0usize;

    let data = packed.as_mut_slice();
    let at = |d: &[f64], i: usize, j: usize| d[pidx(i, j, n)];

    let mut k = 0usize;
    while k < n {
        let absakk = at(data, k, k).abs();
        // Largest off-diagonal magnitude in the active column k.
        let mut lambda = 0.0f64;
        let mut imax = k;
        for i in k + 1..n {
            let v = at(data, i, k).abs();
            if v > lambda {
                lambda = v;
                imax = i;
            }
        }
        if absakk.max(lambda) == 0.0 {
            return Err(Error::Singular);
        }

        let mut kstep = 1usize;
        let mut swap_with = k;
        if absakk < ALPHA * lambda {
            // Largest off-diagonal magnitude in the active column imax.
            let mut sigma = 0.0f64;
            for j in k..n {
                if j != imax {
                    sigma = sigma.max(at(data, imax, j).abs());
                }
            }
            if absakk * sigma >= ALPHA * lambda * lambda {
                // 1x1 pivot at (k, k) after all.
            } else if at(data, imax, imax).abs() >= ALPHA * sigma {
                swap_with = imax;
            } else {
                kstep = 2;
                swap_with = imax;
            }
        }

        if kstep == 1 {
            piv[k] = swap_with as i64;
            swap_sym(data, n, k, swap_with);
            let d = at(data, k, k);
            if d == 0.0 {
                return Err(Error::Singular);
            }
            // Multipliers over row k, then the rank-1 Schur update.
            let row_start = pidx(k, k, n);
            let next_start = row_start + (n - k);
            let (head, tail) = data.split_at_mut(next_start);
            let row_k = &mut head[row_start + 1..];
            for v in row_k.iter_mut() {
                *v /= d;
            }
            let mult = &head[row_start + 1..];
            let mut base = 0;
            for i in k + 1..n {
                let off = i - (k + 1);
                let coef = d * mult[off];
                let len = n - i;
                for (x, &l) in tail[base..base + len].iter_mut().zip(&mult[off..]) {
                    *x -= coef * l;
                }
                base += len;
            }
            k += 1;
        } else {
            piv[k] = -(swap_with as i64) - 1;
            piv[k + 1] = piv[k];
            swap_sym(data, n, k + 1, swap_with);
            let e11 = at(data, k, k);
            let e12 = at(data, k, k + 1);
            let e22 = at(data, k + 1, k + 1);
            let det = e11 * e22 - e12 * e12;
            if det == 0.0 {
                return Err(Error::Singular);
            }
            // Multipliers (l1, l2) = (a_ik, a_ik1) E^{-1} computed against
            // the original column values, then stored over them.
            let m = n - k - 2;
            let mut l1s = vec![0.0f64; m];
            let mut l2s = vec![0.0f64; m];
            for i in k + 2..n {
                let p = at(data, i, k);
                let q = at(data, i, k + 1);
                l1s[i - k - 2] = (e22 * p - e12 * q) / det;
                l2s[i - k - 2] = (e11 * q - e12 * p) / det;
            }
            for i in k + 2..n {
                let l1 = l1s[i - k - 2];
                let l2 = l2s[i - k - 2];
                for j in i..n {
                    let cj = at(data, j, k);
                    let cj1 = at(data, j, k + 1);
                    data[pidx(i, j, n)] -= l1 * cj + l2 * cj1;
                }
            }
            for i in k + 2..n {
                data[pidx(i, k, n)] = l1s[i - k - 2];
                data[pidx(i, k + 1, n)] = l2s[i - k - 2];
            }
            k += 2;
        }
        nblocks += 1;
    }

    Ok(BkFactorization {
        n,
        packed,
        piv,
        nblocks,
    })
}

/// Solves `A x = b` from the factorization.
///
/// The interchanges were applied to the whole working matrix during the
/// factorization, so they compose into one outer permutation: the solve
/// applies every swap up front, runs the plain block-triangular solves,
/// and undoes the swaps at the end.
pub fn bk_solve(f: &BkFactorization, b: &[f64]) -> Vec<f64> {
    let n = f.n;
    assert_eq!(b.len(), n, "right-hand side length must match dimension");
    let data = f.packed.as_slice();
    let at = |i: usize, j: usize| data[pidx(i, j, n)];
    let blocks = f.block_starts();
    let mut x = b.to_vec();

    // x <- P^t b
    for &(start, two) in &blocks {
        x.swap(if two { start + 1 } else { start }, f.swap_target(start));
    }

    // L y = x; block seconds have an identity column below the diagonal of
    // the block itself, so only rows past the block carry multipliers.
    for &(start, two) in &blocks {
        if two {
            for i in start + 2..n {
                x[i] -= at(i, start) * x[start] + at(i, start + 1) * x[start + 1];
            }
        } else {
            for i in start + 1..n {
                x[i] -= at(i, start) * x[start];
            }
        }
    }

    // D z = y
    for &(start, two) in &blocks {
        if two {
            let e11 = at(start, start);
            let e12 = at(start, start + 1);
            let e22 = at(start + 1, start + 1);
            let det = e11 * e22 - e12 * e12;
            let (p, q) = (x[start], x[start + 1]);
            x[start] = (e22 * p - e12 * q) / det;
            x[start + 1] = (e11 * q - e12 * p) / det;
        } else {
            x[start] /= at(start, start);
        }
    }

    // L^t w = z
    for &(start, two) in blocks.iter().rev() {
        if two {
            let mut s0 = 0.0;
            let mut s1 = 0.0;
            for i in start + 2..n {
                s0 += at(i, start) * x[i];
                s1 += at(i, start + 1) * x[i];
            }
            x[start] -= s0;
            x[start + 1] -= s1;
        } else {
            let mut s = 0.0;
            for i in start + 1..n {
                s += at(i, start) * x[i];
            }
            x[start] -= s;
        }
    }

    // x <- P w
    for &(start, two) in blocks.iter().rev() {
        x.swap(if two { start + 1 } else { start }, f.swap_target(start));
    }
    x
}

/// Rebuilds `P (L D L^t) P^t` from the factors.
pub fn bk_reconstruct(f: &BkFactorization) -> PackedSymMatrix {
    let n = f.n;
    let data = f.packed.as_slice();
    let at = |i: usize, j: usize| data[pidx(i, j, n)];
    let lentry = |i: usize, c: usize, c2: usize| -> f64 {
        // L column c of a block starting at c with optional second column c2.
        if i == c {
            1.0
        } else if i < c || i == c2 {
            0.0
        } else {
            at(i, c)
        }
    };

    let mut out = vec![0.0f64; n * (n + 1) / 2];
    let mut c = 0usize;
    while c < n {
        if f.is_block_start(c) {
            let e11 = at(c, c);
            let e12 = at(c, c + 1);
            let e22 = at(c + 1, c + 1);
            for i in c..n {
                let lic = lentry(i, c, c + 1);
                let lic1 = if i == c + 1 {
                    1.0
                } else if i <= c {
                    0.0
                } else {
                    at(i, c + 1)
                };
                let u = lic * e11 + lic1 * e12;
                let v = lic * e12 + lic1 * e22;
                for j in i..n {
                    let ljc = lentry(j, c, c + 1);
                    let ljc1 = if j == c + 1 {
                        1.0
                    } else if j <= c {
                        0.0
                    } else {
                        at(j, c + 1)
                    };
                    out[pidx(i, j, n)] += u * ljc + v * ljc1;
                }
            }
            c += 2;
        } else {
            let d = at(c, c);
            for i in c..n {
                let li = if i == c { 1.0 } else { at(i, c) };
                let fdi = d * li;
                for j in i..n {
                    let lj = if j == c { 1.0 } else { at(j, c) };
                    out[pidx(i, j, n)] += fdi * lj;
                }
            }
            c += 1;
        }
    }

    // Undo the interchanges in reverse step order.
    let mut steps: Vec<(usize, usize)> = Vec::with_capacity(n);
    let mut k = 0usize;
    while k < n {
        if f.is_block_start(k) {
            steps.push((k + 1, f.swap_target(k)));
            k += 2;
        } else {
            steps.push((k, f.swap_target(k)));
            k += 1;
        }
    }
    for &(p, q) in steps.iter().rev() {
        swap_sym(&mut out, n, p, q);
    }
    PackedSymMatrix::from_packed(n, out)
}
