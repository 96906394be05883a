//! Rotated-Rook LDL^t factorization of symmetric indefinite matrices.
//!
//! Every elimination step first moves a pivot that is maximal in absolute
//! value over both its row and its column of the active submatrix into the
//! leading position (a Rook search adapted to symmetry), then applies a plane
//! rotation of rows and columns `k` and `k + 1` that zeroes the `(k, k+1)`
//! entry and inflates the pivot, and finally performs one step of symmetric
//! Gaussian elimination. Both the interchanges and the rotations act on the
//! whole working matrix, so they can be collected into a single orthogonal
//! factor `M` and the result reads `A = M L D L^t M^t` with `L` unit
//! triangular and `D` diagonal.
//!
//! The factorization is done in place: the diagonal of the packed storage
//! ends up holding `D`, the strict upper triangle holds `L^t`, and two side
//! vectors record the interchange targets (two per step) and the tangent of
//! each rotation.

use crate::packed::{pidx, PackedSymMatrix};
use crate::Error;

/// Result of the in-place rotated-Rook factorization.
#[derive(Clone, Debug)]
pub struct RotatedFactorization {
    n: usize,
    rank: usize,
    packed: PackedSymMatrix,
    /// Interchange targets: step `k` swapped coordinates `(k, piv[2k])` and
    /// then `(k+1, piv[2k+1])`, in that order.
    piv: Vec<usize>,
    /// Tangent of the step-`k` rotation; `0` when the step applied none.
    tan: Vec<f64>,
}

impl RotatedFactorization {
    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    /// Detected rank; also the number of elimination steps performed.
    #[inline]
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Packed factor storage: `D` on the diagonal (zeros from `rank` on),
    /// `L^t` strictly above it.
    #[inline]
    pub fn packed(&self) -> &PackedSymMatrix {
        &self.packed
    }

    pub(crate) fn packed_mut(&mut self) -> &mut PackedSymMatrix {
        &mut self.packed
    }

    /// Diagonal pivot `d_k`.
    #[inline]
    pub fn d(&self, k: usize) -> f64 {
        self.packed.get(k, k)
    }

    /// Interchange record, two entries per step.
    #[inline]
    pub fn pivots(&self) -> &[usize] {
        &self.piv
    }

    /// Rotation tangents, one per step.
    #[inline]
    pub fn tangents(&self) -> &[f64] {
        &self.tan
    }

    /// Applies `M^t` to a vector in place: replays, in forward step order,
    /// the step-`k` interchange pair followed by the step-`k` rotation.
    pub fn apply_mt_in_place(&self, v: &mut [f64]) {
        assert_eq!(v.len(), self.n, "vector length must match dimension");
        for k in 0..self.rank {
            v.swap(k, self.piv[2 * k]);
            if k + 1 < self.n {
                v.swap(k + 1, self.piv[2 * k + 1]);
                let t = self.tan[k];
                if t != 0.0 {
                    let (c, s) = cos_sin(t);
                    let (x, y) = (v[k], v[k + 1]);
                    v[k] = c * x - s * y;
                    v[k + 1] = s * x + c * y;
                }
            }
        }
    }

    /// Applies `M` to a vector in place: inverse replay of
    /// [`apply_mt_in_place`](Self::apply_mt_in_place) (reverse step order,
    /// transposed rotations, inverse interchanges).
    pub fn apply_m_in_place(&self, v: &mut [f64]) {
        assert_eq!(v.len(), self.n, "vector length must match dimension");
        for k in (0..self.rank).rev() {
            if k + 1 < self.n {
                let t = self.tan[k];
                if t != 0.0 {
                    let (c, s) = cos_sin(t);
                    let (x, y) = (v[k], v[k + 1]);
                    v[k] = c * x + s * y;
                    v[k + 1] = -s * x + c * y;
                }
                v.swap(k + 1, self.piv[2 * k + 1]);
            }
            v.swap(k, self.piv[2 * k]);
        }
    }

    /// `M^t v` as a new vector.
    pub fn apply_mt(&self, v: &[f64]) -> Vec<f64> {
        let mut out = v.to_vec();
        self.apply_mt_in_place(&mut out);
        out
    }

    /// `M v` as a new vector.
    pub fn apply_m(&self, v: &[f64]) -> Vec<f64> {
        let mut out = v.to_vec();
        self.apply_m_in_place(&mut out);
        out
    }
}

/// Outcome of the Rook pivot search on the active submatrix.
#[derive(Clone, Debug, PartialEq)]
pub struct PivotChoice {
    /// Largest absolute value found.
    pub max: f64,
    /// Its row.
    pub rmax: usize,
    /// Its column.
    pub cmax: usize,
    /// For a diagonal pivot, the index of the row scanned immediately
    /// before, which is guaranteed to hold no element larger than `max`.
    pub previous: Option<usize>,
    /// Set when every active element is below the tolerance.
    pub deficient: bool,
}

/// Element growth observed during a factorization.
#[derive(Clone, Debug)]
pub struct GrowthTrace {
    /// Largest absolute entry of the input matrix.
    pub max_initial: f64,
    /// Running maximum over all intermediate active-submatrix entries.
    pub max_intermediate: f64,
    /// `max_intermediate / max_initial`; `1` for an all-zero input.
    pub rho: f64,
    /// Largest multiplier magnitude at elimination time; bounded by
    /// `sqrt(2)` because the rotated pivot dominates its two source rows.
    /// (Later steps rotate the stored `L^t` entries, so the bound applies
    /// here, not to the final storage.)
    pub max_multiplier: f64,
}

/// Tangent of the Jacobi rotation that zeroes `a12` in the symmetric block
/// `[[a11, a12], [a12, a22]]` and leaves the eigenvalue of larger magnitude
/// in the leading position. Ties are broken toward a positive leading value.
/// Returns `0` when `a12 = 0`.
pub fn compute_rotation(a11: f64, a12: f64, a22: f64) -> f64 {
    if a12 == 0.0 {
        return 0.0;
    }
    // The two tangent roots of a12 t^2 - (a11 - a22) t - a12 = 0 are
    // -tau +- sqrt(1 + tau^2); their product is -1, so one has |t| <= 1.
    let tau = (0.5 * a22 - 0.5 * a11) / a12;
    if !tau.is_finite() {
        // a12 is negligible against the diagonal; rotating cannot improve
        // a representable pivot.
        return 0.0;
    }
    let r = tau.hypot(1.0);
    let sgn = if tau >= 0.0 { 1.0 } else { -1.0 };
    let t_small = sgn / (tau.abs() + r);
    let t_big = -sgn * (tau.abs() + r).min(f64::MAX);
    // b11 = a11 - t*a12 evaluates the eigenvalue each root sends to the
    // leading position; a magnitude tie resolves toward the positive one.
    let b_small = a11 - t_small * a12;
    let b_big = a11 - t_big * a12;
    let pick_big = b_big.abs() > b_small.abs() || (b_big.abs() == b_small.abs() && b_small < 0.0);
    if pick_big {
        t_big
    } else {
        t_small
    }
}

/// Cosine and sine recovered from a stored tangent, stable for large `|t|`.
#[inline]
pub(crate) fn cos_sin(t: f64) -> (f64, f64) {
    if t.abs() <= 1.0 {
        let c = 1.0 / (1.0 + t * t).sqrt();
        (c, t * c)
    } else {
        let u = 1.0 / t;
        let s = t.signum() / (1.0 + u * u).sqrt();
        (s * u, s)
    }
}

#[inline(always)]
fn at(data: &[f64], n: usize, i: usize, j: usize) -> f64 {
    data[pidx(i, j, n)]
}

/// Symmetric interchange of coordinates `p` and `q` applied to the whole
/// packed matrix, multiplier region included.
pub(crate) fn swap_sym(data: &mut [f64], n: usize, p: usize, q: usize) {
    if p == q {
        return;
    }
    for t in 0..n {
        if t == p || t == q {
            continue;
        }
        data.swap(pidx(t, p, n), pidx(t, q, n));
    }
    data.swap(pidx(p, p, n), pidx(q, q, n));
    // The (p, q) entry is its own mirror image under the congruence.
}

/// General rotation congruence `W <- R W R^t` on coordinates `(k, k+1)` with
/// `R = [[c, -s], [s, c]]`, applied to the whole packed matrix.
pub(crate) fn rotate_sym_general(data: &mut [f64], n: usize, k: usize, c: f64, s: f64) {
    for u in 0..n {
        if u == k || u == k + 1 {
            continue;
        }
        let pk = pidx(u, k, n);
        let pk1 = pidx(u, k + 1, n);
        let (x, y) = (data[pk], data[pk1]);
        data[pk] = c * x - s * y;
        data[pk1] = s * x + c * y;
    }
    let dkk = pidx(k, k, n);
    let dk1 = pidx(k + 1, k + 1, n);
    let dko = pidx(k, k + 1, n);
    let (a11, a12, a22) = (data[dkk], data[dko], data[dk1]);
    let (cc, ss, cs) = (c * c, s * s, c * s);
    data[dkk] = cc * a11 - 2.0 * cs * a12 + ss * a22;
    data[dk1] = ss * a11 + 2.0 * cs * a12 + cc * a22;
    data[dko] = cs * (a11 - a22) + (cc - ss) * a12;
}

/// Annihilating rotation used by the factorization: like
/// [`rotate_sym_general`] but the 2x2 pivot block is set from the tangent
/// identities `b11 = a11 - t a12`, `b22 = a22 + t a12`, `b12 = 0`. Returns
/// the largest absolute value among the modified active entries
/// (rows/columns `k` and `k+1` from column `k` on).
fn apply_rotation_raw(data: &mut [f64], n: usize, k: usize, t: f64) -> f64 {
    let (c, s) = cos_sin(t);
    for u in 0..n {
        if u == k || u == k + 1 {
            continue;
        }
        let pk = pidx(u, k, n);
        let pk1 = pidx(u, k + 1, n);
        let (x, y) = (data[pk], data[pk1]);
        data[pk] = c * x - s * y;
        data[pk1] = s * x + c * y;
    }
    let dkk = pidx(k, k, n);
    let dk1 = pidx(k + 1, k + 1, n);
    let dko = pidx(k, k + 1, n);
    let a12 = data[dko];
    data[dkk] -= t * a12;
    data[dk1] += t * a12;
    data[dko] = 0.0;

    let mut m = data[dkk].abs().max(data[dk1].abs());
    for u in k + 2..n {
        m = m
            .max(at(data, n, k, u).abs())
            .max(at(data, n, k + 1, u).abs());
    }
    m
}

/// Modified Rook pivot search over the active submatrix `[k..n)`.
///
/// Scans rows of the active upper triangle until one holds an element above
/// `tolerance`, then chases the column of the running maximum until the
/// element is maximal in both its row and its column. For a diagonal pivot
/// the search also establishes a partner row (`previous`) known to contain
/// no larger element; when the diagonal maximum sits in the first active row
/// the next row is studied for that purpose.
pub fn rook_pivot_search(f: &PackedSymMatrix, k: usize, tolerance: f64) -> PivotChoice {
    rook_search_raw(f.as_slice(), f.dim(), k, tolerance)
}

fn rook_search_raw(data: &[f64], n: usize, k: usize, tol: f64) -> PivotChoice {
    debug_assert!(k < n);
    let mut max = 0.0f64;
    let (mut rmax, mut cmax) = (k, k);
    let mut previous: Option<usize> = None;
    let mut chase = false;

    for i in k..n {
        for j in i..n {
            let v = at(data, n, i, j).abs();
            if v > max {
                max = v;
                rmax = i;
                cmax = j;
                chase = true;
                if i == j {
                    chase = false;
                    previous = if i > k { Some(i - 1) } else { None };
                }
            }
        }
        if max > tol {
            break;
        }
    }
    if max < tol || max == 0.0 {
        return PivotChoice {
            max,
            rmax,
            cmax,
            previous: None,
            deficient: true,
        };
    }

    // A diagonal maximum in the first active row has no previously scanned
    // partner; study the second active row.
    if rmax == cmax && rmax == k && k + 1 < n {
        chase = false;
        previous = Some(k + 1);
        for j in k + 1..n {
            let v = at(data, n, k + 1, j).abs();
            if v > max {
                max = v;
                rmax = k + 1;
                cmax = j;
                chase = true;
            }
        }
        if rmax == k + 1 && cmax == k + 1 {
            chase = false;
            previous = Some(k);
        }
    }

    let mut scanned = rmax;
    while chase {
        chase = false;
        previous = Some(scanned);
        let i = cmax;
        scanned = i;
        for j in k..n {
            let v = at(data, n, i, j).abs();
            if v > max {
                max = v;
                rmax = i;
                cmax = j;
                chase = true;
                if i == j {
                    chase = false;
                }
            }
        }
    }

    PivotChoice {
        max,
        rmax,
        cmax,
        previous: if rmax == cmax { previous } else { None },
        deficient: false,
    }
}

/// Moves the chosen pivot into position: for an off-diagonal pivot the index
/// with the larger diagonal magnitude goes to `k` and the other to `k+1`
/// (ties toward the lower index), so the selected element lands at
/// `(k, k+1)`; for a diagonal pivot the partner row goes to `k+1`. Records
/// the two interchanges in `piv`.
fn place_pivot(data: &mut [f64], n: usize, k: usize, choice: &PivotChoice, piv: &mut [usize]) {
    let (to_k, to_k1) = if choice.rmax != choice.cmax {
        let di = at(data, n, choice.rmax, choice.rmax).abs();
        let dj = at(data, n, choice.cmax, choice.cmax).abs();
        if di > dj {
            (choice.rmax, choice.cmax)
        } else if dj > di {
            (choice.cmax, choice.rmax)
        } else {
            (choice.rmax.min(choice.cmax), choice.rmax.max(choice.cmax))
        }
    } else {
        let partner = if k + 1 < n {
            choice
                .previous
                .expect("diagonal pivot carries a partner row")
        } else {
            k
        };
        (choice.rmax, partner)
    };

    piv[2 * k] = to_k;
    swap_sym(data, n, k, to_k);
    if k + 1 < n {
        // The first interchange may have displaced the partner.
        let s2 = if to_k1 == k { to_k } else { to_k1 };
        piv[2 * k + 1] = s2;
        swap_sym(data, n, k + 1, s2);
    } else {
        piv[2 * k + 1] = k;
    }
}

/// One step of symmetric elimination with pivot `d = a(k, k)`: stores the
/// multipliers over row `k` and updates the trailing Schur complement.
/// Returns the largest absolute value in the updated complement and the
/// largest multiplier magnitude.
fn eliminate_raw(data: &mut [f64], n: usize, k: usize) -> (f64, f64) {
    let row_start = pidx(k, k, n);
    let next_start = row_start + (n - k);
    let d = data[row_start];
    let (head, tail) = data.split_at_mut(next_start);
    let row_k = &mut head[row_start + 1..];
    let mut mmax = 0.0f64;
    for v in row_k.iter_mut() {
        *v /= d;
        mmax = mmax.max(v.abs());
    }
    let mult = &head[row_start + 1..];

    let mut smax = 0.0f64;
    let mut base = 0;
    for i in k + 1..n {
        let off = i - (k + 1);
        let coef = d * mult[off];
        let len = n - i;
        let dst = &mut tail[base..base + len];
        let src = &mult[off..];
        for (x, &l) in dst.iter_mut().zip(src) {
            *x -= coef * l;
            smax = smax.max(x.abs());
        }
        base += len;
    }
    (smax, mmax)
}

/// Factorizes `A = M L D L^t M^t` in place, consuming the input.
///
/// `tolerance` is the rank cutoff for pivot magnitudes; it defaults to
/// `n * eps * max|a_ij|` of the input. The factorization stops early with
/// `rank = k` when the step-`k` pivot search finds nothing above the
/// tolerance, zeroing the remaining packed region.
pub fn factorize(
    a: PackedSymMatrix,
    tolerance: Option<f64>,
) -> Result<(RotatedFactorization, GrowthTrace), Error> {
    let n = a.dim();
    let mut packed = a;
    if packed.as_slice().iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFiniteInput);
    }
    let max_initial = packed.max_abs();
    let tol = tolerance.unwrap_or(n as f64 * f64::EPSILON * max_initial);

    let mut piv = vec![0usize; 2 * n];
    for k in 0..n {
        piv[2 * k] = k;
        piv[2 * k + 1] = if k + 1 < n { k + 1 } else { k };
    }
    let mut tan = vec![0.0f64; n];
    let mut max_intermediate = max_initial;
    let mut max_multiplier = 0.0f64;
    let mut rank = n;

    {
        let data = packed.as_mut_slice();
        for k in 0..n {
            let choice = rook_search_raw(data, n, k, tol);
            if choice.deficient {
                rank = k;
                let cut = pidx(k, k, n);
                for v in &mut data[cut..] {
                    *v = 0.0;
                }
                break;
            }
            place_pivot(data, n, k, &choice, &mut piv);
            if k + 1 < n {
                let a12 = data[pidx(k, k + 1, n)];
                if a12 != 0.0 {
                    let t = compute_rotation(data[pidx(k, k, n)], a12, data[pidx(k + 1, k + 1, n)]);
                    if t != 0.0 {
                        let m = apply_rotation_raw(data, n, k, t);
                        max_intermediate = max_intermediate.max(m);
                    }
                    tan[k] = t;
                }
            }
            let (smax, mmax) = eliminate_raw(data, n, k);
            max_intermediate = max_intermediate.max(smax);
            max_multiplier = max_multiplier.max(mmax);
        }
    }

    let rho = if max_initial > 0.0 {
        max_intermediate / max_initial
    } else {
        1.0
    };
    Ok((
        RotatedFactorization {
            n,
            rank,
            packed,
            piv,
            tan,
        },
        GrowthTrace {
            max_initial,
            max_intermediate,
            rho,
            max_multiplier,
        },
    ))
}

/// Rebuilds the factored matrix: forms `L D L^t` and replays the rotations
/// and interchanges in reverse, producing `M (L D L^t) M^t`.
pub fn reconstruct(f: &RotatedFactorization) -> PackedSymMatrix {
    let n = f.n;
    let r = f.rank;
    let fd = f.packed.as_slice();
    let mut out = vec![0.0f64; n * (n + 1) / 2];
    for c in 0..r {
        let d = fd[pidx(c, c, n)];
        for i in c..n {
            let li = if i == c { 1.0 } else { fd[pidx(c, i, n)] };
            let fdi = d * li;
            for j in i..n {
                let lj = if j == c { 1.0 } else { fd[pidx(c, j, n)] };
                out[pidx(i, j, n)] += fdi * lj;
            }
        }
    }
    for k in (0..r).rev() {
        if k + 1 < n {
            let t = f.tan[k];
            if t != 0.0 {
                let (c, s) = cos_sin(t);
                rotate_sym_general(&mut out, n, k, c, -s);
            }
            swap_sym(&mut out, n, k + 1, f.piv[2 * k + 1]);
        }
        swap_sym(&mut out, n, k, f.piv[2 * k]);
    }
    PackedSymMatrix::from_packed(n, out)
}

/// Closed-form growth bound `2.8 * n^(3 ln(n) / 4)`.
pub fn growth_bound_analytic(n: usize) -> f64 {
    assert!(n >= 1);
    let nf = n as f64;
    2.8 * nf.powf(0.75 * nf.ln())
}

/// Tight growth bound `s_1 (1 + 2 s_2) ... (1 + 2 s_n)` where each `s_k`
/// solves `s (1 + 2s)^(k-1) = k^(k/2) / (k-1)^((k-1)/2)`, found by bisection
/// (the left-hand side is strictly increasing in `s > 0`).
pub fn growth_bound_tight(n: usize) -> f64 {
    assert!(n >= 1);
    let mut bound = 1.0; // s_1 = 1
    for k in 2..=n {
        let kf = k as f64;
        let km = kf - 1.0;
        let rhs = (0.5 * (kf * kf.ln() - km * km.ln())).exp();
        let pow = (k - 1) as i32;
        let eval = |s: f64| s * (1.0 + 2.0 * s).powi(pow);
        debug_assert!(eval(1.0) >= rhs, "bisection bracket must hold at s = 1");
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if eval(mid) < rhs {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        bound *= 1.0 + 2.0 * 0.5 * (lo + hi);
    }
    bound
}
