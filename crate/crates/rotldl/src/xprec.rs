//! Double-double arithmetic and the extended-precision oracles built on it.
//!
//! A value is the unevaluated sum of two doubles (`hi + lo`), giving about
//! 32 significant decimal digits. That is enough headroom over working
//! precision to make reconstruction-error measurements noise-free at the
//! 1e-14 scale, which is what the benchmark harness needs.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::bunch_kaufman::BkFactorization;
use crate::factor::RotatedFactorization;
use crate::packed::{pidx, PackedSymMatrix};

/// `fl(a + b)` together with the exact rounding error (Knuth two-sum).
#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

/// Two-sum shortcut valid when `|a| >= |b|`.
#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

/// Dekker splitting into two 26-bit halves.
#[inline]
fn split(a: f64) -> (f64, f64) {
    const C: f64 = 134_217_729.0; // 2^27 + 1
    let t = C * a;
    let hi = t - (t - a);
    (hi, a - hi)
}

/// `fl(a * b)` together with the exact rounding error.
#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let (ahi, alo) = split(a);
    let (bhi, blo) = split(b);
    let err = ((ahi * bhi - p) + ahi * blo + alo * bhi) + alo * blo;
    (p, err)
}

/// Extended-precision scalar: the unevaluated sum `hi + lo` with
/// `hi = fl(hi + lo)`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct XScalar {
    pub hi: f64,
    pub lo: f64,
}

impl XScalar {
    pub const ZERO: XScalar = XScalar { hi: 0.0, lo: 0.0 };
    pub const ONE: XScalar = XScalar { hi: 1.0, lo: 0.0 };

    #[inline]
    pub fn new(hi: f64, lo: f64) -> Self {
        let (h, l) = quick_two_sum(hi, lo);
        XScalar { hi: h, lo: l }
    }

    /// Exact product of two doubles.
    #[inline]
    pub fn from_prod(a: f64, b: f64) -> Self {
        let (p, e) = two_prod(a, b);
        XScalar { hi: p, lo: e }
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi
    }

    #[inline]
    pub fn abs(self) -> Self {
        if self.hi < 0.0 || (self.hi == 0.0 && self.lo < 0.0) {
            -self
        } else {
            self
        }
    }

    /// Scale by a plain double.
    #[inline]
    pub fn scale(self, b: f64) -> Self {
        let (p, mut e) = two_prod(self.hi, b);
        e += self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        XScalar { hi, lo }
    }

    /// Square root by Newton refinement of the working-precision root.
    pub fn sqrt(self) -> Self {
        if self.hi == 0.0 {
            return XScalar::ZERO;
        }
        assert!(self.hi > 0.0, "sqrt of a negative extended scalar");
        let x = 1.0 / self.hi.sqrt();
        let ax = self.hi * x;
        let ax2 = XScalar::from_prod(ax, ax);
        let err = (self - ax2).hi * (x * 0.5);
        let (hi, lo) = quick_two_sum(ax, err);
        XScalar { hi, lo }
    }
}

impl From<f64> for XScalar {
    #[inline]
    fn from(v: f64) -> Self {
        XScalar { hi: v, lo: 0.0 }
    }
}

impl Neg for XScalar {
    type Output = XScalar;
    #[inline]
    fn neg(self) -> XScalar {
        XScalar {
            hi: -self.hi,
            lo: -self.lo,
        }
    }
}

impl Add for XScalar {
    type Output = XScalar;
    #[inline]
    fn add(self, rhs: XScalar) -> XScalar {
        let (s, e) = two_sum(self.hi, rhs.hi);
        let (t, f) = two_sum(self.lo, rhs.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        XScalar { hi, lo }
    }
}

impl Sub for XScalar {
    type Output = XScalar;
    #[inline]
    fn sub(self, rhs: XScalar) -> XScalar {
        self + (-rhs)
    }
}

impl Mul for XScalar {
    type Output = XScalar;
    #[inline]
    fn mul(self, rhs: XScalar) -> XScalar {
        let (p, mut e) = two_prod(self.hi, rhs.hi);
        e += self.hi * rhs.lo + self.lo * rhs.hi;
        let (hi, lo) = quick_two_sum(p, e);
        XScalar { hi, lo }
    }
}

impl Div for XScalar {
    type Output = XScalar;
    fn div(self, rhs: XScalar) -> XScalar {
        let q1 = self.hi / rhs.hi;
        let r = self - rhs.scale(q1);
        let q2 = r.hi / rhs.hi;
        let r = r - rhs.scale(q2);
        let q3 = r.hi / rhs.hi;
        let (s, e) = quick_two_sum(q1, q2);
        let (hi, lo) = quick_two_sum(s, e + q3);
        XScalar { hi, lo }
    }
}

/// Extended-precision sum in spec terms.
#[inline]
pub fn x_add(a: XScalar, b: XScalar) -> XScalar {
    a + b
}

/// Extended-precision product in spec terms.
#[inline]
pub fn x_mul(a: XScalar, b: XScalar) -> XScalar {
    a * b
}

/// `A x` accumulated in extended precision, rounded on output.
pub fn xp_matvec(a: &PackedSymMatrix, x: &[f64]) -> Vec<f64> {
    let n = a.dim();
    assert_eq!(x.len(), n, "vector length must match matrix dimension");
    let mut acc = vec![XScalar::ZERO; n];
    for i in 0..n {
        for j in 0..n {
            acc[i] = acc[i] + XScalar::from_prod(a.get(i, j), x[j]);
        }
    }
    acc.into_iter().map(XScalar::to_f64).collect()
}

fn xp_swap_sym(data: &mut [XScalar], n: usize, p: usize, q: usize) {
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
}

/// Rotation cosine/sine from a stored tangent, in extended precision.
fn xp_cos_sin(t: f64) -> (XScalar, XScalar) {
    let one = XScalar::ONE;
    if t.abs() <= 1.0 {
        let tt = XScalar::from_prod(t, t);
        let c = one / (one + tt).sqrt();
        (c, c.scale(t))
    } else {
        let u = one / XScalar::from(t);
        let s_mag = one / (one + u * u).sqrt();
        let s = if t < 0.0 { -s_mag } else { s_mag };
        (s * u, s)
    }
}

/// `W <- R W R^t` on coordinates `(k, k+1)` in extended precision, with
/// `R = [[c, -s], [s, c]]`.
fn xp_rotate_sym(data: &mut [XScalar], n: usize, k: usize, c: XScalar, s: XScalar) {
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
    let two = XScalar::from(2.0);
    data[dkk] = cc * a11 - two * cs * a12 + ss * a22;
    data[dk1] = ss * a11 + two * cs * a12 + cc * a22;
    data[dko] = cs * (a11 - a22) + (cc - ss) * a12;
}

/// Frobenius norm of `S - A` with `S` in extended precision; off-diagonal
/// entries count twice.
fn xp_frobenius_diff(s: &[XScalar], a: &PackedSymMatrix) -> f64 {
    let n = a.dim();
    let ad = a.as_slice();
    let mut sum = XScalar::ZERO;
    let mut pos = 0;
    for i in 0..n {
        for k in 0..n - i {
            let d = s[pos + k] - XScalar::from(ad[pos + k]);
            let sq = d * d;
            sum = sum + if k == 0 { sq } else { sq + sq };
        }
        pos += n - i;
    }
    sum.sqrt().to_f64()
}

/// `||A - M L D L^t M^t||_F` with the reconstruction replayed entirely in
/// extended precision.
pub fn xp_reconstruct_error(a: &PackedSymMatrix, f: &RotatedFactorization) -> f64 {
    let n = f.dim();
    assert_eq!(a.dim(), n, "dimension mismatch");
    let r = f.rank();
    let fd = f.packed().as_slice();
    let mut s = vec![XScalar::ZERO; n * (n + 1) / 2];
    for c in 0..r {
        let d = fd[pidx(c, c, n)];
        for i in c..n {
            let li = if i == c { 1.0 } else { fd[pidx(c, i, n)] };
            for j in i..n {
                let lj = if j == c { 1.0 } else { fd[pidx(c, j, n)] };
                s[pidx(i, j, n)] = s[pidx(i, j, n)] + XScalar::from_prod(li, lj).scale(d);
            }
        }
    }
    let piv = f.pivots();
    let tan = f.tangents();
    for k in (0..r).rev() {
        if k + 1 < n {
            let t = tan[k];
            if t != 0.0 {
                let (c, sn) = xp_cos_sin(t);
                xp_rotate_sym(&mut s, n, k, c, -sn);
            }
            xp_swap_sym(&mut s, n, k + 1, piv[2 * k + 1]);
        }
        xp_swap_sym(&mut s, n, k, piv[2 * k]);
    }
    xp_frobenius_diff(&s, a)
}

/// `||A - P L D L^t P^t||_F` for the Bunch-Kaufman baseline, replayed in
/// extended precision.
pub fn xp_reconstruct_error_bk(a: &PackedSymMatrix, f: &BkFactorization) -> f64 {
    let n = f.dim();
    assert_eq!(a.dim(), n, "dimension mismatch");
    let fd = f.packed().as_slice();
    let at = |i: usize, j: usize| fd[pidx(i, j, n)];
    let mut s = vec![XScalar::ZERO; n * (n + 1) / 2];

    let blocks = f.block_starts();
    for &(c, two) in &blocks {
        if two {
            let e11 = at(c, c);
            let e12 = at(c, c + 1);
            let e22 = at(c + 1, c + 1);
            for i in c..n {
                let lic = if i == c {
                    1.0
                } else if i == c + 1 {
                    0.0
                } else {
                    at(i, c)
                };
                let lic1 = if i == c + 1 {
                    1.0
                } else if i <= c {
                    0.0
                } else {
                    at(i, c + 1)
                };
                let u = XScalar::from_prod(lic, e11) + XScalar::from_prod(lic1, e12);
                let v = XScalar::from_prod(lic, e12) + XScalar::from_prod(lic1, e22);
                for j in i..n {
                    let ljc = if j == c {
                        1.0
                    } else if j == c + 1 {
                        0.0
                    } else {
                        at(j, c)
                    };
                    let ljc1 = if j == c + 1 {
                        1.0
                    } else if j <= c {
                        0.0
                    } else {
                        at(j, c + 1)
                    };
                    s[pidx(i, j, n)] = s[pidx(i, j, n)] + u.scale(ljc) + v.scale(ljc1);
                }
            }
        } else {
            let d = at(c, c);
            for i in c..n {
                let li = if i == c { 1.0 } else { at(i, c) };
                for j in i..n {
                    let lj = if j == c { 1.0 } else { at(j, c) };
                    s[pidx(i, j, n)] = s[pidx(i, j, n)] + XScalar::from_prod(li, lj).scale(d);
                }
            }
        }
    }
    for &(start, two) in blocks.iter().rev() {
        if two {
            xp_swap_sym(&mut s, n, start + 1, f.swap_target(start));
        } else {
            xp_swap_sym(&mut s, n, start, f.swap_target(start));
        }
    }
    xp_frobenius_diff(&s, a)
}
