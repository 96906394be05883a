//! Random test-problem generators: Mersenne Twister uniforms, Box-Muller
//! Gaussians, Haar-distributed orthogonal matrices, and spectral
//! constructions with controlled condition number or rank.
//!
//! Everything is bit-exactly reproducible from the seed; the draw order of
//! each generator is fixed and documented on the function.

use crate::packed::{DenseMatrix, DenseVector, PackedSymMatrix};
use crate::xprec::XScalar;

const MT_N: usize = 624;
const MT_M: usize = 397;
const MATRIX_A: u32 = 0x9908_b0df;
const UPPER_MASK: u32 = 0x8000_0000;
const LOWER_MASK: u32 = 0x7fff_ffff;

/// The classic 32-bit MT19937 generator.
#[derive(Clone)]
pub struct Mt19937 {
    state: [u32; MT_N],
    index: usize,
    seed: u32,
    gauss_cache: Option<f64>,
}

impl Mt19937 {
    /// Standard seeding: `mt[0] = seed`, `mt[i] = 1812433253 (mt[i-1] ^
    /// (mt[i-1] >> 30)) + i`.
    pub fn new(seed: u32) -> Self {
        let mut state = [0u32; MT_N];
        state[0] = seed;
        for i in 1..MT_N {
            state[i] = 1_812_433_253u32
                .wrapping_mul(state[i - 1] ^ (state[i - 1] >> 30))
                .wrapping_add(i as u32);
        }
        Mt19937 {
            state,
            index: MT_N,
            seed,
            gauss_cache: None,
        }
    }

    /// The seed this generator was constructed with.
    pub fn seed(&self) -> u32 {
        self.seed
    }

    fn twist(&mut self) {
        for i in 0..MT_N {
            let y = (self.state[i] & UPPER_MASK) | (self.state[(i + 1) % MT_N] & LOWER_MASK);
            let mut next = self.state[(i + MT_M) % MT_N] ^ (y >> 1);
            if y & 1 != 0 {
                next ^= MATRIX_A;
            }
            self.state[i] = next;
        }
        self.index = 0;
    }

    pub fn next_u32(&mut self) -> u32 {
        if self.index >= MT_N {
            self.twist();
        }
        let mut y = self.state[self.index];
        self.index += 1;
        y ^= y >> 11;
        y ^= (y << 7) & 0x9d2c_5680;
        y ^= (y << 15) & 0xefc6_0000;
        y ^ (y >> 18)
    }

    /// Uniform in the open interval (0, 1): `(u32 + 0.5) / 2^32`.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u32() as f64 + 0.5) / 4_294_967_296.0
    }

    /// Uniform in (-1, 1); the exact endpoints are never produced.
    #[inline]
    pub fn next_uniform_pm1(&mut self) -> f64 {
        2.0 * self.next_f64() - 1.0
    }

    /// Random sign, one uniform draw.
    #[inline]
    fn next_sign(&mut self) -> f64 {
        if self.next_f64() < 0.5 {
            -1.0
        } else {
            1.0
        }
    }

    /// Standard Gaussian by the basic Box-Muller transform; the paired sine
    /// value is cached and returned by the next call.
    pub fn next_gaussian(&mut self) -> f64 {
        if let Some(z) = self.gauss_cache.take() {
            return z;
        }
        let mut u1 = self.next_f64();
        while u1 <= 0.0 {
            u1 = self.next_f64();
        }
        let u2 = self.next_f64();
        let (z1, z2) = box_muller(u1, u2);
        self.gauss_cache = Some(z2);
        z1
    }

    /// Standard Gaussian truncated to [-1, 1] by resampling.
    pub fn next_gaussian_in_unit(&mut self) -> f64 {
        loop {
            let g = self.next_gaussian();
            if g.abs() <= 1.0 {
                return g;
            }
        }
    }
}

/// Basic Box-Muller transform: returns the cosine and sine deviates
/// `sqrt(-2 ln u1) * (cos, sin)(2 pi u2)`.
#[inline]
pub fn box_muller(u1: f64, u2: f64) -> (f64, f64) {
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    (r * theta.cos(), r * theta.sin())
}

/// Symmetric matrix with i.i.d. uniform (-1, 1) entries on the upper
/// triangle, drawn in packed row-major order.
pub fn uniform_sym(rng: &mut Mt19937, n: usize) -> PackedSymMatrix {
    let data = (0..n * (n + 1) / 2)
        .map(|_| rng.next_uniform_pm1())
        .collect();
    PackedSymMatrix::from_packed(n, data)
}

/// Vector with i.i.d. uniform (-1, 1) entries.
pub fn uniform_vector(rng: &mut Mt19937, n: usize) -> DenseVector {
    (0..n).map(|_| rng.next_uniform_pm1()).collect()
}

/// Haar-distributed random orthogonal matrix by the Stewart construction:
/// successive Householder reflectors of Gaussian vectors (sizes 2..=n,
/// applied largest last) composed onto a random sign diagonal.
///
/// Draw order: `n` sign draws, then for `k = n-2, ..., 0` one Gaussian
/// vector of length `n - k`.
pub fn stewart_orthogonal(rng: &mut Mt19937, n: usize) -> DenseMatrix {
    let mut u = DenseMatrix::zeros(n);
    for i in 0..n {
        let s = rng.next_sign();
        u.set(i, i, s);
    }
    if n < 2 {
        return u;
    }
    let mut v = vec![0.0f64; n];
    for k in (0..n - 1).rev() {
        let m = n - k;
        loop {
            for item in v.iter_mut().take(m) {
                *item = rng.next_gaussian();
            }
            let norm: f64 = v[..m].iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 0.0 {
                // v <- x + sign(x0) ||x|| e1 makes the reflector map x onto
                // the first coordinate without cancellation.
                v[0] += v[0].signum() * norm;
                break;
            }
        }
        let vtv: f64 = v[..m].iter().map(|x| x * x).sum();
        let beta = 2.0 / vtv;
        // U <- H U on rows k..n.
        for col in 0..n {
            let mut w = 0.0;
            for (i, vi) in v[..m].iter().enumerate() {
                w += vi * u.get(k + i, col);
            }
            let bw = beta * w;
            for (i, vi) in v[..m].iter().enumerate() {
                let cur = u.get(k + i, col);
                u.set(k + i, col, cur - bw * vi);
            }
        }
    }
    u
}

/// A generated symmetric test problem with its exact solution.
#[derive(Clone, Debug)]
pub struct GeneratedProblem {
    pub a: PackedSymMatrix,
    /// Exact (possibly pseudoinverse) solution of `A x = b`.
    pub x_exact: DenseVector,
    pub b: DenseVector,
    /// Intended rank.
    pub rank: usize,
    /// Intended condition number (ratio of extreme nonzero eigenvalue
    /// magnitudes).
    pub cond: f64,
}

/// Assembles `A = U diag(d) U^t`, `b = U z` and `x = U pinv(diag(d)) z` in
/// extended precision, rounding to working precision on output.
fn assemble_spectral(
    u: &DenseMatrix,
    d: &[f64],
    z: &[f64],
) -> (PackedSymMatrix, DenseVector, DenseVector) {
    let n = u.dim();
    let mut a = PackedSymMatrix::zeros(n);
    for i in 0..n {
        let ui = u.row(i);
        for j in i..n {
            let uj = u.row(j);
            let mut acc = XScalar::ZERO;
            for k in 0..n {
                if d[k] != 0.0 {
                    acc = acc + XScalar::from_prod(ui[k], uj[k]).scale(d[k]);
                }
            }
            a.set(i, j, acc.to_f64());
        }
    }
    let mut b = vec![0.0f64; n];
    let mut x = vec![0.0f64; n];
    for i in 0..n {
        let ui = u.row(i);
        let mut bacc = XScalar::ZERO;
        let mut xacc = XScalar::ZERO;
        for k in 0..n {
            bacc = bacc + XScalar::from_prod(ui[k], z[k]);
            if d[k] != 0.0 {
                xacc = xacc + (XScalar::from(z[k]) / XScalar::from(d[k])).scale(ui[k]);
            }
        }
        b[i] = bacc.to_f64();
        x[i] = xacc.to_f64();
    }
    (a, b, x)
}

/// Full-rank spectral problem with controlled condition number.
///
/// `A = U D U^t` with `U` from [`stewart_orthogonal`]; the diagonal
/// magnitudes are uniform in `[1/cond, 1]` with the extremes pinned exactly
/// (`|d_0| = 1`, `|d_1| = 1/cond`), each with a random sign. The uniform
/// law keeps `E[d^2]` (and with it the Frobenius norm and reconstruction
/// error) essentially independent of the condition number. `z` is standard
/// Gaussian, `b = U z`, `x = U D^{-1} z`; the assembly runs in extended
/// precision. Draw order: `U`, then per entry of `d` (magnitude if i >= 2,
/// then sign), then `z`.
pub fn spectral_conditioned(rng: &mut Mt19937, n: usize, cond: f64) -> GeneratedProblem {
    assert!(cond >= 1.0, "condition number must be at least 1");
    assert!(n >= 2 || cond == 1.0, "n = 1 admits only cond = 1");
    let u = stewart_orthogonal(rng, n);
    let lo = 1.0 / cond;
    let mut d = vec![0.0f64; n];
    for (i, di) in d.iter_mut().enumerate() {
        let mag = match i {
            0 => 1.0,
            1 => lo,
            _ => lo + (1.0 - lo) * rng.next_f64(),
        };
        *di = mag * rng.next_sign();
    }
    let z: Vec<f64> = (0..n).map(|_| rng.next_gaussian()).collect();
    let (a, b, x_exact) = assemble_spectral(&u, &d, &z);
    GeneratedProblem {
        a,
        x_exact,
        b,
        rank: n,
        cond,
    }
}

/// Rank-controlled spectral problem: exactly `r` nonzero eigenvalues drawn
/// as Gaussians truncated to [-1, 1], the rest exactly zero.
///
/// `b = U z` and `x = U D^+ z` is the minimum-norm least-squares solution.
/// Draw order: `U`, then the `r` nonzero diagonal entries, then `z`.
pub fn spectral_rank_deficient(rng: &mut Mt19937, n: usize, r: usize) -> GeneratedProblem {
    assert!(r <= n, "rank cannot exceed dimension");
    let u = stewart_orthogonal(rng, n);
    let mut d = vec![0.0f64; n];
    for di in d.iter_mut().take(r) {
        let mut g = rng.next_gaussian_in_unit();
        while g == 0.0 {
            g = rng.next_gaussian_in_unit();
        }
        *di = g;
    }
    let z: Vec<f64> = (0..n).map(|_| rng.next_gaussian()).collect();
    let (a, b, x_exact) = assemble_spectral(&u, &d, &z);
    let cond = if r == 0 {
        1.0
    } else {
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        for &v in &d[..r] {
            lo = lo.min(v.abs());
            hi = hi.max(v.abs());
        }
        hi / lo
    };
    GeneratedProblem {
        a,
        x_exact,
        b,
        rank: r,
        cond,
    }
}
