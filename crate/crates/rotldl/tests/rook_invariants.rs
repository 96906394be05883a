//! Brute-force validation of the Rook pivot search postconditions and a
//! kitchen-sink fuzz of the whole factorize/solve pipeline on small
//! matrices with awkward structure.

mod common;

use common::{pinv_solve, rel_diff};
use rotldl::{
    compute_null_basis, factorize, frobenius_diff, reconstruct, rook_pivot_search, sym_matvec,
    Mt19937, PackedSymMatrix,
};

/// Exhaustive check of the search contract on one active submatrix.
fn check_rook_postcondition(a: &PackedSymMatrix, k: usize, tol: f64) {
    let n = a.dim();
    let c = rook_pivot_search(a, k, tol);
    let active_max = {
        let mut m = 0.0f64;
        for i in k..n {
            for j in i..n {
                m = m.max(a.get(i, j).abs());
            }
        }
        m
    };
    if c.deficient {
        assert!(
            active_max < tol || active_max == 0.0,
            "search reported deficiency but the active max is {active_max:e}"
        );
        return;
    }
    assert_eq!(c.max, a.get(c.rmax, c.cmax).abs());
    assert!(c.max >= tol || c.max == active_max);
    // Maximal over its whole row and column of the active submatrix.
    for j in k..n {
        assert!(
            a.get(c.rmax, j).abs() <= c.max,
            "row {} holds {} > pivot {}",
            c.rmax,
            a.get(c.rmax, j).abs(),
            c.max
        );
        assert!(
            a.get(j, c.cmax).abs() <= c.max,
            "column {} holds {} > pivot {}",
            c.cmax,
            a.get(j, c.cmax).abs(),
            c.max
        );
    }
    if c.rmax == c.cmax {
        if k + 1 < n {
            let p = c.previous.expect("diagonal pivot carries a partner");
            assert!(p >= k && p < n && p != c.rmax);
            for j in k..n {
                assert!(
                    a.get(p, j).abs() <= c.max,
                    "partner row {p} holds {} > pivot {}",
                    a.get(p, j).abs(),
                    c.max
                );
            }
        }
    } else {
        assert!(c.previous.is_none());
    }
}

fn random_matrix(rng: &mut Mt19937, n: usize, style: u32) -> PackedSymMatrix {
    let mut a = PackedSymMatrix::zeros(n);
    for i in 0..n {
        for j in i..n {
            let v = match style % 5 {
                // Dense uniform.
                0 => rng.next_uniform_pm1(),
                // Sparse with exact zeros.
                1 => {
                    if rng.next_f64() < 0.6 {
                        0.0
                    } else {
                        rng.next_uniform_pm1()
                    }
                }
                // Heavy ties: entries from {-1, 0, 1}.
                2 => (rng.next_u32() % 3) as f64 - 1.0,
                // Wild scales.
                3 => rng.next_uniform_pm1() * (2.0f64).powi((rng.next_u32() % 61) as i32 - 30),
                // Zero diagonal.
                _ => {
                    if i == j {
                        0.0
                    } else {
                        rng.next_uniform_pm1()
                    }
                }
            };
            a.set(i, j, v);
        }
    }
    a
}

#[test]
fn rook_search_postconditions_hold_everywhere() {
    let mut rng = Mt19937::new(24_601);
    for trial in 0..3000u32 {
        let n = 1 + (rng.next_u32() % 8) as usize;
        let a = random_matrix(&mut rng, n, trial);
        let tol = if trial % 3 == 0 { 0.0 } else { 1e-12 };
        for k in 0..n {
            check_rook_postcondition(&a, k, tol);
        }
    }
}

#[test]
fn factorize_pipeline_fuzz() {
    let mut rng = Mt19937::new(13_579);
    for trial in 0..2000u32 {
        let n = 1 + (rng.next_u32() % 7) as usize;
        let a = random_matrix(&mut rng, n, trial);
        let scale = a.max_abs();
        let (f, trace) = factorize(a.clone(), None).unwrap();

        // Round trip.
        let back = reconstruct(&f);
        let tol = 1e-12 * a.frobenius_norm().max(scale).max(1e-300);
        assert!(
            frobenius_diff(&a, &back) <= tol.max(1e-280),
            "round trip failed at trial {trial} (n = {n})"
        );
        assert!(trace.rho >= 1.0 || scale == 0.0);

        // Factor invariants.
        for k in 0..f.rank() {
            assert!(f.d(k) != 0.0);
        }
        for k in f.rank()..n {
            assert_eq!(f.d(k), 0.0);
        }
        assert!(f.tangents().iter().all(|t| t.is_finite()));
        for (k, chunk) in f.pivots().chunks(2).enumerate() {
            assert!(chunk[0] >= k && chunk[0] < n);
            assert!(chunk[1] >= k && chunk[1] < n);
        }

        // Minimum-norm solve against the eigendecomposition oracle (skip
        // the wild-scale style where the oracle's fixed rank threshold and
        // the factorization's can legitimately classify borderline
        // eigenvalues differently).
        if trial % 5 != 3 {
            let b: Vec<f64> = (0..n).map(|_| rng.next_uniform_pm1()).collect();
            let rank_tol = n as f64 * f64::EPSILON * scale;
            let nb = compute_null_basis(f);
            let rep = nb.solve_min_norm(&b).unwrap();
            let oracle = pinv_solve(&a, &b, rank_tol.max(1e-14 * scale));
            let d = rel_diff(&rep.x, &oracle);
            assert!(
                d <= 1e-7,
                "solve/oracle mismatch {d:e} at trial {trial} (n = {n}, rank {})",
                rep.rank
            );
            // The reported residual matches a directly computed one.
            let ax = sym_matvec(&a, &rep.x);
            let direct: f64 = b
                .iter()
                .zip(&ax)
                .map(|(bi, ai)| (bi - ai) * (bi - ai))
                .sum::<f64>()
                .sqrt();
            assert!(
                (rep.residual_norm - direct).abs() <= 1e-10 * direct.max(scale).max(1e-300),
                "residual report {:e} vs direct {direct:e} at trial {trial}",
                rep.residual_norm
            );
        }
    }
}
