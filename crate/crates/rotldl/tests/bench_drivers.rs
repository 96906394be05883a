//! Behavior of the experiment drivers beyond determinism: edge conditions
//! and anchor values of the emitted statistics.

use rotldl::experiments::{cond_bench, factor_bench, lsq_bench, BenchConfig};
use rotldl::stats::Method;

fn cfg(trials: usize, seed: u32, timing: bool) -> BenchConfig {
    BenchConfig {
        trials,
        seed,
        parallel: false,
        timing,
        tolerance: None,
    }
}

#[test]
fn perfectly_conditioned_problems_solve_to_roundoff() {
    // cond = 1 pins every eigenvalue magnitude at 1; the solution error is
    // pure roundoff.
    let rows = cond_bench(20, &[1.0], &[Method::RotatedRook], &cfg(25, 11, false)).unwrap();
    let sol = rows
        .iter()
        .find(|r| r.metric == "solution_err")
        .expect("solution_err row");
    assert!(
        sol.mean <= 1e-13,
        "mean solution error {:e} at cond 1",
        sol.mean
    );
}

#[test]
fn conditioned_reconstruction_error_near_its_anchor() {
    // The n = 100 reconstruction error on conditioned spectral problems
    // sits near 3.5e-15 regardless of cond; assert a factor-2 band around
    // 3.471e-15 at cond 1e2.
    let rows = cond_bench(100, &[1e2], &[Method::RotatedRook], &cfg(200, 33, false)).unwrap();
    let recon = rows
        .iter()
        .find(|r| r.metric == "recon_err")
        .expect("recon_err row");
    assert!(
        (1.7355e-15..=6.942e-15).contains(&recon.mean),
        "mean reconstruction error {:e} outside the factor-2 band around 3.471e-15",
        recon.mean
    );
}

#[test]
fn lsq_bench_timing_grows_with_size() {
    let sizes = [10usize, 40, 80];
    let rows = lsq_bench(&sizes, None, &cfg(30, 5, true)).unwrap();
    let times: Vec<f64> = sizes
        .iter()
        .map(|&n| {
            rows.iter()
                .find(|r| r.n == n && r.metric == "wall_time")
                .expect("wall_time row")
                .mean
        })
        .collect();
    assert!(
        times[0] < times[1] && times[1] < times[2],
        "wall times not increasing: {times:?}"
    );
}

#[test]
fn timing_rows_are_present_only_when_requested() {
    let with = factor_bench(&[8], &[Method::RotatedRook], &cfg(3, 2, true)).unwrap();
    assert!(with.iter().any(|r| r.metric == "wall_time"));
    let without = factor_bench(&[8], &[Method::RotatedRook], &cfg(3, 2, false)).unwrap();
    assert!(without.iter().all(|r| r.metric != "wall_time"));
}

#[test]
fn summary_rows_carry_problem_parameters() {
    let rows = cond_bench(
        12,
        &[1e2, 1e4],
        &[Method::RotatedRook, Method::BunchKaufman],
        &cfg(4, 8, false),
    )
    .unwrap();
    for r in &rows {
        assert_eq!(r.n, 12);
        assert_eq!(r.rank, 12);
        assert!(r.cond == Some(1e2) || r.cond == Some(1e4));
        assert_eq!(r.trials, 4);
    }
    // Both condition numbers and both methods appear.
    for c in [1e2, 1e4] {
        for m in [Method::RotatedRook, Method::BunchKaufman] {
            assert!(rows.iter().any(|r| r.cond == Some(c) && r.method == m));
        }
    }
}
