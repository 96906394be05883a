//! Symmetric indefinite linear algebra built around a rotated-Rook LDL^t
//! factorization.
//!
//! The factorization combines symmetric row/column interchanges (a Rook-style
//! pivot search adapted to symmetry) with Jacobi plane rotations that zero the
//! (k, k+1) entry and inflate the pivot at every elimination step. The result
//! is an in-place `A = M L D L^t M^t` decomposition whose element growth is
//! provably subexponential, plus — at marginal extra cost — the fundamental
//! basis of the null space and minimum-norm minimal-least-squares solutions
//! for rank-deficient systems.
//!
//! The crate also ships the pieces needed to benchmark the method the way the
//! accompanying experiments do: a Bunch-Kaufman baseline, Mersenne-Twister
//! driven problem generators with controlled condition number and rank,
//! double-double reconstruction-error oracles, and the experiment drivers
//! behind the `rotldl` command-line tool.
//!
//! ```
//! use rotldl::{compute_null_basis, factorize, PackedSymMatrix};
//!
//! // A rank-one system: the solver returns the pseudoinverse solution.
//! let a = PackedSymMatrix::from_rows(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
//! let (f, growth) = factorize(a, None).unwrap();
//! assert_eq!(f.rank(), 1);
//! assert!(growth.rho >= 1.0);
//!
//! let nb = compute_null_basis(f);
//! let report = nb.solve_min_norm(&[1.0, 0.0]).unwrap();
//! assert!((report.x[0] - 0.25).abs() < 1e-15);
//! assert!((report.x[1] - 0.25).abs() < 1e-15);
//! ```

// Matrix kernels read clearest with explicit index loops.
#![allow(clippy::needless_range_loop)]

pub mod bunch_kaufman;
pub mod experiments;
pub mod factor;
pub mod matrix_market;
pub mod packed;
pub mod randmat;
pub mod solve;
pub mod stats;
pub mod xprec;

pub use bunch_kaufman::{bk_factorize, bk_reconstruct, bk_solve, BkFactorization};
pub use experiments::{cond_bench, factor_bench, growth_check, lsq_bench, BenchConfig};
pub use factor::{
    compute_rotation, factorize, growth_bound_analytic, growth_bound_tight, reconstruct,
    rook_pivot_search, GrowthTrace, PivotChoice, RotatedFactorization,
};
pub use packed::{
    frobenius_diff, packed_index, sym_matvec, DenseMatrix, DenseVector, PackedSymMatrix,
};
pub use randmat::{
    box_muller, spectral_conditioned, spectral_rank_deficient, stewart_orthogonal, uniform_sym,
    uniform_vector, GeneratedProblem, Mt19937,
};
pub use solve::{compute_null_basis, spd_solve, Branch, NullAugmentedFactorization, SolveReport};
pub use stats::{write_csv, Method, RunningStat, SummaryRow, TrialReport};
pub use xprec::{xp_matvec, xp_reconstruct_error, xp_reconstruct_error_bk, XScalar};

/// Errors reported by the factorizations and solvers.
///
/// Dimension and index misuse panics instead; these variants cover conditions
/// that depend on the numerical content of the data.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Error {
    /// The input matrix contains a NaN or infinite entry.
    NonFiniteInput,
    /// A pivot block of the Bunch-Kaufman factorization is exactly singular.
    Singular,
    /// A Cholesky pivot was not positive; the matrix handed to `spd_solve`
    /// was not positive definite.
    NotPositiveDefinite,
}

impl std::fmt::Display for Error {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Error::NonFiniteInput => write!(f, "matrix has non-finite entries"),
            Error::Singular => write!(f, "matrix is exactly singular"),
            Error::NotPositiveDefinite => write!(f, "matrix is not positive definite"),
        }
    }
}

impl std::error::Error for Error {}
