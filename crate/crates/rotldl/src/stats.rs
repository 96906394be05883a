//! Per-trial records, streaming summary statistics, and the CSV schema of
//! the benchmark harness.

use std::io::{self, Write};

/// Factorization method under test.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    RotatedRook,
    BunchKaufman,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::RotatedRook => "rotated_rook",
            Method::BunchKaufman => "bunch_kaufman",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rotated_rook" | "rotated-rook" | "rr" => Ok(Method::RotatedRook),
            "bunch_kaufman" | "bunch-kaufman" | "bk" => Ok(Method::BunchKaufman),
            other => Err(format!("unknown method \"{other}\"")),
        }
    }
}

/// Everything measured on one generated problem.
#[derive(Clone, Debug)]
pub struct TrialReport {
    pub method: Method,
    pub n: usize,
    /// Intended condition number, when the generator controls one.
    pub cond: Option<f64>,
    /// Intended (or detected, for the determinate benches) rank.
    pub rank: usize,
    /// Extended-precision reconstruction error, Frobenius.
    pub recon_err: f64,
    /// Relative solution error `||x - x_hat|| / ||x||`, when an exact
    /// solution is known.
    pub solution_err: Option<f64>,
    /// Squared absolute solution error `||x - x_hat||^2`, the convention
    /// the reference solution-error tables print.
    pub solution_err_sq: Option<f64>,
    /// Growth factor of the factorization (rotated Rook only).
    pub growth_rho: Option<f64>,
    /// Seconds spent factorizing and solving, generation excluded.
    pub wall_time: f64,
}

/// Numerically stable streaming mean and standard deviation (Welford).
#[derive(Clone, Copy, Debug, Default)]
pub struct RunningStat {
    count: usize,
    mean: f64,
    m2: f64,
}

impl RunningStat {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let delta = x - self.mean;
        self.mean += delta / self.count as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample standard deviation; zero for fewer than two observations.
    pub fn std_dev(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).sqrt()
        }
    }
}

/// One row of the summary CSV: a (method, problem, metric) aggregate.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryRow {
    pub method: Method,
    pub n: usize,
    pub cond: Option<f64>,
    pub rank: usize,
    pub metric: &'static str,
    pub mean: f64,
    pub std_dev: f64,
    pub trials: usize,
}

/// Writes the summary schema: `method,n,cond,rank,metric,mean,std,trials`.
/// Floats use the shortest round-trip exponential form, so output bytes are
/// reproducible; an absent condition number is an empty field.
pub fn write_csv<W: Write>(mut w: W, rows: &[SummaryRow]) -> io::Result<()> {
    writeln!(w, "method,n,cond,rank,metric,mean,std,trials")?;
    for row in rows {
        let cond = row.cond.map(|c| format!("{c:e}")).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{},{},{:e},{:e},{}",
            row.method.as_str(),
            row.n,
            cond,
            row.rank,
            row.metric,
            row.mean,
            row.std_dev,
            row.trials
        )?;
    }
    Ok(())
}
