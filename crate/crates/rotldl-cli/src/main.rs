//! Benchmark and solver command line for the rotated-Rook LDL^t library.
//!
//! Exit codes: 0 success, 1 usage error, 2 I/O or parse error, 3 numerical
//! failure.

use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use rotldl::experiments::{cond_bench, factor_bench, growth_check, lsq_bench, BenchConfig};
use rotldl::matrix_market::{read_sym_matrix_market, MmError};
use rotldl::stats::{write_csv, Method, SummaryRow};
use rotldl::{compute_null_basis, factorize};

#[derive(Parser)]
#[command(
    name = "rotldl",
    version,
    about = "Rotated-Rook LDL^t factorization benchmarks and solver",
    after_help = "Exit codes: 0 success, 1 usage, 2 I/O or parse error, 3 numerical failure."
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Reconstruction error, solution error, growth and timing on uniform
    /// random symmetric systems (determinate compatible problems).
    FactorBench(FactorBenchArgs),
    /// The same metrics on spectral problems with controlled condition
    /// number at a fixed dimension.
    CondBench(CondBenchArgs),
    /// Minimum-norm least-squares metrics on rank-deficient spectral
    /// problems (rank n/2 unless overridden).
    LsqBench(LsqBenchArgs),
    /// Observed growth factors against the analytic bound.
    GrowthCheck(GrowthCheckArgs),
    /// Factorize a Matrix Market file and solve one right-hand side.
    Solve(SolveArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Trials per configuration; trial t draws from seed + t.
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    /// Base seed for the Mersenne Twister.
    #[arg(long, default_value_t = 1)]
    seed: u32,
    /// Run trials on a thread pool; aggregated output is identical to a
    /// serial run.
    #[arg(long)]
    parallel: bool,
    /// Omit wall-time rows so the output is byte-reproducible.
    #[arg(long)]
    no_timing: bool,
    /// Rank tolerance override for the rotated-Rook factorization
    /// (default: n * eps * max|a_ij|).
    #[arg(long)]
    tolerance: Option<f64>,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl CommonArgs {
    fn config(&self) -> BenchConfig {
        BenchConfig {
            trials: self.trials,
            seed: self.seed,
            parallel: self.parallel,
            timing: !self.no_timing,
            tolerance: self.tolerance,
        }
    }
}

#[derive(Args)]
struct FactorBenchArgs {
    /// Matrix sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [10usize, 50, 100])]
    sizes: Vec<usize>,
    /// Append the large sizes 500 and 1000.
    #[arg(long)]
    large: bool,
    /// Methods to run.
    #[arg(long, value_delimiter = ',', default_values_t = [Method::RotatedRook, Method::BunchKaufman], value_parser = parse_method)]
    methods: Vec<Method>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CondBenchArgs {
    /// Matrix dimension.
    #[arg(long, default_value_t = 100)]
    n: usize,
    /// Condition numbers.
    #[arg(long = "cond", value_delimiter = ',', default_values_t = [1e2, 1e4, 1e6])]
    conds: Vec<f64>,
    /// Methods to run.
    #[arg(long, value_delimiter = ',', default_values_t = [Method::RotatedRook, Method::BunchKaufman], value_parser = parse_method)]
    methods: Vec<Method>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct LsqBenchArgs {
    /// Matrix sizes.
    #[arg(long, value_delimiter = ',', default_values_t = [10usize, 50, 100])]
    sizes: Vec<usize>,
    /// Append the large sizes 500 and 1000.
    #[arg(long)]
    large: bool,
    /// Intended rank (default n / 2 per size).
    #[arg(long)]
    rank: Option<usize>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct GrowthCheckArgs {
    /// Largest size of the default ladder {2, 5, 10, 20, 50, 100, 200, 500}.
    #[arg(long = "n-max", default_value_t = 100)]
    n_max: usize,
    /// Explicit sizes overriding the ladder.
    #[arg(long, value_delimiter = ',')]
    sizes: Option<Vec<usize>>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct SolveArgs {
    /// Symmetric coordinate Matrix Market file.
    #[arg(long)]
    matrix: PathBuf,
    /// Right-hand side: one value per line ('%' or '#' comments allowed).
    #[arg(long)]
    rhs: PathBuf,
    /// Solution output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Rank tolerance override (default: n * eps * max|a_ij|).
    #[arg(long)]
    tolerance: Option<f64>,
}

enum CliError {
    Usage(String),
    Io(String),
    Numerical(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Numerical(m) => m,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(format!("i/o error: {e}"))
    }
}

impl From<MmError> for CliError {
    fn from(e: MmError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<rotldl::Error> for CliError {
    fn from(e: rotldl::Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rotldl: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}

fn check_sizes(common: &CommonArgs, sizes: &[usize]) -> Result<(), CliError> {
    if common.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    if sizes.is_empty() {
        return Err(CliError::Usage("at least one size is required".into()));
    }
    if sizes.contains(&0) {
        return Err(CliError::Usage("sizes must be at least 1".into()));
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.cmd {
        Cmd::FactorBench(args) => {
            let sizes = with_large(&args.sizes, args.large);
            check_sizes(&args.common, &sizes)?;
            let rows = factor_bench(&sizes, &args.methods, &args.common.config())?;
            emit(&args.common.out, &rows)
        }
        Cmd::CondBench(args) => {
            check_sizes(&args.common, &[args.n])?;
            if args.n < 2 {
                return Err(CliError::Usage("cond-bench needs --n of at least 2".into()));
            }
            if !args.conds.iter().all(|&c| c >= 1.0) {
                return Err(CliError::Usage(
                    "condition numbers must be at least 1".into(),
                ));
            }
            let rows = cond_bench(args.n, &args.conds, &args.methods, &args.common.config())?;
            emit(&args.common.out, &rows)
        }
        Cmd::LsqBench(args) => {
            let sizes = with_large(&args.sizes, args.large);
            check_sizes(&args.common, &sizes)?;
            let rows = lsq_bench(&sizes, args.rank, &args.common.config())?;
            emit(&args.common.out, &rows)
        }
        Cmd::GrowthCheck(args) => {
            let ladder = [2usize, 5, 10, 20, 50, 100, 200, 500];
            let sizes: Vec<usize> = match args.sizes {
                Some(s) => s,
                None => ladder
                    .iter()
                    .copied()
                    .filter(|&n| n <= args.n_max.max(2))
                    .collect(),
            };
            check_sizes(&args.common, &sizes)?;
            let rows = growth_check(&sizes, &args.common.config())?;
            emit(&args.common.out, &rows)
        }
        Cmd::Solve(args) => run_solve(args),
    }
}

fn with_large(sizes: &[usize], large: bool) -> Vec<usize> {
    let mut out = sizes.to_vec();
    if large {
        out.extend([500, 1000]);
    }
    out
}

fn emit(out: &Option<PathBuf>, rows: &[SummaryRow]) -> Result<(), CliError> {
    match out {
        Some(path) => {
            let file = File::create(path)?;
            write_csv(file, rows)?;
        }
        None => {
            let stdout = io::stdout();
            write_csv(stdout.lock(), rows)?;
        }
    }
    Ok(())
}

fn read_rhs(path: &PathBuf) -> Result<Vec<f64>, CliError> {
    let file = File::open(path)?;
    let mut values = Vec::new();
    for (idx, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('%') || t.starts_with('#') {
            continue;
        }
        for tok in t.split_whitespace() {
            let v: f64 = tok.parse().map_err(|_| {
                CliError::Io(format!(
                    "parse error at line {}: invalid value \"{tok}\" in {}",
                    idx + 1,
                    path.display()
                ))
            })?;
            values.push(v);
        }
    }
    Ok(values)
}

fn run_solve(args: SolveArgs) -> Result<(), CliError> {
    let file = File::open(&args.matrix)?;
    let a = read_sym_matrix_market(BufReader::new(file))?;
    let b = read_rhs(&args.rhs)?;
    if b.len() != a.dim() {
        return Err(CliError::Io(format!(
            "dimension mismatch: matrix is {}x{} but right-hand side has {} entries",
            a.dim(),
            a.dim(),
            b.len()
        )));
    }

    let (f, _) = factorize(a, args.tolerance)?;
    let nb = compute_null_basis(f);
    let report = nb.solve_min_norm(&b)?;

    match &args.out {
        Some(path) => {
            let mut file = File::create(path)?;
            for v in &report.x {
                writeln!(file, "{v:e}")?;
            }
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            for v in &report.x {
                writeln!(lock, "{v:e}")?;
            }
        }
    }
    eprintln!("rank = {}", report.rank);
    eprintln!("residual_norm = {:e}", report.residual_norm);
    Ok(())
}
