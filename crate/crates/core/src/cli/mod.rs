//! Command-line front end: `zeno <command> --config run.json --out DIR`.

mod check;
mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

pub use check::{check_suite, CheckLine};
pub use commands::{
    compare_files, scan_ep_files, spectrum_exact_files, spectrum_zeno_files, sweep_gamma_files, CommandOutput, OutputFile,
};
pub use config::{ConfigError, Format, GridSpec, RunConfig};

use crate::error::Error;

#[derive(Debug, Parser)]
#[command(name = "zeno", version, about = "Liouvillian spectra of boundary-driven XYZ chains, exact and near the Zeno limit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Dense diagonalization of the full Liouvillian.
    SpectrumExact,
    /// Stripe-by-stripe eigenvalues through order 1/Gamma.
    SpectrumZeno,
    /// Exact against perturbative, matched stripe by stripe.
    Compare,
    /// Error curves over `run.gammas` and their (Gamma_c/Gamma)^2 fits.
    SweepGamma,
    /// Tracked exact eigenvalues over `run.ep_grid` and detected branch points.
    ScanEp,
    /// Built-in consistency suite; exits with 3 on any failure.
    Check,
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct Flags {
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub jobs: usize,
    /// Also write right eigenvectors (spectrum-exact).
    #[arg(long, global = true)]
    pub eigenvectors: bool,
    /// Seed for the randomized draw in `check`.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 1;
    pub const NUMERICAL: i32 = 2;
    pub const CHECK_FAILED: i32 = 3;
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(Error),
    CheckFailed(usize),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Numerical(_) => exit::NUMERICAL,
            CliError::CheckFailed(_) => exit::CHECK_FAILED,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "{m}"),
            CliError::Numerical(e) => write!(f, "numerical failure: {e}"),
            CliError::CheckFailed(n) => write!(f, "{n} check(s) failed"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(m) | Error::Envelope(m) => CliError::Config(m),
            other => CliError::Numerical(other),
        }
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?;
    Ok(RunConfig::parse(&text)?)
}

fn write_files(dir: &Path, files: &[OutputFile]) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Config(format!("creating {}: {e}", dir.display())))?;
    for f in files {
        let p = dir.join(&f.name);
        std::fs::write(&p, &f.contents).map_err(|e| CliError::Config(format!("writing {}: {e}", p.display())))?;
    }
    Ok(())
}

/// Runs one command and returns the files written. Files are written even when
/// the run reports problems; the error then carries them.
pub fn execute(cli: &Cli, log: &mut (dyn std::io::Write + Send)) -> Result<Vec<PathBuf>, CliError> {
    let flags = &cli.flags;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(flags.jobs)
        .build()
        .map_err(|e| CliError::Config(format!("--jobs: {e}")))?;
    pool.install(|| {
        if cli.command == Command::Check {
            let lines = check_suite(flags.seed);
            let mut failed = 0;
            for l in &lines {
                let _ = writeln!(log, "{} {}: {}", if l.pass { "PASS" } else { "FAIL" }, l.name, l.detail);
                failed += usize::from(!l.pass);
            }
            return if failed == 0 { Ok(Vec::new()) } else { Err(CliError::CheckFailed(failed)) };
        }
        let path = flags.config.as_ref().ok_or_else(|| CliError::Config("--config PATH is required".into()))?;
        let cfg = load_config(path)?;
        let format = flags.format.or(cfg.output.format).unwrap_or_default();
        let dir = flags.out.clone().or_else(|| cfg.output.dir.clone()).unwrap_or_else(|| PathBuf::from("out"));
        let output = match cli.command {
            Command::SpectrumExact => spectrum_exact_files(&cfg, format, flags.eigenvectors || cfg.run.compute_eigenvectors)?,
            Command::SpectrumZeno => spectrum_zeno_files(&cfg, format)?,
            Command::Compare => compare_files(&cfg, format)?,
            Command::SweepGamma => sweep_gamma_files(&cfg, format)?,
            Command::ScanEp => scan_ep_files(&cfg, format)?,
            Command::Check => unreachable!(),
        };
        write_files(&dir, &output.files)?;
        if !output.problems.is_empty() {
            return Err(CliError::Numerical(Error::Numerical(output.problems.join("; "))));
        }
        Ok(output.files.iter().map(|f| dir.join(&f.name)).collect())
    })
}

/// Parses arguments, runs, reports on stderr and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit::CONFIG } else { exit::OK };
            let _ = e.print();
            return code;
        }
    };
    let mut out = std::io::stdout();
    match execute(&cli, &mut out) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            exit::OK
        }
        Err(e) => {
            eprintln!("zeno: {e}");
            e.code()
        }
    }
}
