//! Command-line front end for `qsym3`.

pub mod analyze;
pub mod format;
pub mod scan;
pub mod verify;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use format::{write_json, Format};
use qsym3::conditional::ConditionalGrid;
use qsym3::qsym::DEFAULT_TOL;
use scan::{Family, ScanSpec};
use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "qsym3", version, about = "Nonlocality of permutation-symmetric three-qubit states")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Correlation eigenvalues and CHSH optimum of the reduced pair.
    ScanChsh(ScanArgs),
    /// Charlie-conditioned CHSH over a (beta, theta, phi) grid.
    ScanConditional(ScanArgs),
    /// Check the built-in (3,2,2) classes; exit 1 on any failure.
    #[command(name = "bell322-verify")]
    Bell322Verify(VerifyArgs),
    /// SLOCC class, spinors, invariants and CHSH data for one state.
    Analyze(AnalyzeArgs),
}

#[derive(Args, Debug)]
pub struct Output {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write to a file instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    #[arg(long, default_value_t = 100)]
    pub beta_steps: usize,
    /// Fix beta instead of scanning it.
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long, default_value_t = 37)]
    pub theta_steps: usize,
    #[arg(long, default_value_t = 72)]
    pub phi_steps: usize,
    /// d33 only. scan-chsh scans y in (0, 1] when omitted; scan-conditional defaults to 1.
    #[arg(long)]
    pub y: Option<f64>,
    #[arg(long, default_value_t = 100)]
    pub y_steps: usize,
    /// d33 only.
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// `all`, or a comma-separated subset of 2,5,22,26,33,39 (may be empty).
    #[arg(long, default_value = "all")]
    pub classes: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    /// Named state: ghz, w, 000.
    #[arg(long, conflicts_with_all = ["amplitudes", "input", "family"])]
    pub state: Option<String>,
    /// JSON array of 8 amplitudes (numbers or [re, im]).
    #[arg(long, conflicts_with_all = ["input", "family"])]
    pub amplitudes: Option<String>,
    /// File holding the amplitude JSON.
    #[arg(long, conflicts_with = "family")]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub family: Option<Family>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub y: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    /// Symmetry and root-coincidence tolerance.
    #[arg(long, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    #[arg(long, default_value_t = 181)]
    pub theta_steps: usize,
    #[arg(long, default_value_t = 91)]
    pub phi_steps: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl ScanArgs {
    fn spec(&self) -> ScanSpec {
        ScanSpec {
            family: self.family,
            beta: self.beta,
            beta_steps: self.beta_steps,
            theta_steps: self.theta_steps,
            phi_steps: self.phi_steps,
            y: self.y,
            y_steps: self.y_steps,
            alpha: self.alpha,
        }
    }
}

fn sink(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p).with_context(|| format!("cannot create {}", p.display()))?)),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

/// Runs a parsed command; `Ok(false)` means a verification failure.
pub fn execute(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::ScanChsh(a) => {
            let table = scan::scan_chsh(&a.spec())?;
            let mut out = sink(&a.output.out)?;
            table.write(&mut out, a.output.format)?;
            out.flush()?;
            Ok(true)
        }
        Command::ScanConditional(a) => {
            let table = scan::scan_conditional(&a.spec())?;
            let mut out = sink(&a.output.out)?;
            table.write(&mut out, a.output.format)?;
            out.flush()?;
            Ok(true)
        }
        Command::Bell322Verify(a) => {
            let classes = verify::parse_classes(&a.classes)?;
            let rows = verify::verify(&classes)?;
            let mut out = sink(&a.out)?;
            write_json(&mut out, serde_json::to_value(&rows)?)?;
            out.flush()?;
            for row in rows.iter().filter(|r| !r.passed) {
                eprintln!("class {}: {}", row.class, row.failures.join("; "));
            }
            Ok(rows.iter().all(|r| r.passed))
        }
        Command::Analyze(a) => {
            if a.tol.is_nan() || a.tol <= 0.0 {
                bail!("--tol must be positive");
            }
            if a.theta_steps < 2 || a.phi_steps < 2 {
                bail!("--theta-steps and --phi-steps must be at least 2");
            }
            let state = if let Some(name) = &a.state {
                analyze::named_state(name)?
            } else if let Some(text) = &a.amplitudes {
                analyze::parse_amplitudes(text)?
            } else if let Some(path) = &a.input {
                let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
                analyze::parse_amplitudes(&text)?
            } else if let Some(f) = a.family {
                analyze::family_state(f, a.beta, a.y, a.alpha)?
            } else {
                bail!("give one of --state, --amplitudes, --input or --family");
            };
            let grid = ConditionalGrid::coarse(a.theta_steps, a.phi_steps);
            let doc = analyze::analyze(&state, a.tol, grid);
            let mut out = sink(&a.out)?;
            write_json(&mut out, doc)?;
            out.flush()?;
            Ok(true)
        }
    }
}

/// Parses arguments, runs, and maps the outcome to an exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VERIFY,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}
