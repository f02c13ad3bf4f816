//! `jnrlab`: JNR monopole invariants from the command line.

mod commands;
mod docs;
mod error;
mod raster;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use jnrlab::Tolerances;

use commands::{out_path, Context, EnergyArgs, Format, Method, Outcome};
use error::CliError;

#[derive(Parser)]
#[command(name = "jnrlab", version, about = "Spectral curves, rational maps and energy densities of JNR monopoles")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Include wall-clock timings in the report (makes output nondeterministic).
    #[arg(long, global = true)]
    timings: bool,
    #[arg(long, global = true)]
    tol_id: Option<f64>,
    #[arg(long, global = true)]
    tol_root: Option<f64>,
    #[arg(long, global = true)]
    tol_trim: Option<f64>,
    #[arg(long, global = true)]
    tol_cluster: Option<f64>,
    #[arg(long, global = true)]
    tol_sep: Option<f64>,
    #[arg(long, global = true)]
    tol_near: Option<f64>,
}

impl Global {
    fn tolerances(&self) -> Tolerances {
        let d = Tolerances::default();
        Tolerances {
            id: self.tol_id.unwrap_or(d.id),
            root: self.tol_root.unwrap_or(d.root),
            trim: self.tol_trim.unwrap_or(d.trim),
            cluster: self.tol_cluster.unwrap_or(d.cluster),
            sep: self.tol_sep.unwrap_or(d.sep),
            near: self.tol_near.unwrap_or(d.near),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Spectral curve coefficients and basic checks.
    Curve {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rational map by the closed form, by scattering, or both.
    Ratmap {
        input: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        method: Method,
    },
    /// Raster of the boundary energy density.
    Energy {
        input: PathBuf,
        #[arg(long, default_value = "0,0", allow_hyphen_values = true)]
        center: String,
        #[arg(long, default_value_t = 2.5)]
        halfwidth: f64,
        /// `N` for a square raster or `NXxNY`.
        #[arg(long, default_value = "512")]
        res: String,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Add a log10(E) column to CSV output.
        #[arg(long)]
        log10: bool,
    },
    /// Search a curve document for a grid and recover JNR data.
    Grid {
        input: PathBuf,
        /// Start from this pole guess only.
        #[arg(long, allow_hyphen_values = true, conflicts_with = "sweep")]
        seed: Option<String>,
        /// Sweep the full seed lattice (the default).
        #[arg(long)]
        sweep: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply an SU(2) rotation to JNR data.
    Rotate {
        input: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rotation-invariant functions of the data.
    Invariants { input: PathBuf },
    /// Run the identity suite on JNR data or a curve document.
    Verify {
        input: PathBuf,
        /// Also run the slow checks (total energy).
        #[arg(long)]
        all: bool,
        /// Seed for sampled checks.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn parse_res(s: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Validation(format!("resolution {s:?} is not N or NXxNY"));
    match s.split_once('x') {
        Some((a, b)) => Ok((a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?)),
        None => {
            let n = s.parse().map_err(|_| bad())?;
            Ok((n, n))
        }
    }
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let ctx = Context { tol: cli.global.tolerances(), timings: cli.global.timings };
    match &cli.command {
        Command::Curve { input, out } => commands::curve(input, out_path(out), &ctx),
        Command::Ratmap { input, method } => commands::ratmap(input, *method, &ctx),
        Command::Energy { input, center, halfwidth, res, format, out, log10 } => {
            let (nx, ny) = parse_res(res)?;
            let args = EnergyArgs {
                center: docs::parse_complex(center)?,
                half_width: *halfwidth,
                nx,
                ny,
                format: *format,
                out: out_path(out),
                log10: *log10,
            };
            commands::energy(input, &args, &ctx)
        }
        Command::Grid { input, seed, sweep: _, out } => {
            let seed = seed.as_deref().map(docs::parse_complex).transpose()?;
            commands::grid(input, seed, out_path(out), &ctx)
        }
        Command::Rotate { input, a, b, out } => {
            commands::rotate_cmd(input, docs::parse_complex(a)?, docs::parse_complex(b)?, out_path(out), &ctx)
        }
        Command::Invariants { input } => commands::invariants(input, &ctx),
        Command::Verify { input, all, seed } => commands::verify(input, *all, *seed, &ctx),
    }
}

fn configure_threads() {
    if let Some(n) = std::env::var("JNRLAB_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match run(cli) {
        Ok(Outcome { report, payload }) => {
            let text = report.to_json();
            let mut stdout = std::io::stdout().lock();
            match payload {
                Some(bytes) => {
                    let _ = stdout.write_all(&bytes);
                    eprint!("{text}");
                }
                None => {
                    let _ = stdout.write_all(text.as_bytes());
                }
            }
            match report.first_failure() {
                None if report.pass => ExitCode::SUCCESS,
                None => ExitCode::from(3),
                Some(c) => {
                    let code = if c.name == "grid" && report.command == "grid" { 4 } else { 3 };
                    let defect = c.defect.map(|d| format!(" (defect {d:.3e})")).unwrap_or_default();
                    let detail = c.detail.as_deref().map(|d| format!(": {d}")).unwrap_or_default();
                    eprintln!("error: check {:?} failed{defect}{detail}", c.name);
                    ExitCode::from(code)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
