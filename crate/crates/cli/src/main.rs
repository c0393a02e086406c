//! `igwp`: verification suites, tables, scans and flatness reports.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{CliError, Model, Outcome, ReportParams};
use output::{write_atomic, Format};

#[derive(Parser, Debug)]
#[command(
    name = "igwp",
    version,
    about = "Dual connections, warped products and statistical-model geometry"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run verification suites.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Print a model table.
    #[command(subcommand)]
    Table(TableCommand),
    /// Scan a one-parameter family of candidate connections.
    #[command(subcommand)]
    Scan(ScanCommand),
    /// Report residuals for a single geometry.
    #[command(subcommand)]
    Report(ReportCommand),
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    /// Every suite.
    All {
        /// Replace every residual tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand, Debug)]
enum TableCommand {
    /// Quadrature and closed-form constants of elliptic families.
    EllipticConstants {
        /// Comma-separated list of gauss, cauchy, student.
        #[arg(long, default_value = "gauss,cauchy,student")]
        models: String,
        #[arg(long, default_value_t = 5.0)]
        student_k: f64,
    },
    /// Line coefficients of the dually flat connections.
    DuallyFlat {
        #[arg(long, default_value_t = 5.0)]
        student_k: f64,
    },
}

#[derive(Subcommand, Debug)]
enum ScanCommand {
    /// `D_∂t ∂t = (c/t) ∂t` on the cone over the flat plane.
    Cone {
        #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
        c_min: f64,
        #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
        c_max: f64,
        #[arg(long, default_value_t = 601)]
        steps: usize,
        /// Include wall time in the output (breaks byte-identical reruns).
        #[arg(long)]
        timing: bool,
    },
    /// `D_∂σ ∂σ = (c/σ) ∂σ` on the Takano space.
    Takano {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = -4.0, allow_negative_numbers = true)]
        c_min: f64,
        #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
        c_max: f64,
        #[arg(long, default_value_t = 601)]
        steps: usize,
        #[arg(long)]
        timing: bool,
    },
}

#[derive(Subcommand, Debug)]
enum ReportCommand {
    /// Curvature, torsion and duality residuals of an α-connection.
    Flatness {
        #[arg(long, value_enum)]
        model: Model,
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        /// Fiber dimension of the Takano space.
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Number of atoms for simplex and denorm.
        #[arg(long, default_value_t = 3)]
        m: usize,
        /// Generator of the elliptic family: gauss, cauchy or student.
        #[arg(long, default_value = "gauss")]
        generator: String,
        #[arg(long, default_value_t = 5.0)]
        student_k: f64,
        /// Scale of the upper half plane metric.
        #[arg(long, default_value_t = 2.0)]
        lambda: f64,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = 64)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn run(cmd: Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Verify(VerifyCommand::All { tol, samples, seed }) => {
            commands::verify_all(tol, samples, seed)
        }
        Command::Table(TableCommand::EllipticConstants { models, student_k }) => {
            commands::table_elliptic_constants(&commands::parse_models(&models, student_k)?)
        }
        Command::Table(TableCommand::DuallyFlat { student_k }) => {
            commands::table_dually_flat(student_k)
        }
        Command::Scan(ScanCommand::Cone {
            c_min,
            c_max,
            steps,
            timing,
        }) => commands::scan_cone(c_min, c_max, steps, timing),
        Command::Scan(ScanCommand::Takano {
            n,
            c_min,
            c_max,
            steps,
            timing,
        }) => commands::scan_takano(n, c_min, c_max, steps, timing),
        Command::Report(ReportCommand::Flatness {
            model,
            alpha,
            n,
            m,
            generator,
            student_k,
            lambda,
            tol,
            samples,
            seed,
        }) => commands::report_flatness(&ReportParams {
            model,
            alpha,
            n,
            m,
            generator: commands::generator(&generator, student_k)?,
            lambda,
            tolerance: tol,
            samples,
            seed,
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(cli.command) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("igwp: {e}");
            return ExitCode::from(e.exit_code());
        }
    };
    let text = match outcome.doc.render(cli.out.format) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("igwp: rendering failed: {e}");
            return ExitCode::from(1);
        }
    };
    match &cli.out.out {
        Some(path) => {
            if let Err(e) = write_atomic(path, &text) {
                eprintln!("igwp: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{text}"),
    }
    if outcome.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        for f in &outcome.failures {
            eprintln!("igwp: failed: {f}");
        }
        ExitCode::from(1)
    }
}
