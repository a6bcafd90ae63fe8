//! `chen` — compute Chen-type curvature invariants of submanifold shape
//! data, verify the associated upper bounds, and exercise the constrained
//! maximization machinery behind them.
//!
//! Exit codes: 0 success, 1 a mathematical claim failed (a bound violated,
//! solver paths disagreeing, a failed selfcheck), 2 malformed input,
//! 3 inconsistent configuration (data and requested bound family clash).

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use chen_core::Error;
use commands::KindArg;
use output::Format;

#[derive(Parser)]
#[command(
    name = "chen",
    version,
    about = "Curvature invariants of submanifold shape data and their sharp upper bounds"
)]
struct Cli {
    /// Output format for reports.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Write the report to a file instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute invariants of one shape document and verify its bounds.
    Compute {
        /// Path to a shape document, or "-" for stdin.
        #[arg(long = "in", value_name = "PATH")]
        input: PathBuf,
        /// Orders k to verify (comma separated). Defaults to 3..=n for the
        /// real and totally real bounds, and to n alone for the Lagrangian
        /// bound.
        #[arg(long, value_delimiter = ',')]
        k: Vec<usize>,
        /// Bound family to verify. Inferred from the document if omitted.
        #[arg(long, value_enum)]
        kind: Option<KindArg>,
    },
    /// Verify bounds over a stream of random shapes.
    Sweep {
        /// Bound family to verify.
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Tangent dimensions to draw from (comma separated).
        #[arg(long = "n", value_delimiter = ',')]
        dims: Vec<usize>,
        /// Codimensions to draw from (comma separated; not valid for the
        /// Lagrangian family, where p = n).
        #[arg(long = "p", value_delimiter = ',')]
        codims: Option<Vec<usize>>,
        /// Number of random shapes.
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Half-width of the uniform interval operator entries are drawn
        /// from.
        #[arg(long)]
        amplitude: Option<f64>,
        /// Lower end of the curvature-constant range.
        #[arg(long)]
        c_min: Option<f64>,
        /// Upper end of the curvature-constant range.
        #[arg(long)]
        c_max: Option<f64>,
    },
    /// Solve one labeled trace-constrained maximization by every path.
    Qp {
        /// Program family: fr_real, f1_lagrangian, or fr_lagrangian.
        #[arg(long)]
        label: String,
        #[arg(long)]
        n: usize,
        /// Plane order (fr_real only).
        #[arg(long)]
        k_order: Option<usize>,
        /// Distinguished slot, 1-based (fr_lagrangian only).
        #[arg(long)]
        r: Option<usize>,
        /// Value of the trace constraint.
        #[arg(long)]
        trace: f64,
        /// Which solution paths to run.
        #[arg(long, value_enum, default_value_t = commands::MethodArg::All)]
        method: commands::MethodArg,
        /// Random restarts for the numeric oracle.
        #[arg(long, default_value_t = 8)]
        starts: usize,
    },
    /// Build a shape attaining its bound with equality and verify the slack
    /// vanishes at every order.
    Equality {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: usize,
        /// One leading coefficient per normal direction (comma separated).
        #[arg(long, value_delimiter = ',')]
        a: Vec<f64>,
        /// Ambient curvature constant.
        #[arg(long, default_value_t = 0.0)]
        c: f64,
    },
    /// Emit a reproducible random shape document.
    Sample {
        #[arg(long)]
        n: usize,
        /// Codimension. Defaults to 1, or to n with --lagrangian.
        #[arg(long)]
        p: Option<usize>,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Draw a Lagrangian shape (fully symmetric coefficients, complex
        /// ambient of real dimension 2n).
        #[arg(long)]
        lagrangian: bool,
        /// Half-width of the uniform interval entries are drawn from.
        #[arg(long, default_value_t = 1.0)]
        amplitude: f64,
        /// Ambient curvature constant.
        #[arg(long, default_value_t = 0.0)]
        c: f64,
    },
    /// Run the internal invariant battery.
    Selfcheck {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Inject a deliberate fault into the completed-square identity to
        /// prove the battery can fail.
        #[arg(long, hide = true)]
        perturb_hessian: bool,
        /// Run only checks whose name contains this substring.
        #[arg(long)]
        only: Option<String>,
    },
}

fn run(cli: &Cli) -> Result<output::Outcome, Error> {
    match &cli.command {
        Command::Compute { input, k, kind } => commands::compute(input, k, kind.map(Into::into)),
        Command::Sweep {
            kind,
            dims,
            codims,
            count,
            seed,
            amplitude,
            c_min,
            c_max,
        } => commands::sweep(
            (*kind).into(),
            dims,
            codims.as_deref(),
            *count,
            *seed,
            *amplitude,
            *c_min,
            *c_max,
        ),
        Command::Qp {
            label,
            n,
            k_order,
            r,
            trace,
            method,
            starts,
        } => commands::qp(label, *n, *k_order, *r, *trace, *method, *starts),
        Command::Equality { n, p, a, c } => commands::equality(*n, *p, a, *c),
        Command::Sample {
            n,
            p,
            seed,
            lagrangian,
            amplitude,
            c,
        } => commands::sample(*n, *p, *seed, *lagrangian, *amplitude, *c),
        Command::Selfcheck {
            seed,
            perturb_hessian,
            only,
        } => commands::selfcheck(*seed, *perturb_hessian, only.as_deref()),
    }
}

/// Exit code for a core error: schema and parameter problems are input
/// errors (2); a clash between the requested bound family and the data is a
/// configuration error (3).
fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::InconsistentKind { .. } | Error::NotLagrangian(_) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            let rendered = output::render(&outcome, cli.format);
            if let Err(e) = output::deliver(&rendered, cli.out.as_deref()) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if outcome.violation {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
