use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::{BigInt, BigUint};

use isoclass::cli::{cmd_analyze, cmd_compare, cmd_oracle, cmd_pattern, cmd_table, exit_code, CurveSpec, Report};
use isoclass::curve::DEFAULT_ENUMERATION_BOUND;
use isoclass::Result;

/// Isomorphism classes of point groups of isogenous ordinary elliptic curves
/// over finite field extensions.
#[derive(Parser)]
#[command(name = "isoclass", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Point count, Frobenius, conductor and group structure of one curve.
    Analyze {
        /// Curve as q:A,B
        spec: CurveSpec,
        #[arg(long)]
        json: bool,
    },
    /// Set of k with E(F_{q^k}) ≅ E'(F_{q^k}) for two isogenous curves.
    Compare {
        spec_a: CurveSpec,
        spec_b: CurveSpec,
        /// Also tabulate the gcd criterion for k = 1..N.
        #[arg(long)]
        kmax: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Pattern from trace and conductors alone; q may be a prime power.
    Pattern {
        #[arg(long)]
        q: BigUint,
        #[arg(long, allow_hyphen_values = true)]
        trace: BigInt,
        #[arg(long)]
        g: BigUint,
        #[arg(long)]
        g2: BigUint,
        #[arg(long)]
        kmax: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Check the pattern against enumerated group structures.
    Oracle {
        spec_a: CurveSpec,
        spec_b: CurveSpec,
        #[arg(long)]
        kmax: u64,
        /// Largest field size to enumerate.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_BOUND)]
        bound: u64,
        #[arg(long)]
        json: bool,
    },
    /// Pairwise pattern table for curves in one isogeny class.
    Table {
        #[arg(required = true, num_args = 2..)]
        specs: Vec<CurveSpec>,
        /// Comma-separated row and column labels; defaults to E_0, E_1, ...
        #[arg(long, value_delimiter = ',')]
        labels: Option<Vec<String>>,
    },
}

fn emit(report: Report, json: bool) -> String {
    if json {
        report.to_json() + "\n"
    } else {
        report.render_text()
    }
}

fn run(cli: Cli) -> Result<String> {
    Ok(match cli.command {
        Command::Analyze { spec, json } => emit(cmd_analyze(&spec)?, json),
        Command::Compare { spec_a, spec_b, kmax, json } => emit(cmd_compare(&spec_a, &spec_b, kmax)?, json),
        Command::Pattern { q, trace, g, g2, kmax, json } => emit(cmd_pattern(&q, &trace, &g, &g2, kmax)?, json),
        Command::Oracle { spec_a, spec_b, kmax, bound, json } => emit(cmd_oracle(&spec_a, &spec_b, kmax, bound)?, json),
        Command::Table { specs, labels } => {
            let labels = labels.unwrap_or_else(|| (0..specs.len()).map(|i| format!("E_{i}")).collect());
            cmd_table(&specs, &labels)?
        }
    })
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
