//! Command-line front end for the `pdmahler` library.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand};

use crate::commands::{CliError, Config, Outcome};
use crate::report::Format;

#[derive(Parser, Debug)]
#[command(name = "pdmahler", version, about = "Mahler measures of P_d, Dirichlet L-values and exact identities")]
struct Cli {
    /// Working precision in decimal digits (at least 15).
    #[arg(long, global = true, env = "PDMAHLER_PREC", default_value_t = 50)]
    prec: u32,
    /// Quadrature nodes for the numeric oracle (a power of 2, at least 64).
    #[arg(long, global = true, default_value_t = 4096)]
    nodes: usize,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Li2(z), the Bloch-Wigner function D(z) or Cl2(2πj/k).
    Dilog(DilogArgs),
    /// Facts about the Conrey character q.n.
    Char {
        /// Label `q.n`.
        label: String,
    },
    /// d_χ and L'(χ, -1) for an odd character.
    Lvalue {
        /// Label `q.n`.
        label: String,
    },
    /// S_d and the decomposition of S_d/(2π).
    Spd {
        d: u64,
    },
    /// m(P_d) from the closed formula and its decomposition.
    Mpd {
        d: u64,
    },
    /// Decomposition of a subject such as `m(P_4)` or `S_12/(2pi)`.
    Decompose {
        subject: String,
    },
    /// Search for an identity m(∏ P_d^a_d) = q · L'(χ, -1).
    Solve(SolveArgs),
    /// Re-check a certificate stored as JSON.
    Verify {
        file: PathBuf,
    },
    /// Regenerate a reference table: mpd, sd, constants, quadratic, complex.
    Table {
        name: String,
        /// Compare against the embedded reference data and fail on mismatch.
        #[arg(long)]
        check: bool,
    },
    /// Numeric Mahler measure of a polynomial in x and y.
    Oracle(OracleArgs),
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("function").required(true).args(["z", "bw", "clausen"])))]
struct DilogArgs {
    /// Argument of Li2, e.g. `0.5`, `i` or `0.3-0.4i`.
    #[arg(allow_hyphen_values = true)]
    z: Option<String>,
    /// Bloch-Wigner D(z).
    #[arg(long, allow_hyphen_values = true, value_name = "Z")]
    bw: Option<String>,
    /// Clausen Cl2(2πj/k).
    #[arg(long, num_args = 2, value_names = ["J", "K"], allow_negative_numbers = true)]
    clausen: Option<Vec<i64>>,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("target").required(true).args(["conductor", "character"])))]
struct SolveArgs {
    /// Conductor f of the quadratic character χ_{-f}.
    #[arg(long)]
    conductor: Option<u64>,
    /// Complex primitive odd character `q.n`.
    #[arg(long)]
    character: Option<String>,
    /// Largest d in the basis P_1..P_D.
    #[arg(long)]
    dmax: u32,
    /// Include Ray's conductor-7 polynomial in the basis.
    #[arg(long)]
    ray: bool,
}

#[derive(Args, Debug)]
#[command(group(ArgGroup::new("input").required(true).args(["poly", "ray_table"])))]
struct OracleArgs {
    /// Polynomial such as `1+x+y` or `x^2*y - 3*x + y^2`.
    #[arg(allow_hyphen_values = true)]
    poly: Option<String>,
    /// Check the tabulated polynomials whose measures give d_f.
    #[arg(long)]
    ray_table: bool,
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    let cfg = Config::new(cli.prec, cli.nodes)?;
    match cli.command {
        Command::Dilog(a) => match (a.z, a.bw, a.clausen) {
            (Some(z), _, _) => commands::li2(&cfg, &z),
            (_, Some(z), _) => commands::bloch_wigner(&cfg, &z),
            (_, _, Some(jk)) => commands::clausen(&cfg, jk[0], jk[1]),
            _ => unreachable!("clap enforces one argument"),
        },
        Command::Char { label } => commands::character(&cfg, &label),
        Command::Lvalue { label } => commands::lvalue(&cfg, &label),
        Command::Spd { d } => commands::spd(&cfg, d),
        Command::Mpd { d } => commands::mpd(&cfg, d),
        Command::Decompose { subject } => commands::decompose(&cfg, &subject),
        Command::Solve(a) => match (a.conductor, a.character) {
            (Some(f), _) => commands::solve_conductor(&cfg, f, a.dmax, a.ray),
            (_, Some(label)) => commands::solve_character(&cfg, &label, a.dmax, a.ray),
            _ => unreachable!("clap enforces one target"),
        },
        Command::Verify { file } => commands::verify(&cfg, &file),
        Command::Table { name, check } => commands::table(&cfg, &name, check),
        Command::Oracle(a) => match a.poly {
            Some(p) if !a.ray_table => commands::oracle(&cfg, &p),
            _ => commands::ray_table(&cfg),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(3) } else { ExitCode::SUCCESS };
        }
    };
    let format = cli.format;
    match run(cli) {
        Ok(outcome) => {
            print!("{}", outcome.report.render(format));
            match outcome.failure {
                None => ExitCode::SUCCESS,
                Some(msg) => {
                    eprintln!("verification failed: {msg}");
                    ExitCode::from(2)
                }
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
