mod commands;
mod reproduce;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

/// Environment variable naming a directory searched for scenario files that
/// are not found relative to the working directory.
pub const SCENARIO_DIR_VAR: &str = "NASHIMPL_SCENARIO_DIR";

#[derive(Parser, Debug)]
#[command(
    name = "nashimpl",
    version,
    about = "Two-agent Nash implementation toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mech {
    Quantum,
    Algorithmic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Scn,
    Json,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Verify the scenario's witness, or search for one, and print every
    /// intersection the condition inspects.
    CheckMu2 {
        scenario: String,
        /// Ignore any witness in the file and search for one.
        #[arg(long)]
        search: bool,
        /// Fix the message set B used by the search (comma-separated labels).
        #[arg(long, value_name = "OUTCOMES")]
        b: Option<String>,
    },
    /// Ordinal gate plus the payoff conditions at a given entanglement.
    CheckLambda {
        scenario: String,
        #[arg(long)]
        theta: Option<String>,
        /// Entanglement angle: a number, `pi` or `pi/<n>`.
        #[arg(long)]
        gamma: Option<String>,
    },
    /// Pure equilibria of the classical mechanism at each profile.
    Equilibria {
        scenario: String,
        #[arg(long)]
        theta: Option<String>,
        /// Largest integer announced in candidate profiles.
        #[arg(long, default_value_t = 2)]
        n_cap: u32,
    },
    /// One seeded run of the quantum or the algorithmic mechanism.
    Run {
        scenario: String,
        #[arg(long)]
        theta: String,
        #[arg(long, value_enum, default_value = "quantum")]
        mech: Mech,
        #[arg(long)]
        gamma: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        /// Local operation of agent 1: `C`, `D`, `I` or `xi,phi`.
        #[arg(long, value_name = "OP")]
        op1: Option<String>,
        #[arg(long, value_name = "OP")]
        op2: Option<String>,
        /// Card of agent 1: `theta,a,b,n/theta,a,b,n` (side 0 / side 1).
        #[arg(long, value_name = "CARD")]
        card1: Option<String>,
        #[arg(long, value_name = "CARD")]
        card2: Option<String>,
        /// Print the run report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Check whether coordinating on the gate's outcome is an equilibrium of
    /// the entangled mechanism.
    VerifyProposition {
        scenario: String,
        #[arg(long)]
        theta: String,
        #[arg(long)]
        gamma: Option<String>,
        /// Points on the ξ axis; the φ axis gets `grid / 2 + 1`.
        #[arg(long, default_value_t = 61)]
        grid: usize,
    },
    /// Run the whole pipeline on the shipped example and diff against its
    /// expected-results file.
    ReproducePaper {
        /// Scenario to use instead of the shipped example.
        #[arg(long)]
        scenario: Option<String>,
        /// Expected-results file to use instead of the shipped one.
        #[arg(long)]
        expected: Option<String>,
        /// Print the computed values in expected-file format and exit.
        #[arg(long)]
        print_actual: bool,
    },
    /// Convert between the `.scn` and canonical JSON forms.
    Convert {
        input: String,
        #[arg(long, value_enum)]
        to: Format,
        /// Output path; standard output if omitted.
        #[arg(short, long)]
        output: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                commands::EXIT_USAGE
            } else {
                0
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let echo: Vec<String> = std::env::args().skip(1).collect();
    match commands::execute(&cli.command, &echo.join(" ")) {
        Ok((text, code)) => {
            print!("{text}");
            ExitCode::from(code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
