use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser, Subcommand};
use secsat_core::experiments::{emit_csv, load_scenario, run_scenario, write_csv};
use secsat_core::{Error, Scenario};

#[derive(Parser, Debug)]
#[command(
    name = "secsat",
    version,
    about = "Secrecy outage curves for relay-jammed satellite links"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a figure preset or a scenario file and write SOP curves as CSV.
    #[command(group(ArgGroup::new("source").required(true).args(["preset", "config"])))]
    Run {
        /// fig2, fig3, fig4, fig5, fig6 or fig7.
        #[arg(long)]
        preset: Option<String>,
        /// JSON scenario file.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output CSV path; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Global seed. Presets default to 42; files keep their own seed unless given.
        #[arg(long)]
        seed: Option<u64>,
        /// Monte-Carlo trials per point, overriding the scenario.
        #[arg(long)]
        trials: Option<u64>,
        /// Worker threads; all cores when omitted.
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonConvergence { .. } => 3,
        Error::Io { .. } => 4,
        _ => 2,
    }
}

fn run(cmd: Command) -> Result<(), Error> {
    let Command::Run {
        preset,
        config,
        out,
        seed,
        trials,
        threads,
    } = cmd;
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::Validation("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Validation(format!("cannot start thread pool: {e}")))?;
    }
    let mut scenario = match (preset, config) {
        (Some(name), _) => Scenario::preset(&name)?,
        (None, Some(path)) => load_scenario(&path)?,
        (None, None) => unreachable!("clap requires a source"),
    };
    if let Some(seed) = seed {
        scenario.seed = seed;
    }
    if let Some(trials) = trials {
        scenario.trials = trials;
    }
    scenario.validate()?;
    let curves = run_scenario(&scenario)?;
    match out {
        Some(path) => emit_csv(&curves, &path),
        None => write_csv(&curves, std::io::stdout().lock()).map_err(|e| Error::Io {
            path: PathBuf::from("<stdout>"),
            source: e.into(),
        }),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_error_kind() {
        assert_eq!(exit_code(&Error::Validation("x".into())), 2);
        let parse = Error::Parse {
            path: "a.json".into(),
            message: "bad".into(),
        };
        assert_eq!(exit_code(&parse), 2);
        let nc = Error::NonConvergence {
            op: "integrate",
            reason: "budget".into(),
        };
        assert_eq!(exit_code(&nc), 3);
        let io = Error::Io {
            path: "out.csv".into(),
            source: std::io::Error::other("disk full"),
        };
        assert_eq!(exit_code(&io), 4);
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
