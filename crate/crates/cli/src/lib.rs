//! The `hh` command-line tool: JSON experiment configs in, JSON or CSV
//! reports out.

pub mod commands;
pub mod config;
pub mod error;
pub mod report;

use std::path::PathBuf;

use clap::Parser;

use commands::{run_command, Command};
use config::{load, Format, Overrides};
use error::CliError;
use report::{emit, ReportEnvelope};

#[derive(Debug, Parser)]
#[command(name = "hh", version, about = "Sharp constants and numerical checks of Hardy-Hilbert type inequalities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Experiment config (JSON). Without one, every field takes its default.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub rel_tol: Option<f64>,
    #[arg(long, global = true)]
    pub abs_tol: Option<f64>,
    #[arg(long, global = true)]
    pub max_subdiv: Option<usize>,
    #[arg(long, global = true)]
    pub mc_samples: Option<u64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Report file; stdout when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, global = true)]
    pub format: Option<Format>,
    /// Do not print the summary table on stderr.
    #[arg(long, short, global = true)]
    pub quiet: bool,
}

impl Cli {
    fn overrides(&self) -> Overrides {
        Overrides {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_subdiv: self.max_subdiv,
            mc_samples: self.mc_samples,
            seed: self.seed,
            output: self.output.clone(),
            format: self.format,
        }
    }
}

/// Runs one command end to end and returns the process exit status.
pub fn run(cli: &Cli) -> u8 {
    let name = cli.command.name();
    let exp = match load(cli.config.as_deref(), &cli.overrides()) {
        Ok(exp) => exp,
        Err(e) => {
            eprintln!("hh {name}: {e}");
            let mut envelope = ReportEnvelope::new(name, None);
            envelope.fail(&e);
            if cli.format != Some(Format::Csv) {
                finish(&envelope, cli.output.as_deref());
            }
            return envelope.status.exit_code;
        }
    };

    let mut envelope = ReportEnvelope::new(name, Some(exp.config.clone()));
    let output = exp.config.output.path.clone();
    let format = exp.config.output.format;
    match run_command(cli.command, &exp) {
        Ok(out) => {
            if !cli.quiet {
                eprint!("{}", out.table.render());
            }
            envelope.set_outcome(out.outcome);
            envelope.results = Some(out.results);
            envelope.diagnostics = out.diagnostics;
            if format == Format::Csv {
                if let Err(e) = emit(output.as_deref(), |w| out.table.write_csv(w)) {
                    eprintln!("hh {name}: {e}");
                    return e.exit_code();
                }
                return envelope.status.exit_code;
            }
        }
        Err(e) => {
            eprintln!("hh {name}: {e}");
            envelope.fail(&e);
            if format == Format::Csv {
                return envelope.status.exit_code;
            }
        }
    }
    finish(&envelope, output.as_deref())
}

fn finish(envelope: &ReportEnvelope, output: Option<&std::path::Path>) -> u8 {
    let written = envelope.to_json().and_then(|json| {
        emit(output, |w| writeln!(w, "{json}").map_err(|e| CliError::Write { target: "report".into(), message: e.to_string() }))
    });
    match written {
        Ok(()) => envelope.status.exit_code,
        Err(e) => {
            eprintln!("hh {}: {e}", envelope.command);
            e.exit_code()
        }
    }
}
