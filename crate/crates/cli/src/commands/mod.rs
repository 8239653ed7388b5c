mod constant;
mod dilation;
mod geometry;
mod sharpness;
mod verify;

use serde::Serialize;

use crate::config::Experiment;
use crate::error::{CliError, Result};
use crate::report::{Diagnostic, Outcome, Table};

pub use constant::{applicable_closed_form, cmd_constant, ClosedFormCheck, ConstantResult};
pub use dilation::{cmd_dilation_probe, DilationResult};
pub use geometry::{cmd_geometry, BallEntry, GeometryResult, MonteCarloCheck};
pub use sharpness::{cmd_sharpness, SharpnessResult};
pub use verify::{cmd_verify, PairResult, VerifyResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::Subcommand)]
pub enum Command {
    /// Sharp constant of the kernel, numerically and in closed form
    Constant,
    /// Both sides of the bilinear, operator and dual inequalities
    Verify,
    /// Lower bounds along the extremal family as β decreases
    Sharpness,
    /// Scaling of the normalized bilinear form under dilations
    DilationProbe,
    /// Homogeneous dimension, sphere measure and ball volumes
    Geometry,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Constant => "constant",
            Command::Verify => "verify",
            Command::Sharpness => "sharpness",
            Command::DilationProbe => "dilation-probe",
            Command::Geometry => "geometry",
        }
    }
}

/// What a command hands back to the driver.
#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub results: serde_json::Value,
    pub diagnostics: Vec<Diagnostic>,
    pub outcome: Outcome,
    pub table: Table,
}

impl CommandOutput {
    fn new<T: Serialize>(results: &T, diagnostics: Vec<Diagnostic>, outcome: Outcome, table: Table) -> Result<Self> {
        let results = serde_json::to_value(results).map_err(|e| CliError::Write { target: "results".into(), message: e.to_string() })?;
        Ok(Self { results, diagnostics, outcome, table })
    }
}

pub fn run_command(command: Command, exp: &Experiment) -> Result<CommandOutput> {
    match command {
        Command::Constant => cmd_constant(exp),
        Command::Verify => cmd_verify(exp),
        Command::Sharpness => cmd_sharpness(exp),
        Command::DilationProbe => cmd_dilation_probe(exp),
        Command::Geometry => cmd_geometry(exp),
    }
}
