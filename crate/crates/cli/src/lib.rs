//! Config-driven runs over `inertia-core`: simulations, condition checks,
//! rate verdicts, inertial proximal iterations and parameter sweeps.
//!
//! Exit codes: 0 success, 1 internal error, 2 invalid config, 3 early stop,
//! 4 violated / growing, 5 boundary / inconclusive, 6 missing input file.
//! A sweep exits with the largest code among its points.
//!
//! `INERTIA_LAB_SEED` is reserved for stochastic features; nothing reads it yet.

pub mod commands;
pub mod config;
pub mod figures;
pub mod presets;

use std::fmt;
use std::str::FromStr;

use inertia_core::io::IoError;
use inertia_core::{AlgorithmError, AnalysisError, CertificateError, DynamicsError, ProblemError, ScheduleError};
use thiserror::Error;

pub use commands::{execute, execute_with_jobs, resolve_config, simulate_config, SimRun};
pub use config::RunConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INTERNAL: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_EARLY_STOP: i32 = 3;
pub const EXIT_VIOLATED: i32 = 4;
pub const EXIT_BOUNDARY: i32 = 5;
pub const EXIT_MISSING_INPUT: i32 = 6;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("missing input: {0}")]
    MissingInput(String),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Certificate(#[from] CertificateError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
    #[error(transparent)]
    Algorithm(#[from] AlgorithmError),
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{0}")]
    Internal(String),
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Io(IoError::Io(e))
    }
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::MissingInput(_) => EXIT_MISSING_INPUT,
            RunError::Io(_) | RunError::Internal(_) => EXIT_INTERNAL,
            _ => EXIT_CONFIG,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Simulate,
    Check,
    Rate,
    Ip,
    Sweep,
}

impl Command {
    pub fn as_str(&self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Check => "check",
            Command::Rate => "rate",
            Command::Ip => "ip",
            Command::Sweep => "sweep",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Command {
    type Err = RunError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "simulate" => Command::Simulate,
            "check" => Command::Check,
            "rate" => Command::Rate,
            "ip" => Command::Ip,
            "sweep" => Command::Sweep,
            other => return Err(RunError::Config(format!("unknown command '{other}'"))),
        })
    }
}
