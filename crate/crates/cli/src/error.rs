use plflab_core::econometrics::EconError;
use plflab_core::panel::PanelError;
use plflab_core::SimError;
use thiserror::Error;

/// Failure of a subcommand; each variant maps to a fixed exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, unparsable or schema-violating input (exit 2).
    #[error("{0}")]
    Input(String),
    /// Reading or writing files failed (exit 3).
    #[error("{0}")]
    Io(String),
    /// Estimation or arithmetic failure on valid input (exit 4).
    #[error("{0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::InvalidScenario(_) | SimError::ScheduleConflict(_) | SimError::BlockOutOfRange { .. } => {
                CliError::Input(e.to_string())
            }
            SimError::Invariant { .. } | SimError::Engine(_) => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<EconError> for CliError {
    fn from(e: EconError) -> Self {
        match e {
            EconError::InvalidInput(_) | EconError::RankOutOfRange { .. } | EconError::EmptyInput => {
                CliError::Input(e.to_string())
            }
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<PanelError> for CliError {
    fn from(e: PanelError) -> Self {
        match e {
            PanelError::Csv(ref c) if c.is_io_error() => CliError::Io(e.to_string()),
            PanelError::Series(inner) => inner.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

pub fn csv_error(what: &str, e: csv::Error) -> CliError {
    if e.is_io_error() {
        CliError::Io(format!("{what}: {e}"))
    } else {
        CliError::Input(format!("{what}: {e}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_are_stable() {
        assert_eq!(CliError::Input(String::new()).exit_code(), 2);
        assert_eq!(CliError::Io(String::new()).exit_code(), 3);
        assert_eq!(CliError::Numerical(String::new()).exit_code(), 4);
    }

    #[test]
    fn library_errors_map_by_kind() {
        let code = |e: CliError| e.exit_code();
        assert_eq!(code(SimError::InvalidScenario("x".into()).into()), 2);
        assert_eq!(code(SimError::Invariant { block: 1, msg: "x".into() }.into()), 4);
        assert_eq!(code(EconError::InsufficientObservations { needed: 10, have: 3 }.into()), 4);
        assert_eq!(code(EconError::RankOutOfRange { rank: 4, k: 3 }.into()), 2);
        assert_eq!(code(EconError::SingularDesign.into()), 4);
        assert_eq!(code(PanelError::MissingPair("a".into(), "b".into()).into()), 2);
        assert_eq!(code(PanelError::Series(EconError::DegenerateRegressor).into()), 4);
    }
}
