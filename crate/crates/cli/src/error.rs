use std::process::ExitCode;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("schema: {0}")]
    Schema(String),
    #[error(transparent)]
    Model(#[from] tc_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("plot: {0}")]
    Plot(String),
}

impl CliError {
    /// 2 for anything the user can fix in the configuration or input,
    /// 3 for numerical non-convergence, 1 otherwise.
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) | CliError::Schema(_) => ExitCode::from(2),
            CliError::Model(e) if e.is_numerical() => ExitCode::from(3),
            CliError::Model(_) => ExitCode::from(2),
            CliError::Io(_) | CliError::Csv(_) | CliError::Plot(_) => ExitCode::from(1),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let code = |e: CliError| format!("{:?}", e.exit_code());
        assert_eq!(code(CliError::Config("x".into())), format!("{:?}", ExitCode::from(2)));
        assert_eq!(
            code(tc_core::Error::NoConvergence { residual: 1.0, attempts: 3 }.into()),
            format!("{:?}", ExitCode::from(3))
        );
        assert_eq!(
            code(tc_core::Error::InvalidParams("n".into()).into()),
            format!("{:?}", ExitCode::from(2))
        );
    }
}
