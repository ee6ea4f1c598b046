use qcodes::classify1d::ClassifyError;
use qcodes::codeanalysis::CodeError;
use qcodes::laurent::LaurentError;
use qcodes::pauli::PauliError;
use qcodes::smith::SmithError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 1,
            CliError::Inconclusive(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl From<CodeError> for CliError {
    fn from(e: CodeError) -> Self {
        match e {
            CodeError::Internal(m) => CliError::Internal(m),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<PauliError> for CliError {
    fn from(e: PauliError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<LaurentError> for CliError {
    fn from(e: LaurentError) -> Self {
        match e {
            LaurentError::Code(c) => c.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<SmithError> for CliError {
    fn from(e: SmithError) -> Self {
        match e {
            SmithError::Verification(m) => CliError::Internal(m),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<ClassifyError> for CliError {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::Inconclusive(m) => CliError::Inconclusive(m),
            ClassifyError::Internal(m) => CliError::Internal(m),
            ClassifyError::Laurent(l) => l.into(),
            ClassifyError::Smith(s) => s.into(),
            other => CliError::Input(other.to_string()),
        }
    }
}
