use orbicone_core::Error;

/// Exit codes: 0 success, 1 output IO, 2 invalid spec or precondition,
/// 3 resource bound exceeded, 4 numerical degeneracy.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid spec: {0}")]
    SpecInvalid(String),
    #[error("resource bound exceeded: {0}")]
    ResourceBound(String),
    #[error("numerical degeneracy: {0}")]
    Degenerate(String),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Output(_) => 1,
            CliError::SpecInvalid(_) => 2,
            CliError::ResourceBound(_) => 3,
            CliError::Degenerate(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::TooManyPlanes { .. } | Error::NotClosed { .. } | Error::GridTooCoarse { .. } => {
                CliError::ResourceBound(msg)
            }
            Error::SingularGram
            | Error::DegeneratePlane
            | Error::NotHorizontal(_)
            | Error::StepTooLarge
            | Error::DegenerateArrangement
            | Error::NotNormal => CliError::Degenerate(msg),
            _ => CliError::SpecInvalid(msg),
        }
    }
}
