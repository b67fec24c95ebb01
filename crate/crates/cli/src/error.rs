use curvlab_core::CurvError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Domain(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn parse(msg: impl Into<String>) -> Self {
        CliError::Parse(msg.into())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 3,
            _ => 2,
        }
    }
}

impl From<CurvError> for CliError {
    fn from(e: CurvError) -> Self {
        match e {
            CurvError::OutsideDomain(_)
            | CurvError::SingularMetric(_)
            | CurvError::NonPositiveWarp(_) => CliError::Domain(e.to_string()),
            e => CliError::Parse(e.to_string()),
        }
    }
}
