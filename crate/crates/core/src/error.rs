use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParams(String),

    #[error("invalid agent: {0}")]
    InvalidAgent(String),

    #[error("invalid task: {0}")]
    InvalidTask(String),

    #[error("empty team")]
    EmptyTeam,

    #[error("at least 2 functions are required for a normalized diversity index, got {0}")]
    TooFewFunctions(usize),

    #[error("skill vectors differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("team has no skill mass")]
    ZeroSkillMass,

    #[error("team generation failed: {0}")]
    Generation(String),

    #[error("invalid sweep grid: {0}")]
    InvalidGrid(String),

    #[error("statistics: {0}")]
    Stats(String),

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}
