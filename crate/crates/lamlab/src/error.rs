use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("cannot parse {0:?}: expected \"num/den\"")]
    Parse(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("main cardioid: degenerate minor")]
    DegenerateMinor,

    #[error("resource cap exceeded: {what} = {value}, cap is {cap}")]
    ResourceCap {
        what: &'static str,
        value: u64,
        cap: u64,
    },

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("class exceeded bound: {size} members, cap is {cap}")]
    ClassOverflow { size: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit status used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::Domain(_) | Error::DegenerateMinor => 1,
            Error::ResourceCap { .. } | Error::ClassOverflow { .. } => 2,
            Error::Consistency(_) => 3,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn consistency(msg: impl Into<String>) -> Self {
        Error::Consistency(msg.into())
    }
}
