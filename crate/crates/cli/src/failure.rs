use std::fmt;
use std::process::ExitCode;

/// A command failure tagged with its exit code class.
#[derive(Debug)]
pub enum Failure {
    /// Bad flags, config values or missing required options.
    Usage(anyhow::Error),
    /// Inputs that cannot be read or do not match their schema.
    Data(anyhow::Error),
    /// A result violated an invariant the library guarantees.
    Internal(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Data(_) => 2,
            Failure::Internal(_) => 3,
        }
    }

    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, err) = match self {
            Failure::Usage(e) => ("usage error", e),
            Failure::Data(e) => ("data error", e),
            Failure::Internal(e) => ("internal error", e),
        };
        write!(f, "{kind}: {err:#}")
    }
}

pub type CmdResult<T = ()> = Result<T, Failure>;

pub fn usage(msg: impl fmt::Display) -> Failure {
    Failure::Usage(anyhow::anyhow!("{msg}"))
}

pub fn data(msg: impl fmt::Display) -> Failure {
    Failure::Data(anyhow::anyhow!("{msg}"))
}

pub fn internal(msg: impl fmt::Display) -> Failure {
    Failure::Internal(anyhow::anyhow!("{msg}"))
}

/// Attach classification to fallible calls.
pub trait Classify<T> {
    fn or_usage(self, ctx: &str) -> CmdResult<T>;
    fn or_data(self, ctx: &str) -> CmdResult<T>;
    fn or_internal(self, ctx: &str) -> CmdResult<T>;
}

impl<T, E> Classify<T> for Result<T, E>
where
    E: std::error::Error + Send + Sync + 'static,
{
    fn or_usage(self, ctx: &str) -> CmdResult<T> {
        self.map_err(|e| Failure::Usage(anyhow::Error::new(e).context(ctx.to_owned())))
    }

    fn or_data(self, ctx: &str) -> CmdResult<T> {
        self.map_err(|e| Failure::Data(anyhow::Error::new(e).context(ctx.to_owned())))
    }

    fn or_internal(self, ctx: &str) -> CmdResult<T> {
        self.map_err(|e| Failure::Internal(anyhow::Error::new(e).context(ctx.to_owned())))
    }
}
