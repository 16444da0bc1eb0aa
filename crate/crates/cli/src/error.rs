use thiserror::Error;

/// Command failure, grouped by the exit code it maps to.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad or missing configuration: exit code 2.
    #[error("configuration error: {0}")]
    Config(String),
    /// Unreadable or malformed input data: exit code 3.
    #[error("input error: {0:#}")]
    Input(anyhow::Error),
    /// Evaluation could not be carried out: exit code 4.
    #[error("evaluation error: {0:#}")]
    Eval(anyhow::Error),
    #[error("{0:#}")]
    Other(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Input(_) => 3,
            CliError::Eval(_) => 4,
            CliError::Other(_) => 1,
        }
    }

    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }
}

impl From<wetlm_core::ParamError> for CliError {
    fn from(e: wetlm_core::ParamError) -> Self {
        CliError::Config(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Attaches context and a category to fallible calls.
pub(crate) trait Categorize<T> {
    fn input(self, ctx: impl FnOnce() -> String) -> CliResult<T>;
    fn eval(self, ctx: impl FnOnce() -> String) -> CliResult<T>;
    fn other(self, ctx: impl FnOnce() -> String) -> CliResult<T>;
}

impl<T, E> Categorize<T> for Result<T, E>
where
    E: std::error::Error + Send + Sync + 'static,
{
    fn input(self, ctx: impl FnOnce() -> String) -> CliResult<T> {
        self.map_err(|e| CliError::Input(anyhow::Error::new(e).context(ctx())))
    }

    fn eval(self, ctx: impl FnOnce() -> String) -> CliResult<T> {
        self.map_err(|e| CliError::Eval(anyhow::Error::new(e).context(ctx())))
    }

    fn other(self, ctx: impl FnOnce() -> String) -> CliResult<T> {
        self.map_err(|e| CliError::Other(anyhow::Error::new(e).context(ctx())))
    }
}
