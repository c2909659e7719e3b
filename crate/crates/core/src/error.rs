use std::fmt;

/// Which admissibility rule a model configuration broke.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConfigRule {
    /// The semiclassical parameter must lie in (0, 1).
    EpsilonRange,
    /// The initial speed must be positive.
    SpeedPositive,
    /// At least one oscillator is required.
    NoOscillators,
    /// The potential width must be positive.
    WidthPositive,
    /// Oscillator distances must be strictly increasing (assumption (A)).
    NormOrdering,
    /// No two oscillators may be aligned with the origin (assumption (B)).
    Alignment,
    /// The final time must exceed the last arrival time.
    FinalTime,
    /// Oscillator positions must be non-zero.
    ZeroPosition,
    /// Quadrature settings out of range.
    Quadrature,
    /// Any other malformed field.
    Field,
}

impl fmt::Display for ConfigRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConfigRule::EpsilonRange => "epsilon range",
            ConfigRule::SpeedPositive => "positive speed",
            ConfigRule::NoOscillators => "oscillator count",
            ConfigRule::WidthPositive => "positive potential width",
            ConfigRule::NormOrdering => "distance ordering assumption (A)",
            ConfigRule::Alignment => "alignment assumption (B)",
            ConfigRule::FinalTime => "final time",
            ConfigRule::ZeroPosition => "non-zero position",
            ConfigRule::Quadrature => "quadrature settings",
            ConfigRule::Field => "field",
        };
        f.write_str(s)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration ({rule}): {detail}")]
    Config { rule: ConfigRule, detail: String },

    #[error("config parse error: {0}")]
    Parse(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(rule: ConfigRule, detail: impl Into<String>) -> Self {
        Error::Config { rule, detail: detail.into() }
    }

    pub(crate) fn numerical(detail: impl Into<String>) -> Self {
        Error::Numerical(detail.into())
    }

    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical(_) => 1,
            Error::Config { .. } | Error::Parse(_) => 2,
            Error::Io { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
