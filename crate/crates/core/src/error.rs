use thiserror::Error;

/// Errors raised by the numerical core.
///
/// The variants are grouped so that callers (the CLI in particular) can map
/// them onto coarse failure classes: configuration problems versus numerical
/// failures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("evaluation error at x = {x}: {reason}")]
    Evaluation { x: f64, reason: String },

    #[error("expression parse error at byte {pos}: {reason}")]
    Parse { pos: usize, reason: String },

    #[error("solver error for level {index}: {reason}")]
    Solver { index: usize, reason: String },

    #[error("pairing error: {0}")]
    Pairing(String),

    #[error("phase error: {0}")]
    Phase(String),

    #[error("singular deformation: {0}")]
    SingularFamily(String),

    #[error("contour passes through a zero of the polynomial (min |p| = {min_abs:e})")]
    ZeroOnContour { min_abs: f64 },
}

impl Error {
    /// True for errors caused by the input description rather than by the
    /// numerics.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::Parse { .. } | Error::Domain(_)
        )
    }

    /// True for failures of the numerics themselves (as opposed to a check
    /// that ran and came out negative).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Degenerate(_)
                | Error::Evaluation { .. }
                | Error::Solver { .. }
                | Error::SingularFamily(_)
                | Error::ZeroOnContour { .. }
        )
    }

    /// Stable snake_case name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::Domain(_) => "domain",
            Error::Degenerate(_) => "degenerate",
            Error::Evaluation { .. } => "evaluation",
            Error::Parse { .. } => "parse",
            Error::Solver { .. } => "solver",
            Error::Pairing(_) => "pairing",
            Error::Phase(_) => "phase",
            Error::SingularFamily(_) => "singular_family",
            Error::ZeroOnContour { .. } => "zero_on_contour",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
