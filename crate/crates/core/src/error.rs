use thiserror::Error;

/// Errors raised by the analysis and synthesis routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point coincides with the RIS; range and angle are undefined")]
    CoincidentWithRis,

    #[error("range must be strictly positive, got {0} m")]
    NonPositiveRange(f64),

    #[error("{what} index {index} out of range (len {len})")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid selection sizes: {0}")]
    InvalidSizes(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("channel has zero norm; beamformer is undefined")]
    DegenerateChannel,

    #[error("eavesdropper is equidistant from the RIS; no range null exists")]
    EquidistantEve,

    #[error("no feasible frequency increment: smallest null needs {required_hz} Hz but the shift limit allows {limit_hz} Hz")]
    InfeasibleIncrement { required_hz: f64, limit_hz: f64 },

    #[error("enumeration of {count} subsets exceeds the guard of {guard}")]
    CombinatorialGuard { count: u128, guard: u128 },

    #[error("grid contains no points inside the requested region")]
    EmptyGrid,

    #[error("region cut is degenerate: {0}")]
    DegenerateRegion(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
