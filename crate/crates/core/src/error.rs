use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// All eigenvalues coincide, so the density of states is a point mass.
    #[error("degenerate spectrum: all {0} eigenvalues are equal, the density of states is a delta function")]
    DegenerateSpectrum(usize),

    /// `Ω` is maximal at `E_min`, so there is no positive finite temperature.
    #[error("no finite-temperature branch: {0}")]
    Frozen(String),

    #[error("outside domain: {0}")]
    Domain(String),

    /// `Ω′(E) = 0`: the temperature is infinite at this energy.
    #[error("infinite temperature at E = {0}")]
    InfiniteTemperature(f64),

    /// The specific-heat denominator `Ω′² − ΩΩ″` vanishes.
    #[error("divergent specific heat at E = {0}")]
    DivergentHeat(f64),

    #[error("internal consistency check failed: {0}")]
    InternalConsistency(String),

    #[error("insufficient statistics: {achieved} samples survived, {required} required")]
    InsufficientStatistics { achieved: u64, required: u64 },

    #[error("parse error: {0}")]
    Parse(String),
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
