use thiserror::Error;

/// Error type shared by all modules of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("Lebesgue exponent must satisfy p >= 1, got {0}")]
    InvalidExponent(f64),

    #[error("stationary point requires t > 0, got t = {0}")]
    NonPositiveTime(f64),

    #[error("critical exponent: p = 1 + 2/d (p = {p}, d = {d}) makes the phase-correction prefactor singular")]
    CriticalExponent { p: f64, d: usize },

    #[error("gauge reduction requires gamma != 0")]
    DegenerateGamma,

    #[error("parameters outside supported range: {0}")]
    UnsupportedRange(String),

    #[error("oscillatory quadrature did not converge: {0}")]
    QuadratureStall(String),

    #[error("amplitude has no derivative evaluator; the integration-by-parts transform needs one")]
    MissingDerivative,

    #[error("spectral tail mass {fraction:.3e} exceeds tolerance {tol:.3e} at t = {t}")]
    TailBlowup { t: f64, fraction: f64, tol: f64 },

    #[error("solver configuration: {0}")]
    InvalidSolveConfig(String),

    #[error(
        "Picard iteration is not contracting: delta ratio {ratio:.3} >= 1 at iterate {iterate} \
         (data size {data_norm:.3e}); reduce the datum or increase T_start"
    )]
    NonContraction {
        iterate: usize,
        ratio: f64,
        data_norm: f64,
    },

    #[error("power-law fit: {0}")]
    FitError(String),

    #[error("inadmissible Strichartz pair (q={q}, r={r}, d={d}): {reason}")]
    InadmissiblePair {
        q: f64,
        r: f64,
        d: usize,
        reason: String,
    },

    #[error("field I/O: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed field file: {0}")]
    Format(String),
}
