use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain mismatch: {0}")]
    Domain(String),

    #[error("function is not square integrable: norm grows under refinement ({0})")]
    Integrability(String),

    #[error("evaluation failed at x = {x}")]
    Evaluation { x: f64 },

    #[error("iteration did not converge after {iterations} steps (last change {change:e})")]
    Convergence { iterations: usize, change: f64 },

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("spectral parameter {0} lies on the spectrum")]
    Spectrum(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("function fails the generator domain probe: {0}")]
    DomainOfGenerator(String),

    #[error("point z = {re} + {im}i is too close to the origin")]
    SingularPoint { re: f64, im: f64 },

    #[error("ill-conditioned system (condition number {0:e})")]
    IllConditioned(f64),

    #[error("block window too small: tail {tail:e} exceeds tolerance, try N = {suggested}")]
    Window { tail: f64, suggested: usize },

    #[error("symbol is not unimodular: ||q(x)| - 1| = {deviation:e} at x = {x}")]
    Unimodular { x: f64, deviation: f64 },
}
