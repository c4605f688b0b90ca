use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the evaluation, classification and verification layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid context: {0}")]
    InvalidContext(String),

    #[error("theta Laurent sum did not converge within {terms} terms at z = {z}")]
    NonConvergent { z: Complex64, terms: usize },

    #[error("argument {z} lies on the spiral q^Z (distance {distance:e})")]
    PoleAtSpiral { z: Complex64, distance: f64 },

    #[error("pole at z = {0}")]
    PoleAt(Complex64),

    #[error("matrix is not invertible (det = {0})")]
    NonInvertible(Complex64),

    #[error("eigenvalues {0} and {1} are numerically close but not equal")]
    NumericallyDefective(Complex64, Complex64),

    #[error("series argument {0} is outside the convergence domain")]
    DivergentInput(Complex64),

    #[error("denominator parameter {0} hits a zero factor before termination")]
    PoleInC(Complex64),

    #[error("parameters are resonant: {0}")]
    UnsupportedResonant(String),

    #[error("z = {0} is outside the native domain of the local solution")]
    OutOfDomain(Complex64),

    #[error("continuation from z = {0} crosses a pole of A")]
    PathThroughPole(Complex64),

    #[error("continuation from z = {0} does not re-enter the native domain")]
    NoReentry(Complex64),

    #[error("degenerate denominator in connection coefficient: ({0};q)_inf vanishes")]
    DegenerateDenominator(String),

    #[error("base point {0} is singular for the twisted connection matrix")]
    BasePointSingular(Complex64),

    #[error("zero input to spiral decomposition")]
    ZeroInput,

    #[error("borderline membership: {value} is at distance {distance:e} from {set}")]
    BorderlineMembership {
        value: Complex64,
        set: String,
        distance: f64,
    },

    #[error("{0} is not unimodular")]
    NotUnimodular(Complex64),

    #[error("no admissible base point found")]
    NoBasePoint,
}

pub type Result<T> = std::result::Result<T, Error>;
