use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input has too low a degree or is otherwise unusable (e.g. roots of a constant).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// A rational expression collapsed, e.g. a zero closed-loop denominator.
    #[error("algebraic degeneracy: {0}")]
    AlgebraicDegeneracy(String),

    #[error("transfer function evaluated at a pole (omega = {omega} rad/s)")]
    PoleEvaluation { omega: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no contact: environment has zero stiffness and zero damping")]
    NoContact,

    #[error("root finder failed: {0}")]
    RootFinder(String),

    #[error("root locus failed at gain {gain}: {source}")]
    RootLocus { gain: f64, source: Box<Error> },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("simulation diverged at t = {t} s")]
    Divergence { t: f64 },
}
