use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("subset {{{0}}} is not contained in any context")]
    SubsetNotMeasurable(String),

    #[error("scenario too large: {n} measurements (maximum {max})")]
    TooLarge { n: usize, max: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid behavior: {0}")]
    InvalidBehavior(String),

    #[error("behavior violates no-disturbance: {count} marginal(s) disagree, worst deviation {worst:.3e}")]
    NotNoDisturbance { count: usize, worst: f64 },

    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("block structure violated: deviation {0:.3e} from M ⊕ -M")]
    BlockStructureViolated(f64),

    #[error("parameter phi = {0} is singular")]
    SingularParameter(f64),

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
