use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("weight matrix has {rows} rows but rank {rank}; the torus must act with finite kernel")]
    RankDeficient { rows: usize, rank: usize },
    #[error("row {0} of the weight matrix is zero")]
    ZeroRow(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix {index} is not orthogonal (residual {residual:e})")]
    NotOrthogonal { index: usize, residual: f64 },
    #[error("group closure exceeded {max_order} elements")]
    NotClosed { max_order: usize },
    #[error("finite element {index} does not normalize the torus (residual {residual:e})")]
    NotNormalizing { index: usize, residual: f64 },
    #[error("column {0} of the weight matrix is zero")]
    FixedColumn(usize),
    #[error("killing Gram matrix is singular at this point")]
    SingularGram,
    #[error("plane vectors are parallel")]
    DegeneratePlane,
    #[error("vector is not horizontal (vertical part {0:e})")]
    NotHorizontal(f64),
    #[error("action is split")]
    IsSplit,
    #[error("action is not split")]
    NotSplit,
    #[error("finite-difference stencil leaves the principal stratum")]
    StepTooLarge,
    #[error("{n} invariant planes exceed the configured bound {max}")]
    TooManyPlanes { n: usize, max: usize },
    #[error("torus distance gap {gap:e} exceeds tolerance {tol:e}")]
    GridTooCoarse { gap: f64, tol: f64 },
    #[error("could not find a generic point off all mirrors")]
    DegenerateArrangement,
    #[error("reflection subgroup is not normal")]
    NotNormal,
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
