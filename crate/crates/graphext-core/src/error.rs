use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    InvalidGraph(&'static str),
    ShapeMismatch { expected: usize, got: usize },
    InsufficientStencil { points: usize },
    DegenerateAiryEdge { edge: usize },
    FrameInapplicable(&'static str),
    NonSquare { rows: usize, cols: usize },
    NonHermitianForm { residual: f64 },
    SingularForm { sigma_min: f64 },
    DegenerateBasis,
    BoundaryCaseCoefficients { edge: usize },
    InconsistentDiscretization,
    SolveFailure { condition: f64 },
    HorizonExceeded { tail_mass: f64 },
    Unsupported(&'static str),
    InvalidParameter(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidGraph(why) => write!(f, "invalid graph: {why}"),
            Error::ShapeMismatch { expected, got } => {
                write!(f, "shape mismatch: expected {expected}, got {got}")
            }
            Error::InsufficientStencil { points } => {
                write!(f, "insufficient stencil: {points} points on an edge, need 7")
            }
            Error::DegenerateAiryEdge { edge } => write!(f, "degenerate Airy edge {edge}"),
            Error::FrameInapplicable(why) => write!(f, "frame inapplicable: {why}"),
            Error::NonSquare { rows, cols } => write!(f, "non-square matrix {rows}x{cols}"),
            Error::NonHermitianForm { residual } => {
                write!(f, "form is not Hermitian (residual {residual:e})")
            }
            Error::SingularForm { sigma_min } => {
                write!(f, "form is singular (smallest singular value {sigma_min:e})")
            }
            Error::DegenerateBasis => write!(f, "degenerate basis"),
            Error::BoundaryCaseCoefficients { edge } => {
                write!(f, "boundary-case coefficients on edge {edge}")
            }
            Error::InconsistentDiscretization => write!(f, "inconsistent discretization"),
            Error::SolveFailure { condition } => {
                write!(f, "linear solve failed (condition estimate {condition:e})")
            }
            Error::HorizonExceeded { tail_mass } => {
                write!(f, "horizon exceeded (tail mass {tail_mass:e})")
            }
            Error::Unsupported(what) => write!(f, "unsupported: {what}"),
            Error::InvalidParameter(why) => write!(f, "invalid parameter: {why}"),
        }
    }
}

impl core::error::Error for Error {}
