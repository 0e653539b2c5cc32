use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Wedge or construction would exceed the ambient dimension.
    GradeOverflow { grade: usize, dim: usize },
    GradeMismatch { expected: usize, found: usize },
    DimensionMismatch { expected: usize, found: usize },
    /// Index tuple that is out of range or has a repeated entry.
    InvalidIndex,
    /// Contraction of a function.
    ContractGradeZero,
    SingularMatrix,
    NotSymmetric,
    NotPositiveDefinite,
    /// Volume form with a vanishing coefficient.
    DegenerateVolume,
    /// Torus generators with `h² = g_UU g_VV − g_UV² = 0`.
    DegenerateAction,
    /// `h² = s²`: the reduction has a genuine pole there.
    SingularLevel { s: f64, h2: f64 },
    ZeroLevel,
    /// `f ≤ 4` on the quotient.
    InvalidF { f: f64 },
    Domain(&'static str),
    PoleProximity { s: f64 },
    NonFinite { s: f64 },
    Degenerate(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::GradeOverflow { grade, dim } => {
                write!(f, "grade {grade} exceeds dimension {dim}")
            }
            Error::GradeMismatch { expected, found } => {
                write!(f, "expected a form of grade {expected}, found grade {found}")
            }
            Error::DimensionMismatch { expected, found } => {
                write!(f, "expected dimension {expected}, found {found}")
            }
            Error::InvalidIndex => write!(f, "index tuple out of range or repeated"),
            Error::ContractGradeZero => write!(f, "cannot contract a vector into a 0-form"),
            Error::SingularMatrix => write!(f, "singular matrix"),
            Error::NotSymmetric => write!(f, "metric is not symmetric"),
            Error::NotPositiveDefinite => write!(f, "metric is not positive definite"),
            Error::DegenerateVolume => write!(f, "volume form vanishes"),
            Error::DegenerateAction => write!(f, "torus generators are linearly dependent (h² = 0)"),
            Error::SingularLevel { s, h2 } => {
                write!(f, "singular level: h² = {h2} equals s² at s = {s}")
            }
            Error::ZeroLevel => write!(f, "level s = 0 is not allowed"),
            Error::InvalidF { f: value } => write!(f, "f = {value} must exceed 4"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::PoleProximity { s } => write!(f, "pole guard triggered at s = {s}"),
            Error::NonFinite { s } => write!(f, "non-finite state at s = {s}"),
            Error::Degenerate(msg) => write!(f, "degenerate input: {msg}"),
        }
    }
}

impl core::error::Error for Error {}
