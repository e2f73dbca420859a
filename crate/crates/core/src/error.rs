use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("monomial basis of size {size} exceeds the cap of {cap}")]
    SizeLimit { size: String, cap: usize },

    #[error("no real decay contour exists for odd degree {degree}: P(-x) = -P(x) flips the sign of Re P")]
    UnsupportedContour { degree: u32 },

    #[error("decay predicate fails: max Re P on the unit sphere is {worst_value:.6e} (needs <= -{margin:e})")]
    DecayFailure { worst_value: f64, margin: f64 },

    #[error("tensor quadrature supports 1 <= n <= 3, got n = {0}")]
    UnsupportedDimension(usize),

    #[error("finite differences support total order <= 4, got {0}")]
    UnsupportedOrder(u32),

    #[error("moment degree {degree} exceeds the cap of {cap}")]
    MomentDegree { degree: u32, cap: u32 },

    #[error("leading coefficient a_(d,0) is zero; normalized discriminant undefined")]
    ZeroLeadingCoefficient,

    #[error("integer {0} does not fit into a machine word")]
    Overflow(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Usage/domain errors as opposed to failed numerical checks.
    pub fn is_domain(&self) -> bool {
        !matches!(self, Error::Io(_))
    }
}
