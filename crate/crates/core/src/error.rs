use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("non-simple curve: segments {first} and {second} intersect")]
    NonSimpleCurve { first: usize, second: usize },

    #[error("vanishing tangent at t = {t}")]
    VanishingTangent { t: f64 },

    #[error("unbounded domain specification: {0}")]
    Unbounded(String),

    #[error("point is not on the boundary (distance {distance:e}, tolerance {tolerance:e})")]
    NotOnBoundary { distance: f64, tolerance: f64 },

    #[error("point lies outside the domain (signed distance {distance:e})")]
    OutsideDomain { distance: f64 },

    #[error("too close to boundary: distance {distance:e} is inside the {collar:e} collar")]
    TooCloseToBoundary { distance: f64, collar: f64 },

    #[error("argument out of range: {0}")]
    OutOfRange(String),

    #[error("{stage} did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence {
        stage: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("singular Jacobian in {0}")]
    SingularJacobian(&'static str),

    #[error("admissibility violated at t = {t}: {reason}")]
    Admissibility { t: f64, reason: String },

    #[error("pullback domain needs a smaller neighbourhood: {0}")]
    ShrinkRequest(String),

    #[error("band width {band:e} exceeds the injectivity radius of the normal map (about {radius:e})")]
    BandTooWide { band: f64, radius: f64 },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn at_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    /// Innermost error, skipping stage wrappers.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}

pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| e.at_stage(stage))
    }
}
