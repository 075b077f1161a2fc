use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// `E - U(x)` vanished or turned negative where the Jacobi metric is needed.
    #[error("Hill boundary violation at |x| = {radius}: E - U(x) = {margin:e}")]
    HillBoundaryViolation { radius: f64, margin: f64 },

    /// The trajectory entered the collision guard around a singular centre.
    /// `param` is that of the last valid sample, `radius` the offending one.
    #[error("near collision: radius {radius:e} below guard {guard:e} after parameter {param}")]
    NearCollision { param: f64, radius: f64, guard: f64 },

    #[error("adaptive step {step:e} fell below the minimum step at parameter {param}")]
    StepUnderflow { param: f64, step: f64 },

    #[error("state is off the energy surface: |H - E| = {residual:e} exceeds {tolerance:e}")]
    EnergySurfaceViolation { residual: f64, tolerance: f64 },

    #[error("position {norm:e} too close to the origin")]
    OriginSingularity { norm: f64 },

    #[error("momentum {norm:e} too close to zero")]
    ZeroMomentum { norm: f64 },

    #[error("bound orbit required: energy {energy} is not negative")]
    PositiveEnergy { energy: f64 },

    #[error("implicit step did not converge after {iterations} iterations (residual {residual:e})")]
    ImplicitSolveFailed { iterations: usize, residual: f64 },

    #[error("invalid system parameters: {0}")]
    InvalidSpec(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("sample {index}: {source}")]
    AtSample { index: usize, source: Box<Error> },
}

impl Error {
    /// Tags an error with the index of the sample that produced it.
    pub fn at_sample(self, index: usize) -> Error {
        Error::AtSample { index, source: Box::new(self) }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
