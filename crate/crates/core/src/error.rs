use thiserror::Error;

/// Errors raised by model construction, transforms, bounds and the harness.
#[derive(Debug, Error)]
pub enum SteinError {
    #[error("empty support")]
    EmptySupport,
    #[error("negative mass {0} at atom {1}")]
    NegativeMass(f64, f64),
    #[error("total mass is zero")]
    ZeroMass,
    #[error("atoms and masses have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("non-finite value in input: {0}")]
    NonFinite(String),
    #[error("state cap exceeded: {states} states > cap {cap}")]
    StateCap { states: u128, cap: u128 },
    #[error("component {index} has nonzero mean {mean}")]
    NonzeroMean { index: usize, mean: f64 },
    #[error("zero total variance")]
    ZeroVariance,
    #[error("model is not normalized: sum of variances is {0}")]
    Unnormalized(f64),
    #[error("model is not iid")]
    NotIid,
    #[error("invalid moments: {0}")]
    InvalidMoments(String),
    #[error("negative atom {0} in size-bias input")]
    NegativeAtom(f64),
    #[error("zero mean in size-bias input")]
    ZeroMean,
    #[error("quadrature failed to converge: estimated error {0:e}")]
    Quadrature(f64),
    #[error("invalid interval [{0}, {1}]")]
    Interval(f64, f64),
    #[error("lambda {0} outside (0, 1)")]
    Lambda(f64),
    #[error("insufficient Monte Carlo budget: {0}")]
    Budget(String),
    #[error("sample too small: {got} < {need}")]
    SampleTooSmall { got: usize, need: usize },
    #[error("invalid matrix: {0}")]
    Matrix(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("unknown task `{0}`")]
    UnknownTask(String),
    #[error("task `{task}` does not apply to model `{model}`")]
    TaskMismatch { task: String, model: String },
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = SteinError> = std::result::Result<T, E>;
