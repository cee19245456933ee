use thiserror::Error;

/// Errors produced by state construction, likelihood evaluation, and inference.
#[derive(Debug, Error)]
pub enum Error {
    #[error("deformation parameter must satisfy 0 < q <= 1, got {0}")]
    InvalidDeformation(f64),

    #[error("truncation tail bound {tail_bound:.3e} exceeds eps_tail {eps_tail:.3e}; raise n_max or allow excess tail")]
    TruncationExcess { tail_bound: f64, eps_tail: f64 },

    #[error("odd cat state is undefined at alpha = 0 (normalization vanishes)")]
    DegenerateCat,

    #[error("amplitude vector must have nonzero norm")]
    ZeroNorm,

    #[error("target mean {target} is not bracketable for {kind} at q = {q}, n_max = {n_max}: attainable range is [{min_mean:.6}, {max_mean:.6}]")]
    UnreachableMean {
        target: f64,
        kind: &'static str,
        q: f64,
        n_max: usize,
        min_mean: f64,
        max_mean: f64,
    },

    #[error("invalid spin index: two_j = {two_j}, two_mp = {two_mp}, two_m = {two_m}")]
    InvalidSpinIndex { two_j: u32, two_mp: i64, two_m: i64 },

    #[error("spin magnitude two_j = {two_j} exceeds the supported maximum {max}")]
    SpinTooLarge { two_j: u32, max: u32 },

    #[error("outcome ({n1},{n2}) has total photon number {total} beyond support 2*n_max = {max_total}")]
    OutOfSupport { n1: usize, n2: usize, total: usize, max_total: usize },

    #[error("modes share no common cutoff: mode_a n_max = {a}, mode_b n_max = {b}")]
    CutoffMismatch { a: usize, b: usize },

    #[error("distribution deficiency {deficiency:.3e} exceeds {limit:.3e}; raise N_cap or n_max")]
    ExcessDeficiency { deficiency: f64, limit: f64 },

    #[error("dense oracle is restricted to N_cap <= {max}, got {got}")]
    OracleCapExceeded { got: usize, max: usize },

    #[error("likelihood of outcome ({n1},{n2}) vanishes on the whole phase grid; posterior update is degenerate")]
    DegenerateUpdate { n1: usize, n2: usize },

    #[error("posterior grid must have at least {min} points, got {got}")]
    GridTooCoarse { got: usize, min: usize },

    #[error("half-sample mode needs at least one sample")]
    EmptySamples,

    #[error("Fisher information must be positive, got {0}")]
    NonPositiveFisher(f64),

    #[error("empty sweep: no (q, mean) pairs to evaluate")]
    EmptySweep,

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("malformed table: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable discriminant for structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidDeformation(_) => "invalid_deformation",
            Error::TruncationExcess { .. } => "truncation_excess",
            Error::DegenerateCat => "degenerate_cat",
            Error::ZeroNorm => "zero_norm",
            Error::UnreachableMean { .. } => "unreachable_mean",
            Error::InvalidSpinIndex { .. } => "invalid_spin_index",
            Error::SpinTooLarge { .. } => "spin_too_large",
            Error::OutOfSupport { .. } => "out_of_support",
            Error::CutoffMismatch { .. } => "cutoff_mismatch",
            Error::ExcessDeficiency { .. } => "excess_deficiency",
            Error::OracleCapExceeded { .. } => "oracle_cap_exceeded",
            Error::DegenerateUpdate { .. } => "degenerate_update",
            Error::GridTooCoarse { .. } => "grid_too_coarse",
            Error::EmptySamples => "empty_samples",
            Error::NonPositiveFisher(_) => "non_positive_fisher",
            Error::EmptySweep => "empty_sweep",
            Error::InvalidConfig(_) => "invalid_config",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
