use thiserror::Error;

/// Library-wide error type.
///
/// Variants are grouped by failure class: grid/domain misuse, numerical
/// blow-ups, and structural failures of the winding analysis (conditions not
/// met, fibers unresolvable, ambiguous matching). The CLI maps the numerical
/// and structural classes to exit code 1 and usage problems to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("time {t} is not aligned to the grid (dt = {dt})")]
    GridMisaligned { t: f64, dt: f64 },

    #[error("time {t} outside path domain [{t_min}, {t_max}]")]
    DomainExceeded { t: f64, t_min: f64, t_max: f64 },

    #[error("path has no generator stream (imported from values); cannot {op}")]
    NoStream { op: &'static str },

    #[error("invalid grid: t_min = {t_min}, t_max = {t_max}, dt = {dt}")]
    InvalidGrid { t_min: f64, t_max: f64, dt: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("state norm {norm:.3e} exceeded blow-up guard at t = {t}")]
    BlowUp { t: f64, norm: f64 },

    #[error("initial point lies in the excluded set: {0}")]
    DegenerateStart(String),

    #[error("angle advance is not uniform across probes: {details}")]
    AngleNotUniform { details: String },

    #[error("angle does not advance monotonically along the probe trajectory")]
    AngleNotMonotone,

    #[error("fiber contraction condition fails: operator norm bound {lambda:.6} >= 1 over the sampled region (try a larger block count n0)")]
    ContractionFailed { lambda: f64 },

    #[error("fiber components unresolved at depth {depth}: cluster gap {gap:.3e} below floor {floor:.3e} (increase the pullback depth)")]
    FiberUnresolved { depth: usize, gap: f64, floor: f64 },

    #[error("ambiguous component match: point at distance {d1:.3e} and {d2:.3e} from two clusters (tolerance {tol:.3e})")]
    AmbiguousMatch { d1: f64, d2: f64, tol: f64 },

    #[error("no component within tolerance {tol:.3e} (nearest at {nearest:.3e})")]
    UnmatchedComponent { nearest: f64, tol: f64 },

    #[error("component mapping is not a bijection: {details}")]
    NotBijective { details: String },

    #[error("winding budget exceeded: no return to the starting component within {budget} windings")]
    WindingBudget { budget: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("malformed CSV input at line {line}: {msg}")]
    Csv { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable tag for structured error output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::GridMisaligned { .. } => "grid_misaligned",
            Error::DomainExceeded { .. } => "domain_exceeded",
            Error::NoStream { .. } => "no_stream",
            Error::InvalidGrid { .. } => "invalid_grid",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::BlowUp { .. } => "blow_up",
            Error::DegenerateStart(_) => "degenerate_start",
            Error::AngleNotUniform { .. } => "angle_not_uniform",
            Error::AngleNotMonotone => "angle_not_monotone",
            Error::ContractionFailed { .. } => "contraction_failed",
            Error::FiberUnresolved { .. } => "fiber_unresolved",
            Error::AmbiguousMatch { .. } => "ambiguous_match",
            Error::UnmatchedComponent { .. } => "unmatched_component",
            Error::NotBijective { .. } => "not_bijective",
            Error::WindingBudget { .. } => "winding_budget",
            Error::Config(_) => "config",
            Error::Csv { .. } => "csv",
            Error::Io(_) => "io",
        }
    }

    /// True for failures of a numerical or structural condition (as opposed
    /// to misuse of the API or I/O trouble). The CLI reports these with exit
    /// code 1.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::BlowUp { .. }
                | Error::AngleNotUniform { .. }
                | Error::AngleNotMonotone
                | Error::ContractionFailed { .. }
                | Error::FiberUnresolved { .. }
                | Error::AmbiguousMatch { .. }
                | Error::UnmatchedComponent { .. }
                | Error::NotBijective { .. }
                | Error::WindingBudget { .. }
                | Error::DegenerateStart(_)
        )
    }
}
