use thiserror::Error;

/// Every failure the numerical modules can report.
///
/// Positions and parameters are carried as `f64` so the error type does not
/// depend on the scalar the computation ran in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("energy {energy} is not below the barrier height {height}; tunneling formulas do not apply")]
    AboveBarrier { energy: f64, height: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("series did not converge after {terms} terms")]
    Convergence { terms: usize },

    #[error("amplitude has a node near x = {x}; quantum potential is singular there")]
    Singularity { x: f64 },

    #[error("turning point topology: {0}")]
    Topology(String),

    #[error("degenerate turning point at x = {x} (V' = 0)")]
    DegenerateTurningPoint { x: f64 },

    #[error("barrier too thin for WKB: Airy windows overlap (total width {width}, windows {left} + {right}); use the rectangular or exact solver")]
    ThinBarrier { width: f64, left: f64, right: f64 },

    #[error("orientation: {0}")]
    Orientation(String),

    #[error("mode frequency squared {omega_sq} is not positive at t = {t}; coupling too negative")]
    Tachyonic { omega_sq: f64, t: f64 },

    #[error("Gaussian width collapsed at t = {t}; integrate through the mode function instead")]
    Stiffness { t: f64 },

    #[error("inconsistent branch: Im(d ln xi/dt) = {im} is not positive")]
    InconsistentBranch { im: f64 },

    #[error("precision: {0}")]
    Precision(String),

    #[error("grid resolution too coarse: {0}")]
    Resolution(String),

    #[error("perturbative regime violated (2MaΔV/βħ² = {exponent}); exact re-solved probability is {exact}")]
    OutOfRegime { exponent: f64, exact: f64 },

    #[error("grid alignment: {0}")]
    Alignment(String),
}

impl Error {
    /// Stable short name used by the command-line front end.
    pub fn name(&self) -> &'static str {
        match self {
            Error::AboveBarrier { .. } => "AboveBarrier",
            Error::Domain(_) => "Domain",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::Convergence { .. } => "Convergence",
            Error::Singularity { .. } => "Singularity",
            Error::Topology(_) => "Topology",
            Error::DegenerateTurningPoint { .. } => "DegenerateTurningPoint",
            Error::ThinBarrier { .. } => "ThinBarrier",
            Error::Orientation(_) => "Orientation",
            Error::Tachyonic { .. } => "Tachyonic",
            Error::Stiffness { .. } => "Stiffness",
            Error::InconsistentBranch { .. } => "InconsistentBranch",
            Error::Precision(_) => "Precision",
            Error::Resolution(_) => "Resolution",
            Error::OutOfRegime { .. } => "OutOfRegime",
            Error::Alignment(_) => "Alignment",
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
