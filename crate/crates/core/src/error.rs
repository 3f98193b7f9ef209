//! Error type shared by all modules.

use crate::Complex;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("cannot take roots of the zero polynomial")]
    ZeroPolynomial,
    #[error("root solver did not converge after {iterations} iterations; residuals {residuals:?}")]
    RootsNoConvergence {
        iterations: usize,
        residuals: Vec<f64>,
    },
    #[error("polynomial is not divisible by (w - u): remainder norm {remainder_norm:.3e} exceeds {tolerance:.3e}")]
    NotDivisible {
        remainder_norm: f64,
        tolerance: f64,
    },
    #[error("resultant vanishes identically: the polynomials share a factor")]
    SharedFactor,
    #[error("polynomials have a common root near {root}")]
    CommonRoot { root: Complex },
    #[error("curve is degenerate: {reason}")]
    DegenerateCurve { reason: String },
    #[error("slice at z = {at} vanishes identically (curve contains a vertical line)")]
    DegenerateSlice { at: Complex },
    #[error("({z}, {w}) is a singular point of the curve (both partials vanish)")]
    SingularPoint { z: Complex, w: Complex },
    #[error("point pair is not on the curve: residual {residual:.3e} exceeds {tolerance:.3e}")]
    NotOnCurve { residual: f64, tolerance: f64 },
    #[error("diagonal polynomial vanishes identically (curve contains the diagonal)")]
    DiagonalDegenerate,
    #[error("correspondence family is degenerate: {reason}")]
    DegenerateFamily { reason: String },
    #[error("rational map must have degree >= {min}, got {got}")]
    DegreeTooLow { min: usize, got: usize },
    #[error("exact expansion needs {needed:.3e} nodes, over the budget {budget:.3e}; use dedup mode or a smaller depth")]
    NodeBudget { needed: f64, budget: f64 },
    #[error("non-finite branch weight at level {level} (orbit met a point with P_w = 0)")]
    NonFiniteWeight { level: usize },
    #[error("level sums have a zero tail; growth rate is undefined")]
    ZeroTail,
    #[error("need at least {needed} tail levels with positive sums, got {got}")]
    TailTooShort { needed: usize, got: usize },
    #[error("invalid bracket: rho({s_lo}) = {rho_lo:.6} and rho({s_hi}) = {rho_hi:.6} do not straddle 1")]
    InvalidBracket {
        s_lo: f64,
        rho_lo: f64,
        s_hi: f64,
        rho_hi: f64,
    },
    #[error("growth rate is not monotone on the bracket: {samples:?}")]
    NonMonotoneRho { samples: Vec<(f64, f64)> },
    #[error("basepoint rejected: {reason}")]
    BasepointRejected { reason: String },
    #[error("total atom weight is zero; cannot normalize the measure")]
    ZeroTotalWeight,
    #[error("no valid branch over the region: {reason}")]
    NoValidBranch { reason: String },
    #[error("point is not fixed by any branch (nearest image at chordal distance {nearest:.3e})")]
    NotFixed { nearest: f64 },
    #[error("fixed point is not indifferent: |multiplier| = {multiplier_abs:.6}")]
    NotIndifferent { multiplier_abs: f64 },
    #[error("no seed direction converged to the parabolic point; tried {tried} directions")]
    WrongDirection { tried: usize },
    #[error("point cloud has {got} points, need at least {needed}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("scale {scale_lo:.3e} probes below twice the cloud resolution {grid_res:.3e}")]
    ScaleBelowResolution { scale_lo: f64, grid_res: f64 },
    #[error("{context}: {message}")]
    Invalid { context: String, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn invalid(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Invalid {
            context: context.into(),
            message: message.into(),
        }
    }

    /// Stable machine-readable tag, used by the CLI error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ZeroPolynomial => "zero-polynomial",
            Error::RootsNoConvergence { .. } => "roots-no-convergence",
            Error::NotDivisible { .. } => "not-divisible",
            Error::SharedFactor => "shared-factor",
            Error::CommonRoot { .. } => "common-root",
            Error::DegenerateCurve { .. } => "degenerate-curve",
            Error::DegenerateSlice { .. } => "degenerate-slice",
            Error::SingularPoint { .. } => "singular-point",
            Error::NotOnCurve { .. } => "not-on-curve",
            Error::DiagonalDegenerate => "diagonal-degenerate",
            Error::DegenerateFamily { .. } => "degenerate-family",
            Error::DegreeTooLow { .. } => "degree-too-low",
            Error::NodeBudget { .. } => "node-budget",
            Error::NonFiniteWeight { .. } => "non-finite-weight",
            Error::ZeroTail => "zero-tail",
            Error::TailTooShort { .. } => "tail-too-short",
            Error::InvalidBracket { .. } => "invalid-bracket",
            Error::NonMonotoneRho { .. } => "non-monotone-rho",
            Error::BasepointRejected { .. } => "basepoint-rejected",
            Error::ZeroTotalWeight => "zero-total-weight",
            Error::NoValidBranch { .. } => "no-valid-branch",
            Error::NotFixed { .. } => "not-fixed",
            Error::NotIndifferent { .. } => "not-indifferent",
            Error::WrongDirection { .. } => "wrong-direction",
            Error::TooFewPoints { .. } => "too-few-points",
            Error::ScaleBelowResolution { .. } => "scale-below-resolution",
            Error::Invalid { .. } => "invalid",
            Error::Io(_) => "io",
        }
    }
}
