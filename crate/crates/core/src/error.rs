use thiserror::Error;

/// Every failure the pipeline can report. `code()` gives a stable
/// machine-readable identifier used on the command line.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("branch point count {0} is odd; only even models with 2g+2 finite branch points are supported")]
    OddCount(usize),
    #[error("need at least 4 branch points (genus >= 1), got {0}")]
    TooFewBranchPoints(usize),
    #[error("branch point {index} is not finite")]
    NonFinite { index: usize },
    #[error("branch points {i} and {j} coincide (gap {gap:.3e} below threshold {threshold:.3e})")]
    DuplicateBranchPoint {
        i: usize,
        j: usize,
        gap: f64,
        threshold: f64,
    },
    #[error("start value is not on the curve: |y^2 - f| = {residual:.3e}")]
    InvalidStartValue { residual: f64 },
    #[error("continuation path passes within {distance:.3e} of branch point {index} (margin {margin:.3e})")]
    PathTooCloseToBranchPoint { index: usize, distance: f64, margin: f64 },
    #[error("sheet choice became ambiguous near z = ({re:.6e}, {im:.6e})")]
    ContinuationAmbiguous { re: f64, im: f64 },
    #[error("local frame at Weierstrass point {k} collapsed: nearest branch point at distance {distance:.3e}")]
    FrameRadiusCollapse { k: usize, distance: f64 },
    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("cycle construction failed: {0}; supply manual cycles with --cycles <file>")]
    CycleConstructionFailed(String),
    #[error("invalid cycle: {0}")]
    InvalidCycle(String),
    #[error("quadrature did not converge after {nodes} nodes (last change {change:.3e})")]
    QuadratureNotConverged { nodes: usize, change: f64 },
    #[error("A-period block is singular (condition number {condition:.3e})")]
    SingularAPeriodBlock { condition: f64 },
    #[error("period normalization failed: {0}")]
    NormalizationFailed(String),
    #[error("no B-cycle sign pattern yields a symmetric Z with positive definite imaginary part (best symmetry residual {best_symmetry:.3e})")]
    NoValidSignPattern { best_symmetry: f64 },
    #[error("matrix is not positive definite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("B-matrix Hermiticity violation {violation:.3e}")]
    HermiticityViolation { violation: f64 },
    #[error("evaluation at a branch point")]
    OnBranchPoint,
    #[error("operation requires genus 2, curve has genus {0}")]
    NotGenusTwo(usize),
    #[error("hypotheses not met: {0}")]
    HypothesesNotMet(String),
    #[error("finite-difference Hessian unstable: Richardson disagreement {disagreement:.3e}")]
    FdUnstable { disagreement: f64 },
    #[error("metric is flat (max |K| = {max_abs_k:.3e}); every point is critical")]
    FlatMetric { max_abs_k: f64 },
    #[error("Morse census inconsistent: I0 - I1 + I2 = {lhs} but 2 - 2g = {rhs} (I0={i0}, I1={i1}, I2={i2}, degenerate={degenerate})")]
    CensusInconsistent {
        lhs: i64,
        rhs: i64,
        i0: usize,
        i1: usize,
        i2: usize,
        degenerate: usize,
    },
    #[error("area integration did not converge (last relative change {change:.3e})")]
    IntegrationNotConverged { change: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("input format error: {0}")]
    Format(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::OddCount(_) => "OddCount",
            Error::TooFewBranchPoints(_) => "TooFewBranchPoints",
            Error::NonFinite { .. } => "NonFinite",
            Error::DuplicateBranchPoint { .. } => "DuplicateBranchPoint",
            Error::InvalidStartValue { .. } => "InvalidStartValue",
            Error::PathTooCloseToBranchPoint { .. } => "PathTooCloseToBranchPoint",
            Error::ContinuationAmbiguous { .. } => "ContinuationAmbiguous",
            Error::FrameRadiusCollapse { .. } => "FrameRadiusCollapse",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::CycleConstructionFailed(_) => "CycleConstructionFailed",
            Error::InvalidCycle(_) => "InvalidCycle",
            Error::QuadratureNotConverged { .. } => "QuadratureNotConverged",
            Error::SingularAPeriodBlock { .. } => "SingularAPeriodBlock",
            Error::NormalizationFailed(_) => "NormalizationFailed",
            Error::NoValidSignPattern { .. } => "NoValidSignPattern",
            Error::NotPositiveDefinite { .. } => "NotPositiveDefinite",
            Error::HermiticityViolation { .. } => "HermiticityViolation",
            Error::OnBranchPoint => "OnBranchPoint",
            Error::NotGenusTwo(_) => "NotGenusTwo",
            Error::HypothesesNotMet(_) => "HypothesesNotMet",
            Error::FdUnstable { .. } => "FDUnstable",
            Error::FlatMetric { .. } => "FlatMetric",
            Error::CensusInconsistent { .. } => "CensusInconsistent",
            Error::IntegrationNotConverged { .. } => "IntegrationNotConverged",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::Format(_) => "FormatError",
        }
    }

    /// True for errors caused by malformed or degenerate input rather than
    /// by a numerical failure downstream.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::OddCount(_)
                | Error::TooFewBranchPoints(_)
                | Error::NonFinite { .. }
                | Error::DuplicateBranchPoint { .. }
                | Error::InvalidConfig(_)
                | Error::Format(_)
                | Error::InvalidCycle(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
