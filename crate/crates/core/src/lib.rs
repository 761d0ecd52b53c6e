//! Theta metric curvature on hyperelliptic Riemann surfaces.
//!
//! A curve `y^2 = f(z)` with `2g + 2` finite branch points is turned into a
//! normalized period matrix, the Hermitian matrix `B` that expresses the
//! Theta metric in the monomial differential basis, and the Gaussian
//! curvature `K` of that metric. The `morse` module then locates and
//! classifies every critical point of `K`.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`). The aliases at
//! the crate root fix the scalar to `f64`, which is what the command-line
//! tool uses.

// `!(x < tol)` is deliberate throughout: it also rejects NaN. Matrix loops
// index several arrays with the same counters.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod curve;
pub mod error;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod metric;
pub mod morse;
pub mod periods;
pub mod poly;
pub mod quadrature;
pub mod samples;
pub mod scalar;
pub mod verify;

pub use curve::{parse_curve, Chart, CurvePoint, LocalFrame};
pub use error::{Error, Result};
pub use metric::{build_metric, ChartPoint, CurvatureJet};
pub use morse::{MorseIndex, SearchOptions};
pub use periods::{period_matrix, QuadratureConfig};
pub use scalar::Real;

pub type Complex64 = num_complex::Complex<f64>;

pub type CurveSpec = curve::CurveSpec<f64>;
pub type PeriodData = periods::PeriodData<f64>;
pub type ThetaMetric = metric::ThetaMetric<f64>;
pub type CriticalPoint = morse::CriticalPoint<f64>;
pub type MorseCensus = morse::MorseCensus<f64>;

/// Single-precision aliases, mainly useful for fast exploratory sweeps.
pub mod f32 {
    pub type CurveSpec = crate::curve::CurveSpec<f32>;
    pub type PeriodData = crate::periods::PeriodData<f32>;
    pub type ThetaMetric = crate::metric::ThetaMetric<f32>;
}
