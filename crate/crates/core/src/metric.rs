//! The Theta metric `rho^2 |dz|^2` with `rho^2 = H / |F|`, and its Gaussian
//! curvature `K = -2 |F| D / H^3` where `D = H H_uū - |H_u|^2`.
//!
//! `H(u) = sum_{j,k} B[j][k] u^p(j) ū^p(k)` with `p(j) = j` in the affine
//! chart and `p(j) = g - 1 - j` in the chart `w = 1/z`; `F` is `f` or
//! `f_inf(w) = prod (1 - a_i w)` respectively. For even models the chart
//! factors cancel exactly, so both charts use the same formulas.

use std::io::Write;

use num_complex::Complex;
use num_traits::{One, Zero};

use crate::curve::{Chart, CurveSpec};
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::periods::PeriodData;
use crate::scalar::{cr, Real};

/// Largest tolerated relative deviation of `B` from Hermitian before
/// symmetrization.
pub const HERMITICITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct ThetaMetric<T: Real> {
    curve: CurveSpec<T>,
    b: CMat<T>,
    f_inf: Vec<Complex<T>>,
    det_b: Option<T>,
    hermiticity_correction: T,
}

/// `B = P^t (Im Z)^-1 conj(P)`, symmetrized and checked positive definite.
pub fn build_metric<T: Real>(data: &PeriodData<T>) -> Result<ThetaMetric<T>> {
    let raw = data.b_matrix();
    ThetaMetric::from_b(data.curve.clone(), raw)
}

impl<T: Real> ThetaMetric<T> {
    /// Metric from an explicit (nearly Hermitian) `B`.
    pub fn from_b(curve: CurveSpec<T>, raw: CMat<T>) -> Result<Self> {
        let g = curve.genus();
        if raw.rows() != g || raw.cols() != g {
            return Err(Error::InvalidConfig(format!(
                "B must be {g}x{g}, got {}x{}",
                raw.rows(),
                raw.cols()
            )));
        }
        let scale = raw.max_abs().max(T::min_positive_value());
        let correction = (&raw - &raw.adjoint()).max_abs() / scale;
        if !(correction <= T::tol(HERMITICITY_TOLERANCE)) {
            return Err(Error::HermiticityViolation {
                violation: correction.as_f64(),
            });
        }
        let half = T::lit(0.5);
        let adj = raw.adjoint();
        let b = CMat::from_fn(g, g, |i, j| {
            let v = (raw[(i, j)] + adj[(i, j)]) * half;
            if i == j {
                cr(v.re)
            } else {
                v
            }
        });
        let min_eig = b.hermitian_eigenvalues()[0];
        if !(min_eig > T::zero()) {
            return Err(Error::NotPositiveDefinite {
                min_eigenvalue: min_eig.as_f64(),
            });
        }
        let det_b = (g == 2).then(|| (b[(0, 0)] * b[(1, 1)] - b[(0, 1)] * b[(1, 0)]).re);
        let mut f_inf = curve.coefficients().to_vec();
        f_inf.reverse();
        Ok(ThetaMetric {
            curve,
            b,
            f_inf,
            det_b,
            hermiticity_correction: correction,
        })
    }

    pub fn curve(&self) -> &CurveSpec<T> {
        &self.curve
    }

    pub fn genus(&self) -> usize {
        self.curve.genus()
    }

    pub fn b(&self) -> &CMat<T> {
        &self.b
    }

    /// `det B` for genus 2.
    pub fn det_b(&self) -> Option<T> {
        self.det_b
    }

    /// Ascending coefficients of `f_inf(w) = w^(2g+2) f(1/w)`.
    pub fn f_inf_coefficients(&self) -> &[Complex<T>] {
        &self.f_inf
    }

    /// Relative size of the anti-Hermitian part removed when building `B`.
    pub fn hermiticity_correction(&self) -> T {
        self.hermiticity_correction
    }

    fn exponent(&self, chart: Chart, j: usize) -> usize {
        match chart {
            Chart::Affine => j,
            Chart::Infinity => self.genus() - 1 - j,
        }
    }

    /// `d^a/du^a u^p(j)` for every `j`.
    fn monomial_derivs(&self, chart: Chart, u: Complex<T>, a: usize) -> Vec<Complex<T>> {
        (0..self.genus())
            .map(|j| {
                let p = self.exponent(chart, j);
                if a > p {
                    return Complex::zero();
                }
                let ff = ((p - a + 1)..=p).fold(1.0, |acc, m| acc * m as f64);
                u.powu((p - a) as u32) * T::lit(ff)
            })
            .collect()
    }

    /// `d^a/du^a d^b/dū^b H` at `p`.
    pub fn h_partial(&self, p: ChartPoint<T>, a: usize, b: usize) -> Complex<T> {
        let va = self.monomial_derivs(p.chart, p.u, a);
        let vb = self.monomial_derivs(p.chart, p.u, b);
        let g = self.genus();
        let mut s = Complex::zero();
        for j in 0..g {
            if va[j].is_zero() {
                continue;
            }
            let row = (0..g).fold(Complex::zero(), |acc, k| acc + self.b[(j, k)] * vb[k].conj());
            s = s + va[j] * row;
        }
        s
    }

    /// `H`, `H_u`, `H_ū` and `H_uū`.
    pub fn h_factor(&self, p: ChartPoint<T>) -> HFactor<T> {
        HFactor {
            h: self.h_partial(p, 0, 0).re,
            h_u: self.h_partial(p, 1, 0),
            h_ubar: self.h_partial(p, 0, 1),
            h_uubar: self.h_partial(p, 1, 1).re,
        }
    }

    /// `rho^2 = H / |F|`; `+inf` at branch points.
    pub fn rho2(&self, p: ChartPoint<T>) -> T {
        let m = self.curve.chart_f(p.chart, p.u).norm();
        if m == T::zero() {
            return T::infinity();
        }
        self.h_partial(p, 0, 0).re / m
    }

    /// `K = -2 |F| D / H^3`; exactly zero at branch points.
    pub fn curvature(&self, p: ChartPoint<T>) -> T {
        let m = self.curve.chart_f(p.chart, p.u).norm();
        if m == T::zero() {
            return T::zero();
        }
        let h = self.h_partial(p, 0, 0).re;
        let h_u = self.h_partial(p, 1, 0);
        let h_uu_bar = self.h_partial(p, 1, 1).re;
        let d = h * h_uu_bar - h_u.norm_sqr();
        -T::lit(2.0) * m * d / (h * h * h)
    }

    /// `K` and its Wirtinger derivatives up to order two.
    pub fn curvature_jet(&self, p: ChartPoint<T>) -> Result<CurvatureJet<T>> {
        let f = self.curve.chart_f(p.chart, p.u);
        if f.is_zero() {
            return Err(Error::OnBranchPoint);
        }
        let m = f.norm();
        let (phi, dphi) = self.curve.chart_log_derivatives(p.chart, p.u);
        let quarter = T::lit(0.25);
        let half = T::lit(0.5);
        let m_u = phi * (m * half);
        let m_ub = m_u.conj();
        let m_uu = (phi * phi * quarter + dphi * half) * m;
        let m_uub = m * phi.norm_sqr() * quarter;

        let hp = |a, b| self.h_partial(p, a, b);
        let h = hp(0, 0).re;
        let h_u = hp(1, 0);
        let h_ub = h_u.conj();
        let h_uu = hp(2, 0);
        let h_uub = hp(1, 1).re;
        let h_uuu = hp(3, 0);
        let h_uuub = hp(2, 1);
        let h_uuuub = hp(3, 1);
        let h_uuubub = hp(2, 2).re;

        let d = h * h_uub - h_u.norm_sqr();
        let d_u = h_uuub * h - h_uu * h_ub;
        let d_ub = d_u.conj();
        let d_uu = h_u * h_uuub + h_uuuub * h - h_uuu * h_ub - h_uu * h_uub;
        let d_uub = h * h_uuubub - h_uu.norm_sqr();

        let h2 = h * h;
        let h3 = h2 * h;
        let h4 = h3 * h;
        let h5 = h4 * h;
        let pw = T::one() / h3;
        let p_u = h_u * (-T::lit(3.0) / h4);
        let p_ub = p_u.conj();
        let p_uu = h_u * h_u * (T::lit(12.0) / h5) - h_uu * (T::lit(3.0) / h4);
        let p_uub = T::lit(12.0) * h_u.norm_sqr() / h5 - T::lit(3.0) * h_uub / h4;

        let c = -T::lit(2.0);
        let two = T::lit(2.0);
        let k = c * m * d * pw;
        let k_z = (m_u * (d * pw) + d_u * (m * pw) + p_u * (m * d)) * c;
        let k_zz = (m_uu * (d * pw)
            + d_uu * (m * pw)
            + p_uu * (m * d)
            + m_u * d_u * (two * pw)
            + m_u * p_u * (two * d)
            + d_u * p_u * (two * m))
            * c;
        let k_zzbar = (cr(m_uub * d * pw + m * d_uub * pw + m * d * p_uub)
            + m_u * d_ub * pw
            + m_ub * d_u * pw
            + m_u * p_ub * d
            + m_ub * p_u * d
            + d_u * p_ub * m
            + d_ub * p_u * m)
            * c;
        Ok(CurvatureJet {
            chart: p.chart,
            k,
            k_z,
            k_zz,
            k_zzbar: k_zzbar.re,
            k_zzbar_imag: k_zzbar.im,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HFactor<T: Real> {
    pub h: T,
    pub h_u: Complex<T>,
    pub h_ubar: Complex<T>,
    pub h_uubar: T,
}

/// A point of the Riemann sphere in one of its two charts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartPoint<T: Real> {
    pub chart: Chart,
    pub u: Complex<T>,
}

impl<T: Real> ChartPoint<T> {
    pub fn new(chart: Chart, u: Complex<T>) -> Self {
        ChartPoint { chart, u }
    }

    pub fn affine(z: Complex<T>) -> Self {
        Self::new(Chart::Affine, z)
    }

    pub fn infinity(w: Complex<T>) -> Self {
        Self::new(Chart::Infinity, w)
    }

    /// The same point in the other chart, if it has an image there.
    pub fn switch(&self) -> Option<Self> {
        if self.u.is_zero() {
            return None;
        }
        let other = match self.chart {
            Chart::Affine => Chart::Infinity,
            Chart::Infinity => Chart::Affine,
        };
        Some(Self::new(other, self.u.inv()))
    }

    /// The representative with `|u| <= 1`, preferring the affine chart on
    /// the unit circle (to within rounding).
    pub fn canonical(&self) -> Self {
        let r = self.u.norm();
        let band = T::tol(1e-12);
        match self.chart {
            Chart::Affine if r > T::one() + band => self.switch().unwrap_or(*self),
            Chart::Infinity if r >= T::one() - band => self.switch().unwrap_or(*self),
            _ => *self,
        }
    }

    fn homogeneous(&self) -> (Complex<T>, Complex<T>) {
        match self.chart {
            Chart::Affine => (self.u, Complex::one()),
            Chart::Infinity => (Complex::one(), self.u),
        }
    }

    /// Chordal distance on the Riemann sphere of diameter 2 (antipodal
    /// points are at distance 2).
    pub fn chordal_distance(&self, other: &Self) -> T {
        let (x1, y1) = self.homogeneous();
        let (x2, y2) = other.homogeneous();
        let n1 = (x1.norm_sqr() + y1.norm_sqr()).sqrt();
        let n2 = (x2.norm_sqr() + y2.norm_sqr()).sqrt();
        T::lit(2.0) * (x1 * y2 - x2 * y1).norm() / (n1 * n2)
    }
}

/// `K` with its Wirtinger derivatives in one chart coordinate `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureJet<T: Real> {
    pub chart: Chart,
    pub k: T,
    pub k_z: Complex<T>,
    pub k_zz: Complex<T>,
    pub k_zzbar: T,
    /// Imaginary part of the computed `K_zz̄`; zero up to rounding.
    pub k_zzbar_imag: T,
}

impl<T: Real> CurvatureJet<T> {
    /// `(K_x, K_y) = (2 Re K_z, -2 Im K_z)`.
    pub fn gradient(&self) -> [T; 2] {
        let two = T::lit(2.0);
        [two * self.k_z.re, -two * self.k_z.im]
    }
}

/// Real Hessian `[[a, b], [b, c]]` with `a = 2 K_zz̄ + 2 Re K_zz`,
/// `c = 2 K_zz̄ - 2 Re K_zz`, `b = -2 Im K_zz`.
pub fn real_hessian<T: Real>(jet: &CurvatureJet<T>) -> [[T; 2]; 2] {
    real_hessian_from(jet.k_zz, jet.k_zzbar)
}

pub fn real_hessian_from<T: Real>(k_zz: Complex<T>, k_zzbar: T) -> [[T; 2]; 2] {
    let two = T::lit(2.0);
    let a = two * k_zzbar + two * k_zz.re;
    let c = two * k_zzbar - two * k_zz.re;
    let b = -two * k_zz.im;
    [[a, b], [b, c]]
}

/// Inverse of [`real_hessian_from`]: `K_zz = (a - c - 2ib)/4`, `K_zz̄ = (a + c)/4`.
pub fn wirtinger_from_hessian<T: Real>(m: [[T; 2]; 2]) -> (Complex<T>, T) {
    let q = T::lit(0.25);
    let (a, b, c) = (m[0][0], m[0][1], m[1][1]);
    (Complex::new((a - c) * q, -T::lit(2.0) * b * q), (a + c) * q)
}

/// Curvature from the Schwarz form
/// `K = -2/rho^6 (<f,f><f',f'> - |<f',f>|^2)`, where `f` is the vector of
/// normalized differential coefficients at `(z, y)` and
/// `<u, v> = u (Im Z)^-1 v^*`. Independent of `B`.
pub fn curvature_schwarz<T: Real>(data: &PeriodData<T>, z: Complex<T>, y: Complex<T>) -> Result<T> {
    if y.is_zero() {
        return Err(Error::OnBranchPoint);
    }
    let g = data.genus();
    let fz = data.curve.eval_f(z, 0);
    let dfz = data.curve.eval_f(z, 1);
    if fz.is_zero() {
        return Err(Error::OnBranchPoint);
    }
    let dy = dfz / (y * T::lit(2.0));
    // m = (1, z, ..., z^(g-1)) and its derivative.
    let m: Vec<Complex<T>> = (0..g).map(|k| z.powu(k as u32)).collect();
    let dm: Vec<Complex<T>> = (0..g)
        .map(|k| {
            if k == 0 {
                Complex::zero()
            } else {
                z.powu(k as u32 - 1) * T::lit(k as f64)
            }
        })
        .collect();
    let combine = |v: &[Complex<T>], j: usize| (0..g).fold(Complex::<T>::zero(), |acc, l| acc + v[l] * data.p[(j, l)]);
    let vec_f: Vec<Complex<T>> = (0..g).map(|j| combine(&m, j) / y).collect();
    let vec_df: Vec<Complex<T>> = (0..g)
        .map(|j| combine(&dm, j) / y - combine(&m, j) * dy / (y * y))
        .collect();
    let inner = |u: &[Complex<T>], v: &[Complex<T>]| {
        let mut s = Complex::<T>::zero();
        for i in 0..g {
            for j in 0..g {
                s = s + u[i] * v[j].conj() * data.im_z_inv[(i, j)];
            }
        }
        s
    };
    let ff = inner(&vec_f, &vec_f).re;
    let dd = inner(&vec_df, &vec_df).re;
    let df = inner(&vec_df, &vec_f);
    let rho6 = ff * ff * ff;
    Ok(-T::lit(2.0) / rho6 * (ff * dd - df.norm_sqr()))
}

/// One row of a curvature grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSample<T: Real> {
    pub re: T,
    pub im: T,
    pub chart: Chart,
    pub k: T,
    pub rho2: T,
}

/// Rectangle `[x0, x1] x [y0, y1]` of chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Default for Window {
    fn default() -> Self {
        Window {
            x0: -2.0,
            x1: 2.0,
            y0: -2.0,
            y1: 2.0,
        }
    }
}

impl Window {
    pub fn validate(&self) -> Result<()> {
        let fin = [self.x0, self.x1, self.y0, self.y1].iter().all(|v| v.is_finite());
        if !fin || self.x0 >= self.x1 || self.y0 >= self.y1 {
            return Err(Error::InvalidConfig(format!(
                "window must satisfy x0 < x1 and y0 < y1, got {},{},{},{}",
                self.x0, self.x1, self.y0, self.y1
            )));
        }
        Ok(())
    }

    /// Coordinate of grid index `i` of `n` along `[a, b]`, hitting both ends exactly.
    fn node(a: f64, b: f64, i: usize, n: usize) -> f64 {
        if n == 1 {
            return 0.5 * (a + b);
        }
        if i + 1 == n {
            return b;
        }
        a + (b - a) * i as f64 / (n - 1) as f64
    }
}

/// `n x n` samples over the window, row-major with the imaginary part as
/// the slow index.
pub fn grid_samples<T: Real>(
    metric: &ThetaMetric<T>,
    chart: Chart,
    window: Window,
    n: usize,
) -> Result<Vec<GridSample<T>>> {
    window.validate()?;
    if n == 0 {
        return Err(Error::InvalidConfig("grid size must be at least 1".into()));
    }
    let mut out = Vec::with_capacity(n * n);
    for iy in 0..n {
        let y = T::lit(Window::node(window.y0, window.y1, iy, n));
        for ix in 0..n {
            let x = T::lit(Window::node(window.x0, window.x1, ix, n));
            let p = ChartPoint::new(chart, Complex::new(x, y));
            out.push(GridSample {
                re: x,
                im: y,
                chart,
                k: metric.curvature(p),
                rho2: metric.rho2(p),
            });
        }
    }
    Ok(out)
}

/// Writes samples as CSV with header `re,im,chart,K,rho2`. Infinite `rho2`
/// (branch points) is written as `inf`.
pub fn write_grid_csv<T: Real, W: Write>(samples: &[GridSample<T>], mut out: W) -> std::io::Result<()> {
    use crate::io::fmt17;
    writeln!(out, "re,im,chart,K,rho2")?;
    for s in samples {
        let rho2 = if s.rho2.is_infinite() {
            "inf".to_string()
        } else {
            fmt17(s.rho2.as_f64())
        };
        writeln!(
            out,
            "{},{},{},{},{}",
            fmt17(s.re.as_f64()),
            fmt17(s.im.as_f64()),
            s.chart,
            fmt17(s.k.as_f64()),
            rho2
        )?;
    }
    Ok(())
}
