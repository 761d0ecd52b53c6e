//! End-to-end self-checks for one curve, reported as a pass/fail table.

use std::fmt;

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::{Chart, CurveSpec};
use crate::error::{Error, Result};
use crate::io::fmt6;
use crate::metric::{build_metric, curvature_schwarz, ChartPoint, ThetaMetric};
use crate::morse::{
    census, gauss_bonnet, lemma21_criterion, lemma22_minimum_check, weierstrass_hessian_check, IntegrationConfig,
    MorseIndex, SearchOptions,
};
use crate::periods::{period_matrix, validate_riemann, PeriodData, QuadratureConfig};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Skipped => "skipped",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

impl CheckRow {
    fn new(name: &'static str, pass: bool, detail: impl Into<String>) -> Self {
        CheckRow {
            name,
            status: if pass { CheckStatus::Pass } else { CheckStatus::Fail },
            detail: detail.into(),
        }
    }

    fn skipped(name: &'static str, detail: impl Into<String>) -> Self {
        CheckRow {
            name,
            status: CheckStatus::Skipped,
            detail: detail.into(),
        }
    }

    fn failed(name: &'static str, err: &Error) -> Self {
        CheckRow::new(name, false, format!("{}: {err}", err.code()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub quadrature: QuadratureConfig,
    pub search: SearchOptions,
    pub integration: IntegrationConfig,
    /// Random evaluation points per pointwise check.
    pub samples: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            quadrature: QuadratureConfig::default(),
            search: SearchOptions::default(),
            integration: IntegrationConfig::default(),
            samples: 20,
            seed: 0x5eed,
        }
    }
}

/// Relative tolerance for the closed form against the Schwarz form of `K`.
pub const TWO_FORMULA_TOL: f64 = 1e-9;
/// Relative tolerance for the analytic jet against finite differences.
pub const JET_FD_TOL: f64 = 1e-6;
/// Relative tolerance for symmetry checks on `K`.
pub const SYMMETRY_TOL: f64 = 1e-9;
/// Relative tolerance on the Gauss–Bonnet integral.
pub const GAUSS_BONNET_TOL: f64 = 1e-2;

/// Table of all checks. Errors building the period data or metric abort the
/// run; failures inside a check become a failed row.
pub fn run_verification<T: Real>(curve: &CurveSpec<T>, opts: &VerifyOptions) -> Result<Vec<CheckRow>> {
    let data = period_matrix(curve, &opts.quadrature)?;
    let metric = build_metric(&data)?;
    let mut rows = Vec::new();

    let v = validate_riemann(&data, opts.quadrature.symmetry_tolerance);
    rows.push(CheckRow::new("Riemann relations", v.passed, v.summary()));

    let pts = sample_points(curve, opts.samples, opts.seed);
    rows.push(two_formula_row(&data, &metric, &pts));
    rows.push(jet_row(&metric, &pts));
    rows.push(curvature_sign_row(&metric));
    rows.push(weierstrass_row(&metric, &opts.search));
    rows.extend(lemma_rows(&metric, &opts.search));
    rows.extend(symmetry_rows(&metric, opts.seed));
    rows.push(census_row(&metric, &opts.search));
    rows.push(match gauss_bonnet(&metric, &opts.integration) {
        Ok(gb) => {
            let rel = (gb.integral - gb.expected).abs() / gb.expected.abs().max(1.0);
            let pass = if gb.expected == 0.0 {
                gb.integral.abs() < GAUSS_BONNET_TOL
            } else {
                rel < GAUSS_BONNET_TOL
            };
            CheckRow::new(
                "Gauss-Bonnet",
                pass,
                format!("integral {}, expected {}", fmt6(gb.integral), fmt6(gb.expected)),
            )
        }
        Err(e) => CheckRow::failed("Gauss-Bonnet", &e),
    });
    Ok(rows)
}

pub fn all_passed(rows: &[CheckRow]) -> bool {
    rows.iter().all(|r| r.status != CheckStatus::Fail)
}

/// Plain-text table, one row per check.
pub fn format_table(rows: &[CheckRow]) -> String {
    let w = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
    let mut s = String::new();
    for r in rows {
        s.push_str(&format!("{:<w$}  {:<7}  {}\n", r.name, r.status.to_string(), r.detail));
    }
    s
}

/// Affine points with `|z| <= 1.5`, kept at least a quarter of the minimum
/// gap away from every branch point.
pub fn sample_points<T: Real>(curve: &CurveSpec<T>, n: usize, seed: u64) -> Vec<Complex<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clearance = curve.min_gap() * T::lit(0.25);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let z = Complex::new(T::lit(rng.gen_range(-1.5..1.5)), T::lit(rng.gen_range(-1.5..1.5)));
        if z.norm() <= T::lit(1.5) && curve.nearest_branch_point(z).1 > clearance {
            out.push(z);
        }
    }
    out
}

fn two_formula_row<T: Real>(data: &PeriodData<T>, metric: &ThetaMetric<T>, pts: &[Complex<T>]) -> CheckRow {
    let mut worst = 0.0f64;
    for &z in pts {
        let y = data.curve.eval_f(z, 0).sqrt();
        let k = metric.curvature(ChartPoint::affine(z));
        match curvature_schwarz(data, z, y) {
            // In genus 1 both vanish; compare absolutely.
            Ok(ks) if data.curve.genus() < 2 => worst = worst.max((k - ks).abs().as_f64()),
            Ok(ks) => worst = worst.max(((k - ks).abs() / ks.abs()).as_f64()),
            Err(e) => return CheckRow::failed("curvature formulas agree", &e),
        }
    }
    let tol = T::tol(TWO_FORMULA_TOL).as_f64();
    CheckRow::new(
        "curvature formulas agree",
        worst <= tol,
        format!("max relative difference {} over {} points", fmt6(worst), pts.len()),
    )
}

/// Wirtinger derivatives of `K` from fourth-order central differences in
/// the chart coordinate, step `h`.
pub fn fd_wirtinger<T: Real>(metric: &ThetaMetric<T>, p: ChartPoint<T>, h: T) -> (Complex<T>, Complex<T>, T) {
    let k = |dx: T, dy: T| metric.curvature(ChartPoint::new(p.chart, p.u + Complex::new(dx, dy)));
    let z = T::zero();
    let c = |x: f64| T::lit(x);
    let d1 = |f: &dyn Fn(T) -> T| (c(8.0) * (f(h) - f(-h)) - (f(h + h) - f(-h - h))) / (c(12.0) * h);
    let d2 =
        |f: &dyn Fn(T) -> T| (c(16.0) * (f(h) + f(-h)) - (f(h + h) + f(-h - h)) - c(30.0) * f(z)) / (c(12.0) * h * h);
    let kx = d1(&|t| k(t, z));
    let ky = d1(&|t| k(z, t));
    let kxx = d2(&|t| k(t, z));
    let kyy = d2(&|t| k(z, t));
    // Mixed derivative as the fourth-order first difference of K_y in x.
    let ky_at = |x: T| d1(&|t| k(x, t));
    let kxy = d1(&ky_at);
    let k_z = Complex::new(kx, -ky) * c(0.5);
    let k_zz = Complex::new(kxx - kyy, -c(2.0) * kxy) * c(0.25);
    let k_zzbar = (kxx + kyy) * c(0.25);
    (k_z, k_zz, k_zzbar)
}

/// Largest relative mismatch between the analytic jet and finite
/// differences at `p`. First derivatives are measured against
/// `max(|K_z|, |K|)`, second derivatives against the largest second
/// derivative or `|K|`.
pub fn jet_fd_mismatch<T: Real>(metric: &ThetaMetric<T>, p: ChartPoint<T>) -> Result<f64> {
    let jet = metric.curvature_jet(p)?;
    let dist = metric
        .curve()
        .chart_branch_points(p.chart)
        .iter()
        .map(|a| (p.u - a).norm())
        .fold(T::infinity(), T::min);
    let h = (dist * T::lit(0.01)).min(T::lit(1e-3));
    let (k_z, k_zz, k_zzbar) = fd_wirtinger(metric, p, h);
    let s1 = k_z.norm().max(jet.k.abs());
    let s2 = k_zz.norm().max(k_zzbar.abs()).max(jet.k.abs());
    let e1 = (jet.k_z - k_z).norm() / s1;
    let e2 = (jet.k_zz - k_zz).norm().max((jet.k_zzbar - k_zzbar).abs()) / s2;
    Ok(e1.max(e2).as_f64())
}

fn jet_row<T: Real>(metric: &ThetaMetric<T>, pts: &[Complex<T>]) -> CheckRow {
    const NAME: &str = "analytic jet vs finite differences";
    let mut worst = 0.0f64;
    for (i, &z) in pts.iter().enumerate() {
        // Alternate charts so both formulas are exercised.
        let p = if i % 2 == 0 || z.norm() < T::lit(0.2) {
            ChartPoint::affine(z)
        } else {
            ChartPoint::infinity(z.inv())
        };
        match jet_fd_mismatch(metric, p) {
            Ok(e) => worst = worst.max(e),
            Err(e) => return CheckRow::failed(NAME, &e),
        }
    }
    let tol = T::tol(JET_FD_TOL).max(T::epsilon().sqrt() * T::lit(10.0)).as_f64();
    CheckRow::new(
        NAME,
        worst <= tol,
        format!("max relative mismatch {} over {} points", fmt6(worst), pts.len()),
    )
}

fn curvature_sign_row<T: Real>(metric: &ThetaMetric<T>) -> CheckRow {
    let n = 100;
    let mut max_abs = T::zero();
    let mut max_k = T::neg_infinity();
    for chart in [Chart::Affine, Chart::Infinity] {
        for i in 0..n {
            for j in 0..n {
                let x = -1.0 + 2.0 * i as f64 / (n - 1) as f64;
                let y = -1.0 + 2.0 * j as f64 / (n - 1) as f64;
                let k = metric.curvature(ChartPoint::new(chart, Complex::new(T::lit(x), T::lit(y))));
                max_abs = max_abs.max(k.abs());
                max_k = max_k.max(k);
            }
        }
    }
    let pass = max_k <= T::tol(1e-12) * max_abs;
    CheckRow::new(
        "curvature is nonpositive",
        pass,
        format!(
            "max K {} on a {n}x{n} grid per chart (max |K| {})",
            fmt6(max_k.as_f64()),
            fmt6(max_abs.as_f64())
        ),
    )
}

fn weierstrass_row<T: Real>(metric: &ThetaMetric<T>, opts: &SearchOptions) -> CheckRow {
    const NAME: &str = "Weierstrass points are maxima";
    if metric.genus() < 2 {
        return CheckRow::skipped(NAME, "metric is flat in genus 1");
    }
    let n = metric.curve().branch_points().len();
    let mut worst_ratio = 0.0f64;
    let mut worst_closed = 0.0f64;
    let mut bad = Vec::new();
    for k in 1..=n {
        match weierstrass_hessian_check(metric, k, opts) {
            Ok(c) => {
                worst_ratio = worst_ratio.max(c.offdiag_ratio.as_f64());
                worst_closed = worst_closed.max(((c.r - c.r_closed_form).abs() / c.r.abs()).as_f64());
                let ok = c.index == MorseIndex::Two
                    && c.index_half_step == MorseIndex::Two
                    && c.r < T::zero()
                    && c.offdiag_ratio < T::lit(0.05);
                if !ok {
                    bad.push(k);
                }
            }
            Err(e) => return CheckRow::failed(NAME, &e),
        }
    }
    let pass = bad.is_empty() && worst_closed < 1e-4;
    let mut detail = format!(
        "{n} points, max offdiag ratio {}, max deviation from closed form {}",
        fmt6(worst_ratio),
        fmt6(worst_closed)
    );
    if !bad.is_empty() {
        detail.push_str(&format!("; failing points {bad:?}"));
    }
    CheckRow::new(NAME, pass, detail)
}

/// Points where `F' = 0` in either chart: roots of `f'` and, if applicable,
/// the point at infinity.
fn critical_candidates<T: Real>(metric: &ThetaMetric<T>) -> Vec<ChartPoint<T>> {
    let mut pts: Vec<ChartPoint<T>> = metric
        .curve()
        .f_prime_roots()
        .into_iter()
        .map(|(z, _)| ChartPoint::affine(z).canonical())
        .collect();
    pts.push(ChartPoint::infinity(Complex::new(T::zero(), T::zero())));
    pts
}

fn lemma_rows<T: Real>(metric: &ThetaMetric<T>, opts: &SearchOptions) -> Vec<CheckRow> {
    const L1: &str = "genus-2 criterion at roots of f'";
    const L2: &str = "genus-2 minimum criterion";
    if metric.genus() != 2 {
        let why = format!("curve has genus {}", metric.genus());
        return vec![CheckRow::skipped(L1, why.clone()), CheckRow::skipped(L2, why)];
    }
    let mut applicable = 0;
    let mut critical = 0;
    let mut inconsistent = 0;
    let mut minima = Vec::new();
    for p in critical_candidates(metric) {
        let r = match lemma21_criterion(metric, p, opts) {
            Ok(r) => r,
            Err(e) => return vec![CheckRow::failed(L1, &e), CheckRow::skipped(L2, "criterion failed")],
        };
        if !r.applicable {
            continue;
        }
        applicable += 1;
        if r.is_critical {
            critical += 1;
        }
        if !r.consistent() {
            inconsistent += 1;
        }
        match lemma22_minimum_check(metric, p, opts) {
            Ok(m) => minima.push(m.index),
            Err(Error::HypothesesNotMet(_)) => {}
            Err(e) => return vec![CheckRow::failed(L1, &e), CheckRow::failed(L2, &e)],
        }
    }
    let r1 = if applicable == 0 {
        CheckRow::skipped(L1, "no applicable points")
    } else {
        CheckRow::new(
            L1,
            inconsistent == 0,
            format!("{applicable} applicable, {critical} critical, {inconsistent} disagree with the jet"),
        )
    };
    let r2 = if minima.is_empty() {
        CheckRow::skipped(L2, "hypotheses hold nowhere")
    } else {
        let zero = minima.iter().filter(|i| **i == MorseIndex::Zero).count();
        CheckRow::new(
            L2,
            zero == minima.len(),
            format!("{zero} of {} points have index 0", minima.len()),
        )
    };
    vec![r1, r2]
}

fn same_set<T: Real>(a: &[Complex<T>], b: &[Complex<T>], tol: T) -> bool {
    a.len() == b.len() && b.iter().all(|q| a.iter().any(|p| (p - q).norm() <= tol))
}

/// Largest `m` such that rotation by `2 pi / m` about the origin preserves
/// the branch set.
pub fn rotation_order<T: Real>(curve: &CurveSpec<T>) -> Option<usize> {
    let pts = curve.branch_points();
    let tol = curve.scale() * T::lit(1e-9);
    (2..=pts.len()).rev().find(|&m| {
        let zeta = Complex::from_polar(T::one(), T::lit(2.0 * std::f64::consts::PI / m as f64));
        let rotated: Vec<Complex<T>> = pts.iter().map(|p| p * zeta).collect();
        same_set(pts, &rotated, tol)
    })
}

/// Whether `z -> 1/z` preserves the branch set.
pub fn inversion_symmetric<T: Real>(curve: &CurveSpec<T>) -> bool {
    let pts = curve.branch_points();
    if pts.iter().any(|p| p.norm() == T::zero()) {
        return false;
    }
    let inv: Vec<Complex<T>> = pts.iter().map(|p| p.inv()).collect();
    same_set(pts, &inv, T::lit(1e-9) * curve.scale().max(T::one()))
}

fn symmetry_rows<T: Real>(metric: &ThetaMetric<T>, seed: u64) -> Vec<CheckRow> {
    const ROT: &str = "rotation symmetry of K";
    const INV: &str = "inversion symmetry of K";
    let curve = metric.curve();
    let pts = sample_points(curve, 50, seed ^ 0x9e37_79b9);
    let tol = T::tol(SYMMETRY_TOL).as_f64();
    let k = |z: Complex<T>| metric.curvature(ChartPoint::affine(z));
    let flat = metric.genus() < 2;
    let rel = |a: T, b: T| -> f64 {
        if flat {
            (a - b).abs().as_f64()
        } else {
            ((a - b).abs() / b.abs()).as_f64()
        }
    };
    let rot = match rotation_order(curve) {
        Some(m) => {
            let zeta = Complex::from_polar(T::one(), T::lit(2.0 * std::f64::consts::PI / m as f64));
            let worst = pts.iter().map(|&z| rel(k(z * zeta), k(z))).fold(0.0, f64::max);
            CheckRow::new(
                ROT,
                worst <= tol,
                format!("order {m}, max relative change {}", fmt6(worst)),
            )
        }
        None => CheckRow::skipped(ROT, "branch points have no rotational symmetry"),
    };
    let inv = if inversion_symmetric(curve) {
        let worst = pts.iter().map(|&z| rel(k(z.inv()), k(z))).fold(0.0, f64::max);
        CheckRow::new(INV, worst <= tol, format!("max relative change {}", fmt6(worst)))
    } else {
        CheckRow::skipped(INV, "branch points are not inversion symmetric")
    };
    vec![rot, inv]
}

fn census_row<T: Real>(metric: &ThetaMetric<T>, opts: &SearchOptions) -> CheckRow {
    const NAME: &str = "Morse census";
    match census(metric, opts) {
        Ok(c) => CheckRow::new(
            NAME,
            c.is_morse_function,
            format!(
                "I0={} I1={} I2={}, I0-I1+I2={} = 2-2g, degenerate {}",
                c.i0, c.i1, c.i2, c.euler_lhs, c.degenerate_count
            ),
        ),
        Err(Error::FlatMetric { max_abs_k }) if metric.genus() == 1 => CheckRow::new(
            NAME,
            true,
            format!("flat metric in genus 1 (max |K| {})", fmt6(max_abs_k)),
        ),
        Err(e) => CheckRow::failed(NAME, &e),
    }
}
