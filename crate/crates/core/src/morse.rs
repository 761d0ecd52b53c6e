//! Critical points of the curvature and their Morse indices.
//!
//! `K` descends to the Riemann sphere, so the search runs on both charts of
//! the sphere and lifts each critical point to the curve afterwards: two
//! curve points over a regular value, one over a branch point. Branch points
//! are handled apart, in the local frame where `K` is smooth.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::curve::{local_frame, Chart, CurvePoint};
use crate::error::{Error, Result};
use crate::linalg::sym2_eigenvalues;
use crate::metric::{real_hessian, ChartPoint, ThetaMetric};
use crate::poly;
use crate::quadrature::gauss_legendre;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOptions {
    /// Seeds per side of the square seed grid in each chart.
    pub seed_density: usize,
    /// Seeds are kept where `|u| <= seed_radius`.
    pub seed_radius: f64,
    pub max_iterations: usize,
    /// Gradient tolerance relative to the local curvature scale.
    pub tol_crit: f64,
    /// Chordal distance under which two critical points are merged.
    pub dedup_radius: f64,
    /// `|det Hess| <= tol_degenerate * |Hess|^2` marks a degenerate point.
    pub tol_degenerate: f64,
    /// Finite-difference step at Weierstrass points, relative to the frame radius.
    pub h_fd_factor: f64,
    /// Grid maximum of `|K|` under which the metric counts as flat.
    pub flat_threshold: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            seed_density: 60,
            seed_radius: 1.05,
            max_iterations: 50,
            tol_crit: 1e-10,
            dedup_radius: 1e-6,
            tol_degenerate: 1e-8,
            h_fd_factor: 1e-4,
            flat_threshold: 1e-9,
        }
    }
}

impl SearchOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if !(2..=2000).contains(&self.seed_density) {
            return bad(format!("seed density must lie in 2..=2000, got {}", self.seed_density));
        }
        if !(self.seed_radius >= 1.0 && self.seed_radius <= 1.5) {
            return bad(format!("seed radius must lie in [1, 1.5], got {}", self.seed_radius));
        }
        if self.max_iterations == 0 {
            return bad("at least one Newton iteration is required".into());
        }
        for (name, v) in [
            ("tol_crit", self.tol_crit),
            ("dedup_radius", self.dedup_radius),
            ("tol_degenerate", self.tol_degenerate),
            ("h_fd_factor", self.h_fd_factor),
            ("flat_threshold", self.flat_threshold),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return bad(format!("{name} must lie in (0, 1), got {v}"));
            }
        }
        Ok(())
    }
}

/// Largest distance from the seed chart's origin a Newton iterate may reach.
const ESCAPE_RADIUS: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MorseIndex {
    Zero,
    One,
    Two,
    Degenerate,
}

impl MorseIndex {
    pub fn from_count(n: usize) -> Self {
        match n {
            0 => MorseIndex::Zero,
            1 => MorseIndex::One,
            _ => MorseIndex::Two,
        }
    }

    pub fn as_number(self) -> Option<u8> {
        match self {
            MorseIndex::Zero => Some(0),
            MorseIndex::One => Some(1),
            MorseIndex::Two => Some(2),
            MorseIndex::Degenerate => None,
        }
    }

    /// Index of a symmetric 2x2 Hessian, or `Degenerate` when
    /// `|det| <= tol * |H|_F^2`.
    pub fn classify<T: Real>(h: [[T; 2]; 2], tol: f64) -> Self {
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        let frob2 = h[0][0] * h[0][0] + h[1][1] * h[1][1] + T::lit(2.0) * h[0][1] * h[0][1];
        if !(det.abs() > T::lit(tol) * frob2) {
            return MorseIndex::Degenerate;
        }
        let ev = sym2_eigenvalues(h);
        MorseIndex::from_count(ev.iter().filter(|e| **e < T::zero()).count())
    }
}

impl fmt::Display for MorseIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.as_number() {
            Some(n) => write!(f, "{n}"),
            None => f.write_str("degenerate"),
        }
    }
}

impl Serialize for MorseIndex {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self.as_number() {
            Some(n) => s.serialize_u8(n),
            None => s.serialize_str("degenerate"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// A branch point, classified in its local frame.
    WeierstrassClosedForm,
    /// Newton iteration from the seed grid.
    NewtonFromGrid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint<T: Real> {
    /// Canonical location (`|u| <= 1`).
    pub location: ChartPoint<T>,
    pub lifts: Vec<CurvePoint<T>>,
    pub k_value: T,
    /// Real Hessian in the chart coordinate; for branch points, in the local
    /// frame parameter.
    pub hessian: [[T; 2]; 2],
    pub index: MorseIndex,
    /// `|grad K|` at the reported location.
    pub residual: T,
    pub provenance: Provenance,
    /// 1-based branch point index for Weierstrass points.
    pub branch_index: Option<usize>,
}

impl<T: Real> CriticalPoint<T> {
    pub fn multiplicity(&self) -> usize {
        self.lifts.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchWarning {
    /// Two accepted critical points are closer than two seed-grid cells.
    GridTooCoarse { separation: f64, cell: f64 },
}

impl fmt::Display for SearchWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SearchWarning::GridTooCoarse { separation, cell } => write!(
                f,
                "GridTooCoarse: critical points {separation:.3e} apart, seed cell {cell:.3e}; raise --seed-density"
            ),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SearchResult<T: Real> {
    pub points: Vec<CriticalPoint<T>>,
    pub warnings: Vec<SearchWarning>,
    /// Largest `|K|` over the seed grid.
    pub grid_max_abs_k: T,
}

fn seed_grid<T: Real>(opts: &SearchOptions) -> Vec<ChartPoint<T>> {
    let n = opts.seed_density;
    let r = opts.seed_radius;
    let mut seeds = Vec::new();
    for chart in [Chart::Affine, Chart::Infinity] {
        for i in 0..n {
            for j in 0..n {
                let x = -r + 2.0 * r * i as f64 / (n - 1) as f64;
                let y = -r + 2.0 * r * j as f64 / (n - 1) as f64;
                if x * x + y * y <= r * r {
                    seeds.push(ChartPoint::new(chart, Complex::new(T::lit(x), T::lit(y))));
                }
            }
        }
    }
    seeds
}

fn grad_norm<T: Real>(g: [T; 2]) -> T {
    (g[0] * g[0] + g[1] * g[1]).sqrt()
}

struct NewtonOutcome<T: Real> {
    point: ChartPoint<T>,
    residual: T,
}

/// Damped Newton on `grad K = 0` from `seed`, in the seed's chart.
fn newton<T: Real>(
    metric: &ThetaMetric<T>,
    seed: ChartPoint<T>,
    opts: &SearchOptions,
    k_floor: T,
    iterations: usize,
) -> Option<NewtonOutcome<T>> {
    let tol = T::tol(opts.tol_crit);
    let escape = T::lit(ESCAPE_RADIUS);
    let mut p = seed;
    let mut jet = metric.curvature_jet(p).ok()?;
    let mut g = jet.gradient();
    for _ in 0..=iterations {
        let gn = grad_norm(g);
        if !gn.is_finite() {
            return None;
        }
        if gn <= tol * jet.k.abs().max(k_floor) {
            return Some(NewtonOutcome { point: p, residual: gn });
        }
        let h = real_hessian(&jet);
        let det = h[0][0] * h[1][1] - h[0][1] * h[1][0];
        if det == T::zero() || !det.is_finite() {
            return None;
        }
        let dx = -(h[1][1] * g[0] - h[0][1] * g[1]) / det;
        let dy = -(-h[1][0] * g[0] + h[0][0] * g[1]) / det;
        let step = Complex::new(dx, dy);
        let mut alpha = T::one();
        let mut accepted = false;
        for _ in 0..12 {
            let q = ChartPoint::new(p.chart, p.u + step * alpha);
            if q.u.norm() > escape {
                return None;
            }
            if let Ok(jq) = metric.curvature_jet(q) {
                let gq = jq.gradient();
                if grad_norm(gq) < gn {
                    p = q;
                    jet = jq;
                    g = gq;
                    accepted = true;
                    break;
                }
            }
            alpha = alpha * T::lit(0.5);
        }
        if !accepted {
            return None;
        }
    }
    None
}

/// Finds all critical points of `K` on the sphere and lifts them to the curve.
pub fn find_critical_points<T: Real>(metric: &ThetaMetric<T>, opts: &SearchOptions) -> Result<SearchResult<T>> {
    opts.validate()?;
    let curve = metric.curve();
    let seeds = seed_grid::<T>(opts);
    let grid_max = seeds.iter().map(|&p| metric.curvature(p).abs()).fold(T::zero(), T::max);
    if !(grid_max >= T::lit(opts.flat_threshold)) {
        return Err(Error::FlatMetric {
            max_abs_k: grid_max.as_f64(),
        });
    }
    let k_floor = grid_max * T::lit(1e-3);

    let mut points = Vec::new();
    for k in 1..=curve.branch_points().len() {
        let check = weierstrass_hessian_check(metric, k, opts)?;
        let a = curve.branch_points()[k - 1];
        let location = ChartPoint::affine(a).canonical();
        points.push(CriticalPoint {
            location,
            lifts: vec![CurvePoint {
                chart: location.chart,
                coordinate: location.u,
                y_value: Complex::new(T::zero(), T::zero()),
                is_branch: true,
            }],
            k_value: T::zero(),
            hessian: check.hessian,
            index: check.index,
            residual: T::zero(),
            provenance: Provenance::WeierstrassClosedForm,
            branch_index: Some(k),
        });
    }

    let found: Vec<NewtonOutcome<T>> = seeds
        .par_iter()
        .filter_map(|&s| newton(metric, s, opts, k_floor, opts.max_iterations))
        .collect();

    // Canonicalize and polish in the canonical chart, then merge duplicates.
    let mut candidates: Vec<NewtonOutcome<T>> = found
        .into_iter()
        .filter_map(|o| {
            let c = o.point.canonical();
            if c.chart == o.point.chart {
                Some(o)
            } else {
                newton(metric, c, opts, k_floor, 10)
            }
        })
        .collect();
    candidates.sort_by(|a, b| location_cmp(&a.point, &b.point));

    let branch_locations: Vec<ChartPoint<T>> = points.iter().map(|p| p.location).collect();
    let dedup = T::lit(opts.dedup_radius);
    let mut merged: Vec<NewtonOutcome<T>> = Vec::new();
    for c in candidates {
        if branch_locations.iter().any(|b| b.chordal_distance(&c.point) < dedup) {
            continue;
        }
        match merged.iter_mut().find(|m| m.point.chordal_distance(&c.point) < dedup) {
            Some(m) => {
                if c.residual < m.residual {
                    *m = c;
                }
            }
            None => merged.push(c),
        }
    }

    for m in merged {
        let jet = metric.curvature_jet(m.point)?;
        let hessian = real_hessian(&jet);
        points.push(CriticalPoint {
            location: m.point,
            lifts: curve.lift(m.point.chart, m.point.u),
            k_value: jet.k,
            hessian,
            index: MorseIndex::classify(hessian, opts.tol_degenerate),
            residual: grad_norm(jet.gradient()),
            provenance: Provenance::NewtonFromGrid,
            branch_index: None,
        });
    }
    points.sort_by(|a, b| location_cmp(&a.location, &b.location));

    let cell = 2.0 * opts.seed_radius / (opts.seed_density - 1) as f64;
    let mut warnings = Vec::new();
    let mut closest = f64::INFINITY;
    for i in 0..points.len() {
        for j in (i + 1)..points.len() {
            closest = closest.min(points[i].location.chordal_distance(&points[j].location).as_f64());
        }
    }
    // Chordal distance is at most twice the chart distance on |u| <= 1.
    if closest < 2.0 * cell {
        warnings.push(SearchWarning::GridTooCoarse {
            separation: closest,
            cell,
        });
    }

    Ok(SearchResult {
        points,
        warnings,
        grid_max_abs_k: grid_max,
    })
}

fn location_cmp<T: Real>(a: &ChartPoint<T>, b: &ChartPoint<T>) -> Ordering {
    a.chart
        .cmp(&b.chart)
        .then(a.u.re.partial_cmp(&b.u.re).unwrap_or(Ordering::Equal))
        .then(a.u.im.partial_cmp(&b.u.im).unwrap_or(Ordering::Equal))
}

/// Hessian of `K` at a Weierstrass point in its local frame parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeierstrassCheck<T: Real> {
    pub k: usize,
    /// Mean of the Hessian diagonal.
    pub r: T,
    /// `max(|H12|, |H11 - H22|/2) / |r|`.
    pub offdiag_ratio: T,
    /// Richardson-extrapolated Hessian.
    pub hessian: [[T; 2]; 2],
    pub index: MorseIndex,
    /// Index from the plain difference at half the step.
    pub index_half_step: MorseIndex,
    /// Finite-difference step in the frame parameter.
    pub step: T,
    /// Relative change between the step `h` and `h/2` Hessians.
    pub richardson_disagreement: T,
    /// Closed-form value `-4 |G_k(a_k)| D / H^3` of `r`.
    pub r_closed_form: T,
}

/// Relative Richardson disagreement above which the finite differences are
/// rejected.
const RICHARDSON_LIMIT: f64 = 1e-3;

/// Finite-difference Hessian of `s -> K(a_k + s^2)` at `s = 0`.
pub fn weierstrass_hessian_check<T: Real>(
    metric: &ThetaMetric<T>,
    k: usize,
    opts: &SearchOptions,
) -> Result<WeierstrassCheck<T>> {
    let curve = metric.curve();
    let frame = local_frame(curve, k)?;
    let h = frame.radius() * T::lit(opts.h_fd_factor);
    let ks = |s: Complex<T>| metric.curvature(ChartPoint::affine(frame.forward(s).coordinate));
    let hess = |h: T| -> [[T; 2]; 2] {
        let c = |x: T, y: T| ks(Complex::new(x, y));
        let k0 = c(T::zero(), T::zero());
        let two = T::lit(2.0);
        let hxx = (c(h, T::zero()) - two * k0 + c(-h, T::zero())) / (h * h);
        let hyy = (c(T::zero(), h) - two * k0 + c(T::zero(), -h)) / (h * h);
        let hxy = (c(h, h) - c(h, -h) - c(-h, h) + c(-h, -h)) / (T::lit(4.0) * h * h);
        [[hxx, hxy], [hxy, hyy]]
    };
    let h1 = hess(h);
    let h2 = hess(h * T::lit(0.5));
    let mut rich = [[T::zero(); 2]; 2];
    let mut diff = T::zero();
    let mut scale = T::zero();
    for i in 0..2 {
        for j in 0..2 {
            rich[i][j] = (T::lit(4.0) * h2[i][j] - h1[i][j]) / T::lit(3.0);
            diff = diff.max((h1[i][j] - h2[i][j]).abs());
            scale = scale.max(h2[i][j].abs());
        }
    }
    let disagreement = diff / scale.max(T::min_positive_value());
    if !(disagreement <= T::tol(RICHARDSON_LIMIT)) {
        return Err(Error::FdUnstable {
            disagreement: disagreement.as_f64(),
        });
    }
    let classify = |m: [[T; 2]; 2]| -> (T, T, MorseIndex) {
        let r = (m[0][0] + m[1][1]) * T::lit(0.5);
        let off = m[0][1].abs().max((m[0][0] - m[1][1]).abs() * T::lit(0.5)) / r.abs();
        let index = if off < T::lit(0.05) && r != T::zero() {
            if r < T::zero() {
                MorseIndex::Two
            } else {
                MorseIndex::Zero
            }
        } else {
            MorseIndex::classify(m, opts.tol_degenerate)
        };
        (r, off, index)
    };
    let (r, offdiag_ratio, index) = classify(rich);
    let (_, _, index_half_step) = classify(h2);

    let centre = ChartPoint::affine(frame.center());
    let hf = metric.h_factor(centre);
    let d = hf.h * hf.h_uubar - hf.h_u.norm_sqr();
    let r_closed_form = -T::lit(4.0) * frame.g_center().norm() * d / (hf.h * hf.h * hf.h);
    Ok(WeierstrassCheck {
        k,
        r,
        offdiag_ratio,
        hessian: rich,
        index,
        index_half_step,
        step: h,
        richardson_disagreement: disagreement,
        r_closed_form,
    })
}

/// Outcome of the genus-2 criterion at a root of `F'`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma21Report<T: Real> {
    /// `F(z0) != 0` and `F'(z0) = 0`.
    pub applicable: bool,
    /// `|b'12| < tol_b |B|` for the matrix of `H` re-expanded at `z0`.
    pub is_critical: bool,
    /// Coefficient of `conj(t)` in `H(z0 + t)`.
    pub b12_shifted: Complex<T>,
    /// Verdict of the weaker test `Re b'12 = 0`.
    pub real_part_test: bool,
    /// `|grad K(z0)|` from the analytic jet.
    pub jet_residual: T,
    /// Jet verdict: `|grad K| <= tol_crit * |K|`.
    pub jet_critical: bool,
}

impl<T: Real> Lemma21Report<T> {
    pub fn consistent(&self) -> bool {
        !self.applicable || self.is_critical == self.jet_critical
    }
}

/// Relative threshold on `|b'12|` for the genus-2 criterion.
pub const TOL_B: f64 = 1e-8;
/// Relative threshold for `F(z0)`, `F'(z0)`, `F''(z0)` hypothesis checks.
pub const TOL_HYPOTHESIS: f64 = 1e-8;

fn chart_poly<T: Real>(metric: &ThetaMetric<T>, chart: Chart) -> Vec<Complex<T>> {
    match chart {
        Chart::Affine => metric.curve().coefficients().to_vec(),
        Chart::Infinity => metric.f_inf_coefficients().to_vec(),
    }
}

/// `|F^(order)(u)|`, absolute and relative to the magnitude bound of that
/// derivative on the disc of radius `max(|u|, 1)`.
fn relative_derivative<T: Real>(coeffs: &[Complex<T>], u: Complex<T>, order: usize) -> (T, T) {
    let mut d = coeffs.to_vec();
    for _ in 0..order {
        d = poly::derivative(&d);
    }
    let value = poly::horner(&d, u).norm();
    let r = Complex::new(u.norm().max(T::one()), T::zero());
    let bound = poly::magnitude_bound(&d, r).max(T::min_positive_value());
    (value, value / bound)
}

/// Criterion at a root `z0` of `F'` for genus 2: with `f'(z0) = 0` the
/// gradient of `K` is proportional to `H_u(z0)`, so `z0` is critical exactly
/// when `b'12 = H_ū(z0)` vanishes.
pub fn lemma21_criterion<T: Real>(
    metric: &ThetaMetric<T>,
    p: ChartPoint<T>,
    opts: &SearchOptions,
) -> Result<Lemma21Report<T>> {
    if metric.genus() != 2 {
        return Err(Error::NotGenusTwo(metric.genus()));
    }
    let coeffs = chart_poly(metric, p.chart);
    let (f0, _) = relative_derivative(&coeffs, p.u, 0);
    let (_, f1_rel) = relative_derivative(&coeffs, p.u, 1);
    let scale = poly::magnitude_bound(&coeffs, Complex::new(p.u.norm().max(T::one()), T::zero()));
    let tol = T::tol(TOL_HYPOTHESIS);
    let applicable = f0 > tol * scale && f1_rel < tol;

    let hf = metric.h_factor(p);
    let b_norm = metric.b().max_abs();
    let b12 = hf.h_ubar;
    let tol_b = T::tol(TOL_B) * b_norm;
    let is_critical = b12.norm() < tol_b;
    let real_part_test = b12.re.abs() < tol_b;

    let jet = metric.curvature_jet(p)?;
    let jet_residual = grad_norm(jet.gradient());
    // The residual at an exact critical point is pure rounding, a few ulps of
    // the individual product-rule terms; 1e-10 relative leaves ample room.
    let jet_critical = jet_residual <= T::tol(opts.tol_crit) * jet.k.abs() * T::lit(1e3);
    Ok(Lemma21Report {
        applicable,
        is_critical,
        b12_shifted: b12,
        real_part_test,
        jet_residual,
        jet_critical,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lemma22Report<T: Real> {
    pub index: MorseIndex,
    pub k_zz: Complex<T>,
    pub k_zzbar: T,
    pub hessian: [[T; 2]; 2],
}

/// At a point with `F != 0`, `F' = F'' = 0` and `b'12 = 0`, returns the
/// Morse index from the analytic jet (a minimum is expected).
pub fn lemma22_minimum_check<T: Real>(
    metric: &ThetaMetric<T>,
    p: ChartPoint<T>,
    opts: &SearchOptions,
) -> Result<Lemma22Report<T>> {
    let l21 = lemma21_criterion(metric, p, opts)?;
    let coeffs = chart_poly(metric, p.chart);
    let (_, f2_rel) = relative_derivative(&coeffs, p.u, 2);
    let tol = T::tol(TOL_HYPOTHESIS);
    let mut failed = Vec::new();
    if !l21.applicable {
        failed.push("F(z0) != 0 and F'(z0) = 0".to_string());
    }
    if !(f2_rel < tol) {
        failed.push(format!("F''(z0) = 0 (relative size {:.3e})", f2_rel.as_f64()));
    }
    if !l21.is_critical {
        failed.push(format!("b'12 = 0 (|b'12| = {:.3e})", l21.b12_shifted.norm().as_f64()));
    }
    if !failed.is_empty() {
        return Err(Error::HypothesesNotMet(failed.join("; ")));
    }
    let jet = metric.curvature_jet(p)?;
    let hessian = real_hessian(&jet);
    Ok(Lemma22Report {
        index: MorseIndex::classify(hessian, opts.tol_degenerate),
        k_zz: jet.k_zz,
        k_zzbar: jet.k_zzbar,
        hessian,
    })
}

#[derive(Debug, Clone)]
pub struct MorseCensus<T: Real> {
    pub critical_points: Vec<CriticalPoint<T>>,
    pub i0: usize,
    pub i1: usize,
    pub i2: usize,
    pub degenerate_count: usize,
    pub euler_lhs: i64,
    pub euler_rhs: i64,
    pub is_morse_function: bool,
    pub warnings: Vec<SearchWarning>,
}

/// Index counts over curve points, checked against `2 - 2g`.
pub fn census<T: Real>(metric: &ThetaMetric<T>, opts: &SearchOptions) -> Result<MorseCensus<T>> {
    let found = find_critical_points(metric, opts)?;
    census_from_points(metric.genus(), found.points, found.warnings)
}

pub fn census_from_points<T: Real>(
    genus: usize,
    critical_points: Vec<CriticalPoint<T>>,
    warnings: Vec<SearchWarning>,
) -> Result<MorseCensus<T>> {
    let (mut i0, mut i1, mut i2, mut degenerate) = (0, 0, 0, 0);
    for p in &critical_points {
        let m = p.multiplicity();
        match p.index {
            MorseIndex::Zero => i0 += m,
            MorseIndex::One => i1 += m,
            MorseIndex::Two => i2 += m,
            MorseIndex::Degenerate => degenerate += m,
        }
    }
    let lhs = i0 as i64 - i1 as i64 + i2 as i64;
    let rhs = 2 - 2 * genus as i64;
    if lhs != rhs {
        return Err(Error::CensusInconsistent {
            lhs,
            rhs,
            i0,
            i1,
            i2,
            degenerate,
        });
    }
    Ok(MorseCensus {
        critical_points,
        i0,
        i1,
        i2,
        degenerate_count: degenerate,
        euler_lhs: lhs,
        euler_rhs: rhs,
        is_morse_function: degenerate == 0,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegrationConfig {
    pub initial_radial: usize,
    pub initial_angular: usize,
    /// Relative change between successive refinements at which to stop.
    pub tolerance: f64,
    pub max_refinements: usize,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        IntegrationConfig {
            initial_radial: 16,
            initial_angular: 32,
            tolerance: 1e-9,
            max_refinements: 7,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GaussBonnet {
    pub integral: f64,
    pub expected: f64,
    pub radial_nodes: usize,
    pub angular_nodes: usize,
    pub last_change: f64,
}

/// `int K dA` over the curve. On each chart disc `|u| <= 1` the integrand
/// `K rho^2 = -2 D / H^2` is smooth (the `|F|` factors cancel), and the two
/// sheets double the sphere integral.
pub fn gauss_bonnet<T: Real>(metric: &ThetaMetric<T>, cfg: &IntegrationConfig) -> Result<GaussBonnet> {
    if cfg.initial_radial == 0 || cfg.initial_angular == 0 || !(cfg.tolerance > 0.0) {
        return Err(Error::InvalidConfig(
            "integration node counts and tolerance must be positive".into(),
        ));
    }
    let expected = 2.0 * std::f64::consts::PI * (2.0 - 2.0 * metric.genus() as f64);
    let density = |p: ChartPoint<T>| {
        let hf = metric.h_factor(p);
        let d = hf.h * hf.h_uubar - hf.h_u.norm_sqr();
        -T::lit(2.0) * d / (hf.h * hf.h)
    };
    let rule = |nr: usize, nt: usize| -> f64 {
        let (x, w) = gauss_legendre::<T>(nr);
        let dt = 2.0 * std::f64::consts::PI / nt as f64;
        let rows: Vec<f64> = (0..nr)
            .into_par_iter()
            .map(|i| {
                let r = (x[i] + T::one()) * T::lit(0.5);
                let wr = w[i] * T::lit(0.5) * r;
                let mut s = T::zero();
                for chart in [Chart::Affine, Chart::Infinity] {
                    for k in 0..nt {
                        let u = Complex::from_polar(r, T::lit(dt * k as f64));
                        s = s + density(ChartPoint::new(chart, u));
                    }
                }
                (s * wr).as_f64() * dt
            })
            .collect();
        2.0 * rows.iter().sum::<f64>()
    };
    let (mut nr, mut nt) = (cfg.initial_radial, cfg.initial_angular);
    let mut prev = rule(nr, nt);
    let mut change = f64::INFINITY;
    for _ in 0..cfg.max_refinements {
        nr *= 2;
        nt *= 2;
        let cur = rule(nr, nt);
        change = (cur - prev).abs() / cur.abs().max(f64::MIN_POSITIVE);
        prev = cur;
        if change <= cfg.tolerance.max(T::tol(0.0).as_f64() * 16.0) {
            return Ok(GaussBonnet {
                integral: cur,
                expected,
                radial_nodes: nr,
                angular_nodes: nt,
                last_change: change,
            });
        }
    }
    Err(Error::IntegrationNotConverged { change })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification_by_eigenvalue_signs() {
        assert_eq!(MorseIndex::classify([[1.0, 0.0], [0.0, 2.0]], 1e-8), MorseIndex::Zero);
        assert_eq!(MorseIndex::classify([[1.0, 0.0], [0.0, -2.0]], 1e-8), MorseIndex::One);
        assert_eq!(MorseIndex::classify([[-1.0, 0.3], [0.3, -2.0]], 1e-8), MorseIndex::Two);
        assert_eq!(
            MorseIndex::classify([[1.0, 1.0], [1.0, 1.0]], 1e-8),
            MorseIndex::Degenerate
        );
    }

    #[test]
    fn options_validation() {
        assert!(SearchOptions::default().validate().is_ok());
        let o = SearchOptions {
            seed_density: 1,
            ..SearchOptions::default()
        };
        assert!(o.validate().is_err());
    }
}
