//! The hyperelliptic curve `y^2 = f(z) = prod (z - a_i)`, its charts on the
//! Riemann sphere, sheet-tracked continuation of `y`, and the local
//! coordinate frames centred on Weierstrass points.

use std::cmp::Ordering;
use std::fmt;

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::point_segment_distance;
use crate::poly;
use crate::scalar::{cr, Real};

/// Relative gap below which two branch points are treated as one.
pub const DEFAULT_DEGENERACY_THRESHOLD: f64 = 1e-10;

/// The two charts of the Riemann sphere: `z` and `w = 1/z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    Affine,
    Infinity,
}

impl Chart {
    pub fn as_str(self) -> &'static str {
        match self {
            Chart::Affine => "affine",
            Chart::Infinity => "infinity",
        }
    }
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CurveSpec<T: Real> {
    branch_points: Vec<Complex<T>>,
    genus: usize,
    coefficients: Vec<Complex<T>>,
    min_gap: T,
    degeneracy_threshold: T,
    label: Option<String>,
}

/// Lexicographic order by real part, then imaginary part.
pub(crate) fn lex_cmp<T: Real>(a: &Complex<T>, b: &Complex<T>) -> Ordering {
    a.re.partial_cmp(&b.re)
        .unwrap_or(Ordering::Equal)
        .then(a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal))
}

/// Validates branch points and builds the curve with the default
/// degeneracy threshold.
pub fn parse_curve<T: Real>(branch_points: &[Complex<T>]) -> Result<CurveSpec<T>> {
    parse_curve_with_threshold(branch_points, DEFAULT_DEGENERACY_THRESHOLD)
}

/// Like [`parse_curve`], rejecting pairs closer than
/// `relative_threshold * max |a_i|`.
pub fn parse_curve_with_threshold<T: Real>(
    branch_points: &[Complex<T>],
    relative_threshold: f64,
) -> Result<CurveSpec<T>> {
    if let Some(index) = branch_points
        .iter()
        .position(|a| !a.re.is_finite() || !a.im.is_finite())
    {
        return Err(Error::NonFinite { index: index + 1 });
    }
    let n = branch_points.len();
    if n % 2 == 1 {
        return Err(Error::OddCount(n));
    }
    if n < 4 {
        return Err(Error::TooFewBranchPoints(n));
    }
    if !(relative_threshold >= 0.0 && relative_threshold.is_finite()) {
        return Err(Error::InvalidConfig(format!(
            "degeneracy threshold must be a finite nonnegative number, got {relative_threshold}"
        )));
    }

    let mut points = branch_points.to_vec();
    points.sort_by(lex_cmp);

    let scale = points.iter().fold(T::zero(), |m, a| m.max(a.norm()));
    let threshold = T::lit(relative_threshold) * scale;
    let mut min_gap = T::infinity();
    for i in 0..n {
        for j in (i + 1)..n {
            let gap = (points[i] - points[j]).norm();
            if gap == T::zero() || gap < threshold {
                return Err(Error::DuplicateBranchPoint {
                    i: i + 1,
                    j: j + 1,
                    gap: gap.as_f64(),
                    threshold: threshold.as_f64(),
                });
            }
            min_gap = min_gap.min(gap);
        }
    }

    Ok(CurveSpec {
        coefficients: poly::expand_roots(&points),
        genus: n / 2 - 1,
        branch_points: points,
        min_gap,
        degeneracy_threshold: threshold,
        label: None,
    })
}

impl<T: Real> CurveSpec<T> {
    /// Builds the curve whose `f` has the given ascending coefficients.
    /// The polynomial is made monic and its roots become the branch points.
    pub fn from_coefficients(coefficients: &[Complex<T>]) -> Result<Self> {
        let mut c = coefficients.to_vec();
        while c.len() > 1 && c.last().is_some_and(|x| x.is_zero()) {
            c.pop();
        }
        let degree = c.len().saturating_sub(1);
        if degree % 2 == 1 {
            return Err(Error::OddCount(degree));
        }
        if degree < 4 {
            return Err(Error::TooFewBranchPoints(degree));
        }
        parse_curve(&poly::roots(&c))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    /// Branch points in lexicographic order.
    pub fn branch_points(&self) -> &[Complex<T>] {
        &self.branch_points
    }

    /// Ascending coefficients of the monic polynomial `f`.
    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coefficients
    }

    pub fn min_gap(&self) -> T {
        self.min_gap
    }

    pub fn degeneracy_threshold(&self) -> T {
        self.degeneracy_threshold
    }

    /// `max |a_i|`.
    pub fn scale(&self) -> T {
        self.branch_points.iter().fold(T::zero(), |m, a| m.max(a.norm()))
    }

    /// `order`-th derivative of `f` by Horner evaluation.
    pub fn eval_f(&self, z: Complex<T>, order: usize) -> Complex<T> {
        poly::eval_derivative(&self.coefficients, z, order)
    }

    /// Largest `|f(a_i)|` relative to the natural Horner scale at `a_i`.
    pub fn coefficient_residual(&self) -> T {
        self.branch_points.iter().fold(T::zero(), |m, &a| {
            let bound = poly::magnitude_bound(&self.coefficients, a).max(T::min_positive_value());
            m.max(poly::horner(&self.coefficients, a).norm() / bound)
        })
    }

    /// `f` in the given chart, in product form so that it vanishes exactly
    /// at branch points. The infinity chart uses `f_inf(w) = prod (1 - a_i w)`.
    pub fn chart_f(&self, chart: Chart, u: Complex<T>) -> Complex<T> {
        match chart {
            Chart::Affine => self.branch_points.iter().fold(Complex::one(), |p, &a| p * (u - a)),
            Chart::Infinity => self
                .branch_points
                .iter()
                .fold(Complex::one(), |p, &a| p * (cr(T::one()) - a * u)),
        }
    }

    /// Log-derivative `phi = F'/F` and `phi' = F''/F - phi^2` of the chart
    /// polynomial `F`. Undefined at branch points.
    pub fn chart_log_derivatives(&self, chart: Chart, u: Complex<T>) -> (Complex<T>, Complex<T>) {
        let mut phi = Complex::zero();
        let mut dphi = Complex::zero();
        for &a in &self.branch_points {
            let (num, den) = match chart {
                Chart::Affine => (cr(T::one()), u - a),
                Chart::Infinity => (-a, cr(T::one()) - a * u),
            };
            let q = num / den;
            phi = phi + q;
            dphi = dphi - q * q;
        }
        (phi, dphi)
    }

    /// Branch points as seen in the chart coordinate. In the infinity chart a
    /// branch point at the origin has no image and is skipped.
    pub fn chart_branch_points(&self, chart: Chart) -> Vec<Complex<T>> {
        match chart {
            Chart::Affine => self.branch_points.clone(),
            Chart::Infinity => self
                .branch_points
                .iter()
                .filter(|a| !a.is_zero())
                .map(|a| a.inv())
                .collect(),
        }
    }

    /// Distance to the nearest branch point and its 1-based index.
    pub fn nearest_branch_point(&self, z: Complex<T>) -> (usize, T) {
        self.branch_points
            .iter()
            .enumerate()
            .map(|(i, &a)| (i + 1, (z - a).norm()))
            .fold((0, T::infinity()), |best, cur| if cur.1 < best.1 { cur } else { best })
    }

    /// Index (1-based) of the branch point whose chart image equals `u`.
    pub fn branch_index_at(&self, chart: Chart, u: Complex<T>) -> Option<usize> {
        if !self.chart_f(chart, u).is_zero() {
            return None;
        }
        let (i, _) = match chart {
            Chart::Affine => self.nearest_branch_point(u),
            Chart::Infinity => self.nearest_branch_point(u.inv()),
        };
        Some(i)
    }

    /// The `2g + 2` fixed points `(a_i, 0)` of the involution.
    pub fn weierstrass_points(&self) -> Vec<CurvePoint<T>> {
        self.branch_points
            .iter()
            .map(|&a| CurvePoint {
                chart: Chart::Affine,
                coordinate: a,
                y_value: Complex::zero(),
                is_branch: true,
            })
            .collect()
    }

    /// All curve points over a chart coordinate: one at a branch point,
    /// two otherwise (principal root first).
    pub fn lift(&self, chart: Chart, u: Complex<T>) -> Vec<CurvePoint<T>> {
        let f = self.chart_f(chart, u);
        if f.is_zero() {
            return vec![CurvePoint {
                chart,
                coordinate: u,
                y_value: Complex::zero(),
                is_branch: true,
            }];
        }
        let y = f.sqrt();
        [y, -y]
            .into_iter()
            .map(|y_value| CurvePoint {
                chart,
                coordinate: u,
                y_value,
                is_branch: false,
            })
            .collect()
    }

    /// Distinct roots of `f'`, the candidate centres for the genus-2 criterion
    /// checks, with multiplicities.
    pub fn f_prime_roots(&self) -> Vec<(Complex<T>, usize)> {
        poly::distinct_roots(&poly::derivative(&self.coefficients))
    }
}

/// A point `(u, y)` on the curve in one of the two charts. In the infinity
/// chart `y` is the rescaled value `w^(g+1) y`, which satisfies
/// `y^2 = f_inf(w)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint<T: Real> {
    pub chart: Chart,
    pub coordinate: Complex<T>,
    pub y_value: Complex<T>,
    pub is_branch: bool,
}

impl<T: Real> CurvePoint<T> {
    /// `|y^2 - F(u)| <= tol * (1 + |F(u)|)` for the chart polynomial `F`.
    pub fn satisfies(&self, curve: &CurveSpec<T>, tol: T) -> bool {
        let f = curve.chart_f(self.chart, self.coordinate);
        (self.y_value * self.y_value - f).norm() <= tol * (T::one() + f.norm())
    }

    /// Image under `(u, y) -> (u, -y)`.
    pub fn involution(&self) -> Self {
        CurvePoint {
            y_value: -self.y_value,
            ..*self
        }
    }

    /// Re-expresses the point in the requested chart. Returns `None` when
    /// the point is the origin of its chart and has no image in the other.
    pub fn to_chart(&self, curve: &CurveSpec<T>, chart: Chart) -> Option<Self> {
        if chart == self.chart {
            return Some(*self);
        }
        if self.coordinate.is_zero() {
            return None;
        }
        let u = self.coordinate.inv();
        // y_inf = w^(g+1) y in both directions since w = 1/z.
        let factor = u.powu(curve.genus() as u32 + 1);
        Some(CurvePoint {
            chart,
            coordinate: u,
            y_value: self.y_value * factor,
            is_branch: self.is_branch,
        })
    }
}

/// Local parameter `s = y / sqrt(G_k(x))` around the Weierstrass point
/// `(a_k, 0)`, where `G_k(x) = prod_{i != k} (x - a_i)`.
///
/// Because `y^2 = (x - a_k) G_k(x)`, the forward map is explicit:
/// `x = a_k + s^2` and `y = s sqrt(G_k(x))`.
#[derive(Debug, Clone)]
pub struct LocalFrame<T: Real> {
    k: usize,
    center: Complex<T>,
    others: Vec<Complex<T>>,
    deflated: Vec<Complex<T>>,
    sqrt_g_center: Complex<T>,
    radius: T,
}

/// Frame at the `k`-th branch point (1-based, lexicographic order).
pub fn local_frame<T: Real>(curve: &CurveSpec<T>, k: usize) -> Result<LocalFrame<T>> {
    let n = curve.branch_points().len();
    if k == 0 || k > n {
        return Err(Error::IndexOutOfRange { index: k, max: n });
    }
    let center = curve.branch_points()[k - 1];
    let others: Vec<_> = curve
        .branch_points()
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != k - 1)
        .map(|(_, &a)| a)
        .collect();
    let distance = others.iter().fold(T::infinity(), |m, &a| m.min((a - center).norm()));
    let floor = T::tol(1e-8) * curve.scale().max(T::one());
    if distance < floor {
        return Err(Error::FrameRadiusCollapse {
            k,
            distance: distance.as_f64(),
        });
    }
    let deflated = poly::expand_roots(&others);
    let g_center = others.iter().fold(Complex::<T>::one(), |p, &a| p * (center - a));
    Ok(LocalFrame {
        k,
        center,
        sqrt_g_center: g_center.sqrt(),
        deflated,
        others,
        // |x - a_k| = |s|^2 stays below half the distance to the next branch
        // point, inside the disc where every factor's principal root is analytic.
        radius: (distance * T::lit(0.5)).sqrt(),
    })
}

impl<T: Real> LocalFrame<T> {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn center(&self) -> Complex<T> {
        self.center
    }

    /// Radius of the disc in the local parameter on which the maps are valid.
    pub fn radius(&self) -> T {
        self.radius
    }

    /// Ascending coefficients of `G_k`.
    pub fn deflated_poly(&self) -> &[Complex<T>] {
        &self.deflated
    }

    pub fn g_center(&self) -> Complex<T> {
        self.sqrt_g_center * self.sqrt_g_center
    }

    /// The fixed branch of `sqrt(G_k(x))` continued from `a_k`.
    pub fn sqrt_g(&self, x: Complex<T>) -> Complex<T> {
        self.others.iter().fold(self.sqrt_g_center, |acc, &a| {
            acc * (cr(T::one()) + (x - self.center) / (self.center - a)).sqrt()
        })
    }

    /// Curve point with local parameter `s`.
    pub fn forward(&self, s: Complex<T>) -> CurvePoint<T> {
        let x = self.center + s * s;
        CurvePoint {
            chart: Chart::Affine,
            coordinate: x,
            y_value: s * self.sqrt_g(x),
            is_branch: s.is_zero(),
        }
    }

    /// Local parameter of an affine curve point near the centre.
    pub fn inverse(&self, p: &CurvePoint<T>) -> Result<Complex<T>> {
        if p.chart != Chart::Affine {
            return Err(Error::InvalidConfig("local frames take affine curve points".into()));
        }
        Ok(p.y_value / self.sqrt_g(p.coordinate))
    }
}

/// A polyline along which `y` is continued, certified to keep a minimum
/// distance from every branch point.
#[derive(Debug, Clone)]
pub struct ContinuationPath<T: Real> {
    waypoints: Vec<Complex<T>>,
    min_distance: T,
    margin: T,
}

impl<T: Real> ContinuationPath<T> {
    pub fn new(curve: &CurveSpec<T>, waypoints: Vec<Complex<T>>, margin: T) -> Result<Self> {
        if waypoints.len() < 2 {
            return Err(Error::InvalidConfig(
                "a continuation path needs at least two waypoints".into(),
            ));
        }
        if !(margin > T::zero()) {
            return Err(Error::InvalidConfig(format!(
                "path margin must be positive, got {margin}"
            )));
        }
        let mut min_distance = T::infinity();
        for (idx, &a) in curve.branch_points().iter().enumerate() {
            for seg in waypoints.windows(2) {
                let d = point_segment_distance(a, seg[0], seg[1]);
                if d < margin {
                    return Err(Error::PathTooCloseToBranchPoint {
                        index: idx + 1,
                        distance: d.as_f64(),
                        margin: margin.as_f64(),
                    });
                }
                min_distance = min_distance.min(d);
            }
        }
        Ok(ContinuationPath {
            waypoints,
            min_distance,
            margin,
        })
    }

    /// A closed path: the first waypoint is appended at the end.
    pub fn closed(curve: &CurveSpec<T>, mut waypoints: Vec<Complex<T>>, margin: T) -> Result<Self> {
        if let Some(&first) = waypoints.first() {
            if waypoints.last() != Some(&first) {
                waypoints.push(first);
            }
        }
        Self::new(curve, waypoints, margin)
    }

    pub fn waypoints(&self) -> &[Complex<T>] {
        &self.waypoints
    }

    pub fn start(&self) -> Complex<T> {
        self.waypoints[0]
    }

    pub fn end(&self) -> Complex<T> {
        self.waypoints[self.waypoints.len() - 1]
    }

    pub fn min_distance(&self) -> T {
        self.min_distance
    }

    pub fn margin(&self) -> T {
        self.margin
    }
}

/// Continues `y = sqrt(f)` from `path.start()` to `path.end()`.
pub fn continue_y<T: Real>(
    curve: &CurveSpec<T>,
    path: &ContinuationPath<T>,
    y_start: Complex<T>,
) -> Result<Complex<T>> {
    let f0 = curve.chart_f(Chart::Affine, path.start());
    let residual = (y_start * y_start - f0).norm() / (T::one() + f0.norm());
    if !(residual <= T::tol(1e-8)) {
        return Err(Error::InvalidStartValue {
            residual: residual.as_f64(),
        });
    }
    let mut y = y_start;
    for seg in path.waypoints().windows(2) {
        let (a, b) = (seg[0], seg[1]);
        let mut ys = track_sheet(curve, |t| a + (b - a) * t, &[T::zero(), T::one()], y)?;
        y = ys.pop().expect("tracker returns one value per node");
    }
    Ok(y)
}

/// Tracks the sheet of `y` along `path(t)` through the increasing parameter
/// values `ts`, starting from `y0` at `ts[0]`. Returns `y` at every entry.
///
/// Steps are limited to an eighth of the distance to the nearest branch
/// point and halved until the two candidate roots are separated by more
/// than ten times the step-to-step drift.
pub(crate) fn track_sheet<T: Real>(
    curve: &CurveSpec<T>,
    path: impl Fn(T) -> Complex<T>,
    ts: &[T],
    y0: Complex<T>,
) -> Result<Vec<Complex<T>>> {
    let mut out = Vec::with_capacity(ts.len());
    if ts.is_empty() {
        return Ok(out);
    }
    let span = (ts[ts.len() - 1] - ts[0]).abs().max(T::min_positive_value());
    let min_dt = span * T::epsilon() * T::lit(64.0);
    let mut t = ts[0];
    let mut z = path(t);
    let mut y = y0;
    out.push(y);
    let mut dt = span / T::lit(16.0);
    for &target in &ts[1..] {
        while t < target {
            let (index, d) = curve.nearest_branch_point(z);
            if d == T::zero() {
                return Err(Error::PathTooCloseToBranchPoint {
                    index,
                    distance: 0.0,
                    margin: 0.0,
                });
            }
            let max_len = d / T::lit(8.0);
            loop {
                let remaining = target - t;
                let tn = if dt >= remaining { target } else { t + dt };
                let zn = path(tn);
                if (zn - z).norm() > max_len {
                    dt = dt * T::lit(0.5);
                } else {
                    let s = curve.chart_f(Chart::Affine, zn).sqrt();
                    let cand = if (s - y).norm() <= (s + y).norm() { s } else { -s };
                    let drift = (cand - y).norm();
                    let separation = s.norm() * T::lit(2.0);
                    if separation > T::lit(10.0) * drift {
                        t = tn;
                        z = zn;
                        y = cand;
                        // Capped: many short node-to-node hops must not
                        // grow the step without bound.
                        dt = (dt * T::lit(1.5)).min(span);
                        break;
                    }
                    dt = dt * T::lit(0.5);
                }
                if dt < min_dt {
                    return Err(Error::ContinuationAmbiguous {
                        re: z.re.as_f64(),
                        im: z.im.as_f64(),
                    });
                }
            }
        }
        out.push(y);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn sixth_roots() -> Vec<Complex<f64>> {
        (0..6)
            .map(|k| Complex::from_polar(1.0, std::f64::consts::PI * k as f64 / 3.0))
            .collect()
    }

    #[test]
    fn sixth_roots_give_z6_minus_one() {
        let c = parse_curve(&sixth_roots()).unwrap();
        assert_eq!(c.genus(), 2);
        let want = [-1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0];
        for (a, b) in c.coefficients().iter().zip(want) {
            assert!((a - cx(b, 0.0)).norm() < 1e-14);
        }
        assert!(c.eval_f(cx(1.0, 0.0), 0).norm() < 1e-14);
        assert!(c.eval_f(cx(0.0, 0.0), 1).norm() < 1e-14);
        assert!((c.eval_f(cx(2.0, 0.0), 0) - cx(63.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn genus_one_expansion_and_errors() {
        let pts = [cx(0.0, 0.0), cx(1.0, 0.0), cx(-1.0, 0.0), cx(2.0, 0.0)];
        let c = parse_curve(&pts).unwrap();
        assert_eq!(c.genus(), 1);
        let want = [0.0, 2.0, -1.0, -2.0, 1.0];
        for (a, b) in c.coefficients().iter().zip(want) {
            assert!((a - cx(b, 0.0)).norm() < 1e-14);
        }
        assert_eq!(c.branch_points()[0], cx(-1.0, 0.0));
        let dup = [cx(0.0, 0.0), cx(0.0, 0.0), cx(1.0, 0.0), cx(2.0, 0.0)];
        assert!(matches!(parse_curve(&dup), Err(Error::DuplicateBranchPoint { .. })));
        assert!(matches!(parse_curve(&pts[..3]), Err(Error::OddCount(3))));
        assert!(matches!(parse_curve(&pts[..2]), Err(Error::TooFewBranchPoints(2))));
        let nan = [cx(f64::NAN, 0.0), cx(1.0, 0.0), cx(2.0, 0.0), cx(3.0, 0.0)];
        assert!(matches!(parse_curve(&nan), Err(Error::NonFinite { index: 1 })));
    }

    #[test]
    fn frame_round_trip_and_centre() {
        let c = parse_curve(&sixth_roots()).unwrap();
        let k = c
            .branch_points()
            .iter()
            .position(|a| (a - cx(1.0, 0.0)).norm() < 1e-12)
            .unwrap()
            + 1;
        let frame = local_frame(&c, k).unwrap();
        assert!((frame.g_center() - cx(6.0, 0.0)).norm() < 1e-12);
        let p0 = frame.forward(cx(0.0, 0.0));
        assert!(p0.is_branch && (p0.coordinate - cx(1.0, 0.0)).norm() < 1e-12);
        let s = cx(0.01, 0.0);
        let p = frame.forward(s);
        assert!(p.satisfies(&c, 1e-12));
        assert!((frame.inverse(&p).unwrap() - s).norm() < 1e-12);
        assert!(matches!(local_frame(&c, 7), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn monodromy_of_small_loops() {
        let c = parse_curve(&sixth_roots()).unwrap();
        let around = |centre: Complex<f64>, r: f64| -> Vec<Complex<f64>> {
            (0..24)
                .map(|k| centre + Complex::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / 24.0))
                .collect()
        };
        let one = ContinuationPath::closed(&c, around(cx(1.0, 0.0), 0.3), 0.1).unwrap();
        let y0 = c.eval_f(one.start(), 0).sqrt();
        let y1 = continue_y(&c, &one, y0).unwrap();
        assert!((y1 + y0).norm() < 1e-12 * y0.norm());

        let two = ContinuationPath::closed(&c, around(cx(0.75, 0.433), 0.7), 0.05).unwrap();
        let y0 = c.eval_f(two.start(), 0).sqrt();
        let y1 = continue_y(&c, &two, y0).unwrap();
        assert!((y1 - y0).norm() < 1e-12 * y0.norm());
    }

    #[test]
    fn path_validation() {
        let c = parse_curve(&sixth_roots()).unwrap();
        let bad = ContinuationPath::new(&c, vec![cx(0.0, 0.0), cx(2.0, 0.0)], 0.01);
        assert!(matches!(bad, Err(Error::PathTooCloseToBranchPoint { .. })));
        let p = ContinuationPath::new(&c, vec![cx(2.0, 0.0), cx(3.0, 0.0)], 0.5).unwrap();
        assert!(matches!(
            continue_y(&c, &p, cx(1.0, 0.0)),
            Err(Error::InvalidStartValue { .. })
        ));
    }

    #[test]
    fn chart_change_preserves_curve_equation() {
        let c = parse_curve(&sixth_roots()).unwrap();
        for p in c.lift(Chart::Affine, cx(0.4, 1.1)) {
            let q = p.to_chart(&c, Chart::Infinity).unwrap();
            assert!(q.satisfies(&c, 1e-12));
            let back = q.to_chart(&c, Chart::Affine).unwrap();
            assert!((back.y_value - p.y_value).norm() < 1e-12);
        }
    }
}
