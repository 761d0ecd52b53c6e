//! Homology cycles, period integrals of `z^(j-1) dz / y`, and the normalized
//! period matrix.
//!
//! The branch points are joined into a chain `e_1, ..., e_{2g+2}`. Every
//! chain segment `[e_k, e_{k+1}]` gets a confocal ellipse `c_k` with foci at
//! its endpoints. `A_i = c_{2i-1}` and `B_i = c_{2i} + c_{2i+2} + ... + c_{2g}`,
//! the sum being the deformation of one contour around
//! `{e_{2i}, ..., e_{2g+1}}`. Its components share a sheet: `y` is carried
//! between them along a path that never crosses the chain, and since the
//! complement of the chain only has loops around all branch points (even
//! monodromy), any such path gives the same sheet.
//!
//! Ellipses are smooth closed curves on which the integrand is analytic in a
//! strip, so the periodic trapezoid rule converges exponentially.

use num_complex::Complex;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::curve::{lex_cmp, track_sheet, Chart, CurveSpec};
use crate::error::{Error, Result};
use crate::geometry::{point_segment_distance, segment_segment_distance, segments_intersect, winding_number};
use crate::linalg::{CMat, RMat};
use crate::quadrature::gauss_legendre;
use crate::scalar::Real;

/// Quadrature and contour settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Trapezoid nodes on the first pass over a contour.
    pub initial_nodes: usize,
    /// Node count at which doubling gives up.
    pub max_nodes: usize,
    /// Target change between successive estimates, relative to the
    /// absolute-value integral of the integrand.
    pub tolerance: f64,
    /// Fraction of the distance (in elliptic coordinates) to the nearest
    /// excluded branch point at which each ellipse is placed.
    pub margin_factor: f64,
    /// Tolerance for `Z = Z^t` during sign fixing and certification.
    pub symmetry_tolerance: f64,
    /// Largest acceptable condition number of the A-period block.
    pub condition_limit: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            initial_nodes: 32,
            max_nodes: 1 << 16,
            tolerance: 1e-12,
            margin_factor: 0.5,
            symmetry_tolerance: 1e-9,
            condition_limit: 1e12,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.tolerance > 0.0 && self.tolerance < 1.0) {
            return bad(format!(
                "quadrature tolerance must lie in (0, 1), got {}",
                self.tolerance
            ));
        }
        if !self.initial_nodes.is_power_of_two() || self.initial_nodes < 4 {
            return bad(format!(
                "initial node count must be a power of two >= 4, got {}",
                self.initial_nodes
            ));
        }
        if !self.max_nodes.is_power_of_two() || self.max_nodes < self.initial_nodes {
            return bad(format!(
                "node limit must be a power of two >= the initial count, got {}",
                self.max_nodes
            ));
        }
        if !(self.margin_factor > 0.0 && self.margin_factor < 1.0) {
            return bad(format!("margin factor must lie in (0, 1), got {}", self.margin_factor));
        }
        if !(self.symmetry_tolerance > 0.0) || !(self.condition_limit > 1.0) {
            return bad("symmetry tolerance and condition limit must be positive".into());
        }
        Ok(())
    }
}

/// Largest elliptic radius used for a chain ellipse. Wider ellipses gain
/// nothing in convergence and pass needlessly far from the chain.
const ELLIPSE_RHO_CAP: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CycleKind {
    A,
    B,
}

/// Order in which branch points are chained before pairing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CycleOrdering {
    /// By real part, then imaginary part (the curve's own order).
    #[default]
    Lexicographic,
    /// By imaginary part, then real part.
    ImaginaryFirst,
    /// Lexicographic order reversed.
    Reversed,
}

/// A closed contour in the `z`-plane.
#[derive(Debug, Clone, PartialEq)]
pub enum Contour<T: Real> {
    /// `z(t) = center + half_focal * cosh(rho + i t)`, counter-clockwise,
    /// reference point at `t = ref_angle`.
    Ellipse {
        center: Complex<T>,
        half_focal: Complex<T>,
        rho: T,
        ref_angle: T,
    },
    /// Closed polyline (last point joins the first), reference point at the
    /// first waypoint.
    Polyline { waypoints: Vec<Complex<T>> },
}

impl<T: Real> Contour<T> {
    pub fn ellipse_point(center: Complex<T>, h: Complex<T>, rho: T, t: T) -> Complex<T> {
        center + h * Complex::new(rho, t).cosh()
    }

    /// Starting point of the integration.
    pub fn reference_point(&self) -> Complex<T> {
        match self {
            Contour::Ellipse {
                center,
                half_focal,
                rho,
                ref_angle,
            } => Self::ellipse_point(*center, *half_focal, *rho, *ref_angle),
            Contour::Polyline { waypoints } => waypoints[0],
        }
    }

    /// Winding number around `p`.
    pub fn winding(&self, p: Complex<T>) -> Option<i32> {
        match self {
            Contour::Ellipse {
                center,
                half_focal,
                rho,
                ..
            } => winding_number(
                |t| Self::ellipse_point(*center, *half_focal, *rho, t),
                T::zero(),
                T::lit(2.0) * T::PI(),
                p,
            ),
            Contour::Polyline { waypoints } => crate::geometry::polyline_winding(waypoints, p),
        }
    }

    fn distance_to(&self, p: Complex<T>) -> T {
        match self {
            Contour::Ellipse {
                center,
                half_focal,
                rho,
                ..
            } => {
                let n = 512;
                (0..n)
                    .map(|k| {
                        let t = T::lit(2.0 * std::f64::consts::PI * k as f64 / n as f64);
                        (Self::ellipse_point(*center, *half_focal, *rho, t) - p).norm()
                    })
                    .fold(T::infinity(), T::min)
            }
            Contour::Polyline { waypoints } => {
                let n = waypoints.len();
                (0..n)
                    .map(|i| point_segment_distance(p, waypoints[i], waypoints[(i + 1) % n]))
                    .fold(T::infinity(), T::min)
            }
        }
    }
}

/// One closed contour of a cycle, with the sheet fixed by `y_ref` at the
/// contour's reference point.
#[derive(Debug, Clone, PartialEq)]
pub struct CycleComponent<T: Real> {
    pub contour: Contour<T>,
    pub y_ref: Complex<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cycle<T: Real> {
    pub kind: CycleKind,
    pub index: usize,
    /// 1-based indices (curve order) of the branch points the cycle encloses.
    pub enclosed_branch_indices: Vec<usize>,
    pub components: Vec<CycleComponent<T>>,
    /// `+1` or `-1`; multiplies every integral over the cycle.
    pub orientation: i8,
}

impl<T: Real> Cycle<T> {
    pub fn reversed(&self) -> Self {
        Cycle {
            orientation: -self.orientation,
            ..self.clone()
        }
    }
}

/// Convergence record for one cycle.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CycleQuadrature {
    pub kind: CycleKind,
    pub index: usize,
    /// Final node count of each component.
    pub nodes: Vec<usize>,
    /// `(nodes, change)` pairs of every doubling step of each component.
    pub history: Vec<Vec<(usize, f64)>>,
    /// Last change relative to the absolute integral, maximized over components.
    pub estimated_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct QuadratureReport {
    pub cycles: Vec<CycleQuadrature>,
}

#[derive(Debug, Clone)]
pub struct PeriodData<T: Real> {
    pub curve: CurveSpec<T>,
    /// `A_1..A_g` followed by `B_1..B_g`, orientations after sign fixing.
    pub cycles: Vec<Cycle<T>>,
    pub pi_a: CMat<T>,
    pub pi_b: CMat<T>,
    /// `P = (Pi_A^-1)^t`: normalized differentials are `omega = eta P^t`.
    pub p: CMat<T>,
    pub z: CMat<T>,
    pub im_z_inv: RMat<T>,
    /// Sign applied to each B-cycle by the sign fix.
    pub sign_pattern: Vec<i8>,
    pub quadrature_report: QuadratureReport,
    pub config: QuadratureConfig,
}

/// Cycle basis from the lexicographic chain.
pub fn build_cycle_basis<T: Real>(curve: &CurveSpec<T>, cfg: &QuadratureConfig) -> Result<Vec<Cycle<T>>> {
    build_cycle_basis_ordered(curve, cfg, CycleOrdering::Lexicographic)
}

pub fn build_cycle_basis_ordered<T: Real>(
    curve: &CurveSpec<T>,
    cfg: &QuadratureConfig,
    ordering: CycleOrdering,
) -> Result<Vec<Cycle<T>>> {
    cfg.validate()?;
    let g = curve.genus();
    let bp = curve.branch_points();
    let mut order: Vec<usize> = (0..bp.len()).collect();
    match ordering {
        CycleOrdering::Lexicographic => {}
        CycleOrdering::ImaginaryFirst => order.sort_by(|&i, &j| {
            let (a, b) = (bp[i], bp[j]);
            lex_cmp(&Complex::new(a.im, a.re), &Complex::new(b.im, b.re))
        }),
        CycleOrdering::Reversed => order.reverse(),
    }
    let chain: Vec<Complex<T>> = order.iter().map(|&i| bp[i]).collect();
    check_chain_simple(&chain)?;
    let side = transverse_direction(&chain)?;

    let ellipses: Vec<Contour<T>> = (0..chain.len() - 1)
        .map(|k| chain_ellipse(&chain, k, side, cfg))
        .collect::<Result<_>>()?;
    for (k, e) in ellipses.iter().enumerate() {
        for (i, &a) in chain.iter().enumerate() {
            let want = i32::from(i == k || i == k + 1);
            if e.winding(a) != Some(want) {
                return Err(Error::CycleConstructionFailed(format!(
                    "ellipse around chain segment {} has wrong winding about branch point {}",
                    k + 1,
                    order[i] + 1
                )));
            }
        }
    }

    let enclosed = |from: usize, to: usize| -> Vec<usize> {
        let mut v: Vec<usize> = order[from..=to].iter().map(|&i| i + 1).collect();
        v.sort_unstable();
        v
    };
    let principal = |c: &Contour<T>| curve.chart_f(Chart::Affine, c.reference_point()).sqrt();

    let mut cycles = Vec::with_capacity(2 * g);
    for i in 1..=g {
        let k = 2 * i - 2;
        cycles.push(Cycle {
            kind: CycleKind::A,
            index: i,
            enclosed_branch_indices: enclosed(k, k + 1),
            components: vec![CycleComponent {
                y_ref: principal(&ellipses[k]),
                contour: ellipses[k].clone(),
            }],
            orientation: 1,
        });
    }
    for i in 1..=g {
        // Segments 2i, 2i+2, ..., 2g in 1-based chain numbering.
        let segs: Vec<usize> = (i..=g).map(|m| 2 * m - 1).collect();
        let mut components = Vec::with_capacity(segs.len());
        let mut y = principal(&ellipses[segs[0]]);
        components.push(CycleComponent {
            contour: ellipses[segs[0]].clone(),
            y_ref: y,
        });
        for pair in segs.windows(2) {
            let bridge = bridge_path(curve, &chain, &ellipses, side, pair[0], pair[1])?;
            y = track_polyline(curve, &bridge, y)?;
            components.push(CycleComponent {
                contour: ellipses[pair[1]].clone(),
                y_ref: y,
            });
        }
        cycles.push(Cycle {
            kind: CycleKind::B,
            index: i,
            enclosed_branch_indices: enclosed(2 * i - 1, 2 * g),
            components,
            orientation: 1,
        });
    }
    Ok(cycles)
}

fn check_chain_simple<T: Real>(chain: &[Complex<T>]) -> Result<()> {
    let n = chain.len();
    for i in 0..n - 1 {
        for j in (i + 2)..n - 1 {
            if segments_intersect(chain[i], chain[i + 1], chain[j], chain[j + 1]) {
                return Err(Error::CycleConstructionFailed(format!(
                    "branch-point chain self-intersects (segments {} and {})",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    Ok(())
}

/// Unit direction `d` such that every line parallel to `d` meets the chain
/// at most once. Exists when all segment directions lie in an open half
/// plane, which holds for any chain sorted along a total order of the plane
/// such as the lexicographic one. `d` is normal to the bisector of the
/// segment directions, so it is as transverse as possible to all of them.
fn transverse_direction<T: Real>(chain: &[Complex<T>]) -> Result<Complex<T>> {
    let base = chain[1] - chain[0];
    let (mut lo, mut hi) = (T::zero(), T::zero());
    for w in chain.windows(2) {
        let a = ((w[1] - w[0]) / base).arg();
        lo = lo.min(a);
        hi = hi.max(a);
    }
    if !(hi - lo < T::PI() * T::lit(0.999)) {
        return Err(Error::CycleConstructionFailed(
            "branch-point chain is not monotone in any direction".into(),
        ));
    }
    let mid = Complex::from_polar(T::one(), base.arg() + (lo + hi) * T::lit(0.5));
    Ok(mid * Complex::new(T::zero(), T::one()))
}

/// Confocal ellipse around chain segment `k` (0-based) that keeps every
/// other branch point outside, at `margin_factor` of the nearest one's
/// elliptic radius. The reference point is where the ray from the centre
/// along `side` leaves the ellipse.
fn chain_ellipse<T: Real>(
    chain: &[Complex<T>],
    k: usize,
    side: Complex<T>,
    cfg: &QuadratureConfig,
) -> Result<Contour<T>> {
    let (a, b) = (chain[k], chain[k + 1]);
    let center = (a + b) * T::lit(0.5);
    let h = (b - a) * T::lit(0.5);
    let nearest = chain
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != k && i != k + 1)
        .map(|(_, &e)| ((e - center) / h).acosh().re.abs())
        .fold(T::infinity(), T::min);
    let rho = (T::lit(cfg.margin_factor) * nearest).min(T::lit(ELLIPSE_RHO_CAP));
    if !(rho > T::tol(1e-6)) {
        return Err(Error::CycleConstructionFailed(format!(
            "no room for a contour around chain segment {} (elliptic gap {:.3e})",
            k + 1,
            nearest.as_f64()
        )));
    }
    // In w = (z - center)/h the ellipse is (Re w / cosh rho)^2 + (Im w / sinh rho)^2 = 1.
    let e = side / h;
    let (ch, sh) = (rho.cosh(), rho.sinh());
    let (x, y) = (e.re / ch, e.im / sh);
    Ok(Contour::Ellipse {
        center,
        half_focal: h,
        rho,
        ref_angle: y.atan2(x),
    })
}

/// Polyline from the reference point of ellipse `from` to that of ellipse
/// `to`: the chain translated by `delta * side`, entered and left along the
/// rays through the segment midpoints. Lines along `side` cross the chain
/// once, so for small `delta` the path never meets it.
fn bridge_path<T: Real>(
    curve: &CurveSpec<T>,
    chain: &[Complex<T>],
    ellipses: &[Contour<T>],
    side: Complex<T>,
    from: usize,
    to: usize,
) -> Result<Vec<Complex<T>>> {
    // Each translated segment stays at least `delta * sin(angle)` from its
    // original; clearance uses the smallest such sine.
    let sin_min = chain
        .windows(2)
        .map(|w| {
            let u = (w[1] - w[0]) / (w[1] - w[0]).norm();
            (u.conj() * side).im.abs()
        })
        .fold(T::infinity(), T::min);
    let inner = |k: usize| match &ellipses[k] {
        Contour::Ellipse { center, .. } => (ellipses[k].reference_point() - center).norm(),
        Contour::Polyline { .. } => T::zero(),
    };
    let mut delta = (from..=to).map(inner).fold(T::infinity(), T::min) * T::lit(0.5);
    delta = delta.min(curve.min_gap() * T::lit(0.25));

    for _ in 0..40 {
        let shift = side * delta;
        let mut path = vec![ellipses[from].reference_point()];
        path.push((chain[from] + chain[from + 1]) * T::lit(0.5) + shift);
        for v in &chain[from + 1..=to] {
            path.push(v + shift);
        }
        path.push((chain[to] + chain[to + 1]) * T::lit(0.5) + shift);
        path.push(ellipses[to].reference_point());
        if bridge_is_clear(chain, &path, delta * sin_min * T::lit(0.5)) {
            return Ok(path);
        }
        delta = delta * T::lit(0.5);
    }
    Err(Error::CycleConstructionFailed(format!(
        "could not route a sheet bridge between chain segments {} and {}",
        from + 1,
        to + 1
    )))
}

fn bridge_is_clear<T: Real>(chain: &[Complex<T>], path: &[Complex<T>], clearance: T) -> bool {
    path.windows(2).all(|w| {
        chain
            .windows(2)
            .all(|c| segment_segment_distance(w[0], w[1], c[0], c[1]) >= clearance)
    })
}

fn track_polyline<T: Real>(curve: &CurveSpec<T>, path: &[Complex<T>], y0: Complex<T>) -> Result<Complex<T>> {
    let mut y = y0;
    for seg in path.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        y = *track_sheet(curve, |t| a + (b - a) * t, &[T::zero(), T::one()], y)?
            .last()
            .expect("tracker returns one value per node");
    }
    Ok(y)
}

/// Result of integrating the `g` monomial differentials over one closed contour.
#[derive(Debug, Clone, PartialEq)]
pub struct LoopIntegral<T: Real> {
    /// `oint z^(j-1) dz / y` for `j = 1..g`.
    pub values: Vec<Complex<T>>,
    pub nodes: usize,
    pub history: Vec<(usize, f64)>,
    pub estimated_error: f64,
}

/// Integrates `z^(j-1) dz / y`, `j = 1..g`, over one contour with the sheet
/// fixed by `y_ref` at its reference point.
pub fn integrate_loop<T: Real>(
    curve: &CurveSpec<T>,
    contour: &Contour<T>,
    y_ref: Complex<T>,
    cfg: &QuadratureConfig,
) -> Result<LoopIntegral<T>> {
    cfg.validate()?;
    match contour {
        Contour::Ellipse {
            center,
            half_focal,
            rho,
            ref_angle,
        } => integrate_ellipse(curve, *center, *half_focal, *rho, *ref_angle, y_ref, cfg),
        Contour::Polyline { waypoints } => integrate_polyline(curve, waypoints, y_ref, cfg),
    }
}

/// Rule evaluated at one resolution: sums of `z^(j-1) z'/y w` and of their
/// absolute values.
type RuleSums<T> = (Vec<Complex<T>>, T);

fn monomial_sums<T: Real>(g: usize, zs: &[Complex<T>], dzs: &[Complex<T>], ys: &[Complex<T>], ws: &[T]) -> RuleSums<T> {
    let mut sums = vec![Complex::zero(); g];
    let mut abs = T::zero();
    for (((&z, &dz), &y), &w) in zs.iter().zip(dzs).zip(ys).zip(ws) {
        let mut term = dz / y * w;
        for s in sums.iter_mut() {
            *s = *s + term;
            abs = abs.max(term.norm());
            term = term * z;
        }
    }
    (sums, abs)
}

fn converge<T: Real>(
    cfg: &QuadratureConfig,
    start: usize,
    limit: usize,
    mut rule: impl FnMut(usize) -> Result<(Vec<Complex<T>>, T)>,
) -> Result<LoopIntegral<T>> {
    let mut n = start;
    let (mut prev, _) = rule(n)?;
    let mut history = Vec::new();
    let mut last_change = f64::INFINITY;
    while n < limit {
        n *= 2;
        let (cur, scale) = rule(n)?;
        let change = prev
            .iter()
            .zip(&cur)
            .fold(T::zero(), |m, (a, b)| m.max((*a - *b).norm()));
        let rel = (change / scale.max(T::min_positive_value())).as_f64();
        history.push((n, rel));
        last_change = rel;
        prev = cur;
        if rel <= cfg.tolerance.max(T::tol(0.0).as_f64()) {
            return Ok(LoopIntegral {
                values: prev,
                nodes: n,
                history,
                estimated_error: rel,
            });
        }
    }
    Err(Error::QuadratureNotConverged {
        nodes: n,
        change: last_change,
    })
}

fn integrate_ellipse<T: Real>(
    curve: &CurveSpec<T>,
    center: Complex<T>,
    h: Complex<T>,
    rho: T,
    t0: T,
    y_ref: Complex<T>,
    cfg: &QuadratureConfig,
) -> Result<LoopIntegral<T>> {
    let g = curve.genus();
    let tau = T::lit(2.0) * T::PI();
    let path = |t: T| Contour::ellipse_point(center, h, rho, t);
    let i_unit = Complex::new(T::zero(), T::one());
    converge(cfg, cfg.initial_nodes, cfg.max_nodes, |n| {
        let step = tau / T::lit(n as f64);
        let mut ts: Vec<T> = (0..n).map(|k| t0 + step * T::lit(k as f64)).collect();
        ts.push(t0 + tau);
        let mut ys = track_sheet(curve, path, &ts, y_ref)?;
        let closing = ys.pop().expect("closing node");
        check_closure(closing, y_ref)?;
        ts.pop();
        let zs: Vec<_> = ts.iter().map(|&t| path(t)).collect();
        let dzs: Vec<_> = ts.iter().map(|&t| h * i_unit * Complex::new(rho, t).sinh()).collect();
        let ws = vec![step; n];
        let (sums, abs) = monomial_sums(g, &zs, &dzs, &ys, &ws);
        Ok((sums, abs * T::lit(n as f64)))
    })
}

fn check_closure<T: Real>(closing: Complex<T>, y_ref: Complex<T>) -> Result<()> {
    if (closing - y_ref).norm() > T::tol(1e-6) * y_ref.norm() {
        return Err(Error::InvalidCycle(
            "contour has odd monodromy: y changes sign around it (an odd number of branch points is enclosed)".into(),
        ));
    }
    Ok(())
}

fn integrate_polyline<T: Real>(
    curve: &CurveSpec<T>,
    waypoints: &[Complex<T>],
    y_ref: Complex<T>,
    cfg: &QuadratureConfig,
) -> Result<LoopIntegral<T>> {
    let g = curve.genus();
    let n = waypoints.len();
    if n < 3 {
        return Err(Error::InvalidCycle(
            "a closed polyline needs at least three waypoints".into(),
        ));
    }
    // Split every edge so that each piece is short compared with its
    // distance to the branch points; Gauss-Legendre then converges fast.
    let mut pieces: Vec<(Complex<T>, Complex<T>)> = Vec::new();
    for i in 0..n {
        let mut stack = vec![(waypoints[i], waypoints[(i + 1) % n])];
        let mut edge = Vec::new();
        while let Some((a, b)) = stack.pop() {
            let d = curve
                .branch_points()
                .iter()
                .map(|&e| point_segment_distance(e, a, b))
                .fold(T::infinity(), T::min);
            if d == T::zero() {
                return Err(Error::InvalidCycle("polyline passes through a branch point".into()));
            }
            if (b - a).norm() > d && edge.len() + stack.len() < 100_000 {
                let m = (a + b) * T::lit(0.5);
                stack.push((m, b));
                stack.push((a, m));
            } else {
                edge.push((a, b));
            }
        }
        pieces.extend(edge);
    }
    let np = pieces.len();
    let path = |t: T| {
        let i = (t.floor().to_usize().unwrap_or(0)).min(np - 1);
        let (a, b) = pieces[i];
        a + (b - a) * (t - T::lit(i as f64))
    };
    converge(cfg, 8, 256, |order| {
        let (x, w) = gauss_legendre::<T>(order);
        let half = T::lit(0.5);
        let mut ts = vec![T::zero()];
        let mut dzs = Vec::with_capacity(np * order);
        let mut ws = Vec::with_capacity(np * order);
        for (i, &(a, b)) in pieces.iter().enumerate() {
            for (&xk, &wk) in x.iter().zip(&w) {
                ts.push(T::lit(i as f64) + (xk + T::one()) * half);
                dzs.push(b - a);
                ws.push(wk * half);
            }
        }
        ts.push(T::lit(np as f64));
        let mut ys = track_sheet(curve, path, &ts, y_ref)?;
        let closing = ys.pop().expect("closing node");
        check_closure(closing, y_ref)?;
        ys.remove(0);
        ts.pop();
        ts.remove(0);
        let zs: Vec<_> = ts.iter().map(|&t| path(t)).collect();
        let (sums, abs) = monomial_sums(g, &zs, &dzs, &ys, &ws);
        Ok((sums, abs * T::lit(ws.len() as f64)))
    })
}

/// All `g` raw periods of a cycle plus its convergence record.
pub fn integrate_cycle_all<T: Real>(
    curve: &CurveSpec<T>,
    cycle: &Cycle<T>,
    cfg: &QuadratureConfig,
) -> Result<(Vec<Complex<T>>, CycleQuadrature)> {
    let mut total = vec![Complex::<T>::zero(); curve.genus()];
    let mut record = CycleQuadrature {
        kind: cycle.kind,
        index: cycle.index,
        nodes: Vec::new(),
        history: Vec::new(),
        estimated_error: 0.0,
    };
    for comp in &cycle.components {
        let r = integrate_loop(curve, &comp.contour, comp.y_ref, cfg)?;
        for (t, v) in total.iter_mut().zip(&r.values) {
            *t = *t + *v;
        }
        record.nodes.push(r.nodes);
        record.history.push(r.history);
        record.estimated_error = record.estimated_error.max(r.estimated_error);
    }
    let sign = T::lit(f64::from(cycle.orientation));
    Ok((total.into_iter().map(|v| v * sign).collect(), record))
}

/// `oint_cycle z^(j-1) dz / y` for one `j` in `1..=g`.
pub fn integrate_cycle<T: Real>(
    curve: &CurveSpec<T>,
    cycle: &Cycle<T>,
    j: usize,
    cfg: &QuadratureConfig,
) -> Result<Complex<T>> {
    let g = curve.genus();
    if j == 0 || j > g {
        return Err(Error::IndexOutOfRange { index: j, max: g });
    }
    Ok(integrate_cycle_all(curve, cycle, cfg)?.0[j - 1])
}

/// Builds, integrates, normalizes and certifies the default cycle basis.
pub fn period_matrix<T: Real>(curve: &CurveSpec<T>, cfg: &QuadratureConfig) -> Result<PeriodData<T>> {
    let cycles = build_cycle_basis(curve, cfg)?;
    period_matrix_from_cycles(curve, cycles, cfg)
}

/// Same as [`period_matrix`] with a caller-supplied basis.
pub fn period_matrix_from_cycles<T: Real>(
    curve: &CurveSpec<T>,
    cycles: Vec<Cycle<T>>,
    cfg: &QuadratureConfig,
) -> Result<PeriodData<T>> {
    cfg.validate()?;
    let g = curve.genus();
    check_basis_shape(&cycles, g)?;
    let results: Vec<_> = cycles
        .par_iter()
        .map(|c| integrate_cycle_all(curve, c, cfg))
        .collect::<Result<_>>()?;
    let mut pi_a = CMat::zeros(g, g);
    let mut pi_b = CMat::zeros(g, g);
    let mut report = QuadratureReport::default();
    for (cycle, (values, rec)) in cycles.iter().zip(results) {
        let target = match cycle.kind {
            CycleKind::A => &mut pi_a,
            CycleKind::B => &mut pi_b,
        };
        for (j, v) in values.into_iter().enumerate() {
            target[(cycle.index - 1, j)] = v;
        }
        report.cycles.push(rec);
    }
    let data = normalize(curve.clone(), cycles, pi_a, pi_b, report, *cfg)?;
    let data = symplectic_sign_fix(data)?;
    let check = validate_riemann(&data, cfg.symmetry_tolerance);
    if !check.passed {
        return Err(Error::NormalizationFailed(check.summary()));
    }
    Ok(data)
}

fn check_basis_shape<T: Real>(cycles: &[Cycle<T>], g: usize) -> Result<()> {
    for kind in [CycleKind::A, CycleKind::B] {
        let mut seen = vec![false; g];
        for c in cycles.iter().filter(|c| c.kind == kind) {
            if c.index == 0 || c.index > g || seen[c.index - 1] {
                return Err(Error::InvalidCycle(format!(
                    "{kind:?}-cycle index {} is out of range or repeated (genus {g})",
                    c.index
                )));
            }
            seen[c.index - 1] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::InvalidCycle(format!("need {g} {kind:?}-cycles indexed 1..={g}")));
        }
    }
    if cycles.len() != 2 * g {
        return Err(Error::InvalidCycle(format!(
            "need exactly {} cycles, got {}",
            2 * g,
            cycles.len()
        )));
    }
    Ok(())
}

/// Computes `P`, `Z` and `(Im Z)^-1` from raw periods without sign fixing.
pub fn normalize<T: Real>(
    curve: CurveSpec<T>,
    cycles: Vec<Cycle<T>>,
    pi_a: CMat<T>,
    pi_b: CMat<T>,
    quadrature_report: QuadratureReport,
    config: QuadratureConfig,
) -> Result<PeriodData<T>> {
    let g = curve.genus();
    let inv = pi_a.inverse();
    let condition = inv
        .as_ref()
        .map_or(f64::INFINITY, |m| (pi_a.norm1() * m.norm1()).as_f64());
    let inv = match inv {
        Some(m) if condition.is_finite() && condition <= config.condition_limit => m,
        _ => return Err(Error::SingularAPeriodBlock { condition }),
    };
    let z = &pi_b * &inv;
    let im = symmetric_part(&z.im());
    // Positivity is decided by the sign fix; an indefinite Im Z gets a
    // placeholder inverse until then.
    let im_z_inv = im.spd_inverse().unwrap_or_else(|| RMat::identity(g));
    Ok(PeriodData {
        curve,
        cycles,
        p: inv.transpose(),
        z,
        im_z_inv,
        pi_a,
        pi_b,
        sign_pattern: vec![1; g],
        quadrature_report,
        config,
    })
}

fn symmetric_part<T: Real>(m: &RMat<T>) -> RMat<T> {
    let n = m.rows();
    RMat::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)]) * T::lit(0.5))
}

fn asymmetry<T: Real>(z: &CMat<T>) -> T {
    let zt = z.transpose();
    (z - &zt).max_abs()
}

/// Flips B-cycle orientations so that `Z` is symmetric with positive
/// definite imaginary part. Exactly one of the `2^g` patterns qualifies for
/// a symplectic basis; it is applied and recorded in `sign_pattern`.
pub fn symplectic_sign_fix<T: Real>(data: PeriodData<T>) -> Result<PeriodData<T>> {
    let g = data.curve.genus();
    if g > 8 {
        return Err(Error::InvalidConfig(format!(
            "sign search supports genus <= 8, got {g}"
        )));
    }
    let inv = data.pi_a.inverse().ok_or(Error::SingularAPeriodBlock {
        condition: f64::INFINITY,
    })?;
    let tol = T::tol(data.config.symmetry_tolerance);
    let mut best_sym = T::infinity();
    let mut passing = Vec::new();
    for mask in 0u32..(1 << g) {
        let signs: Vec<i8> = (0..g).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
        let pi_b = CMat::from_fn(g, g, |i, j| data.pi_b[(i, j)] * T::lit(f64::from(signs[i])));
        let z = &pi_b * &inv;
        let sym = asymmetry(&z) / z.max_abs().max(T::one());
        best_sym = best_sym.min(sym);
        if sym <= tol && symmetric_part(&z.im()).cholesky().is_some() {
            passing.push((sym, signs, pi_b, z));
        }
    }
    passing.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
    let Some((_, signs, pi_b, z)) = passing.into_iter().next() else {
        return Err(Error::NoValidSignPattern {
            best_symmetry: best_sym.as_f64(),
        });
    };
    let im = symmetric_part(&z.im());
    let im_z_inv = im.spd_inverse().ok_or_else(|| Error::NotPositiveDefinite {
        min_eigenvalue: im.symmetric_eigenvalues()[0].as_f64(),
    })?;
    let mut cycles = data.cycles;
    for c in cycles.iter_mut().filter(|c| c.kind == CycleKind::B) {
        c.orientation *= signs[c.index - 1];
    }
    let sign_pattern = signs.iter().zip(&data.sign_pattern).map(|(a, b)| a * b).collect();
    Ok(PeriodData {
        cycles,
        pi_b,
        z,
        im_z_inv,
        sign_pattern,
        ..data
    })
}

/// Residuals of the Riemann relations and normalization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationReport {
    pub symmetry: f64,
    pub min_eig_im_z: f64,
    pub normalization: f64,
    pub inverse: f64,
    pub tol: f64,
    pub symmetry_ok: bool,
    pub positivity_ok: bool,
    pub normalization_ok: bool,
    pub inverse_ok: bool,
    pub passed: bool,
}

impl ValidationReport {
    pub fn summary(&self) -> String {
        format!(
            "symmetry {:.3e} ({}), min eig Im Z {:.3e} ({}), normalization {:.3e} ({}), inverse {:.3e} ({})",
            self.symmetry,
            ok(self.symmetry_ok),
            self.min_eig_im_z,
            ok(self.positivity_ok),
            self.normalization,
            ok(self.normalization_ok),
            self.inverse,
            ok(self.inverse_ok)
        )
    }
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAIL"
    }
}

/// Checks `Z = Z^t`, `Im Z > 0`, `Pi_A P^t = I` and `(Im Z)^-1 Im Z = I`.
pub fn validate_riemann<T: Real>(data: &PeriodData<T>, tol: f64) -> ValidationReport {
    let g = data.curve.genus();
    let symmetry = asymmetry(&data.z).as_f64();
    let im = symmetric_part(&data.z.im());
    let min_eig = im.symmetric_eigenvalues().first().copied().unwrap_or(T::nan()).as_f64();
    let normalization = (&(&data.pi_a * &data.p.transpose()) - &CMat::identity(g))
        .max_abs()
        .as_f64();
    let inverse = (&(&data.im_z_inv * &im) - &RMat::identity(g)).max_entry().as_f64();
    let tol_eff = tol.max(T::tol(0.0).as_f64());
    let scale = data.z.max_abs().as_f64().max(1.0);
    let symmetry_ok = symmetry <= tol_eff * scale;
    let positivity_ok = min_eig > 0.0;
    // Normalization and inverse residuals scale with the conditioning of
    // the blocks involved; allow that factor on top of the tolerance.
    let cond_a = data.pi_a.norm1().as_f64() * data.p.norm1().as_f64();
    let normalization_ok = normalization <= tol_eff * cond_a.max(1.0);
    let cond_im = im.max_entry().as_f64() * data.im_z_inv.max_entry().as_f64() * g as f64;
    let inverse_ok = inverse <= tol_eff * cond_im.max(1.0);
    ValidationReport {
        symmetry,
        min_eig_im_z: min_eig,
        normalization,
        inverse,
        tol,
        symmetry_ok,
        positivity_ok,
        normalization_ok,
        inverse_ok,
        passed: symmetry_ok && positivity_ok && normalization_ok && inverse_ok,
    }
}

/// A user-supplied closed polyline cycle.
#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
pub struct ManualCycleSpec {
    pub kind: CycleKind,
    pub index: usize,
    pub waypoints: Vec<[f64; 2]>,
}

/// Turns manual polylines into cycles. Each must keep clear of the branch
/// points, wind at most once around each, and enclose an even number.
pub fn manual_cycles<T: Real>(curve: &CurveSpec<T>, specs: &[ManualCycleSpec]) -> Result<Vec<Cycle<T>>> {
    let margin = curve.min_gap() * T::lit(1e-3);
    let mut cycles = Vec::with_capacity(specs.len());
    for spec in specs {
        let waypoints: Vec<Complex<T>> = spec.waypoints.iter().map(|&p| crate::scalar::from_pair(p)).collect();
        let label = format!("{:?}{}", spec.kind, spec.index);
        if waypoints.len() < 3 {
            return Err(Error::InvalidCycle(format!("{label}: needs at least three waypoints")));
        }
        if waypoints.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidCycle(format!("{label}: non-finite waypoint")));
        }
        let contour = Contour::Polyline { waypoints };
        let mut enclosed = Vec::new();
        for (i, &a) in curve.branch_points().iter().enumerate() {
            if contour.distance_to(a) < margin {
                return Err(Error::InvalidCycle(format!(
                    "{label}: passes within {:.3e} of branch point {}",
                    contour.distance_to(a).as_f64(),
                    i + 1
                )));
            }
            match contour.winding(a) {
                Some(0) => {}
                Some(1) | Some(-1) => enclosed.push(i + 1),
                w => {
                    return Err(Error::InvalidCycle(format!(
                        "{label}: winding number {w:?} about branch point {}",
                        i + 1
                    )))
                }
            }
        }
        if enclosed.len() % 2 == 1 || enclosed.is_empty() {
            return Err(Error::InvalidCycle(format!(
                "{label}: encloses {} branch points; a cycle needs a nonzero even number",
                enclosed.len()
            )));
        }
        let y_ref = curve.chart_f(Chart::Affine, contour.reference_point()).sqrt();
        cycles.push(Cycle {
            kind: spec.kind,
            index: spec.index,
            enclosed_branch_indices: enclosed,
            components: vec![CycleComponent { contour, y_ref }],
            orientation: 1,
        });
    }
    check_basis_shape(&cycles, curve.genus())?;
    Ok(cycles)
}

impl<T: Real> PeriodData<T> {
    pub fn genus(&self) -> usize {
        self.curve.genus()
    }

    /// Normalized differential coefficients `(1, z, ..., z^(g-1)) P^t / y`.
    pub fn normalized_differentials(&self, z: Complex<T>, y: Complex<T>) -> Vec<Complex<T>> {
        let g = self.genus();
        let mut powers = vec![Complex::<T>::one(); g];
        for k in 1..g {
            powers[k] = powers[k - 1] * z;
        }
        (0..g)
            .map(|j| (0..g).fold(Complex::<T>::zero(), |acc, l| acc + powers[l] * self.p[(j, l)]) / y)
            .collect()
    }

    /// `B = P^t (Im Z)^-1 conj(P)`, before symmetrization.
    pub fn b_matrix(&self) -> CMat<T> {
        let a = CMat::from_real(&self.im_z_inv);
        &(&self.p.transpose() * &a) * &self.p.conj()
    }
}
