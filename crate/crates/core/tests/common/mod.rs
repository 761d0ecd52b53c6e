//! Reference computations for the integration tests. Everything here is
//! deliberately naive and shares no numerical code with the library:
//! endpoint-singular segment quadrature instead of contour trapezoids,
//! uniform nearest-root continuation instead of adaptive sheet tracking,
//! plain central differences instead of analytic jets.

#![allow(dead_code)]

use std::f64::consts::PI;

use num_complex::Complex64 as C;
use theta_morse::metric::ThetaMetric;
use theta_morse::periods::{period_matrix, PeriodData, QuadratureConfig};
use theta_morse::samples::{fermat_curve, random_curve};
use theta_morse::{build_metric, Chart, ChartPoint, CurveSpec};

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn points(raw: &[(f64, f64)]) -> Vec<C> {
    raw.iter().map(|&(a, b)| c(a, b)).collect()
}

pub fn z6() -> CurveSpec {
    fermat_curve(2).unwrap()
}

pub fn random_genus2(seed: u64) -> CurveSpec {
    random_curve(seed, 2).unwrap()
}

pub fn random_genus3(seed: u64) -> CurveSpec {
    random_curve(seed, 3).unwrap()
}

pub fn pipeline(curve: &CurveSpec) -> (PeriodData<f64>, ThetaMetric<f64>) {
    let data = period_matrix(curve, &QuadratureConfig::default()).unwrap();
    let metric = build_metric(&data).unwrap();
    (data, metric)
}

/// `f(z) = prod (z - a_i)` evaluated from the roots, not the coefficients.
pub fn f_from_roots(roots: &[C], z: C) -> C {
    roots.iter().fold(c(1.0, 0.0), |p, &a| p * (z - a))
}

/// Uniform-step continuation of `sqrt(f)` along a polyline, always taking
/// the root nearer the previous value.
pub fn dense_continuation(f: impl Fn(C) -> C, waypoints: &[C], y0: C, steps_per_segment: usize) -> C {
    let mut y = y0;
    for w in waypoints.windows(2) {
        for s in 1..=steps_per_segment {
            let z = w[0] + (w[1] - w[0]) * (s as f64 / steps_per_segment as f64);
            let r = f(z).sqrt();
            y = if (r - y).norm() <= (r + y).norm() { r } else { -r };
        }
    }
    y
}

/// `int_{a_p}^{a_q} z^j dz / y` for `j = 0..g-1` along the straight segment,
/// by `n`-point Gauss–Chebyshev quadrature. The square-root singularities at
/// both ends are absorbed by the Chebyshev weight; the remaining factor
/// `sqrt(prod_{i != p,q} (z - a_i))` is continued along the segment by dense
/// nearest-root stepping. The overall sign is arbitrary (sheet choice).
pub fn segment_periods(roots: &[C], p: usize, q: usize, g: usize, n: usize) -> Vec<C> {
    let (a, b) = (roots[p], roots[q]);
    let (m, h) = ((a + b) * 0.5, (b - a) * 0.5);
    let rest: Vec<C> = roots
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != p && i != q)
        .map(|(_, &r)| r)
        .collect();
    let r = |z: C| f_from_roots(&rest, z);
    // Chebyshev nodes in increasing x, continued from x = -1.
    let xs: Vec<f64> = (1..=n)
        .rev()
        .map(|k| ((2 * k - 1) as f64 * PI / (2 * n) as f64).cos())
        .collect();
    let mut sqrt_r = r(a).sqrt();
    let mut prev = -1.0;
    let mut sums = vec![c(0.0, 0.0); g];
    for &x in &xs {
        sqrt_r = dense_continuation(r, &[m + h * prev, m + h * x], sqrt_r, 64);
        prev = x;
        let z = m + h * x;
        let mut zj = c(1.0, 0.0);
        for s in sums.iter_mut() {
            *s += zj / sqrt_r;
            zj *= z;
        }
    }
    // (z - a)(z - b) = -h^2 (1 - x^2), so dz / y = dx / (i sqrt(1 - x^2) sqrt(R)).
    sums.into_iter().map(|s| s * (PI / n as f64) / c(0.0, 1.0)).collect()
}

/// Loop integral around the cut `[a_p, a_q]`: twice the segment integral.
pub fn cut_periods(roots: &[C], p: usize, q: usize, g: usize) -> Vec<C> {
    segment_periods(roots, p, q, g, 400)
        .into_iter()
        .map(|v| v * 2.0)
        .collect()
}

/// Largest entrywise deviation between `ours` and `sign * oracle`,
/// minimized over the sign, relative to the oracle's size.
pub fn match_up_to_sign(ours: &[C], oracle: &[C]) -> f64 {
    let scale = oracle.iter().map(|v| v.norm()).fold(0.0, f64::max);
    [1.0, -1.0]
        .iter()
        .map(|&s| {
            ours.iter()
                .zip(oracle)
                .map(|(a, b)| (a - b * s).norm())
                .fold(0.0, f64::max)
                / scale
        })
        .fold(f64::INFINITY, f64::min)
}

/// Maps `tau` in the upper half plane to the standard fundamental domain
/// `|Re tau| <= 1/2`, `|tau| >= 1`.
pub fn reduce_tau(mut tau: C) -> C {
    for _ in 0..1000 {
        tau.re -= tau.re.round();
        if tau.norm_sqr() < 1.0 - 1e-15 {
            tau = -tau.inv();
        } else {
            break;
        }
    }
    tau
}

/// Deterministic scattered points in `|z| <= radius` keeping `clearance`
/// from every listed branch point (Halton sequence in polar form).
pub fn scattered_points(branch: &[C], n: usize, radius: f64, clearance: f64) -> Vec<C> {
    fn halton(mut i: usize, base: usize) -> f64 {
        let (mut f, mut r) = (1.0, 0.0);
        while i > 0 {
            f /= base as f64;
            r += f * (i % base) as f64;
            i /= base;
        }
        r
    }
    let mut out = Vec::with_capacity(n);
    let mut i = 1;
    while out.len() < n {
        let z = C::from_polar(radius * halton(i, 2).sqrt(), 2.0 * PI * halton(i, 3));
        i += 1;
        if branch.iter().all(|&a| (z - a).norm() >= clearance) {
            out.push(z);
        }
    }
    out
}

/// Central-difference Wirtinger derivatives `(K_z, K_zz, K_zzbar)` of a
/// real function of one complex variable. First derivatives use step `h1`,
/// second derivatives step `h2`.
pub fn fd_wirtinger(k: impl Fn(C) -> f64, u: C, h1: f64, h2: f64) -> (C, C, f64) {
    let kx = (k(u + c(h1, 0.0)) - k(u - c(h1, 0.0))) / (2.0 * h1);
    let ky = (k(u + c(0.0, h1)) - k(u - c(0.0, h1))) / (2.0 * h1);
    let [[kxx, kxy], [_, kyy]] = fd_hessian(&k, u, h2);
    let k_z = c(kx, -ky) * 0.5;
    let k_zz = c(kxx - kyy, -2.0 * kxy) * 0.25;
    let k_zzbar = (kxx + kyy) * 0.25;
    (k_z, k_zz, k_zzbar)
}

/// Central-difference real Hessian.
pub fn fd_hessian(k: impl Fn(C) -> f64, u: C, h: f64) -> [[f64; 2]; 2] {
    let k0 = k(u);
    let kxx = (k(u + c(h, 0.0)) - 2.0 * k0 + k(u - c(h, 0.0))) / (h * h);
    let kyy = (k(u + c(0.0, h)) - 2.0 * k0 + k(u - c(0.0, h))) / (h * h);
    let kxy = (k(u + c(h, h)) - k(u + c(h, -h)) - k(u + c(-h, h)) + k(u + c(-h, -h))) / (4.0 * h * h);
    [[kxx, kxy], [kxy, kyy]]
}

pub fn affine_k(metric: &ThetaMetric<f64>) -> impl Fn(C) -> f64 + '_ {
    move |z| metric.curvature(ChartPoint::affine(z))
}

pub fn chart_k(metric: &ThetaMetric<f64>, chart: Chart) -> impl Fn(C) -> f64 + '_ {
    move |u| metric.curvature(ChartPoint::new(chart, u))
}

/// `int K dA` over the curve by a change of variables `|z| = t / (1 - t)`
/// in the affine chart alone, with the midpoint rule in `t` and the
/// trapezoid rule in the angle. Only the product `K rho^2` enters,
/// which stays bounded at branch points.
pub fn area_integral_affine(metric: &ThetaMetric<f64>, nt: usize, nth: usize) -> f64 {
    let mut total = 0.0;
    for i in 0..nt {
        let t = (i as f64 + 0.5) / nt as f64;
        let r = t / (1.0 - t);
        let drdt = 1.0 / ((1.0 - t) * (1.0 - t));
        let mut ring = 0.0;
        for j in 0..nth {
            let z = C::from_polar(r, 2.0 * PI * (j as f64 + 0.5) / nth as f64);
            let p = ChartPoint::affine(z);
            let rho2 = metric.rho2(p);
            if rho2.is_finite() {
                ring += metric.curvature(p) * rho2;
            }
        }
        total += ring * (2.0 * PI / nth as f64) * r * drdt / nt as f64;
    }
    2.0 * total
}
