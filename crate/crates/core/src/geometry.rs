//! Planar helpers: distances, segment intersection, winding numbers.

use num_complex::Complex;

use crate::scalar::Real;

pub fn point_segment_distance<T: Real>(p: Complex<T>, a: Complex<T>, b: Complex<T>) -> T {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == T::zero() {
        return (p - a).norm();
    }
    let t = ((p - a) * ab.conj()).re / len2;
    let t = t.max(T::zero()).min(T::one());
    (p - (a + ab * t)).norm()
}

fn cross<T: Real>(u: Complex<T>, v: Complex<T>) -> T {
    u.re * v.im - u.im * v.re
}

/// True when the closed segments `[a, b]` and `[c, d]` share a point.
pub fn segments_intersect<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> bool {
    let d1 = cross(b - a, c - a);
    let d2 = cross(b - a, d - a);
    let d3 = cross(d - c, a - c);
    let d4 = cross(d - c, b - c);
    let z = T::zero();
    if ((d1 > z && d2 < z) || (d1 < z && d2 > z)) && ((d3 > z && d4 < z) || (d3 < z && d4 > z)) {
        return true;
    }
    let on = |p: Complex<T>, q: Complex<T>, r: Complex<T>, dd: T| {
        dd == z && r.re >= p.re.min(q.re) && r.re <= p.re.max(q.re) && r.im >= p.im.min(q.im) && r.im <= p.im.max(q.im)
    };
    on(a, b, c, d1) || on(a, b, d, d2) || on(c, d, a, d3) || on(c, d, b, d4)
}

pub fn segment_segment_distance<T: Real>(a: Complex<T>, b: Complex<T>, c: Complex<T>, d: Complex<T>) -> T {
    if segments_intersect(a, b, c, d) {
        return T::zero();
    }
    point_segment_distance(a, c, d)
        .min(point_segment_distance(b, c, d))
        .min(point_segment_distance(c, a, b))
        .min(point_segment_distance(d, a, b))
}

/// Winding number of the closed parametrized curve `path` on `[t0, t1]`
/// around `p`. Sampling is refined so that each step subtends a small angle.
/// Returns `None` if the curve passes through `p`.
pub fn winding_number<T: Real>(path: impl Fn(T) -> Complex<T>, t0: T, t1: T, p: Complex<T>) -> Option<i32> {
    let span = t1 - t0;
    let mut t = t0;
    let mut z = path(t0) - p;
    let mut dt = span / T::lit(64.0);
    let min_dt = span * T::epsilon() * T::lit(16.0);
    let mut total = T::zero();
    while t < t1 {
        let r = z.norm();
        if r == T::zero() {
            return None;
        }
        dt = dt.min(t1 - t);
        loop {
            let tn = if dt >= t1 - t { t1 } else { t + dt };
            let zn = path(tn) - p;
            if (zn - z).norm() <= r * T::lit(0.25) {
                total = total + (zn / z).arg();
                t = tn;
                z = zn;
                dt = dt * T::lit(2.0);
                break;
            }
            dt = dt * T::lit(0.5);
            if dt < min_dt {
                return None;
            }
        }
    }
    let turns = total / (T::lit(2.0) * T::PI());
    turns.round().to_i32()
}

/// Winding number of a closed polyline (first point repeated implicitly).
pub fn polyline_winding<T: Real>(points: &[Complex<T>], p: Complex<T>) -> Option<i32> {
    let n = points.len();
    if n < 2 {
        return Some(0);
    }
    let path = |t: T| {
        let tf = t.as_f64();
        let i = (tf.floor() as usize).min(n - 1);
        let frac = t - T::lit(i as f64);
        let a = points[i];
        let b = points[(i + 1) % n];
        a + (b - a) * frac
    };
    winding_number(path, T::zero(), T::lit(n as f64), p)
}
