//! Complex polynomials stored as ascending coefficient vectors.

use num_complex::Complex;
use num_traits::Zero;

use crate::scalar::{cr, Real};

/// Expands `prod (z - r_i)` into ascending coefficients (leading coefficient 1).
pub fn expand_roots<T: Real>(roots: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut coeffs = vec![Complex::new(T::one(), T::zero())];
    for &r in roots {
        let mut next = vec![Complex::zero(); coeffs.len() + 1];
        for (k, &c) in coeffs.iter().enumerate() {
            next[k + 1] = next[k + 1] + c;
            next[k] = next[k] - c * r;
        }
        coeffs = next;
    }
    coeffs
}

pub fn derivative<T: Real>(coeffs: &[Complex<T>]) -> Vec<Complex<T>> {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, &c)| c * T::lit(k as f64))
        .collect()
}

pub fn horner<T: Real>(coeffs: &[Complex<T>], z: Complex<T>) -> Complex<T> {
    coeffs.iter().rev().fold(Complex::zero(), |acc, &c| acc * z + c)
}

/// Value of the `order`-th derivative at `z`.
pub fn eval_derivative<T: Real>(coeffs: &[Complex<T>], z: Complex<T>, order: usize) -> Complex<T> {
    let mut d = coeffs.to_vec();
    for _ in 0..order {
        d = derivative(&d);
    }
    horner(&d, z)
}

/// `sum |c_k| |z|^k`, the natural scale of a Horner evaluation at `z`.
pub fn magnitude_bound<T: Real>(coeffs: &[Complex<T>], z: Complex<T>) -> T {
    let r = z.norm();
    coeffs.iter().rev().fold(T::zero(), |acc, c| acc * r + c.norm())
}

/// Roots with multiplicity. Rounding scatters an `m`-fold root into a
/// cluster of radius about `eps^(1/m)`; clusters whose centroid makes the
/// first `m - 1` derivatives vanish, relative to their magnitude bounds on
/// the disc holding all roots, are merged into that centroid.
pub fn distinct_roots<T: Real>(coeffs: &[Complex<T>]) -> Vec<(Complex<T>, usize)> {
    let raw = roots(coeffs);
    let scale = raw.iter().map(|z| z.norm()).fold(T::one(), T::max);
    let radius = scale * T::lit(1e-2);
    let tol = T::tol(1e-12);
    let disc = Complex::new(scale, T::zero());
    let mut used = vec![false; raw.len()];
    let mut out = Vec::new();
    for i in 0..raw.len() {
        if used[i] {
            continue;
        }
        let group: Vec<usize> = (i..raw.len())
            .filter(|&j| !used[j] && (raw[j] - raw[i]).norm() <= radius)
            .collect();
        let m = group.len();
        let centroid = group
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |a, &j| a + raw[j])
            / T::lit(m as f64);
        let mut d = coeffs.to_vec();
        let mut multiple = m > 1;
        for _ in 0..m {
            if !multiple {
                break;
            }
            multiple = horner(&d, centroid).norm() <= tol * magnitude_bound(&d, disc);
            d = derivative(&d);
        }
        if multiple {
            group.iter().for_each(|&j| used[j] = true);
            out.push((centroid, m));
        } else {
            used[i] = true;
            out.push((raw[i], 1));
        }
    }
    out
}

/// All roots of a polynomial by Aberth-Ehrlich iteration, polished with Newton.
pub fn roots<T: Real>(coeffs: &[Complex<T>]) -> Vec<Complex<T>> {
    let mut coeffs = coeffs.to_vec();
    while coeffs.len() > 1 && coeffs.last().is_some_and(|c| c.is_zero()) {
        coeffs.pop();
    }
    let n = coeffs.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = *coeffs.last().unwrap();
    let monic: Vec<_> = coeffs.iter().map(|&c| c / lead).collect();
    let dmonic = derivative(&monic);

    // Cauchy bound for the initial circle.
    let radius = T::one() + monic[..n].iter().fold(T::zero(), |m, c| m.max(c.norm()));
    let mut z: Vec<Complex<T>> = (0..n)
        .map(|k| {
            let angle = T::lit(2.0 * std::f64::consts::PI * (k as f64) / (n as f64) + 0.4);
            Complex::from_polar(radius * T::lit(0.5), angle)
        })
        .collect();

    for _ in 0..500 {
        let mut max_step = T::zero();
        for i in 0..n {
            let p = horner(&monic, z[i]);
            if p.is_zero() {
                continue;
            }
            let dp = horner(&dmonic, z[i]);
            let ratio = p / dp;
            let repulsion: Complex<T> = (0..n)
                .filter(|&j| j != i)
                .map(|j| (z[i] - z[j]).inv())
                .fold(Complex::zero(), |a, b| a + b);
            let step = ratio / (cr(T::one()) - ratio * repulsion);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] = z[i] - step;
                max_step = max_step.max(step.norm() / (T::one() + z[i].norm()));
            }
        }
        if max_step < T::epsilon() * T::lit(4.0) {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let dp = horner(&dmonic, *zi);
            if dp.is_zero() {
                break;
            }
            let step = horner(&monic, *zi) / dp;
            if step.re.is_finite() && step.im.is_finite() {
                *zi = *zi - step;
            }
        }
    }
    z
}
