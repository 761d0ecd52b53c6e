//! Reproducible test curves.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::curve::{parse_curve, CurveSpec};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// `n` points uniform in the unit disc, pairwise at least `min_gap` apart,
/// from a ChaCha stream seeded with `seed`.
pub fn random_branch_points(seed: u64, n: usize, min_gap: f64) -> Result<Vec<Complex<f64>>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<Complex<f64>> = Vec::with_capacity(n);
    let mut attempts = 0usize;
    while points.len() < n {
        attempts += 1;
        if attempts > 100_000 {
            return Err(Error::InvalidConfig(format!(
                "could not place {n} points in the unit disc with gap {min_gap}"
            )));
        }
        let z = Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if z.norm() < 1.0 && points.iter().all(|p| (p - z).norm() >= min_gap) {
            points.push(z);
        }
    }
    Ok(points)
}

/// Random curve of genus `g` with branch points in the unit disc, min gap 0.1.
pub fn random_curve<T: Real>(seed: u64, genus: usize) -> Result<CurveSpec<T>> {
    let pts = random_branch_points(seed, 2 * genus + 2, 0.1)?;
    let conv: Vec<Complex<T>> = pts.iter().map(|z| Complex::new(T::lit(z.re), T::lit(z.im))).collect();
    Ok(parse_curve(&conv)?.with_label(format!("random genus {genus}, seed {seed}")))
}

/// The `n`-th roots of unity.
pub fn roots_of_unity(n: usize) -> Vec<Complex<f64>> {
    (0..n)
        .map(|k| Complex::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect()
}

/// `y^2 = z^(2g+2) - 1`.
pub fn fermat_curve<T: Real>(genus: usize) -> Result<CurveSpec<T>> {
    let conv: Vec<Complex<T>> = roots_of_unity(2 * genus + 2)
        .iter()
        .map(|z| Complex::new(T::lit(z.re), T::lit(z.im)))
        .collect();
    Ok(parse_curve(&conv)?.with_label(format!("z^{} - 1", 2 * genus + 2)))
}
