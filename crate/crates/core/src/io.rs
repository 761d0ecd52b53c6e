//! File formats: curve and cycle specifications in, reports out.
//!
//! JSON and CSV reports carry floats with 17 significant digits so that
//! every `f64` round-trips; text tables use 6.

use std::path::Path;

use num_complex::Complex;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::value::RawValue;

use crate::curve::{parse_curve, CurveSpec};
use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::morse::{GaussBonnet, MorseCensus, MorseIndex, Provenance};
use crate::periods::{CycleKind, ManualCycleSpec, PeriodData, ValidationReport};
use crate::scalar::Real;

/// Scientific notation with 17 significant digits, enough to round-trip an
/// `f64`. Negative zero prints as zero.
pub fn fmt17(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

/// Six significant digits: fixed notation for moderate magnitudes,
/// scientific otherwise.
pub fn fmt6(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    // The exponent after rounding, so 0.9999999 counts as magnitude 0.
    let sci = format!("{x:.5e}");
    let mag: i32 = sci[sci.find('e').unwrap() + 1..].parse().unwrap();
    if (-4..6).contains(&mag) {
        let decimals = (5 - mag) as usize;
        format!("{x:.decimals$}")
    } else {
        sci
    }
}

/// `a+bi` with six significant digits per part.
pub fn fmt6_complex(z: Complex<f64>) -> String {
    let sign = if z.im.is_sign_negative() && z.im != 0.0 {
        '-'
    } else {
        '+'
    };
    format!("{}{}{}i", fmt6(z.re), sign, fmt6(z.im.abs()))
}

/// An `f64` serialized as a JSON number with 17 significant digits.
/// Non-finite values, which JSON cannot represent, become strings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F17(pub f64);

impl Serialize for F17 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_str(&format!("{}", self.0));
        }
        let raw = RawValue::from_string(fmt17(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

fn pair(z: Complex<f64>) -> [F17; 2] {
    [F17(z.re), F17(z.im)]
}

fn cmatrix<T: Real>(m: &CMat<T>) -> Vec<Vec<[F17; 2]>> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| {
                    let z = m[(i, j)];
                    pair(Complex::new(z.re.as_f64(), z.im.as_f64()))
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Deserialize)]
struct CurveFile {
    branch_points: Vec<[f64; 2]>,
    #[serde(default)]
    label: Option<String>,
}

/// Parses `{"branch_points": [[re, im], ...], "label"?: "..."}`.
pub fn parse_curve_json(text: &str) -> Result<CurveSpec<f64>> {
    let file: CurveFile = serde_json::from_str(text).map_err(|e| Error::Format(format!("curve file: {e}")))?;
    let points: Vec<Complex<f64>> = file.branch_points.iter().map(|p| Complex::new(p[0], p[1])).collect();
    let curve = parse_curve(&points)?;
    Ok(match file.label {
        Some(l) => curve.with_label(l),
        None => curve,
    })
}

pub fn read_curve_file(path: &Path) -> Result<CurveSpec<f64>> {
    parse_curve_json(&read(path)?)
}

#[derive(Debug, Deserialize)]
struct CyclesFile {
    cycles: Vec<ManualCycleSpec>,
}

/// Parses `{"cycles": [{"kind": "A"|"B", "index": n, "waypoints": [...]}]}`.
pub fn parse_cycles_json(text: &str) -> Result<Vec<ManualCycleSpec>> {
    let file: CyclesFile = serde_json::from_str(text).map_err(|e| Error::Format(format!("cycles file: {e}")))?;
    Ok(file.cycles)
}

pub fn read_cycles_file(path: &Path) -> Result<Vec<ManualCycleSpec>> {
    parse_cycles_json(&read(path)?)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Format(format!("cannot read {}: {e}", path.display())))
}

#[derive(Debug, Serialize)]
struct CycleSummary {
    kind: CycleKind,
    index: usize,
    enclosed_branch_points: Vec<usize>,
    orientation: i8,
    nodes: usize,
    estimated_error: F17,
}

#[derive(Debug, Serialize)]
struct ValidationSummary {
    symmetry: F17,
    min_eig_im_z: F17,
    normalization: F17,
    inverse: F17,
    tolerance: F17,
    passed: bool,
}

#[derive(Debug, Serialize)]
struct PeriodsReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    genus: usize,
    branch_points: Vec<[F17; 2]>,
    pi_a: Vec<Vec<[F17; 2]>>,
    pi_b: Vec<Vec<[F17; 2]>>,
    z: Vec<Vec<[F17; 2]>>,
    im_z_eigenvalues: Vec<F17>,
    b_matrix: Vec<Vec<[F17; 2]>>,
    sign_pattern: Vec<i8>,
    cycles: Vec<CycleSummary>,
    validation: ValidationSummary,
}

/// JSON summary of period data, the (Hermitian) B-matrix and the
/// validation report.
pub fn periods_json<T: Real>(data: &PeriodData<T>, b: &CMat<T>, validation: &ValidationReport) -> String {
    let curve = &data.curve;
    let cycles = data
        .cycles
        .iter()
        .map(|c| {
            let q = data
                .quadrature_report
                .cycles
                .iter()
                .find(|q| q.kind == c.kind && q.index == c.index);
            CycleSummary {
                kind: c.kind,
                index: c.index,
                enclosed_branch_points: c.enclosed_branch_indices.clone(),
                orientation: c.orientation,
                nodes: q.map(|q| q.nodes.iter().copied().max().unwrap_or(0)).unwrap_or(0),
                estimated_error: F17(q.map(|q| q.estimated_error).unwrap_or(0.0)),
            }
        })
        .collect();
    let report = PeriodsReport {
        label: curve.label().map(str::to_string),
        genus: curve.genus(),
        branch_points: curve
            .branch_points()
            .iter()
            .map(|z| pair(Complex::new(z.re.as_f64(), z.im.as_f64())))
            .collect(),
        pi_a: cmatrix(&data.pi_a),
        pi_b: cmatrix(&data.pi_b),
        z: cmatrix(&data.z),
        im_z_eigenvalues: data
            .z
            .im()
            .symmetric_eigenvalues()
            .into_iter()
            .map(|e| F17(e.as_f64()))
            .collect(),
        b_matrix: cmatrix(b),
        sign_pattern: data.sign_pattern.clone(),
        cycles,
        validation: ValidationSummary {
            symmetry: F17(validation.symmetry),
            min_eig_im_z: F17(validation.min_eig_im_z),
            normalization: F17(validation.normalization),
            inverse: F17(validation.inverse),
            tolerance: F17(validation.tol),
            passed: validation.passed,
        },
    };
    to_pretty(&report)
}

#[derive(Debug, Serialize)]
struct PointRecord {
    chart: crate::curve::Chart,
    coord: [F17; 2],
    #[serde(rename = "K")]
    k: F17,
    index: MorseIndex,
    residual: F17,
    multiplicity: usize,
    provenance: Provenance,
    #[serde(skip_serializing_if = "Option::is_none")]
    branch_index: Option<usize>,
}

#[derive(Debug, Serialize)]
struct EulerCheck {
    lhs: i64,
    rhs: i64,
}

#[derive(Debug, Serialize)]
struct GaussBonnetRecord {
    integral: F17,
    expected: F17,
}

#[derive(Debug, Serialize)]
struct CensusReport {
    critical_points: Vec<PointRecord>,
    #[serde(rename = "I0")]
    i0: usize,
    #[serde(rename = "I1")]
    i1: usize,
    #[serde(rename = "I2")]
    i2: usize,
    degenerate_count: usize,
    euler_check: EulerCheck,
    is_morse_function: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    gauss_bonnet: Option<GaussBonnetRecord>,
    warnings: Vec<String>,
}

/// The census report as JSON.
pub fn census_json<T: Real>(census: &MorseCensus<T>, gauss_bonnet: Option<&GaussBonnet>) -> String {
    let critical_points = census
        .critical_points
        .iter()
        .map(|p| PointRecord {
            chart: p.location.chart,
            coord: pair(Complex::new(p.location.u.re.as_f64(), p.location.u.im.as_f64())),
            k: F17(p.k_value.as_f64()),
            index: p.index,
            residual: F17(p.residual.as_f64()),
            multiplicity: p.multiplicity(),
            provenance: p.provenance,
            branch_index: p.branch_index,
        })
        .collect();
    let report = CensusReport {
        critical_points,
        i0: census.i0,
        i1: census.i1,
        i2: census.i2,
        degenerate_count: census.degenerate_count,
        euler_check: EulerCheck {
            lhs: census.euler_lhs,
            rhs: census.euler_rhs,
        },
        is_morse_function: census.is_morse_function,
        gauss_bonnet: gauss_bonnet.map(|g| GaussBonnetRecord {
            integral: F17(g.integral),
            expected: F17(g.expected),
        }),
        warnings: census.warnings.iter().map(|w| w.to_string()).collect(),
    };
    to_pretty(&report)
}

fn to_pretty<S: Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize infallibly");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for x in [0.1, -1.0 / 3.0, 6.02214076e23, 5e-324, 1.0] {
            assert_eq!(fmt17(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(fmt17(-0.0), fmt17(0.0));
    }

    #[test]
    fn six_digit_text() {
        assert_eq!(fmt6(4.12345678), "4.12346");
        assert_eq!(fmt6(-0.000123456789), "-0.000123457");
        assert_eq!(fmt6(1.5e-9), "1.50000e-9");
        assert_eq!(fmt6(123456.7), "123457");
        assert_eq!(fmt6(0.0), "0");
        assert_eq!(fmt6(-0.99999999), "-1.00000");
        assert_eq!(fmt6(9.9999996e-5), "0.000100000");
        assert_eq!(fmt6(999999.7), "1.00000e6");
    }

    #[test]
    fn raw_numbers_are_valid_json() {
        let s = serde_json::to_string(&[F17(0.1), F17(-2.5e-300)]).unwrap();
        let back: Vec<f64> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, vec![0.1, -2.5e-300]);
    }

    #[test]
    fn curve_json_errors_are_format_errors() {
        assert!(matches!(parse_curve_json("{"), Err(Error::Format(_))));
        assert!(matches!(
            parse_curve_json(r#"{"branch_points": [[0, 1], [2]]}"#),
            Err(Error::Format(_))
        ));
        let c = parse_curve_json(r#"{"branch_points": [[0,0],[1,0],[2,0],[3,0]], "label": "x"}"#).unwrap();
        assert_eq!(c.label(), Some("x"));
        assert!(matches!(
            parse_curve_json(r#"{"branch_points": [[0,0],[1,0],[2,0]]}"#),
            Err(Error::OddCount(3))
        ));
    }
}
