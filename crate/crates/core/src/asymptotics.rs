//! Behaviour of t-family metrics far from the origin.
//!
//! In action-angle coordinates the metric is `h = diag(G, G⁻¹)` and the
//! complex structure is `J = [[0, -G⁻¹], [G, 0]]`. The chart
//! `λ_i = √(2x_i) cos y_i`, `μ_i = √(2x_i) sin y_i` turns the flat metric into
//! the identity, so the distance of the pulled-back metric from the identity
//! measures how fast the metric becomes euclidean.

use rayon::prelude::*;
use serde::Serialize;

use crate::curvature::{hessian_t_family, HessianEval};
use crate::error::{Error, Result};
use crate::linalg::{symmetric_operator_norm, Matrix};
use crate::potentials::TPotential;
use crate::scalarflat::burns_simanca_potential;

#[derive(Debug, Clone, PartialEq)]
pub struct MetricBlocks {
    /// `diag(G, G⁻¹)`, ordered `(x_1..x_n, y_1..y_n)`.
    pub metric: Matrix,
    pub complex_structure: Matrix,
    pub hessian: HessianEval,
}

pub fn metric_blocks(pot: &TPotential, x: &[f64]) -> Result<MetricBlocks> {
    let hessian = hessian_t_family(pot, x)?;
    let n = x.len();
    let mut metric = Matrix::zeros(2 * n, 2 * n);
    let mut complex_structure = Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            metric[(i, j)] = hessian.g[(i, j)];
            metric[(n + i, n + j)] = hessian.g_inv[(i, j)];
            complex_structure[(i, n + j)] = -hessian.g_inv[(i, j)];
            complex_structure[(n + i, j)] = hessian.g[(i, j)];
        }
    }
    Ok(MetricBlocks {
        metric,
        complex_structure,
        hessian,
    })
}

/// `ω = Σ dx_i ∧ dy_i` as the block matrix `[[0, I], [-I, 0]]`.
pub fn standard_symplectic_form(n: usize) -> Matrix {
    let mut omega = Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        omega[(i, n + i)] = 1.0;
        omega[(n + i, i)] = -1.0;
    }
    omega
}

/// `(λ, μ)` for action point `x` and angle point `y`.
pub fn flat_chart(x: &[f64], y: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    if let Some(bad) = x.iter().find(|&&xi| !(xi >= 0.0)) {
        return Err(Error::Domain(format!("action coordinates must be non-negative, got {bad}")));
    }
    let lambda = x.iter().zip(y).map(|(&xi, &yi)| (2.0 * xi).sqrt() * yi.cos()).collect();
    let mu = x.iter().zip(y).map(|(&xi, &yi)| (2.0 * xi).sqrt() * yi.sin()).collect();
    Ok((lambda, mu))
}

/// `u = ½ Σ (λ_i² + μ_i²)`, which equals `t = Σ x_i`.
pub fn chart_radius_squared(lambda: &[f64], mu: &[f64]) -> f64 {
    0.5 * lambda.iter().chain(mu).map(|v| v * v).sum::<f64>()
}

/// `∂(x, y)/∂(λ, μ)` at a point with all `x_i > 0`.
fn inverse_chart_jacobian(x: &[f64], y: &[f64]) -> Matrix {
    let n = x.len();
    let mut jac = Matrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        let r = (2.0 * x[i]).sqrt();
        let (s, c) = y[i].sin_cos();
        // dx_i = r (cos y dλ + sin y dμ), dy_i = (-sin y dλ + cos y dμ)/r
        jac[(i, i)] = r * c;
        jac[(i, n + i)] = r * s;
        jac[(n + i, i)] = -s / r;
        jac[(n + i, n + i)] = c / r;
    }
    jac
}

/// The metric in `(λ, μ)` coordinates.
pub fn metric_in_flat_chart(pot: &TPotential, x: &[f64], y: &[f64]) -> Result<Matrix> {
    if x.iter().any(|&xi| !(xi > 0.0)) {
        return Err(Error::Domain("the chart Jacobian needs x_i > 0".into()));
    }
    let blocks = metric_blocks(pot, x)?;
    let jac = inverse_chart_jacobian(x, y);
    Ok(jac.transpose() * blocks.metric * jac)
}

/// Operator-norm distance from the identity in the flat chart, at
/// `x = (u/n)(1, …, 1)` and `y = 0`.
pub fn chart_deviation(pot: &TPotential, n: usize, u: f64) -> Result<f64> {
    let x = vec![u / n as f64; n];
    let y = vec![0.0; n];
    let m = metric_in_flat_chart(pot, &x, &y)?;
    Ok(symmetric_operator_norm(&(m - Matrix::identity(2 * n, 2 * n))))
}

/// `samples` log-spaced values over `[u_min, u_max]`.
pub fn log_spaced(u_min: f64, u_max: f64, samples: usize) -> Vec<f64> {
    if samples == 1 {
        return vec![u_min];
    }
    let (a, b) = (u_min.ln(), u_max.ln());
    let mut us: Vec<f64> = (0..samples)
        .map(|k| (a + (b - a) * k as f64 / (samples - 1) as f64).exp())
        .collect();
    // Endpoints exactly as given.
    us[0] = u_min;
    us[samples - 1] = u_max;
    us
}

/// Deviations at each `u`, computed in parallel and returned in input order.
pub fn chart_deviations(pot: &TPotential, n: usize, us: &[f64]) -> Result<Vec<(f64, f64)>> {
    us.par_iter()
        .map(|&u| Ok((u, chart_deviation(pot, n, u)?)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecaySample {
    pub u: f64,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub n: usize,
    pub samples: Vec<DecaySample>,
    pub fitted_slope: f64,
    pub expected_slope: f64,
    /// Samples entering the fit (the lowest decade is dropped).
    pub fitted_samples: usize,
}

impl DecayReport {
    /// Samples in the format written by the CLI, header `u,deviation`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("u,deviation\n");
        for s in &self.samples {
            out.push_str(&format!("{:e},{:e}\n", s.u, s.deviation));
        }
        out
    }
}

/// Least-squares slope of `ln(deviation)` against `ln(u)`, dropping `u < 10·u_min`.
pub fn fit_log_slope(samples: &[(f64, f64)], u_min: f64) -> Result<(f64, usize)> {
    let points: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(u, d)| *u >= 10.0 * u_min * (1.0 - 1e-12) && *d > 0.0 && d.is_finite())
        .map(|(u, d)| (u.ln(), d.ln()))
        .collect();
    if points.len() < 3 {
        return Err(Error::IllConditionedFit(format!(
            "{} usable samples after dropping the first decade",
            points.len()
        )));
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::IllConditionedFit("all samples share one u".into()));
    }
    Ok((sxy / sxx, points.len()))
}

/// Log-spaced scan of any t-potential.
pub fn decay_scan_potential(
    pot: &TPotential,
    n: usize,
    u_min: f64,
    u_max: f64,
    samples: usize,
) -> Result<DecayReport> {
    if n < 1 {
        return Err(Error::InvalidDimension(n));
    }
    if !(u_min > 1.0) || !(u_max > u_min) {
        return Err(Error::Domain(format!(
            "need 1 < u_min < u_max, got [{u_min}, {u_max}]"
        )));
    }
    if samples < 8 {
        return Err(Error::Domain(format!("need at least 8 samples, got {samples}")));
    }
    let us = log_spaced(u_min, u_max, samples);
    let values = chart_deviations(pot, n, &us)?;
    let (fitted_slope, fitted_samples) = fit_log_slope(&values, u_min)?;
    Ok(DecayReport {
        n,
        samples: values
            .into_iter()
            .map(|(u, deviation)| DecaySample { u, deviation })
            .collect(),
        fitted_slope,
        expected_slope: 1.0 - n as f64,
        fitted_samples,
    })
}

/// Decay of the Burns–Simanca metric in dimension `n`.
pub fn decay_scan(n: usize, u_min: f64, u_max: f64, samples: usize) -> Result<DecayReport> {
    let pot = burns_simanca_potential(n)?;
    decay_scan_potential(&pot, n, u_min, u_max, samples)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;

    #[test]
    fn metric_blocks_examples() {
        let flat = metric_blocks(&TPotential::flat(), &[0.5, 0.5]).unwrap();
        assert!(max_abs(&(flat.metric.clone() - Matrix::identity(4, 4))) < 1e-15);

        let bs = burns_simanca_potential(2).unwrap();
        let b = metric_blocks(&bs, &[1.0, 1.0]).unwrap();
        // t = 2, F'' = 1/2, 1 + tF'' = 2: diagonal 2·1·(1 + ½·1)/2 = 1.5, off-diagonal -2·½/2 = -0.5
        assert!((b.metric[(2, 2)] - 1.5).abs() < 1e-15);
        assert!((b.metric[(2, 3)] + 0.5).abs() < 1e-15);
        assert!((b.metric[(3, 3)] - 1.5).abs() < 1e-15);
    }

    #[test]
    fn complex_structure_squares_to_minus_one_and_is_compatible() {
        let pots = [TPotential::fubini_study(), TPotential::generalized_burns(), burns_simanca_potential(3).unwrap()];
        let points: [&[f64]; 3] = [&[0.1, 0.2, 0.3], &[0.5, 0.9, 1.1], &[0.4, 0.8, 2.0]];
        for (pot, x) in pots.iter().zip(points) {
            let b = metric_blocks(pot, x).unwrap();
            let j2 = &b.complex_structure * &b.complex_structure;
            assert!(max_abs(&(j2 + Matrix::identity(6, 6))) < 1e-10);
            let omega = standard_symplectic_form(3);
            let from_omega = &omega * &b.complex_structure;
            assert!(max_abs(&(from_omega - &b.metric)) < 1e-12);
        }
    }

    #[test]
    fn flat_chart_examples() {
        let (l, m) = flat_chart(&[0.5, 0.5], &[0.0, 0.0]).unwrap();
        assert_eq!((l, m), (vec![1.0, 1.0], vec![0.0, 0.0]));
        let x = [0.3, 1.7, 2.2];
        let (l, m) = flat_chart(&x, &[0.4, -1.0, 3.0]).unwrap();
        assert!((chart_radius_squared(&l, &m) - x.iter().sum::<f64>()).abs() < 1e-14);
        let (l0, m0) = flat_chart(&[0.0], &[1.0]).unwrap();
        assert_eq!((l0, m0), (vec![0.0], vec![0.0]));
        assert!(flat_chart(&[-1.0], &[0.0]).is_err());
    }

    #[test]
    fn flat_metric_is_the_identity_in_the_chart() {
        let m = metric_in_flat_chart(&TPotential::flat(), &[0.3, 2.0], &[0.7, -2.1]).unwrap();
        assert!(max_abs(&(m - Matrix::identity(4, 4))) < 1e-13);
        let us = log_spaced(10.0, 1e6, 16);
        for (_, d) in chart_deviations(&TPotential::flat(), 3, &us).unwrap() {
            assert!(d < 1e-12);
        }
    }

    #[test]
    fn burns_simanca_splittings() {
        for n in 2..=5usize {
            let pot = burns_simanca_potential(n).unwrap();
            let x: Vec<f64> = (0..n).map(|i| 0.4 + 0.35 * i as f64).collect();
            let t: f64 = x.iter().sum();
            let h = hessian_t_family(&pot, &x).unwrap();
            let nf = n as f64;
            let affine = (nf - 1.0) * t + 2.0 - nf;
            let f2 = affine / (t * (t.powi(n as i32) - (nf - 1.0) * t - 2.0 + nf));
            let coeff = t.powi(-(n as i32)) * (t.powi(n as i32) - (nf - 1.0) * t + nf - 2.0);
            for i in 0..n {
                for j in 0..n {
                    let a = if i == j { 1.0 / (2.0 * x[i]) } else { 0.0 };
                    assert!((h.g[(i, j)] - (a + 0.5 * f2)).abs() < 1e-14);
                    let c = if i == j { coeff * 2.0 * x[i] } else { 0.0 };
                    let q = if i == j { t * x[i] } else { 0.0 } - x[i] * x[j];
                    let d = 2.0 * t.powi(-(n as i32) - 1) * affine * q;
                    assert!((h.g_inv[(i, j)] - (c + d)).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn burns_simanca_deviation_decreases() {
        let report = decay_scan(2, 1e2, 1e6, 32).unwrap();
        for w in report.samples.windows(2) {
            assert!(w[1].deviation < w[0].deviation);
        }
        assert!(report.to_csv().starts_with("u,deviation\n"));
        assert_eq!(report.to_csv().lines().count(), 33);
    }

    #[test]
    fn decay_scan_argument_checks() {
        assert!(decay_scan(2, 0.5, 1e3, 16).is_err());
        assert!(decay_scan(2, 10.0, 1e3, 4).is_err());
        assert!(decay_scan(1, 10.0, 1e3, 16).is_err());
        assert!(matches!(
            decay_scan_potential(&TPotential::flat(), 2, 10.0, 1e3, 16),
            Err(Error::IllConditionedFit(_)) | Ok(_)
        ));
    }
}
