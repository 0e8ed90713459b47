//! Hessians in action coordinates and scalar curvature.
//!
//! Two independent routes to `S`:
//! - [`scalar_curvature_reduced`] evaluates `S = t^{1-n} (t^{n+1} F''/(1 + tF''))''`
//!   exactly with jets, for t-family potentials;
//! - [`scalar_curvature_abreu`] applies `S = -½ Σ ∂²G^{ij}/∂x_i∂x_j` with nested
//!   central differences to any symplectic potential.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jets::{TaylorJet, DEFAULT_ORDER};
use crate::linalg::{is_positive_definite, max_abs, pivoted_inverse, symmetrize, Matrix};
use crate::polytope::NEAR_BOUNDARY_CUTOFF;
use crate::potentials::{kahler_to_t_potential, RadialKahlerPotential, SymplecticPotential, TPotential};

/// Acceptance tolerance for the identity `f(a) + g(x) = Σ a_i x_i`.
pub const LEGENDRE_IDENTITY_TOL: f64 = 1e-8;
/// Acceptance tolerance for `Hess_a f = G⁻¹` with finite differences.
pub const LEGENDRE_HESSIAN_TOL: f64 = 1e-5;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HessianEval {
    pub point: Vec<f64>,
    #[serde(serialize_with = "serialize_matrix")]
    pub g: Matrix,
    #[serde(serialize_with = "serialize_matrix")]
    pub g_inv: Matrix,
    pub det_g_inv: f64,
    pub positive_definite: bool,
}

pub(crate) fn serialize_matrix<S: serde::Serializer>(m: &Matrix, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(m.nrows()))?;
    for i in 0..m.nrows() {
        let row: Vec<f64> = m.row(i).iter().copied().collect();
        seq.serialize_element(&row)?;
    }
    seq.end()
}

fn orthant_sum(x: &[f64]) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::InvalidDimension(0));
    }
    let min = x.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min >= NEAR_BOUNDARY_CUTOFF) {
        return Err(Error::NearBoundary {
            value: min,
            cutoff: NEAR_BOUNDARY_CUTOFF,
        });
    }
    Ok(x.iter().sum())
}

/// `G_ij = ½(δ_ij/x_i + F'')` for `g = ½(Σ x_i ln x_i + F(t))`, together with `F''(t)`.
///
/// No admissibility requirement: the matrix exists whenever `F''` does.
pub fn t_family_gram(pot: &TPotential, x: &[f64]) -> Result<(Matrix, f64)> {
    let t = orthant_sum(x)?;
    let f2 = pot.f2(t)?;
    let n = x.len();
    let g = Matrix::from_fn(n, n, |i, j| {
        let diag = if i == j { 1.0 / x[i] } else { 0.0 };
        0.5 * (diag + f2)
    });
    Ok((g, f2))
}

fn t_family_hessian_from_f2(x: &[f64], f2: f64) -> Result<HessianEval> {
    let n = x.len();
    let t: f64 = x.iter().sum();
    let w = 1.0 + t * f2;
    if !(w > 0.0) {
        return Err(Error::NonAdmissible(format!(
            "1 + tF'' = {w} at t = {t}; the inverse Hessian formula is singular or indefinite"
        )));
    }
    let g = Matrix::from_fn(n, n, |i, j| {
        let diag = if i == j { 1.0 / x[i] } else { 0.0 };
        0.5 * (diag + f2)
    });
    let g_inv = Matrix::from_fn(n, n, |i, j| {
        if i == j {
            2.0 * x[i] * (1.0 + f2 * (t - x[i])) / w
        } else {
            -2.0 * f2 * x[i] * x[j] / w
        }
    });
    let prod: f64 = x.iter().product();
    let det_g_inv = 2f64.powi(n as i32) * prod / w;
    let positive_definite = is_positive_definite(&g);
    Ok(HessianEval {
        point: x.to_vec(),
        g,
        g_inv,
        det_g_inv,
        positive_definite,
    })
}

/// Closed-form Hessian, inverse and `det G⁻¹ = 2ⁿ Π x_i/(1 + tF'')` for the t-family.
pub fn hessian_t_family(pot: &TPotential, x: &[f64]) -> Result<HessianEval> {
    let t = orthant_sum(x)?;
    let f2 = pot.f2(t)?;
    t_family_hessian_from_f2(x, f2)
}

fn second_differences(g: &dyn SymplecticPotential, x: &[f64], h: f64) -> Result<(Matrix, f64)> {
    let n = x.len();
    let mut probe = x.to_vec();
    let mut eval = |offsets: &[(usize, f64)]| -> Result<f64> {
        probe.copy_from_slice(x);
        for &(i, d) in offsets {
            probe[i] += d;
        }
        g.value(&probe)
    };
    let centre = eval(&[])?;
    let mut scale = centre.abs();
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        let p = eval(&[(i, h)])?;
        let q = eval(&[(i, -h)])?;
        scale = scale.max(p.abs()).max(q.abs());
        m[(i, i)] = (p - 2.0 * centre + q) / (h * h);
        for j in (i + 1)..n {
            let pp = eval(&[(i, h), (j, h)])?;
            let pm = eval(&[(i, h), (j, -h)])?;
            let mp = eval(&[(i, -h), (j, h)])?;
            let mm = eval(&[(i, -h), (j, -h)])?;
            scale = scale.max(pp.abs()).max(pm.abs()).max(mp.abs()).max(mm.abs());
            let v = (pp - pm - mp + mm) / (4.0 * h * h);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    Ok((m, scale))
}

/// Hessian of an arbitrary potential by central second differences with one
/// Richardson step (`h` and `h/2`), inverted by pivoted elimination.
pub fn hessian_general(g: &dyn SymplecticPotential, x: &[f64], step: f64) -> Result<HessianEval> {
    if x.len() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            got: x.len(),
        });
    }
    if !(step > 0.0) {
        return Err(Error::Domain(format!("step must be positive, got {step}")));
    }
    let margin = g.boundary_margin(x)?;
    if !(margin > 2.0 * step) {
        return Err(Error::NearBoundary {
            value: margin,
            cutoff: 2.0 * step,
        });
    }
    let (coarse, scale) = second_differences(g, x, step)?;
    let (fine, _) = second_differences(g, x, 0.5 * step)?;
    let hess = symmetrize(&((fine * 4.0 - coarse) / 3.0));
    // Rounding in g is amplified by 1/h²; anything at that level is noise.
    let noise = 64.0 * f64::EPSILON * scale.max(f64::MIN_POSITIVE) / (0.25 * step * step);
    if max_abs(&hess) <= noise {
        return Err(Error::DegeneratePotential("Hessian vanishes to rounding".into()));
    }
    let g_inv = pivoted_inverse(&hess, noise)
        .ok_or_else(|| Error::DegeneratePotential("Hessian is singular".into()))?;
    let det = hess.determinant();
    Ok(HessianEval {
        point: x.to_vec(),
        positive_definite: is_positive_definite(&hess),
        det_g_inv: 1.0 / det,
        g: hess,
        g_inv: symmetrize(&g_inv),
    })
}

/// Reduced formula via jets of `F''` at `t`.
pub fn scalar_curvature_reduced(pot: &TPotential, n: usize, t: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::InvalidDimension(n));
    }
    let order = DEFAULT_ORDER;
    let f2 = pot.f2_jet(t, order)?;
    let tj = TaylorJet::variable(t, order);
    let w = (&tj * &f2).add_scalar(1.0);
    if w.value() == 0.0 {
        return Err(Error::SingularMetric(format!("1 + tF'' vanishes at t = {t}")));
    }
    if !(w.value() > 0.0) {
        return Err(Error::NonAdmissible(format!(
            "1 + tF'' = {} at t = {t}",
            w.value()
        )));
    }
    let inner = (&tj.powi(n as i32 + 1)? * &f2).checked_div(&w)?;
    Ok(t.powi(1 - n as i32) * inner.derivative(2)?)
}

/// Finite-difference steps for the nested Abreu evaluation, as fractions of
/// the boundary margin at the evaluation point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AbreuSteps {
    pub inner: f64,
    pub outer: f64,
}

impl Default for AbreuSteps {
    fn default() -> Self {
        Self {
            inner: 0.04,
            outer: 0.05,
        }
    }
}

fn abreu_sum(g: &dyn SymplecticPotential, x: &[f64], outer: f64, inner: f64) -> Result<f64> {
    let n = x.len();
    let mut probe = x.to_vec();
    let mut g_inv_at = |offsets: &[(usize, f64)]| -> Result<Matrix> {
        probe.copy_from_slice(x);
        for &(i, d) in offsets {
            probe[i] += d;
        }
        Ok(hessian_general(g, &probe, inner)?.g_inv)
    };
    let centre = g_inv_at(&[])?;
    let h2 = outer * outer;
    let mut sum = 0.0;
    for i in 0..n {
        let p = g_inv_at(&[(i, outer)])?;
        let m = g_inv_at(&[(i, -outer)])?;
        sum += (p[(i, i)] - 2.0 * centre[(i, i)] + m[(i, i)]) / h2;
        for j in (i + 1)..n {
            let pp = g_inv_at(&[(i, outer), (j, outer)])?;
            let pm = g_inv_at(&[(i, outer), (j, -outer)])?;
            let mp = g_inv_at(&[(i, -outer), (j, outer)])?;
            let mm = g_inv_at(&[(i, -outer), (j, -outer)])?;
            // ∂²G^{ij} and ∂²G^{ji} are equal; count both.
            sum += 2.0 * (pp[(i, j)] - pm[(i, j)] - mp[(i, j)] + mm[(i, j)]) / (4.0 * h2);
        }
    }
    Ok(-0.5 * sum)
}

/// General-path scalar curvature with margin-scaled steps.
pub fn scalar_curvature_abreu(g: &dyn SymplecticPotential, x: &[f64]) -> Result<f64> {
    scalar_curvature_abreu_with(g, x, AbreuSteps::default())
}

pub fn scalar_curvature_abreu_with(g: &dyn SymplecticPotential, x: &[f64], steps: AbreuSteps) -> Result<f64> {
    if x.len() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: g.dim(),
            got: x.len(),
        });
    }
    let margin = g.boundary_margin(x)?;
    if !(margin > 0.0) || !margin.is_finite() {
        return Err(Error::NearBoundary {
            value: margin,
            cutoff: 0.0,
        });
    }
    let outer = steps.outer * margin;
    let inner = steps.inner * margin;
    let coarse = abreu_sum(g, x, outer, inner)?;
    let fine = abreu_sum(g, x, 0.5 * outer, inner)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Least-squares affine fit of `S(t)` over the samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalReport {
    pub values: Vec<(f64, f64)>,
    pub intercept: f64,
    pub slope: f64,
    pub max_residual: f64,
    pub tolerance: f64,
    pub extremal: bool,
}

pub fn extremal_check(pot: &TPotential, n: usize, t_samples: &[f64]) -> Result<ExtremalReport> {
    let values = t_samples
        .iter()
        .map(|&t| Ok((t, scalar_curvature_reduced(pot, n, t)?)))
        .collect::<Result<Vec<_>>>()?;
    let k = values.len() as f64;
    if values.is_empty() {
        return Err(Error::IllConditionedFit("no samples".into()));
    }
    let mean_t = values.iter().map(|v| v.0).sum::<f64>() / k;
    let mean_s = values.iter().map(|v| v.1).sum::<f64>() / k;
    let stt: f64 = values.iter().map(|v| (v.0 - mean_t).powi(2)).sum();
    let sts: f64 = values.iter().map(|v| (v.0 - mean_t) * (v.1 - mean_s)).sum();
    let slope = if stt > 0.0 { sts / stt } else { 0.0 };
    let intercept = mean_s - slope * mean_t;
    let max_residual = values
        .iter()
        .map(|&(t, s)| (s - (intercept + slope * t)).abs())
        .fold(0.0, f64::max);
    let max_s = values.iter().map(|v| v.1.abs()).fold(0.0, f64::max);
    let tolerance = 1e-6 * (1.0 + max_s);
    Ok(ExtremalReport {
        values,
        intercept,
        slope,
        max_residual,
        tolerance,
        extremal: max_residual < tolerance,
    })
}

/// Outcome of pushing a log-coordinate point through the Legendre transform.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LegendreReport {
    pub a: Vec<f64>,
    pub s: f64,
    /// `x = ∂f/∂a` by central differences.
    pub x: Vec<f64>,
    /// `x_i = 2 e^{2a_i} f'(s)`.
    pub x_closed_form: Vec<f64>,
    pub max_x_error: f64,
    /// `f(a) + g(x) - Σ a_i x_i`.
    pub identity_residual: f64,
    /// `max |Hess_a f - G⁻¹(x)|`.
    pub hessian_max_error: f64,
}

fn central_gradient(f: &(dyn Fn(&[f64]) -> Result<f64> + Sync), a: &[f64], h: f64) -> Result<Vec<f64>> {
    let mut probe = a.to_vec();
    let mut partial = |i: usize, h: f64| -> Result<f64> {
        probe.copy_from_slice(a);
        probe[i] = a[i] + h;
        let p = f(&probe)?;
        probe[i] = a[i] - h;
        let m = f(&probe)?;
        Ok((p - m) / (2.0 * h))
    };
    (0..a.len())
        .map(|i| {
            let coarse = partial(i, h)?;
            let fine = partial(i, 0.5 * h)?;
            Ok((4.0 * fine - coarse) / 3.0)
        })
        .collect()
}

fn central_hessian(f: &(dyn Fn(&[f64]) -> Result<f64> + Sync), a: &[f64], h: f64) -> Result<Matrix> {
    let n = a.len();
    let g = crate::potentials::FnPotential {
        dim: n,
        value: |y: &[f64]| f(y),
        margin: |_: &[f64]| f64::INFINITY,
    };
    let (coarse, _) = second_differences(&g, a, h)?;
    let (fine, _) = second_differences(&g, a, 0.5 * h)?;
    Ok((fine * 4.0 - coarse) / 3.0)
}

pub fn legendre_roundtrip(f: &RadialKahlerPotential, a: &[f64]) -> Result<LegendreReport> {
    if a.is_empty() {
        return Err(Error::InvalidDimension(0));
    }
    let s: f64 = a.iter().map(|ai| (2.0 * ai).exp()).sum();
    let d = f.derivatives(s)?;
    if !d.is_admissible() {
        return Err(Error::NonAdmissible(format!(
            "f' = {}, f'' = {} at s = {s}",
            d.f1, d.f2
        )));
    }
    let fa = |y: &[f64]| -> Result<f64> {
        let s: f64 = y.iter().map(|yi| (2.0 * yi).exp()).sum();
        Ok(f.jet(s, 0)?.value())
    };
    let step = 1e-3;
    let x = central_gradient(&fa, a, step)?;
    let x_closed_form: Vec<f64> = a.iter().map(|ai| 2.0 * (2.0 * ai).exp() * d.f1).collect();
    let max_x_error = x
        .iter()
        .zip(&x_closed_form)
        .map(|(p, q)| (p - q).abs())
        .fold(0.0, f64::max);

    let t: f64 = x.iter().sum();
    let dual = kahler_to_t_potential(f, t)?;
    let entropy: f64 = x.iter().map(|&xi| xi * xi.ln()).sum();
    let g_value = 0.5 * (entropy + dual.f_value);
    let pairing: f64 = a.iter().zip(&x).map(|(ai, xi)| ai * xi).sum();
    let identity_residual = fa(a)? + g_value - pairing;

    let hess_a = central_hessian(&fa, a, step)?;
    let g_inv = t_family_hessian_from_f2(&x_closed_form, dual.f2)?.g_inv;
    let hessian_max_error = max_abs(&(hess_a - g_inv));
    Ok(LegendreReport {
        a: a.to_vec(),
        s,
        x,
        x_closed_form,
        max_x_error,
        identity_residual,
        hessian_max_error,
    })
}
