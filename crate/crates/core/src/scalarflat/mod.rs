//! Scalar-flat t-potentials and the boundary matching that singles out the
//! Burns–Simanca metric on the blow-up of ℂⁿ at the origin.
//!
//! Every solution of `S = 0` in the t-family has
//! `F''(t) = (At + B) / (t (tⁿ - (At + B)))`. On the blow-up polytope
//! `det G⁻¹ = δ · x_1⋯x_n · (t - 1)` must hold with `δ` smooth and positive up
//! to the facet `t = 1`, and `F''` must have a unit simple pole there. Those two
//! requirements are linear in `(A, B)` and are solved here over ℚ.

pub mod poly;

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::curvature::hessian_t_family;
use crate::error::{Error, Result};
use crate::jets::TaylorJet;
use crate::polytope::{DelzantPolytope, PolytopeKind};
use crate::potentials::{smooth_t_potential, Interval, JetFn, TPotential, TPotentialLabel, DOMAIN_MARGIN};
use crate::quadrature::adaptive_gauss_kronrod;

pub use poly::{rational, RationalPolynomial};

/// Absolute tolerance for the reconstruction of `F` from `F''`.
pub const RECONSTRUCTION_TOL: f64 = 1e-11;
/// Anchor where `F = F' = 0` by convention.
pub const DEFAULT_ANCHOR: f64 = 2.0;
/// Relative tolerance of the `det G⁻¹ = δ Π l_i` factorization check.
pub const FACTORIZATION_TOL: f64 = 1e-10;

/// The pair `(A, B)` with the factorization `tⁿ - At - B = (t - 1) Q(t) + r`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMatch {
    pub n: usize,
    pub a: BigRational,
    pub b: BigRational,
    /// `tⁿ - At - B`.
    pub numerator: RationalPolynomial,
    pub quotient: RationalPolynomial,
    /// Zero exactly when `(t - 1)` divides the numerator.
    pub remainder: BigRational,
}

fn scalar_flat_numerator(n: usize, a: &BigRational, b: &BigRational) -> RationalPolynomial {
    let mut coeffs = vec![BigRational::zero(); n.max(1) + 1];
    coeffs[n] = rational(1);
    coeffs[1] = &coeffs[1] - a;
    coeffs[0] = &coeffs[0] - b;
    RationalPolynomial::new(coeffs)
}

impl BoundaryMatch {
    /// Factorizes `tⁿ - At - B` for arbitrary coefficients; no matching is imposed.
    pub fn from_coefficients(n: usize, a: BigRational, b: BigRational) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidDimension(n));
        }
        let numerator = scalar_flat_numerator(n, &a, &b);
        let (quotient, remainder) = numerator.synthetic_division(&rational(1));
        Ok(Self {
            n,
            a,
            b,
            numerator,
            quotient,
            remainder,
        })
    }

    pub fn is_divisible(&self) -> bool {
        self.remainder.is_zero()
    }

    pub fn a_f64(&self) -> f64 {
        self.a.to_f64().unwrap_or(f64::NAN)
    }

    pub fn b_f64(&self) -> f64 {
        self.b.to_f64().unwrap_or(f64::NAN)
    }

    /// Coefficients of `Q` in ascending degree.
    pub fn quotient_f64(&self) -> Vec<f64> {
        self.quotient
            .coeffs()
            .iter()
            .map(|c| c.to_f64().unwrap_or(f64::NAN))
            .collect()
    }

    /// `δ(t) = 2ⁿ t⁻ⁿ (tⁿ - At - B)/(t - 1)`. With exact divisibility this is
    /// `2ⁿ t⁻ⁿ Q(t)`, finite at `t = 1`; otherwise it blows up there.
    pub fn delta(&self, t: f64) -> f64 {
        let prefactor = 2f64.powi(self.n as i32) * t.powi(-(self.n as i32));
        let q = self.quotient.eval_f64(t);
        if self.is_divisible() {
            prefactor * q
        } else {
            let r = self.remainder.to_f64().unwrap_or(f64::NAN);
            prefactor * (q + r / (t - 1.0))
        }
    }

    /// `Q(1) > 0` and every non-constant coefficient of `Q` is non-negative,
    /// so `Q` is increasing and positive on `[1, ∞)`.
    pub fn quotient_positive_on_ray(&self) -> bool {
        let q1 = self.quotient.eval(&rational(1));
        q1.is_positive() && self.quotient.coeffs().iter().skip(1).all(|c| !c.is_negative())
    }

    /// `F''` with the denominator kept as `t(t - 1)Q(t)`, avoiding the
    /// cancellation in `tⁿ - At - B` near the facet. Only valid when divisible.
    fn factored_f2(&self) -> impl Fn(&TaylorJet) -> Result<TaylorJet> + Send + Sync {
        let (a, b) = (self.a_f64(), self.b_f64());
        let q = self.quotient_f64();
        move |t: &TaylorJet| {
            let affine = t.scale(a).add_scalar(b);
            let mut qt = TaylorJet::constant(0.0, t.base(), t.order());
            for &c in q.iter().rev() {
                qt = (&qt * t).add_scalar(c);
            }
            let denominator = &(t * &t.add_scalar(-1.0)) * &qt;
            affine.checked_div(&denominator)
        }
    }

    /// The t-potential with these coefficients on the blow-up range `t > 1`.
    pub fn potential(&self) -> TPotential {
        let label = TPotentialLabel::ScalarFlatFamily {
            n: self.n,
            a: self.a_f64(),
            b: self.b_f64(),
        };
        let domain = Interval::new(1.0, f64::INFINITY);
        if !self.is_divisible() {
            return family_potential(self.n, self.a_f64(), self.b_f64(), label, domain);
        }
        TPotential::from_parts(label, domain, Arc::new(self.factored_f2()), None)
    }
}

fn family_f2(n: usize, a: f64, b: f64) -> impl Fn(&TaylorJet) -> Result<TaylorJet> + Send + Sync {
    move |t: &TaylorJet| {
        let affine = t.scale(a).add_scalar(b);
        let tn = t.powi(n as i32)?;
        let denominator = t * &(&tn - &affine);
        affine.checked_div(&denominator)
    }
}

fn family_potential(n: usize, a: f64, b: f64, label: TPotentialLabel, domain: Interval) -> TPotential {
    TPotential::from_parts(label, domain, Arc::new(family_f2(n, a, b)), None)
}

/// `F'' = (At + B)/(t(tⁿ - (At + B)))` on `t > 0`. Points with `tⁿ ≤ At + B`
/// are singular or non-admissible and are reported by the curvature layer.
pub fn scalar_flat_family(n: usize, a: f64, b: f64) -> Result<TPotential> {
    if n < 1 {
        return Err(Error::InvalidDimension(n));
    }
    Ok(family_potential(
        n,
        a,
        b,
        TPotentialLabel::ScalarFlatFamily { n, a, b },
        Interval::new(0.0, f64::INFINITY),
    ))
}

/// The two matching conditions as a linear system `M (A, B)ᵀ = r` over ℚ.
///
/// Writing `P(t) = tⁿ - At - B`:
/// divisibility by `t - 1` is `P(1) = 0`; a unit residue of `F''` at `t = 1`
/// is `(A + B)/Q(1) = 1`, which under divisibility is `P'(1) = Q(1) = 1`.
/// Both are read off from the exact values of `tⁿ`, `-t`, `-1` and their
/// derivatives at `t = 1`.
pub fn matching_system(n: usize) -> ([[BigRational; 2]; 2], [BigRational; 2]) {
    let one = rational(1);
    let lead = RationalPolynomial::monomial(n, rational(1));
    let basis_a = RationalPolynomial::from_integers(&[0, -1]);
    let basis_b = RationalPolynomial::from_integers(&[-1]);
    let row = |op: &dyn Fn(&RationalPolynomial) -> BigRational| [op(&basis_a), op(&basis_b)];
    let value = |p: &RationalPolynomial| p.eval(&one);
    let slope = |p: &RationalPolynomial| p.derivative().eval(&one);
    let matrix = [row(&value), row(&slope)];
    let rhs = [rational(0) - value(&lead), rational(1) - slope(&lead)];
    (matrix, rhs)
}

/// Cramer's rule; `None` for a singular system.
pub fn solve_2x2(m: &[[BigRational; 2]; 2], r: &[BigRational; 2]) -> Option<(BigRational, BigRational)> {
    let det = &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0];
    if det.is_zero() {
        return None;
    }
    let x = (&r[0] * &m[1][1] - &m[0][1] * &r[1]) / &det;
    let y = (&m[0][0] * &r[1] - &r[0] * &m[1][0]) / &det;
    Some((x, y))
}

/// Solves the matching conditions on the `n`-dimensional blow-up polytope.
pub fn solve_boundary_coefficients(n: usize) -> Result<BoundaryMatch> {
    if n < 2 {
        return Err(Error::InvalidDimension(n));
    }
    let (m, r) = matching_system(n);
    let (a, b) = solve_2x2(&m, &r)
        .ok_or_else(|| Error::SingularMetric("matching system is singular".into()))?;
    let matched = BoundaryMatch::from_coefficients(n, a, b)?;
    if !matched.is_divisible() || matched.quotient.eval(&rational(1)) != rational(1) {
        return Err(Error::SingularMetric(format!(
            "matched coefficients fail the boundary conditions for n = {n}"
        )));
    }
    Ok(matched)
}

/// `F''(t) = ((n-1)t + 2 - n)/(t(tⁿ - (n-1)t - 2 + n))` on `(1, ∞)`.
pub fn burns_simanca_potential(n: usize) -> Result<TPotential> {
    let matched = solve_boundary_coefficients(n)?;
    if !matched.quotient_positive_on_ray() {
        return Err(Error::NonAdmissible(format!(
            "Q(t) may vanish on t ≥ 1 for n = {n}"
        )));
    }
    let f2: JetFn =
        Arc::new(matched.factored_f2());
    let f_value = smooth_t_potential(f2.clone(), 1.0, DEFAULT_ANCHOR);
    Ok(TPotential::from_parts(
        TPotentialLabel::BurnsSimanca { n },
        Interval::new(1.0, f64::INFINITY),
        f2,
        Some(f_value),
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaSample {
    pub t: f64,
    pub delta: f64,
    /// `det G⁻¹` at `x = (t/n, …, t/n)`; absent on the facet `t = 1`.
    pub det_g_inv: Option<f64>,
    pub factorized: Option<f64>,
    pub relative_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaCheck {
    pub passed: bool,
    pub min_delta: f64,
    pub max_relative_error: f64,
    pub samples: Vec<DeltaSample>,
}

/// Positivity of `δ` on `[1, ∞)` (always including `t = 1`) and the
/// factorization `det G⁻¹ = δ Π l_i` at interior points of the blow-up polytope.
pub fn delta_check(matched: &BoundaryMatch, t_samples: &[f64]) -> Result<DeltaCheck> {
    let n = matched.n;
    let polytope = DelzantPolytope::build_standard(PolytopeKind::Blowup, n)?;
    let potential = matched.potential();
    let mut ts: Vec<f64> = t_samples.to_vec();
    if !ts.contains(&1.0) {
        ts.insert(0, 1.0);
    }
    let mut passed = true;
    let mut min_delta = f64::INFINITY;
    let mut max_relative_error: f64 = 0.0;
    let mut samples = Vec::with_capacity(ts.len());
    for &t in &ts {
        if t < 1.0 {
            return Err(Error::Domain(format!("δ is checked on t ≥ 1, got {t}")));
        }
        let delta = matched.delta(t);
        if !(delta.is_finite() && delta > 0.0) {
            passed = false;
        }
        min_delta = min_delta.min(if delta.is_nan() { f64::NEG_INFINITY } else { delta });
        let mut sample = DeltaSample {
            t,
            delta,
            det_g_inv: None,
            factorized: None,
            relative_error: None,
        };
        if t > 1.0 + DOMAIN_MARGIN {
            let x = vec![t / n as f64; n];
            let prod: f64 = polytope.facet_values(&x)?.iter().product();
            let factorized = delta * prod;
            match hessian_t_family(&potential, &x) {
                Ok(h) => {
                    let rel = ((h.det_g_inv - factorized) / h.det_g_inv).abs();
                    if !(rel < FACTORIZATION_TOL) {
                        passed = false;
                    }
                    max_relative_error = max_relative_error.max(rel);
                    sample.det_g_inv = Some(h.det_g_inv);
                    sample.factorized = Some(factorized);
                    sample.relative_error = Some(rel);
                }
                Err(_) => passed = false,
            }
        }
        samples.push(sample);
    }
    Ok(DeltaCheck {
        passed,
        min_delta,
        max_relative_error,
        samples,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Reconstruction {
    pub f_value: f64,
    pub f1: f64,
}

/// `F` and `F'` from `F''` with `F(anchor) = F'(anchor) = 0`.
pub fn reconstruct_f(pot: &TPotential, t: f64, anchor: f64) -> Result<Reconstruction> {
    let domain = pot.domain();
    for (name, v) in [("t", t), ("anchor", anchor)] {
        if !domain.contains_with_margin(v, DOMAIN_MARGIN) {
            return Err(Error::Domain(format!(
                "{name} = {v} outside ({}, {})",
                domain.lo, domain.hi
            )));
        }
    }
    let f1 = adaptive_gauss_kronrod(|tau| pot.f2(tau), anchor, t, RECONSTRUCTION_TOL)?;
    let f_value = adaptive_gauss_kronrod(|tau| Ok((t - tau) * pot.f2(tau)?), anchor, t, RECONSTRUCTION_TOL)?;
    Ok(Reconstruction { f_value, f1 })
}

/// `r(t) = F''(t) - 1/(t - 1)`; bounded as `t → 1⁺` exactly when `F''` has a
/// unit simple pole on the facet.
pub fn boundary_regularity(pot: &TPotential, t: f64) -> Result<f64> {
    Ok(pot.f2(t)? - 1.0 / (t - 1.0))
}
