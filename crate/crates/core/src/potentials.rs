//! Radial Kähler potentials `f(s)`, t-potentials `F(t)`, and the bridge between them.
//!
//! A U(n)-invariant metric on `ℂⁿ∖{0}` has Kähler potential `f(s)` with
//! `s = Σ|z_i|²`, and symplectic potential `g(x) = ½(Σ x_i ln x_i + F(t))`
//! with `t = Σ x_i = 2 s f'(s)`. Everything curvature-related consumes only
//! `F''`, so t-potentials are described by jet evaluators of `F''`.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::jets::TaylorJet;
use crate::polytope::NEAR_BOUNDARY_CUTOFF;
use crate::quadrature::{adaptive_gauss_kronrod, GaussLegendre};

/// Maps a jet of the argument to a jet of the function value.
pub type JetFn = Arc<dyn Fn(&TaylorJet) -> Result<TaylorJet> + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;

/// Required distance between an evaluation point and the domain ends.
pub const DOMAIN_MARGIN: f64 = 1e-10;

/// A convex function on the interior of a moment polytope.
pub trait SymplecticPotential: Send + Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> Result<f64>;
    /// Distance-like margin to the boundary; positive inside.
    fn boundary_margin(&self, x: &[f64]) -> Result<f64>;
}

/// `g + c + <d, x>`: same Hessian, same metric.
pub struct AffineShift<P> {
    pub inner: P,
    pub constant: f64,
    pub linear: Vec<f64>,
}

impl<P: SymplecticPotential> SymplecticPotential for AffineShift<P> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        let shift: f64 = self.linear.iter().zip(x).map(|(d, xi)| d * xi).sum();
        Ok(self.inner.value(x)? + self.constant + shift)
    }

    fn boundary_margin(&self, x: &[f64]) -> Result<f64> {
        self.inner.boundary_margin(x)
    }
}

/// Wraps a plain closure together with an explicit margin function.
pub struct FnPotential<F, M> {
    pub dim: usize,
    pub value: F,
    pub margin: M,
}

impl<F, M> SymplecticPotential for FnPotential<F, M>
where
    F: Fn(&[f64]) -> Result<f64> + Send + Sync,
    M: Fn(&[f64]) -> f64 + Send + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        (self.value)(x)
    }

    fn boundary_margin(&self, x: &[f64]) -> Result<f64> {
        Ok((self.margin)(x))
    }
}

// ---------------------------------------------------------------------------
// Radial Kähler potentials
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialLabel {
    Flat,
    FubiniStudy,
    Custom(String),
}

#[derive(Clone)]
pub struct RadialKahlerPotential {
    label: RadialLabel,
    f: JetFn,
}

impl fmt::Debug for RadialKahlerPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialKahlerPotential")
            .field("label", &self.label)
            .finish_non_exhaustive()
    }
}

/// `f`, `f'`, `f''` at one value of `s`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialDerivatives {
    pub s: f64,
    pub f: f64,
    pub f1: f64,
    pub f2: f64,
}

impl RadialDerivatives {
    /// The pair of inequalities `f' > 0`, `f'' > -f'/s`.
    pub fn is_admissible(&self) -> bool {
        self.f1 > 0.0 && self.f2 > -self.f1 / self.s
    }
}

impl RadialKahlerPotential {
    /// `f(s) = s/2`, the euclidean metric.
    pub fn flat() -> Self {
        Self {
            label: RadialLabel::Flat,
            f: Arc::new(|s: &TaylorJet| Ok(s.scale(0.5))),
        }
    }

    /// `f(s) = ½ ln(1 + s)`.
    pub fn fubini_study() -> Self {
        Self {
            label: RadialLabel::FubiniStudy,
            f: Arc::new(|s: &TaylorJet| Ok(s.add_scalar(1.0).ln()?.scale(0.5))),
        }
    }

    pub fn custom(label: impl Into<String>, f: JetFn) -> Self {
        Self {
            label: RadialLabel::Custom(label.into()),
            f,
        }
    }

    pub fn label(&self) -> &RadialLabel {
        &self.label
    }

    pub fn jet(&self, s: f64, order: usize) -> Result<TaylorJet> {
        if !(s > 0.0) {
            return Err(Error::Domain(format!("radial potentials live on s > 0, got {s}")));
        }
        (self.f)(&TaylorJet::variable(s, order))
    }

    pub fn derivatives(&self, s: f64) -> Result<RadialDerivatives> {
        let j = self.jet(s, 2)?;
        Ok(RadialDerivatives {
            s,
            f: j.value(),
            f1: j.derivative(1)?,
            f2: j.derivative(2)?,
        })
    }

    /// `γ(s) = 2 s f'(s)` and `γ'(s) = 2f' + 2 s f''`.
    pub fn gamma(&self, s: f64) -> Result<(f64, f64)> {
        let d = self.derivatives(s)?;
        Ok((2.0 * s * d.f1, 2.0 * d.f1 + 2.0 * s * d.f2))
    }
}

// ---------------------------------------------------------------------------
// t-potentials
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TPotentialLabel {
    Flat,
    FubiniStudy,
    GeneralizedBurns,
    BurnsSimanca { n: usize },
    ScalarFlatFamily { n: usize, a: f64, b: f64 },
    Custom(String),
}

impl fmt::Display for TPotentialLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Flat => write!(f, "flat"),
            Self::FubiniStudy => write!(f, "fubini_study"),
            Self::GeneralizedBurns => write!(f, "generalized_burns"),
            Self::BurnsSimanca { n } => write!(f, "burns_simanca(n={n})"),
            Self::ScalarFlatFamily { n, a, b } => write!(f, "scalar_flat(n={n},A={a},B={b})"),
            Self::Custom(s) => write!(f, "custom({s})"),
        }
    }
}

/// Open interval `(lo, hi)`; `hi` may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn contains_with_margin(&self, t: f64, margin: f64) -> bool {
        t > self.lo + margin && t < self.hi - margin
    }

    /// Smallest distance to an endpoint.
    pub fn margin(&self, t: f64) -> f64 {
        (t - self.lo).min(self.hi - t)
    }
}

#[derive(Clone)]
pub struct TPotential {
    label: TPotentialLabel,
    domain: Interval,
    f2: JetFn,
    f_value: Option<ScalarFn>,
}

impl fmt::Debug for TPotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TPotential")
            .field("label", &self.label)
            .field("domain", &self.domain)
            .field("closed_form_f", &self.f_value.is_some())
            .finish()
    }
}

impl TPotential {
    /// `F'' ≡ 0` on `(0, ∞)`, with `F(t) = -t`.
    pub fn flat() -> Self {
        Self {
            label: TPotentialLabel::Flat,
            domain: Interval::new(0.0, f64::INFINITY),
            f2: Arc::new(|t: &TaylorJet| Ok(TaylorJet::constant(0.0, t.base(), t.order()))),
            f_value: Some(Arc::new(|t| Ok(-t))),
        }
    }

    /// `F(t) = (1-t) ln(1-t)` on `(0, 1)`, so `F'' = 1/(1-t)`.
    pub fn fubini_study() -> Self {
        Self {
            label: TPotentialLabel::FubiniStudy,
            domain: Interval::new(0.0, 1.0),
            f2: Arc::new(|t: &TaylorJet| t.scale(-1.0).add_scalar(1.0).recip()),
            f_value: Some(Arc::new(|t| Ok((1.0 - t) * (1.0 - t).ln()))),
        }
    }

    /// `F(t) = (t-1) ln(t-1) - t ln t - t + 1` on `(1, ∞)`, so `F'' = 1/(t(t-1))`.
    pub fn generalized_burns() -> Self {
        Self {
            label: TPotentialLabel::GeneralizedBurns,
            domain: Interval::new(1.0, f64::INFINITY),
            f2: Arc::new(|t: &TaylorJet| (t * &t.add_scalar(-1.0)).recip()),
            f_value: Some(Arc::new(|t| {
                Ok((t - 1.0) * (t - 1.0).ln() - t * t.ln() - t + 1.0)
            })),
        }
    }

    /// A potential known only through `F''`.
    pub fn custom(label: impl Into<String>, domain: Interval, f2: JetFn) -> Self {
        Self::from_parts(TPotentialLabel::Custom(label.into()), domain, f2, None)
    }

    pub fn from_parts(
        label: TPotentialLabel,
        domain: Interval,
        f2: JetFn,
        f_value: Option<ScalarFn>,
    ) -> Self {
        Self {
            label,
            domain,
            f2,
            f_value,
        }
    }

    pub fn label(&self) -> &TPotentialLabel {
        &self.label
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn has_closed_form_f(&self) -> bool {
        self.f_value.is_some()
    }

    /// Jet of `F''` at `t`.
    pub fn f2_jet(&self, t: f64, order: usize) -> Result<TaylorJet> {
        if !self.domain.contains_with_margin(t, DOMAIN_MARGIN) {
            return Err(Error::Domain(format!(
                "t = {t} is outside ({}, {}) for {}",
                self.domain.lo, self.domain.hi, self.label
            )));
        }
        self.f2_jet_unchecked(&TaylorJet::variable(t, order))
    }

    /// Applies the evaluator to an arbitrary argument jet, skipping the domain check.
    pub fn f2_jet_unchecked(&self, t: &TaylorJet) -> Result<TaylorJet> {
        let out = (self.f2)(t)?;
        if !out.is_finite() {
            return Err(Error::SingularPoint(format!(
                "F'' of {} is not finite at t = {}",
                self.label,
                t.base()
            )));
        }
        Ok(out)
    }

    pub fn f2(&self, t: f64) -> Result<f64> {
        Ok(self.f2_jet(t, 0)?.value())
    }

    /// `F(t)`: the closed form when one is attached, otherwise a double
    /// integral of `F''` anchored where `F = F' = 0`.
    pub fn f_value(&self, t: f64) -> Result<f64> {
        match &self.f_value {
            Some(f) => {
                if !self.domain.contains_with_margin(t, DOMAIN_MARGIN) {
                    return Err(Error::Domain(format!("t = {t} outside the domain of {}", self.label)));
                }
                f(t)
            }
            None => {
                let anchor = default_anchor(self.domain);
                let f2 = |tau: f64| self.f2(tau);
                adaptive_gauss_kronrod(|tau| Ok((t - tau) * f2(tau)?), anchor, t, 1e-11)
            }
        }
    }
}

/// Anchor for reconstructing `F` away from the domain ends.
pub fn default_anchor(domain: Interval) -> f64 {
    if domain.hi.is_finite() {
        0.5 * (domain.lo + domain.hi)
    } else if domain.lo == 1.0 {
        2.0
    } else {
        domain.lo + 1.0
    }
}

/// `F(t) = ∫_anchor^t (t-τ) F''(τ) dτ` on a fixed composite Gauss–Legendre
/// rule in `σ = ln(τ - lo)`.
///
/// The node layout depends smoothly on `t`, so the result can be differenced.
/// Only meaningful for domains `(lo, ∞)` where `F''` is analytic off the left end.
pub fn smooth_t_potential(f2: JetFn, lo: f64, anchor: f64) -> ScalarFn {
    const PANELS: usize = 24;
    let rule = GaussLegendre::new(12);
    Arc::new(move |t: f64| {
        if !(t > lo) {
            return Err(Error::Domain(format!("t = {t} must exceed {lo}")));
        }
        let s0 = (anchor - lo).ln();
        let s1 = (t - lo).ln();
        let integrand = |sigma: f64| -> Result<f64> {
            let w = sigma.exp();
            let tau = lo + w;
            let v = f2(&TaylorJet::variable(tau, 0))?.value();
            Ok((t - tau) * v * w)
        };
        let width = (s1 - s0) / PANELS as f64;
        let mut acc = 0.0;
        for k in 0..PANELS {
            let a = s0 + width * k as f64;
            acc += rule.integrate(&integrand, a, a + width)?;
        }
        Ok(acc)
    })
}

/// Result of a sampled admissibility sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Admissibility {
    pub passed: bool,
    /// First sampled `t` with `F''(t) + 1/t ≤ 0`.
    pub witness: Option<f64>,
    pub min_margin: f64,
    pub samples: usize,
}

/// Checks `F''(t) > -1/t` at `samples` evenly spaced points of `[lo, hi]`.
pub fn admissibility(pot: &TPotential, t_range: (f64, f64), samples: usize) -> Result<Admissibility> {
    let (lo, hi) = t_range;
    let samples = samples.max(1);
    let mut min_margin = f64::INFINITY;
    let mut witness = None;
    for i in 0..samples {
        let t = if samples == 1 {
            lo
        } else {
            lo + (hi - lo) * i as f64 / (samples - 1) as f64
        };
        let v = pot.f2(t)? + 1.0 / t;
        min_margin = min_margin.min(v);
        if !(v > 0.0) && witness.is_none() {
            witness = Some(t);
        }
    }
    Ok(Admissibility {
        passed: witness.is_none(),
        witness,
        min_margin,
        samples,
    })
}

/// The t-potential data produced from a radial Kähler potential at one `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TPotentialPoint {
    pub t: f64,
    pub s: f64,
    pub f_value: f64,
    pub f2: f64,
}

fn gamma_checked(f: &RadialKahlerPotential, s: f64) -> Result<(f64, f64)> {
    let (g, dg) = f.gamma(s)?;
    if !g.is_finite() || !dg.is_finite() {
        return Err(Error::Range(format!("γ is not finite at s = {s}")));
    }
    if !(dg > 0.0) {
        return Err(Error::NonAdmissible(format!(
            "γ(s) = 2 s f'(s) is not increasing at s = {s} (γ' = {dg})"
        )));
    }
    Ok((g, dg))
}

/// Inverts `t = 2 s f'(s)` and evaluates `F(t) = t ln(s/t) - 2f(s)` and
/// `F''(t) = 1/(s γ'(s)) - 1/t`.
pub fn kahler_to_t_potential(f: &RadialKahlerPotential, t: f64) -> Result<TPotentialPoint> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("t must be positive, got {t}")));
    }
    const MAX_DOUBLINGS: usize = 200;
    let (g0, _) = gamma_checked(f, t)?;
    let (mut lo, mut hi) = (t, t);
    if g0 < t {
        let mut found = false;
        let mut g_prev = g0;
        for _ in 0..MAX_DOUBLINGS {
            lo = hi;
            hi *= 2.0;
            // Past saturation γ' rounds to zero; t is then out of reach.
            let g = match gamma_checked(f, hi) {
                Ok((g, _)) => g,
                Err(Error::NonAdmissible(_)) => break,
                Err(e) => return Err(e),
            };
            if g >= t {
                found = true;
                break;
            }
            if g <= g_prev {
                break;
            }
            g_prev = g;
        }
        if !found {
            return Err(Error::Range(format!("γ(s) never reaches t = {t}")));
        }
    } else if g0 > t {
        let mut found = false;
        for _ in 0..MAX_DOUBLINGS {
            hi = lo;
            lo *= 0.5;
            if gamma_checked(f, lo)?.0 <= t {
                found = true;
                break;
            }
        }
        if !found {
            return Err(Error::Range(format!("γ(s) stays above t = {t}")));
        }
    }

    let mut s = 0.5 * (lo + hi);
    if lo != hi {
        while hi - lo > 1e-13 * hi {
            s = 0.5 * (lo + hi);
            let (g, _) = gamma_checked(f, s)?;
            if g < t {
                lo = s;
            } else {
                hi = s;
            }
        }
        s = 0.5 * (lo + hi);
        for _ in 0..3 {
            let (g, dg) = gamma_checked(f, s)?;
            let next = s - (g - t) / dg;
            if next.is_finite() && next > 0.0 {
                s = next;
            }
        }
    }
    let d = f.derivatives(s)?;
    let dg = 2.0 * d.f1 + 2.0 * s * d.f2;
    Ok(TPotentialPoint {
        t,
        s,
        f_value: t * (s / t).ln() - 2.0 * d.f,
        f2: 1.0 / (s * dg) - 1.0 / t,
    })
}

/// `h_{i j̄} = f' δ_ij + z_i z̄_j f''` with its eigenvalue structure.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMetric {
    pub matrix: DMatrix<Complex64>,
    pub derivatives: RadialDerivatives,
    /// `f'` repeated `n-1` times, then `f' + s f''`.
    pub eigenvalues: Vec<f64>,
    pub positive_definite: bool,
}

pub fn hermitian_metric(f: &RadialKahlerPotential, z: &[Complex64]) -> Result<HermitianMetric> {
    let n = z.len();
    if n == 0 {
        return Err(Error::InvalidDimension(0));
    }
    let s: f64 = z.iter().map(|zi| zi.norm_sqr()).sum();
    if s == 0.0 {
        return Err(Error::OriginExcluded);
    }
    let d = f.derivatives(s)?;
    let matrix = DMatrix::from_fn(n, n, |i, j| {
        let diag = if i == j { d.f1 } else { 0.0 };
        Complex64::new(diag, 0.0) + z[i] * z[j].conj() * d.f2
    });
    let mut eigenvalues = vec![d.f1; n - 1];
    eigenvalues.push(d.f1 + s * d.f2);
    let positive_definite = eigenvalues.iter().all(|&e| e > 0.0);
    Ok(HermitianMetric {
        matrix,
        derivatives: d,
        eigenvalues,
        positive_definite,
    })
}

/// `g(x) = ½(Σ x_i ln x_i + F(t))` as a field on the orthant.
#[derive(Debug, Clone)]
pub struct TFamilyPotential {
    pub potential: TPotential,
    pub n: usize,
}

impl SymplecticPotential for TFamilyPotential {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        symplectic_potential(&self.potential, x)
    }

    fn boundary_margin(&self, x: &[f64]) -> Result<f64> {
        let t: f64 = x.iter().sum();
        let min_x = x.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(min_x.min(self.potential.domain().margin(t)))
    }
}

pub fn symplectic_potential(pot: &TPotential, x: &[f64]) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::InvalidDimension(0));
    }
    let min_x = x.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min_x >= NEAR_BOUNDARY_CUTOFF) {
        return Err(Error::NearBoundary {
            value: min_x,
            cutoff: NEAR_BOUNDARY_CUTOFF,
        });
    }
    let t: f64 = x.iter().sum();
    let entropy: f64 = x.iter().map(|&xi| xi * xi.ln()).sum();
    Ok(0.5 * (entropy + pot.f_value(t)?))
}
