//! Truncated univariate Taylor series.
//!
//! A [`TaylorJet`] stores `c_0..c_K` with `c_k = f^(k)(base) / k!`. Products are
//! plain Cauchy products, so no factorials appear until [`TaylorJet::derivative`]
//! is called.

use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// Order used when callers do not ask for a specific one.
pub const DEFAULT_ORDER: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LiftKind {
    Constant,
    Variable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaylorJet {
    base: f64,
    coeffs: Vec<f64>,
}

impl TaylorJet {
    /// Builds a jet from raw Taylor coefficients.
    ///
    /// Panics if `coeffs` is empty.
    pub fn from_coeffs(base: f64, coeffs: Vec<f64>) -> Self {
        assert!(!coeffs.is_empty(), "a jet needs at least the constant term");
        Self { base, coeffs }
    }

    pub fn constant(value: f64, base: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        Self { base, coeffs }
    }

    /// The identity function expanded at `base`.
    pub fn variable(base: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = base;
        if order >= 1 {
            coeffs[1] = 1.0;
        }
        Self { base, coeffs }
    }

    pub fn lift(value: f64, kind: LiftKind, base: f64, order: usize) -> Self {
        match kind {
            LiftKind::Constant => Self::constant(value, base, order),
            LiftKind::Variable => Self::variable(base, order),
        }
    }

    pub fn base(&self) -> f64 {
        self.base
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Value of the represented function at the base point.
    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// `k!·c_k`.
    pub fn derivative(&self, k: usize) -> Result<f64> {
        if k > self.order() {
            return Err(Error::InsufficientOrder {
                k,
                order: self.order(),
            });
        }
        let factorial: f64 = (1..=k).map(|i| i as f64).product();
        Ok(factorial * self.coeffs[k])
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.order() != other.order() {
            return Err(Error::JetMismatch(format!(
                "orders {} and {}",
                self.order(),
                other.order()
            )));
        }
        if self.base != other.base {
            return Err(Error::JetMismatch(format!(
                "base points {} and {}",
                self.base, other.base
            )));
        }
        Ok(())
    }

    pub fn arith(&self, other: &Self, op: ArithOp) -> Result<Self> {
        self.check_compatible(other)?;
        let coeffs = match op {
            ArithOp::Add => zip_with(&self.coeffs, &other.coeffs, |a, b| a + b),
            ArithOp::Sub => zip_with(&self.coeffs, &other.coeffs, |a, b| a - b),
            ArithOp::Mul => cauchy_product(&self.coeffs, &other.coeffs),
            ArithOp::Div => series_quotient(&self.coeffs, &other.coeffs)?,
        };
        Ok(Self {
            base: self.base,
            coeffs,
        })
    }

    pub fn checked_div(&self, other: &Self) -> Result<Self> {
        self.arith(other, ArithOp::Div)
    }

    pub fn recip(&self) -> Result<Self> {
        Self::constant(1.0, self.base, self.order()).checked_div(self)
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self {
            base: self.base,
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn add_scalar(&self, value: f64) -> Self {
        let mut out = self.clone();
        out.coeffs[0] += value;
        out
    }

    /// Integer power by repeated squaring; negative exponents go through [`recip`](Self::recip).
    pub fn powi(&self, exp: i32) -> Result<Self> {
        let mut result = Self::constant(1.0, self.base, self.order());
        let mut square = if exp < 0 { self.recip()? } else { self.clone() };
        let mut e = exp.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &square;
            }
            e >>= 1;
            if e > 0 {
                square = &square * &square;
            }
        }
        Ok(result)
    }

    /// Natural logarithm, integrating `a'/a` term by term.
    pub fn ln(&self) -> Result<Self> {
        let a = &self.coeffs;
        if !(a[0] > 0.0) {
            return Err(Error::Domain(format!(
                "logarithm of a jet with constant term {}",
                a[0]
            )));
        }
        let k_max = self.order();
        let mut l = vec![0.0; k_max + 1];
        l[0] = a[0].ln();
        for k in 1..=k_max {
            let mut acc = 0.0;
            for j in 1..k {
                acc += j as f64 * l[j] * a[k - j];
            }
            l[k] = (a[k] - acc / k as f64) / a[0];
        }
        Ok(Self {
            base: self.base,
            coeffs: l,
        })
    }

    pub fn exp(&self) -> Self {
        let a = &self.coeffs;
        let k_max = self.order();
        let mut e = vec![0.0; k_max + 1];
        e[0] = a[0].exp();
        for k in 1..=k_max {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * a[j] * e[k - j];
            }
            e[k] = acc / k as f64;
        }
        Self {
            base: self.base,
            coeffs: e,
        }
    }

    /// Square root; the constant term must be positive.
    pub fn sqrt(&self) -> Result<Self> {
        let a = &self.coeffs;
        if !(a[0] > 0.0) {
            return Err(Error::Domain(format!(
                "square root of a jet with constant term {}",
                a[0]
            )));
        }
        let k_max = self.order();
        let mut r = vec![0.0; k_max + 1];
        r[0] = a[0].sqrt();
        for k in 1..=k_max {
            let mut acc = 0.0;
            for j in 1..k {
                acc += r[j] * r[k - j];
            }
            r[k] = (a[k] - acc) / (2.0 * r[0]);
        }
        Ok(Self {
            base: self.base,
            coeffs: r,
        })
    }
}

fn zip_with(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect()
}

fn cauchy_product(a: &[f64], b: &[f64]) -> Vec<f64> {
    (0..a.len())
        .map(|k| (0..=k).map(|j| a[j] * b[k - j]).sum())
        .collect()
}

fn series_quotient(a: &[f64], b: &[f64]) -> Result<Vec<f64>> {
    if b[0] == 0.0 {
        return Err(Error::SingularPoint(
            "division by a jet with zero constant term".into(),
        ));
    }
    let mut q = vec![0.0; a.len()];
    for k in 0..a.len() {
        let mut acc = a[k];
        for j in 1..=k {
            acc -= b[j] * q[k - j];
        }
        q[k] = acc / b[0];
    }
    Ok(q)
}

// Operator forms panic on incompatible operands; use `arith` where that is not
// guaranteed by construction.
impl Add for &TaylorJet {
    type Output = TaylorJet;
    fn add(self, rhs: Self) -> TaylorJet {
        self.arith(rhs, ArithOp::Add).expect("incompatible jets")
    }
}

impl Sub for &TaylorJet {
    type Output = TaylorJet;
    fn sub(self, rhs: Self) -> TaylorJet {
        self.arith(rhs, ArithOp::Sub).expect("incompatible jets")
    }
}

impl Mul for &TaylorJet {
    type Output = TaylorJet;
    fn mul(self, rhs: Self) -> TaylorJet {
        self.arith(rhs, ArithOp::Mul).expect("incompatible jets")
    }
}

impl Neg for &TaylorJet {
    type Output = TaylorJet;
    fn neg(self) -> TaylorJet {
        self.scale(-1.0)
    }
}
