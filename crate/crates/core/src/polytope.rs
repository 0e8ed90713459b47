//! Moment polytopes given by facet inequalities `l_i(x) = <x, u_i> - λ_i ≥ 0`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::potentials::SymplecticPotential;

/// Facet values below this are treated as on the boundary by every operation
/// that takes a logarithm of them.
pub const NEAR_BOUNDARY_CUTOFF: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffineFunctional {
    pub normal: Vec<i64>,
    pub offset: f64,
}

impl AffineFunctional {
    pub fn new(normal: Vec<i64>, offset: f64) -> Result<Self> {
        if normal.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        if normal.iter().all(|&u| u == 0) {
            return Err(Error::Domain("facet normal must be nonzero".into()));
        }
        Ok(Self { normal, offset })
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let pairing: f64 = x.iter().zip(&self.normal).map(|(xi, &ui)| xi * ui as f64).sum();
        pairing - self.offset
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PolytopeKind {
    Orthant,
    Simplex,
    Blowup,
    Custom,
}

impl std::str::FromStr for PolytopeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "orthant" => Ok(Self::Orthant),
            "simplex" => Ok(Self::Simplex),
            "blowup" => Ok(Self::Blowup),
            "custom" => Ok(Self::Custom),
            other => Err(Error::Domain(format!("unknown polytope kind '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DelzantPolytope {
    dim: usize,
    facets: Vec<AffineFunctional>,
    kind: PolytopeKind,
}

impl DelzantPolytope {
    /// One of the built-in polytopes. `Custom` is rejected here; use [`DelzantPolytope::custom`].
    pub fn build_standard(kind: PolytopeKind, n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidDimension(n));
        }
        let coordinate = |i: usize| {
            let mut u = vec![0; n];
            u[i] = 1;
            AffineFunctional { normal: u, offset: 0.0 }
        };
        let mut facets: Vec<_> = (0..n).map(coordinate).collect();
        match kind {
            PolytopeKind::Orthant => {}
            PolytopeKind::Simplex => facets.push(AffineFunctional {
                normal: vec![-1; n],
                offset: -1.0,
            }),
            PolytopeKind::Blowup => facets.push(AffineFunctional {
                normal: vec![1; n],
                offset: 1.0,
            }),
            PolytopeKind::Custom => {
                return Err(Error::Domain(
                    "custom polytopes are built from explicit facets".into(),
                ))
            }
        }
        Ok(Self { dim: n, facets, kind })
    }

    /// A polytope from explicit facets. Integrality is not checked.
    pub fn custom(facets: Vec<AffineFunctional>) -> Result<Self> {
        let dim = facets.first().map(|f| f.dim()).ok_or(Error::InvalidDimension(0))?;
        if let Some(bad) = facets.iter().find(|f| f.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.dim(),
            });
        }
        Ok(Self {
            dim,
            facets,
            kind: PolytopeKind::Custom,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> PolytopeKind {
        self.kind
    }

    pub fn facets(&self) -> &[AffineFunctional] {
        &self.facets
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn facet_values(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        Ok(self.facets.iter().map(|f| f.eval(x)).collect())
    }

    pub fn is_interior(&self, x: &[f64]) -> Result<bool> {
        Ok(self.facet_values(x)?.iter().all(|&l| l > 0.0))
    }

    pub fn min_facet_value(&self, x: &[f64]) -> Result<f64> {
        Ok(self
            .facet_values(x)?
            .into_iter()
            .fold(f64::INFINITY, f64::min))
    }

    /// `½ Σ l_i ln l_i`.
    pub fn canonical_potential(&self, x: &[f64]) -> Result<f64> {
        let values = self.facet_values(x)?;
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        if !(min >= NEAR_BOUNDARY_CUTOFF) {
            return Err(Error::NearBoundary {
                value: min,
                cutoff: NEAR_BOUNDARY_CUTOFF,
            });
        }
        Ok(0.5 * values.iter().map(|&l| l * l.ln()).sum::<f64>())
    }
}

/// The canonical potential of a polytope as a field over its interior.
#[derive(Debug, Clone)]
pub struct CanonicalPotential {
    pub polytope: DelzantPolytope,
}

impl SymplecticPotential for CanonicalPotential {
    fn dim(&self) -> usize {
        self.polytope.dim()
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        self.polytope.canonical_potential(x)
    }

    fn boundary_margin(&self, x: &[f64]) -> Result<f64> {
        self.polytope.min_facet_value(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn build_standard_examples() {
        let b = DelzantPolytope::build_standard(PolytopeKind::Blowup, 2).unwrap();
        assert_eq!(b.facets().len(), 3);
        assert_eq!(b.facets()[0].normal, vec![1, 0]);
        assert_eq!(b.facets()[1].normal, vec![0, 1]);
        assert_eq!(b.facets()[2], AffineFunctional { normal: vec![1, 1], offset: 1.0 });

        let o = DelzantPolytope::build_standard(PolytopeKind::Orthant, 1).unwrap();
        assert_eq!(o.facets(), &[AffineFunctional { normal: vec![1], offset: 0.0 }]);

        let s = DelzantPolytope::build_standard(PolytopeKind::Simplex, 2).unwrap();
        assert_eq!(s.facet_values(&[0.2, 0.3]).unwrap(), vec![0.2, 0.3, 0.5]);

        assert_eq!(
            DelzantPolytope::build_standard(PolytopeKind::Orthant, 0),
            Err(Error::InvalidDimension(0))
        );
    }

    #[test]
    fn facet_value_examples() {
        let b = DelzantPolytope::build_standard(PolytopeKind::Blowup, 2).unwrap();
        assert_eq!(b.facet_values(&[1.0, 1.0]).unwrap(), vec![1.0, 1.0, 1.0]);
        let s = DelzantPolytope::build_standard(PolytopeKind::Simplex, 2).unwrap();
        assert_eq!(s.facet_values(&[0.5, 0.5]).unwrap(), vec![0.5, 0.5, 0.0]);
        assert!(!s.is_interior(&[0.5, 0.5]).unwrap());
        let o = DelzantPolytope::build_standard(PolytopeKind::Orthant, 3).unwrap();
        assert_eq!(o.facet_values(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        assert_eq!(
            o.facet_values(&[1.0, 2.0]),
            Err(Error::DimensionMismatch { expected: 3, got: 2 })
        );
    }

    #[test]
    fn canonical_potential_examples() {
        let o = DelzantPolytope::build_standard(PolytopeKind::Orthant, 2).unwrap();
        assert_eq!(o.canonical_potential(&[1.0, 1.0]).unwrap(), 0.0);
        let s = DelzantPolytope::build_standard(PolytopeKind::Simplex, 1).unwrap();
        let v = s.canonical_potential(&[0.5]).unwrap();
        assert!((v - 0.5 * 0.5f64.ln()).abs() < 1e-15);
        assert!((v + 0.346574).abs() < 1e-6);
        let b = DelzantPolytope::build_standard(PolytopeKind::Blowup, 2).unwrap();
        assert_eq!(b.canonical_potential(&[1.0, 1.0]).unwrap(), 0.0);
        assert!(matches!(
            b.canonical_potential(&[0.5, 0.5]),
            Err(Error::NearBoundary { .. })
        ));
        assert!(matches!(
            o.canonical_potential(&[1.0, 1e-13]),
            Err(Error::NearBoundary { .. })
        ));
    }

    #[test]
    fn custom_polytope_validation() {
        assert!(AffineFunctional::new(vec![0, 0], 1.0).is_err());
        let f1 = AffineFunctional::new(vec![1, 0], 0.0).unwrap();
        let f2 = AffineFunctional::new(vec![0, 1, 0], 0.0).unwrap();
        assert!(matches!(
            DelzantPolytope::custom(vec![f1.clone(), f2]),
            Err(Error::DimensionMismatch { .. })
        ));
        let p = DelzantPolytope::custom(vec![f1]).unwrap();
        assert_eq!(p.kind(), PolytopeKind::Custom);
    }

    proptest! {
        #[test]
        fn blowup_last_facet_is_sum_minus_one(x in prop::collection::vec(0.0f64..5.0, 1..6)) {
            let b = DelzantPolytope::build_standard(PolytopeKind::Blowup, x.len()).unwrap();
            let v = b.facet_values(&x).unwrap();
            let n = x.len();
            let sum: f64 = v[..n].iter().sum();
            prop_assert!((v[n] - (sum - 1.0)).abs() < 1e-12);
        }

        #[test]
        fn facet_values_are_affine(
            x in prop::collection::vec(0.0f64..3.0, 3),
            y in prop::collection::vec(0.0f64..3.0, 3),
            alpha in 0.0f64..1.0,
        ) {
            let s = DelzantPolytope::build_standard(PolytopeKind::Simplex, 3).unwrap();
            let mix: Vec<f64> = x.iter().zip(&y).map(|(a, b)| alpha * a + (1.0 - alpha) * b).collect();
            let lhs = s.facet_values(&mix).unwrap();
            let vx = s.facet_values(&x).unwrap();
            let vy = s.facet_values(&y).unwrap();
            for i in 0..lhs.len() {
                prop_assert!((lhs[i] - (alpha * vx[i] + (1.0 - alpha) * vy[i])).abs() < 1e-12);
            }
        }

        #[test]
        fn canonical_potential_is_midpoint_convex(
            x in prop::collection::vec(0.05f64..0.3, 2),
            y in prop::collection::vec(0.05f64..0.3, 2),
        ) {
            let s = DelzantPolytope::build_standard(PolytopeKind::Simplex, 2).unwrap();
            let mid: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 0.5 * (a + b)).collect();
            let gm = s.canonical_potential(&mid).unwrap();
            let avg = 0.5 * (s.canonical_potential(&x).unwrap() + s.canonical_potential(&y).unwrap());
            prop_assert!(gm <= avg + 1e-14);
        }
    }
}
