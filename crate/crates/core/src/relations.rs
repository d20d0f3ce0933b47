//! Exact integer models of the cohomology rings of `S²`, `S² × S²` and
//! `ℂPᵐ`, and the constraints they place on eigenbundle Chern classes: the
//! vanishing of the elementary symmetric polynomials of `c₁(V₁), …, c₁(Vₙ)`
//! in positive degree.

use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RingModel {
    /// `H² = ℤα`, `α² = 0`.
    Sphere,
    /// `H² = ℤᾱ ⊕ ℤβ̄`, `ᾱ² = β̄² = 0`, `H⁴ = ℤ·ᾱβ̄`.
    ProductOfSpheres,
    /// `ℤ[α]/α^{m+1}`.
    ProjectiveSpace(u32),
}

impl RingModel {
    /// Rank of the free group `H^degree`.
    pub fn rank(&self, degree: u32) -> usize {
        match (self, degree) {
            (_, 0) => 1,
            (RingModel::Sphere, 2) => 1,
            (RingModel::Sphere, _) => 0,
            (RingModel::ProductOfSpheres, 2) => 2,
            (RingModel::ProductOfSpheres, 4) => 1,
            (RingModel::ProductOfSpheres, _) => 0,
            (RingModel::ProjectiveSpace(m), d) => usize::from(d % 2 == 0 && d / 2 <= *m),
        }
    }
}

/// An element of `H^degree` written in the model's basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RingClass {
    pub model: RingModel,
    pub degree: u32,
    pub coeffs: Vec<i64>,
}

impl RingClass {
    pub fn new(model: RingModel, degree: u32, coeffs: Vec<i64>) -> Result<Self> {
        if degree != 2 && degree != 4 {
            return Err(Error::Degree { degree });
        }
        if coeffs.len() != model.rank(degree) {
            return Err(Error::Dimension { expected: model.rank(degree), found: coeffs.len() });
        }
        Ok(Self { model, degree, coeffs })
    }

    pub fn zero(model: RingModel, degree: u32) -> Self {
        Self { model, degree, coeffs: alloc::vec![0; model.rank(degree)] }
    }

    /// `kα` on the sphere or projective space.
    pub fn alpha(model: RingModel, k: i64) -> Self {
        Self { model, degree: 2, coeffs: alloc::vec![k] }
    }

    /// `kᾱ + ℓβ̄` on `S² × S²`.
    pub fn product(k: i64, l: i64) -> Self {
        Self { model: RingModel::ProductOfSpheres, degree: 2, coeffs: alloc::vec![k, l] }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.model != other.model {
            return Err(Error::MixedRingModels);
        }
        if self.degree != other.degree {
            return Err(Error::Degree { degree: other.degree });
        }
        Ok(Self { model: self.model, degree: self.degree, coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a + b).collect() })
    }

    /// Cup product of two degree-2 classes.
    pub fn cup(&self, other: &Self) -> Result<Self> {
        if self.model != other.model {
            return Err(Error::MixedRingModels);
        }
        if self.degree != 2 || other.degree != 2 {
            return Err(Error::Degree { degree: self.degree.max(other.degree) });
        }
        let coeffs = match self.model {
            RingModel::Sphere => Vec::new(),
            RingModel::ProductOfSpheres => {
                let (k1, l1, k2, l2) = (self.coeffs[0], self.coeffs[1], other.coeffs[0], other.coeffs[1]);
                alloc::vec![k1 * l2 + k2 * l1]
            }
            RingModel::ProjectiveSpace(m) if m >= 2 => alloc::vec![self.coeffs[0] * other.coeffs[0]],
            RingModel::ProjectiveSpace(_) => Vec::new(),
        };
        Ok(Self { model: self.model, degree: 4, coeffs })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricPolyCheck {
    pub s1: RingClass,
    pub s2: RingClass,
    pub s1_vanishes: bool,
    pub s2_vanishes: bool,
}

impl SymmetricPolyCheck {
    /// `s_k` for `k ≥ 3` lands in degree ≥ 6, which is zero in every model here
    /// of real dimension ≤ 4; for `ℂPᵐ` with `m ≥ 3` they are not checked.
    pub fn passed(&self) -> bool {
        self.s1_vanishes && self.s2_vanishes
    }
}

/// `s₁ = Σ xᵢ` and `s₂ = Σ_{i<j} xᵢ ∪ xⱼ` by exact integer arithmetic.
pub fn symmetric_poly_check(classes: &[RingClass]) -> Result<SymmetricPolyCheck> {
    let model = classes.first().map(|c| c.model).ok_or(Error::TooFewBands { min: 1, found: 0 })?;
    if classes.iter().any(|c| c.model != model) {
        return Err(Error::MixedRingModels);
    }
    if let Some(bad) = classes.iter().find(|c| c.degree != 2) {
        return Err(Error::Degree { degree: bad.degree });
    }
    let mut s1 = RingClass::zero(model, 2);
    for c in classes {
        s1 = s1.add(c)?;
    }
    let mut s2 = RingClass::zero(model, 4);
    for i in 0..classes.len() {
        for j in i + 1..classes.len() {
            s2 = s2.add(&classes[i].cup(&classes[j])?)?;
        }
    }
    Ok(SymmetricPolyCheck { s1_vanishes: s1.is_zero(), s2_vanishes: s2.is_zero(), s1, s2 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StarCheck {
    pub holds: bool,
    /// `k₁(2ℓ₁ + ℓ₂) + k₂(ℓ₁ + 2ℓ₂)`
    pub lhs: i64,
}

/// The degree-4 constraint for `n = 3` over `S² × S²` with
/// `c₁(Vᵢ) = kᵢᾱ + ℓᵢβ̄` and `k₃ = −k₁ − k₂`, `ℓ₃ = −ℓ₁ − ℓ₂`.
pub fn star_check(k1: i64, k2: i64, l1: i64, l2: i64) -> StarCheck {
    let (k3, l3) = (-k1 - k2, -l1 - l2);
    let six_term = k1 * l2 + k2 * l1 + k1 * l3 + k3 * l1 + k2 * l3 + k3 * l2;
    let lhs = k1 * (2 * l1 + l2) + k2 * (l1 + 2 * l2);
    assert_eq!(six_term, -lhs, "reduced form must equal the expanded form");
    StarCheck { holds: lhs == 0, lhs }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpVerdict {
    /// Only the zero tuple survives: every such field is diagonalizable.
    Feasible,
    /// The tuple violates `s₁ = 0` or `Σ kᵢ² = 0`.
    Infeasible { sum: i64, sum_of_squares: i64 },
    /// `m = 1`: `α² = 0`, so a nonzero tuple with `Σ kᵢ = 0` is not excluded.
    NotExcluded,
}

/// Over `ℂPᵐ` with `c₁(Vᵢ) = kᵢα`: `s₁ = 0` forces `Σ kᵢ = 0`, and then
/// `0 = s₁² − 2s₂ = (Σ kᵢ²) α²`, which for `m ≥ 2` forces every `kᵢ = 0`.
pub fn cp_forced_diagonalizable(m: u32, coeffs: &[i64]) -> Result<CpVerdict> {
    if m == 0 {
        return Err(Error::Other(alloc::string::String::from("projective space dimension must be at least 1")));
    }
    let sum: i64 = coeffs.iter().sum();
    let sum_of_squares: i64 = coeffs.iter().map(|k| k * k).sum();
    if sum != 0 {
        return Ok(CpVerdict::Infeasible { sum, sum_of_squares });
    }
    if m == 1 {
        return Ok(if sum_of_squares == 0 { CpVerdict::Feasible } else { CpVerdict::NotExcluded });
    }
    Ok(if sum_of_squares == 0 { CpVerdict::Feasible } else { CpVerdict::Infeasible { sum, sum_of_squares } })
}

/// Classes `kᾱ + ℓβ̄` with `|k|, |ℓ| ≤ bound` and `kℓ = 0`: the possible
/// obstructions `c₁(V₁)` of a two-band field over `S² × S²`. Sorted by `(k, ℓ)`.
pub fn enumerate_admissible_n2(bound: u32) -> Vec<(i64, i64)> {
    let b = i64::from(bound);
    let mut out = Vec::with_capacity(4 * bound as usize + 1);
    for k in -b..=b {
        for l in -b..=b {
            if k * l == 0 {
                out.push((k, l));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_pair_passes() {
        let r = symmetric_poly_check(&[RingClass::alpha(RingModel::Sphere, 1), RingClass::alpha(RingModel::Sphere, -1)]).unwrap();
        assert!(r.passed());
        assert!(r.s2.coeffs.is_empty());
    }

    #[test]
    fn product_pure_pair_passes() {
        for k in -3..=3 {
            let r = symmetric_poly_check(&[RingClass::product(k, 0), RingClass::product(-k, 0)]).unwrap();
            assert!(r.passed());
        }
    }

    #[test]
    fn mixed_triple_fails_in_degree_four() {
        let r = symmetric_poly_check(&[RingClass::product(1, 0), RingClass::product(0, 1), RingClass::product(-1, -1)]).unwrap();
        assert!(r.s1_vanishes);
        assert!(!r.s2_vanishes);
        assert_eq!(r.s2.coeffs, alloc::vec![-1]);
    }

    #[test]
    fn mixed_models_rejected() {
        let r = symmetric_poly_check(&[RingClass::alpha(RingModel::Sphere, 1), RingClass::product(-1, 0)]);
        assert_eq!(r.unwrap_err(), Error::MixedRingModels);
    }

    #[test]
    fn ring_class_validation() {
        assert!(RingClass::new(RingModel::ProductOfSpheres, 2, alloc::vec![1]).is_err());
        assert!(RingClass::new(RingModel::Sphere, 3, alloc::vec![1]).is_err());
        assert!(RingClass::new(RingModel::ProductOfSpheres, 4, alloc::vec![2]).is_ok());
    }

    #[test]
    fn star_examples() {
        assert_eq!(star_check(1, 1, 1, -1), StarCheck { holds: true, lhs: 0 });
        assert_eq!(star_check(1, 0, 1, 0), StarCheck { holds: false, lhs: 2 });
        assert!(star_check(0, 0, 0, 0).holds);
    }

    #[test]
    fn cp_examples() {
        assert!(matches!(cp_forced_diagonalizable(2, &[1, -1]).unwrap(), CpVerdict::Infeasible { sum_of_squares: 2, .. }));
        assert_eq!(cp_forced_diagonalizable(2, &[0, 0, 0]).unwrap(), CpVerdict::Feasible);
        assert_eq!(cp_forced_diagonalizable(1, &[1, -1]).unwrap(), CpVerdict::NotExcluded);
        assert!(matches!(cp_forced_diagonalizable(1, &[1, 1]).unwrap(), CpVerdict::Infeasible { sum: 2, .. }));
    }

    #[test]
    fn enumeration_counts() {
        assert_eq!(enumerate_admissible_n2(0), alloc::vec![(0, 0)]);
        let one = enumerate_admissible_n2(1);
        assert_eq!(one.len(), 5);
        for p in [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)] {
            assert!(one.contains(&p));
        }
        assert_eq!(enumerate_admissible_n2(3).len(), 13);
    }
}
