//! Matrix-valued fields `A: X → M(n, ℂ)` and their pointwise validation:
//! normality, eigenvalue gaps, and characteristic polynomials.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{CycleBasis, Point, SphereGrid};
use crate::linalg::{self, CMatrix};
use crate::spectral;

pub const DEFAULT_NORMAL_TOL: f64 = 1e-9;
pub const DEFAULT_GAP_TOL: f64 = 1e-6;

type EvalFn = dyn Fn(&Point) -> Result<CMatrix> + Send + Sync;

/// A deterministic map from domain points to `n × n` complex matrices.
#[derive(Clone)]
pub struct MatrixField {
    dim: usize,
    label: String,
    eval: Arc<EvalFn>,
}

impl core::fmt::Debug for MatrixField {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("MatrixField").field("dim", &self.dim).field("label", &self.label).finish()
    }
}

impl MatrixField {
    pub fn new<F>(dim: usize, label: impl Into<String>, eval: F) -> Self
    where
        F: Fn(&Point) -> Result<CMatrix> + Send + Sync + 'static,
    {
        Self { dim, label: label.into(), eval: Arc::new(eval) }
    }

    /// A field over a sphere grid that is constant on each node's cell:
    /// evaluation at any point returns the sample of the nearest node.
    pub fn sampled(grid: SphereGrid, samples: Vec<CMatrix>, label: impl Into<String>) -> Result<Self> {
        if samples.len() != grid.node_count() {
            return Err(Error::Dimension { expected: grid.node_count(), found: samples.len() });
        }
        let dim = samples.first().map(|m| m.nrows()).unwrap_or(0);
        if let Some(bad) = samples.iter().find(|m| m.nrows() != dim || m.ncols() != dim) {
            return Err(Error::Dimension { expected: dim, found: bad.nrows() });
        }
        let samples = Arc::new(samples);
        Ok(Self::new(dim, label, move |p| match p {
            Point::Sphere(q) => Ok(samples[grid.nearest_node(q)].clone()),
            Point::Product(..) => Err(Error::DomainMismatch { expected: "sphere" }),
        }))
    }

    /// The constant field `m`, defined on every domain.
    pub fn constant(m: CMatrix, label: impl Into<String>) -> Self {
        Self::new(m.nrows(), label, move |_| Ok(m.clone()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, p: &Point) -> Result<CMatrix> {
        let m = (self.eval)(p)?;
        if m.nrows() != self.dim || m.ncols() != self.dim {
            return Err(Error::Dimension { expected: self.dim, found: m.nrows() });
        }
        Ok(m)
    }

    /// `(f*A)(y) = A(f(y))`.
    pub fn pullback<F>(&self, map: F, label: impl Into<String>) -> Self
    where
        F: Fn(&Point) -> Result<Point> + Send + Sync + 'static,
    {
        let inner = self.clone();
        Self::new(self.dim, label, move |p| inner.eval(&map(p)?))
    }

    /// `U* A U` for a fixed unitary `U`.
    pub fn conjugated(&self, u: &CMatrix) -> Self {
        let inner = self.clone();
        let u = u.clone();
        let ua = u.adjoint();
        Self::new(self.dim, alloc::format!("{}^U", self.label), move |p| Ok(&ua * inner.eval(p)? * &u))
    }

    /// Sample the field at every node of every cycle, rejecting non-finite
    /// entries with the offending node.
    pub fn sample_cycles(&self, basis: &CycleBasis) -> Result<Vec<Vec<CMatrix>>> {
        basis
            .cycles()
            .iter()
            .map(|cyc| {
                (0..cyc.grid.node_count())
                    .map(|i| {
                        let m = self.eval(&cyc.point(i)).map_err(|e| e.at_node(i))?;
                        if !linalg::is_finite(&m) {
                            return Err(Error::NonFinite { node: i });
                        }
                        Ok(m)
                    })
                    .collect()
            })
            .collect()
    }
}

/// Relative commutator residual `‖AA* − A*A‖_F / (1 + ‖A‖_F²)`.
pub fn normality_residual(m: &CMatrix) -> f64 {
    let ma = m.adjoint();
    let comm = m * &ma - &ma * m;
    let nf = linalg::frob(m);
    linalg::frob(&comm) / (1.0 + nf * nf)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalityReport {
    pub residual: f64,
    pub tol: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapReport {
    pub min_gap: f64,
    pub tol: f64,
    pub multiplicity_free: bool,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidationReport {
    pub normality: NormalityReport,
    pub gap: GapReport,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.normality.passed && self.gap.multiplicity_free
    }
}

pub fn check_normal(field: &MatrixField, basis: &CycleBasis, tol: f64) -> Result<NormalityReport> {
    let samples = field.sample_cycles(basis)?;
    let residual = samples.iter().flatten().map(normality_residual).fold(0.0, f64::max);
    Ok(NormalityReport { residual, tol, passed: residual <= tol })
}

/// Smallest pairwise eigenvalue distance of one matrix.
pub fn min_pairwise_gap(eigs: &[Complex64]) -> f64 {
    let mut gap = f64::INFINITY;
    for i in 0..eigs.len() {
        for j in i + 1..eigs.len() {
            gap = gap.min((eigs[i] - eigs[j]).norm());
        }
    }
    gap
}

pub fn check_multiplicity_free(field: &MatrixField, basis: &CycleBasis, gap_tol: f64) -> Result<GapReport> {
    let samples = field.sample_cycles(basis)?;
    let mut min_gap = f64::INFINITY;
    for cyc in &samples {
        for (i, m) in cyc.iter().enumerate() {
            let eig = spectral::eigen_normal(m).map_err(|e| e.at_node(i))?;
            min_gap = min_gap.min(min_pairwise_gap(&eig.values));
        }
    }
    if field.dim() < 2 {
        min_gap = f64::INFINITY;
    }
    Ok(GapReport { min_gap, tol: gap_tol, multiplicity_free: min_gap > gap_tol })
}

/// Both checks with the given tolerances. Eigenvalues are only computed when
/// the field is normal within the solver's own precondition.
pub fn validate(field: &MatrixField, basis: &CycleBasis, normal_tol: f64, gap_tol: f64) -> Result<ValidationReport> {
    let normality = check_normal(field, basis, normal_tol)?;
    let gap = if normality.residual <= spectral::NORMALITY_PRECONDITION {
        check_multiplicity_free(field, basis, gap_tol)?
    } else {
        GapReport { min_gap: f64::NAN, tol: gap_tol, multiplicity_free: false }
    };
    Ok(ValidationReport { normality, gap })
}

/// `det(M − λI) = Σ_k coeffs[k] λ^k`, leading coefficient `(−1)ⁿ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CharPoly {
    pub coeffs: Vec<Complex64>,
}

impl CharPoly {
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, lambda: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * lambda + c)
    }

    pub fn trace(&self) -> Complex64 {
        let n = self.degree();
        let sign = if (n - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
        self.coeffs[n - 1] * sign
    }

    pub fn determinant(&self) -> Complex64 {
        self.coeffs[0]
    }

    pub fn max_deviation(&self, other: &CharPoly) -> f64 {
        if self.coeffs.len() != other.coeffs.len() {
            return f64::INFINITY;
        }
        self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// `det(M − λI)` from its roots: `∏ (λᵢ − λ)`.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut coeffs = alloc::vec![Complex64::new(1.0, 0.0)];
        for &r in roots {
            let mut next = alloc::vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
            for (k, &a) in coeffs.iter().enumerate() {
                next[k] += a * r;
                next[k + 1] -= a;
            }
            coeffs = next;
        }
        Self { coeffs }
    }
}

/// Characteristic polynomial of one matrix: Faddeev–LeVerrier for `n ≤ 4`,
/// product over eigenvalues otherwise.
pub fn char_poly_at(m: &CMatrix) -> Result<CharPoly> {
    let n = m.nrows();
    if n > 4 {
        let eig = spectral::eigen_normal(m)?;
        return Ok(CharPoly::from_roots(&eig.values));
    }
    // det(λI − M) = Σ a_k λ^k with a_n = 1.
    let mut a = alloc::vec![Complex64::new(0.0, 0.0); n + 1];
    a[n] = Complex64::new(1.0, 0.0);
    let mut mk = CMatrix::zeros(n, n);
    let id = linalg::identity(n);
    for k in 1..=n {
        mk = m * &mk + &id * a[n - k + 1];
        let t = linalg::trace(&(m * &mk));
        a[n - k] = -t / k as f64;
    }
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(CharPoly { coeffs: a.into_iter().map(|z| z * sign).collect() })
}

/// Node-sampled characteristic polynomial, one list per cycle.
#[derive(Debug, Clone, PartialEq)]
pub struct CharPolyField {
    pub samples: Vec<Vec<CharPoly>>,
}

impl CharPolyField {
    pub fn max_deviation(&self, other: &CharPolyField) -> f64 {
        if self.samples.len() != other.samples.len() {
            return f64::INFINITY;
        }
        let mut dev = 0.0f64;
        for (a, b) in self.samples.iter().zip(&other.samples) {
            if a.len() != b.len() {
                return f64::INFINITY;
            }
            for (p, q) in a.iter().zip(b) {
                dev = dev.max(p.max_deviation(q));
            }
        }
        dev
    }
}

pub fn char_poly(field: &MatrixField, basis: &CycleBasis) -> Result<CharPolyField> {
    let samples = field.sample_cycles(basis)?;
    let samples = samples
        .iter()
        .map(|cyc| cyc.iter().enumerate().map(|(i, m)| char_poly_at(m).map_err(|e| e.at_node(i))).collect())
        .collect::<Result<Vec<Vec<CharPoly>>>>()?;
    Ok(CharPolyField { samples })
}
