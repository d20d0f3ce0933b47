//! Builders for matrix fields and line-bundle decompositions of the trivial
//! bundle: closed-form fixtures, assembly from projectors and eigenvalues,
//! degree-`k` Pauli projectors, clutching constructions with prescribed Chern
//! tuples, pullbacks, spectrum transplants and successive orthogonalization.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;

use nalgebra::DVector;
use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::chern::{self, ChernVector};
use crate::error::{Error, Result};
use crate::geometry::{CycleBasis, Point, SpherePoint};
use crate::linalg::{self, c, CMatrix};
use crate::matrixfield::{min_pairwise_gap, MatrixField};
use crate::spectral::{SpectralData, LAGRANGE_GAP_TOL};

/// Profiles must keep eigenvalues at least this far apart.
pub const PROFILE_GAP_TOL: f64 = 1e-3;
/// Lines whose unit representatives have a smaller singular value do not span.
pub const SPAN_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Fixture,
    Coordinate,
    Bloch,
    Clutching,
    Pullback,
    Orthogonalized,
}

type FamilyFn = dyn Fn(&Point) -> Result<Vec<CMatrix>> + Send + Sync;

/// `n` rank-1 projector fields that are mutually orthogonal and sum to `I`.
#[derive(Clone)]
pub struct ProjectorFamily {
    dim: usize,
    provenance: Provenance,
    eval: Arc<FamilyFn>,
}

impl core::fmt::Debug for ProjectorFamily {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("ProjectorFamily").field("dim", &self.dim).field("provenance", &self.provenance).finish()
    }
}

impl ProjectorFamily {
    pub fn new<F>(dim: usize, provenance: Provenance, eval: F) -> Self
    where
        F: Fn(&Point) -> Result<Vec<CMatrix>> + Send + Sync + 'static,
    {
        Self { dim, provenance, eval: Arc::new(eval) }
    }

    /// Constant coordinate projectors `eᵢeᵢ*`.
    pub fn coordinate(n: usize) -> Self {
        let ps = coordinate_projectors(n);
        Self::new(n, Provenance::Coordinate, move |_| Ok(ps.clone()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn eval(&self, p: &Point) -> Result<Vec<CMatrix>> {
        (self.eval)(p)
    }

    /// The projector field of one band.
    pub fn band(&self, i: usize) -> MatrixField {
        let fam = self.clone();
        MatrixField::new(self.dim, alloc::format!("P{}", i + 1), move |p| {
            let mut ps = fam.eval(p)?;
            if i >= ps.len() {
                return Err(Error::Dimension { expected: i + 1, found: ps.len() });
            }
            Ok(ps.swap_remove(i))
        })
    }

    pub fn pullback<F>(&self, map: F) -> Self
    where
        F: Fn(&Point) -> Result<Point> + Send + Sync + 'static,
    {
        let inner = self.clone();
        Self::new(self.dim, Provenance::Pullback, move |p| inner.eval(&map(p)?))
    }

    /// `samples[band][cycle][node]`
    pub fn sample(&self, basis: &CycleBasis) -> Result<Vec<Vec<Vec<CMatrix>>>> {
        let mut out: Vec<Vec<Vec<CMatrix>>> = (0..self.dim).map(|_| Vec::new()).collect();
        for cyc in basis.cycles() {
            let mut per_band: Vec<Vec<CMatrix>> = (0..self.dim).map(|_| Vec::new()).collect();
            for i in 0..cyc.grid.node_count() {
                let ps = self.eval(&cyc.point(i)).map_err(|e| e.at_node(i))?;
                for (b, p) in ps.into_iter().enumerate() {
                    per_band[b].push(p);
                }
            }
            for (b, s) in per_band.into_iter().enumerate() {
                out[b].push(s);
            }
        }
        Ok(out)
    }

    /// Chern pairings of every band against the basis.
    pub fn pairings(&self, basis: &CycleBasis) -> Result<Vec<ChernVector>> {
        self.sample(basis)?.iter().enumerate().map(|(b, s)| chern::pair_samples(b, s, basis)).collect()
    }

    /// Largest violation of the family invariants over all basis nodes.
    pub fn defect(&self, basis: &CycleBasis) -> Result<f64> {
        let id = linalg::identity(self.dim);
        let mut worst = 0.0f64;
        for cyc in basis.cycles() {
            for pt in cyc.points() {
                let ps = self.eval(&pt)?;
                let mut sum = CMatrix::zeros(self.dim, self.dim);
                for (i, p) in ps.iter().enumerate() {
                    worst = worst.max(linalg::projector_defect(p));
                    worst = worst.max((linalg::trace(p) - c(1.0, 0.0)).norm());
                    for q in &ps[i + 1..] {
                        worst = worst.max(linalg::frob(&(p * q)));
                    }
                    sum += p;
                }
                worst = worst.max(linalg::frob(&(sum - &id)));
            }
        }
        Ok(worst)
    }
}

fn coordinate_projectors(n: usize) -> Vec<CMatrix> {
    (0..n)
        .map(|i| {
            let mut p = CMatrix::zeros(n, n);
            p[(i, i)] = c(1.0, 0.0);
            p
        })
        .collect()
}

type ProfileFn = dyn Fn(&Point) -> Result<Vec<Complex64>> + Send + Sync;

/// `n` eigenvalue functions with pointwise distinct values.
#[derive(Clone)]
pub struct EigenvalueProfile {
    dim: usize,
    eval: Arc<ProfileFn>,
}

impl core::fmt::Debug for EigenvalueProfile {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.debug_struct("EigenvalueProfile").field("dim", &self.dim).finish()
    }
}

impl EigenvalueProfile {
    pub fn new<F>(dim: usize, eval: F) -> Self
    where
        F: Fn(&Point) -> Result<Vec<Complex64>> + Send + Sync + 'static,
    {
        Self { dim, eval: Arc::new(eval) }
    }

    /// `λⱼ = j + i·j·z`, `j = 1..n`. On a product domain `z` is read from
    /// the first factor.
    pub fn default_for(n: usize) -> Self {
        Self::new(n, move |p| {
            let z = match p {
                Point::Sphere(q) | Point::Product(q, _) => q.embed().z,
            };
            Ok((1..=n).map(|j| c(j as f64, j as f64 * z)).collect())
        })
    }

    pub fn constant(values: Vec<Complex64>) -> Self {
        Self::new(values.len(), move |_| Ok(values.clone()))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, p: &Point) -> Result<Vec<Complex64>> {
        (self.eval)(p)
    }

    pub fn min_gap(&self, basis: &CycleBasis) -> Result<f64> {
        let mut gap = f64::INFINITY;
        for cyc in basis.cycles() {
            for pt in cyc.points() {
                gap = gap.min(min_pairwise_gap(&self.eval(&pt)?));
            }
        }
        Ok(gap)
    }
}

/// `A = Σⱼ λⱼ Pⱼ`. Evaluation fails wherever the profile's gap drops to
/// `PROFILE_GAP_TOL` or below.
pub fn assemble(profile: &EigenvalueProfile, family: &ProjectorFamily) -> Result<MatrixField> {
    if profile.dim() != family.dim() {
        return Err(Error::Dimension { expected: family.dim(), found: profile.dim() });
    }
    let (profile, family) = (profile.clone(), family.clone());
    let n = family.dim();
    Ok(MatrixField::new(n, "assembled", move |p| {
        let lambdas = profile.eval(p)?;
        let gap = min_pairwise_gap(&lambdas);
        if n > 1 && gap <= PROFILE_GAP_TOL {
            return Err(Error::GapUnderflow { gap, tol: PROFILE_GAP_TOL });
        }
        let ps = family.eval(p)?;
        let mut a = CMatrix::zeros(n, n);
        for (l, pj) in lambdas.iter().zip(&ps) {
            a += pj * *l;
        }
        Ok(a)
    }))
}

fn sphere_point(p: &Point) -> Result<SpherePoint> {
    match p {
        Point::Sphere(q) => Ok(*q),
        Point::Product(..) => Err(Error::DomainMismatch { expected: "sphere" }),
    }
}

/// The degree-`k` Pauli projector family: `P₁ = ½(I + n̂_k·σ)` with
/// `n̂_k = (sinφ cos kθ, sinφ sin kθ, cosφ)`, `P₂ = I − P₁`.
/// Its pairings are `(−k, k)` under this crate's orientation.
pub fn bloch(k: i64) -> ProjectorFamily {
    ProjectorFamily::new(2, Provenance::Bloch, move |p| {
        let q = sphere_point(p)?;
        let (sp, cp) = q.phi.sin_cos();
        let (s, co) = (k as f64 * q.theta).sin_cos();
        let p1 = linalg::bloch_projector(sp * co, sp * s, cp);
        let p2 = linalg::identity(2) - &p1;
        Ok(alloc::vec![p1, p2])
    })
}

/// `H(s, w) = Rot(s)·diag(w, 1)·Rot(−s)·diag(w̄, 1)`: equal to `I` at
/// `s = 0` and to `diag(w̄, w)` at `s = π/2`.
pub fn block_homotopy(s: f64, w: Complex64) -> [[Complex64; 2]; 2] {
    let (sn, cs) = s.sin_cos();
    let rot = |a: f64, b: f64| [[c(a, 0.0), c(-b, 0.0)], [c(b, 0.0), c(a, 0.0)]];
    let mul = |x: [[Complex64; 2]; 2], y: [[Complex64; 2]; 2]| {
        let mut out = [[c(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                out[i][j] = x[i][0] * y[0][j] + x[i][1] * y[1][j];
            }
        }
        out
    };
    let one = c(1.0, 0.0);
    let zero = c(0.0, 0.0);
    let dw = [[w, zero], [zero, one]];
    let dwbar = [[w.conj(), zero], [zero, one]];
    mul(mul(mul(rot(cs, sn), dw), rot(cs, -sn)), dwbar)
}

/// Northern-hemisphere frame `g̃(θ, s)`: the left-to-right product over
/// adjacent pairs `(j, j+1)` of `H(s, e^{i dⱼ θ})` with `dⱼ = Σ_{i≤j} cᵢ`.
pub fn clutching_frame(tuple: &[i64], theta: f64, s: f64) -> CMatrix {
    let n = tuple.len();
    let mut g = linalg::identity(n);
    let mut d = 0i64;
    for j in 0..n - 1 {
        d += tuple[j];
        let h = block_homotopy(s, Complex64::from_polar(1.0, d as f64 * theta));
        let mut e = linalg::identity(n);
        for a in 0..2 {
            for b in 0..2 {
                e[(j + a, j + b)] = h[a][b];
            }
        }
        g *= e;
    }
    g
}

/// Projectors of the clutching construction at a chart point, using the
/// northern formula when `north` is set and the southern one otherwise.
pub fn clutching_projectors(tuple: &[i64], p: &SpherePoint, north: bool) -> Vec<CMatrix> {
    let n = tuple.len();
    if !north {
        return coordinate_projectors(n);
    }
    // Radial parameter: s = 0 at the north pole, π/2 on the equator.
    let s = p.phi.min(FRAC_PI_2);
    let g = clutching_frame(tuple, p.theta, s);
    (0..n).map(|i| linalg::outer(&DVector::from_iterator(n, g.column(i).iter().copied()))).collect()
}

/// Line-bundle decomposition of `Θⁿ(S²)` whose `i`-th summand has Chern
/// number `σ·cᵢ` for one global sign `σ`: trivial over the southern
/// hemisphere, framed by [`clutching_frame`] over the northern one, so the
/// equatorial transition is `diag(z^{−c₁}, …, z^{−cₙ})`.
pub fn clutching(tuple: &[i64]) -> Result<ProjectorFamily> {
    if tuple.len() < 2 {
        return Err(Error::TooFewBands { min: 2, found: tuple.len() });
    }
    let sum: i64 = tuple.iter().sum();
    if sum != 0 {
        return Err(Error::Infeasible { sum });
    }
    let tuple: Vec<i64> = tuple.to_vec();
    Ok(ProjectorFamily::new(tuple.len(), Provenance::Clutching, move |p| {
        let q = sphere_point(p)?;
        Ok(clutching_projectors(&tuple, &q, q.phi <= FRAC_PI_2))
    }))
}

/// Domain maps used with [`MatrixField::pullback`] and
/// [`ProjectorFamily::pullback`].
pub mod maps {
    use super::*;

    pub fn identity(p: &Point) -> Result<Point> {
        Ok(*p)
    }

    /// `π₁(p, q) = p`.
    pub fn first_factor(p: &Point) -> Result<Point> {
        match p {
            Point::Product(a, _) => Ok(Point::Sphere(*a)),
            Point::Sphere(_) => Err(Error::DomainMismatch { expected: "product" }),
        }
    }

    /// `π₂(p, q) = q`.
    pub fn second_factor(p: &Point) -> Result<Point> {
        match p {
            Point::Product(_, b) => Ok(Point::Sphere(*b)),
            Point::Sphere(_) => Err(Error::DomainMismatch { expected: "product" }),
        }
    }

    /// `(θ, φ) ↦ (kθ, φ)`, a map of degree `k`.
    pub fn azimuthal_wrap(k: i64) -> impl Fn(&Point) -> Result<Point> + Send + Sync + Clone {
        move |p| match p {
            Point::Sphere(q) => Ok(Point::Sphere(SpherePoint::new(k as f64 * q.theta, q.phi))),
            Point::Product(..) => Err(Error::DomainMismatch { expected: "sphere" }),
        }
    }
}

/// Replace the eigenvalues of a spectral decomposition:
/// `Ã = Σ λ̃ᵢ Pᵢ` at every node, returned as a node-sampled field on the
/// cycle's grid.
pub fn transplant(sd: &SpectralData, profile: &EigenvalueProfile) -> Result<MatrixField> {
    if profile.dim() != sd.bands() {
        return Err(Error::Dimension { expected: sd.bands(), found: profile.dim() });
    }
    let n = sd.bands();
    let samples = (0..sd.node_count())
        .map(|k| {
            let lambdas = profile.eval(&sd.cycle.point(k))?;
            let gap = min_pairwise_gap(&lambdas);
            if n > 1 && gap <= LAGRANGE_GAP_TOL {
                return Err(Error::GapUnderflow { gap, tol: LAGRANGE_GAP_TOL }.at_node(k));
            }
            let mut a = CMatrix::zeros(n, n);
            for (b, l) in lambdas.iter().enumerate() {
                a += &sd.projectors[b][k] * *l;
            }
            Ok(a)
        })
        .collect::<Result<Vec<_>>>()?;
    MatrixField::sampled(sd.cycle.grid.clone(), samples, "transplant")
}

fn orthogonalize_at(lines: &[CMatrix]) -> core::result::Result<Vec<CMatrix>, f64> {
    let n = lines.len();
    let reps: Vec<DVector<Complex64>> = lines.iter().map(linalg::range_vector).collect();
    let stacked = CMatrix::from_columns(&reps);
    let sigma = stacked.singular_values().iter().copied().fold(f64::INFINITY, f64::min);
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail
    if !(sigma > SPAN_TOL) {
        return Err(sigma);
    }
    let mut out: Vec<CMatrix> = Vec::with_capacity(n);
    for u in &reps {
        let mut w = u.clone();
        for p in &out {
            w -= p * u;
        }
        let norm = w.norm();
        out.push(linalg::outer(&(w / c(norm, 0.0))));
    }
    Ok(out)
}

/// Successive orthogonal complements: `V₁ = L₁`, and `V_k` is the orthogonal
/// complement of `V₁ ⊕ … ⊕ V_{k−1}` inside `L₁ ⊕ … ⊕ L_k`. Each input is a
/// rank-1 projector field onto the line `L_k`. Spanning is verified on every
/// node of `basis`.
pub fn orthogonalize(lines: &[MatrixField], basis: &CycleBasis) -> Result<ProjectorFamily> {
    let n = lines.len();
    if n == 0 {
        return Err(Error::TooFewBands { min: 1, found: 0 });
    }
    if let Some(bad) = lines.iter().find(|l| l.dim() != n) {
        return Err(Error::Dimension { expected: n, found: bad.dim() });
    }
    for cyc in basis.cycles() {
        for i in 0..cyc.grid.node_count() {
            let pt = cyc.point(i);
            let ls = lines.iter().map(|l| l.eval(&pt)).collect::<Result<Vec<_>>>().map_err(|e| e.at_node(i))?;
            orthogonalize_at(&ls).map_err(|sigma| Error::Degenerate { node: i, sigma })?;
        }
    }
    let lines: Vec<MatrixField> = lines.to_vec();
    Ok(ProjectorFamily::new(n, Provenance::Orthogonalized, move |p| {
        let ls = lines.iter().map(|l| l.eval(p)).collect::<Result<Vec<_>>>()?;
        orthogonalize_at(&ls).map_err(|sigma| Error::Degenerate { node: 0, sigma })
    }))
}

/// Closed-form fields from the worked `S²` examples.
pub mod fixtures {
    use super::*;
    use crate::geometry::EmbeddedPoint;

    fn on_sphere<F>(dim: usize, label: &str, f: F) -> MatrixField
    where
        F: Fn(EmbeddedPoint) -> CMatrix + Send + Sync + 'static,
    {
        MatrixField::new(dim, String::from(label), move |p| Ok(f(sphere_point(p)?.embed())))
    }

    /// `λ₁ = 2(x² + y²)`, `λ₂ = 2iz²`.
    pub fn eigenvalues(e: &EmbeddedPoint) -> [Complex64; 2] {
        [c(2.0 * (e.x * e.x + e.y * e.y), 0.0), c(0.0, 2.0 * e.z * e.z)]
    }

    pub fn fixture_a() -> MatrixField {
        on_sphere(2, "A", |e| {
            let (x, y, z) = (e.x, e.y, e.z);
            let (x2, y2, z2) = (x * x, y * y, z * z);
            let common = c(x2 + y2, -z2);
            linalg::from_rows(
                2,
                &[
                    c(x2 + x2 * x + y2 + x * y2, (1.0 - x) * z2),
                    c(y, z) * common,
                    c(y, -z) * common,
                    c(x2 - x2 * x + y2 - x * y2, (1.0 + x) * z2),
                ],
            )
        })
    }

    /// `B = λ₁Q₁ + λ₂Q₂`. The `(2,2)` entry carries `iz²(1 − z)`, the value
    /// forced by `tr B = tr A`.
    pub fn fixture_b() -> MatrixField {
        on_sphere(2, "B", |e| {
            let (x, y, z) = (e.x, e.y, e.z);
            let (x2, y2, z2) = (x * x, y * y, z * z);
            let common = c(z2, x2 + y2);
            linalg::from_rows(
                2,
                &[
                    c(x2 - x2 * z + y2 - y2 * z, z2 * (z + 1.0)),
                    c(x, y) * common,
                    c(-x, y) * common,
                    c(x2 + x2 * z + y2 + y2 * z, z2 * (1.0 - z)),
                ],
            )
        })
    }

    /// `diag(λ₁, λ₂)` with the eigenvalues of A and B.
    pub fn fixture_d() -> MatrixField {
        on_sphere(2, "D", |e| {
            let [l1, l2] = eigenvalues(&e);
            CMatrix::from_diagonal(&DVector::from_vec(alloc::vec![l1, l2]))
        })
    }

    /// `½[[1+x, y+iz], [y−iz, 1−x]]`
    pub fn fixture_p1() -> MatrixField {
        on_sphere(2, "P1", |e| linalg::bloch_projector(e.y, -e.z, e.x))
    }

    pub fn fixture_p2() -> MatrixField {
        on_sphere(2, "P2", |e| linalg::bloch_projector(-e.y, e.z, -e.x))
    }

    /// `½[[1−z, −y+ix], [−y−ix, 1+z]]`
    pub fn fixture_q1() -> MatrixField {
        on_sphere(2, "Q1", |e| linalg::bloch_projector(-e.y, -e.x, -e.z))
    }

    pub fn fixture_q2() -> MatrixField {
        on_sphere(2, "Q2", |e| linalg::bloch_projector(e.y, e.x, e.z))
    }

    pub fn family_a() -> ProjectorFamily {
        let (p1, p2) = (fixture_p1(), fixture_p2());
        ProjectorFamily::new(2, Provenance::Fixture, move |p| Ok(alloc::vec![p1.eval(p)?, p2.eval(p)?]))
    }

    pub fn family_b() -> ProjectorFamily {
        let (q1, q2) = (fixture_q1(), fixture_q2());
        ProjectorFamily::new(2, Provenance::Fixture, move |p| Ok(alloc::vec![q1.eval(p)?, q2.eval(p)?]))
    }

    pub fn profile() -> EigenvalueProfile {
        EigenvalueProfile::new(2, |p| Ok(eigenvalues(&sphere_point(p)?.embed()).to_vec()))
    }
}
