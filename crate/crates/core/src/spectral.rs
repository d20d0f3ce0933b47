//! Pointwise eigendecomposition of normal matrices, continuation of a global
//! eigenvalue ordering across a mesh, and eigenprojector fields built by the
//! Lagrange-interpolation formula `Pᵢ = ∏_{j≠i} (A − λⱼ)/(λᵢ − λⱼ)`.

use alloc::collections::VecDeque;
use alloc::vec::Vec;
use core::cmp::Ordering;

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::geometry::{Cycle, CycleBasis, SpherePoint};
use crate::linalg::{self, CMatrix};
use crate::matrixfield::{min_pairwise_gap, normality_residual, MatrixField};

/// Inputs to [`eigen_normal`] must be normal to this relative tolerance.
pub const NORMALITY_PRECONDITION: f64 = 1e-6;
/// Eigenpair residual contract, relative to `1 + ‖M‖_F`.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Projector formula refuses eigenvalue gaps at or below this.
pub const LAGRANGE_GAP_TOL: f64 = 1e-6;
/// Two matchings whose costs differ by less than this are ambiguous.
pub const MATCHING_AMBIGUITY: f64 = 1e-8;

const SCHUR_MAX_ITER: usize = 10_000;
const EXACT_MATCHING_MAX_N: usize = 7;

/// Eigenpairs of one normal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPairSet {
    pub values: Vec<Complex64>,
    pub vectors: Vec<DVector<Complex64>>,
    pub residuals: Vec<f64>,
}

/// Tolerant lexicographic comparison. Primary components closer than `tol`
/// count as equal and the secondary component decides.
fn lex_cmp(a: (f64, f64), b: (f64, f64), tol: f64) -> Ordering {
    if (a.0 - b.0).abs() > tol {
        a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal)
    } else {
        a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal)
    }
}

fn tie_tol(values: &[Complex64]) -> f64 {
    1e-9 * (1.0 + values.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Eigendecomposition of a normal matrix via the complex Schur form, whose
/// triangular factor is diagonal up to rounding when `M` is normal.
/// Eigenpairs come back sorted lexicographically by `(Im λ, Re λ)`.
pub fn eigen_normal(m: &CMatrix) -> Result<EigenPairSet> {
    let n = m.nrows();
    if n != m.ncols() {
        return Err(Error::Dimension { expected: n, found: m.ncols() });
    }
    if !linalg::is_finite(m) {
        return Err(Error::NonFinite { node: 0 });
    }
    let residual = normality_residual(m);
    if residual > NORMALITY_PRECONDITION {
        return Err(Error::NotNormal { residual });
    }
    let scale = 1.0 + linalg::frob(m);
    let schur = m.clone().try_schur(f64::EPSILON, SCHUR_MAX_ITER).ok_or(Error::SolverFailure { residual: f64::NAN })?;
    let (q, t) = schur.unpack();
    let mut pairs: Vec<(Complex64, DVector<Complex64>)> =
        (0..n).map(|i| (t[(i, i)], q.column(i).into_owned())).collect();
    let values: Vec<Complex64> = pairs.iter().map(|p| p.0).collect();
    let tol = tie_tol(&values);
    pairs.sort_by(|a, b| lex_cmp((a.0.im, a.0.re), (b.0.im, b.0.re), tol));

    let mut out = EigenPairSet { values: Vec::with_capacity(n), vectors: Vec::with_capacity(n), residuals: Vec::with_capacity(n) };
    for (lambda, v) in pairs {
        let r = (m * &v - &v * lambda).norm();
        if r > RESIDUAL_TOL * scale {
            return Err(Error::SolverFailure { residual: r / scale });
        }
        out.values.push(lambda);
        out.vectors.push(v);
        out.residuals.push(r);
    }
    Ok(out)
}

/// `Pᵢ = ∏_{j≠i} (λᵢ − λⱼ)⁻¹ (M − λⱼ I)` for each listed eigenvalue.
pub fn projector_lagrange(m: &CMatrix, eigenvalues: &[Complex64]) -> Result<Vec<CMatrix>> {
    let n = m.nrows();
    let gap = min_pairwise_gap(eigenvalues);
    if eigenvalues.len() > 1 && gap <= LAGRANGE_GAP_TOL {
        return Err(Error::GapUnderflow { gap, tol: LAGRANGE_GAP_TOL });
    }
    let id = linalg::identity(n);
    Ok((0..eigenvalues.len())
        .map(|i| {
            let mut p = id.clone();
            for (j, &lj) in eigenvalues.iter().enumerate() {
                if j != i {
                    p *= (m - &id * lj) / (eigenvalues[i] - lj);
                }
            }
            p
        })
        .collect())
}

/// Outcome of the discrete trivial-monodromy check: over every grid edge,
/// the largest `|λᵢ(u) − λᵢ(v)| / (½ min(gap(u), gap(v)))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderingCertificate {
    pub passed: bool,
    pub max_ratio: f64,
    pub edges_checked: usize,
}

/// Globally ordered spectral data of a matrix field on one cycle.
#[derive(Debug, Clone)]
pub struct SpectralData {
    pub cycle: Cycle,
    pub matrices: Vec<CMatrix>,
    /// `eigenvalues[node][band]`
    pub eigenvalues: Vec<Vec<Complex64>>,
    /// `vectors[node][band]`, unit eigenvectors in band order.
    pub vectors: Vec<Vec<DVector<Complex64>>>,
    /// `projectors[band][node]` from the Lagrange formula.
    pub projectors: Vec<Vec<CMatrix>>,
    pub certificate: OrderingCertificate,
}

impl SpectralData {
    pub fn bands(&self) -> usize {
        self.projectors.len()
    }

    pub fn node_count(&self) -> usize {
        self.matrices.len()
    }

    /// `max ‖Σᵢ λᵢ Pᵢ − A‖_F / (1 + ‖A‖_F)` over nodes.
    pub fn reconstruction_residual(&self) -> f64 {
        (0..self.node_count())
            .map(|k| {
                let a = &self.matrices[k];
                let mut s = CMatrix::zeros(a.nrows(), a.ncols());
                for b in 0..self.bands() {
                    s += &self.projectors[b][k] * self.eigenvalues[k][b];
                }
                linalg::frob(&(s - a)) / (1.0 + linalg::frob(a))
            })
            .fold(0.0, f64::max)
    }

    /// Largest deviation from `Pᵢ² = Pᵢ = Pᵢ*`, `PᵢPⱼ = 0`, `Σ Pᵢ = I`, `tr Pᵢ = 1`.
    pub fn projector_defect(&self) -> f64 {
        let n = self.bands();
        let id = linalg::identity(n);
        let mut worst = 0.0f64;
        for k in 0..self.node_count() {
            let mut sum = CMatrix::zeros(n, n);
            for i in 0..n {
                let p = &self.projectors[i][k];
                worst = worst.max(linalg::projector_defect(p));
                worst = worst.max((linalg::trace(p) - Complex64::new(1.0, 0.0)).norm());
                for j in i + 1..n {
                    worst = worst.max(linalg::frob(&(p * &self.projectors[j][k])));
                }
                sum += p;
            }
            worst = worst.max(linalg::frob(&(sum - &id)));
        }
        worst
    }

    /// Eigenvalues of `field` at an off-node chart point, ordered by matching
    /// against the nearest node.
    pub fn ordered_eigenvalues_at(&self, m: &CMatrix, p: &SpherePoint) -> Result<Vec<Complex64>> {
        let eig = eigen_normal(m)?;
        let anchor = &self.eigenvalues[self.cycle.grid.nearest_node(p)];
        let perm = best_matching(anchor, &eig.values, 0)?;
        Ok(perm.iter().map(|&j| eig.values[j]).collect())
    }

    /// Smooth extension of band `band`'s projector to any chart point of
    /// this cycle: eigen-solve at the point, order against the nearest node,
    /// then apply the Lagrange formula.
    pub fn projector_at(&self, field: &MatrixField, band: usize, p: &SpherePoint) -> Result<CMatrix> {
        let m = field.eval(&self.cycle.lift(p))?;
        let eig = self.ordered_eigenvalues_at(&m, p)?;
        let mut ps = projector_lagrange(&m, &eig)?;
        Ok(ps.swap_remove(band))
    }
}

/// Permutation `perm` minimizing `Σᵢ |new[perm[i]] − old[i]|²`.
fn best_matching(old: &[Complex64], new: &[Complex64], node: usize) -> Result<Vec<usize>> {
    let n = old.len();
    if n != new.len() {
        return Err(Error::Dimension { expected: n, found: new.len() });
    }
    let cost = |perm: &[usize]| -> f64 { perm.iter().enumerate().map(|(i, &j)| (new[j] - old[i]).norm_sqr()).sum() };
    if n <= EXACT_MATCHING_MAX_N {
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = (f64::INFINITY, perm.clone());
        let mut second = f64::INFINITY;
        let mut consider = |p: &[usize]| {
            let c = cost(p);
            if c < best.0 {
                second = best.0;
                best = (c, p.to_vec());
            } else if c < second {
                second = c;
            }
        };
        // Heap's algorithm, iterative form.
        let mut counters = alloc::vec![0usize; n];
        consider(&perm);
        let mut i = 1;
        while i < n {
            if counters[i] < i {
                if i % 2 == 0 {
                    perm.swap(0, i);
                } else {
                    perm.swap(counters[i], i);
                }
                consider(&perm);
                counters[i] += 1;
                i = 1;
            } else {
                counters[i] = 0;
                i += 1;
            }
        }
        if n > 1 && second - best.0 < MATCHING_AMBIGUITY {
            return Err(Error::AmbiguousMatching { node });
        }
        Ok(best.1)
    } else {
        // Nearest-neighbour assignment; must be a bijection.
        let mut perm = Vec::with_capacity(n);
        let mut used = alloc::vec![false; n];
        for o in old {
            let (j, _) = new
                .iter()
                .enumerate()
                .map(|(j, z)| (j, (z - o).norm()))
                .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(Ordering::Equal))
                .ok_or(Error::AmbiguousMatching { node })?;
            if used[j] {
                return Err(Error::AmbiguousMatching { node });
            }
            used[j] = true;
            perm.push(j);
        }
        Ok(perm)
    }
}


/// Continue a global eigenvalue ordering over one cycle by breadth-first
/// matching from the cycle's root, certify it on every grid edge, and build
/// the Lagrange projector fields.
pub fn order_globally(field: &MatrixField, cycle: &Cycle) -> Result<SpectralData> {
    let grid = &cycle.grid;
    let count = grid.node_count();
    grid.check_node(cycle.root)?;
    let basis = CycleBasis::new(alloc::vec![cycle.clone()])?;
    let matrices = field.sample_cycles(&basis)?.pop().unwrap_or_default();
    let raw: Vec<EigenPairSet> =
        matrices.iter().enumerate().map(|(i, m)| eigen_normal(m).map_err(|e| e.at_node(i))).collect::<Result<_>>()?;

    let mut order: Vec<Option<Vec<usize>>> = alloc::vec![None; count];
    // Root tie-break: the solver's canonical (Im, Re) order.
    order[cycle.root] = Some((0..field.dim()).collect());
    let mut queue = VecDeque::from([cycle.root]);
    while let Some(u) = queue.pop_front() {
        let ou = order[u].clone().unwrap_or_default();
        let old: Vec<Complex64> = ou.iter().map(|&j| raw[u].values[j]).collect();
        for v in grid.neighbors(u) {
            if order[v].is_some() {
                continue;
            }
            order[v] = Some(best_matching(&old, &raw[v].values, v)?);
            queue.push_back(v);
        }
    }

    let order: Vec<Vec<usize>> = order.into_iter().map(|o| o.unwrap_or_default()).collect();
    let eigenvalues: Vec<Vec<Complex64>> =
        (0..count).map(|k| order[k].iter().map(|&j| raw[k].values[j]).collect()).collect();
    let vectors: Vec<Vec<DVector<Complex64>>> =
        (0..count).map(|k| order[k].iter().map(|&j| raw[k].vectors[j].clone()).collect()).collect();

    let gaps: Vec<f64> = eigenvalues.iter().map(|e| min_pairwise_gap(e)).collect();
    let mut max_ratio = 0.0f64;
    let edges = grid.edges();
    for &(u, v) in &edges {
        let half_gap = 0.5 * gaps[u].min(gaps[v]);
        for (a, b) in eigenvalues[u].iter().zip(&eigenvalues[v]) {
            let ratio = (a - b).norm() / half_gap;
            #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail
            if !(ratio < 1.0) {
                return Err(Error::Monodromy { from: u, to: v, ratio });
            }
            max_ratio = max_ratio.max(ratio);
        }
    }

    let n = field.dim();
    let mut projectors: Vec<Vec<CMatrix>> = (0..n).map(|_| Vec::with_capacity(count)).collect();
    for k in 0..count {
        let ps = projector_lagrange(&matrices[k], &eigenvalues[k]).map_err(|e| e.at_node(k))?;
        for (b, p) in ps.into_iter().enumerate() {
            projectors[b].push(p);
        }
    }

    Ok(SpectralData {
        cycle: cycle.clone(),
        matrices,
        eigenvalues,
        vectors,
        projectors,
        certificate: OrderingCertificate { passed: true, max_ratio, edges_checked: edges.len() },
    })
}

/// Ordered spectral data on every cycle of a basis. All cycles are rooted at
/// the domain basepoint, so band labels agree across cycles.
#[derive(Debug, Clone)]
pub struct BasisSpectra {
    pub cycles: Vec<SpectralData>,
}

impl BasisSpectra {
    pub fn bands(&self) -> usize {
        self.cycles.first().map(|s| s.bands()).unwrap_or(0)
    }

    pub fn basis(&self) -> CycleBasis {
        CycleBasis::new(self.cycles.iter().map(|s| s.cycle.clone()).collect()).expect("non-empty by construction")
    }
}

pub fn order_on_basis(field: &MatrixField, basis: &CycleBasis) -> Result<BasisSpectra> {
    let cycles = basis.cycles().iter().map(|c| order_globally(field, c)).collect::<Result<Vec<_>>>()?;
    Ok(BasisSpectra { cycles })
}

/// `max ‖P_lagrange − v v*‖_F` over nodes and bands.
pub fn cross_check_projectors(sd: &SpectralData) -> f64 {
    let mut worst = 0.0f64;
    for k in 0..sd.node_count() {
        for b in 0..sd.bands() {
            let outer = linalg::outer(&sd.vectors[k][b]);
            worst = worst.max(linalg::frob(&(&sd.projectors[b][k] - outer)));
        }
    }
    worst
}
