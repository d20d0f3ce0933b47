//! The unitary-equivalence invariant `θ(A, B)` of two multiplicity-free
//! normal fields with a common split characteristic polynomial, computed as
//! the Chern pairings of the bundles `Hom(Vᵢ, Wᵢ)`, and the diagonalizability
//! obstruction of a single field.
//!
//! `Hom(V, W)` is the range of `R = Q ⊗ Pᵀ` acting on `M(n, ℂ)` with the
//! row-major basis `e₁₁, e₁₂, …, e_nn`, where `P` and `Q` project onto `V`
//! and `W`.

use alloc::vec::Vec;

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::chern::{self, ChernVector, RESIDUAL_THRESHOLD};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix};
use crate::matrixfield::char_poly_at;
use crate::spectral::BasisSpectra;

/// Inputs to [`kron_hom_projector`] must be Hermitian idempotents to this tolerance.
pub const PROJECTOR_TOL: f64 = 1e-8;
/// Characteristic polynomial coefficients must agree to this tolerance.
pub const CHAR_POLY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct HomProjector {
    pub r: CMatrix,
}

/// `R = Q ⊗ Pᵀ`: block `(i, j)` of `R` is `q_ij Pᵀ`.
pub fn kron_hom_projector(q: &CMatrix, p: &CMatrix) -> Result<HomProjector> {
    let n = p.nrows();
    if q.nrows() != n || q.ncols() != n || p.ncols() != n {
        return Err(Error::Dimension { expected: n, found: q.nrows() });
    }
    if linalg::projector_defect(p) > PROJECTOR_TOL || linalg::projector_defect(q) > PROJECTOR_TOL {
        return Err(Error::Contract { what: "Kronecker inputs must be Hermitian idempotents" });
    }
    let pt = p.transpose();
    let mut r = CMatrix::zeros(n * n, n * n);
    for i in 0..n {
        for j in 0..n {
            r.view_mut((i * n, j * n), (n, n)).copy_from(&(&pt * q[(i, j)]));
        }
    }
    Ok(HomProjector { r })
}

/// One pairing vector per band.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaInvariant {
    pub bands: Vec<ChernVector>,
}

impl ThetaInvariant {
    pub fn is_zero(&self) -> bool {
        self.bands.iter().all(ChernVector::is_zero)
    }

    /// Per-cycle sums over bands; zero for every valid invariant.
    pub fn band_sums(&self) -> Vec<i64> {
        chern::band_sums(&self.bands)
    }

    /// `−θ`, the invariant with the roles of the two fields exchanged.
    pub fn negated(&self) -> Self {
        Self {
            bands: self
                .bands
                .iter()
                .map(|v| ChernVector { band: v.band, pairings: v.pairings.iter().map(|k| -k).collect(), residuals: v.residuals.clone() })
                .collect(),
        }
    }

    pub fn pairings(&self) -> Vec<Vec<i64>> {
        self.bands.iter().map(|v| v.pairings.clone()).collect()
    }
}

/// Diagonalizability obstruction: the pairings of every eigenbundle `Vᵢ`.
/// Equals `θ(D, A)` for `D` the diagonal field of `A`'s eigenvalues.
pub fn diag_obstruction(spectra: &BasisSpectra) -> Result<ThetaInvariant> {
    Ok(ThetaInvariant { bands: chern::pair_bands(spectra)? })
}

fn check_compatible(sa: &BasisSpectra, sb: &BasisSpectra) -> Result<()> {
    if sa.cycles.len() != sb.cycles.len() {
        return Err(Error::Dimension { expected: sa.cycles.len(), found: sb.cycles.len() });
    }
    let mut deviation = 0.0f64;
    for (ca, cb) in sa.cycles.iter().zip(&sb.cycles) {
        if ca.cycle != cb.cycle {
            return Err(Error::Other(alloc::format!("fields live on different cycles ({} vs {})", ca.cycle.label, cb.cycle.label)));
        }
        if ca.bands() != cb.bands() {
            return Err(Error::Dimension { expected: ca.bands(), found: cb.bands() });
        }
        for (ma, mb) in ca.matrices.iter().zip(&cb.matrices) {
            deviation = deviation.max(char_poly_at(ma)?.max_deviation(&char_poly_at(mb)?));
        }
    }
    if deviation > CHAR_POLY_TOL {
        return Err(Error::CharPolyMismatch { deviation });
    }
    for (ca, cb) in sa.cycles.iter().zip(&sb.cycles) {
        for (k, (ea, eb)) in ca.eigenvalues.iter().zip(&cb.eigenvalues).enumerate() {
            let scale = 1.0 + ea.iter().map(|z| z.norm()).fold(0.0, f64::max);
            if ea.iter().zip(eb).any(|(x, y)| (x - y).norm() > CHAR_POLY_TOL.sqrt() * scale) {
                return Err(Error::OrderingMismatch { node: k });
            }
        }
    }
    Ok(())
}

/// `θ(A, B)`: band `i` carries the pairings of `Hom(Vᵢ, Wᵢ)`, where `Vᵢ`
/// comes from `sa` and `Wᵢ` from `sb`.
pub fn theta(sa: &BasisSpectra, sb: &BasisSpectra) -> Result<ThetaInvariant> {
    check_compatible(sa, sb)?;
    let basis = sa.basis();
    let bands = (0..sa.bands())
        .map(|b| {
            let samples = sa
                .cycles
                .iter()
                .zip(&sb.cycles)
                .map(|(ca, cb)| {
                    ca.projectors[b]
                        .iter()
                        .zip(&cb.projectors[b])
                        .enumerate()
                        .map(|(k, (p, q))| kron_hom_projector(q, p).map(|h| h.r).map_err(|e| e.at_node(k)))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            chern::pair_samples(b, &samples, &basis)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ThetaInvariant { bands })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    /// Unitarily equivalent (or, for an obstruction, diagonalizable).
    pub holds: bool,
    /// Zero-based indices of bands with a nonzero pairing.
    pub witness: Vec<usize>,
}

pub fn verdict(inv: &ThetaInvariant) -> Result<Verdict> {
    for (ci, r) in inv.bands.iter().flat_map(|v| v.residuals.iter().enumerate()) {
        #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN must fail
        if !(*r < RESIDUAL_THRESHOLD) {
            return Err(Error::Inconclusive { cycle: ci, residual: *r });
        }
    }
    let witness: Vec<usize> = inv.bands.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, _)| i).collect();
    Ok(Verdict { holds: witness.is_empty(), witness })
}
