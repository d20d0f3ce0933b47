//! First Chern numbers of projector-defined line bundles.
//!
//! Two independent routes:
//!
//! * Chern–Weil: the curvature form `(1/2πi) tr(P dP∧dP)` integrated with
//!   central finite differences and midpoint quadrature in the `(θ, φ)` chart.
//!   The chart orientation `dθ∧dφ` is taken as positive.
//! * Plaquettes: for each face with vertices `x₁..x_m` the gauge-invariant
//!   phase `arg tr(P(x₁)⋯P(x_m))`. On a closed surface the phases sum to
//!   `2π` times an integer in exact arithmetic.
//!
//! The plaquette sign is fixed so that both routes agree; with it the
//! projector `½[[1+x, y+iz], [y−iz, 1−x]]` has Chern number `+1`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::geometry::{CycleBasis, SphereGrid, SpherePoint};
use crate::linalg::{self, CMatrix};
use crate::matrixfield::MatrixField;
use crate::spectral::BasisSpectra;

/// Overlap traces below this mean the mesh does not resolve the bundle.
pub const MIN_OVERLAP: f64 = 1e-3;
/// Integer rounding is rejected above this residual.
pub const RESIDUAL_THRESHOLD: f64 = 0.1;
/// Chern–Weil results with a larger error bar are flagged inconclusive.
pub const CHERN_WEIL_INCONCLUSIVE: f64 = 0.25;

// Orientation calibration: F = −arg tr(P₁⋯P_m) with faces listed
// counterclockwise from outside.
const PLAQUETTE_SIGN: f64 = -1.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureSample {
    pub point: SpherePoint,
    /// Coefficient of `dθ∧dφ` in `(1/2πi) tr(P dP dP)`.
    pub value: Complex64,
}

/// Finite-difference step tied to the mesh: `min(Δθ, Δφ)/2`.
pub fn default_step(grid: &SphereGrid) -> f64 {
    grid.d_theta().min(grid.d_phi()) / 2.0
}

pub fn curvature_density<F>(p: &F, point: &SpherePoint, h: f64) -> Result<CurvatureSample>
where
    F: Fn(&SpherePoint) -> Result<CMatrix>,
{
    if point.phi - h <= 0.0 || point.phi + h >= PI {
        return Err(Error::ChartBoundary { phi: point.phi });
    }
    let at = |dt: f64, dp: f64| p(&SpherePoint::new(point.theta + dt, point.phi + dp));
    let p0 = at(0.0, 0.0)?;
    let pt = (at(h, 0.0)? - at(-h, 0.0)?) / Complex64::new(2.0 * h, 0.0);
    let pp = (at(0.0, h)? - at(0.0, -h)?) / Complex64::new(2.0 * h, 0.0);
    let comm = &pt * &pp - &pp * &pt;
    let tr = linalg::trace(&(&p0 * comm));
    Ok(CurvatureSample { point: *point, value: tr / Complex64::new(0.0, 2.0 * PI) })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChernWeil {
    pub value: f64,
    /// Bound on the omitted polar-cap contribution.
    pub error_bar: f64,
    pub inconclusive: bool,
}

/// Midpoint rule over the interior quadrilaterals. The two polar caps are
/// omitted; their contribution is bounded by the largest density on the
/// adjacent quad row times the cap's chart area.
pub fn chern_weil_number<F>(p: &F, grid: &SphereGrid) -> Result<ChernWeil>
where
    F: Fn(&SpherePoint) -> Result<CMatrix>,
{
    let h = default_step(grid);
    let cell = grid.d_theta() * grid.d_phi();
    let nt = grid.n_theta();
    let rows = grid.n_phi() - 1;
    let mut sum = 0.0;
    let mut comp = 0.0;
    let mut north_max = 0.0f64;
    let mut south_max = 0.0f64;
    for (k, mid) in grid.quad_midpoints().enumerate() {
        let d = curvature_density(p, &mid, h)?.value.re;
        let row = k / nt;
        if row == 0 {
            north_max = north_max.max(d.abs());
        }
        if row + 1 == rows {
            south_max = south_max.max(d.abs());
        }
        let y = d * cell - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let cap_area = 2.0 * PI * grid.d_phi() / 2.0;
    let error_bar = (north_max + south_max) * cap_area;
    Ok(ChernWeil { value: sum, error_bar, inconclusive: error_bar > CHERN_WEIL_INCONCLUSIVE })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlaquetteChern {
    pub value: i64,
    /// Raw phase sum divided by `2π`.
    pub raw: f64,
    /// Distance of `raw` from `value`.
    pub residual: f64,
}

/// Plaquette-phase Chern number of a rank-1 projector field sampled at the
/// grid nodes (`samples[node]`).
pub fn chern_plaquette_number(samples: &[CMatrix], grid: &SphereGrid) -> Result<PlaquetteChern> {
    if samples.len() != grid.node_count() {
        return Err(Error::Dimension { expected: grid.node_count(), found: samples.len() });
    }
    let mut sum = 0.0;
    let mut comp = 0.0;
    for (pi, plaq) in grid.plaquettes().iter().enumerate() {
        let vs = &plaq.vertices;
        let m = vs.len();
        let mut prod = samples[vs[0]].clone();
        for k in 0..m {
            let (a, b) = (&samples[vs[k]], &samples[vs[(k + 1) % m]]);
            let overlap = linalg::trace(&(a * b)).norm();
            if overlap < MIN_OVERLAP {
                return Err(Error::Resolution { plaquette: pi, overlap });
            }
            if k + 1 < m {
                prod *= b;
            }
        }
        let phase = PLAQUETTE_SIGN * linalg::trace(&prod).arg();
        let y = phase - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    let raw = sum / (2.0 * PI);
    let value = raw.round();
    Ok(PlaquetteChern { value: value as i64, raw, residual: (raw - value).abs() })
}

/// Integer pairings of `c₁` of one line bundle with each cycle of a basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ChernVector {
    pub band: usize,
    pub pairings: Vec<i64>,
    pub residuals: Vec<f64>,
}

impl ChernVector {
    pub fn is_zero(&self) -> bool {
        self.pairings.iter().all(|&k| k == 0)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

/// Pair node samples (`samples[cycle][node]`) with each cycle of the basis.
pub fn pair_samples(band: usize, samples: &[Vec<CMatrix>], basis: &CycleBasis) -> Result<ChernVector> {
    if samples.len() != basis.len() {
        return Err(Error::Dimension { expected: basis.len(), found: samples.len() });
    }
    let mut pairings = Vec::with_capacity(basis.len());
    let mut residuals = Vec::with_capacity(basis.len());
    for (ci, (cyc, s)) in basis.cycles().iter().zip(samples).enumerate() {
        let pc = chern_plaquette_number(s, &cyc.grid)?;
        if pc.residual >= RESIDUAL_THRESHOLD {
            return Err(Error::Inconclusive { cycle: ci, residual: pc.residual });
        }
        pairings.push(pc.value);
        residuals.push(pc.residual);
    }
    Ok(ChernVector { band, pairings, residuals })
}

/// Restrict a projector field to each cycle of the basis and pair.
pub fn pair_with_cycles(p: &MatrixField, basis: &CycleBasis) -> Result<ChernVector> {
    pair_samples(0, &p.sample_cycles(basis)?, basis)
}

/// Pairings of every band's eigenbundle.
pub fn pair_bands(spectra: &BasisSpectra) -> Result<Vec<ChernVector>> {
    let basis = spectra.basis();
    (0..spectra.bands())
        .map(|b| {
            let samples: Vec<Vec<CMatrix>> = spectra.cycles.iter().map(|sd| sd.projectors[b].clone()).collect();
            pair_samples(b, &samples, &basis)
        })
        .collect()
}

/// Per-cycle sums of the pairings over all bands.
pub fn band_sums(vectors: &[ChernVector]) -> Vec<i64> {
    let cycles = vectors.first().map(|v| v.pairings.len()).unwrap_or(0);
    (0..cycles).map(|c| vectors.iter().map(|v| v.pairings[c]).sum()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::fixtures;
    use crate::geometry::{build_sphere_grid, Point};

    fn p1(p: &SpherePoint) -> Result<CMatrix> {
        fixtures::fixture_p1().eval(&Point::Sphere(*p))
    }

    #[test]
    fn fixture_p1_density_matches_closed_form() {
        for &(t, f) in &[(1.0, 1.0), (0.3, 2.5), (4.0, 0.4)] {
            let s = curvature_density(&p1, &SpherePoint::new(t, f), 1e-3).unwrap();
            let want = f.sin() / (4.0 * PI);
            assert!((s.value.re - want).abs() <= 1e-4 * want, "{:?} vs {want}", s.value);
            assert!(s.value.im.abs() <= 1e-6 * want);
        }
    }

    #[test]
    fn constant_projector_has_zero_curvature() {
        let e1 = linalg::bloch_projector(0.0, 0.0, 1.0);
        let f = |_: &SpherePoint| Ok(e1.clone());
        let s = curvature_density(&f, &SpherePoint::new(1.0, 1.0), 1e-3).unwrap();
        assert!(s.value.norm() < 1e-10);
        let grid = build_sphere_grid(16, 8).unwrap();
        assert!(chern_weil_number(&f, &grid).unwrap().value.abs() < 1e-6);
        let samples = alloc::vec![e1; grid.node_count()];
        let pc = chern_plaquette_number(&samples, &grid).unwrap();
        assert_eq!(pc.value, 0);
        assert!(pc.residual < 1e-12);
    }

    #[test]
    fn density_near_pole_is_a_chart_error() {
        assert!(matches!(curvature_density(&p1, &SpherePoint::new(0.0, 1e-4), 1e-3), Err(Error::ChartBoundary { .. })));
    }

    #[test]
    fn fixture_p1_chern_weil_is_one() {
        let grid = build_sphere_grid(200, 100).unwrap();
        let cw = chern_weil_number(&p1, &grid).unwrap();
        assert!((cw.value - 1.0).abs() < 1e-2, "{cw:?}");
        assert!(!cw.inconclusive);
    }

    #[test]
    fn fixture_p1_plaquette_is_plus_one() {
        let grid = build_sphere_grid(64, 32).unwrap();
        let samples: Vec<CMatrix> = grid.nodes().map(|p| p1(&p).unwrap()).collect();
        let pc = chern_plaquette_number(&samples, &grid).unwrap();
        assert_eq!(pc.value, 1);
        assert!(pc.residual < 1e-6);
    }

    #[test]
    fn antipodal_jump_is_a_resolution_error() {
        let grid = build_sphere_grid(8, 5).unwrap();
        let mut samples = alloc::vec![linalg::bloch_projector(0.0, 0.0, 1.0); grid.node_count()];
        samples[3] = linalg::bloch_projector(0.0, 0.0, -1.0);
        assert!(matches!(chern_plaquette_number(&samples, &grid), Err(Error::Resolution { .. })));
    }
}
