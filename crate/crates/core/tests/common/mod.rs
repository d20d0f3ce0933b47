#![allow(dead_code)]

use eigenbundle::chern::{band_sums, ChernVector};
use eigenbundle::construct::ProjectorFamily;
use eigenbundle::geometry::{build_product_domain, build_sphere_grid, CycleBasis, SphereGrid};
use eigenbundle::linalg::CMatrix;
use eigenbundle::spectral::{order_on_basis, BasisSpectra};
use eigenbundle::MatrixField;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;

pub const CLUTCHING_TUPLES: [&[i64]; 5] = [&[1, -1], &[2, -2], &[2, -1, -1], &[3, 0, -3], &[1, 1, -2]];

pub fn sphere(nt: usize, np: usize) -> (SphereGrid, CycleBasis) {
    let g = build_sphere_grid(nt, np).unwrap();
    let b = CycleBasis::sphere(&g);
    (g, b)
}

/// `S² × S²` with the given per-factor resolution and basepoints at node 0.
pub fn product(nt: usize, np: usize) -> CycleBasis {
    let g = build_sphere_grid(nt, np).unwrap();
    build_product_domain(g.clone(), g, 0, 0).unwrap().cycle_basis()
}

pub fn pairings(v: &[ChernVector]) -> Vec<Vec<i64>> {
    v.iter().map(|c| c.pairings.clone()).collect()
}

pub fn max_residual(v: &[ChernVector]) -> f64 {
    v.iter().map(ChernVector::max_residual).fold(0.0, f64::max)
}

/// Family pairings, asserting the sum rule on the way.
pub fn family_pairings(fam: &ProjectorFamily, basis: &CycleBasis) -> Vec<ChernVector> {
    let v = fam.pairings(basis).unwrap();
    assert!(band_sums(&v).iter().all(|&s| s == 0), "band sums {:?}", band_sums(&v));
    v
}

/// Spectral decomposition, asserting projector quality and the sum rule.
pub fn spectra(field: &MatrixField, basis: &CycleBasis) -> BasisSpectra {
    let s = order_on_basis(field, basis).unwrap();
    for sd in &s.cycles {
        assert!(sd.certificate.passed);
        assert!(sd.projector_defect() < 1e-8, "defect {}", sd.projector_defect());
    }
    s
}

pub fn random_unitary<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let m = DMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    m.qr().q()
}

/// A random rank-1 projector `vv*` with `|v| = 1`.
pub fn random_line<R: Rng>(rng: &mut R, n: usize) -> CMatrix {
    let u = random_unitary(rng, n);
    let v = u.column(0).clone_owned();
    &v * v.adjoint()
}
