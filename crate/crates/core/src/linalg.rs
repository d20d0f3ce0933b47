//! Small dense complex helpers shared by the numerical modules.

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

pub type CMatrix = DMatrix<Complex64>;

pub const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn frob(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn from_rows(n: usize, entries: &[Complex64]) -> CMatrix {
    CMatrix::from_row_slice(n, n, entries)
}

/// `v v*` for a unit vector `v`.
pub fn outer(v: &nalgebra::DVector<Complex64>) -> CMatrix {
    v * v.adjoint()
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Deviation of `p` from a Hermitian idempotent: `max(‖p² − p‖_F, ‖p − p*‖_F)`.
pub fn projector_defect(p: &CMatrix) -> f64 {
    let sq = p * p - p;
    let herm = p - p.adjoint();
    frob(&sq).max(frob(&herm))
}

/// A unit vector spanning the range of a rank-1 projector: the normalized
/// column of largest norm.
pub fn range_vector(p: &CMatrix) -> nalgebra::DVector<Complex64> {
    let mut best = 0;
    let mut best_norm = -1.0;
    for j in 0..p.ncols() {
        let n = p.column(j).norm();
        if n > best_norm {
            best_norm = n;
            best = j;
        }
    }
    p.column(best).into_owned() / Complex64::new(best_norm, 0.0)
}

/// Pauli-vector projector `½(I + n·σ)` for a unit 3-vector `n`.
pub fn bloch_projector(nx: f64, ny: f64, nz: f64) -> CMatrix {
    from_rows(2, &[c(0.5 * (1.0 + nz), 0.0), c(0.5 * nx, -0.5 * ny), c(0.5 * nx, 0.5 * ny), c(0.5 * (1.0 - nz), 0.0)])
}
