//! Small dense linear-algebra helpers shared by the modules.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{CMatrix, Error, Result};

/// Seeded generator used everywhere randomness is needed.
pub type SeededRng = ChaCha8Rng;

pub fn seeded(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

/// `|k><k|` in dimension `d`.
pub fn basis_projector(d: usize, k: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    m[(k, k)] = c(1., 0.);
    m
}

/// `|psi><psi|` for a (not necessarily normalised) vector.
pub fn projector(psi: &DVector<Complex64>) -> CMatrix {
    psi * psi.adjoint()
}

/// Qubit state `(1 + xX + yY + zZ) / 2`.
pub fn bloch_state(x: f64, y: f64, z: f64) -> CMatrix {
    (identity(2) + pauli_x() * c(x, 0.) + pauli_y() * c(y, 0.) + pauli_z() * c(z, 0.)) * c(0.5, 0.)
}

/// Bloch vector `(tr Xρ, tr Yρ, tr Zρ)` of a qubit operator.
pub fn bloch_vector(rho: &CMatrix) -> [f64; 3] {
    [
        (pauli_x() * rho).trace().re,
        (pauli_y() * rho).trace().re,
        (pauli_z() * rho).trace().re,
    ]
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).fold(0.0, |acc, (x, y)| acc.max((x - y).norm()))
}

pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn eigenvalues(m: &CMatrix) -> Vec<f64> {
    let herm = (m + m.adjoint()) * c(0.5, 0.);
    let mut ev: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

pub fn min_eigenvalue(m: &CMatrix) -> f64 {
    eigenvalues(m).first().copied().unwrap_or(0.0)
}

/// Trace norm of a Hermitian matrix.
pub fn trace_norm(m: &CMatrix) -> f64 {
    eigenvalues(m).iter().map(|x| x.abs()).sum()
}

/// `max |U U† - 1|`.
pub fn unitarity_residual(u: &CMatrix) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    max_abs_diff(&(u * u.adjoint()), &identity(u.nrows()))
}

/// Checks that `rho` is a density matrix to within `atol`.
pub fn check_density(rho: &CMatrix, atol: f64) -> Result<()> {
    if rho.nrows() != rho.ncols() {
        return Err(Error::InvalidState("matrix is not square".into()));
    }
    let herm = hermiticity_residual(rho);
    if herm > atol {
        return Err(Error::InvalidState(format!("not Hermitian (residual {herm:.3e})")));
    }
    let tr = rho.trace();
    if (tr - c(1., 0.)).norm() > atol {
        return Err(Error::InvalidState(format!("trace {:.6} != 1", tr.re)));
    }
    let min = min_eigenvalue(rho);
    if min < -atol {
        return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
    }
    Ok(())
}

pub fn ginibre(rows: usize, cols: usize, rng: &mut SeededRng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(re, im)
    })
}

pub fn random_hermitian(d: usize, rng: &mut SeededRng) -> CMatrix {
    let g = ginibre(d, d, rng);
    (&g + g.adjoint()) * c(0.5, 0.)
}

/// Random density matrix from the Hilbert-Schmidt ensemble.
pub fn random_density(d: usize, rng: &mut SeededRng) -> CMatrix {
    let g = ginibre(d, d, rng);
    let rho = &g * g.adjoint();
    let tr = rho.trace();
    rho / tr
}

/// Haar-random pure state vector.
pub fn random_pure_state(d: usize, rng: &mut SeededRng) -> DVector<Complex64> {
    let g = ginibre(d, 1, rng);
    let v = DVector::from_iterator(d, g.iter().copied());
    let norm = v.norm();
    v / c(norm, 0.)
}

/// Matrix with orthonormal columns spanning the columns of `m` (`rows >= cols`).
pub fn orthonormal_columns(m: CMatrix) -> CMatrix {
    let (rows, cols) = m.shape();
    let qr = m.qr();
    let q = qr.q();
    let r = qr.r();
    let mut out = CMatrix::zeros(rows, cols);
    for j in 0..cols {
        // fix the phase so the distribution is Haar when m is Ginibre
        let diag = r[(j, j)];
        let phase = if diag.norm() > 0.0 { diag / c(diag.norm(), 0.) } else { c(1., 0.) };
        for i in 0..rows {
            out[(i, j)] = q[(i, j)] * phase;
        }
    }
    out
}

/// Haar-random unitary.
pub fn haar_unitary(d: usize, rng: &mut SeededRng) -> CMatrix {
    orthonormal_columns(ginibre(d, d, rng))
}

/// Row-major multi-index digits of `index` for the given dims.
pub fn digits(mut index: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
    out
}

/// Binomial coefficient, exact for the small arguments used here.
pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}
