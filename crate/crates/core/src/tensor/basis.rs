//! Orthonormal Hermitian operator basis and coordinate transforms.
//!
//! Each factor of dimension `d` carries the generalised Gell-Mann basis
//! (normalised identity first). A layout uses the tensor-product basis with
//! a row-major multi-index over factors, so coordinates of a product
//! operator are the Kronecker product of the factor coordinates.

use std::ops::{AddAssign, Mul};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::layout::SpaceLayout;
use super::op::HermOp;
use crate::linalg::c;
use crate::{par, CMatrix, Error, Result};

/// Generalised Gell-Mann basis of dimension `d`, orthonormal in the
/// Hilbert-Schmidt inner product.
///
/// Order: `1/sqrt(d)`, then for each `j < k` the symmetric and antisymmetric
/// off-diagonal pair, then the traceless diagonal elements. For `d = 2`
/// this is `(1, X, Y, Z) / sqrt(2)`.
pub fn ggm_basis(d: usize) -> Vec<CMatrix> {
    let mut out = Vec::with_capacity(d * d);
    out.push(CMatrix::identity(d, d) * c(1.0 / (d as f64).sqrt(), 0.));
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for j in 0..d {
        for k in j + 1..d {
            let mut sym = CMatrix::zeros(d, d);
            sym[(j, k)] = c(s, 0.);
            sym[(k, j)] = c(s, 0.);
            out.push(sym);
            let mut anti = CMatrix::zeros(d, d);
            anti[(j, k)] = c(0., -s);
            anti[(k, j)] = c(0., s);
            out.push(anti);
        }
    }
    for l in 1..d {
        let norm = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut diag = CMatrix::zeros(d, d);
        for m in 0..l {
            diag[(m, m)] = c(norm, 0.);
        }
        diag[(l, l)] = c(-(l as f64) * norm, 0.);
        out.push(diag);
    }
    out
}

/// Applies `m` along axis `mode` of a row-major tensor with the given shape.
///
/// Returns the new data; the axis length becomes `m.nrows()`. Zero entries
/// of `m` are skipped, so sparse factor maps are cheap.
pub fn mode_product<T>(data: &[T], shape: &[usize], mode: usize, m: &DMatrix<T>) -> Vec<T>
where
    T: nalgebra::Scalar + Copy + Default + PartialEq + AddAssign + Mul<Output = T> + Send + Sync,
{
    let rows = sparse_rows(m);
    mode_product_sparse(data, shape, mode, &rows)
}

pub(crate) fn sparse_rows<T>(m: &DMatrix<T>) -> Vec<Vec<(usize, T)>>
where
    T: nalgebra::Scalar + Copy + Default + PartialEq,
{
    let zero = T::default();
    (0..m.nrows())
        .map(|a| (0..m.ncols()).filter(|&p| m[(a, p)] != zero).map(|p| (p, m[(a, p)])).collect())
        .collect()
}

pub(crate) fn mode_product_sparse<T>(data: &[T], shape: &[usize], mode: usize, rows: &[Vec<(usize, T)>]) -> Vec<T>
where
    T: Copy + Default + AddAssign + Mul<Output = T> + Send + Sync,
{
    let outer: usize = shape[..mode].iter().product();
    let inner: usize = shape[mode + 1..].iter().product();
    let m_in = shape[mode];
    let m_out = rows.len();
    debug_assert_eq!(data.len(), outer * m_in * inner);
    let mut out = vec![T::default(); outer * m_out * inner];
    par::for_each_chunk_mut(&mut out, inner, |k, chunk| {
        let (o, a) = (k / m_out, k % m_out);
        let base = o * m_in * inner;
        for &(p, coeff) in &rows[a] {
            let src = &data[base + p * inner..base + (p + 1) * inner];
            for (dst, &x) in chunk.iter_mut().zip(src) {
                *dst += coeff * x;
            }
        }
    });
    out
}

/// Interleaves the row and column multi-indices: entry `(i, j)` goes to
/// position `(i1 j1 i2 j2 ...)` in row-major order.
fn interleave(m: &CMatrix, dims: &[usize]) -> Vec<Complex64> {
    let (row_off, col_off) = interleave_offsets(dims);
    let n = m.nrows();
    let mut out = vec![Complex64::new(0., 0.); n * n];
    for j in 0..n {
        for i in 0..n {
            out[row_off[i] + col_off[j]] = m[(i, j)];
        }
    }
    out
}

fn deinterleave(data: &[Complex64], dims: &[usize]) -> CMatrix {
    let (row_off, col_off) = interleave_offsets(dims);
    let n: usize = dims.iter().product();
    CMatrix::from_fn(n, n, |i, j| data[row_off[i] + col_off[j]])
}

fn interleave_offsets(dims: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut strides = vec![1usize; dims.len()];
    for f in (0..dims.len().saturating_sub(1)).rev() {
        strides[f] = strides[f + 1] * dims[f + 1] * dims[f + 1];
    }
    let n: usize = dims.iter().product();
    let mut row = vec![0usize; n];
    let mut col = vec![0usize; n];
    for idx in 0..n {
        let d = crate::linalg::digits(idx, dims);
        for f in 0..dims.len() {
            row[idx] += d[f] * dims[f] * strides[f];
            col[idx] += d[f] * strides[f];
        }
    }
    (row, col)
}

/// Per-factor map `(i, j) -> a` with entries `G_a[j, i]`, i.e. `tr(G_a X)`.
fn analysis_matrix(d: usize) -> CMatrix {
    let basis = ggm_basis(d);
    CMatrix::from_fn(d * d, d * d, |a, p| basis[a][(p % d, p / d)])
}

/// Per-factor map `a -> (i, j)` with entries `G_a[i, j]`.
fn synthesis_matrix(d: usize) -> CMatrix {
    let basis = ggm_basis(d);
    CMatrix::from_fn(d * d, d * d, |p, a| basis[a][(p / d, p % d)])
}

/// Coordinates `tr(B_a X)` of `x` in the product basis of its layout.
pub fn coordinates(x: &HermOp) -> DVector<f64> {
    let dims = x.layout().dims();
    let mut data = interleave(x.entries(), &dims);
    let mut shape: Vec<usize> = dims.iter().map(|d| d * d).collect();
    for (f, &d) in dims.iter().enumerate() {
        if d == 1 {
            continue;
        }
        data = mode_product(&data, &shape, f, &analysis_matrix(d));
        shape[f] = d * d;
    }
    DVector::from_iterator(data.len(), data.iter().map(|z| z.re))
}

/// Inverse of [`coordinates`]: `sum_a c_a B_a` on `layout`.
pub fn from_coordinates(layout: &SpaceLayout, coords: &[f64]) -> Result<HermOp> {
    let dims = layout.dims();
    let n = layout.total_dim();
    if coords.len() != n * n {
        return Err(Error::DimensionMismatch { expected: n * n, found: coords.len() });
    }
    let mut data: Vec<Complex64> = coords.iter().map(|&x| c(x, 0.)).collect();
    let shape: Vec<usize> = dims.iter().map(|d| d * d).collect();
    for (f, &d) in dims.iter().enumerate() {
        if d == 1 {
            continue;
        }
        data = mode_product(&data, &shape, f, &synthesis_matrix(d));
    }
    let mut m = deinterleave(&data, &dims);
    // exact Hermitian symmetrisation removes rounding asymmetry
    m = (&m + m.adjoint()) * c(0.5, 0.);
    Ok(HermOp::from_parts(layout.clone(), m))
}

/// Basis element `B_index` of the product basis on `layout`.
pub fn basis_element(layout: &SpaceLayout, index: usize) -> Result<HermOp> {
    let dims = layout.dims();
    let n = layout.total_dim();
    if index >= n * n {
        return Err(Error::DimensionMismatch { expected: n * n, found: index + 1 });
    }
    let sq: Vec<usize> = dims.iter().map(|d| d * d).collect();
    let digits = crate::linalg::digits(index, &sq);
    let mut m = CMatrix::identity(1, 1);
    for (&d, &a) in dims.iter().zip(&digits) {
        m = m.kronecker(&ggm_basis(d)[a]);
    }
    Ok(HermOp::from_parts(layout.clone(), m))
}

/// Coordinates of an operator on `n` trial copies, grouped per trial.
///
/// Returns the coordinate vector together with the per-trial coordinate
/// dimension. Because factors of a trial are contiguous in reference order,
/// the row-major multi-index splits into one axis per trial.
pub fn trial_coordinates(x: &HermOp) -> Result<(DVector<f64>, usize)> {
    let layout = x.layout();
    if !layout.is_trial_contiguous() {
        return Err(Error::InvalidLayout("trial factors are not contiguous".into()));
    }
    let n = layout.trial_count().max(1);
    let per_trial = layout.trial_positions(layout.trials()[0]).iter().map(|&p| layout.dims()[p]).product::<usize>();
    debug_assert_eq!(per_trial.pow(n as u32), x.dim());
    Ok((coordinates(x), per_trial * per_trial))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{self, identity, pauli_x, pauli_y, pauli_z};
    use crate::tensor::op::kron;
    use proptest::prelude::*;

    #[test]
    fn qubit_basis_is_pauli() {
        let b = ggm_basis(2);
        let s = c(std::f64::consts::FRAC_1_SQRT_2, 0.);
        for (got, want) in b.iter().zip([identity(2), pauli_x(), pauli_y(), pauli_z()]) {
            assert!(linalg::max_abs_diff(got, &(want * s)) < 1e-15);
        }
    }

    #[test]
    fn basis_is_orthonormal_and_hermitian() {
        for d in 1..=4 {
            let b = ggm_basis(d);
            assert_eq!(b.len(), d * d);
            for (i, x) in b.iter().enumerate() {
                assert!(linalg::hermiticity_residual(x) < 1e-15);
                for (j, y) in b.iter().enumerate() {
                    let ip = (x * y).trace();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((ip - c(want, 0.)).norm() < 1e-14, "d={d} i={i} j={j}");
                }
            }
        }
    }

    #[test]
    fn mode_product_matches_dense() {
        // shape (2, 3, 2), apply a 4x3 map on the middle axis
        let data: Vec<f64> = (0..12).map(|x| x as f64).collect();
        let m = DMatrix::from_fn(4, 3, |a, p| (a * 3 + p) as f64 - 4.0);
        let out = mode_product(&data, &[2, 3, 2], 1, &m);
        for o in 0..2 {
            for a in 0..4 {
                for u in 0..2 {
                    let want: f64 = (0..3).map(|p| m[(a, p)] * data[o * 6 + p * 2 + u]).sum();
                    assert_eq!(out[o * 8 + a * 2 + u], want);
                }
            }
        }
    }

    #[test]
    fn product_coordinates_are_kronecker() {
        let mut rng = linalg::seeded(3);
        let a = HermOp::new(SpaceLayout::state("a", 2), linalg::random_hermitian(2, &mut rng)).unwrap();
        let b = HermOp::new(SpaceLayout::state("b", 3), linalg::random_hermitian(3, &mut rng)).unwrap();
        let ab = kron(&a, &b).unwrap();
        let want = coordinates(&a).kronecker(&coordinates(&b));
        assert!((coordinates(&ab) - want).amax() < 1e-13);
    }

    #[test]
    fn basis_element_has_unit_coordinate() {
        let layout = SpaceLayout::sites(&[("A", 2, 3)]).unwrap();
        for index in [0, 5, 17, 35] {
            let e = basis_element(&layout, index).unwrap();
            let coords = coordinates(&e);
            for (k, v) in coords.iter().enumerate() {
                let want = if k == index { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-14);
            }
        }
    }

    proptest! {
        #[test]
        fn coordinates_round_trip(seed in any::<u64>(), d1 in 1usize..4, d2 in 1usize..4) {
            let mut rng = linalg::seeded(seed);
            let layout = SpaceLayout::sites(&[("A", d1, d2)]).unwrap();
            let m = linalg::random_hermitian(d1 * d2, &mut rng);
            let x = HermOp::new(layout.clone(), m).unwrap();
            let coords = coordinates(&x);
            // Parseval: HS norm equals Euclidean norm of coordinates
            let hs: f64 = x.entries().iter().map(|z| z.norm_sqr()).sum();
            prop_assert!((coords.norm_squared() - hs).abs() < 1e-10 * hs.max(1.0));
            let back = from_coordinates(&layout, coords.as_slice()).unwrap();
            prop_assert!(back.max_abs_diff(&x).unwrap() < 1e-12);
        }
    }
}
