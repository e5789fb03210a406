use num_complex::Complex64;

use super::layout::{check_permutation, SpaceLayout};
use crate::linalg::{self, c};
use crate::{CMatrix, Error, Result, DEFAULT_ATOL};

/// Hermitian operator on the space described by a layout.
#[derive(Clone, Debug, PartialEq)]
pub struct HermOp {
    layout: SpaceLayout,
    entries: CMatrix,
}

impl HermOp {
    /// Wraps `entries`, checking shape and Hermiticity to [`DEFAULT_ATOL`]
    /// (scaled by the largest entry).
    pub fn new(layout: SpaceLayout, entries: CMatrix) -> Result<Self> {
        let n = layout.total_dim();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: entries.nrows() });
        }
        let scale = linalg::max_abs(&entries).max(1.0);
        let herm = linalg::hermiticity_residual(&entries);
        if herm > DEFAULT_ATOL * scale {
            return Err(Error::NotHermitian(herm));
        }
        Ok(Self { layout, entries })
    }

    pub(crate) fn from_parts(layout: SpaceLayout, entries: CMatrix) -> Self {
        debug_assert_eq!(entries.nrows(), layout.total_dim());
        Self { layout, entries }
    }

    /// Like `from_parts`, but checks the shape.
    pub(crate) fn from_parts_checked(layout: SpaceLayout, entries: CMatrix) -> Result<Self> {
        let n = layout.total_dim();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n, found: entries.nrows() });
        }
        Ok(Self { layout, entries })
    }

    pub fn identity(layout: SpaceLayout) -> Self {
        let n = layout.total_dim();
        Self { layout, entries: CMatrix::identity(n, n) }
    }

    pub fn zeros(layout: SpaceLayout) -> Self {
        let n = layout.total_dim();
        Self { layout, entries: CMatrix::zeros(n, n) }
    }

    pub fn layout(&self) -> &SpaceLayout {
        &self.layout
    }

    pub fn entries(&self) -> &CMatrix {
        &self.entries
    }

    pub fn into_entries(self) -> CMatrix {
        self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    /// Same entries on a layout with identical dims.
    pub fn with_layout(&self, layout: SpaceLayout) -> Result<Self> {
        if layout.dims() != self.layout.dims() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: layout.total_dim() });
        }
        Ok(Self { layout, entries: self.entries.clone() })
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { layout: self.layout.clone(), entries: &self.entries * c(s, 0.) }
    }

    /// `self / tr(self)`.
    pub fn normalized(&self) -> Self {
        self.scale(1.0 / self.trace())
    }

    fn check_same_space(&self, other: &HermOp) -> Result<()> {
        if self.layout.dims() != other.layout.dims() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(())
    }

    pub fn add(&self, other: &HermOp) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(Self { layout: self.layout.clone(), entries: &self.entries + &other.entries })
    }

    pub fn sub(&self, other: &HermOp) -> Result<Self> {
        self.check_same_space(other)?;
        Ok(Self { layout: self.layout.clone(), entries: &self.entries - &other.entries })
    }

    /// `max |self - other|` over entries.
    pub fn max_abs_diff(&self, other: &HermOp) -> Result<f64> {
        self.check_same_space(other)?;
        Ok(linalg::max_abs_diff(&self.entries, &other.entries))
    }

    pub fn max_abs(&self) -> f64 {
        linalg::max_abs(&self.entries)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        linalg::min_eigenvalue(&self.entries)
    }

    pub fn trace_norm(&self) -> f64 {
        linalg::trace_norm(&self.entries)
    }

    /// `tr_S[(R ⊗ 1) self]` where `S` are the factors named by `labels`.
    ///
    /// `r` acts on those factors in the order given by `labels` (not layout
    /// order). The result lives on the remaining factors in layout order.
    pub fn contract<S: AsRef<str>>(&self, labels: &[S], r: &CMatrix) -> Result<HermOp> {
        let con = self.layout.positions(labels)?;
        let dims = self.layout.dims();
        let con_dim: usize = con.iter().map(|&p| dims[p]).product();
        if r.nrows() != con_dim || r.ncols() != con_dim {
            return Err(Error::DimensionMismatch { expected: con_dim, found: r.nrows() });
        }
        let kept: Vec<usize> = (0..dims.len()).filter(|p| !con.contains(p)).collect();
        let (kidx, cidx) = split_indices(&dims, &kept, &con);
        let kdim: usize = kept.iter().map(|&p| dims[p]).product();
        let n = self.dim();
        let w = self.entries.as_slice();
        let rs = r.as_slice();
        let mut out = vec![Complex64::new(0., 0.); kdim * kdim];
        for col in 0..n {
            let (kc, cc) = (kidx[col], cidx[col]);
            let wcol = &w[col * n..(col + 1) * n];
            for row in 0..n {
                let v = wcol[row];
                if v.re == 0.0 && v.im == 0.0 {
                    continue;
                }
                // R[cc, cr] in column-major storage
                let coeff = rs[cc + cidx[row] * con_dim];
                if coeff.re == 0.0 && coeff.im == 0.0 {
                    continue;
                }
                out[kidx[row] + kc * kdim] += coeff * v;
            }
        }
        Ok(HermOp::from_parts(self.layout.select(&kept), CMatrix::from_vec(kdim, kdim, out)))
    }
}

/// Row-major sub-indices of every full index for the `kept` and `con`
/// position lists (each list ordered as given).
pub(crate) fn split_indices(dims: &[usize], kept: &[usize], con: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let strides = |ps: &[usize]| {
        let mut s = vec![0usize; dims.len()];
        let mut acc = 1;
        for &p in ps.iter().rev() {
            s[p] = acc;
            acc *= dims[p];
        }
        s
    };
    let ks = strides(kept);
    let cs = strides(con);
    let n: usize = dims.iter().product();
    let mut kidx = vec![0; n];
    let mut cidx = vec![0; n];
    let mut digit = vec![0usize; dims.len()];
    let (mut k, mut c) = (0usize, 0usize);
    for idx in 0..n {
        kidx[idx] = k;
        cidx[idx] = c;
        // increment the row-major odometer
        for f in (0..dims.len()).rev() {
            digit[f] += 1;
            k += ks[f];
            c += cs[f];
            if digit[f] < dims[f] {
                break;
            }
            k -= ks[f] * dims[f];
            c -= cs[f] * dims[f];
            digit[f] = 0;
        }
    }
    (kidx, cidx)
}

/// Kronecker product; the layout is the concatenation of both layouts.
pub fn kron(a: &HermOp, b: &HermOp) -> Result<HermOp> {
    let layout = a.layout.concat(&b.layout)?;
    Ok(HermOp::from_parts(layout, a.entries.kronecker(&b.entries)))
}

/// Partial trace keeping the factors named in `kept` (result in layout order).
pub fn partial_trace<S: AsRef<str>>(a: &HermOp, kept: &[S]) -> Result<HermOp> {
    let mut keep = a.layout.positions(kept)?;
    keep.sort_unstable();
    let dims = a.layout.dims();
    let traced: Vec<usize> = (0..dims.len()).filter(|p| !keep.contains(p)).collect();
    let (kidx, cidx) = split_indices(&dims, &keep, &traced);
    let kdim: usize = keep.iter().map(|&p| dims[p]).product();
    let tdim: usize = traced.iter().map(|&p| dims[p]).product();
    // full index for each (kept, traced) pair
    let mut full = vec![0usize; kdim * tdim];
    for (idx, (&k, &t)) in kidx.iter().zip(cidx.iter()).enumerate() {
        full[k * tdim + t] = idx;
    }
    let n = a.dim();
    let w = a.entries.as_slice();
    let out = CMatrix::from_fn(kdim, kdim, |i, j| {
        let mut acc = Complex64::new(0., 0.);
        for t in 0..tdim {
            acc += w[full[i * tdim + t] + full[j * tdim + t] * n];
        }
        acc
    });
    Ok(HermOp::from_parts(a.layout.select(&keep), out))
}

/// `(tr_x a) ⊗ 1_x / d_x`, arranged back into the layout of `a`.
pub fn trace_and_replace<S: AsRef<str>>(a: &HermOp, x: &[S]) -> Result<HermOp> {
    let xs = a.layout.positions(x)?;
    let dims = a.layout.dims();
    let kept: Vec<usize> = (0..dims.len()).filter(|p| !xs.contains(p)).collect();
    let kept_labels: Vec<&str> = kept.iter().map(|&p| a.layout.factors()[p].label.as_str()).collect();
    let reduced = partial_trace(a, &kept_labels)?;
    let dx: usize = xs.iter().map(|&p| dims[p]).product();
    let (kidx, cidx) = split_indices(&dims, &kept, &xs);
    let r = reduced.entries();
    let inv = c(1.0 / dx as f64, 0.);
    let out = CMatrix::from_fn(a.dim(), a.dim(), |i, j| {
        if cidx[i] == cidx[j] {
            r[(kidx[i], kidx[j])] * inv
        } else {
            Complex64::new(0., 0.)
        }
    });
    Ok(HermOp::from_parts(a.layout.clone(), out))
}

/// Entry permutation moving factor `i` to position `perm[i]`.
pub(crate) fn permute_entries(entries: &CMatrix, dims: &[usize], perm: &[usize]) -> CMatrix {
    let mut new_dims = vec![0; dims.len()];
    for (i, &p) in perm.iter().enumerate() {
        new_dims[p] = dims[i];
    }
    // stride of each old factor inside the new ordering
    let mut new_strides = vec![0usize; dims.len()];
    let mut acc = 1;
    for p in (0..dims.len()).rev() {
        new_strides[p] = acc;
        acc *= new_dims[p];
    }
    let map: Vec<usize> = (0..entries.nrows())
        .map(|idx| {
            let d = linalg::digits(idx, dims);
            (0..dims.len()).map(|f| d[f] * new_strides[perm[f]]).sum()
        })
        .collect();
    let n = entries.nrows();
    let src = entries.as_slice();
    let mut out = vec![Complex64::new(0., 0.); n * n];
    for col in 0..n {
        let nc = map[col];
        for row in 0..n {
            out[map[row] + nc * n] = src[row + col * n];
        }
    }
    CMatrix::from_vec(n, n, out)
}

/// `U(perm) a U(perm)†` where factor `i` moves to position `perm[i]`; the
/// layout is permuted alongside.
pub fn permute_factors(a: &HermOp, perm: &[usize]) -> Result<HermOp> {
    check_permutation(perm, a.layout.len())?;
    let layout = a.layout.permuted(perm)?;
    let entries = permute_entries(&a.entries, &a.layout.dims(), perm);
    Ok(HermOp::from_parts(layout, entries))
}

/// Hilbert-Schmidt pairing `tr(a† b)` (real for Hermitian inputs).
pub fn hs_inner(a: &HermOp, b: &HermOp) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(a.entries.iter().zip(b.entries.iter()).map(|(x, y)| (x.conj() * y).re).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{basis_projector, identity, pauli_x, pauli_z};
    use crate::tensor::{Factor, Role};

    fn qubit(label: &str) -> SpaceLayout {
        SpaceLayout::state(label, 2)
    }

    fn op(label: &str, m: CMatrix) -> HermOp {
        HermOp::new(qubit(label), m).unwrap()
    }

    fn bell() -> HermOp {
        let mut m = CMatrix::zeros(4, 4);
        for &(i, j) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
            m[(i, j)] = c(0.5, 0.);
        }
        HermOp::new(qubit("a").concat(&qubit("b")).unwrap(), m).unwrap()
    }

    #[test]
    fn kron_examples() {
        let i4 = kron(&op("a", identity(2)), &op("b", identity(2))).unwrap();
        assert_eq!(i4.entries(), &identity(4));
        let p = kron(&op("a", basis_projector(2, 0)), &op("b", basis_projector(2, 1))).unwrap();
        assert_eq!(p.entries()[(1, 1)], c(1., 0.));
        assert!((p.trace() - 1.0).abs() < 1e-15);
        let zz = kron(&op("a", pauli_z()), &op("b", pauli_z())).unwrap();
        let expected = [1.0, -1.0, -1.0, 1.0];
        for (k, e) in expected.iter().enumerate() {
            assert_eq!(zz.entries()[(k, k)], c(*e, 0.));
        }
        assert!(matches!(kron(&op("a", pauli_z()), &op("a", pauli_z())), Err(Error::LabelCollision(_))));
    }

    #[test]
    fn partial_trace_examples() {
        let b = bell();
        for keep in ["a", "b"] {
            let r = partial_trace(&b, &[keep]).unwrap();
            assert!(linalg::max_abs_diff(r.entries(), &(identity(2) * c(0.5, 0.))) < 1e-15);
        }
        let a = op("a", pauli_x() + identity(2));
        let bb = op("b", pauli_z() * c(0.3, 0.) + identity(2) * c(2., 0.));
        let r = partial_trace(&kron(&a, &bb).unwrap(), &["a"]).unwrap();
        assert!(linalg::max_abs_diff(r.entries(), &(a.entries() * c(bb.trace(), 0.))) < 1e-14);
        assert!(matches!(partial_trace(&b, &["zz"]), Err(Error::UnknownLabel(_))));
    }

    #[test]
    fn identity_channel_marginal() {
        // tr_O [[1_2]] = 1_2 on the input
        let layout = SpaceLayout::single_site("A", 2, 2);
        let mut m = CMatrix::zeros(4, 4);
        for &(i, j) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
            m[(i, j)] = c(1., 0.);
        }
        let choi = HermOp::new(layout, m).unwrap();
        let r = partial_trace(&choi, &["A_I"]).unwrap();
        assert_eq!(r.entries(), &identity(2));
    }

    #[test]
    fn trace_and_replace_examples() {
        let i4 = kron(&op("a", identity(2)), &op("b", identity(2))).unwrap();
        assert_eq!(trace_and_replace(&i4, &["a"]).unwrap(), i4);
        let zi = kron(&op("a", pauli_z()), &op("b", identity(2))).unwrap();
        assert!(trace_and_replace(&zi, &["a"]).unwrap().max_abs() < 1e-15);
        let r = trace_and_replace(&bell(), &["a"]).unwrap();
        assert!(linalg::max_abs_diff(r.entries(), &(identity(4) * c(0.25, 0.))) < 1e-15);
    }

    #[test]
    fn permute_examples() {
        let a = op("a", pauli_x() + identity(2) * c(2., 0.));
        let b = op("b", pauli_z());
        let ab = kron(&a, &b).unwrap();
        assert_eq!(permute_factors(&ab, &[0, 1]).unwrap(), ab);
        let swapped = permute_factors(&ab, &[1, 0]).unwrap();
        let ba = kron(&b, &a).unwrap();
        assert_eq!(swapped, ba);
        let bs = permute_factors(&bell(), &[1, 0]).unwrap();
        assert!(linalg::max_abs_diff(bs.entries(), bell().entries()) < 1e-15);
        assert!(permute_factors(&ab, &[0, 0]).is_err());
    }

    #[test]
    fn hs_inner_examples() {
        assert_eq!(hs_inner(&op("a", identity(2)), &op("a", identity(2))).unwrap(), 2.0);
        assert_eq!(hs_inner(&op("a", pauli_z()), &op("a", pauli_x())).unwrap(), 0.0);
        let quarter = HermOp::new(bell().layout().clone(), identity(4) * c(0.25, 0.)).unwrap();
        assert!((hs_inner(&bell(), &quarter).unwrap() - 0.25).abs() < 1e-15);
        assert!(hs_inner(&bell(), &op("a", identity(2))).is_err());
    }

    #[test]
    fn contract_matches_explicit_product() {
        let mut rng = linalg::seeded(11);
        let layout = SpaceLayout::new(vec![
            Factor::new("x", "X", Role::Input, 1, 2),
            Factor::new("y", "Y", Role::Input, 1, 3),
            Factor::new("z", "Z", Role::Input, 1, 2),
        ])
        .unwrap();
        let w = HermOp::new(layout, linalg::random_hermitian(12, &mut rng)).unwrap();
        let r = linalg::random_hermitian(4, &mut rng);
        // contract over (z, x) in that order: move z, x to the front in that order
        let got = w.contract(&["z", "x"], &r).unwrap();
        let front = permute_factors(&w, &[1, 2, 0]).unwrap(); // x->1, y->2, z->0 gives [z, x, y]
        let full = r.kronecker(&identity(3)) * front.entries();
        let expected = partial_trace(&HermOp::from_parts(front.layout().clone(), full), &["y"]).unwrap();
        assert!(linalg::max_abs_diff(got.entries(), expected.entries()) < 1e-12);
    }
}
