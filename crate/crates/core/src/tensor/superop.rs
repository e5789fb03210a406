use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::basis::{self, coordinates, from_coordinates};
use super::layout::SpaceLayout;
use super::op::{trace_and_replace, HermOp};
use crate::{Error, Result};

const CHOP: f64 = 1e-14;

/// Domain or codomain of a superoperator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Space {
    /// Hermitian operators on a layout, in product-basis coordinates.
    Operators(SpaceLayout),
    /// Abstract real coordinate space of the given dimension.
    Coordinates(usize),
}

impl Space {
    /// Number of real coordinates.
    pub fn dim(&self) -> usize {
        match self {
            Space::Operators(l) => l.total_dim() * l.total_dim(),
            Space::Coordinates(k) => *k,
        }
    }

    pub fn layout(&self) -> Option<&SpaceLayout> {
        match self {
            Space::Operators(l) => Some(l),
            Space::Coordinates(_) => None,
        }
    }

    fn tensor(&self, other: &Space) -> Space {
        match (self, other) {
            (Space::Operators(a), Space::Operators(b)) => Space::Operators(concat_relabel(a, b)),
            _ => Space::Coordinates(self.dim() * other.dim()),
        }
    }
}

fn concat_relabel(a: &SpaceLayout, b: &SpaceLayout) -> SpaceLayout {
    match a.concat(b) {
        Ok(l) => l,
        Err(_) => a.concat(&b.with_label_suffix("'")).unwrap_or_else(|_| {
            SpaceLayout::unchecked(
                a.factors().iter().cloned().chain(b.with_label_suffix("''").factors().iter().cloned()).collect(),
            )
            .expect("suffixed labels are distinct")
        }),
    }
}

/// Real-linear map on operator coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct SuperOp {
    pub domain: Space,
    pub codomain: Space,
    pub matrix: DMatrix<f64>,
}

impl SuperOp {
    pub fn new(domain: Space, codomain: Space, matrix: DMatrix<f64>) -> Result<Self> {
        if matrix.ncols() != domain.dim() {
            return Err(Error::DimensionMismatch { expected: domain.dim(), found: matrix.ncols() });
        }
        if matrix.nrows() != codomain.dim() {
            return Err(Error::DimensionMismatch { expected: codomain.dim(), found: matrix.nrows() });
        }
        Ok(Self { domain, codomain, matrix })
    }

    pub fn identity(layout: &SpaceLayout) -> Self {
        let n = layout.total_dim() * layout.total_dim();
        Self {
            domain: Space::Operators(layout.clone()),
            codomain: Space::Operators(layout.clone()),
            matrix: DMatrix::identity(n, n),
        }
    }

    /// Matrix of `f` from its action on the basis of `domain`.
    pub fn from_linear_map<F>(domain: &SpaceLayout, codomain: Space, f: F) -> Result<Self>
    where
        F: Fn(&HermOp) -> Result<DVector<f64>>,
    {
        let n = domain.total_dim() * domain.total_dim();
        let mut matrix = DMatrix::zeros(codomain.dim(), n);
        for a in 0..n {
            // basis images carry O(1e-17) rounding; chop it so sparse maps stay sparse
            let col = f(&basis::basis_element(domain, a)?)?.map(|x| if x.abs() < CHOP { 0.0 } else { x });
            if col.len() != codomain.dim() {
                return Err(Error::DimensionMismatch { expected: codomain.dim(), found: col.len() });
            }
            matrix.set_column(a, &col);
        }
        Self::new(Space::Operators(domain.clone()), codomain, matrix)
    }

    /// Matrix of an operator-valued linear map.
    pub fn from_operator_map<F>(domain: &SpaceLayout, codomain: &SpaceLayout, f: F) -> Result<Self>
    where
        F: Fn(&HermOp) -> Result<HermOp>,
    {
        Self::from_linear_map(domain, Space::Operators(codomain.clone()), |b| {
            let out = f(b)?;
            if out.layout().dims() != codomain.dims() {
                return Err(Error::DimensionMismatch { expected: codomain.total_dim(), found: out.dim() });
            }
            Ok(coordinates(&out))
        })
    }

    /// The functional `x -> tr(r x)`.
    pub fn expectation(r: &HermOp) -> Self {
        let row = coordinates(r);
        Self {
            domain: Space::Operators(r.layout().clone()),
            codomain: Space::Coordinates(1),
            matrix: DMatrix::from_row_slice(1, row.len(), row.as_slice()),
        }
    }

    /// The projector `x -> trace_and_replace(x, labels)`.
    pub fn trace_and_replace_map<S: AsRef<str>>(layout: &SpaceLayout, labels: &[S]) -> Result<Self> {
        layout.positions(labels)?;
        Self::from_operator_map(layout, layout, |b| trace_and_replace(b, labels))
    }

    /// `I - self` for an endomorphism.
    pub fn complement(&self) -> Result<Self> {
        if self.domain.dim() != self.codomain.dim() {
            return Err(Error::DimensionMismatch { expected: self.domain.dim(), found: self.codomain.dim() });
        }
        let n = self.matrix.nrows();
        Ok(Self {
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: DMatrix::identity(n, n) - &self.matrix,
        })
    }

    /// Stacks maps with a common domain into one map into the direct sum.
    pub fn stack(maps: &[SuperOp]) -> Result<Self> {
        let first = maps.first().ok_or_else(|| Error::EmptyConstraintSet("no maps to stack".into()))?;
        let rows: usize = maps.iter().map(|m| m.matrix.nrows()).sum();
        let mut matrix = DMatrix::zeros(rows, first.matrix.ncols());
        let mut r0 = 0;
        for m in maps {
            if m.domain.dim() != first.domain.dim() {
                return Err(Error::DimensionMismatch { expected: first.domain.dim(), found: m.domain.dim() });
            }
            matrix.rows_mut(r0, m.matrix.nrows()).copy_from(&m.matrix);
            r0 += m.matrix.nrows();
        }
        Ok(Self { domain: first.domain.clone(), codomain: Space::Coordinates(rows), matrix })
    }

    pub fn apply(&self, x: &HermOp) -> Result<DVector<f64>> {
        match &self.domain {
            Space::Operators(l) if l.dims() == x.layout().dims() => Ok(&self.matrix * coordinates(x)),
            _ => Err(Error::DimensionMismatch { expected: self.domain.dim(), found: x.dim() * x.dim() }),
        }
    }

    pub fn apply_coords(&self, v: &DVector<f64>) -> Result<DVector<f64>> {
        if v.len() != self.domain.dim() {
            return Err(Error::DimensionMismatch { expected: self.domain.dim(), found: v.len() });
        }
        Ok(&self.matrix * v)
    }

    /// Result of [`apply`](Self::apply) as an operator, when the codomain is
    /// an operator space.
    pub fn apply_op(&self, x: &HermOp) -> Result<HermOp> {
        let coords = self.apply(x)?;
        match &self.codomain {
            Space::Operators(l) => from_coordinates(l, coords.as_slice()),
            Space::Coordinates(_) => Err(Error::InvalidLayout("codomain is not an operator space".into())),
        }
    }

    /// `self ⊗ other`; colliding domain labels on the right are primed.
    pub fn tensor(&self, other: &SuperOp) -> SuperOp {
        SuperOp {
            domain: self.domain.tensor(&other.domain),
            codomain: self.codomain.tensor(&other.codomain),
            matrix: self.matrix.kronecker(&other.matrix),
        }
    }

    /// Adjoint with respect to the Hilbert-Schmidt pairing, which is the
    /// transpose in an orthonormal Hermitian basis.
    pub fn adjoint(&self) -> SuperOp {
        SuperOp { domain: self.codomain.clone(), codomain: self.domain.clone(), matrix: self.matrix.transpose() }
    }

    /// Largest absolute matrix entry.
    pub fn max_abs(&self) -> f64 {
        self.matrix.amax()
    }

    /// Applies `self^{⊗n}` to coordinates laid out as `n` row-major axes of
    /// length `domain.dim()`, without forming the tensor power.
    pub fn apply_tensor_power(&self, coords: &[f64], n: usize) -> Result<Vec<f64>> {
        let m = self.domain.dim();
        if coords.len() != m.pow(n as u32) {
            return Err(Error::DimensionMismatch { expected: m.pow(n as u32), found: coords.len() });
        }
        let rows = basis::sparse_rows(&self.matrix);
        let mut shape = vec![m; n];
        let mut data = coords.to_vec();
        for mode in 0..n {
            data = basis::mode_product_sparse(&data, &shape, mode, &rows);
            shape[mode] = self.codomain.dim();
        }
        Ok(data)
    }
}

/// Coordinates of `L(a)` in the codomain.
pub fn superop_apply(l: &SuperOp, a: &HermOp) -> Result<DVector<f64>> {
    l.apply(a)
}

pub fn superop_tensor(l1: &SuperOp, l2: &SuperOp) -> SuperOp {
    l1.tensor(l2)
}

pub fn superop_adjoint(l: &SuperOp) -> SuperOp {
    l.adjoint()
}
