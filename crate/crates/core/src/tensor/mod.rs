//! Dense multilinear algebra over labelled tensor factors.
//!
//! Operators are stored as dense complex matrices whose row and column
//! indices are row-major multi-indices over the factors of a [`SpaceLayout`],
//! first factor most significant.

mod basis;
mod layout;
mod op;
mod superop;

pub use basis::{basis_element, coordinates, from_coordinates, ggm_basis, mode_product, trial_coordinates};
pub use layout::{Factor, Role, SiteRef, SpaceLayout};
pub use op::{hs_inner, kron, partial_trace, permute_factors, trace_and_replace, HermOp};
pub use superop::{superop_adjoint, superop_apply, superop_tensor, Space, SuperOp};


