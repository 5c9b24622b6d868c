//! Locally minimal projections for finite tuples of self-adjoint operators.
//!
//! Given Hermitian `a_1, ..., a_n`, a projection `p = F F*` is locally minimal
//! when every compression `p a_i p` is a scalar multiple of `p`. This crate
//! builds such projections in two settings:
//!
//! * finite rank `k` for arbitrary Hermitian matrices ([`equalization::solve_finite_rank`]),
//! * unbounded rank for [`ClusterModel`] operators whose joint essential range
//!   has interior ([`essential_range::build_infinite_rank`]).
//!
//! Both return a [`Certificate`] that can be rechecked from the operators alone.

// `!(x > tol)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagonal_pipeline;
pub mod equalization;
pub mod error;
pub mod essential_range;
pub mod operator_model;
pub mod simplex_geometry;

pub use error::{Error, Result};
pub use operator_model::{Certificate, ClusterModel, Frame, HermitianTuple, Mode};
