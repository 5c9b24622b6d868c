//! Operator tuples, the cyclic cluster model, frames, compressions and
//! certificates, plus the JSON file formats for all of them.

mod certificate;
mod cluster;
mod compress;
mod frame;
pub mod io;
mod tuple;

pub use certificate::{Certificate, CheckReport, Meta, Mode};
pub use cluster::{truncate_model, ClusterModel};
pub use compress::{compress, residual, Operators};
pub use frame::Frame;
pub use tuple::{random_tuple, HermitianTuple};

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Relative tolerance for the Hermitian check on inputs.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Largest entry modulus over a set of matrices, floored at 1.
pub(crate) fn entry_scale<'a>(mats: impl IntoIterator<Item = &'a DMatrix<Complex64>>) -> f64 {
    mats.into_iter().flat_map(|m| m.iter()).map(|z| z.norm()).fold(1.0, f64::max)
}

/// Largest `|m[j,l] - conj(m[l,j])|`; `None` for a non-square matrix.
pub(crate) fn hermitian_deviation(m: &DMatrix<Complex64>) -> Option<f64> {
    if !m.is_square() {
        return None;
    }
    let d = m.nrows();
    let mut dev = 0.0f64;
    for j in 0..d {
        for l in j..d {
            dev = dev.max((m[(j, l)] - m[(l, j)].conj()).norm());
        }
    }
    Some(dev)
}
