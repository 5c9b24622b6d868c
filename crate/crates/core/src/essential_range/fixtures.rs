//! Ready-made models: a triangle, a segment, and the two compact examples
//! (a compact shift that kills every infinite-rank solution, and an
//! alternating compact diagonal that still admits one).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{ClusterModel, Frame, HermitianTuple};

/// Clusters `(0,0), (1,0), (0,1)`.
pub fn triangle_model() -> ClusterModel {
    ClusterModel::diagonal(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).expect("valid clusters")
}

/// One operator with clusters `0` and `1`.
pub fn segment_model() -> ClusterModel {
    ClusterModel::diagonal(vec![vec![0.0], vec![1.0]]).expect("valid clusters")
}

/// `a_1 = 0`, `a_2 = a_1 + b` with `b = diag(1, 1/2, ..., 1/support)`, a
/// positive compact operator truncated to the model support. The essential
/// range is the single point `(0, 0)`.
pub fn compact_shift_model(support: usize) -> ClusterModel {
    let zero = DMatrix::zeros(support, support);
    let b = DMatrix::from_diagonal(&DVector::from_fn(support, |j, _| Complex64::new(1.0 / (j + 1) as f64, 0.0)));
    ClusterModel::new(2, vec![vec![0.0, 0.0]], support, vec![zero, b]).expect("valid model")
}

/// Diagonal of the compact operator `c e_{2n-1} = e_{2n-1}/n`, `c e_{2n} = -e_{2n}/n`
/// (1-based), as 0-based values of length `d`.
pub fn alternating_diagonal(d: usize) -> Vec<f64> {
    (0..d)
        .map(|j| {
            let n = (j / 2 + 1) as f64;
            if j % 2 == 0 {
                1.0 / n
            } else {
                -1.0 / n
            }
        })
        .collect()
}

/// The alternating compact operator truncated to `d x d`.
pub fn alternating_compact(d: usize) -> HermitianTuple {
    HermitianTuple::from_diagonals(&[alternating_diagonal(d)]).expect("diagonal is Hermitian")
}

/// The alternating compact operator as a cluster model: zero diagonal limit
/// plus the first `2 * pairs` entries as perturbation.
pub fn alternating_compact_model(pairs: usize) -> ClusterModel {
    let s = 2 * pairs;
    let p = DMatrix::from_diagonal(&DVector::from_iterator(
        s,
        alternating_diagonal(s).into_iter().map(|x| Complex64::new(x, 0.0)),
    ));
    ClusterModel::new(1, vec![vec![0.0]], s, vec![p]).expect("valid model")
}

/// Columns `(e_{2n} + e_{2n+1}) / sqrt(2)` for `n < count` (0-based).
pub fn paired_frame(count: usize) -> Frame {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let cols = (0..count)
        .map(|n| {
            let mut v = vec![Complex64::new(0.0, 0.0); 2 * n + 2];
            v[2 * n] = Complex64::new(s, 0.0);
            v[2 * n + 1] = Complex64::new(s, 0.0);
            v
        })
        .collect();
    Frame::lazy(cols)
}
