use nalgebra::DMatrix;
use num_complex::Complex64;

use super::frame::dotc;
use super::{ClusterModel, Frame, HermitianTuple};
use crate::{Error, Result};

/// Anything that can act on finite-support vectors as a tuple of Hermitian
/// operators.
pub trait Operators {
    /// Number of operators `n`.
    fn count(&self) -> usize;
    /// Ambient dimension, `None` for operators on `l^2(N)`.
    fn dim(&self) -> Option<usize>;
    /// Scale used for relative tolerances (max entry modulus, floor 1).
    fn scale(&self) -> f64;
    /// `a_i v`. Callers must check `v.len() <= dim` first.
    fn apply(&self, i: usize, v: &[Complex64]) -> Vec<Complex64>;
}

impl Operators for HermitianTuple {
    fn count(&self) -> usize {
        self.len()
    }

    fn dim(&self) -> Option<usize> {
        Some(HermitianTuple::dim(self))
    }

    fn scale(&self) -> f64 {
        HermitianTuple::scale(self)
    }

    fn apply(&self, i: usize, v: &[Complex64]) -> Vec<Complex64> {
        let m = self.matrix(i);
        let d = m.nrows();
        let mut out = vec![Complex64::new(0.0, 0.0); d];
        for (l, x) in v.iter().enumerate() {
            if *x == Complex64::new(0.0, 0.0) {
                continue;
            }
            let col = m.column(l);
            for (o, a) in out.iter_mut().zip(col.iter()) {
                *o += a * x;
            }
        }
        out
    }
}

impl Operators for ClusterModel {
    fn count(&self) -> usize {
        self.n()
    }

    fn dim(&self) -> Option<usize> {
        None
    }

    fn scale(&self) -> f64 {
        ClusterModel::scale(self)
    }

    fn apply(&self, i: usize, v: &[Complex64]) -> Vec<Complex64> {
        ClusterModel::apply(self, i, v)
    }
}

fn check_compatible<O: Operators + ?Sized>(ops: &O, frame: &Frame) -> Result<()> {
    if let Some(d) = ops.dim() {
        if let Some(fd) = frame.dim() {
            if fd != d {
                return Err(Error::DimensionMismatch { expected: d, found: fd });
            }
        }
        if frame.support_len() > d {
            return Err(Error::DimensionMismatch { expected: d, found: frame.support_len() });
        }
    }
    Ok(())
}

/// The compressions `F* a_i F` as `k x k` matrices, one per operator.
pub fn compress<O: Operators + ?Sized>(ops: &O, frame: &Frame) -> Result<Vec<DMatrix<Complex64>>> {
    check_compatible(ops, frame)?;
    let k = frame.rank();
    let cols = frame.columns();
    Ok((0..ops.count())
        .map(|i| {
            let images: Vec<Vec<Complex64>> = cols.iter().map(|c| ops.apply(i, c)).collect();
            DMatrix::from_fn(k, k, |p, q| dotc(&cols[p], &images[q]))
        })
        .collect())
}

/// `r_i = ||F* a_i F - t_i I||_F` for every operator.
pub fn residual<O: Operators + ?Sized>(ops: &O, frame: &Frame, scalars: &[f64]) -> Result<Vec<f64>> {
    if scalars.len() != ops.count() {
        return Err(Error::LengthMismatch(format!("{} scalars for {} operators", scalars.len(), ops.count())));
    }
    let comps = compress(ops, frame)?;
    Ok(comps
        .iter()
        .zip(scalars)
        .map(|(c, &t)| {
            let mut acc = 0.0;
            for p in 0..c.nrows() {
                for q in 0..c.ncols() {
                    let target = if p == q { t } else { 0.0 };
                    acc += (c[(p, q)] - Complex64::new(target, 0.0)).norm_sqr();
                }
            }
            acc.sqrt()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compress_picks_diagonal_entries() {
        let t = HermitianTuple::from_diagonals(&[vec![1.0, 2.0, 3.0, 4.0]]).unwrap();
        let f = Frame::canonical(4, &[1, 3]);
        let c = compress(&t, &f).unwrap();
        assert_eq!(c[0], DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 4.0]).map(|x| Complex64::new(x, 0.0)));
    }

    #[test]
    fn single_vector_gives_expectation() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, -3.0]).map(|x| Complex64::new(x, 0.0));
        let t = HermitianTuple::unnamed(vec![a]).unwrap();
        let eta = vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)];
        let c = compress(&t, &Frame::finite(2, vec![eta])).unwrap();
        // 0.36*1 + 0.64*(-3) + cross terms 2*Re(conj(0.6)*2*(0.8i)) = 0
        assert!((c[0][(0, 0)] - Complex64::new(0.36 - 1.92, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn identity_has_zero_residual() {
        let t = HermitianTuple::from_diagonals(&[vec![1.0; 3]]).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let f = Frame::finite(3, vec![vec![Complex64::new(s, 0.0), Complex64::new(0.0, s), Complex64::new(0.0, 0.0)]]);
        assert!(residual(&t, &f, &[1.0]).unwrap()[0] <= 1e-12);
    }

    #[test]
    fn residual_of_wrong_scalar() {
        let t = HermitianTuple::from_diagonals(&[vec![1.0, 2.0]]).unwrap();
        let r = residual(&t, &Frame::canonical(2, &[0]), &[2.0]).unwrap();
        assert_eq!(r, vec![1.0]);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let t = HermitianTuple::from_diagonals(&[vec![1.0, 2.0]]).unwrap();
        assert!(matches!(
            compress(&t, &Frame::canonical(3, &[0])),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
    }
}
