use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{entry_scale, hermitian_deviation, HERMITIAN_TOL};
use crate::{Error, Result};

/// `n` Hermitian `d x d` matrices sharing one dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianTuple {
    dim: usize,
    names: Vec<String>,
    mats: Vec<DMatrix<Complex64>>,
}

impl HermitianTuple {
    /// Validates and wraps the matrices. Non-Hermitian input is rejected, never
    /// symmetrized.
    pub fn new(names: Vec<String>, mats: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let Some(first) = mats.first() else {
            return Err(Error::MalformedFile("at least one operator is required".into()));
        };
        if names.len() != mats.len() {
            return Err(Error::LengthMismatch(format!("{} names for {} operators", names.len(), mats.len())));
        }
        let dim = first.nrows();
        if dim == 0 {
            return Err(Error::MalformedFile("dimension must be at least 1".into()));
        }
        for m in &mats {
            if m.nrows() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: m.nrows() });
            }
            if m.ncols() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: m.ncols() });
            }
        }
        let scale = entry_scale(&mats);
        for (index, m) in mats.iter().enumerate() {
            let deviation = hermitian_deviation(m).unwrap_or(f64::INFINITY);
            if deviation > HERMITIAN_TOL * scale {
                return Err(Error::NotHermitian { index, deviation });
            }
        }
        Ok(Self { dim, names, mats })
    }

    /// Same as [`HermitianTuple::new`] with names `a1, a2, ...`.
    pub fn unnamed(mats: Vec<DMatrix<Complex64>>) -> Result<Self> {
        let names = (1..=mats.len()).map(|i| format!("a{i}")).collect();
        Self::new(names, mats)
    }

    /// Real diagonal operators.
    pub fn from_diagonals(diags: &[Vec<f64>]) -> Result<Self> {
        let mats = diags
            .iter()
            .map(|d| {
                DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
                    d.len(),
                    d.iter().map(|&x| Complex64::new(x, 0.0)),
                ))
            })
            .collect();
        Self::unnamed(mats)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn matrices(&self) -> &[DMatrix<Complex64>] {
        &self.mats
    }

    pub fn matrix(&self, i: usize) -> &DMatrix<Complex64> {
        &self.mats[i]
    }

    /// Max entry modulus over all operators, floored at 1.
    pub fn scale(&self) -> f64 {
        entry_scale(&self.mats)
    }
}

/// Deterministic random Hermitian tuple. Each matrix is `(M + M*)/2` where the
/// real and imaginary parts of `M` are uniform in `[-scale, scale]`.
pub fn random_tuple(seed: u64, n: usize, d: usize, scale: f64) -> HermitianTuple {
    assert!(n >= 1 && d >= 1, "random_tuple needs n, d >= 1");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = move || {
        if scale > 0.0 {
            Complex64::new(rng.gen_range(-scale..=scale), rng.gen_range(-scale..=scale))
        } else {
            Complex64::new(0.0, 0.0)
        }
    };
    let mats = (0..n)
        .map(|_| {
            let raw = DMatrix::from_fn(d, d, |_, _| draw());
            let mut h = DMatrix::zeros(d, d);
            for j in 0..d {
                for l in j..d {
                    let z = (raw[(j, l)] + raw[(l, j)].conj()) * 0.5;
                    h[(j, l)] = z;
                    h[(l, j)] = z.conj();
                }
            }
            h
        })
        .collect();
    HermitianTuple::unnamed(mats).expect("generated matrices are Hermitian by construction")
}
