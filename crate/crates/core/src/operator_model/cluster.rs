use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{entry_scale, hermitian_deviation, HermitianTuple, HERMITIAN_TOL};
use crate::{Error, Result};

/// An `n`-tuple of operators on `l^2(N)` that is jointly diagonal up to a
/// finite-support Hermitian perturbation.
///
/// Matrix entries: `<a_i e_l, e_j> = delta_{jl} * clusters[j mod m][i] + perturb[i][(j, l)]`,
/// where the perturbation term only exists for `j, l < support`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterModel {
    n: usize,
    clusters: Vec<Vec<f64>>,
    support: usize,
    perturb: Vec<DMatrix<Complex64>>,
}

impl ClusterModel {
    /// `perturb` may be empty when `support == 0`; otherwise it must hold
    /// `n` Hermitian `support x support` matrices.
    pub fn new(n: usize, clusters: Vec<Vec<f64>>, support: usize, perturb: Vec<DMatrix<Complex64>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("operator count must be at least 1".into()));
        }
        if clusters.is_empty() {
            return Err(Error::InvalidArgument("at least one cluster vector is required".into()));
        }
        for c in &clusters {
            if c.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: c.len() });
            }
            if c.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument("cluster entries must be finite".into()));
            }
        }
        for (j, c) in clusters.iter().enumerate() {
            if clusters[..j].contains(c) {
                return Err(Error::InvalidArgument(format!("cluster {j} repeats an earlier cluster")));
            }
        }
        let perturb = if perturb.is_empty() && support == 0 { vec![DMatrix::zeros(0, 0); n] } else { perturb };
        if perturb.len() != n {
            return Err(Error::LengthMismatch(format!("{} perturbation matrices for {n} operators", perturb.len())));
        }
        for p in &perturb {
            if p.nrows() != support || p.ncols() != support {
                return Err(Error::DimensionMismatch { expected: support, found: p.nrows().max(p.ncols()) });
            }
        }
        let scale = entry_scale(&perturb);
        for (index, p) in perturb.iter().enumerate() {
            let deviation = hermitian_deviation(p).unwrap_or(f64::INFINITY);
            if deviation > HERMITIAN_TOL * scale {
                return Err(Error::NotHermitian { index, deviation });
            }
        }
        Ok(Self { n, clusters, support, perturb })
    }

    /// Purely diagonal model with no compact part.
    pub fn diagonal(clusters: Vec<Vec<f64>>) -> Result<Self> {
        let n = clusters.first().map_or(0, Vec::len);
        Self::new(n, clusters, 0, Vec::new())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn clusters(&self) -> &[Vec<f64>] {
        &self.clusters
    }

    /// Number of clusters, which is also the period of the assignment.
    pub fn period(&self) -> usize {
        self.clusters.len()
    }

    pub fn support(&self) -> usize {
        self.support
    }

    pub fn perturbations(&self) -> &[DMatrix<Complex64>] {
        &self.perturb
    }

    /// Cluster index of canonical basis vector `e_j`.
    pub fn assignment(&self, j: usize) -> usize {
        j % self.clusters.len()
    }

    /// Diagonal part of `a_i` at index `j`.
    pub fn diagonal_value(&self, i: usize, j: usize) -> f64 {
        self.clusters[self.assignment(j)][i]
    }

    /// Matrix entry `<a_i e_l, e_j>`.
    pub fn entry(&self, i: usize, j: usize, l: usize) -> Complex64 {
        let mut z = Complex64::new(0.0, 0.0);
        if j == l {
            z.re += self.diagonal_value(i, j);
        }
        if j < self.support && l < self.support {
            z += self.perturb[i][(j, l)];
        }
        z
    }

    /// `a_i v` for a finite-support vector; the result has length
    /// `max(v.len(), support)`.
    pub fn apply(&self, i: usize, v: &[Complex64]) -> Vec<Complex64> {
        let len = v.len().max(self.support);
        let mut out = vec![Complex64::new(0.0, 0.0); len];
        for (j, x) in v.iter().enumerate() {
            out[j] = *x * self.diagonal_value(i, j);
        }
        let s = self.support.min(v.len());
        let p = &self.perturb[i];
        for j in 0..self.support {
            let mut acc = Complex64::new(0.0, 0.0);
            for l in 0..s {
                acc += p[(j, l)] * v[l];
            }
            out[j] += acc;
        }
        out
    }

    /// Max modulus over cluster entries and perturbation entries, floored at 1.
    pub fn scale(&self) -> f64 {
        let c = self.clusters.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
        entry_scale(&self.perturb).max(c)
    }

    /// Leading `d x d` corner of every operator.
    pub fn truncate(&self, d: usize) -> Result<HermitianTuple> {
        if d < self.support {
            return Err(Error::TruncationTooSmall { dim: d, support: self.support });
        }
        if d == 0 {
            return Err(Error::InvalidArgument("truncation dimension must be at least 1".into()));
        }
        let mats = (0..self.n).map(|i| DMatrix::from_fn(d, d, |j, l| self.entry(i, j, l))).collect();
        HermitianTuple::unnamed(mats)
    }
}

/// See [`ClusterModel::truncate`].
pub fn truncate_model(model: &ClusterModel, d: usize) -> Result<HermitianTuple> {
    model.truncate(d)
}
