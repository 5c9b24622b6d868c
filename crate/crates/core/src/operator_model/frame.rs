use nalgebra::DMatrix;
use num_complex::Complex64;

/// Ordered orthonormal columns spanning the range of a projection `p = F F*`.
///
/// Each column is a coefficient list over the canonical basis `e_0, e_1, ...`.
/// Columns may be shorter than the ambient dimension; missing entries are zero.
/// A frame with `dim == None` lives on `l^2(N)` and only needs finite support.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    dim: Option<usize>,
    cols: Vec<Vec<Complex64>>,
}

impl Frame {
    pub fn finite(dim: usize, cols: Vec<Vec<Complex64>>) -> Self {
        Self { dim: Some(dim), cols }
    }

    pub fn lazy(cols: Vec<Vec<Complex64>>) -> Self {
        Self { dim: None, cols }
    }

    /// Columns of a `d x k` matrix.
    pub fn from_matrix(m: &DMatrix<Complex64>) -> Self {
        let cols = m.column_iter().map(|c| c.iter().copied().collect()).collect();
        Self::finite(m.nrows(), cols)
    }

    /// Canonical basis vectors `e_j` for each listed index.
    pub fn canonical(dim: usize, indices: &[usize]) -> Self {
        let cols = indices
            .iter()
            .map(|&j| {
                let mut v = vec![Complex64::new(0.0, 0.0); dim];
                v[j] = Complex64::new(1.0, 0.0);
                v
            })
            .collect();
        Self::finite(dim, cols)
    }

    pub fn dim(&self) -> Option<usize> {
        self.dim
    }

    /// Number of columns.
    pub fn rank(&self) -> usize {
        self.cols.len()
    }

    pub fn columns(&self) -> &[Vec<Complex64>] {
        &self.cols
    }

    pub fn column(&self, j: usize) -> &[Complex64] {
        &self.cols[j]
    }

    pub fn into_columns(self) -> Vec<Vec<Complex64>> {
        self.cols
    }

    /// Length of the longest column.
    pub fn support_len(&self) -> usize {
        self.cols.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn push(&mut self, col: Vec<Complex64>) {
        self.cols.push(col);
    }

    /// `G = F* F`.
    pub fn gram(&self) -> DMatrix<Complex64> {
        let k = self.rank();
        let mut g = DMatrix::zeros(k, k);
        for p in 0..k {
            for q in p..k {
                let z = dotc(&self.cols[p], &self.cols[q]);
                g[(p, q)] = z;
                g[(q, p)] = z.conj();
            }
        }
        g
    }

    /// `max |G - I|` entrywise.
    pub fn gram_deviation(&self) -> f64 {
        let g = self.gram();
        let mut dev = 0.0f64;
        for ((p, q), z) in g.iter().enumerate().map(|(idx, z)| ((idx % g.nrows(), idx / g.nrows()), z)) {
            let target = if p == q { 1.0 } else { 0.0 };
            dev = dev.max((z - Complex64::new(target, 0.0)).norm());
        }
        dev
    }

    /// Dense `d x k` matrix, zero-padding short columns. `None` if a column
    /// is longer than `d`.
    pub fn to_matrix(&self, d: usize) -> Option<DMatrix<Complex64>> {
        if self.support_len() > d {
            return None;
        }
        let mut m = DMatrix::zeros(d, self.rank());
        for (q, col) in self.cols.iter().enumerate() {
            for (j, z) in col.iter().enumerate() {
                m[(j, q)] = *z;
            }
        }
        Some(m)
    }
}

/// `<y, x>`-style inner product `sum conj(x_j) y_j` over the common prefix.
pub(crate) fn dotc(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).fold(Complex64::new(0.0, 0.0), |acc, (a, b)| acc + a.conj() * b)
}
