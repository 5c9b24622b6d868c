//! Jointly compression-diagonal frames, sign classification of their diagonal
//! values, and the finite dimension budget for the finite-rank construction.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::operator_model::{HermitianTuple, Operators};
use crate::{Error, Frame, Result};

/// Relative threshold under which a projected random vector counts as zero.
const COMPLEMENT_FLOOR: f64 = 1e-8;
/// Relative threshold under which an image is treated as already in the span.
const SPAN_FLOOR: f64 = 1e-13;

/// Sizes that make the finite-rank pipeline infallible.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Pool consumed by equalization: `2k * 3^(n-1)`.
    pub pool: usize,
    /// Diagonal columns needed so some sign class reaches `pool`: `3^n (pool - 1) + 1`.
    pub columns: usize,
    /// Ambient dimension guaranteeing `columns` jointly diagonal vectors:
    /// `(n + 1)(columns - 1) + 1`.
    pub min_dim: usize,
}

/// `n x k` budget. Fails with [`Error::Overflow`] when the numbers do not fit.
pub fn dimension_budget(n: usize, k: usize) -> Result<Budget> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidArgument("n and k must be at least 1".into()));
    }
    let exp = u32::try_from(n).map_err(|_| Error::Overflow)?;
    let pow_n1 = 3usize.checked_pow(exp - 1).ok_or(Error::Overflow)?;
    let pow_n = pow_n1.checked_mul(3).ok_or(Error::Overflow)?;
    let pool = k.checked_mul(2).and_then(|x| x.checked_mul(pow_n1)).ok_or(Error::Overflow)?;
    let columns = pow_n.checked_mul(pool - 1).and_then(|x| x.checked_add(1)).ok_or(Error::Overflow)?;
    let min_dim = (n + 1).checked_mul(columns - 1).and_then(|x| x.checked_add(1)).ok_or(Error::Overflow)?;
    Ok(Budget { pool, columns, min_dim })
}

/// Orthonormal columns `xi_j` with `<a_i xi_j, xi_l> = 0` for all `i` and `j != l`,
/// together with the diagonal values `values[i][j] = <a_i xi_j, xi_j>`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalTable {
    pub frame: Frame,
    pub values: Vec<Vec<f64>>,
}

impl DiagonalTable {
    pub fn columns(&self) -> usize {
        self.frame.rank()
    }

    pub fn operators(&self) -> usize {
        self.values.len()
    }

    /// Restricts the table to the listed columns, in that order.
    pub fn select(&self, indices: &[usize]) -> DiagonalTable {
        let cols = indices.iter().map(|&j| self.frame.column(j).to_vec()).collect();
        let frame = match self.frame.dim() {
            Some(d) => Frame::finite(d, cols),
            None => Frame::lazy(cols),
        };
        let values = self.values.iter().map(|row| indices.iter().map(|&j| row[j]).collect()).collect();
        DiagonalTable { frame, values }
    }
}

fn axpy(y: &mut [Complex64], alpha: Complex64, x: &[Complex64]) {
    for (a, b) in y.iter_mut().zip(x) {
        *a += alpha * b;
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn scale_in_place(v: &mut [Complex64], s: f64) {
    for z in v {
        *z *= s;
    }
}

/// Classical Gram-Schmidt against an orthonormal basis, repeated until a pass
/// no longer cancels more than half the norm (at most four passes).
fn orthogonalize(basis: &[Vec<Complex64>], v: &mut [Complex64]) -> f64 {
    let mut prev = norm(v);
    for _ in 0..4 {
        let coeffs: Vec<Complex64> = basis
            .iter()
            .map(|b| b.iter().zip(v.iter()).fold(Complex64::new(0.0, 0.0), |acc, (x, y)| acc + x.conj() * y))
            .collect();
        for (b, c) in basis.iter().zip(coeffs) {
            axpy(v, -c, b);
        }
        let now = norm(v);
        if now > 0.5 * prev {
            return now;
        }
        prev = now;
    }
    prev
}

/// Grows a jointly diagonal frame until `m` columns exist or the orthogonal
/// complement of `span{xi_l, a_i xi_l}` vanishes. Returns the columns built.
fn grow_frame(ops: &HermitianTuple, m: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let d = ops.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut span: Vec<Vec<Complex64>> = Vec::new();
    let mut xis: Vec<Vec<Complex64>> = Vec::with_capacity(m);

    while xis.len() < m {
        if span.len() >= d {
            break;
        }
        let mut v: Vec<Complex64> =
            (0..d).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let start = norm(&v);
        let left = orthogonalize(&span, &mut v);
        if left <= COMPLEMENT_FLOOR * start {
            break;
        }
        // Two renormalization passes.
        for _ in 0..2 {
            let nv = norm(&v);
            scale_in_place(&mut v, 1.0 / nv);
            orthogonalize(&span, &mut v);
        }
        let nv = norm(&v);
        scale_in_place(&mut v, 1.0 / nv);

        let mut images = Vec::with_capacity(ops.len() + 1);
        images.push(v.clone());
        for i in 0..ops.len() {
            images.push(ops.apply(i, &v));
        }
        for mut w in images {
            let start = norm(&w);
            if start == 0.0 {
                continue;
            }
            let left = orthogonalize(&span, &mut w);
            if left > SPAN_FLOOR * start {
                scale_in_place(&mut w, 1.0 / left);
                let again = orthogonalize(&span, &mut w);
                scale_in_place(&mut w, 1.0 / again);
                span.push(w);
            }
        }
        xis.push(v);
    }
    xis
}

fn diagonal_values(ops: &HermitianTuple, cols: &[Vec<Complex64>]) -> Vec<Vec<f64>> {
    (0..ops.len())
        .map(|i| {
            cols.iter()
                .map(|c| {
                    let img = ops.apply(i, c);
                    c.iter().zip(&img).map(|(x, y)| (x.conj() * y).re).sum()
                })
                .collect()
        })
        .collect()
}

/// Builds `m` orthonormal columns on which every compression is diagonal.
///
/// Each new column is a seeded random vector projected onto the orthogonal
/// complement of all previous columns and their images under every `a_i`.
/// Generic tuples allow `floor((d - 1)/(n + 1)) + 1` columns; structured ones
/// (diagonal, scalar) allow more.
pub fn joint_diagonal_frame(ops: &HermitianTuple, m: usize, seed: u64) -> Result<DiagonalTable> {
    let cols = grow_frame(ops, m, seed);
    if cols.len() < m {
        return Err(Error::InsufficientDimension { needed: m, available: cols.len() });
    }
    Ok(table_from_columns(ops, cols))
}

/// Like [`joint_diagonal_frame`] but returns however many columns fit.
pub fn joint_diagonal_frame_partial(ops: &HermitianTuple, m: usize, seed: u64) -> DiagonalTable {
    table_from_columns(ops, grow_frame(ops, m, seed))
}

fn table_from_columns(ops: &HermitianTuple, cols: Vec<Vec<Complex64>>) -> DiagonalTable {
    let values = diagonal_values(ops, &cols);
    DiagonalTable { frame: Frame::finite(ops.dim(), cols), values }
}

/// Sign of a diagonal value. The order `Pos < Zero < Neg` is the tie-break order
/// for classes of equal size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sign {
    Pos,
    Zero,
    Neg,
}

impl Sign {
    /// `Zero` iff `|x| <= tau0`.
    pub fn classify(x: f64, tau0: f64) -> Sign {
        if x.abs() <= tau0 {
            Sign::Zero
        } else if x > 0.0 {
            Sign::Pos
        } else {
            Sign::Neg
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Pos => '+',
            Sign::Zero => '0',
            Sign::Neg => '-',
        }
    }
}

/// Columns sharing one sign pattern across all operators.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignClass {
    pub pattern: Vec<Sign>,
    pub indices: Vec<usize>,
}

impl SignClass {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn pattern_string(&self) -> String {
        self.pattern.iter().map(|s| s.symbol()).collect()
    }
}

/// Partitions the columns by sign pattern. Classes come largest first, ties by
/// pattern in `+ < 0 < -` lexicographic order; indices stay ascending.
pub fn sign_classes(table: &DiagonalTable, tau0: f64) -> Vec<SignClass> {
    let mut classes: Vec<SignClass> = Vec::new();
    for j in 0..table.columns() {
        let pattern: Vec<Sign> = table.values.iter().map(|row| Sign::classify(row[j], tau0)).collect();
        match classes.iter_mut().find(|c| c.pattern == pattern) {
            Some(c) => c.indices.push(j),
            None => classes.push(SignClass { pattern, indices: vec![j] }),
        }
    }
    classes.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.pattern.cmp(&b.pattern)));
    classes
}

/// The largest class cut down to its first `pool` indices.
pub fn select_sign_class(classes: &[SignClass], pool: usize) -> Result<SignClass> {
    let largest = classes.iter().map(SignClass::len).max().unwrap_or(0);
    let best = classes
        .iter()
        .find(|c| c.len() == largest)
        .filter(|c| c.len() >= pool)
        .ok_or(Error::PoolTooSmall { needed: pool, largest })?;
    Ok(SignClass { pattern: best.pattern.clone(), indices: best.indices[..pool].to_vec() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator_model::{compress, random_tuple};

    fn table(values: Vec<Vec<f64>>) -> DiagonalTable {
        let m = values[0].len();
        DiagonalTable { frame: Frame::canonical(m, &(0..m).collect::<Vec<_>>()), values }
    }

    fn max_off_diagonal(ops: &HermitianTuple, frame: &Frame) -> f64 {
        let mut worst = 0.0f64;
        for c in compress(ops, frame).unwrap() {
            for p in 0..c.nrows() {
                for q in 0..c.ncols() {
                    if p != q {
                        worst = worst.max(c[(p, q)].norm());
                    }
                }
            }
        }
        worst
    }

    #[test]
    fn budget_formulas() {
        assert_eq!(dimension_budget(1, 1).unwrap(), Budget { pool: 2, columns: 4, min_dim: 7 });
        assert_eq!(dimension_budget(2, 2).unwrap(), Budget { pool: 12, columns: 100, min_dim: 298 });
        assert_eq!(dimension_budget(2, 3).unwrap(), Budget { pool: 18, columns: 154, min_dim: 460 });
        assert_eq!(dimension_budget(1, 2).unwrap(), Budget { pool: 4, columns: 10, min_dim: 19 });
    }

    #[test]
    fn budget_overflow() {
        assert_eq!(dimension_budget(60, 1), Err(Error::Overflow));
        assert_eq!(dimension_budget(2, usize::MAX / 2), Err(Error::Overflow));
        assert!(dimension_budget(0, 1).is_err());
    }

    #[test]
    fn diagonal_operators_standard_basis_is_valid() {
        let ops =
            HermitianTuple::from_diagonals(&[vec![1.0, 2.0, 3.0, 4.0, 5.0], vec![0.0, -1.0, 1.0, 0.5, 2.0]]).unwrap();
        let basis = Frame::canonical(5, &[0, 1, 2, 3, 4]);
        assert_eq!(max_off_diagonal(&ops, &basis), 0.0);
        // The seeded construction reaches the generic capacity floor((d-1)/(n+1)) + 1.
        let t = joint_diagonal_frame(&ops, 2, 11).unwrap();
        assert!(t.frame.gram_deviation() <= 1e-12);
        assert!(max_off_diagonal(&ops, &t.frame) <= 1e-10);
    }

    #[test]
    fn scalar_operators_fill_the_space() {
        let ops = HermitianTuple::from_diagonals(&[vec![2.0; 6], vec![-1.0; 6]]).unwrap();
        let t = joint_diagonal_frame(&ops, 6, 3).unwrap();
        assert!(t.frame.gram_deviation() <= 1e-12);
        assert!(max_off_diagonal(&ops, &t.frame) <= 1e-12);
    }

    #[test]
    fn single_column_is_any_unit_vector() {
        let a = nalgebra::DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]).map(|x| Complex64::new(x, 0.0));
        let ops = HermitianTuple::unnamed(vec![a]).unwrap();
        let t = joint_diagonal_frame(&ops, 1, 0).unwrap();
        assert!(t.frame.gram_deviation() <= 1e-14);
    }

    #[test]
    fn capacity_bound_for_generic_pairs() {
        let ops = random_tuple(5, 2, 7, 1.0);
        let t = joint_diagonal_frame(&ops, 3, 1).unwrap();
        assert!(max_off_diagonal(&ops, &t.frame) <= 1e-10 * ops.scale());
        let small = random_tuple(5, 2, 5, 1.0);
        assert!(matches!(
            joint_diagonal_frame(&small, 3, 1),
            Err(Error::InsufficientDimension { needed: 3, available: 2 })
        ));
    }

    #[test]
    fn values_match_compressions() {
        let ops = random_tuple(9, 3, 40, 1.0);
        let t = joint_diagonal_frame(&ops, 10, 2).unwrap();
        let comps = compress(&ops, &t.frame).unwrap();
        for (i, c) in comps.iter().enumerate() {
            for j in 0..10 {
                assert!((c[(j, j)].re - t.values[i][j]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn one_operator_classes() {
        let classes = sign_classes(&table(vec![vec![1.0, -1.0, 0.0, 2.0, 3.0, -2.0]]), 0.0);
        let got: Vec<(String, Vec<usize>)> = classes.iter().map(|c| (c.pattern_string(), c.indices.clone())).collect();
        assert_eq!(got, vec![("+".into(), vec![0, 3, 4]), ("-".into(), vec![1, 5]), ("0".into(), vec![2])]);
    }

    #[test]
    fn two_operator_tie_break() {
        let classes = sign_classes(&table(vec![vec![1.0, 1.0], vec![-1.0, 1.0]]), 0.0);
        let got: Vec<(String, Vec<usize>)> = classes.iter().map(|c| (c.pattern_string(), c.indices.clone())).collect();
        assert_eq!(got, vec![("++".into(), vec![1]), ("+-".into(), vec![0])]);
    }

    #[test]
    fn all_zero_is_one_class() {
        let classes = sign_classes(&table(vec![vec![0.0; 4], vec![1e-12; 4]]), 1e-9);
        assert_eq!(classes.len(), 1);
        assert_eq!(classes[0].pattern, vec![Sign::Zero, Sign::Zero]);
        assert_eq!(classes[0].indices, vec![0, 1, 2, 3]);
    }

    fn class(n: usize) -> SignClass {
        SignClass { pattern: vec![Sign::Pos], indices: (0..n).collect() }
    }

    #[test]
    fn select_truncates_largest() {
        let picked = select_sign_class(&[class(5), class(3), class(1)], 4).unwrap();
        assert_eq!(picked.indices, vec![0, 1, 2, 3]);
    }

    #[test]
    fn select_reports_pool_too_small() {
        assert_eq!(select_sign_class(&[class(2), class(2)], 3), Err(Error::PoolTooSmall { needed: 3, largest: 2 }));
    }
}
