//! Blending jointly diagonal columns until every compression is scalar.
//!
//! The building blocks work on diagonal values only: a two-point blend equates
//! two diagonal operators on one unit vector, a ratio split finds a scale `t`
//! with enough columns on either side of `a = t b`, pairing applies the blend
//! column by column, and flattening turns one diagonal compression into a
//! multiple of the identity at half the rank. [`solve_finite_rank`] chains them.

mod solve;

pub use solve::{solve_finite_rank, SolveOptions};

use std::str::FromStr;

use num_complex::Complex64;

use crate::diagonal_pipeline::DiagonalTable;
use crate::{Error, Frame, Result};

/// Weight `t` of the unit vector `(sqrt(t), sqrt(1 - t))` in a two-point blend.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlendWeight {
    pub t: f64,
}

impl BlendWeight {
    /// Coefficients on the first and second basis vector.
    pub fn coefficients(self) -> (f64, f64) {
        (self.t.sqrt(), (1.0 - self.t).sqrt())
    }

    /// `t x1 + (1 - t) x2`, the expectation of `diag(x1, x2)`.
    pub fn expectation(self, x1: f64, x2: f64) -> f64 {
        self.t * x1 + (1.0 - self.t) * x2
    }
}

/// Finds `t` in `[0, 1]` with `t a1 + (1-t) a2 = t b1 + (1-t) b2`, given
/// `a1 >= b1` and `b2 >= a2`. Both hypotheses may be violated by at most `tol`.
pub fn two_point_blend(a1: f64, a2: f64, b1: f64, b2: f64, tol: f64) -> Result<BlendWeight> {
    let up = a1 - b1;
    let down = b2 - a2;
    if up < -tol || down < -tol {
        return Err(Error::HypothesisViolated(format!(
            "need a1 >= b1 and b2 >= a2, got a1 - b1 = {up:e}, b2 - a2 = {down:e}"
        )));
    }
    if up <= 0.0 {
        return Ok(BlendWeight { t: 1.0 });
    }
    if down <= 0.0 {
        return Ok(BlendWeight { t: 0.0 });
    }
    Ok(BlendWeight { t: down / (up + down) })
}

/// Outcome of comparing two positive diagonal sequences.
#[derive(Debug, Clone, PartialEq)]
pub enum SplitResult {
    /// `kappa` indices where the sequences agree within tolerance.
    Equal(Vec<usize>),
    /// `alpha >= t beta` on `upper`, `alpha <= t beta` on `lower`.
    Split { t: f64, upper: Vec<usize>, lower: Vec<usize> },
}

/// Splits `3 kappa` positive pairs either into `kappa` agreeing indices or
/// into `kappa` indices above and `kappa` below a common ratio `t`.
///
/// Among the disagreeing indices, sorted by `alpha/beta` descending (ties by
/// index), `t` is the `kappa`-th ratio, `upper` the first `kappa` and `lower`
/// the last `kappa`.
pub fn ratio_split(alpha: &[f64], beta: &[f64], kappa: usize, tol: f64) -> Result<SplitResult> {
    if kappa == 0 || alpha.len() != 3 * kappa || beta.len() != 3 * kappa {
        return Err(Error::LengthMismatch(format!(
            "need two lists of length 3*{kappa}, got {} and {}",
            alpha.len(),
            beta.len()
        )));
    }
    if let Some(i) = (0..alpha.len()).find(|&i| !(alpha[i] > 0.0 && beta[i] > 0.0)) {
        return Err(Error::NonPositiveInput(i));
    }
    let (equal, mut rest): (Vec<usize>, Vec<usize>) =
        (0..alpha.len()).partition(|&i| (alpha[i] - beta[i]).abs() <= tol);
    if equal.len() >= kappa {
        return Ok(SplitResult::Equal(equal[..kappa].to_vec()));
    }
    let ratio = |i: usize| alpha[i] / beta[i];
    rest.sort_by(|&x, &y| ratio(y).total_cmp(&ratio(x)).then(x.cmp(&y)));
    let t = ratio(rest[kappa - 1]);
    let upper = rest[..kappa].to_vec();
    let lower = rest[rest.len() - kappa..].to_vec();
    Ok(SplitResult::Split { t, upper, lower })
}

/// One blended column: `sqrt(w) xi_upper + sqrt(1 - w) xi_lower`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairBlend {
    pub upper: usize,
    pub lower: usize,
    pub weight: BlendWeight,
}

/// Blend weights that equate row `reference` with `t` times row `compared`
/// on each `(upper[j], lower[j])` pair.
pub fn pair_blends(
    values: &[Vec<f64>],
    reference: usize,
    compared: usize,
    t: f64,
    upper: &[usize],
    lower: &[usize],
    tol: f64,
) -> Result<Vec<PairBlend>> {
    if upper.len() != lower.len() {
        return Err(Error::LengthMismatch(format!("{} upper vs {} lower indices", upper.len(), lower.len())));
    }
    let a = &values[reference];
    let b = &values[compared];
    upper
        .iter()
        .zip(lower)
        .map(|(&u, &l)| {
            let weight = two_point_blend(a[u], a[l], t * b[u], t * b[l], tol)?;
            Ok(PairBlend { upper: u, lower: l, weight })
        })
        .collect()
}

fn blend_column(x: &[Complex64], wx: f64, y: &[Complex64], wy: f64) -> Vec<Complex64> {
    let len = x.len().max(y.len());
    (0..len)
        .map(|j| {
            let a = x.get(j).copied().unwrap_or_default();
            let b = y.get(j).copied().unwrap_or_default();
            a * wx + b * wy
        })
        .collect()
}

fn with_columns(like: &Frame, cols: Vec<Vec<Complex64>>) -> Frame {
    match like.dim() {
        Some(d) => Frame::finite(d, cols),
        None => Frame::lazy(cols),
    }
}

/// Columns and diagonal values after applying `blends`.
fn apply_blends(frame: &Frame, values: &[Vec<f64>], blends: &[PairBlend]) -> (Frame, Vec<Vec<f64>>) {
    let cols = blends
        .iter()
        .map(|b| {
            let (wu, wl) = b.weight.coefficients();
            blend_column(frame.column(b.upper), wu, frame.column(b.lower), wl)
        })
        .collect();
    let values = values
        .iter()
        .map(|row| blends.iter().map(|b| b.weight.expectation(row[b.upper], row[b.lower])).collect())
        .collect();
    (with_columns(frame, cols), values)
}

/// Frame of `upper.len()` columns on which row `reference` equals `t` times
/// row `compared`. All compressions stay diagonal because each column lives on
/// its own pair of table columns.
pub fn pair_blend_frame(
    table: &DiagonalTable,
    reference: usize,
    compared: usize,
    t: f64,
    upper: &[usize],
    lower: &[usize],
    tol: f64,
) -> Result<Frame> {
    let blends = pair_blends(&table.values, reference, compared, t, upper, lower, tol)?;
    Ok(apply_blends(&table.frame, &table.values, &blends).0)
}

/// Output of [`equalize_all`].
#[derive(Debug, Clone, PartialEq)]
pub struct Equalized {
    /// `2k` columns.
    pub frame: Frame,
    /// Diagonal values of every row on `frame`.
    pub values: Vec<Vec<f64>>,
    /// `ratios[i - 1]` = `t_i` with `row_0 = t_i row_i` on `frame`, signs included.
    pub ratios: Vec<f64>,
    /// `+1` or `-1` per row: the sign shared by all its values.
    pub flips: Vec<f64>,
    /// Stage kinds, `true` where the stage took the agreeing branch.
    pub equal_stages: Vec<bool>,
}

/// Makes row 0 a fixed multiple of every other row on `2k` columns.
///
/// Every row must be of one strict sign; negative rows are flipped first and
/// the sign is folded back into the ratio. Stage `i` keeps `kappa_i = 2k 3^(n-1-i)`
/// of the first `3 kappa_i` current columns, so the table needs
/// `2k 3^(n-1)` columns.
pub fn equalize_all(table: &DiagonalTable, k: usize, tol: f64) -> Result<Equalized> {
    let n = table.operators();
    if n == 0 || k == 0 {
        return Err(Error::InvalidArgument("need at least one row and k >= 1".into()));
    }
    let exp = u32::try_from(n - 1).map_err(|_| Error::Overflow)?;
    let needed = 3usize.checked_pow(exp).and_then(|p| p.checked_mul(2 * k)).ok_or(Error::Overflow)?;
    if table.columns() < needed {
        return Err(Error::PoolTooSmall { needed, largest: table.columns() });
    }
    let mut flips = Vec::with_capacity(n);
    for (i, row) in table.values.iter().enumerate() {
        let row = &row[..needed];
        if row.iter().all(|&x| x > 0.0) {
            flips.push(1.0);
        } else if row.iter().all(|&x| x < 0.0) {
            flips.push(-1.0);
        } else {
            let j = row.iter().position(|&x| x == 0.0 || x.signum() != row[0].signum()).unwrap_or(0);
            return Err(Error::NonPositiveInput(i * table.columns() + j));
        }
    }

    let first: Vec<usize> = (0..needed).collect();
    let start = table.select(&first);
    let mut frame = start.frame;
    let mut signed: Vec<Vec<f64>> =
        start.values.iter().zip(&flips).map(|(row, s)| row.iter().map(|x| x * s).collect()).collect();
    let mut ratios = Vec::with_capacity(n - 1);
    let mut equal_stages = Vec::with_capacity(n - 1);
    let mut kappa = needed / 3;

    for i in 1..n {
        let pool = 3 * kappa;
        let split = ratio_split(&signed[0][..pool], &signed[i][..pool], kappa, tol)?;
        match split {
            SplitResult::Equal(idx) => {
                let cols = idx.iter().map(|&j| frame.column(j).to_vec()).collect();
                frame = with_columns(&frame, cols);
                signed = signed.iter().map(|row| idx.iter().map(|&j| row[j]).collect()).collect();
                ratios.push(flips[0] * flips[i]);
                equal_stages.push(true);
            }
            SplitResult::Split { t, upper, lower } => {
                let blends = pair_blends(&signed, 0, i, t, &upper, &lower, tol)?;
                let (f, v) = apply_blends(&frame, &signed, &blends);
                frame = f;
                signed = v;
                ratios.push(flips[0] * flips[i] * t);
                equal_stages.push(false);
            }
        }
        kappa /= 3;
    }

    // With no comparisons the pool is already 2k columns.
    let values = signed.iter().zip(&flips).map(|(row, s)| row.iter().map(|x| x * s).collect()).collect();
    Ok(Equalized { frame, values, ratios, flips, equal_stages })
}

/// Choice of the common value inside `[alpha_k, alpha_{k+1}]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LambdaRule {
    #[default]
    Mid,
    Low,
    High,
}

impl LambdaRule {
    pub fn as_str(self) -> &'static str {
        match self {
            LambdaRule::Mid => "mid",
            LambdaRule::Low => "low",
            LambdaRule::High => "high",
        }
    }

    pub fn pick(self, low: f64, high: f64) -> f64 {
        match self {
            LambdaRule::Mid => 0.5 * (low + high),
            LambdaRule::Low => low,
            LambdaRule::High => high,
        }
    }
}

impl FromStr for LambdaRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mid" => Ok(LambdaRule::Mid),
            "low" => Ok(LambdaRule::Low),
            "high" => Ok(LambdaRule::High),
            other => Err(Error::InvalidArgument(format!("unknown lambda rule {other:?}"))),
        }
    }
}

/// How [`scalar_flatten`] combines columns.
#[derive(Debug, Clone, PartialEq)]
pub struct FlattenPlan {
    pub lambda: f64,
    /// `(low, high, t)`: output column is `sqrt(1-t) col_low + sqrt(t) col_high`.
    pub pairs: Vec<(usize, usize, f64)>,
}

/// Pairs the `i`-th smallest value with the `(k+i)`-th so that each blend
/// has expectation `lambda`.
pub fn flatten_plan(diag: &[f64], rule: LambdaRule) -> Result<FlattenPlan> {
    if diag.is_empty() || !diag.len().is_multiple_of(2) {
        return Err(Error::OddColumns(diag.len()));
    }
    let k = diag.len() / 2;
    let mut order: Vec<usize> = (0..diag.len()).collect();
    order.sort_by(|&x, &y| diag[x].total_cmp(&diag[y]).then(x.cmp(&y)));
    let lambda = rule.pick(diag[order[k - 1]], diag[order[k]]);
    let pairs = (0..k)
        .map(|i| {
            let (lo, hi) = (order[i], order[k + i]);
            let gap = diag[hi] - diag[lo];
            let t = if gap > 0.0 { ((lambda - diag[lo]) / gap).clamp(0.0, 1.0) } else { 0.0 };
            (lo, hi, t)
        })
        .collect();
    Ok(FlattenPlan { lambda, pairs })
}

/// Halves a `2k`-column frame so the compression with diagonal `diag` becomes
/// `lambda I_k`.
pub fn scalar_flatten(frame: &Frame, diag: &[f64], rule: LambdaRule) -> Result<(Frame, f64)> {
    if !frame.rank().is_multiple_of(2) {
        return Err(Error::OddColumns(frame.rank()));
    }
    if diag.len() != frame.rank() {
        return Err(Error::LengthMismatch(format!("{} values for {} columns", diag.len(), frame.rank())));
    }
    let plan = flatten_plan(diag, rule)?;
    let cols = plan
        .pairs
        .iter()
        .map(|&(lo, hi, t)| blend_column(frame.column(lo), (1.0 - t).sqrt(), frame.column(hi), t.sqrt()))
        .collect();
    Ok((with_columns(frame, cols), plan.lambda))
}
