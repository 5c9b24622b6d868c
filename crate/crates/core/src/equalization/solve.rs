use serde_json::json;

use super::{equalize_all, scalar_flatten, LambdaRule};
use crate::diagonal_pipeline::{
    dimension_budget, joint_diagonal_frame, joint_diagonal_frame_partial, select_sign_class, sign_classes, Sign,
};
use crate::operator_model::{Certificate, HermitianTuple, Meta, Mode};
use crate::{Error, Frame, Result};

/// Knobs for [`solve_finite_rank`]. Tolerances are relative to the tuple scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    /// Dead zone for sign classification.
    pub tau_zero: f64,
    /// Agreement tolerance for the equal branch of the ratio split.
    pub tau_eq: f64,
    pub lambda_rule: LambdaRule,
    /// Run below the dimension budget with whatever pool is available.
    pub best_effort: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self { tau_zero: 1e-9, tau_eq: 1e-9, lambda_rule: LambdaRule::Mid, best_effort: false }
    }
}

/// Rank-`k` frame on which every `a_i` compresses to `t_i I_k`.
///
/// Pipeline: jointly diagonal frame, largest sign class, stagewise ratio
/// equalization of the non-zero operators against the first one, then a
/// final flattening of the first operator to `lambda I`. Operators whose sign
/// pattern is zero on the class get `t_i = 0`.
pub fn solve_finite_rank(ops: &HermitianTuple, k: usize, seed: u64, opts: &SolveOptions) -> Result<Certificate> {
    let n = ops.len();
    let d = ops.dim();
    let budget = dimension_budget(n, k)?;
    if d < budget.min_dim && !opts.best_effort {
        return Err(Error::InsufficientDimension { needed: budget.min_dim, available: d });
    }
    let table = if opts.best_effort {
        joint_diagonal_frame_partial(ops, budget.columns, seed)
    } else {
        joint_diagonal_frame(ops, budget.columns, seed)?
    };

    let scale = ops.scale();
    let tau_zero = opts.tau_zero * scale;
    let tau_eq = opts.tau_eq * scale;
    let classes = sign_classes(&table, tau_zero);
    let largest = classes.first().ok_or(Error::PoolTooSmall { needed: k, largest: 0 })?;
    let active: Vec<usize> = (0..n).filter(|&i| largest.pattern[i] != Sign::Zero).collect();
    let needed = match active.len() {
        0 => k,
        m => 3usize
            .checked_pow(u32::try_from(m - 1).map_err(|_| Error::Overflow)?)
            .and_then(|p| p.checked_mul(2 * k))
            .ok_or(Error::Overflow)?,
    };
    let class = select_sign_class(&classes, needed)?;

    let mut meta = Meta { seed: Some(seed), lambda_rule: Some(opts.lambda_rule.as_str().into()), ..Meta::default() };
    meta.tolerances.insert("scale".into(), scale);
    meta.tolerances.insert("tau_zero".into(), tau_zero);
    meta.tolerances.insert("tau_eq".into(), tau_eq);
    meta.budget.insert("pool".into(), budget.pool as u64);
    meta.budget.insert("columns".into(), budget.columns as u64);
    meta.budget.insert("min_dim".into(), budget.min_dim as u64);
    meta.budget.insert("diagonal_columns".into(), table.columns() as u64);
    meta.budget.insert("class_size".into(), largest.len() as u64);
    meta.budget.insert("pool_used".into(), needed as u64);
    meta.details.insert("sign_pattern".into(), json!(class.pattern_string()));
    meta.details.insert("best_effort".into(), json!(opts.best_effort));

    let sub = table.select(&class.indices);
    let mut scalars = vec![0.0; n];

    let frame = if active.is_empty() {
        let cols = (0..k).map(|j| sub.frame.column(j).to_vec()).collect();
        Frame::finite(d, cols)
    } else {
        let mut rows = sub.clone();
        rows.values = active.iter().map(|&i| sub.values[i].clone()).collect();
        let eq = equalize_all(&rows, k, tau_eq)?;
        let (frame, lambda) = scalar_flatten(&eq.frame, &eq.values[0], opts.lambda_rule)?;
        scalars[active[0]] = lambda;
        for (pos, &i) in active.iter().enumerate().skip(1) {
            scalars[i] = lambda / eq.ratios[pos - 1];
        }
        meta.stage_order = active.clone();
        meta.lambda = Some(lambda);
        meta.details.insert("ratios".into(), json!(eq.ratios));
        meta.details.insert("flips".into(), json!(eq.flips));
        meta.details.insert("equal_stages".into(), json!(eq.equal_stages));
        frame
    };

    Certificate::new(ops, Mode::FiniteRank, frame, scalars, meta)
}
