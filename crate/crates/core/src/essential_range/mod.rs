//! Joint essential range of cluster models and the infinite-rank builder.
//!
//! For a [`ClusterModel`] every cluster vector recurs infinitely often along
//! the diagonal and the perturbation has finite support, so the joint
//! essential range is exactly `conv(clusters)`. Expectation tuples in it are
//! realized without error by tail basis vectors, which makes every step of
//! the block construction exact.

pub mod fixtures;

use num_complex::Complex64;
use serde_json::json;

use crate::operator_model::{Certificate, Meta, Mode};
use crate::simplex_geometry::{
    coordinate_scale, for_each_combination, simplex_around, ConvexHull, Simplex, INTERIOR_TOL,
};
use crate::{ClusterModel, Error, Frame, Result};

/// Relative tolerance for matching a target against the cluster vectors.
const CLUSTER_MATCH_TOL: f64 = 1e-12;

/// `conv(clusters)`, the joint essential range of a cluster model.
#[derive(Debug, Clone, PartialEq)]
pub struct EssentialRangePolytope {
    hull: ConvexHull,
}

impl EssentialRangePolytope {
    pub fn points(&self) -> &[Vec<f64>] {
        self.hull.points()
    }

    pub fn hull(&self) -> &ConvexHull {
        &self.hull
    }

    pub fn affine_dim(&self) -> usize {
        self.hull.affine_dim()
    }

    pub fn vertices(&self) -> Vec<Vec<f64>> {
        self.hull.vertices()
    }

    pub fn has_interior(&self) -> bool {
        self.hull.affine_dim() == self.hull.dim()
    }

    /// Distance from `v` to the boundary, positive inside; `None` without interior.
    pub fn margin(&self, v: &[f64]) -> Result<Option<f64>> {
        self.hull.margin(v)
    }
}

pub fn essential_range_polytope(model: &ClusterModel) -> Result<EssentialRangePolytope> {
    Ok(EssentialRangePolytope { hull: ConvexHull::new(model.clusters().to_vec())? })
}

/// `a_1, ..., a_n, 1` independent modulo compacts, i.e. the essential range
/// has interior in `R^n`.
pub fn calkin_independent(model: &ClusterModel) -> Result<bool> {
    Ok(essential_range_polytope(model)?.has_interior())
}

/// Every canonical index below `bound` is used or touched by the compact part.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExclusionSet {
    pub bound: usize,
}

impl ExclusionSet {
    /// Starts past the perturbation support.
    pub fn initial(model: &ClusterModel) -> Self {
        Self { bound: model.support() }
    }
}

fn cluster_index(model: &ClusterModel, target: &[f64]) -> Result<usize> {
    if target.len() != model.n() {
        return Err(Error::DimensionMismatch { expected: model.n(), found: target.len() });
    }
    let tol = CLUSTER_MATCH_TOL * model.scale();
    model
        .clusters()
        .iter()
        .position(|c| c.iter().zip(target).all(|(a, b)| (a - b).abs() <= tol))
        .ok_or(Error::TargetNotCluster)
}

/// Smallest `j >= max(bound, support)` whose diagonal value is `target`.
/// The expectation tuple of `e_j` equals `target` exactly.
pub fn pick_tail_vector(model: &ClusterModel, target: &[f64], exclusion: ExclusionSet, eps: f64) -> Result<usize> {
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument("eps must be positive".into()));
    }
    let c = cluster_index(model, target)?;
    Ok(first_index_of(model, c, exclusion.bound.max(model.support())))
}

fn first_index_of(model: &ClusterModel, cluster: usize, from: usize) -> usize {
    let m = model.period();
    from + (cluster + m - from % m) % m
}

/// Unit vector `sum_l coeff_l e_{index_l}` with distinct indices.
#[derive(Debug, Clone, PartialEq)]
pub struct TailVector {
    pub terms: Vec<(usize, f64)>,
}

impl TailVector {
    pub fn support_end(&self) -> usize {
        self.terms.iter().map(|&(j, _)| j + 1).max().unwrap_or(0)
    }

    pub fn to_dense(&self) -> Vec<Complex64> {
        let mut v = vec![Complex64::new(0.0, 0.0); self.support_end()];
        for &(j, c) in &self.terms {
            v[j] = Complex64::new(c, 0.0);
        }
        v
    }

    /// Expectation tuple `(<a_i eta, eta>)_i`; exact because tail indices see
    /// only the diagonal part.
    pub fn expectation(&self, model: &ClusterModel) -> Vec<f64> {
        (0..model.n()).map(|i| self.terms.iter().map(|&(j, c)| c * c * model.diagonal_value(i, j)).sum()).collect()
    }
}

/// Vectors of one block and the exclusion bound after it.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockResult {
    pub vectors: Vec<TailVector>,
    pub bound: ExclusionSet,
}

/// A point of the essential range as a convex combination of clusters.
#[derive(Debug, Clone, PartialEq)]
struct Recipe {
    parts: Vec<(usize, f64)>,
}

fn build_block_from_recipes(model: &ClusterModel, recipes: &[Recipe], exclusion: ExclusionSet) -> BlockResult {
    let mut bound = exclusion.bound.max(model.support());
    let vectors = recipes
        .iter()
        .map(|r| {
            let terms = r
                .parts
                .iter()
                .map(|&(c, w)| {
                    let j = first_index_of(model, c, bound);
                    // a_i e_j = c e_j past the support, so F_i = F_{i-1} + {e_j}.
                    bound = j + 1;
                    (j, w.sqrt())
                })
                .collect();
            TailVector { terms }
        })
        .collect();
    BlockResult { vectors, bound: ExclusionSet { bound } }
}

/// One vector per target, each a tail basis vector whose expectation is the
/// target, with strictly increasing indices past `exclusion`. Compressions
/// between distinct vectors vanish exactly.
pub fn build_block(model: &ClusterModel, targets: &[Vec<f64>], exclusion: ExclusionSet) -> Result<BlockResult> {
    let recipes = targets
        .iter()
        .map(|t| Ok(Recipe { parts: vec![(cluster_index(model, t)?, 1.0)] }))
        .collect::<Result<Vec<_>>>()?;
    Ok(build_block_from_recipes(model, &recipes, exclusion))
}

fn subsets(m: usize, r: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for_each_combination(m, r, |c| out.push(c.to_vec()));
    out
}

/// Cluster simplex whose `min` barycentric coordinate of `v` is largest, or
/// largest interior margin when `by_margin`.
fn best_cluster_simplex(model: &ClusterModel, v: &[f64], by_margin: bool) -> Option<(Vec<usize>, Simplex, f64)> {
    let n = model.n();
    let mut best: Option<(Vec<usize>, Simplex, f64)> = None;
    for subset in subsets(model.period(), n + 1) {
        let Ok(s) = Simplex::new(subset.iter().map(|&c| model.clusters()[c].clone()).collect()) else {
            continue;
        };
        let score = if by_margin { s.interior_margin(v) } else { s.barycentric(v).map(|b| b.min()) };
        let Ok(score) = score else { continue };
        if best.as_ref().is_none_or(|b| score > b.2) {
            best = Some((subset, s, score));
        }
    }
    best
}

/// Streaming construction of orthonormal `phi_1, phi_2, ...` with
/// `<a_r phi_k, phi_j> = v_r delta_{jk}`.
///
/// Each call to [`InfiniteRankBuilder::extend`] adds blocks on fresh tail
/// indices, so a builder extended to `m` columns in several steps yields the
/// same frame as a single run.
#[derive(Debug, Clone)]
pub struct InfiniteRankBuilder {
    model: ClusterModel,
    point: Vec<f64>,
    seed: u64,
    simplex: Simplex,
    weights: Vec<f64>,
    recipes: Vec<Recipe>,
    synthetic: bool,
    margin: f64,
    exclusion: ExclusionSet,
    columns: Vec<Vec<Complex64>>,
}

impl InfiniteRankBuilder {
    /// Fails with [`Error::NoInterior`] when the essential range has empty
    /// interior or `v` is not strictly inside it.
    pub fn new(model: &ClusterModel, v: &[f64], seed: u64) -> Result<Self> {
        let n = model.n();
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: v.len() });
        }
        let polytope = essential_range_polytope(model)?;
        if !polytope.has_interior() {
            return Err(Error::NoInterior(format!(
                "essential range has affine dimension {} < {n}; the operators and 1 are dependent modulo compacts",
                polytope.affine_dim()
            )));
        }
        let scale = model.scale().max(coordinate_scale(std::iter::once(&v.to_vec())));
        let margin = polytope.margin(v)?.unwrap_or(0.0);
        if !(margin > INTERIOR_TOL * scale) {
            return Err(Error::NoInterior(format!("point is not interior to the essential range (margin {margin:e})")));
        }

        let (simplex, recipes, synthetic) = match best_cluster_simplex(model, v, true) {
            Some((subset, s, m)) if m > INTERIOR_TOL * scale => {
                let recipes = subset.iter().map(|&c| Recipe { parts: vec![(c, 1.0)] }).collect();
                (s, recipes, false)
            }
            _ => {
                let (s, _) = simplex_around(model.clusters(), v)?;
                let recipes = s
                    .vertices()
                    .iter()
                    .map(|w| {
                        let (subset, cs, _) = best_cluster_simplex(model, w, false).ok_or(Error::TargetNotCluster)?;
                        let bary = cs.barycentric(w)?;
                        let clamped: Vec<f64> = bary.coords.iter().map(|x| x.max(0.0)).collect();
                        let total: f64 = clamped.iter().sum();
                        let parts = subset
                            .iter()
                            .zip(&clamped)
                            .filter(|(_, &x)| x > 0.0)
                            .map(|(&c, &x)| (c, x / total))
                            .collect();
                        Ok(Recipe { parts })
                    })
                    .collect::<Result<Vec<_>>>()?;
                (s, recipes, true)
            }
        };
        let weights = simplex.barycentric(v)?.coords.iter().map(|x| x.max(0.0)).collect();

        Ok(Self {
            model: model.clone(),
            point: v.to_vec(),
            seed,
            simplex,
            weights,
            recipes,
            synthetic,
            margin,
            exclusion: ExclusionSet::initial(model),
            columns: Vec::new(),
        })
    }

    pub fn simplex(&self) -> &Simplex {
        &self.simplex
    }

    /// Barycentric coordinates of the target point in [`Self::simplex`].
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Whether the simplex was synthesized rather than spanned by clusters.
    pub fn is_synthetic(&self) -> bool {
        self.synthetic
    }

    pub fn exclusion(&self) -> ExclusionSet {
        self.exclusion
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// Builds one more block and returns its combined column.
    pub fn next_column(&mut self) -> &[Complex64] {
        let block = build_block_from_recipes(&self.model, &self.recipes, self.exclusion);
        self.exclusion = block.bound;
        let mut phi = vec![Complex64::new(0.0, 0.0); block.bound.bound];
        for (eta, &s) in block.vectors.iter().zip(&self.weights) {
            let w = s.sqrt();
            for &(j, c) in &eta.terms {
                phi[j] += Complex64::new(w * c, 0.0);
            }
        }
        self.columns.push(phi);
        self.columns.last().expect("just pushed")
    }

    /// Grows the frame to `m` columns (no-op if already there).
    pub fn extend(&mut self, m: usize) {
        while self.columns.len() < m {
            self.next_column();
        }
    }

    pub fn frame(&self) -> Frame {
        Frame::lazy(self.columns.clone())
    }

    pub fn certificate(&self) -> Result<Certificate> {
        let mut meta = Meta { seed: Some(self.seed), ..Meta::default() };
        meta.tolerances.insert("scale".into(), self.model.scale());
        meta.tolerances.insert("margin".into(), self.margin);
        meta.budget.insert("blocks".into(), self.columns.len() as u64);
        meta.budget.insert("next_bound".into(), self.exclusion.bound as u64);
        meta.details.insert("simplex".into(), json!(self.simplex.vertices()));
        meta.details.insert("barycentric".into(), json!(self.weights));
        meta.details.insert("synthetic_simplex".into(), json!(self.synthetic));
        let recipes: Vec<Vec<(usize, f64)>> = self.recipes.iter().map(|r| r.parts.clone()).collect();
        meta.details.insert("vertex_recipes".into(), json!(recipes));
        Certificate::new(&self.model, Mode::InfiniteRank, self.frame(), self.point.clone(), meta)
    }
}

/// `m` columns of an infinite-rank locally minimal projection with
/// compressions `v_r I`.
pub fn build_infinite_rank(model: &ClusterModel, v: &[f64], m: usize, seed: u64) -> Result<Certificate> {
    let mut builder = InfiniteRankBuilder::new(model, v, seed)?;
    builder.extend(m);
    builder.certificate()
}
