//! Small-dimension convex geometry: simplices, barycentric coordinates,
//! epsilon-interiors, and convex hulls of finite point sets by facet
//! enumeration.

use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Largest ambient dimension the hull routines accept.
pub const MAX_DIM: usize = 8;

/// Relative tolerance for the affine-independence test of a simplex.
const DEGENERACY_TOL: f64 = 1e-12;
/// Barycentric coordinates above `-MEMBERSHIP_TOL` count as inside.
const MEMBERSHIP_TOL: f64 = 1e-10;
/// Relative slack for the epsilon-interior comparison.
const INTERIOR_SLACK: f64 = 1e-12;
/// Margin below which a point counts as on the hull boundary.
pub const INTERIOR_TOL: f64 = 1e-10;

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// `max(1, max |coordinate|)` over a point set.
pub fn coordinate_scale<'a>(points: impl IntoIterator<Item = &'a Vec<f64>>) -> f64 {
    points.into_iter().flatten().fold(1.0, |a, x| a.max(x.abs()))
}

/// Convex hull of `n + 1` affinely independent points in `R^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    vertices: Vec<Vec<f64>>,
    /// Inverse of the edge matrix `[v_2 - v_1, ..., v_{n+1} - v_1]`.
    inverse: DMatrix<f64>,
    size: f64,
}

/// Convex weights of a point over the vertices of a simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct Barycentric {
    pub coords: Vec<f64>,
}

impl Barycentric {
    pub fn sum(&self) -> f64 {
        self.coords.iter().sum()
    }

    pub fn min(&self) -> f64 {
        self.coords.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

impl Simplex {
    /// Fails with [`Error::DegenerateSimplex`] unless `|det E| >= 1e-12 * size^n`,
    /// where `E` is the edge matrix and `size` the longest edge.
    pub fn new(vertices: Vec<Vec<f64>>) -> Result<Self> {
        let n = vertices.len().saturating_sub(1);
        if n == 0 || vertices.iter().any(|v| v.len() != n) {
            return Err(Error::DegenerateSimplex);
        }
        if n > MAX_DIM {
            return Err(Error::DimensionTooLarge(n));
        }
        if vertices.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::DegenerateSimplex);
        }
        let base = &vertices[0];
        let edges = DMatrix::from_fn(n, n, |r, c| vertices[c + 1][r] - base[r]);
        let mut size = 0.0f64;
        for (i, a) in vertices.iter().enumerate() {
            for b in &vertices[i + 1..] {
                size = size.max(dist(a, b));
            }
        }
        let det = edges.clone().lu().determinant();
        if !(det.abs() >= DEGENERACY_TOL * size.powi(n as i32)) || size == 0.0 {
            return Err(Error::DegenerateSimplex);
        }
        let inverse = edges.try_inverse().ok_or(Error::DegenerateSimplex)?;
        Ok(Self { vertices, inverse, size })
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.vertices[i]
    }

    /// Longest edge.
    pub fn size(&self) -> f64 {
        self.size
    }

    pub fn centroid(&self) -> Vec<f64> {
        let n = self.dim();
        (0..n).map(|r| self.vertices.iter().map(|v| v[r]).sum::<f64>() / (n + 1) as f64).collect()
    }

    fn check_point(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: v.len() });
        }
        Ok(())
    }

    /// Unique weights `t` with `sum t_i = 1` and `sum t_i v_i = v`.
    pub fn barycentric(&self, v: &[f64]) -> Result<Barycentric> {
        self.check_point(v)?;
        let n = self.dim();
        let rhs = DVector::from_fn(n, |r, _| v[r] - self.vertices[0][r]);
        let tail = &self.inverse * rhs;
        let mut coords = Vec::with_capacity(n + 1);
        coords.push(1.0 - tail.iter().sum::<f64>());
        coords.extend(tail.iter());
        Ok(Barycentric { coords })
    }

    /// Gradients of the barycentric coordinate functions.
    fn gradients(&self) -> Vec<Vec<f64>> {
        let n = self.dim();
        let mut grads = Vec::with_capacity(n + 1);
        let first: Vec<f64> = (0..n).map(|c| -(0..n).map(|r| self.inverse[(r, c)]).sum::<f64>()).collect();
        grads.push(first);
        for r in 0..n {
            grads.push((0..n).map(|c| self.inverse[(r, c)]).collect());
        }
        grads
    }

    /// Signed distance from `v` to each facet, positive inside. Entry `i` is
    /// the facet opposite vertex `i`.
    pub fn facet_distances(&self, v: &[f64]) -> Result<Vec<f64>> {
        let bary = self.barycentric(v)?;
        Ok(self.gradients().iter().zip(&bary.coords).map(|(g, t)| t / dot(g, g).sqrt()).collect())
    }

    /// Largest `eps` such that the closed `eps`-ball about `v` lies in the simplex
    /// (negative outside).
    pub fn interior_margin(&self, v: &[f64]) -> Result<f64> {
        Ok(self.facet_distances(v)?.into_iter().fold(f64::INFINITY, f64::min))
    }

    /// Whether the closed `eps`-ball about `v` lies in the simplex, up to a
    /// relative slack of `1e-12` of the simplex size.
    pub fn eps_interior_contains(&self, v: &[f64], eps: f64) -> Result<bool> {
        if eps < 0.0 {
            return Err(Error::InvalidArgument("eps must be non-negative".into()));
        }
        Ok(self.interior_margin(v)? + INTERIOR_SLACK * self.size >= eps)
    }

    /// Membership with barycentric tolerance `1e-10`.
    pub fn contains(&self, v: &[f64]) -> Result<bool> {
        Ok(self.barycentric(v)?.min() >= -MEMBERSHIP_TOL)
    }
}

/// See [`Simplex::barycentric`].
pub fn barycentric(s: &Simplex, v: &[f64]) -> Result<Barycentric> {
    s.barycentric(v)
}

/// See [`Simplex::eps_interior_contains`].
pub fn eps_interior_contains(s: &Simplex, v: &[f64], eps: f64) -> Result<bool> {
    s.eps_interior_contains(v, eps)
}

/// See [`Simplex::contains`].
pub fn contains(s: &Simplex, v: &[f64]) -> Result<bool> {
    s.contains(v)
}

/// Supporting hyperplane `normal . y <= offset` with a unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub normal: Vec<f64>,
    pub offset: f64,
}

/// Convex hull of a finite point set, computed inside its affine hull.
///
/// Facets are expressed in the coordinates of an orthonormal basis of the
/// affine hull (`basis`, anchored at `center`); when the points span `R^n`
/// those coordinates are a rotation of the ambient ones, so distances agree.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexHull {
    points: Vec<Vec<f64>>,
    center: Vec<f64>,
    /// `n x r` orthonormal columns.
    basis: DMatrix<f64>,
    facets: Vec<Facet>,
    vertices: Vec<usize>,
    scale: f64,
}

/// Calls `f` on every `r`-subset of `0..m` in lexicographic order.
pub(crate) fn for_each_combination(m: usize, r: usize, mut f: impl FnMut(&[usize])) {
    if r > m {
        return;
    }
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        f(&idx);
        let Some(pos) = (0..r).rev().find(|&p| idx[p] != p + m - r) else {
            return;
        };
        idx[pos] += 1;
        for q in pos + 1..r {
            idx[q] = idx[q - 1] + 1;
        }
    }
}

/// Normal of the hyperplane through `r` points in `R^r` by cofactor expansion;
/// zero when the points are affinely dependent.
fn hyperplane_normal(pts: &[&[f64]]) -> Vec<f64> {
    let r = pts.len();
    if r == 1 {
        return vec![1.0];
    }
    let rows: Vec<Vec<f64>> = pts[1..].iter().map(|p| p.iter().zip(pts[0]).map(|(a, b)| a - b).collect()).collect();
    (0..r)
        .map(|skip| {
            let minor = DMatrix::from_fn(r - 1, r - 1, |i, j| rows[i][if j < skip { j } else { j + 1 }]);
            let sign = if skip % 2 == 0 { 1.0 } else { -1.0 };
            sign * minor.determinant()
        })
        .collect()
}

/// Rank of the centered point matrix with singular values above `cutoff`,
/// together with the matching right singular vectors.
fn affine_basis(points: &[Vec<f64>], center: &[f64], cutoff: f64) -> DMatrix<f64> {
    let n = center.len();
    let centered = DMatrix::from_fn(points.len(), n, |i, j| points[i][j] - center[j]);
    let svd = centered.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let keep: Vec<usize> = (0..svd.singular_values.len()).filter(|&i| svd.singular_values[i] > cutoff).collect();
    DMatrix::from_fn(n, keep.len(), |r, c| v_t[(keep[c], r)])
}

impl ConvexHull {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let n = points.first().map_or(0, Vec::len);
        if points.is_empty() || n == 0 {
            return Err(Error::InvalidArgument("hull needs at least one point of dimension >= 1".into()));
        }
        if points.iter().any(|p| p.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: points.iter().map(Vec::len).find(|&l| l != n).unwrap_or(0),
            });
        }
        if n > MAX_DIM {
            return Err(Error::DimensionTooLarge(n));
        }
        let scale = coordinate_scale(&points);
        let m = points.len();
        let center: Vec<f64> = (0..n).map(|j| points.iter().map(|p| p[j]).sum::<f64>() / m as f64).collect();
        let basis = affine_basis(&points, &center, INTERIOR_TOL * scale);
        let r = basis.ncols();
        let reduced: Vec<Vec<f64>> = points
            .iter()
            .map(|p| (0..r).map(|c| (0..n).map(|j| basis[(j, c)] * (p[j] - center[j])).sum()).collect())
            .collect();

        let tol = INTERIOR_TOL * scale;
        let mut facets: Vec<Facet> = Vec::new();
        if r > 0 {
            for_each_combination(m, r, |subset| {
                let pts: Vec<&[f64]> = subset.iter().map(|&i| reduced[i].as_slice()).collect();
                let raw = hyperplane_normal(&pts);
                let len = dot(&raw, &raw).sqrt();
                if len <= f64::EPSILON * scale.powi(r as i32 - 1) {
                    return;
                }
                let normal: Vec<f64> = raw.iter().map(|x| x / len).collect();
                let offset = dot(&normal, pts[0]);
                let sides: Vec<f64> = reduced.iter().map(|q| dot(&normal, q) - offset).collect();
                let facet = if sides.iter().all(|&s| s <= tol) {
                    Facet { normal, offset }
                } else if sides.iter().all(|&s| s >= -tol) {
                    Facet { normal: normal.iter().map(|x| -x).collect(), offset: -offset }
                } else {
                    return;
                };
                let seen = facets
                    .iter()
                    .any(|f| (f.offset - facet.offset).abs() <= tol && dist(&f.normal, &facet.normal) <= 1e-9);
                if !seen {
                    facets.push(facet);
                }
            });
        }

        let mut vertices: Vec<usize> = Vec::new();
        for (i, q) in reduced.iter().enumerate() {
            let on = facets.iter().filter(|f| (dot(&f.normal, q) - f.offset).abs() <= tol).count();
            let extreme = if r == 0 { true } else { on >= r };
            if extreme && !vertices.iter().any(|&j| dist(&points[j], &points[i]) <= tol) {
                vertices.push(i);
            }
        }

        Ok(Self { points, center, basis, facets, vertices, scale })
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    /// Dimension of the affine hull.
    pub fn affine_dim(&self) -> usize {
        self.basis.ncols()
    }

    /// Facets within the affine hull (see the type docs for coordinates).
    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Indices of the extreme points, first occurrence of each.
    pub fn vertex_indices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn vertices(&self) -> Vec<Vec<f64>> {
        self.vertices.iter().map(|&i| self.points[i].clone()).collect()
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Distance from `v` to the nearest facet, positive inside. `None` when the
    /// hull has empty interior in `R^n`.
    pub fn margin(&self, v: &[f64]) -> Result<Option<f64>> {
        let n = self.dim();
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: v.len() });
        }
        if self.affine_dim() < n {
            return Ok(None);
        }
        let y: Vec<f64> = (0..n).map(|c| (0..n).map(|j| self.basis[(j, c)] * (v[j] - self.center[j])).sum()).collect();
        Ok(Some(self.facets.iter().map(|f| f.offset - dot(&f.normal, &y)).fold(f64::INFINITY, f64::min)))
    }
}

/// Vertices of a regular `n`-simplex centered at `center` with circumradius
/// `radius`.
pub fn regular_simplex(center: &[f64], radius: f64) -> Vec<Vec<f64>> {
    let n = center.len();
    let stretch = ((n + 1) as f64 / n as f64).sqrt();
    (0..=n)
        .map(|i| {
            (1..=n)
                .map(|k| {
                    let norm = ((k * (k + 1)) as f64).sqrt();
                    let h = match i.cmp(&k) {
                        std::cmp::Ordering::Less => 1.0 / norm,
                        std::cmp::Ordering::Equal => -(k as f64) / norm,
                        std::cmp::Ordering::Greater => 0.0,
                    };
                    center[k - 1] + radius * stretch * h
                })
                .collect()
        })
        .collect()
}

/// A simplex inside `conv(points)` whose `eps`-interior contains `v`.
///
/// With `rho` the distance from `v` to the nearest hull facet, the simplex is
/// regular, centered at `v`, with circumradius `rho / 2`; its inradius
/// `rho / (2n)` is returned as `eps`. Its vertices sit in the `rho`-ball about
/// `v`, which the hull contains.
pub fn simplex_around(points: &[Vec<f64>], v: &[f64]) -> Result<(Simplex, f64)> {
    let hull = ConvexHull::new(points.to_vec())?;
    let margin = hull.margin(v)?.unwrap_or(0.0);
    if !(margin > INTERIOR_TOL * hull.scale()) {
        return Err(Error::NotInterior { margin });
    }
    let n = v.len();
    let radius = margin / 2.0;
    let simplex = Simplex::new(regular_simplex(v, radius))?;
    Ok((simplex, radius / n as f64))
}
