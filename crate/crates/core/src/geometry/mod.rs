//! Finite-dimensional convex geometry kernel.
//!
//! Polytopes are stored in both representations at once: a vertex list, the
//! facet inequalities `⟨x, u_F⟩ ≤ c_F` with their incident vertices, and the
//! edge graph. Hulls are computed with an incremental quickhull over simplicial
//! facets; coplanar simplices are merged afterwards, so non-simplicial input
//! such as a cube comes back with its true facets. Halfspace intersections go
//! through the dual hull, so both random models share one hull code path.
//!
//! All incidence and containment predicates use a single absolute tolerance
//! (`ToleranceConfig::geom`). Inputs are random and almost surely in general
//! position, so there are no exact predicates.

mod distance;
mod halfspace;
mod hull;
pub mod linalg;
mod measure;

use std::collections::HashSet;
use std::fmt;
use std::ops::Deref;

use thiserror::Error;

pub use distance::distance_to_hull;
pub use halfspace::{halfspace_intersection, halfspace_intersection_indexed, IndexedIntersection};
pub use hull::{convex_hull, convex_hull_indexed};
pub use measure::{
    mean_width, mean_width_estimate, mean_width_quadrature, volume, DEFAULT_QUADRATURE_BUDGET,
    DEFAULT_QUADRATURE_SEED,
};

use linalg::{dot, norm};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("halfspace intersection is unbounded")]
    Unbounded,
    #[error("witness violates halfspace {index} (slack {slack:e})")]
    WitnessViolation { index: usize, slack: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid polytope: {0}")]
    InvalidPolytope(String),
}

/// Tolerances shared by every geometric predicate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Absolute coordinate tolerance for incidence and containment.
    pub geom: f64,
    /// Relative tolerance on unit-vector norms.
    pub unit: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            geom: 1e-9,
            unit: 1e-12,
        }
    }
}

impl ToleranceConfig {
    pub fn new(geom: f64, unit: f64) -> Result<Self, GeometryError> {
        if !(geom > 0.0 && geom < 1e-3) || !(unit > 0.0) {
            return Err(GeometryError::InvalidPolytope(format!(
                "tolerances out of range: geom={geom}, unit={unit}"
            )));
        }
        Ok(Self { geom, unit })
    }
}

/// A point of `R^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        debug_assert!(coords.iter().all(|c| c.is_finite()));
        Self(coords)
    }

    pub fn origin(d: usize) -> Self {
        Self(vec![0.0; d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        norm(&self.0)
    }
}

impl Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Self::new(v)
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    fn from(v: [f64; N]) -> Self {
        Self::new(v.to_vec())
    }
}

/// The hyperplane `H(u, c) = {x : ⟨x, u⟩ = c}` together with its halfspace
/// `H⁻(u, c) = {x : ⟨x, u⟩ ≤ c}`.
#[derive(Debug, Clone, PartialEq)]
pub struct Hyperplane {
    normal: Vec<f64>,
    offset: f64,
}

impl Hyperplane {
    /// Builds a hyperplane from a unit normal. Fails if `‖u‖` deviates from
    /// one by more than the relative unit tolerance.
    pub fn new(normal: Vec<f64>, offset: f64, tol: &ToleranceConfig) -> Result<Self, GeometryError> {
        let n = norm(&normal);
        if (n - 1.0).abs() > tol.unit.max(1e-15) * 4.0 {
            return Err(GeometryError::InvalidPolytope(format!(
                "hyperplane normal has norm {n}"
            )));
        }
        Ok(Self { normal, offset })
    }

    /// Normalizes an arbitrary nonzero normal, rescaling the offset to match.
    pub fn from_unnormalized(normal: Vec<f64>, offset: f64) -> Self {
        let n = norm(&normal);
        Self {
            normal: normal.iter().map(|x| x / n).collect(),
            offset: offset / n,
        }
    }

    pub(crate) fn new_unchecked(normal: Vec<f64>, offset: f64) -> Self {
        Self { normal, offset }
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    /// `⟨x, u⟩ − c`; positive outside the halfspace.
    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        dot(x, &self.normal) - self.offset
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub plane: Hyperplane,
    /// Indices into the owning polytope's vertex list, ascending.
    pub vertices: Vec<usize>,
}

/// A full-dimensional convex polytope in vertex and facet form.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    dim: usize,
    vertices: Vec<Point>,
    facets: Vec<Facet>,
    edges: Vec<(usize, usize)>,
}

impl Polytope {
    /// Assembles a polytope from parts. Edges are derived from the facet
    /// incidences unless given.
    pub fn from_parts(
        dim: usize,
        vertices: Vec<Point>,
        facets: Vec<Facet>,
        edges: Option<Vec<(usize, usize)>>,
    ) -> Self {
        let mut p = Self {
            dim,
            vertices,
            facets,
            edges: Vec::new(),
        };
        p.edges = match edges {
            Some(mut e) => {
                for pair in e.iter_mut() {
                    if pair.0 > pair.1 {
                        *pair = (pair.1, pair.0);
                    }
                }
                e.sort_unstable();
                e.dedup();
                e
            }
            None => p.derive_edges(),
        };
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// The facet halfspaces, in facet order.
    pub fn halfspaces(&self) -> Vec<Hyperplane> {
        self.facets.iter().map(|f| f.plane.clone()).collect()
    }

    /// For every vertex, the facets that contain it.
    pub fn vertex_facets(&self) -> Vec<Vec<usize>> {
        let mut inc = vec![Vec::new(); self.vertices.len()];
        for (fi, f) in self.facets.iter().enumerate() {
            for &v in &f.vertices {
                inc[v].push(fi);
            }
        }
        inc
    }

    pub fn vertex_centroid(&self) -> Point {
        let mut c = vec![0.0; self.dim];
        for v in &self.vertices {
            for (ci, vi) in c.iter_mut().zip(v.iter()) {
                *ci += vi;
            }
        }
        let k = self.vertices.len() as f64;
        Point::new(c.into_iter().map(|x| x / k).collect())
    }

    /// `h(P, u) = max_v ⟨v, u⟩`.
    pub fn support(&self, u: &[f64]) -> f64 {
        self.vertices
            .iter()
            .map(|v| dot(v, u))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn translated(&self, shift: &[f64]) -> Self {
        let vertices = self
            .vertices
            .iter()
            .map(|v| Point::new(v.iter().zip(shift).map(|(a, b)| a + b).collect()))
            .collect();
        let facets = self
            .facets
            .iter()
            .map(|f| Facet {
                plane: Hyperplane::new_unchecked(
                    f.plane.normal.clone(),
                    f.plane.offset + dot(&f.plane.normal, shift),
                ),
                vertices: f.vertices.clone(),
            })
            .collect();
        Self {
            dim: self.dim,
            vertices,
            facets,
            edges: self.edges.clone(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        assert!(factor > 0.0);
        let vertices = self
            .vertices
            .iter()
            .map(|v| Point::new(v.iter().map(|x| x * factor).collect()))
            .collect();
        let facets = self
            .facets
            .iter()
            .map(|f| Facet {
                plane: Hyperplane::new_unchecked(f.plane.normal.clone(), f.plane.offset * factor),
                vertices: f.vertices.clone(),
            })
            .collect();
        Self {
            dim: self.dim,
            vertices,
            facets,
            edges: self.edges.clone(),
        }
    }

    /// Applies the linear map `x ↦ m x` (row-major `d × d`), recomputing the
    /// facet planes from the mapped vertices.
    pub fn linear_image(&self, m: &[f64]) -> Result<Self, GeometryError> {
        let d = self.dim;
        let pts: Vec<Point> = self
            .vertices
            .iter()
            .map(|v| Point::new((0..d).map(|i| dot(&m[i * d..(i + 1) * d], v)).collect()))
            .collect();
        convex_hull(&pts, &ToleranceConfig::default())
    }

    fn derive_edges(&self) -> Vec<(usize, usize)> {
        let inc = self.vertex_facets();
        let mut edges = HashSet::new();
        for f in &self.facets {
            let vs = &f.vertices;
            if vs.len() == self.dim {
                for (a, &i) in vs.iter().enumerate() {
                    for &j in &vs[a + 1..] {
                        edges.insert((i.min(j), i.max(j)));
                    }
                }
                continue;
            }
            // A pair spans an edge iff the smallest face containing both has no
            // other vertex.
            for (a, &i) in vs.iter().enumerate() {
                for &j in &vs[a + 1..] {
                    let key = (i.min(j), i.max(j));
                    if edges.contains(&key) {
                        continue;
                    }
                    let common: Vec<usize> = inc[i]
                        .iter()
                        .copied()
                        .filter(|fi| inc[j].contains(fi))
                        .collect();
                    let mut face: Option<HashSet<usize>> = None;
                    for fi in common {
                        let s: HashSet<usize> = self.facets[fi].vertices.iter().copied().collect();
                        face = Some(match face {
                            None => s,
                            Some(prev) => prev.intersection(&s).copied().collect(),
                        });
                    }
                    if face.map(|s| s.len() == 2).unwrap_or(false) {
                        edges.insert(key);
                    }
                }
            }
        }
        let mut e: Vec<_> = edges.into_iter().collect();
        e.sort_unstable();
        e
    }

    /// `true` iff `⟨x, u_F⟩ ≤ c_F + τ` for every facet.
    pub fn contains(&self, x: &[f64], tol: &ToleranceConfig) -> bool {
        self.facets
            .iter()
            .all(|f| f.plane.signed_distance(x) <= tol.geom)
    }

    /// Checks the structural invariants: containment, incidence exactness,
    /// minimum incidence counts, and Euler's relation in three dimensions.
    pub fn validate(&self, tol: &ToleranceConfig) -> Result<(), GeometryError> {
        let d = self.dim;
        let bad = |m: String| Err(GeometryError::InvalidPolytope(m));
        if self.vertices.len() < d + 1 || self.facets.len() < d + 1 {
            return bad(format!(
                "{} vertices / {} facets is too few in dimension {d}",
                self.vertices.len(),
                self.facets.len()
            ));
        }
        let scale = self
            .vertices
            .iter()
            .map(|v| v.norm())
            .fold(1.0f64, f64::max);
        let eps = tol.geom * scale * 10.0;
        for (fi, f) in self.facets.iter().enumerate() {
            if f.vertices.len() < d {
                return bad(format!("facet {fi} has {} vertices", f.vertices.len()));
            }
            let incident: HashSet<usize> = f.vertices.iter().copied().collect();
            for (vi, v) in self.vertices.iter().enumerate() {
                let s = f.plane.signed_distance(v);
                if s > eps {
                    return bad(format!("vertex {vi} violates facet {fi} by {s:e}"));
                }
                if incident.contains(&vi) != (s.abs() <= eps) {
                    return bad(format!("vertex {vi} / facet {fi} incidence mismatch ({s:e})"));
                }
            }
        }
        for (vi, fs) in self.vertex_facets().iter().enumerate() {
            if fs.len() < d {
                return bad(format!("vertex {vi} lies on {} facets", fs.len()));
            }
        }
        if d == 3 {
            let chi =
                self.vertices.len() as i64 - self.edges.len() as i64 + self.facets.len() as i64;
            if chi != 2 {
                return bad(format!("Euler characteristic {chi}"));
            }
        }
        Ok(())
    }

    /// Vertex set as sorted coordinate keys, for set comparisons up to `eps`.
    pub fn same_vertex_set(&self, other: &Polytope, eps: f64) -> bool {
        if self.vertices.len() != other.vertices.len() {
            return false;
        }
        let mut used = vec![false; other.vertices.len()];
        self.vertices.iter().all(|v| {
            let hit = other
                .vertices
                .iter()
                .enumerate()
                .find(|(j, w)| !used[*j] && linalg::dist(v, w) <= eps);
            match hit {
                Some((j, _)) => {
                    used[j] = true;
                    true
                }
                None => false,
            }
        })
    }
}

impl fmt::Display for Polytope {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Polytope(d={}, f0={}, f1={}, f{}={})",
            self.dim,
            self.vertices.len(),
            self.edges.len(),
            self.dim - 1,
            self.facets.len()
        )
    }
}

/// Flattens points into a row-major buffer, checking the dimension.
pub(crate) fn flatten(points: &[Point], d: usize) -> Result<Vec<f64>, GeometryError> {
    let mut flat = Vec::with_capacity(points.len() * d);
    for p in points {
        if p.dim() != d {
            return Err(GeometryError::DimensionMismatch {
                expected: d,
                got: p.dim(),
            });
        }
        flat.extend_from_slice(p);
    }
    Ok(flat)
}

