//! The primal model `K^(n)`, an intersection of `n` random halfspaces, and
//! the dual model `K_n^*`, the hull of `n` random points of `X_K`.
//!
//! Both models condition on the event that the random polytope fits the
//! parallel body: the primal trial is kept iff `⋂ H_i^-` is bounded and lies
//! in `K_1`, the dual trial iff `K_1^* ⊆ conv{x_i}`. Nothing is ever clipped
//! against the smooth set `K_1`.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::bodies::Body;
use crate::estimators::{Accumulator, Estimate};
use crate::geometry::linalg::{self, dot, norm};
use crate::geometry::{
    convex_hull_indexed, halfspace_intersection_indexed, GeometryError, Hyperplane, Point,
    Polytope, ToleranceConfig,
};
use crate::sampling::{
    sample_direction_into, sample_mu_k_star_into, sample_simplex_weights, RngStream,
};

/// Uniform points per simplex when integrating `μ^*` over `S_F`.
pub const DEFAULT_SIMPLEX_BUDGET: usize = 2000;

/// Fresh `μ_K^*` points per trial for the complement mass.
pub const DEFAULT_COMPLEMENT_SAMPLES: usize = 4000;

/// Cutting halfspaces collected before the primal polytope is recomputed.
const PRIMAL_BATCH: usize = 4;

/// Slack added to the vertex-distance bound before a draw is skipped.
const FILTER_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RejectReason {
    Unbounded,
    EscapesK1,
    Degenerate,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("facet {facet}: no vertex of the polar body lies beyond it (margin {margin:e})")]
    SeparationFailure { facet: usize, margin: f64 },
    #[error("facet {facet} has {vertices} vertices, expected a simplex")]
    NonSimplicialFacet { facet: usize, vertices: usize },
    #[error("the origin lies in the simplex")]
    OriginInSimplex,
    #[error("a simplex in R^{dim} needs {} vertices, got {got}", dim + 1)]
    SimplexShape { dim: usize, got: usize },
    #[error("the reference body is not a polytope")]
    NotPolytopal,
}

/// An accepted realization.
#[derive(Debug, Clone)]
pub struct AcceptedTrial {
    pub polytope: Polytope,
    pub proper_vertices: Vec<usize>,
    pub proper_facets: Vec<usize>,
    /// Primal: draw index of the hyperplane behind each facet. Dual: input
    /// index of each vertex.
    pub sources: Vec<usize>,
}

#[derive(Debug, Clone)]
pub enum TrialOutcome {
    Accepted(AcceptedTrial),
    Rejected(RejectReason),
}

impl TrialOutcome {
    pub fn accepted(&self) -> Option<&AcceptedTrial> {
        match self {
            TrialOutcome::Accepted(t) => Some(t),
            TrialOutcome::Rejected(_) => None,
        }
    }

    pub fn is_accepted(&self) -> bool {
        matches!(self, TrialOutcome::Accepted(_))
    }

    pub fn reject_reason(&self) -> Option<RejectReason> {
        match self {
            TrialOutcome::Accepted(_) => None,
            TrialOutcome::Rejected(r) => Some(*r),
        }
    }
}

/// Draws `n` hyperplanes from `μ_K` and builds `K^(n)`.
pub fn build_primal(body: &Body, n: usize, rng: &mut RngStream) -> TrialOutcome {
    build_primal_with(body, n, |u| {
        // Same draw order as `sample_mu_k_into`, so dual builds on an equal
        // stream see the same hyperplanes.
        sample_direction_into(rng, u);
        let t = rng.uniform();
        (body.support(u) + t, t)
    })
}

/// Builds `⋂ H_i^-` from explicit halfspaces, each containing `K`.
pub fn build_primal_from_halfspaces(body: &Body, halfspaces: &[Hyperplane]) -> TrialOutcome {
    let mut it = halfspaces.iter();
    build_primal_with(body, halfspaces.len(), |u| {
        let h = it.next().expect("one halfspace per draw");
        u.copy_from_slice(h.normal());
        (h.offset(), h.offset() - body.support(h.normal()))
    })
}

struct Stage {
    polytope: Polytope,
    planes: Vec<Hyperplane>,
    sources: Vec<usize>,
    distances: Vec<f64>,
    delta: f64,
    /// Vertex distances keyed by the sorted sources of the incident facets,
    /// so vertices surviving a refinement are not measured again.
    cache: HashMap<Vec<usize>, f64>,
}

fn intersect(
    body: &Body,
    planes: Vec<Hyperplane>,
    sources: Vec<usize>,
    previous: &HashMap<Vec<usize>, f64>,
    tol: &ToleranceConfig,
) -> Result<Stage, GeometryError> {
    let witness = Point::origin(body.dim());
    let ix = halfspace_intersection_indexed(&planes, &witness, tol)?;
    let planes: Vec<Hyperplane> = ix.facet_sources.iter().map(|&i| planes[i].clone()).collect();
    let sources: Vec<usize> = ix.facet_sources.iter().map(|&i| sources[i]).collect();
    let mut cache = HashMap::with_capacity(ix.polytope.vertices().len());
    let distances: Vec<f64> = ix
        .polytope
        .vertex_facets()
        .into_iter()
        .zip(ix.polytope.vertices())
        .map(|(facets, v)| {
            let mut key: Vec<usize> = facets.iter().map(|&f| sources[f]).collect();
            key.sort_unstable();
            let dist = match previous.get(&key) {
                Some(&x) => x,
                None => body.distance(v),
            };
            cache.insert(key, dist);
            dist
        })
        .collect();
    let delta = distances.iter().copied().fold(0.0, f64::max);
    Ok(Stage {
        polytope: ix.polytope,
        planes,
        sources,
        distances,
        delta,
        cache,
    })
}

/// The primal builder. `draw` writes a unit normal and returns
/// `(offset, offset − h(K, u))`.
///
/// Hyperplanes are consumed in order. Once the running intersection is
/// bounded, a draw is kept only if it cuts the current polytope: a hyperplane
/// with slack `t` at least the largest vertex distance to `K` cannot, and the
/// rest are tested against the vertices. The result is the intersection of
/// all `n` halfspaces.
fn build_primal_with<F>(body: &Body, n: usize, mut draw: F) -> TrialOutcome
where
    F: FnMut(&mut [f64]) -> (f64, f64),
{
    let d = body.dim();
    let tol = ToleranceConfig::default();
    let mut u = vec![0.0; d];
    let mut planes = Vec::new();
    let mut sources = Vec::new();
    let mut drawn = 0;
    let mut target = n.min(4 * (d + 1));

    let mut stage = loop {
        while drawn < target {
            let (c, _) = draw(&mut u);
            planes.push(Hyperplane::new_unchecked(u.clone(), c));
            sources.push(drawn);
            drawn += 1;
        }
        match intersect(body, planes.clone(), sources.clone(), &HashMap::new(), &tol) {
            Ok(s) => break s,
            Err(GeometryError::Unbounded) if drawn < n => target = n.min(2 * target),
            Err(GeometryError::Unbounded) => return TrialOutcome::Rejected(RejectReason::Unbounded),
            Err(_) => return TrialOutcome::Rejected(RejectReason::Degenerate),
        }
    };

    let mut pending: Vec<(Hyperplane, usize)> = Vec::new();
    let refine = |stage: Stage, pending: &mut Vec<(Hyperplane, usize)>| {
        let mut planes = stage.planes;
        let mut sources = stage.sources;
        for (h, i) in pending.drain(..) {
            planes.push(h);
            sources.push(i);
        }
        intersect(body, planes, sources, &stage.cache, &tol)
    };
    while drawn < n {
        let (c, t) = draw(&mut u);
        let index = drawn;
        drawn += 1;
        if t >= stage.delta + FILTER_MARGIN || stage.polytope.support(&u) <= c {
            continue;
        }
        pending.push((Hyperplane::new_unchecked(u.clone(), c), index));
        if pending.len() >= PRIMAL_BATCH {
            stage = match refine(stage, &mut pending) {
                Ok(s) => s,
                Err(_) => return TrialOutcome::Rejected(RejectReason::Degenerate),
            };
        }
    }
    if !pending.is_empty() {
        stage = match refine(stage, &mut pending) {
            Ok(s) => s,
            Err(_) => return TrialOutcome::Rejected(RejectReason::Degenerate),
        };
    }

    if stage.delta > 1.0 {
        return TrialOutcome::Rejected(RejectReason::EscapesK1);
    }
    let proper_vertices = (0..stage.distances.len())
        .filter(|&i| stage.distances[i] < 1.0)
        .collect();
    let proper_facets = stage
        .polytope
        .facets()
        .iter()
        .enumerate()
        .filter(|(_, f)| f.plane.offset() - body.support(f.plane.normal()) < 1.0)
        .map(|(i, _)| i)
        .collect();
    TrialOutcome::Accepted(AcceptedTrial {
        polytope: stage.polytope,
        proper_vertices,
        proper_facets,
        sources: stage.sources,
    })
}

/// `n` points from `μ_K^*`, drawn in the same order as [`build_primal`]'s
/// hyperplanes.
pub fn draw_dual_points(body: &Body, n: usize, rng: &mut RngStream) -> Vec<Point> {
    let d = body.dim();
    (0..n)
        .map(|_| {
            let mut x = vec![0.0; d];
            sample_mu_k_star_into(rng, body, &mut x);
            Point::new(x)
        })
        .collect()
}

/// Draws `n` points from `μ_K^*` and builds `K_n^*`.
pub fn build_dual(body: &Body, n: usize, rng: &mut RngStream) -> TrialOutcome {
    build_dual_from_points(body, &draw_dual_points(body, n, rng))
}

/// `true` iff the halfspace `⟨x, ν⟩ ≤ c` is certified to contain `K_1^*`.
///
/// `K_1` lies between the balls of radius `ρ + 1` and `R + 1` about the
/// origin, which settles most facets; the rest use the bisected support
/// value of `K_1^*`, which errs upward.
pub fn halfspace_contains_k1_star(body: &Body, normal: &[f64], offset: f64) -> bool {
    if offset >= 1.0 / (body.inradius() + 1.0) {
        return true;
    }
    if offset < 1.0 / (body.circumradius() + 1.0) {
        return false;
    }
    offset >= body.support_k1_star(normal)
}

/// Builds `conv{x_i}` and accepts it iff it contains `K_1^*`.
pub fn build_dual_from_points(body: &Body, points: &[Point]) -> TrialOutcome {
    let d = body.dim();
    if points.len() < d + 1 {
        return TrialOutcome::Rejected(RejectReason::Unbounded);
    }
    let tol = ToleranceConfig::default();
    let (q, sources) = match convex_hull_indexed(points, &tol) {
        Ok(r) => r,
        Err(_) => return TrialOutcome::Rejected(RejectReason::Degenerate),
    };
    for f in q.facets() {
        if !halfspace_contains_k1_star(body, f.plane.normal(), f.plane.offset()) {
            return TrialOutcome::Rejected(RejectReason::EscapesK1);
        }
    }
    let proper_vertices = (0..q.vertices().len())
        .filter(|&i| !body.in_k1_star(&q.vertices()[i]))
        .collect();
    // Under acceptance no facet's hyperplane meets K_1^*.
    let proper_facets = (0..q.facets().len()).collect();
    TrialOutcome::Accepted(AcceptedTrial {
        polytope: q,
        proper_vertices,
        proper_facets,
        sources,
    })
}

/// Index of the vertex of `polar` maximizing `⟨v, ν⟩` (lowest index on
/// ties). It must lie strictly beyond the facet hyperplane `⟨x, ν⟩ = c`.
pub fn find_v_f(normal: &[f64], offset: f64, polar: &Polytope, facet: usize) -> Result<usize, ModelError> {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, v) in polar.vertices().iter().enumerate() {
        let s = dot(v, normal);
        if s > best_val {
            best = i;
            best_val = s;
        }
    }
    if best_val > offset {
        Ok(best)
    } else {
        Err(ModelError::SeparationFailure {
            facet,
            margin: best_val - offset,
        })
    }
}

/// `μ^*(S) = (1/σ(S^{d-1})) ∫_S ‖x‖^{-(d+1)} dx` for a `d`-simplex not
/// containing the origin, by uniform sampling in `S`.
pub fn mu_star_simplex(simplex: &[Point], budget: usize, rng: &mut RngStream) -> Result<Estimate, ModelError> {
    let d = simplex.first().map(|p| p.dim()).unwrap_or(0);
    if simplex.len() != d + 1 || d < 2 {
        return Err(ModelError::SimplexShape {
            dim: d,
            got: simplex.len(),
        });
    }
    // Barycentric coordinates of the origin.
    let m = d + 1;
    let mut a = vec![0.0; m * m];
    for (j, v) in simplex.iter().enumerate() {
        for k in 0..d {
            a[k * m + j] = v[k];
        }
        a[d * m + j] = 1.0;
    }
    let mut rhs = vec![0.0; m];
    rhs[d] = 1.0;
    let zero = Estimate {
        mean: 0.0,
        stderr: 0.0,
        count: budget as u64,
        rejected: 0,
    };
    match linalg::solve(&a, &rhs, m) {
        Some(l) if l.iter().all(|&x| x >= -1e-12) => return Err(ModelError::OriginInSimplex),
        Some(_) => {}
        None => return Ok(zero),
    }
    let mut edges = vec![0.0; d * d];
    for r in 0..d {
        for k in 0..d {
            edges[r * d + k] = simplex[r + 1][k] - simplex[0][k];
        }
    }
    let vol = linalg::det_in_place(&mut edges, d).abs() / linalg::factorial(d);
    if vol == 0.0 {
        return Ok(zero);
    }
    let mut w = vec![0.0; m];
    let mut x = vec![0.0; d];
    let mut acc = Accumulator::new();
    for _ in 0..budget {
        sample_simplex_weights(rng, &mut w);
        x.iter_mut().for_each(|c| *c = 0.0);
        for (wi, v) in w.iter().zip(simplex) {
            for (c, vk) in x.iter_mut().zip(v.iter()) {
                *c += wi * vk;
            }
        }
        acc.push(norm(&x).powi(-(d as i32 + 1)));
    }
    let e = acc.finish();
    let factor = vol / linalg::sphere_area(d);
    Ok(Estimate {
        mean: e.mean * factor,
        stderr: e.stderr * factor,
        count: e.count,
        rejected: 0,
    })
}

/// A proper facet `F` of `K_n^*` with its simplex `S_F = conv(F, v_F)`.
#[derive(Debug, Clone)]
pub struct ProperFacetRecord {
    pub facet: usize,
    pub simplex: Vec<Point>,
    /// Index of `v_F` among the vertices of the polar body.
    pub apex: usize,
    pub mass: Estimate,
}

/// The simplices `S_F` and their `μ^*` masses over the proper facets of an
/// accepted dual trial. The body must be a polytope.
pub fn proper_facet_records(
    trial: &AcceptedTrial,
    body: &Body,
    budget: usize,
    rng: &mut RngStream,
) -> Result<Vec<ProperFacetRecord>, ModelError> {
    let polar = body.polar_ref().ok_or(ModelError::NotPolytopal)?;
    let q = &trial.polytope;
    let d = q.dim();
    let mut out = Vec::with_capacity(trial.proper_facets.len());
    for &fi in &trial.proper_facets {
        let f = &q.facets()[fi];
        if f.vertices.len() != d {
            return Err(ModelError::NonSimplicialFacet {
                facet: fi,
                vertices: f.vertices.len(),
            });
        }
        let apex = find_v_f(f.plane.normal(), f.plane.offset(), polar, fi)?;
        let mut simplex: Vec<Point> = f.vertices.iter().map(|&v| q.vertices()[v].clone()).collect();
        simplex.push(polar.vertices()[apex].clone());
        let mass = mu_star_simplex(&simplex, budget, rng)?;
        out.push(ProperFacetRecord {
            facet: fi,
            simplex,
            apex,
            mass,
        });
    }
    Ok(out)
}

/// `T_q^* = Σ_F μ^*(S_F)^q` over the proper facets, with the integration
/// error propagated to first order. `q = 0` is the exact facet count.
pub fn t_q_star(
    trial: &AcceptedTrial,
    body: &Body,
    q: u32,
    budget: usize,
    rng: &mut RngStream,
) -> Result<Estimate, ModelError> {
    if q == 0 {
        return Ok(Estimate::exact(trial.proper_facets.len() as f64));
    }
    let records = proper_facet_records(trial, body, budget, rng)?;
    Ok(sum_of_powers(&records, q))
}

/// `Σ m_F^q` with first-order error propagation.
pub fn sum_of_powers(records: &[ProperFacetRecord], q: u32) -> Estimate {
    let mut total = 0.0;
    let mut var = 0.0;
    let mut count = 0;
    for r in records {
        let m = r.mass.mean;
        total += m.powi(q as i32);
        let deriv = q as f64 * m.powi(q as i32 - 1);
        var += (deriv * r.mass.stderr).powi(2);
        count += r.mass.count;
    }
    Estimate {
        mean: total,
        stderr: var.sqrt(),
        count,
        rejected: 0,
    }
}

/// `μ^*(K^* ∖ Q)` as the fraction of `m` fresh `μ_K^*` points outside `Q`,
/// with binomial stderr. Valid when `K_1^* ⊆ Q`, since then `K^* ∖ Q ⊆ X_K`.
pub fn mu_star_complement(q: &Polytope, body: &Body, m: usize, rng: &mut RngStream) -> Estimate {
    let d = body.dim();
    let normals: Vec<f64> = q.facets().iter().flat_map(|f| f.plane.normal().to_vec()).collect();
    let offsets: Vec<f64> = q.facets().iter().map(|f| f.plane.offset()).collect();
    let mut x = vec![0.0; d];
    let mut outside = 0u64;
    for _ in 0..m {
        sample_mu_k_star_into(rng, body, &mut x);
        let out = offsets
            .iter()
            .enumerate()
            .any(|(k, &c)| dot(&normals[k * d..(k + 1) * d], &x) > c);
        outside += out as u64;
    }
    let p = outside as f64 / m as f64;
    Estimate {
        mean: p,
        stderr: (p * (1.0 - p) / m as f64).sqrt(),
        count: m as u64,
        rejected: 0,
    }
}
