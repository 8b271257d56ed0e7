use std::f64::consts::PI;

use super::hull::quickhull_merged;
use super::linalg::{self, dot};
use super::{flatten, Polytope};
use crate::sampling::{sample_direction_into, RngStream};

pub const DEFAULT_QUADRATURE_BUDGET: usize = 200_000;
pub const DEFAULT_QUADRATURE_SEED: u64 = 0x5eed_0f_3a11;

/// Mean width `W(P)`.
///
/// Planar polygons use Cauchy's formula `W = perimeter / π`; in three
/// dimensions `W = (1/4π) Σ_e ℓ_e θ_e` with `θ_e` the angle between the
/// outer normals of the two facets at edge `e`. Higher dimensions fall back
/// to spherical quadrature of the support function.
pub fn mean_width(p: &Polytope) -> f64 {
    mean_width_estimate(p).0
}

/// Mean width together with its numerical standard error (zero for the
/// exact low-dimensional formulas).
pub fn mean_width_estimate(p: &Polytope) -> (f64, f64) {
    match p.dim() {
        2 => {
            let per: f64 = p
                .edges()
                .iter()
                .map(|&(i, j)| linalg::dist(&p.vertices()[i], &p.vertices()[j]))
                .sum();
            (per / PI, 0.0)
        }
        3 => {
            let inc = p.vertex_facets();
            let mut total = 0.0;
            for &(i, j) in p.edges() {
                let common: Vec<usize> =
                    inc[i].iter().copied().filter(|f| inc[j].contains(f)).collect();
                if common.len() != 2 {
                    continue;
                }
                let n1 = p.facets()[common[0]].plane.normal();
                let n2 = p.facets()[common[1]].plane.normal();
                let angle = dot(n1, n2).clamp(-1.0, 1.0).acos();
                total += linalg::dist(&p.vertices()[i], &p.vertices()[j]) * angle;
            }
            (total / (4.0 * PI), 0.0)
        }
        d => mean_width_quadrature(
            |u| p.support(u),
            d,
            DEFAULT_QUADRATURE_BUDGET,
            DEFAULT_QUADRATURE_SEED,
        ),
    }
}

/// Monte Carlo estimate of `(2/σ(S^{d-1})) ∫ h(u) dσ(u)` with antithetic
/// direction pairs: each sample is the width `h(u) + h(−u)`.
pub fn mean_width_quadrature<F>(h: F, d: usize, budget: usize, seed: u64) -> (f64, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let mut rng = RngStream::new(seed, 0);
    let mut u = vec![0.0; d];
    let mut neg = vec![0.0; d];
    let (mut mean, mut m2) = (0.0, 0.0);
    for k in 0..budget {
        sample_direction_into(&mut rng, &mut u);
        for (a, b) in neg.iter_mut().zip(&u) {
            *a = -b;
        }
        let w = h(&u) + h(&neg);
        let delta = w - mean;
        mean += delta / (k + 1) as f64;
        m2 += delta * (w - mean);
    }
    let n = budget as f64;
    let stderr = if budget > 1 {
        (m2 / (n - 1.0) / n).sqrt()
    } else {
        f64::INFINITY
    };
    (mean, stderr)
}

/// Lebesgue measure of `P`, summed over the cones from an interior point to
/// the simplices of a boundary triangulation.
pub fn volume(p: &Polytope) -> f64 {
    let d = p.dim();
    if d == 2 {
        // Shoelace over the vertices ordered by angle around the centroid.
        let c = p.vertex_centroid();
        let mut vs: Vec<(f64, &[f64])> = p
            .vertices()
            .iter()
            .map(|v| ((v[1] - c[1]).atan2(v[0] - c[0]), v.coords()))
            .collect();
        vs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let n = vs.len();
        let twice: f64 = (0..n)
            .map(|i| {
                let (a, b) = (vs[i].1, vs[(i + 1) % n].1);
                a[0] * b[1] - a[1] * b[0]
            })
            .sum();
        return 0.5 * twice.abs();
    }
    let flat = match flatten(p.vertices(), d) {
        Ok(f) => f,
        Err(_) => return 0.0,
    };
    let hull = match quickhull_merged(&flat, d, 1e-12) {
        Ok(h) => h,
        Err(_) => return 0.0,
    };
    let c = &hull.interior;
    let mut m = vec![0.0; d * d];
    let mut total = 0.0;
    for s in &hull.simplices {
        for (r, &vi) in s.iter().enumerate() {
            for k in 0..d {
                m[r * d + k] = flat[vi * d + k] - c[k];
            }
        }
        total += linalg::det_in_place(&mut m, d).abs();
    }
    total / linalg::factorial(d)
}
