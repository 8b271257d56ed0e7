//! Geometry-kernel properties shared by the property tests and the
//! acceptance run. Oracles here avoid the library's own measure code.

#![allow(dead_code)]

use std::f64::consts::PI;

use circumpoly::bodies::{polar_polytope, PolarPair};
use circumpoly::geometry::{convex_hull, mean_width, volume, Point, Polytope, ToleranceConfig};
use circumpoly::sampling::RngStream;

pub fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn gaussian(rng: &mut RngStream) -> f64 {
    // Box–Muller on the raw uniform stream.
    let u1 = 1.0 - rng.uniform();
    let u2 = rng.uniform();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

fn direction(rng: &mut RngStream, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| gaussian(rng)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-9 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// Hull of 6–29 random points at radii in [0.5, 1.5], shifted so the
/// vertex centroid is the origin.
pub fn random_polytope(seed: u64, d: usize) -> Polytope {
    let mut rng = RngStream::new(seed, 0xbeef);
    let k = 6 + (rng.uniform() * 24.0) as usize;
    let pts: Vec<Point> = (0..k)
        .map(|_| {
            let r = 0.5 + rng.uniform();
            Point::new(direction(&mut rng, d).into_iter().map(|x| r * x).collect())
        })
        .collect();
    let p = convex_hull(&pts, &tol()).expect("random cloud is full-dimensional");
    let c = p.vertex_centroid();
    let shift: Vec<f64> = c.coords().iter().map(|x| -x).collect();
    p.translated(&shift)
}

pub fn hull_idempotence(p: &Polytope) -> Result<(), String> {
    let again = convex_hull(p.vertices(), &tol()).map_err(|e| e.to_string())?;
    if !again.same_vertex_set(p, 1e-12) {
        return Err("vertex set changed".into());
    }
    if again.facets().len() != p.facets().len() || again.edges().len() != p.edges().len() {
        return Err(format!(
            "face counts changed: {}/{} facets",
            again.facets().len(),
            p.facets().len()
        ));
    }
    Ok(())
}

pub fn duality_round_trip(p: &Polytope) -> Result<(), String> {
    let polar = polar_polytope(p, &tol()).map_err(|e| e.to_string())?;
    let back = polar_polytope(&polar, &tol()).map_err(|e| e.to_string())?;
    if !back.same_vertex_set(p, 1e-9) {
        return Err("P** differs from P".into());
    }
    PolarPair::new(p.clone(), &tol())
        .and_then(|pair| pair.validate(1e-9))
        .map_err(|e| e.to_string())
}

pub fn euler_relation(p: &Polytope) -> Result<(), String> {
    let chi = p.vertices().len() as i64 - p.edges().len() as i64 + p.facets().len() as i64;
    if chi == 2 {
        Ok(())
    } else {
        Err(format!("V − E + F = {chi}"))
    }
}

fn support(p: &Polytope, u: &[f64]) -> f64 {
    p.vertices()
        .iter()
        .map(|v| v.coords().iter().zip(u).map(|(a, b)| a * b).sum::<f64>())
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Mean width against plain Monte Carlo over directions: the width
/// `h(u) + h(−u)` averaged over uniform `u`.
pub fn mean_width_matches_quadrature(p: &Polytope, seed: u64, samples: usize) -> Result<(), String> {
    let d = p.dim();
    let mut rng = RngStream::new(seed, 0x5151);
    let (mut sum, mut sum2) = (0.0, 0.0);
    for _ in 0..samples {
        let u = direction(&mut rng, d);
        let neg: Vec<f64> = u.iter().map(|x| -x).collect();
        let w = support(p, &u) + support(p, &neg);
        sum += w;
        sum2 += w * w;
    }
    let m = sum / samples as f64;
    let se = ((sum2 / samples as f64 - m * m) / (samples as f64 - 1.0)).max(0.0).sqrt();
    let exact = mean_width(p);
    if (exact - m).abs() <= 4.0 * se {
        Ok(())
    } else {
        Err(format!("formula {exact} vs quadrature {m} ± {se}"))
    }
}

/// Volume against the hit fraction of uniform points in the bounding box.
/// Sampling continues until `hits` points land inside, which puts the
/// relative error near `1/sqrt(hits)`.
pub fn volume_matches_rejection(p: &Polytope, seed: u64, hits_wanted: u64) -> Result<(), String> {
    let d = p.dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for v in p.vertices() {
        for k in 0..d {
            lo[k] = lo[k].min(v[k]);
            hi[k] = hi[k].max(v[k]);
        }
    }
    let planes: Vec<(Vec<f64>, f64)> = p
        .facets()
        .iter()
        .map(|f| (f.plane.normal().to_vec(), f.plane.offset()))
        .collect();
    let mut rng = RngStream::new(seed, 0x7a7a);
    let mut x = vec![0.0; d];
    let (mut hits, mut samples) = (0u64, 0u64);
    while hits < hits_wanted {
        samples += 1;
        for k in 0..d {
            x[k] = lo[k] + (hi[k] - lo[k]) * rng.uniform();
        }
        let inside = planes
            .iter()
            .all(|(n, c)| n.iter().zip(&x).map(|(a, b)| a * b).sum::<f64>() <= *c);
        hits += inside as u64;
    }
    let boxv: f64 = lo.iter().zip(&hi).map(|(a, b)| b - a).product();
    let est = boxv * hits as f64 / samples as f64;
    let exact = volume(p);
    let rel = (est - exact).abs() / exact;
    if rel <= 0.01 {
        Ok(())
    } else {
        Err(format!("volume {exact} vs rejection {est} (relative {rel:.4})"))
    }
}
