//! Fits of simulated estimates against the asymptotic laws, and the
//! comparisons built on them.
//!
//! A law `y ∼ a·ln^{d-1}(n)/n` is fitted as `n·y = a·ln^{d-1} n + b`; the
//! intercept absorbs the lower-order terms, which are `O(ln^{d-2} n / n)`.

use serde::Serialize;
use thiserror::Error;

use crate::bodies::Body;
use crate::estimators::{estimate_width_ratio, Estimate, EstimatorError, SIGMA_MULTIPLIER};
use crate::geometry::{linalg, Polytope};

/// Default relative band for fitted leading constants.
pub const DEFAULT_CONSTANT_BAND: f64 = 0.30;

/// Fewest distinct sample sizes a fit accepts.
pub const MIN_FIT_POINTS: usize = 4;

/// Fewest decades of `n` an exponent fit accepts.
pub const MIN_EXPONENT_DECADES: f64 = 1.5;

#[derive(Debug, Error)]
pub enum AsymptoticsError {
    #[error("a fit needs at least {MIN_FIT_POINTS} distinct n with accepted trials, got {got}")]
    InsufficientPoints { got: usize },
    #[error("the n-range spans {decades:.2} decades, need at least {MIN_EXPONENT_DECADES}")]
    NarrowRange { decades: f64 },
    #[error("facet {facet} has {vertices} vertices; the body is not simplicial")]
    NotSimplicial { facet: usize, vertices: usize },
    #[error("value at n = {n} is not positive")]
    NonpositiveValue { n: usize },
    #[error("bodies of different dimensions")]
    MixedDimensions,
    #[error(transparent)]
    Estimator(#[from] EstimatorError),
}

/// How observations relate to `ln^{d-1} n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LawShape {
    /// `y ∼ a·ln^{d-1}(n)/n`, fitted on `n·y`.
    Gap,
    /// `y ∼ a·ln^{d-1} n`, fitted on `y`.
    Count,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitResult {
    /// Leading coefficient `a`.
    pub coefficient: f64,
    pub coefficient_stderr: f64,
    /// Intercept `b`.
    pub intercept: f64,
    /// Weighted residual norm `sqrt(Σ w_i r_i²)`.
    pub residual_norm: f64,
    pub n_min: usize,
    pub n_max: usize,
    pub points: usize,
}

/// Straight line `y = a·x + b` by weighted least squares. Returns
/// `(a, se_a, b, weighted residual norm)`.
fn weighted_line(x: &[f64], y: &[f64], w: &[f64]) -> (f64, f64, f64, f64) {
    let sw: f64 = w.iter().sum();
    let mx = x.iter().zip(w).map(|(x, w)| x * w).sum::<f64>() / sw;
    let my = y.iter().zip(w).map(|(y, w)| y * w).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(w).map(|(x, w)| w * (x - mx).powi(2)).sum();
    let sxy: f64 = x
        .iter()
        .zip(y)
        .zip(w)
        .map(|((x, y), w)| w * (x - mx) * (y - my))
        .sum();
    let a = sxy / sxx;
    let b = my - a * mx;
    let rss: f64 = x
        .iter()
        .zip(y)
        .zip(w)
        .map(|((x, y), w)| w * (y - a * x - b).powi(2))
        .sum();
    (a, (1.0 / sxx).sqrt(), b, rss.sqrt())
}

/// Usable points: accepted trials behind the estimate and a finite mean.
/// Duplicate `n` keep their first occurrence.
fn usable(points: &[(usize, Estimate)]) -> Vec<(usize, Estimate)> {
    let mut out: Vec<(usize, Estimate)> = Vec::new();
    for &(n, e) in points {
        if e.count > 0 && e.mean.is_finite() && !out.iter().any(|p| p.0 == n) {
            out.push((n, e));
        }
    }
    out
}

/// Weights `1/se²`, or uniform when any stderr vanishes (exact inputs).
fn weights(se: &[f64]) -> Vec<f64> {
    if se.iter().all(|&s| s > 0.0 && s.is_finite()) {
        se.iter().map(|s| 1.0 / (s * s)).collect()
    } else {
        vec![1.0; se.len()]
    }
}

/// Weighted least squares of `n·y` (gap laws) or `y` (count laws) against
/// `ln^{d-1} n`, with intercept.
pub fn fit_log_law(points: &[(usize, Estimate)], d: usize, shape: LawShape) -> Result<FitResult, AsymptoticsError> {
    let pts = usable(points);
    if pts.len() < MIN_FIT_POINTS {
        return Err(AsymptoticsError::InsufficientPoints { got: pts.len() });
    }
    let scale = |n: usize| match shape {
        LawShape::Gap => n as f64,
        LawShape::Count => 1.0,
    };
    let x: Vec<f64> = pts.iter().map(|p| (p.0 as f64).ln().powi(d as i32 - 1)).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.1.mean * scale(p.0)).collect();
    let se: Vec<f64> = pts.iter().map(|p| p.1.stderr * scale(p.0)).collect();
    let (a, se_a, b, res) = weighted_line(&x, &y, &weights(&se));
    Ok(FitResult {
        coefficient: a,
        coefficient_stderr: se_a,
        intercept: b,
        residual_norm: res,
        n_min: pts.iter().map(|p| p.0).min().unwrap_or(0),
        n_max: pts.iter().map(|p| p.0).max().unwrap_or(0),
        points: pts.len(),
    })
}

/// Slope of `ln y` against `ln n`, weighted by `(y/se)²`.
pub fn exponent_fit(points: &[(usize, Estimate)]) -> Result<f64, AsymptoticsError> {
    let pts = usable(points);
    if pts.len() < MIN_FIT_POINTS {
        return Err(AsymptoticsError::InsufficientPoints { got: pts.len() });
    }
    if let Some(p) = pts.iter().find(|p| p.1.mean <= 0.0) {
        return Err(AsymptoticsError::NonpositiveValue { n: p.0 });
    }
    let lo = pts.iter().map(|p| p.0).min().unwrap_or(1) as f64;
    let hi = pts.iter().map(|p| p.0).max().unwrap_or(1) as f64;
    let decades = (hi / lo).log10();
    if decades < MIN_EXPONENT_DECADES {
        return Err(AsymptoticsError::NarrowRange { decades });
    }
    let x: Vec<f64> = pts.iter().map(|p| (p.0 as f64).ln()).collect();
    let y: Vec<f64> = pts.iter().map(|p| p.1.mean.ln()).collect();
    let se: Vec<f64> = pts.iter().map(|p| p.1.stderr / p.1.mean).collect();
    Ok(weighted_line(&x, &y, &weights(&se)).0)
}

/// Leading constants of the width, vertex and facet laws for a simplicial
/// polytope with `r` facets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredictedConstants {
    pub facets_of_body: usize,
    /// `2rd/(d+1)^{d-1}`.
    pub width: f64,
    /// `r·d^d/d!·M_1(Δ_{d-1})`.
    pub vertices: f64,
    /// `rd/(d+1)^{d-1}`.
    pub facets: f64,
}

pub fn predicted_constants(p: &Polytope, m1: f64) -> Result<PredictedConstants, AsymptoticsError> {
    let d = p.dim();
    if let Some((facet, f)) = p.facets().iter().enumerate().find(|(_, f)| f.vertices.len() != d) {
        return Err(AsymptoticsError::NotSimplicial {
            facet,
            vertices: f.vertices.len(),
        });
    }
    let r = p.facets().len() as f64;
    let df = d as f64;
    let facets = r * df / (df + 1.0).powi(d as i32 - 1);
    Ok(PredictedConstants {
        facets_of_body: p.facets().len(),
        width: 2.0 * facets,
        vertices: r * df.powi(d as i32) / linalg::factorial(d) * m1,
        facets,
    })
}

/// A fitted constant against its prediction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantCheck {
    pub fitted: f64,
    pub predicted: f64,
    pub ratio: f64,
    pub band: f64,
    pub pass: bool,
}

pub fn compare_constant(fitted: f64, predicted: f64, band: f64) -> ConstantCheck {
    let ratio = fitted / predicted;
    ConstantCheck {
        fitted,
        predicted,
        ratio,
        band,
        pass: (ratio - 1.0).abs() <= band,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BallMaxEntry {
    pub label: String,
    pub is_ball: bool,
    /// `E_1 W(K^(n)) / W(K)`.
    pub ratio: Estimate,
}

#[derive(Debug, Clone, Serialize)]
pub struct BallMaxComparison {
    pub label: String,
    /// Reference ball's ratio minus this body's.
    pub difference: f64,
    pub combined_stderr: f64,
    /// Ball ≥ body − 3σ.
    pub not_exceeded: bool,
    /// Ball > body + 3σ.
    pub strictly_larger: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BallMaxReport {
    pub n: usize,
    pub trials: u64,
    pub entries: Vec<BallMaxEntry>,
    /// Label of the first ball, the reference of every comparison.
    pub reference: Option<String>,
    pub comparisons: Vec<BallMaxComparison>,
    /// `None` when there is nothing to compare.
    pub pass: Option<bool>,
}

/// Estimates `E_1 W(K^(n))/W(K)` per body and compares the first ball in the
/// list with every other body.
pub fn ball_max_test(
    bodies: &[(String, Body)],
    n: usize,
    trials: u64,
    seed: u64,
    threads: Option<usize>,
) -> Result<BallMaxReport, AsymptoticsError> {
    if let Some((_, first)) = bodies.first() {
        if bodies.iter().any(|(_, b)| b.dim() != first.dim()) {
            return Err(AsymptoticsError::MixedDimensions);
        }
    }
    let mut entries = Vec::with_capacity(bodies.len());
    for (label, body) in bodies {
        entries.push(BallMaxEntry {
            label: label.clone(),
            is_ball: body.is_ball(),
            ratio: estimate_width_ratio(body, n, trials, seed, threads)?,
        });
    }
    let reference = entries.iter().position(|e| e.is_ball);
    let comparisons: Vec<BallMaxComparison> = match reference {
        Some(r) => entries
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != r)
            .map(|(_, e)| {
                let difference = entries[r].ratio.mean - e.ratio.mean;
                let se = entries[r].ratio.stderr.hypot(e.ratio.stderr);
                BallMaxComparison {
                    label: e.label.clone(),
                    difference,
                    combined_stderr: se,
                    not_exceeded: difference >= -SIGMA_MULTIPLIER * se,
                    strictly_larger: difference > SIGMA_MULTIPLIER * se,
                }
            })
            .collect(),
        None => Vec::new(),
    };
    let pass = (!comparisons.is_empty()).then(|| comparisons.iter().all(|c| c.not_exceeded));
    Ok(BallMaxReport {
        n,
        trials,
        reference: reference.map(|r| entries[r].label.clone()),
        entries,
        comparisons,
        pass,
    })
}
