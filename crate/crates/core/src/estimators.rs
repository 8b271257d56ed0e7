//! Monte Carlo estimation over independent trials.
//!
//! Trial `i` at sample size `n` owns the streams
//! `RngStream::for_trial(seed, n, i, lane)`: lane 0 carries the hyperplanes
//! (equivalently the dual points), lane 1 fresh `μ_K^*` points for
//! complement masses, lane 2 the simplex integrations. Trials run on a rayon
//! pool, are collected in trial order and reduced sequentially, so no result
//! depends on the thread count.

use std::ops::Range;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bodies::{polar_polytope, Body, BodyError};
use crate::geometry::{linalg, mean_width_estimate, volume, ToleranceConfig};
use crate::models::{
    build_dual, build_dual_from_points, build_primal, draw_dual_points, mu_star_complement,
    t_q_star, ModelError, DEFAULT_COMPLEMENT_SAMPLES, DEFAULT_SIMPLEX_BUDGET,
};
use crate::sampling::{sample_simplex_weights, RngStream};

/// A Monte Carlo mean with its standard error.
///
/// `count` is the number of accepted samples behind the mean and `rejected`
/// the number of trials discarded by the conditioning event.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub mean: f64,
    pub stderr: f64,
    pub count: u64,
    pub rejected: u64,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self {
            mean: value,
            stderr: 0.0,
            count: 1,
            rejected: 0,
        }
    }

    /// `|self − other| / sqrt(se_1² + se_2²)`, treating the two as independent.
    pub fn z_against(&self, other: &Estimate) -> f64 {
        let se = self.stderr.hypot(other.stderr);
        let diff = (self.mean - other.mean).abs();
        if se > 0.0 {
            diff / se
        } else if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            mean: self.mean * factor,
            stderr: self.stderr * factor.abs(),
            ..*self
        }
    }
}

/// Streaming mean and variance (Welford), mergeable in a fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Accumulator {
    n: u64,
    mean: f64,
    m2: f64,
    rejected: u64,
}

impl Accumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn reject(&mut self) {
        self.rejected += 1;
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    /// Chan's pairwise update. Merging `a` then `b` is not bitwise equal to
    /// merging `b` then `a`, so callers merge in trial order.
    pub fn merge(&mut self, other: &Accumulator) {
        if other.n == 0 {
            self.rejected += other.rejected;
            return;
        }
        if self.n == 0 {
            let rejected = self.rejected + other.rejected;
            *self = *other;
            self.rejected = rejected;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        self.mean += delta * other.n as f64 / n as f64;
        self.m2 += other.m2 + delta * delta * self.n as f64 * other.n as f64 / n as f64;
        self.n = n;
        self.rejected += other.rejected;
    }

    pub fn variance(&self) -> f64 {
        if self.n > 1 {
            self.m2 / (self.n - 1) as f64
        } else {
            f64::NAN
        }
    }

    /// Mean with stderr `s/√n`. With no accepted samples the mean is NaN.
    pub fn finish(&self) -> Estimate {
        let (mean, stderr) = match self.n {
            0 => (f64::NAN, f64::NAN),
            1 => (self.mean, f64::INFINITY),
            n => (self.mean, (self.variance() / n as f64).sqrt()),
        };
        Estimate {
            mean,
            stderr,
            count: self.n,
            rejected: self.rejected,
        }
    }
}

/// Stream lane for hyperplanes, or equivalently dual points.
pub const LANE_DRAWS: u64 = 0;
/// Stream lane for fresh `μ_K^*` points used by complement masses.
pub const LANE_COMPLEMENT: u64 = 1;
/// Stream lane for uniform points in the simplices `S_F`.
pub const LANE_INTEGRATION: u64 = 2;

/// Every statistical verdict allows this many standard errors.
pub const SIGMA_MULTIPLIER: f64 = 3.0;

#[derive(Debug, Error)]
pub enum EstimatorError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("every trial at n = {n} was rejected")]
    AllTrialsRejected { n: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Body(#[from] BodyError),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

impl Estimate {
    /// Total trials behind the estimate, accepted or not.
    pub fn trials(&self) -> u64 {
        self.count + self.rejected
    }

    /// Fails with `AllTrialsRejected` when nothing was accepted.
    pub fn require(self, n: usize) -> Result<Self, EstimatorError> {
        if self.count == 0 {
            Err(EstimatorError::AllTrialsRejected { n })
        } else {
            Ok(self)
        }
    }
}

/// Which primal functionals a sweep evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Selection {
    pub width: bool,
    pub volume: bool,
    pub faces: bool,
}

impl Default for Selection {
    fn default() -> Self {
        Self {
            width: true,
            volume: true,
            faces: true,
        }
    }
}

impl Selection {
    pub const WIDTH: Self = Self {
        width: true,
        volume: false,
        faces: false,
    };
    pub const VOLUME: Self = Self {
        width: false,
        volume: true,
        faces: false,
    };
    pub const FACES: Self = Self {
        width: false,
        volume: false,
        faces: true,
    };
}

/// One experiment: a body, an n-grid, a trial count per n and a seed.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub body: Body,
    pub ns: Vec<usize>,
    pub trials: u64,
    pub seed: u64,
    /// Uniform points per simplex `S_F`.
    pub simplex_budget: usize,
    /// Fresh `μ_K^*` points per trial for complement masses.
    pub complement_samples: usize,
    pub selection: Selection,
    /// Worker threads; `None` uses rayon's global pool.
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn new(body: Body, ns: Vec<usize>, trials: u64, seed: u64) -> Self {
        Self {
            body,
            ns,
            trials,
            seed,
            simplex_budget: DEFAULT_SIMPLEX_BUDGET,
            complement_samples: DEFAULT_COMPLEMENT_SAMPLES,
            selection: Selection::default(),
            threads: None,
        }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = Some(threads);
        self
    }

    pub fn with_selection(mut self, selection: Selection) -> Self {
        self.selection = selection;
        self
    }

    pub fn dim(&self) -> usize {
        self.body.dim()
    }

    pub fn validate(&self) -> Result<(), EstimatorError> {
        let bad = |m: String| Err(EstimatorError::InvalidConfig(m));
        let d = self.dim();
        if self.trials == 0 {
            return bad("trials must be at least 1".into());
        }
        if self.ns.is_empty() {
            return bad("the n-grid is empty".into());
        }
        if let Some(&n) = self.ns.iter().find(|&&n| n < d + 1) {
            return bad(format!("n = {n} is below d + 1 = {}", d + 1));
        }
        if self.simplex_budget == 0 || self.complement_samples == 0 {
            return bad("integration budgets must be positive".into());
        }
        if self.threads == Some(0) {
            return bad("thread count must be at least 1".into());
        }
        Ok(())
    }
}

/// Evaluates `f` on every trial index in `range` and returns the results in
/// index order, whatever the scheduling.
pub fn map_trials<T, F>(range: Range<u64>, threads: Option<usize>, f: F) -> Result<Vec<T>, EstimatorError>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    let run = || range.clone().into_par_iter().map(&f).collect::<Vec<T>>();
    match threads {
        None => Ok(run()),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| EstimatorError::ThreadPool(e.to_string()))?;
            Ok(pool.install(run))
        }
    }
}

fn collect<I>(values: I) -> Estimate
where
    I: IntoIterator<Item = Option<f64>>,
{
    let mut acc = Accumulator::new();
    for v in values {
        match v {
            Some(x) => acc.push(x),
            None => acc.reject(),
        }
    }
    acc.finish()
}

fn first_error<T>(results: Vec<Result<T, EstimatorError>>) -> Result<Vec<T>, EstimatorError> {
    results.into_iter().collect()
}

/// Functionals of one accepted primal trial. Unselected entries are NaN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PrimalSample {
    pub width: f64,
    pub volume: f64,
    pub vertices: f64,
    pub facets: f64,
}

/// Builds trial `trial` of `K^(n)` and evaluates the selected functionals.
pub fn primal_sample(body: &Body, n: usize, seed: u64, trial: u64, sel: Selection) -> Option<PrimalSample> {
    let mut rng = RngStream::for_trial(seed, n, trial, LANE_DRAWS);
    let outcome = build_primal(body, n, &mut rng);
    let t = outcome.accepted()?;
    let nan = f64::NAN;
    Some(PrimalSample {
        width: if sel.width { mean_width_estimate(&t.polytope).0 } else { nan },
        volume: if sel.volume { volume(&t.polytope) } else { nan },
        vertices: if sel.faces { t.proper_vertices.len() as f64 } else { nan },
        facets: if sel.faces { t.proper_facets.len() as f64 } else { nan },
    })
}

/// Per-n estimates of the primal functionals under `E_1`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SweepRow {
    pub n: usize,
    /// `E_1 W(K^(n)) − W(K)`.
    pub width_gap: Estimate,
    /// `E_1 V(K^(n)) − V(K)`.
    pub volume_gap: Estimate,
    /// Proper vertices `f_0`.
    pub vertices: Estimate,
    /// Proper facets `f_{d-1}`.
    pub facets: Estimate,
}

/// Runs the primal model over the n-grid.
pub fn primal_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>, EstimatorError> {
    cfg.validate()?;
    let (w_ref, w_ref_se) = cfg.body.mean_width();
    let v_ref = cfg.body.volume();
    let sel = cfg.selection;
    let mut rows = Vec::with_capacity(cfg.ns.len());
    for &n in &cfg.ns {
        let samples = map_trials(0..cfg.trials, cfg.threads, |i| {
            primal_sample(&cfg.body, n, cfg.seed, i, sel)
        })?;
        let field = |g: fn(&PrimalSample) -> f64| collect(samples.iter().map(|s| s.as_ref().map(g)));
        let mut width_gap = field(|s| s.width);
        width_gap.mean -= w_ref;
        width_gap.stderr = width_gap.stderr.hypot(w_ref_se);
        let mut volume_gap = field(|s| s.volume);
        volume_gap.mean -= v_ref;
        rows.push(SweepRow {
            n,
            width_gap,
            volume_gap,
            vertices: field(|s| s.vertices),
            facets: field(|s| s.facets),
        });
    }
    Ok(rows)
}

/// `E_1 W(K^(n)) − W(K)` per n. `W(K)` is exact for `d ≤ 3`; otherwise its
/// quadrature error is added in quadrature to the stderr.
pub fn estimate_width_gap(cfg: &ExperimentConfig) -> Result<Vec<(usize, Estimate)>, EstimatorError> {
    let cfg = cfg.clone().with_selection(Selection::WIDTH);
    Ok(primal_sweep(&cfg)?.into_iter().map(|r| (r.n, r.width_gap)).collect())
}

/// `E_1 V(K^(n)) − V(K)` per n.
pub fn estimate_volume_gap(cfg: &ExperimentConfig) -> Result<Vec<(usize, Estimate)>, EstimatorError> {
    let cfg = cfg.clone().with_selection(Selection::VOLUME);
    Ok(primal_sweep(&cfg)?.into_iter().map(|r| (r.n, r.volume_gap)).collect())
}

/// `(n, E_1 f_0, E_1 f_{d-1})` per n, counting proper faces.
pub fn estimate_face_counts(
    cfg: &ExperimentConfig,
) -> Result<Vec<(usize, Estimate, Estimate)>, EstimatorError> {
    let cfg = cfg.clone().with_selection(Selection::FACES);
    Ok(primal_sweep(&cfg)?
        .into_iter()
        .map(|r| (r.n, r.vertices, r.facets))
        .collect())
}

/// `E_1 W(K^(n)) / W(K)` at a single n.
pub fn estimate_width_ratio(
    body: &Body,
    n: usize,
    trials: u64,
    seed: u64,
    threads: Option<usize>,
) -> Result<Estimate, EstimatorError> {
    let cfg = ExperimentConfig {
        threads,
        ..ExperimentConfig::new(body.clone(), vec![n], trials, seed)
    };
    cfg.validate()?;
    let (w_ref, w_ref_se) = body.mean_width();
    let samples = map_trials(0..trials, threads, |i| {
        primal_sample(body, n, seed, i, Selection::WIDTH).map(|s| s.width / w_ref)
    })?;
    let mut e = collect(samples);
    e.stderr = e.stderr.hypot(e.mean * w_ref_se / w_ref);
    Ok(e)
}

/// Per-n average of `T_q^*` over accepted dual trials, with the proper facet
/// count of the same trials.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TqRow {
    pub n: usize,
    pub q: u32,
    pub t_q: Estimate,
    pub facets: Estimate,
}

/// `E_1 T_q^*(K_n^*)` per n. The body must be a polytope. Integration noise
/// of each trial is part of the between-trial variance, so the stderr
/// already accounts for it.
pub fn estimate_t_q(cfg: &ExperimentConfig, q: u32) -> Result<Vec<TqRow>, EstimatorError> {
    cfg.validate()?;
    if cfg.body.polar_ref().is_none() {
        return Err(ModelError::NotPolytopal.into());
    }
    let mut rows = Vec::with_capacity(cfg.ns.len());
    for &n in &cfg.ns {
        let results = map_trials(0..cfg.trials, cfg.threads, |i| {
            let mut draws = RngStream::for_trial(cfg.seed, n, i, LANE_DRAWS);
            let outcome = build_dual(&cfg.body, n, &mut draws);
            let Some(t) = outcome.accepted() else {
                return Ok(None);
            };
            let mut rng = RngStream::for_trial(cfg.seed, n, i, LANE_INTEGRATION);
            let tq = t_q_star(t, &cfg.body, q, cfg.simplex_budget, &mut rng)?;
            Ok(Some((tq.mean, t.proper_facets.len() as f64)))
        });
        let samples = first_error(results?)?;
        rows.push(TqRow {
            n,
            q,
            t_q: collect(samples.iter().map(|s| s.map(|x| x.0))),
            facets: collect(samples.iter().map(|s| s.map(|x| x.1))),
        });
    }
    Ok(rows)
}

/// A `(d−1)`-dimensional convex body in which the simplex-volume moment is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Section {
    /// The standard simplex `conv{0, e_1, …, e_{d-1}}`.
    Simplex,
    /// The unit cube `[0,1]^{d-1}`.
    Cube,
    /// The unit ball of `R^{d-1}`.
    Ball,
}

impl Section {
    fn volume(self, k: usize) -> f64 {
        match self {
            Section::Simplex => 1.0 / linalg::factorial(k),
            Section::Cube => 1.0,
            Section::Ball => linalg::ball_volume(k),
        }
    }

    fn sample(self, rng: &mut RngStream, w: &mut [f64], out: &mut [f64]) {
        match self {
            Section::Simplex => {
                sample_simplex_weights(rng, w);
                out.copy_from_slice(&w[1..]);
            }
            Section::Cube => out.iter_mut().for_each(|x| *x = rng.uniform()),
            Section::Ball => loop {
                out.iter_mut().for_each(|x| *x = 2.0 * rng.uniform() - 1.0);
                if out.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
                    break;
                }
            },
        }
    }
}

/// `M_q(Δ_{d-1})`: the mean of `(λ(conv{x_1,…,x_d}) / λ(Δ))^q` for `d`
/// independent uniform points of a `(d−1)`-simplex `Δ`.
pub fn estimate_mq(d: usize, q: u32, samples: usize, rng: &mut RngStream) -> Estimate {
    estimate_mq_in(Section::Simplex, d, q, samples, rng)
}

/// `M_q(A)` for the section `A` of dimension `d − 1`.
pub fn estimate_mq_in(section: Section, d: usize, q: u32, samples: usize, rng: &mut RngStream) -> Estimate {
    assert!(d >= 2, "M_q needs d ≥ 2");
    let k = d - 1;
    let scale = linalg::factorial(k) * section.volume(k);
    let mut w = vec![0.0; d];
    let mut pts = vec![0.0; d * k];
    let mut m = vec![0.0; k * k];
    let mut acc = Accumulator::new();
    for _ in 0..samples {
        for p in pts.chunks_exact_mut(k) {
            section.sample(rng, &mut w, p);
        }
        for r in 0..k {
            for c in 0..k {
                m[r * k + c] = pts[(r + 1) * k + c] - pts[c];
            }
        }
        let ratio = linalg::det_in_place(&mut m, k).abs() / scale;
        acc.push(ratio.powi(q as i32));
    }
    acc.finish()
}

/// Closed forms of `M_q(Δ_{d-1})` where known: `q = 1` for `d ≤ 4` and
/// `q = 2` for every `d`.
pub fn known_simplex_moment(d: usize, q: u32) -> Option<f64> {
    match (d, q) {
        (_, 0) => Some(1.0),
        (2, 1) => Some(1.0 / 3.0),
        (3, 1) => Some(1.0 / 12.0),
        (4, 1) => Some(13.0 / 720.0 - std::f64::consts::PI.powi(2) / 15015.0),
        (d, 2) if d >= 2 => {
            let d = d as f64;
            Some(linalg::factorial(d as usize - 1) / (d.powf(d - 1.0) * (d + 1.0).powf(d - 1.0)))
        }
        _ => None,
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExtremalityRow {
    pub section: Section,
    pub estimate: Estimate,
    pub bound: f64,
    pub pass: bool,
}

/// Checks `M_q(A) ≤ (d−1)^{(d−1)(d+q)} M_q(Δ_{d-1})` for the sections
/// available in dimension `d − 1`.
#[derive(Debug, Clone, Serialize)]
pub struct ExtremalityReport {
    pub d: usize,
    pub q: u32,
    pub simplex_moment: Estimate,
    pub factor: f64,
    pub rows: Vec<ExtremalityRow>,
    pub pass: bool,
}

pub fn check_simplex_extremality_bound(
    d: usize,
    q: u32,
    samples: usize,
    seed: u64,
) -> Result<ExtremalityReport, EstimatorError> {
    let sections: &[Section] = match d {
        2 => &[Section::Simplex],
        3 => &[Section::Simplex, Section::Cube, Section::Ball],
        _ => {
            return Err(EstimatorError::InvalidConfig(format!(
                "the extremality check covers d ∈ {{2, 3}}, got {d}"
            )))
        }
    };
    if samples == 0 {
        return Err(EstimatorError::InvalidConfig("samples must be positive".into()));
    }
    let simplex_moment = match known_simplex_moment(d, q) {
        Some(v) => Estimate::exact(v),
        None => estimate_mq(d, q, samples, &mut RngStream::new(seed, u64::MAX)),
    };
    let factor = ((d - 1) as f64).powi(((d - 1) * (d + q as usize)) as i32);
    let bound = factor * simplex_moment.mean;
    let rows: Vec<ExtremalityRow> = sections
        .iter()
        .enumerate()
        .map(|(i, &section)| {
            let estimate = estimate_mq_in(section, d, q, samples, &mut RngStream::new(seed, i as u64));
            let slack = SIGMA_MULTIPLIER * estimate.stderr.hypot(factor * simplex_moment.stderr);
            ExtremalityRow {
                section,
                estimate,
                bound,
                pass: estimate.mean <= bound + slack,
            }
        })
        .collect();
    let pass = rows.iter().all(|r| r.pass);
    Ok(ExtremalityReport {
        d,
        q,
        simplex_moment,
        factor,
        rows,
        pass,
    })
}

/// Primal width gap against twice the dual complement mass on shared draws.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Eq14Row {
    pub n: usize,
    /// `E_1 W(K^(n)) − W(K)`.
    pub width_gap: Estimate,
    /// `E_1 μ^*(K^* ∖ K_n^*)`.
    pub complement: Estimate,
    /// `width_gap − 2·complement`.
    pub difference: f64,
    /// Stderr of the difference treating the two means as independent.
    pub combined_stderr: f64,
    /// Stderr of the per-trial differences on trials both models accept.
    pub paired_stderr: f64,
    /// Trials accepted by exactly one of the two models.
    pub mismatched: u64,
    pub pass: bool,
}

/// Runs the primal and dual models on the same draws. The verdict uses the
/// combined stderr.
pub fn check_eq14(cfg: &ExperimentConfig) -> Result<Vec<Eq14Row>, EstimatorError> {
    cfg.validate()?;
    let (w_ref, w_ref_se) = cfg.body.mean_width();
    let mut rows = Vec::with_capacity(cfg.ns.len());
    for &n in &cfg.ns {
        let samples = map_trials(0..cfg.trials, cfg.threads, |i| {
            let mut draws = RngStream::for_trial(cfg.seed, n, i, LANE_DRAWS);
            let primal = build_primal(&cfg.body, n, &mut draws)
                .accepted()
                .map(|t| mean_width_estimate(&t.polytope).0 - w_ref);
            let mut draws = RngStream::for_trial(cfg.seed, n, i, LANE_DRAWS);
            let dual = build_dual(&cfg.body, n, &mut draws).accepted().map(|t| {
                let mut rng = RngStream::for_trial(cfg.seed, n, i, LANE_COMPLEMENT);
                mu_star_complement(&t.polytope, &cfg.body, cfg.complement_samples, &mut rng).mean
            });
            (primal, dual)
        })?;
        let mut width_gap = collect(samples.iter().map(|s| s.0));
        width_gap.stderr = width_gap.stderr.hypot(w_ref_se);
        let complement = collect(samples.iter().map(|s| s.1));
        let paired = collect(samples.iter().filter_map(|s| match s {
            (Some(a), Some(b)) => Some(Some(a - 2.0 * b)),
            (None, None) => None,
            _ => Some(None),
        }));
        let mismatched = samples.iter().filter(|s| s.0.is_some() != s.1.is_some()).count() as u64;
        let difference = width_gap.mean - 2.0 * complement.mean;
        let combined_stderr = width_gap.stderr.hypot(2.0 * complement.stderr);
        rows.push(Eq14Row {
            n,
            width_gap,
            complement,
            difference,
            combined_stderr,
            paired_stderr: paired.stderr,
            mismatched,
            pass: difference.abs() <= SIGMA_MULTIPLIER * combined_stderr,
        });
    }
    Ok(rows)
}

/// Facet count of `K^(n)` against `n` times the complement mass of the dual
/// hull of the first `n − 1` points, each under its own acceptance event.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EfronRow {
    pub n: usize,
    /// `E_1 f_{d-1}(K^(n))`, conditioned on acceptance at `n`.
    pub facets: Estimate,
    /// `n · E_1 μ^*(K^* ∖ K_{n-1}^*)`, conditioned on acceptance at `n − 1`.
    pub scaled_complement: Estimate,
    pub difference: f64,
    pub combined_stderr: f64,
    /// Stderr of `f − n μ` over trials accepted at both sizes.
    pub paired_stderr: f64,
    pub pass: bool,
    /// Per-trial `f·a_n − n(μ·a_{n−1} + a_n − a_{n−1})` over all trials,
    /// where `a_k` indicates acceptance at size `k`. Its expectation is
    /// exactly zero whatever the acceptance probabilities.
    pub identity_residual: Estimate,
    pub identity_pass: bool,
}

pub fn check_efron(cfg: &ExperimentConfig) -> Result<Vec<EfronRow>, EstimatorError> {
    cfg.validate()?;
    if let Some(&n) = cfg.ns.iter().find(|&&n| n < cfg.dim() + 2) {
        return Err(EstimatorError::InvalidConfig(format!(
            "n = {n} leaves fewer than d + 1 points for the smaller hull"
        )));
    }
    let mut rows = Vec::with_capacity(cfg.ns.len());
    for &n in &cfg.ns {
        let samples = map_trials(0..cfg.trials, cfg.threads, |i| {
            let mut draws = RngStream::for_trial(cfg.seed, n, i, LANE_DRAWS);
            let f = build_primal(&cfg.body, n, &mut draws)
                .accepted()
                .map(|t| t.proper_facets.len() as f64);
            // The first n − 1 points are the first n − 1 draws.
            let mut draws = RngStream::for_trial(cfg.seed, n, i, LANE_DRAWS);
            let points = draw_dual_points(&cfg.body, n - 1, &mut draws);
            let mu = build_dual_from_points(&cfg.body, &points).accepted().map(|t| {
                let mut rng = RngStream::for_trial(cfg.seed, n, i, LANE_COMPLEMENT);
                mu_star_complement(&t.polytope, &cfg.body, cfg.complement_samples, &mut rng).mean
            });
            (f, mu)
        })?;
        let nf = n as f64;
        let facets = collect(samples.iter().map(|s| s.0));
        let scaled_complement = collect(samples.iter().map(|s| s.1)).scaled(nf);
        let paired = collect(samples.iter().filter_map(|s| match s {
            (Some(f), Some(mu)) => Some(Some(f - nf * mu)),
            (None, None) => None,
            _ => Some(None),
        }));
        let identity_residual = collect(samples.iter().map(|&(f, mu)| {
            let a_n = f.is_some() as u8 as f64;
            let a_prev = mu.is_some() as u8 as f64;
            Some(f.unwrap_or(0.0) - nf * (mu.unwrap_or(0.0) + a_n - a_prev))
        }));
        let difference = facets.mean - scaled_complement.mean;
        let combined_stderr = facets.stderr.hypot(scaled_complement.stderr);
        rows.push(EfronRow {
            n,
            facets,
            scaled_complement,
            difference,
            combined_stderr,
            paired_stderr: paired.stderr,
            pass: difference.abs() <= SIGMA_MULTIPLIER * combined_stderr,
            identity_residual,
            identity_pass: identity_residual.mean.abs() <= SIGMA_MULTIPLIER * identity_residual.stderr,
        });
    }
    Ok(rows)
}

/// Per-realization comparison of `T_1^*` with `μ^*(K^* ∖ K_n^*)`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct T1BoundReport {
    pub n: usize,
    pub trials_run: u64,
    pub accepted: u64,
    /// Accepted trials with `T_1^* ≤ μ^* + 3·(integration stderr)`.
    pub satisfied: u64,
    pub t1: Estimate,
    pub complement: Estimate,
    /// Smallest `μ^* − T_1^*` seen, in units of the trial's integration stderr.
    pub worst_margin: f64,
    /// `E T_1^* ≤ E μ^*` within 3 paired stderr.
    pub mean_pass: bool,
    pub pass: bool,
}

/// Runs dual trials at `cfg.ns[0]` until `cfg.trials` of them are accepted.
///
/// The complement mass of each realization is exact: with `P` the polar of
/// the dual hull, `2 μ^*(K^* ∖ P^*) = W(P) − W(K)`. Only `T_1^*` carries
/// integration error.
pub fn check_t1_bound(cfg: &ExperimentConfig) -> Result<T1BoundReport, EstimatorError> {
    cfg.validate()?;
    if cfg.body.polar_ref().is_none() {
        return Err(ModelError::NotPolytopal.into());
    }
    let n = cfg.ns[0];
    let (w_ref, w_ref_se) = cfg.body.mean_width();
    let tol = ToleranceConfig::default();
    let target = cfg.trials;
    let trial = |i: u64| -> Result<Option<(Estimate, Estimate)>, EstimatorError> {
        let mut draws = RngStream::for_trial(cfg.seed, n, i, LANE_DRAWS);
        let outcome = build_dual(&cfg.body, n, &mut draws);
        let Some(t) = outcome.accepted() else {
            return Ok(None);
        };
        let mut rng = RngStream::for_trial(cfg.seed, n, i, LANE_INTEGRATION);
        let t1 = t_q_star(t, &cfg.body, 1, cfg.simplex_budget, &mut rng)?;
        let primal = polar_polytope(&t.polytope, &tol)?;
        let (w, w_se) = mean_width_estimate(&primal);
        let complement = Estimate {
            mean: (w - w_ref) / 2.0,
            stderr: w_se.hypot(w_ref_se) / 2.0,
            count: 1,
            rejected: 0,
        };
        Ok(Some((t1, complement)))
    };

    let mut accepted: Vec<(Estimate, Estimate)> = Vec::new();
    let mut run = 0u64;
    while (accepted.len() as u64) < target {
        if run >= target.saturating_mul(100) {
            return Err(EstimatorError::AllTrialsRejected { n });
        }
        let batch = target - accepted.len() as u64;
        let results = first_error(map_trials(run..run + batch, cfg.threads, trial)?)?;
        for (k, r) in results.into_iter().enumerate() {
            if let Some(pair) = r {
                accepted.push(pair);
                if accepted.len() as u64 == target {
                    run += k as u64 + 1;
                    break;
                }
            }
            if k as u64 + 1 == batch {
                run += batch;
            }
        }
    }

    let mut satisfied = 0;
    let mut worst_margin = f64::INFINITY;
    for (t1, mu) in &accepted {
        let se = t1.stderr.hypot(mu.stderr);
        if t1.mean <= mu.mean + SIGMA_MULTIPLIER * se {
            satisfied += 1;
        }
        let margin = if se > 0.0 { (mu.mean - t1.mean) / se } else { f64::INFINITY };
        worst_margin = worst_margin.min(margin);
    }
    let rejected = run - accepted.len() as u64;
    let with_rejected = |mut e: Estimate| {
        e.rejected = rejected;
        e
    };
    let t1 = with_rejected(collect(accepted.iter().map(|p| Some(p.0.mean))));
    let complement = with_rejected(collect(accepted.iter().map(|p| Some(p.1.mean))));
    let diff = collect(accepted.iter().map(|p| Some(p.0.mean - p.1.mean)));
    let mean_pass = diff.mean <= SIGMA_MULTIPLIER * diff.stderr;
    Ok(T1BoundReport {
        n,
        trials_run: run,
        accepted: accepted.len() as u64,
        satisfied,
        t1,
        complement,
        worst_margin,
        mean_pass,
        pass: satisfied == accepted.len() as u64,
    })
}
