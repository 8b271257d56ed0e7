//! Seeded random streams and the two model measures.
//!
//! Every trial owns an [`RngStream`] addressed by `(seed, stream_index)`.
//! The generator is ChaCha8 with the 64-bit stream id selecting one of 2^64
//! independent keystreams, so a stream is reproducible on any platform and
//! can be created on any thread without coordination.
//!
//! `μ_K` is sampled through its direction/offset representation: a uniform
//! direction `u` and an offset `t ~ U[0, 1)` give the hyperplane
//! `H(u, h(K, u) + t)`. The dual measure `μ_K^*` is its exact pushforward
//! under `H(u, c) ↦ u / c`.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::bodies::{phi_inv, Body};
use crate::geometry::{Hyperplane, Point};

/// Name echoed into output headers.
pub const GENERATOR_NAME: &str = "ChaCha8Rng(rand_chacha 0.9; seed_from_u64, set_stream)";

/// Lanes multiplexed onto one trial's stream index.
pub const LANES_PER_TRIAL: u64 = 8;

/// A deterministic, index-addressable random stream.
#[derive(Debug, Clone)]
pub struct RngStream {
    seed: u64,
    stream_index: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream_index: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_index);
        Self {
            seed,
            stream_index,
            rng,
        }
    }

    /// The stream of lane `lane` for trial `trial` at sample size `n`. Keyed by
    /// `n` itself, so a trial's draws do not depend on the rest of an n-grid.
    pub fn for_trial(seed: u64, n: usize, trial: u64, lane: u64) -> Self {
        assert!(lane < LANES_PER_TRIAL);
        assert!(trial < 1 << 28, "trial index out of addressable range");
        assert!((n as u64) < 1 << 33, "n out of addressable range");
        Self::new(seed, ((n as u64) << 31) | (trial * LANES_PER_TRIAL + lane))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_index(&self) -> u64 {
        self.stream_index
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn standard_normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

/// Fills `out` with a uniform point of the unit sphere (normalized Gaussian).
pub fn sample_direction_into(rng: &mut RngStream, out: &mut [f64]) {
    loop {
        let mut sq = 0.0;
        for x in out.iter_mut() {
            *x = rng.standard_normal();
            sq += *x * *x;
        }
        if sq > 1e-300 {
            let inv = 1.0 / sq.sqrt();
            out.iter_mut().for_each(|x| *x *= inv);
            return;
        }
    }
}

/// Uniform direction on `S^{d-1}`.
pub fn sample_direction(rng: &mut RngStream, d: usize) -> Vec<f64> {
    assert!(d >= 2, "dimension must be at least 2");
    let mut u = vec![0.0; d];
    sample_direction_into(rng, &mut u);
    u
}

/// Draws `(u, t)` and writes `u` into `normal`; returns the offset
/// `h(K, u) + t`. The allocation-free core of [`sample_mu_k`].
#[inline]
pub fn sample_mu_k_into(rng: &mut RngStream, body: &Body, normal: &mut [f64]) -> f64 {
    sample_direction_into(rng, normal);
    let t = rng.uniform();
    body.support(normal) + t
}

/// A hyperplane distributed according to `μ_K`.
pub fn sample_mu_k(rng: &mut RngStream, body: &Body) -> Hyperplane {
    let mut u = vec![0.0; body.dim()];
    let c = sample_mu_k_into(rng, body, &mut u);
    Hyperplane::new_unchecked(u, c)
}

/// A point distributed according to `μ_K^*` on `X_K`.
pub fn sample_mu_k_star(rng: &mut RngStream, body: &Body) -> Point {
    let h = sample_mu_k(rng, body);
    phi_inv(&h).expect("offsets of μ_K hyperplanes are positive when o ∈ int K")
}

/// Allocation-free form of [`sample_mu_k_star`].
#[inline]
pub fn sample_mu_k_star_into(rng: &mut RngStream, body: &Body, out: &mut [f64]) {
    let c = sample_mu_k_into(rng, body, out);
    let inv = 1.0 / c;
    out.iter_mut().for_each(|x| *x *= inv);
}

/// Fills `w` with barycentric weights of a uniform point in a simplex with
/// `w.len()` vertices: the spacings of `w.len() − 1` sorted uniforms.
pub fn sample_simplex_weights(rng: &mut RngStream, w: &mut [f64]) {
    let k = w.len();
    assert!(k >= 1);
    for x in w[..k - 1].iter_mut() {
        *x = rng.uniform();
    }
    w[..k - 1].sort_unstable_by(f64::total_cmp);
    let mut prev = 0.0;
    for x in w[..k - 1].iter_mut() {
        let cur = *x;
        *x = cur - prev;
        prev = cur;
    }
    w[k - 1] = 1.0 - prev;
}
