//! Random polytopes circumscribed about a convex body `K`.
//!
//! Random halfspaces are drawn from the measure `μ_K` on hyperplanes meeting
//! the parallel body `K_1 = K + B^d` but not the interior of `K`. Their
//! intersection is the random polytope `K^(n)`; its polar is the convex hull
//! of `n` points drawn from the pushforward `μ_K^*`. The crate estimates the
//! mean width, volume and face-count gaps of these polytopes and compares
//! them with their asymptotic laws.

pub mod asymptotics;
pub mod bodies;
pub mod cli;
pub mod estimators;
pub mod geometry;
pub mod models;
pub mod sampling;
