//! Closed-form polyharmonic RBF discriminators for GAN training.
//!
//! The crate provides two discriminators that need no inner optimization
//! loop — a least-squares spline interpolant fitted by a saddle-point solve,
//! and a fixed-weight kernel-sum critic — together with small trainable
//! generators, Wasserstein-2 / MMD convergence metrics, and an experiment
//! harness that reproduces the synthetic Gaussian and Gaussian-mixture
//! benchmarks with CSV logging.

pub mod discriminators;
pub mod generator;
pub mod harness;
pub mod metrics;
pub mod numerics;
pub mod polyharmonic;
