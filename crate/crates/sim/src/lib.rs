//! Desk-scale simulation suite for communication-based relative localization
//! with collision-cone avoidance.
//!
//! This crate drives the algorithm kernels from `airprox-core` through a
//! deterministic closed-loop world ([`world`], [`trial`]), a Monte Carlo
//! campaign over a twelve-configuration grid ([`config`], [`sweep`]), a
//! channel ablation study ([`ablation`]), and a circular-flight filter
//! validation scenario ([`scenario`]). The `airprox` binary exposes the
//! whole thing on the command line.

// Validation deliberately writes `!(x > 0.0)` so that NaN fails the check;
// the suggested `x <= 0.0` would wave NaN through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ablation;
pub mod config;
pub mod coverage;
pub mod output;
pub mod report;
pub mod scenario;
pub mod stats;
pub mod sweep;
pub mod trial;
pub mod world;
