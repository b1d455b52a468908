//! On-board building blocks for teams of small aerial vehicles that localize
//! each other over their communication link and steer around each other.
//!
//! Each vehicle periodically broadcasts its own velocity, heading, and height.
//! A receiver measures the signal strength of every broadcast, converts it to
//! a range through a log-distance model ([`channel`]), and fuses range and
//! communicated states in an extended Kalman filter ([`estimator`]) to recover
//! the full relative position of the sender. The resulting estimates feed a
//! reactive avoidance layer built on collision cones ([`avoidance`]).
//!
//! The crate is `no_std`-compatible (with `alloc`) so the same code paths can
//! run on flight hardware; disable the default `std` feature for embedded
//! targets. Simulation, experiment orchestration, and file output live in the
//! companion `airprox-sim` crate.

#![cfg_attr(not(feature = "std"), no_std)]
// Validation deliberately writes `!(x > 0.0)` so that NaN fails the check;
// the suggested `x <= 0.0` would wave NaN through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod avoidance;
pub mod channel;
pub mod estimator;
pub mod geometry;
