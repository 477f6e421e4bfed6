//! Numerical laboratory for continuous quantum heat pumps probed by a
//! tunable two-level spin.
//!
//! The crate builds Lindblad generators for a three-level maser and a
//! four-level irreversible chiller (optionally coupled to a probe spin),
//! solves their non-equilibrium steady states, evaluates heat currents and
//! spin temperatures, and runs the probe-frequency scan that recovers the
//! device's open decay channels.
//!
//! Units: ħ = k_B = 1. Heat currents are reported in the units implied by
//! the bath dissipation scale γ.

pub mod lindblad;
pub mod mathcore;
pub mod models;
pub mod ness;
pub mod scanner;
pub mod thermo;
