//! Quantum Otto cycles powered by out-of-thermal-equilibrium electromagnetic
//! fields near a dielectric slab.
//!
//! The crate models a two-level working fluid whose effective bath is the
//! stationary field sustained by a heated slab and a colder blackbody
//! environment. It computes field correlators and frequency-local effective
//! temperatures (`em_env`), steady states of small emitter networks under a
//! local + non-local Lindblad master equation (`lindblad`), and the
//! work/heat/efficiency bookkeeping of ideal and finite-time Otto cycles
//! (`cycle`). The `ote-otto` binary exposes the whole pipeline.

pub mod cli;
pub mod constants;
pub mod cycle;
pub mod em_env;
pub mod error;
pub mod lindblad;
pub mod linalg;
pub mod ode;
pub mod quad;

pub use error::{Error, Result};
