//! Assembly of the working-fluid + auxiliary machine from the field
//! environment, and its steady state.
//!
//! The working fluid (two levels, gap omega_a) sits at the origin; the
//! auxiliary three-level emitter sits an in-plane `separation` away at the
//! same height. Both couple locally to the field at their transition
//! frequencies; the two resonant omega_a transitions additionally share
//! correlated noise (a non-local dissipator) and a coherent dipole-dipole
//! coupling Lambda.
//!
//! Steady states are computed in the frame rotating with the free
//! Hamiltonian, where the generator is time-independent and -- crucially --
//! free of the ~1e14 rad/s coherent scales that would otherwise drown the
//! ~1/s dissipative scales in a direct kernel computation. All operators
//! entering the dissipators are eigenoperators of the free Hamiltonian, so
//! the rotating generator preserves Bohr-frequency sectors; the steady state
//! lives in the zero-frequency sector (populations plus the degenerate
//! |e,1> / |g,2> coherence) and is extracted from that 8-dimensional block,
//! which keeps every other matrix element an exact zero. The result is
//! verified against the full lab-frame generator.

use super::hamiltonian::{aux_lowering, composite_hamiltonian, lowering_q, AuxTransition};
use super::liouvillian::Liouvillian;
use super::thermometry::{emitter_temperature, partial_trace_aux};
use super::{DensityMatrix, LindbladTerm};
use crate::em_env::{
    dipole_coupling, effective_temperature, field_correlators, transition_rates,
    EffectiveTemperature, OteEnvironment, Position, TransitionRates,
};
use crate::error::{Error, Result};
use crate::linalg::kernel_basis;
use nalgebra::{DMatrix, Vector3};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Dipole orientation convention shared by every transition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DipoleOrientation {
    /// In the surface plane, perpendicular to the emitter separation axis.
    Parallel,
    /// Along the surface normal.
    Normal,
    /// Orientation-averaged rates (trace of the correlators / 3).
    Isotropic,
}

/// Parameters of the emitter pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmitterConfig {
    /// Working-fluid gap omega_a [rad/s]; also the auxiliary 1<->2 gap.
    pub omega_a: f64,
    /// Auxiliary 0<->2 gap [rad/s], usually the surface-resonance frequency.
    pub omega_upper: f64,
    /// Height of both emitters above the slab [m].
    pub z: f64,
    /// In-plane distance between the emitters [m].
    pub separation: f64,
    /// Common dipole-moment magnitude [C m].
    pub dipole_moment: f64,
    pub orientation: DipoleOrientation,
    /// Replace the computed coherent coupling [rad/s] (0 decouples).
    pub lambda_override: Option<f64>,
    /// Include the correlated-noise (non-local) dissipator between the two
    /// resonant omega_a transitions.
    pub collective_dissipation: bool,
}

impl EmitterConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega_a > 0.0 && self.omega_a.is_finite()) {
            return Err(Error::config("omega_a must be positive"));
        }
        if !(self.omega_upper > self.omega_a) || !self.omega_upper.is_finite() {
            return Err(Error::config("omega_upper must exceed omega_a"));
        }
        if !(self.z > 0.0) {
            return Err(Error::config("emitter height z must be positive"));
        }
        if !(self.separation > 0.0) {
            return Err(Error::config("emitter separation must be positive"));
        }
        if !(self.dipole_moment > 0.0) {
            return Err(Error::config("dipole moment must be positive"));
        }
        if let Some(l) = self.lambda_override {
            if !l.is_finite() {
                return Err(Error::config("lambda override must be finite"));
            }
        }
        Ok(())
    }

    fn pos_q(&self) -> Position {
        Position::new(0.0, 0.0, self.z)
    }

    fn pos_aux(&self) -> Position {
        Position::new(self.separation, 0.0, self.z)
    }
}

/// Orientation-resolved local/cross rates at one frequency.
fn oriented_rates(
    env: &OteEnvironment,
    omega: f64,
    pos_i: Position,
    pos_j: Position,
    dipole_moment: f64,
    orientation: DipoleOrientation,
) -> Result<TransitionRates> {
    match orientation {
        DipoleOrientation::Parallel => {
            let d = Vector3::new(0.0, dipole_moment, 0.0);
            transition_rates(env, omega, pos_i, pos_j, d, d)
        }
        DipoleOrientation::Normal => {
            let d = Vector3::new(0.0, 0.0, dipole_moment);
            transition_rates(env, omega, pos_i, pos_j, d, d)
        }
        DipoleOrientation::Isotropic => {
            let fc = field_correlators(env, omega, pos_i, pos_j)?;
            let w = dipole_moment * dipole_moment / 3.0;
            let gp: Complex64 = (0..3).map(|k| fc.c_plus[(k, k)]).sum();
            let gm: Complex64 = (0..3).map(|k| fc.c_minus[(k, k)]).sum();
            let lambda = if pos_i == pos_j {
                0.0
            } else {
                // orientation average <A> = 2/3, <B> = 0 of the coupling
                let sep = Vector3::new(
                    pos_i.r[0] - pos_j.r[0],
                    pos_i.r[1] - pos_j.r[1],
                    pos_i.z - pos_j.z,
                );
                let x = omega / crate::constants::C * sep.norm();
                let g = crate::constants::gamma0(omega) * dipole_moment * dipole_moment;
                0.75 * g * (-(2.0 / 3.0) * x.cos() / x)
            };
            Ok(TransitionRates {
                gamma_plus: gp * Complex64::new(w, 0.0),
                gamma_minus: gm * Complex64::new(w, 0.0),
                lambda,
            })
        }
    }
}

/// Local OTE `(gamma_plus, gamma_minus)` of a transition at `omega`,
/// height `z` [1/s].
pub fn local_rates(
    env: &OteEnvironment,
    omega: f64,
    z: f64,
    dipole_moment: f64,
    orientation: DipoleOrientation,
) -> Result<(f64, f64)> {
    let p = Position::new(0.0, 0.0, z);
    let r = oriented_rates(env, omega, p, p, dipole_moment, orientation)?;
    checked_local(&r, "local rates")
}

/// Effective field temperature seen by a transition at `omega`, height `z`.
pub fn t_env_at(
    env: &OteEnvironment,
    omega: f64,
    z: f64,
    dipole_moment: f64,
    orientation: DipoleOrientation,
) -> Result<EffectiveTemperature> {
    let (gp, gm) = local_rates(env, omega, z, dipole_moment, orientation)?;
    effective_temperature(gp, gm, omega)
}

fn checked_local(rates: &TransitionRates, label: &str) -> Result<(f64, f64)> {
    let gp = rates.gamma_plus;
    let gm = rates.gamma_minus;
    if !(gp.re > 0.0) {
        return Err(Error::numerics(format!(
            "{label}: non-positive absorption rate {gp}"
        )));
    }
    if gp.im.abs() > 1e-6 * gp.re {
        return Err(Error::numerics(format!(
            "{label}: local rate has imaginary part {gp}"
        )));
    }
    // quadrature roundoff can leave a tiny negative emission rate at very
    // cold effective occupation; clamp only below the error floor
    let gm_re = if gm.re < 0.0 {
        if gm.re < -1e-10 * gp.re {
            return Err(Error::numerics(format!(
                "{label}: negative emission rate {gm}"
            )));
        }
        0.0
    } else {
        gm.re
    };
    Ok((gp.re, gm_re))
}

/// All rates entering the composite generator [1/s].
#[derive(Clone, Debug)]
pub struct CompositeRates {
    pub q: TransitionRates,
    pub aux02: TransitionRates,
    pub aux12: TransitionRates,
    pub aux01: TransitionRates,
    /// Cross rates (gamma_plus, gamma_minus) between the resonant pair;
    /// `None` when collective dissipation is disabled.
    pub cross: Option<(Complex64, Complex64)>,
}

#[derive(Clone, Copy, Debug)]
pub struct SteadyStateReport {
    /// Dimension of the full rotating-frame kernel (must be 1).
    pub kernel_dim: usize,
    pub rotating_residual: f64,
    pub lab_residual: f64,
    /// Scale the residuals are compared against.
    pub scale: f64,
}

/// The assembled machine: rates, couplings, and generators.
#[derive(Clone, Debug)]
pub struct CompositeSystem {
    pub config: EmitterConfig,
    pub rates: CompositeRates,
    /// Coherent coupling actually used [rad/s].
    pub lambda: f64,
    free: DMatrix<Complex64>,
    interaction: DMatrix<Complex64>,
    terms: Vec<LindbladTerm>,
}

impl CompositeSystem {
    pub fn assemble(env: &OteEnvironment, config: &EmitterConfig) -> Result<Self> {
        env.validate()?;
        config.validate()?;
        let pq = config.pos_q();
        let pa = config.pos_aux();
        let d = config.dipole_moment;
        let or = config.orientation;
        let oa = config.omega_a;
        let os = config.omega_upper;

        let q = oriented_rates(env, oa, pq, pq, d, or)?;
        let aux02 = oriented_rates(env, AuxTransition::Aux02.frequency(oa, os), pa, pa, d, or)?;
        let aux12 = oriented_rates(env, AuxTransition::Aux12.frequency(oa, os), pa, pa, d, or)?;
        let aux01 = oriented_rates(env, AuxTransition::Aux01.frequency(oa, os), pa, pa, d, or)?;
        let cross_rates = if config.collective_dissipation {
            let c = oriented_rates(env, oa, pq, pa, d, or)?;
            Some((c.gamma_plus, c.gamma_minus))
        } else {
            None
        };

        let lambda = match config.lambda_override {
            Some(l) => l,
            None => match or {
                DipoleOrientation::Isotropic => {
                    oriented_rates(env, oa, pq, pa, d, or)?.lambda
                }
                DipoleOrientation::Parallel => {
                    let dv = Vector3::new(0.0, d, 0.0);
                    dipole_coupling(oa, pq, pa, dv, dv)?
                }
                DipoleOrientation::Normal => {
                    let dv = Vector3::new(0.0, 0.0, d);
                    dipole_coupling(oa, pq, pa, dv, dv)?
                }
            },
        };

        let (free, interaction) = composite_hamiltonian(oa, os, lambda)?;

        let sq = lowering_q();
        let mut terms = Vec::new();
        let (gp, gm) = checked_local(&q, "working fluid")?;
        terms.push(LindbladTerm::local(sq.clone(), gp)?);
        terms.push(LindbladTerm::local(sq.adjoint(), gm)?);
        for (t, r, label) in [
            (AuxTransition::Aux02, &aux02, "aux 0-2"),
            (AuxTransition::Aux12, &aux12, "aux 1-2"),
            (AuxTransition::Aux01, &aux01, "aux 0-1"),
        ] {
            let op = aux_lowering(t);
            let (gp, gm) = checked_local(r, label)?;
            terms.push(LindbladTerm::local(op.clone(), gp)?);
            terms.push(LindbladTerm::local(op.adjoint(), gm)?);
        }
        if let Some((cp, cm)) = cross_rates {
            let a12 = aux_lowering(AuxTransition::Aux12);
            terms.push(LindbladTerm::cross(sq.clone(), a12.clone(), cp)?);
            terms.push(LindbladTerm::cross(a12.clone(), sq.clone(), cp.conj())?);
            terms.push(LindbladTerm::cross(sq.adjoint(), a12.adjoint(), cm)?);
            terms.push(LindbladTerm::cross(a12.adjoint(), sq.adjoint(), cm.conj())?);
        }

        Ok(CompositeSystem {
            config: config.clone(),
            rates: CompositeRates {
                q,
                aux02,
                aux12,
                aux01,
                cross: cross_rates,
            },
            lambda,
            free,
            interaction,
            terms,
        })
    }

    pub fn liouvillian_rotating(&self) -> Result<Liouvillian> {
        Liouvillian::build(Some(&self.interaction), &self.terms, 6)
    }

    pub fn liouvillian_lab(&self) -> Result<Liouvillian> {
        let h = &self.free + &self.interaction;
        Liouvillian::build(Some(&h), &self.terms, 6)
    }

    /// Unique steady state, computed in the rotating frame and verified
    /// against the lab-frame generator.
    pub fn steady_state(&self) -> Result<(DensityMatrix, SteadyStateReport)> {
        let l_rot = self.liouvillian_rotating()?;
        let full_kernel = kernel_basis(l_rot.matrix(), 1e-9)?;
        let kernel_dim = full_kernel.len();
        if kernel_dim != 1 {
            return Err(Error::numerics(format!(
                "rotating-frame kernel has dimension {kernel_dim}; steady state not unique"
            )));
        }

        // zero-Bohr-frequency block: populations + the |e1><g2| pair.
        // vec index (row i, col j) -> 6 j + i, column-stacking.
        let block: [usize; 8] = [0, 7, 14, 21, 28, 35, 2 * 6 + 4, 4 * 6 + 2];
        let in_block = |idx: usize| block.contains(&idx);
        let m = l_rot.matrix();
        // structural check: the block must be dynamically closed
        let mut leak = 0.0_f64;
        for &r in &block {
            for c in 0..36 {
                if !in_block(c) {
                    leak = leak.max(m[(r, c)].norm());
                }
            }
        }
        if leak > 1e-12 * l_rot.norm() {
            return Err(Error::numerics(format!(
                "zero-frequency sector is not closed (leak {leak:e}); generator structure unexpected"
            )));
        }
        let sub = DMatrix::from_fn(8, 8, |i, j| m[(block[i], block[j])]);
        let sub_kernel = kernel_basis(&sub, 1e-9)?;
        if sub_kernel.len() != 1 {
            return Err(Error::numerics(format!(
                "zero-frequency block kernel has dimension {}",
                sub_kernel.len()
            )));
        }
        let v = &sub_kernel[0];
        let mut rho = DMatrix::from_element(6, 6, Complex64::new(0.0, 0.0));
        for (slot, &idx) in block.iter().enumerate() {
            rho[(idx % 6, idx / 6)] = v[slot];
        }
        let herm = (&rho + rho.adjoint()) * Complex64::new(0.5, 0.0);
        let tr = herm.trace();
        if tr.norm() < 1e-12 {
            return Err(Error::numerics("steady-state candidate is traceless"));
        }
        let rho = DensityMatrix::new(herm / tr)?;

        let scale = l_rot.norm();
        let rotating_residual = l_rot.apply(rho.matrix()).norm();
        let l_lab = self.liouvillian_lab()?;
        let lab_residual = l_lab.apply(rho.matrix()).norm();
        let tol = 1e-10 * scale;
        if rotating_residual > tol || lab_residual > tol {
            return Err(Error::numerics(format!(
                "steady-state residuals too large: rotating {rotating_residual:e}, lab {lab_residual:e}, allowed {tol:e}"
            )));
        }
        Ok((
            rho,
            SteadyStateReport {
                kernel_dim,
                rotating_residual,
                lab_residual,
                scale,
            },
        ))
    }

    /// Apparent working-fluid temperature in the composite steady state.
    pub fn working_fluid_temperature(&self) -> Result<EffectiveTemperature> {
        let (rho, _) = self.steady_state()?;
        let rq = partial_trace_aux(&rho)?;
        emitter_temperature(&rq, self.config.omega_a)
    }
}
