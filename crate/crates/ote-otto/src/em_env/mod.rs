//! Electromagnetic environment: slab + blackbody field correlators,
//! absorption/emission rates, effective temperatures, coherent couplings.

pub mod correlations;
pub mod permittivity;
pub mod scattering;

pub use correlations::{
    correlation_matrices, CorrelationMatrices, OteEnvironment, Position, QuadratureConfig,
    SlabGeometry,
};
pub use permittivity::PermittivityModel;
pub use scattering::{slab_scattering, Polarization, SlabAmplitudes};

use crate::constants::{gamma0, photon_number, HBAR, KB};
use crate::error::{Error, Result};
use nalgebra::{Matrix3, Vector3};
use num_complex::Complex64;

/// Frequency-domain field correlators c(+omega), c(-omega) contracted against
/// dipole vectors to produce rates: gamma = d_i . c . d_j.
/// Units: 1 / (s C^2 m^2).
#[derive(Clone, Debug)]
pub struct FieldCorrelators {
    pub c_plus: Matrix3<Complex64>,
    pub c_minus: Matrix3<Complex64>,
    pub omega: f64,
    pub quad_error: f64,
}

/// Downward (absorption, gamma_plus) and upward (emission... sign convention:
/// `gamma_plus` multiplies the lowering-operator dissipator, i.e. decay;
/// `gamma_minus` multiplies the raising-operator dissipator, i.e. pumping)
/// rates for a transition pair, plus the coherent dipole-dipole coupling.
#[derive(Clone, Copy, Debug)]
pub struct TransitionRates {
    /// Decay rate coefficient [1/s]; real and positive for i == j.
    pub gamma_plus: Complex64,
    /// Pump rate coefficient [1/s]; real and non-negative for i == j.
    pub gamma_minus: Complex64,
    /// Coherent dipole-dipole coupling [rad/s]; zero for coincident positions.
    pub lambda: f64,
}

pub fn field_correlators(
    env: &OteEnvironment,
    omega: f64,
    pos_i: Position,
    pos_j: Position,
) -> Result<FieldCorrelators> {
    let cm = correlation_matrices(env, omega, pos_i, pos_j)?;
    let n1 = photon_number(omega, env.slab.temperature);
    let n2 = photon_number(omega, env.blackbody_temperature);
    let g0 = gamma0(omega);
    let c_plus = (cm.alpha1 * Complex64::new(1.0 + n1, 0.0)
        + cm.alpha2 * Complex64::new(1.0 + n2, 0.0))
        * Complex64::new(g0, 0.0);
    let c_minus = (cm.alpha1 * Complex64::new(n1, 0.0) + cm.alpha2 * Complex64::new(n2, 0.0))
        * Complex64::new(g0, 0.0);
    Ok(FieldCorrelators {
        c_plus,
        c_minus,
        omega,
        quad_error: cm.quad_error * g0 * (2.0 + n1 + n2),
    })
}

/// Rates for the transition at `omega` between emitters at `pos_i`, `pos_j`
/// with (real) dipole vectors `dipole_i`, `dipole_j` [C m].
pub fn transition_rates(
    env: &OteEnvironment,
    omega: f64,
    pos_i: Position,
    pos_j: Position,
    dipole_i: Vector3<f64>,
    dipole_j: Vector3<f64>,
) -> Result<TransitionRates> {
    if !(dipole_i.norm() > 0.0 && dipole_j.norm() > 0.0) {
        return Err(Error::config("dipole moments must be nonzero"));
    }
    let fc = field_correlators(env, omega, pos_i, pos_j)?;
    let di = dipole_i.map(|x| Complex64::new(x, 0.0));
    let dj = dipole_j.map(|x| Complex64::new(x, 0.0));
    let gamma_plus = (di.transpose() * fc.c_plus * dj)[(0, 0)];
    let gamma_minus = (di.transpose() * fc.c_minus * dj)[(0, 0)];
    let lambda = if pos_i == pos_j {
        0.0
    } else {
        dipole_coupling(omega, pos_i, pos_j, dipole_i, dipole_j)?
    };
    Ok(TransitionRates {
        gamma_plus,
        gamma_minus,
        lambda,
    })
}

/// Signed inverse temperature. Negative values describe population-inverted
/// (apparent) temperatures; beta = 0 is the infinite-temperature point, which
/// neighbouring positive and negative temperatures approach continuously.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EffectiveTemperature {
    beta: f64, // [1/J]
}

impl EffectiveTemperature {
    pub fn from_beta(beta: f64) -> Self {
        EffectiveTemperature { beta }
    }

    pub fn from_kelvin(t: f64) -> Self {
        // t = +/-inf and t = 0 map to beta = 0 and +inf respectively
        EffectiveTemperature { beta: 1.0 / (KB * t) }
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Temperature in kelvin; +inf at beta = 0, negative when inverted.
    pub fn kelvin(&self) -> f64 {
        1.0 / (KB * self.beta)
    }

    pub fn is_inverted(&self) -> bool {
        self.beta < 0.0
    }

    /// Excited-state population of a two-level system with gap `omega` at this
    /// temperature: 1 / (1 + e^{hbar omega beta}). Saturates cleanly at 0/1.
    pub fn excited_population(&self, omega: f64) -> f64 {
        1.0 / (1.0 + (HBAR * omega * self.beta).exp())
    }
}

/// Invert local detailed balance gamma_minus/gamma_plus = e^{-hbar omega beta}
/// to get the frequency-local effective temperature seen by a transition.
pub fn effective_temperature(
    gamma_plus: f64,
    gamma_minus: f64,
    omega: f64,
) -> Result<EffectiveTemperature> {
    if !(omega > 0.0) {
        return Err(Error::config(format!(
            "effective temperature needs a positive frequency, got {omega}"
        )));
    }
    if !(gamma_plus > 0.0) || !gamma_plus.is_finite() {
        return Err(Error::numerics(format!(
            "effective temperature undefined for gamma_plus = {gamma_plus}"
        )));
    }
    if !(gamma_minus >= 0.0) || !gamma_minus.is_finite() {
        return Err(Error::numerics(format!(
            "effective temperature undefined for gamma_minus = {gamma_minus}"
        )));
    }
    // gamma_minus = 0 -> beta = +inf (zero temperature); gamma_minus >
    // gamma_plus -> beta < 0 (inversion). Both are valid signed temperatures.
    let beta = (gamma_plus / gamma_minus).ln() / (HBAR * omega);
    Ok(EffectiveTemperature::from_beta(beta))
}

/// Coherent dipole-dipole coupling [rad/s] between two transitions at the
/// common frequency `omega`, in the free-space retarded form
///
///   lambda = (3/4) sqrt(G_i G_j) [ -A cos(x)/x + B (sin(x)/x^2 + cos(x)/x^3) ]
///
/// with x = (omega/c) |r_i - r_j|, G = gamma0 |d|^2 the free-space decay
/// rates, A = di.dj - (di.r)(dj.r), B = di.dj - 3 (di.r)(dj.r) built from
/// unit vectors. The environment-independent free-space form is used: at the
/// micrometre separations and tens-of-micrometre surface distances of
/// interest the near-field 1/x^3 term dominates and slab corrections to it
/// are subleading.
pub fn dipole_coupling(
    omega: f64,
    pos_i: Position,
    pos_j: Position,
    dipole_i: Vector3<f64>,
    dipole_j: Vector3<f64>,
) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(Error::config(format!(
            "dipole coupling needs a positive frequency, got {omega}"
        )));
    }
    let sep = Vector3::new(
        pos_i.r[0] - pos_j.r[0],
        pos_i.r[1] - pos_j.r[1],
        pos_i.z - pos_j.z,
    );
    let dist = sep.norm();
    if dist == 0.0 {
        return Err(Error::config(
            "dipole coupling diverges at zero separation; positions must differ",
        ));
    }
    let ni = dipole_i.norm();
    let nj = dipole_j.norm();
    if !(ni > 0.0 && nj > 0.0) {
        return Err(Error::config("dipole moments must be nonzero"));
    }
    let di = dipole_i / ni;
    let dj = dipole_j / nj;
    let r_hat = sep / dist;
    let a = di.dot(&dj) - di.dot(&r_hat) * dj.dot(&r_hat);
    let b = di.dot(&dj) - 3.0 * di.dot(&r_hat) * dj.dot(&r_hat);
    let x = omega / crate::constants::C * dist;
    let g = (gamma0(omega) * ni * ni * gamma0(omega) * nj * nj).sqrt();
    let (sx, cx) = x.sin_cos();
    Ok(0.75 * g * (-a * cx / x + b * (sx / (x * x) + cx / (x * x * x))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::C;
    use approx::assert_relative_eq;

    fn sic() -> PermittivityModel {
        PermittivityModel::DrudeLorentz {
            eps_inf: 6.7,
            omega_l: 1.827e14,
            omega_t: 1.495e14,
            gamma: 0.9e12,
        }
    }

    fn env_with(t1: f64, t2: f64) -> OteEnvironment {
        OteEnvironment {
            material: sic(),
            slab: SlabGeometry {
                thickness: 1e-6,
                temperature: t1,
            },
            blackbody_temperature: t2,
            quadrature: QuadratureConfig::default(),
        }
    }

    fn vacuum_env(t2: f64) -> OteEnvironment {
        OteEnvironment {
            material: PermittivityModel::Vacuum,
            slab: SlabGeometry {
                thickness: 1e-6,
                temperature: 300.0,
            },
            blackbody_temperature: t2,
            quadrature: QuadratureConfig::default(),
        }
    }

    /// Free-space blackbody absorption/emission rates for a dipole d at
    /// temperature T: the reference the no-slab limit must reproduce.
    fn blackbody_rates(omega: f64, t: f64, d: f64) -> (f64, f64) {
        let g = gamma0(omega) * d * d;
        let n = photon_number(omega, t);
        (g * (1.0 + n), g * n)
    }

    #[test]
    fn no_slab_rates_are_blackbody_rates() {
        let env = vacuum_env(300.0);
        let p = Position::new(0.0, 0.0, 26e-6);
        let d = Vector3::new(0.0, 0.0, 1e-29);
        for omega in [1.495e13, 7.475e12, 1.495e14] {
            let r = transition_rates(&env, omega, p, p, d, d).unwrap();
            let (gp, gm) = blackbody_rates(omega, 300.0, 1e-29);
            assert_relative_eq!(r.gamma_plus.re, gp, max_relative = 1e-6);
            assert_relative_eq!(r.gamma_minus.re, gm, max_relative = 1e-6);
            assert!(r.gamma_plus.im.abs() < 1e-10 * gp);
            let t = effective_temperature(r.gamma_plus.re, r.gamma_minus.re, omega).unwrap();
            assert_relative_eq!(t.kelvin(), 300.0, max_relative = 1e-5);
        }
    }

    #[test]
    fn global_equilibrium_temperature_is_exact() {
        // T1 = T2 = T: whatever the slab does, detailed balance must give T.
        let env = env_with(300.0, 300.0);
        let d = Vector3::new(0.0, 0.0, 1e-29);
        for (omega, z) in [
            (1.495e13, 26e-6),
            (1.495e14, 26e-6),
            (7.0e13, 2e-6),
            (2.5e14, 50e-6),
        ] {
            let p = Position::new(0.0, 0.0, z);
            let r = transition_rates(&env, omega, p, p, d, d).unwrap();
            let t = effective_temperature(r.gamma_plus.re, r.gamma_minus.re, omega).unwrap();
            assert_relative_eq!(t.kelvin(), 300.0, epsilon = 0.05);
        }
    }

    #[test]
    fn effective_temperature_lies_between_reservoirs() {
        let env = env_with(700.0, 200.0);
        let d = Vector3::new(0.0, 0.0, 1e-29);
        let p = Position::new(0.0, 0.0, 26e-6);
        for omega in [7.475e12, 1.495e13, 7.0e13] {
            let r = transition_rates(&env, omega, p, p, d, d).unwrap();
            let t = effective_temperature(r.gamma_plus.re, r.gamma_minus.re, omega)
                .unwrap()
                .kelvin();
            assert!(
                (200.0 - 1.0..=700.0 + 1.0).contains(&t),
                "T_env({omega:e}) = {t} outside reservoir bracket"
            );
        }
    }

    #[test]
    fn spontaneous_part_is_temperature_independent() {
        // c(+) - c(-) = gamma0 (alpha1 + alpha2): no occupation factors.
        let cold = env_with(10.0, 10.0);
        let hot = env_with(650.0, 450.0);
        let p = Position::new(0.0, 0.0, 10e-6);
        let omega = 1.495e13;
        let fc_cold = field_correlators(&cold, omega, p, p).unwrap();
        let fc_hot = field_correlators(&hot, omega, p, p).unwrap();
        let diff_cold = fc_cold.c_plus - fc_cold.c_minus;
        let diff_hot = fc_hot.c_plus - fc_hot.c_minus;
        assert!(
            (diff_cold - diff_hot).norm() < 1e-6 * diff_cold.norm(),
            "spontaneous parts differ: {:e}",
            (diff_cold - diff_hot).norm() / diff_cold.norm()
        );
    }

    #[test]
    fn cold_environment_rates_are_mostly_spontaneous() {
        let env = vacuum_env(1.0);
        let p = Position::new(0.0, 0.0, 26e-6);
        let d = Vector3::new(0.0, 0.0, 1e-29);
        let omega = 1.495e14;
        let r = transition_rates(&env, omega, p, p, d, d).unwrap();
        let g = gamma0(omega) * 1e-29f64.powi(2);
        assert_relative_eq!(r.gamma_plus.re, g, max_relative = 1e-6);
        assert!(r.gamma_minus.re < 1e-100 * g); // n(omega, 1 K) underflows
    }

    #[test]
    fn effective_temperature_round_trips_and_edge_cases() {
        let t = EffectiveTemperature::from_kelvin(313.0);
        let omega = 7.475e12;
        let p = t.excited_population(omega);
        assert!(p > 0.0 && p < 0.5);
        // round trip via synthetic detailed-balance rates
        let g = 1.7e-3;
        let ratio = (-(HBAR * omega) * t.beta()).exp();
        let back = effective_temperature(g, g * ratio, omega).unwrap();
        assert_relative_eq!(back.kelvin(), 313.0, max_relative = 1e-12);

        // inversion: gamma_minus > gamma_plus -> negative temperature
        let inv = effective_temperature(1.0, 1.3, omega).unwrap();
        assert!(inv.is_inverted());
        assert!(inv.kelvin() < 0.0);
        assert!(inv.excited_population(omega) > 0.5);

        // equal rates -> infinite temperature, p_e = 1/2
        let flat = effective_temperature(1.0, 1.0, omega).unwrap();
        assert_eq!(flat.beta(), 0.0);
        assert!(flat.kelvin().is_infinite());
        assert_relative_eq!(flat.excited_population(omega), 0.5);

        // zero pump -> zero temperature, p_e = 0
        let zero = effective_temperature(1.0, 0.0, omega).unwrap();
        assert_eq!(zero.excited_population(omega), 0.0);
        assert_eq!(zero.kelvin(), 0.0);

        assert!(effective_temperature(0.0, 1.0, omega).is_err());
        assert!(effective_temperature(-1.0, 1.0, omega).is_err());
        assert!(effective_temperature(1.0, -0.5, omega).is_err());
        assert!(effective_temperature(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn population_saturates_without_overflow() {
        let hot = EffectiveTemperature::from_kelvin(1e300);
        assert_relative_eq!(hot.excited_population(1e13), 0.5, epsilon = 1e-10);
        let cold = EffectiveTemperature::from_kelvin(1e-300);
        assert_eq!(cold.excited_population(1e15), 0.0);
        let zero = EffectiveTemperature::from_kelvin(0.0);
        assert_eq!(zero.excited_population(1e13), 0.0);
    }

    /// Free-space cross-emitter spontaneous rate factor
    /// F = (3/2)[A sin x/x + B (cos x/x^2 - sin x/x^3)]: the independent
    /// reference for the separated-position path through the mode sum.
    fn cross_rate_reference(
        omega: f64,
        sep: Vector3<f64>,
        di: Vector3<f64>,
        dj: Vector3<f64>,
    ) -> f64 {
        let dist = sep.norm();
        let x = omega / C * dist;
        let dhi = di / di.norm();
        let dhj = dj / dj.norm();
        let rh = sep / dist;
        let a = dhi.dot(&dhj) - dhi.dot(&rh) * dhj.dot(&rh);
        let b = dhi.dot(&dhj) - 3.0 * dhi.dot(&rh) * dhj.dot(&rh);
        let g = gamma0(omega) * di.norm() * dj.norm();
        1.5 * g * (a * x.sin() / x + b * (x.cos() / (x * x) - x.sin() / (x * x * x)))
    }

    #[test]
    fn separated_vacuum_rates_match_retarded_dipole_formula() {
        let env = vacuum_env(1.0); // T2 ~ 0: gamma_plus is purely spontaneous
        let omega = 1.495e13;
        // in-plane separation, dipoles perpendicular to it
        let pi = Position::new(0.0, 0.0, 26e-6);
        let pj = Position::new(1e-6, 0.0, 26e-6);
        let dz = Vector3::new(0.0, 0.0, 1e-29);
        let r = transition_rates(&env, omega, pi, pj, dz, dz).unwrap();
        let sep = Vector3::new(-1e-6, 0.0, 0.0);
        let expect = cross_rate_reference(omega, sep, dz, dz);
        assert_relative_eq!(r.gamma_plus.re, expect, max_relative = 1e-5);
        assert!(r.gamma_plus.im.abs() < 1e-6 * expect.abs());

        // dipoles along the separation axis
        let dx = Vector3::new(1e-29, 0.0, 0.0);
        let r2 = transition_rates(&env, omega, pi, pj, dx, dx).unwrap();
        let expect2 = cross_rate_reference(omega, sep, dx, dx);
        assert_relative_eq!(r2.gamma_plus.re, expect2, max_relative = 1e-5);

        // vertical separation exercises the e^{i kz dz} phases instead
        let pk = Position::new(0.0, 0.0, 27e-6);
        let r3 = transition_rates(&env, omega, pi, pk, dx, dx).unwrap();
        let sep3 = Vector3::new(0.0, 0.0, -1e-6);
        let expect3 = cross_rate_reference(omega, sep3, dx, dx);
        assert_relative_eq!(r3.gamma_plus.re, expect3, max_relative = 1e-5);
    }

    #[test]
    fn dipole_coupling_near_field_and_errors() {
        let omega = 1.495e13;
        let d = Vector3::new(0.0, 0.0, 1e-29);
        let pi = Position::new(0.0, 0.0, 26e-6);
        let pj = Position::new(1e-6, 0.0, 26e-6);
        let lam = dipole_coupling(omega, pi, pj, d, d).unwrap();
        // near zone (x ~ 0.05): lambda ~ (3/4) G / x^3, positive for
        // parallel dipoles perpendicular to the separation (B = 1 term).
        let g = gamma0(omega) * 1e-29f64.powi(2);
        let x = omega / C * 1e-6;
        assert!(lam > 0.0);
        assert_relative_eq!(lam, 0.75 * g / (x * x * x), max_relative = 0.02);

        // doubling the distance shrinks |lambda| by ~8 in the near zone
        let pj2 = Position::new(2e-6, 0.0, 26e-6);
        let lam2 = dipole_coupling(omega, pi, pj2, d, d).unwrap();
        assert_relative_eq!(lam / lam2, 8.0, max_relative = 0.05);

        assert!(dipole_coupling(omega, pi, pi, d, d).is_err());
        assert!(dipole_coupling(0.0, pi, pj, d, d).is_err());
        assert!(dipole_coupling(omega, pi, pj, Vector3::zeros(), d).is_err());
    }

    #[test]
    fn transition_rates_rejects_zero_dipole() {
        let env = vacuum_env(300.0);
        let p = Position::new(0.0, 0.0, 26e-6);
        assert!(transition_rates(&env, 1e13, p, p, Vector3::zeros(), Vector3::zeros()).is_err());
    }
}
