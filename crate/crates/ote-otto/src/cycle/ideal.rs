//! Closed-form sudden-stroke Otto cycles.

use crate::constants::HBAR;
use crate::em_env::EffectiveTemperature;
use crate::error::{Error, Result};

use super::CyclePoint;

/// Ideal Otto cycle between two effective bath temperatures.
///
/// The expansion stroke runs at the frozen hot-isochore population
/// `p_e(omega_a, hot)`, the compression stroke at `p_e(omega_b, cold)`;
/// both isochores thermalize completely. `omega_b = 0` is allowed and
/// evaluated in the limit `p_e(0, T) = 1/2`.
pub fn ideal_cycle(
    omega_a: f64,
    omega_b: f64,
    hot: EffectiveTemperature,
    cold: EffectiveTemperature,
) -> Result<CyclePoint> {
    if !(omega_a > 0.0) || !omega_a.is_finite() {
        return Err(Error::config(format!("omega_a = {omega_a} must be positive")));
    }
    if !(0.0..=omega_a).contains(&omega_b) {
        return Err(Error::config(format!(
            "omega_b = {omega_b} outside [0, omega_a = {omega_a}]"
        )));
    }
    let k = omega_b / omega_a;
    let p_hot = hot.excited_population(omega_a);
    let p_cold = cold.excited_population(omega_b);

    let work_extracted = HBAR * (omega_a - omega_b) * (p_hot - p_cold);
    let q_hot = HBAR * omega_a * (p_hot - p_cold); // isochore D
    let q_cold = HBAR * omega_b * (p_cold - p_hot); // isochore B
    let heat_absorbed = q_hot.max(0.0) + q_cold.max(0.0);
    let heat_released = q_hot.min(0.0) + q_cold.min(0.0);

    Ok(CyclePoint {
        k,
        omega_b,
        alpha: f64::INFINITY,
        hot_temperature: hot.kelvin(),
        cold_temperature: cold.kelvin(),
        work_extracted,
        heat_absorbed,
        heat_released,
        // the sudden-stroke efficiency is the frequency ratio alone,
        // independent of the two temperatures
        efficiency: Some(1.0 - k),
        // population form of the positive-work condition; equivalent to the
        // temperature-ratio form but free of 0 * inf corner cases
        pwc_satisfied: p_hot >= p_cold,
        first_law_defect: (work_extracted - (q_hot + q_cold)).abs(),
    })
}

/// Standard ideal quantum Otto cycle between two thermal reservoirs.
pub fn si_qoc(omega_a: f64, omega_b: f64, t1: f64, t2: f64) -> Result<CyclePoint> {
    if !(t2 > 0.0) || !(t1 >= t2) || !t1.is_finite() {
        return Err(Error::config(format!(
            "need T1 >= T2 > 0, got T1 = {t1}, T2 = {t2}"
        )));
    }
    let mut point = ideal_cycle(
        omega_a,
        omega_b,
        EffectiveTemperature::from_kelvin(t1),
        EffectiveTemperature::from_kelvin(t2),
    )?;
    // exact product form of omega_b/omega_a >= T2/T1
    point.pwc_satisfied = omega_b * t1 >= omega_a * t2;
    Ok(point)
}
