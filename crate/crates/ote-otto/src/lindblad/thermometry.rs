//! Reduced states and effective emitter temperatures.

use super::DensityMatrix;
use crate::constants::HBAR;
use crate::em_env::EffectiveTemperature;
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Reduced working-fluid state: trace out the three-level auxiliary.
pub fn partial_trace_aux(rho: &DensityMatrix) -> Result<DMatrix<Complex64>> {
    if rho.dim() != 6 {
        return Err(Error::numerics("partial trace expects the 6-level composite"));
    }
    let m = rho.matrix();
    let mut out = DMatrix::from_element(2, 2, Complex64::new(0.0, 0.0));
    for q in 0..2 {
        for qp in 0..2 {
            let mut s = Complex64::new(0.0, 0.0);
            for aux in 0..3 {
                s += m[(3 * q + aux, 3 * qp + aux)];
            }
            out[(q, qp)] = s;
        }
    }
    Ok(out)
}

/// Reduced auxiliary state: trace out the working fluid.
pub fn partial_trace_q(rho: &DensityMatrix) -> Result<DMatrix<Complex64>> {
    if rho.dim() != 6 {
        return Err(Error::numerics("partial trace expects the 6-level composite"));
    }
    let m = rho.matrix();
    let mut out = DMatrix::from_element(3, 3, Complex64::new(0.0, 0.0));
    for a in 0..3 {
        for ap in 0..3 {
            out[(a, ap)] = m[(a, ap)] + m[(3 + a, 3 + ap)];
        }
    }
    Ok(out)
}

/// Effective temperature of a two-level reduced state with gap `omega`.
///
/// Only meaningful for states that are diagonal in the energy basis; a
/// residual coherence above 1e-6 is rejected rather than silently dropped.
/// Population inversion maps to a negative temperature via the signed-beta
/// representation.
pub fn emitter_temperature(rho2: &DMatrix<Complex64>, omega: f64) -> Result<EffectiveTemperature> {
    if rho2.shape() != (2, 2) {
        return Err(Error::numerics("emitter temperature expects a 2x2 state"));
    }
    if !(omega > 0.0) {
        return Err(Error::config(format!(
            "emitter temperature needs a positive gap, got {omega:e}"
        )));
    }
    let coh = rho2[(0, 1)].norm().max(rho2[(1, 0)].norm());
    if coh > 1e-6 {
        return Err(Error::numerics(format!(
            "reduced state has coherence {coh:e}; effective temperature undefined"
        )));
    }
    // clamp eigenvalue-level roundoff; genuine negatives were caught upstream
    let pg = rho2[(0, 0)].re.max(0.0);
    let pe = rho2[(1, 1)].re.max(0.0);
    if pg + pe == 0.0 {
        return Err(Error::numerics("reduced state has vanishing trace"));
    }
    // beta from p_e / p_g = e^{-hbar omega beta}; ln handles the 0 and
    // inverted cases through +/- infinity
    let beta = (pg / pe).ln() / (HBAR * omega);
    Ok(EffectiveTemperature::from_beta(beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn product_state_partial_traces_factor() {
        // rho = rho_q (x) rho_m with distinct populations
        let q = [0.3, 0.7];
        let m = [0.5, 0.2, 0.3];
        let mut full = DMatrix::from_element(6, 6, Complex64::new(0.0, 0.0));
        for (iq, pq) in q.iter().enumerate() {
            for (im, pm) in m.iter().enumerate() {
                full[(3 * iq + im, 3 * iq + im)] = Complex64::new(pq * pm, 0.0);
            }
        }
        let rho = DensityMatrix::new(full).unwrap();
        let rq = partial_trace_aux(&rho).unwrap();
        let rm = partial_trace_q(&rho).unwrap();
        assert_relative_eq!(rq[(0, 0)].re, 0.3, epsilon = 1e-14);
        assert_relative_eq!(rq[(1, 1)].re, 0.7, epsilon = 1e-14);
        for (i, pm) in m.iter().enumerate() {
            assert_relative_eq!(rm[(i, i)].re, *pm, epsilon = 1e-14);
        }
        assert_relative_eq!(rq.trace().re, 1.0, epsilon = 1e-14);
        assert_relative_eq!(rm.trace().re, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn entangled_coherence_survives_partial_trace_correctly() {
        // |psi> = (|e1> + |g2>)/sqrt(2): reduced states are maximally mixed
        // over the participating levels with no coherence
        let mut full = DMatrix::from_element(6, 6, Complex64::new(0.0, 0.0));
        for (i, j) in [(4, 4), (4, 2), (2, 4), (2, 2)] {
            full[(i, j)] = Complex64::new(0.5, 0.0);
        }
        let rho = DensityMatrix::new(full).unwrap();
        let rq = partial_trace_aux(&rho).unwrap();
        assert_relative_eq!(rq[(0, 0)].re, 0.5, epsilon = 1e-14);
        assert_relative_eq!(rq[(1, 1)].re, 0.5, epsilon = 1e-14);
        assert!(rq[(0, 1)].norm() < 1e-14);
        let rm = partial_trace_q(&rho).unwrap();
        assert_relative_eq!(rm[(1, 1)].re, 0.5, epsilon = 1e-14);
        assert_relative_eq!(rm[(2, 2)].re, 0.5, epsilon = 1e-14);
        assert!(rm[(1, 2)].norm() < 1e-14);
    }

    #[test]
    fn temperature_round_trip_and_inversion() {
        let omega = 1.495e13;
        for t_kelvin in [700.0, 200.0, 37.5, -537.0] {
            let t = EffectiveTemperature::from_kelvin(t_kelvin);
            let p = t.excited_population(omega);
            let mut m = DMatrix::from_element(2, 2, Complex64::new(0.0, 0.0));
            m[(0, 0)] = Complex64::new(1.0 - p, 0.0);
            m[(1, 1)] = Complex64::new(p, 0.0);
            let back = emitter_temperature(&m, omega).unwrap();
            assert_relative_eq!(back.kelvin(), t_kelvin, max_relative = 1e-10);
            assert_eq!(back.is_inverted(), t_kelvin < 0.0);
        }
    }

    #[test]
    fn coherent_state_rejected() {
        let mut m = DMatrix::from_element(2, 2, Complex64::new(0.0, 0.0));
        m[(0, 0)] = Complex64::new(0.5, 0.0);
        m[(1, 1)] = Complex64::new(0.5, 0.0);
        m[(0, 1)] = Complex64::new(1e-4, 0.0);
        m[(1, 0)] = Complex64::new(1e-4, 0.0);
        assert!(emitter_temperature(&m, 1e13).is_err());
    }

    #[test]
    fn ground_state_is_zero_temperature() {
        let mut m = DMatrix::from_element(2, 2, Complex64::new(0.0, 0.0));
        m[(0, 0)] = Complex64::new(1.0, 0.0);
        let t = emitter_temperature(&m, 1e13).unwrap();
        assert_eq!(t.kelvin(), 0.0);
        assert_eq!(t.excited_population(1e13), 0.0);
    }

    #[test]
    fn partial_trace_dimension_guard() {
        let rho2 = DensityMatrix::from_populations(&[0.5, 0.5]).unwrap();
        assert!(partial_trace_aux(&rho2).is_err());
        assert!(partial_trace_q(&rho2).is_err());
    }
}
