//! Dielectric response models for the slab material.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Frequency-dependent relative permittivity `eps(omega)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum PermittivityModel {
    /// eps = 1 for every frequency.
    Vacuum,
    /// Single-resonance Drude-Lorentz (optical-phonon) model:
    /// `eps(w) = eps_inf * (omega_l^2 - w^2 - i gamma w) / (omega_t^2 - w^2 - i gamma w)`.
    ///
    /// All frequencies in rad/s. Passivity (Im eps >= 0 for w > 0) requires
    /// `omega_l > omega_t` and `gamma >= 0`.
    DrudeLorentz {
        eps_inf: f64,
        omega_l: f64,
        omega_t: f64,
        gamma: f64,
    },
    /// Piecewise-linear interpolation of tabulated data on a strictly
    /// increasing frequency grid. Out-of-range queries are an error.
    Tabulated {
        omega: Vec<f64>,
        eps: Vec<Complex64>,
    },
}

impl PermittivityModel {
    /// Validate model parameters (called once at construction / config time).
    pub fn validate(&self) -> Result<()> {
        match self {
            PermittivityModel::Vacuum => Ok(()),
            PermittivityModel::DrudeLorentz {
                eps_inf,
                omega_l,
                omega_t,
                gamma,
            } => {
                if !(*eps_inf > 0.0) {
                    return Err(Error::config("drude-lorentz eps_inf must be positive"));
                }
                if !(*omega_l > *omega_t && *omega_t > 0.0) {
                    return Err(Error::config(
                        "drude-lorentz requires omega_l > omega_t > 0 (passivity)",
                    ));
                }
                if !(*gamma >= 0.0) {
                    return Err(Error::config("drude-lorentz gamma must be >= 0"));
                }
                Ok(())
            }
            PermittivityModel::Tabulated { omega, eps } => {
                if omega.len() != eps.len() || omega.len() < 2 {
                    return Err(Error::config(
                        "tabulated permittivity needs >= 2 matching grid/value entries",
                    ));
                }
                if !omega.windows(2).all(|w| w[1] > w[0]) {
                    return Err(Error::config(
                        "tabulated permittivity grid must be strictly increasing",
                    ));
                }
                if eps.iter().any(|e| e.im < 0.0) {
                    return Err(Error::config(
                        "tabulated permittivity must have Im eps >= 0 (passivity)",
                    ));
                }
                Ok(())
            }
        }
    }

    /// Evaluate eps(omega) for omega > 0.
    pub fn permittivity(&self, omega: f64) -> Result<Complex64> {
        if !(omega > 0.0) || !omega.is_finite() {
            return Err(Error::config(format!(
                "permittivity requested at non-positive frequency {omega}"
            )));
        }
        match self {
            PermittivityModel::Vacuum => Ok(Complex64::new(1.0, 0.0)),
            PermittivityModel::DrudeLorentz {
                eps_inf,
                omega_l,
                omega_t,
                gamma,
            } => {
                let iw = Complex64::new(0.0, gamma * omega);
                let num = Complex64::new(omega_l * omega_l - omega * omega, 0.0) - iw;
                let den = Complex64::new(omega_t * omega_t - omega * omega, 0.0) - iw;
                if den.norm() == 0.0 {
                    return Err(Error::numerics(format!(
                        "drude-lorentz denominator vanished at omega = {omega:e} (gamma = 0 resonance)"
                    )));
                }
                Ok(eps_inf * num / den)
            }
            PermittivityModel::Tabulated { omega: grid, eps } => {
                let (lo, hi) = (grid[0], grid[grid.len() - 1]);
                if omega < lo || omega > hi {
                    return Err(Error::config(format!(
                        "tabulated permittivity queried at {omega:e} rad/s, outside [{lo:e}, {hi:e}]"
                    )));
                }
                let j = grid.partition_point(|&g| g < omega).min(grid.len() - 1).max(1);
                let (w0, w1) = (grid[j - 1], grid[j]);
                let t = (omega - w0) / (w1 - w0);
                Ok(eps[j - 1] * (1.0 - t) + eps[j] * t)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // standard SiC optical-phonon parameters used throughout the tests
    pub(crate) fn sic() -> PermittivityModel {
        PermittivityModel::DrudeLorentz {
            eps_inf: 6.7,
            omega_l: 1.827e14,
            omega_t: 1.495e14,
            gamma: 0.9e12,
        }
    }

    #[test]
    fn vacuum_is_unity() {
        let eps = PermittivityModel::Vacuum.permittivity(1.0e13).unwrap();
        assert_eq!(eps, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn static_limit_of_lossless_drude_lorentz() {
        // gamma = 0, omega -> 0: eps -> eps_inf * omega_l^2 / omega_t^2
        let m = PermittivityModel::DrudeLorentz {
            eps_inf: 6.7,
            omega_l: 1.827e14,
            omega_t: 1.495e14,
            gamma: 0.0,
        };
        let eps = m.permittivity(1.0e6).unwrap();
        let expected = 6.7 * (1.827e14_f64 / 1.495e14).powi(2);
        assert_relative_eq!(eps.re, expected, max_relative = 1e-10);
        assert!(eps.im.abs() < 1e-12);
    }

    #[test]
    fn sic_at_resonance_matches_reference() {
        // Frozen from a 50-digit evaluation of the same closed form at omega_t,
        // where eps = eps_inf * (1 + i (omega_l^2 - omega_t^2)/(gamma omega_t)).
        let eps = sic().permittivity(1.495e14).unwrap();
        assert_relative_eq!(eps.re, 6.7, max_relative = 1e-12);
        assert_relative_eq!(eps.im, 549.19782980304719, max_relative = 1e-12);
    }

    #[test]
    fn sic_off_resonance_matches_high_precision_reference() {
        // frozen from a 50-digit evaluation of the closed form at 1.0e14 rad/s
        let eps = sic().permittivity(1.0e14).unwrap();
        assert_relative_eq!(eps.re, 12.682926989691942, max_relative = 1e-12);
        assert_relative_eq!(eps.im, 0.043599395078826321, max_relative = 1e-12);
    }

    #[test]
    fn passivity_on_a_grid() {
        let m = sic();
        for i in 1..200 {
            let w = 3.0e14 * (i as f64) / 200.0;
            let eps = m.permittivity(w).unwrap();
            assert!(eps.im >= 0.0, "Im eps < 0 at {w:e}");
        }
    }

    #[test]
    fn tabulated_interpolates_and_rejects_out_of_range() {
        let m = PermittivityModel::Tabulated {
            omega: vec![1.0e13, 2.0e13, 3.0e13],
            eps: vec![
                Complex64::new(2.0, 0.1),
                Complex64::new(3.0, 0.2),
                Complex64::new(5.0, 0.4),
            ],
        };
        m.validate().unwrap();
        let eps = m.permittivity(1.5e13).unwrap();
        assert_relative_eq!(eps.re, 2.5, max_relative = 1e-14);
        assert_relative_eq!(eps.im, 0.15, max_relative = 1e-14);
        // endpoints included
        assert_relative_eq!(m.permittivity(3.0e13).unwrap().re, 5.0, max_relative = 1e-14);
        assert!(m.permittivity(0.5e13).is_err());
        assert!(m.permittivity(3.1e13).is_err());
    }

    #[test]
    fn invalid_models_rejected() {
        assert!(PermittivityModel::DrudeLorentz {
            eps_inf: 6.7,
            omega_l: 1.0e14,
            omega_t: 1.5e14, // inverted
            gamma: 1e12
        }
        .validate()
        .is_err());
        assert!(PermittivityModel::Tabulated {
            omega: vec![2.0e13, 1.0e13],
            eps: vec![Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)],
        }
        .validate()
        .is_err());
    }
}
