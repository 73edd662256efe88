//! Plane-wave scattering off the dielectric slab.
//!
//! Conventions: in-plane wavevector magnitude `k`, vacuum normal component
//! `kz = sqrt(omega^2/c^2 - k^2)` and medium component
//! `kzm = sqrt(eps omega^2/c^2 - k^2)`, both on the branch with
//! non-negative imaginary part (principal square root for passive media;
//! evanescent vacuum waves get `kz = i kappa`, `kappa > 0`).

use crate::constants::C;
use crate::error::{Error, Result};
use num_complex::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarization {
    TE,
    TM,
}

/// Square root on the Im >= 0 branch.
pub fn sqrt_upper(z: Complex64) -> Complex64 {
    let r = z.sqrt();
    if r.im < 0.0 {
        -r
    } else {
        r
    }
}

/// Vacuum normal wavevector component for in-plane momentum `k` at `omega`.
pub fn kz_vacuum(omega: f64, k: f64) -> Complex64 {
    sqrt_upper(Complex64::new(omega * omega / (C * C) - k * k, 0.0))
}

/// Medium normal wavevector component.
pub fn kz_medium(omega: f64, k: f64, eps: Complex64) -> Complex64 {
    sqrt_upper(eps * (omega * omega / (C * C)) - Complex64::new(k * k, 0.0))
}

/// Fresnel reflection coefficient of the vacuum/medium interface.
///
/// TE: (kz - kzm)/(kz + kzm); TM: (eps kz - kzm)/(eps kz + kzm).
pub fn fresnel_reflection(pol: Polarization, kz: Complex64, kzm: Complex64, eps: Complex64) -> Result<Complex64> {
    let (num, den) = match pol {
        Polarization::TE => (kz - kzm, kz + kzm),
        Polarization::TM => (eps * kz - kzm, eps * kz + kzm),
    };
    if den.norm() == 0.0 {
        return Err(Error::numerics(format!(
            "fresnel denominator vanished ({pol:?}, kz = {kz}, kzm = {kzm})"
        )));
    }
    Ok(num / den)
}

/// Reflection and transmission amplitudes of a slab of thickness `delta`.
#[derive(Clone, Copy, Debug)]
pub struct SlabAmplitudes {
    pub rho: Complex64,
    pub tau: Complex64,
}

/// Scattering amplitudes of a homogeneous slab (vacuum on both sides):
///
/// rho = r (1 - e^{2 i kzm d}) / (1 - r^2 e^{2 i kzm d})
/// tau = (1 - r^2) e^{i (kzm - kz) d} / (1 - r^2 e^{2 i kzm d})
///
/// Takes the vacuum normal component `kz` (real for propagating waves,
/// `i kappa` for evanescent ones) rather than the in-plane `k`: recovering
/// `kz = sqrt(k0^2 - k^2)` from `k ~ k0` loses half the significand to
/// cancellation, which is fatal near the razor-thin guided-mode resonances
/// of a low-loss slab. The medium component is formed from `kz` the same
/// cancellation-free way, `kzm = sqrt((eps - 1) k0^2 + kz^2)`.
pub fn slab_scattering(
    pol: Polarization,
    omega: f64,
    kz: Complex64,
    eps: Complex64,
    delta: f64,
) -> Result<SlabAmplitudes> {
    if !(delta > 0.0) {
        return Err(Error::config(format!("slab thickness must be positive, got {delta}")));
    }
    let k02 = (omega / C) * (omega / C);
    let kzm = sqrt_upper((eps - Complex64::new(1.0, 0.0)) * k02 + kz * kz);
    let r = fresnel_reflection(pol, kz, kzm, eps)?;
    // e^{2 i kzm d}; Im kzm >= 0 keeps |phase| <= 1 so thick slabs underflow benignly
    let phase = (Complex64::new(0.0, 2.0 * delta) * kzm).exp();
    let den = Complex64::new(1.0, 0.0) - r * r * phase;
    if den.norm() < 1e-14 {
        return Err(Error::numerics(format!(
            "slab Fabry-Perot denominator degenerate ({pol:?}, omega = {omega:e}, kz = {kz})"
        )));
    }
    let rho = r * (Complex64::new(1.0, 0.0) - phase) / den;
    let tau = (Complex64::new(1.0, 0.0) - r * r) * (Complex64::new(0.0, delta) * (kzm - kz)).exp() / den;
    Ok(SlabAmplitudes { rho, tau })
}
