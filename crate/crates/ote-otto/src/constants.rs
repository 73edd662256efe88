//! Physical constants (SI, CODATA 2018).

/// Reduced Planck constant [J s].
pub const HBAR: f64 = 1.054_571_817e-34;
/// Boltzmann constant [J/K].
pub const KB: f64 = 1.380_649e-23;
/// Speed of light in vacuum [m/s].
pub const C: f64 = 299_792_458.0;
/// Vacuum permittivity [F/m].
pub const EPS0: f64 = 8.854_187_812_8e-12;

/// Free-space emission rate per squared dipole moment, `omega^3 / (3 pi hbar eps0 c^3)`.
///
/// Multiplying by |d|^2 (in (C m)^2) gives the vacuum spontaneous-emission
/// rate of a two-level dipole at transition frequency `omega`.
pub fn gamma0(omega: f64) -> f64 {
    omega * omega * omega / (3.0 * std::f64::consts::PI * HBAR * EPS0 * C * C * C)
}

/// Thermal photon number `n(omega, T) = 1 / (exp(hbar omega / kB T) - 1)`.
///
/// Uses `exp_m1` so small arguments stay accurate; `T = 0` gives 0.
pub fn photon_number(omega: f64, temperature: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    let x = HBAR * omega / (KB * temperature);
    1.0 / x.exp_m1()
}
