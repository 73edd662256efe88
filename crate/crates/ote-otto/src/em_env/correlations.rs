//! Field correlation matrices of the slab + blackbody environment.
//!
//! The stationary field on the vacuum side of the slab splits into two
//! statistically independent pieces: radiation originating in the slab
//! (temperature T1) and environmental blackbody radiation (temperature T2),
//! the latter arriving directly, reflected, or transmitted through the slab.
//! Each piece contributes a dimensionless 3x3 matrix (`alpha1`, `alpha2`)
//! obtained from a plane-wave mode sum; the normalization is fixed so that
//! with no slab `alpha2` is the identity, which reproduces free-space
//! blackbody absorption/emission rates downstream.
//!
//! Per in-plane mode (k, p) with vacuum normal component kz:
//!
//! * slab piece, propagative sector: weight (1 - |rho|^2 - |tau|^2) / kz
//!   (Kirchhoff emission = absorption deficit);
//! * slab piece, evanescent sector: weight 2 Im(rho) e^{-kappa (z_i+z_j)} / kappa
//!   (near-field emission);
//! * environment piece (propagative only): the coherent superposition of the
//!   downward wave and its reflection, |d^- + rho d^+|^2 structure, plus the
//!   |tau|^2 transmitted upward wave.
//!
//! The polarization vectors are eps_TE = z x k_hat and
//! eps_TM^{phi} = (c/omega)(-phi kz k_hat + k z_hat), phi = +/- the
//! propagation direction along z. With these conventions a perfect mirror has
//! r_TE = -1, r_TM = +1 (tangential E vanishes at the surface).

use super::permittivity::PermittivityModel;
use super::scattering::{slab_scattering, Polarization};
use crate::constants::C;
use crate::error::{Error, Result};
use crate::quad::{integrate, Integrand, MatrixPair};
use nalgebra::Matrix3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Emitter position: in-plane offset [m] and height above the slab surface [m].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Position {
    pub r: [f64; 2],
    pub z: f64,
}

impl Position {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Position { r: [x, y], z }
    }
}

/// Slab geometry and temperature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlabGeometry {
    /// Thickness [m].
    pub thickness: f64,
    /// Slab temperature T1 [K].
    pub temperature: f64,
}

/// Controls for the mode-sum quadratures.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Relative tolerance on each correlation-matrix integral.
    pub rel_tolerance: f64,
    /// Interval-splitting budget per integral.
    pub max_subdivisions: usize,
    /// Evanescent cutoff multiplier M: the kappa integral stops at
    /// ~ M omega/c (extended automatically when the e^{-kappa(z_i+z_j)}
    /// decay has not died out by then, so the truncation stays controlled).
    pub evanescent_cutoff: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            rel_tolerance: 1e-6,
            // a few low-frequency points need well over 200 splits to pull
            // the evanescent front below tolerance
            max_subdivisions: 400,
            evanescent_cutoff: 200.0,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tolerance > 0.0 && self.rel_tolerance < 1.0) {
            return Err(Error::config("quadrature rel_tolerance must be in (0, 1)"));
        }
        if self.max_subdivisions < 8 {
            return Err(Error::config("quadrature max_subdivisions must be >= 8"));
        }
        if !(self.evanescent_cutoff > 1.0) {
            return Err(Error::config("quadrature evanescent_cutoff must be > 1"));
        }
        Ok(())
    }
}

/// The out-of-thermal-equilibrium environment: slab at T1 + blackbody at T2.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OteEnvironment {
    pub material: PermittivityModel,
    pub slab: SlabGeometry,
    /// Environmental blackbody temperature T2 [K].
    pub blackbody_temperature: f64,
    pub quadrature: QuadratureConfig,
}

impl OteEnvironment {
    pub fn validate(&self) -> Result<()> {
        self.material.validate()?;
        if !(self.slab.thickness > 0.0) {
            return Err(Error::config(format!(
                "slab thickness must be positive, got {}",
                self.slab.thickness
            )));
        }
        if !(self.slab.temperature > 0.0) {
            return Err(Error::config(format!(
                "slab temperature must be positive, got {}",
                self.slab.temperature
            )));
        }
        if !(self.blackbody_temperature > 0.0) {
            return Err(Error::config(format!(
                "blackbody temperature must be positive, got {}",
                self.blackbody_temperature
            )));
        }
        self.quadrature.validate()
    }
}

/// Dimensionless correlation matrices at one frequency and emitter pair.
#[derive(Clone, Debug)]
pub struct CorrelationMatrices {
    /// Slab (T1) contribution.
    pub alpha1: Matrix3<Complex64>,
    /// Environment (T2) contribution; identity in the no-slab limit.
    pub alpha2: Matrix3<Complex64>,
    pub omega: f64,
    pub pos_i: Position,
    pub pos_j: Position,
    /// Absolute quadrature error estimate (matrix Frobenius scale).
    pub quad_error: f64,
    /// Bound on the truncated evanescent tail, included in `quad_error`.
    pub tail_bound: f64,
}

/// Six scalar angular moments shared by every polarization product:
/// integrals over the in-plane angle phi of e^{i k . dr} times
/// {1, cos^2, sin^2, cos*sin, cos, sin} of phi.
#[derive(Clone, Debug)]
struct AngularMoments {
    one: Complex64,
    cc: Complex64,
    ss: Complex64,
    cs: Complex64,
    c: Complex64,
    s: Complex64,
}

impl Integrand for AngularMoments {
    fn zero() -> Self {
        let z = Complex64::new(0.0, 0.0);
        AngularMoments {
            one: z,
            cc: z,
            ss: z,
            cs: z,
            c: z,
            s: z,
        }
    }
    fn add_scaled(&mut self, other: &Self, w: f64) {
        self.one += other.one * w;
        self.cc += other.cc * w;
        self.ss += other.ss * w;
        self.cs += other.cs * w;
        self.c += other.c * w;
        self.s += other.s * w;
    }
    fn norm(&self) -> f64 {
        (self.one.norm_sqr()
            + self.cc.norm_sqr()
            + self.ss.norm_sqr()
            + self.cs.norm_sqr()
            + self.c.norm_sqr()
            + self.s.norm_sqr())
        .sqrt()
    }
}

impl AngularMoments {
    /// Closed form for coincident in-plane positions (k . dr = 0).
    fn coincident() -> Self {
        AngularMoments {
            one: Complex64::new(2.0 * PI, 0.0),
            cc: Complex64::new(PI, 0.0),
            ss: Complex64::new(PI, 0.0),
            cs: Complex64::new(0.0, 0.0),
            c: Complex64::new(0.0, 0.0),
            s: Complex64::new(0.0, 0.0),
        }
    }

    fn compute(k: f64, dr: [f64; 2], quad: &QuadratureConfig) -> Result<Self> {
        let sep = dr[0].hypot(dr[1]);
        if k * sep == 0.0 {
            return Ok(Self::coincident());
        }
        let phi0 = dr[1].atan2(dr[0]);
        let xi = k * sep;
        let r = integrate(
            |phi: f64| {
                let e = Complex64::new(0.0, xi * (phi - phi0).cos()).exp();
                let (sn, cn) = phi.sin_cos();
                AngularMoments {
                    one: e,
                    cc: e * (cn * cn),
                    ss: e * (sn * sn),
                    cs: e * (cn * sn),
                    c: e * cn,
                    s: e * sn,
                }
            },
            0.0,
            2.0 * PI,
            quad.rel_tolerance * 0.25,
            1e-14,
            quad.max_subdivisions,
        )?;
        Ok(r.value)
    }
}

/// Outer product matrix X^{mu nu} = eps_p^mu (eps_p^nu)^dagger integrated over
/// the angle with the e^{i k . dr} factor, assembled from the scalar moments.
///
/// `kz` enters TM polarization vectors; the second (nu) vector is conjugated.
fn pol_outer(
    pol: Polarization,
    mu: f64,
    nu: f64,
    k: f64,
    kz: Complex64,
    omega: f64,
    m: &AngularMoments,
) -> Matrix3<Complex64> {
    let mut x = Matrix3::zeros();
    match pol {
        Polarization::TE => {
            // eps_TE = (-sin, cos, 0), direction-independent
            x[(0, 0)] = m.ss;
            x[(0, 1)] = -m.cs;
            x[(1, 0)] = -m.cs;
            x[(1, 1)] = m.cc;
        }
        Polarization::TM => {
            // eps_TM^mu = (c/omega)(-mu kz cos, -mu kz sin, k)
            let s = C / omega;
            let s2 = s * s;
            let kz2 = (kz * kz.conj()).re; // |kz|^2
            x[(0, 0)] = m.cc * (mu * nu * kz2 * s2);
            x[(1, 1)] = m.ss * (mu * nu * kz2 * s2);
            x[(0, 1)] = m.cs * (mu * nu * kz2 * s2);
            x[(1, 0)] = x[(0, 1)];
            x[(2, 2)] = m.one * (k * k * s2);
            let kzc = kz * Complex64::new(mu * k * s2, 0.0);
            // (i,z): -mu kz k ; (z,j): -nu kz^* k
            x[(0, 2)] = -m.c * kzc;
            x[(1, 2)] = -m.s * kzc;
            let kzcc = kz.conj() * Complex64::new(nu * k * s2, 0.0);
            x[(2, 0)] = -m.c * kzcc;
            x[(2, 1)] = -m.s * kzcc;
        }
    }
    x
}

/// Compute the (alpha1, alpha2) pair for one frequency and position pair.
pub fn correlation_matrices(
    env: &OteEnvironment,
    omega: f64,
    pos_i: Position,
    pos_j: Position,
) -> Result<CorrelationMatrices> {
    env.validate()?;
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::config(format!(
            "correlation matrices requested at invalid frequency {omega}"
        )));
    }
    if !(pos_i.z > 0.0 && pos_j.z > 0.0) {
        return Err(Error::config(
            "emitter positions must be strictly above the slab (z > 0)",
        ));
    }
    let quad = env.quadrature;
    let eps = env.material.permittivity(omega)?;
    let delta = env.slab.thickness;
    let k0 = omega / C;
    let dr = [pos_i.r[0] - pos_j.r[0], pos_i.r[1] - pos_j.r[1]];
    let dz = pos_i.z - pos_j.z;
    let zsum = pos_i.z + pos_j.z;

    // ---- propagative sector: k = k0 sin(theta), measure k dk / kz = k0 sin(theta) d(theta)
    let mut inner_err: Option<Error> = None;
    let prop = integrate(
        |theta: f64| {
            let (sn, cn) = theta.sin_cos();
            let k = k0 * sn;
            let kz = k0 * cn;
            let kzc = Complex64::new(kz, 0.0);
            let moments = match AngularMoments::compute(k, dr, &quad) {
                Ok(m) => m,
                Err(e) => {
                    inner_err.get_or_insert(e);
                    return MatrixPair::zero();
                }
            };
            let ph_up = Complex64::new(0.0, kz * dz).exp(); // e^{+i kz (zi - zj)}
            let ph_dn = ph_up.conj();
            let ph_sum = Complex64::new(0.0, kz * zsum).exp(); // e^{+i kz (zi + zj)}
            let mut a1 = Matrix3::zeros();
            let mut a2 = Matrix3::zeros();
            for pol in [Polarization::TE, Polarization::TM] {
                let s = match slab_scattering(pol, omega, kzc, eps, delta) {
                    Ok(s) => s,
                    Err(e) => {
                        inner_err.get_or_insert(e);
                        return MatrixPair::zero();
                    }
                };
                let xpp = pol_outer(pol, 1.0, 1.0, k, kzc, omega, &moments);
                let xmm = pol_outer(pol, -1.0, -1.0, k, kzc, omega, &moments);
                let xpm = pol_outer(pol, 1.0, -1.0, k, kzc, omega, &moments);
                let xmp = pol_outer(pol, -1.0, 1.0, k, kzc, omega, &moments);
                let emissivity = 1.0 - s.rho.norm_sqr() - s.tau.norm_sqr();
                a1 += xpp * (ph_up * emissivity);
                a2 += xmm * ph_dn
                    + xpp * (ph_up * (s.rho.norm_sqr() + s.tau.norm_sqr()))
                    + xpm * (ph_sum * s.rho)
                    + xmp * (ph_sum.conj() * s.rho.conj());
            }
            let w = Complex64::new(k0 * sn, 0.0);
            MatrixPair { a: a1 * w, b: a2 * w }
        },
        0.0,
        PI / 2.0,
        quad.rel_tolerance,
        1e-13,
        quad.max_subdivisions,
    )?;
    if let Some(e) = inner_err {
        return Err(e);
    }

    // ---- evanescent sector: kappa in (0, kappa_cut], measure k dk / kappa = d(kappa)
    // Default cutoff ~ M k0; extended so e^{-kappa zsum} has decayed by the cut.
    let kappa_m = (quad.evanescent_cutoff * quad.evanescent_cutoff - 1.0).max(0.0).sqrt() * k0;
    let kappa_cut = kappa_m.max(45.0 / zsum);
    let mut inner_err: Option<Error> = None;
    let ew_kernel = |kappa: f64, err_slot: &mut Option<Error>| -> Matrix3<Complex64> {
        if kappa == 0.0 {
            return Matrix3::zeros();
        }
        let k = k0.hypot(kappa);
        let kz = Complex64::new(0.0, kappa);
        let moments = match AngularMoments::compute(k, dr, &quad) {
            Ok(m) => m,
            Err(e) => {
                err_slot.get_or_insert(e);
                return Matrix3::zeros();
            }
        };
        let mut a1 = Matrix3::zeros();
        for pol in [Polarization::TE, Polarization::TM] {
            let s = match slab_scattering(pol, omega, kz, eps, delta) {
                Ok(s) => s,
                Err(e) => {
                    err_slot.get_or_insert(e);
                    return Matrix3::zeros();
                }
            };
            let xpp = pol_outer(pol, 1.0, 1.0, k, kz, omega, &moments);
            a1 += xpp * Complex64::new(2.0 * s.rho.im, 0.0);
        }
        a1 * Complex64::new((-kappa * zsum).exp(), 0.0)
    };
    let evan = integrate(
        |kappa: f64| ew_kernel(kappa, &mut inner_err),
        0.0,
        kappa_cut,
        quad.rel_tolerance,
        1e-13,
        quad.max_subdivisions,
    )?;
    if let Some(e) = inner_err {
        return Err(e);
    }
    // exponential-decay remainder bound for the truncated tail
    let mut tail_slot = None;
    let tail_bound = ew_kernel(kappa_cut, &mut tail_slot).norm() / zsum;

    // overall prefactor: (3 pi c / 2 omega) / (2 pi)^2
    let pref = 3.0 * C / (8.0 * PI * omega);
    let alpha1 = (prop.value.a + evan.value) * Complex64::new(pref, 0.0);
    let alpha2 = prop.value.b * Complex64::new(pref, 0.0);
    Ok(CorrelationMatrices {
        alpha1,
        alpha2,
        omega,
        pos_i,
        pos_j,
        quad_error: (prop.error + evan.error) * pref + tail_bound * pref,
        tail_bound: tail_bound * pref,
    })
}
