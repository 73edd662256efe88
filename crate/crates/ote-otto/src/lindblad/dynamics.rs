//! Time evolution under a fixed generator.

use super::{DensityMatrix, Liouvillian};
use crate::error::{Error, Result};
use crate::linalg::embed_real;
use crate::ode::{integrate_dp45, OdeOptions, OdeSolution};
use nalgebra::DVector;
use num_complex::Complex64;

/// Propagate rho0 for a duration t >= 0 under the (time-independent)
/// generator, by adaptive integration of the real embedding of
/// d vec(rho)/dt = L vec(rho).
///
/// The trace is monitored, never renormalized: drift beyond 1e-8 aborts with
/// an error, since it signals integrator tolerances too loose for the
/// requested duration (or a non-trace-preserving generator, which `build`
/// would already have refused).
pub fn propagate(
    l: &Liouvillian,
    rho0: &DensityMatrix,
    t: f64,
    opts: &OdeOptions,
) -> Result<DensityMatrix> {
    if rho0.dim() != l.dim() {
        return Err(Error::numerics(format!(
            "state dimension {} does not match generator dimension {}",
            rho0.dim(),
            l.dim()
        )));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::config(format!(
            "propagation time must be finite and non-negative, got {t:e}"
        )));
    }
    let d = l.dim();
    let d2 = d * d;
    let e = embed_real(l.matrix());
    let v0 = rho0.vectorize();
    let mut y0 = DVector::zeros(2 * d2);
    for k in 0..d2 {
        y0[k] = v0[k].re;
        y0[k + d2] = v0[k].im;
    }
    let OdeSolution { y, .. } = integrate_dp45(|_t, y| &e * y, 0.0, t, y0, opts)?;
    let v = DVector::from_fn(d2, |k, _| Complex64::new(y[k], y[k + d2]));
    let rho = nalgebra::DMatrix::from_iterator(d, d, v.iter().cloned());
    let trace = rho.trace();
    let drift = ((trace.re - 1.0).powi(2) + trace.im.powi(2)).sqrt();
    if drift > 1e-8 {
        return Err(Error::numerics(format!(
            "trace drifted by {drift:e} during propagation; tighten integrator tolerances"
        )));
    }
    DensityMatrix::new(rho)
}
