//! Adaptive Dormand-Prince 5(4) integrator on real state vectors.
//!
//! Standard embedded Runge-Kutta pair with FSAL (first-same-as-last): six
//! fresh derivative evaluations per accepted step. Step-size control uses the
//! usual mixed absolute/relative error norm and a fifth-root update with
//! conservative clamping. Complex systems are integrated through their real
//! embedding by the caller.

use crate::error::{Error, Result};
use nalgebra::DVector;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
// fifth-order solution weights (also the seventh-stage nodes)
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// embedded fourth-order weights
const E1: f64 = 5179.0 / 57600.0;
const E3: f64 = 7571.0 / 16695.0;
const E4: f64 = 393.0 / 640.0;
const E5: f64 = -92097.0 / 339200.0;
const E6: f64 = 187.0 / 2100.0;
const E7: f64 = 1.0 / 40.0;
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

#[derive(Clone, Copy, Debug)]
pub struct OdeOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Hard cap on accepted + rejected steps before giving up.
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions {
            rel_tol: 1e-9,
            abs_tol: 1e-9,
            max_steps: 1_000_000,
        }
    }
}

#[derive(Clone, Debug)]
pub struct OdeSolution {
    pub y: DVector<f64>,
    pub steps_accepted: usize,
    pub steps_rejected: usize,
}

/// Integrate dy/dt = f(t, y) from (t0, y0) to t1.
pub fn integrate_dp45<F>(
    mut f: F,
    t0: f64,
    t1: f64,
    y0: DVector<f64>,
    opts: &OdeOptions,
) -> Result<OdeSolution>
where
    F: FnMut(f64, &DVector<f64>) -> DVector<f64>,
{
    if !(t1.is_finite() && t0.is_finite()) {
        return Err(Error::numerics("ODE limits must be finite"));
    }
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(OdeSolution {
            y: y0,
            steps_accepted: 0,
            steps_rejected: 0,
        });
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    let mut h = 1e-3 * span; // refined immediately by the controller
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    let n = y.len();

    for _ in 0..opts.max_steps {
        if (t - t1) * dir >= 0.0 {
            return Ok(OdeSolution {
                y,
                steps_accepted: accepted,
                steps_rejected: rejected,
            });
        }
        if (t + h - t1) * dir > 0.0 {
            h = t1 - t;
        }
        if h.abs() < 1e-14 * span.abs() + f64::MIN_POSITIVE {
            return Err(Error::numerics(format!(
                "ODE step size underflow at t = {t:e} (stiff problem or tolerance too tight)"
            )));
        }

        let k2 = f(t + C2 * h, &(&y + &k1 * (A21 * h)));
        let k3 = f(t + C3 * h, &(&y + &k1 * (A31 * h) + &k2 * (A32 * h)));
        let k4 = f(
            t + C4 * h,
            &(&y + &k1 * (A41 * h) + &k2 * (A42 * h) + &k3 * (A43 * h)),
        );
        let k5 = f(
            t + C5 * h,
            &(&y + &k1 * (A51 * h) + &k2 * (A52 * h) + &k3 * (A53 * h) + &k4 * (A54 * h)),
        );
        let k6 = f(
            t + h,
            &(&y
                + &k1 * (A61 * h)
                + &k2 * (A62 * h)
                + &k3 * (A63 * h)
                + &k4 * (A64 * h)
                + &k5 * (A65 * h)),
        );
        let y_new = &y + &k1 * (B1 * h) + &k3 * (B3 * h) + &k4 * (B4 * h) + &k5 * (B5 * h) + &k6 * (B6 * h);
        let k7 = f(t + h, &y_new);
        let y_low = &y
            + &k1 * (E1 * h)
            + &k3 * (E3 * h)
            + &k4 * (E4 * h)
            + &k5 * (E5 * h)
            + &k6 * (E6 * h)
            + &k7 * (E7 * h);

        // scaled RMS error norm
        let mut err_sq = 0.0;
        for i in 0..n {
            let scale = opts.abs_tol + opts.rel_tol * y[i].abs().max(y_new[i].abs());
            let e = (y_new[i] - y_low[i]) / scale;
            err_sq += e * e;
        }
        let err = (err_sq / n as f64).sqrt();

        if err <= 1.0 {
            t += h;
            y = y_new;
            k1 = k7; // FSAL
            accepted += 1;
        } else {
            rejected += 1;
        }
        let factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        h *= factor;
    }
    Err(Error::numerics(format!(
        "ODE integrator exceeded {} steps (t reached {t:e} of {t1:e})",
        opts.max_steps
    )))
}
