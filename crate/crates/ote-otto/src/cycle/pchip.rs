//! Monotone piecewise-cubic Hermite interpolation (Fritsch-Carlson slopes).
//!
//! Used for the stroke rate tables: monotonicity matters because an
//! overshooting interpolant could turn a positive emission rate negative
//! between nodes, which an ODE right-hand side must never see.

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    slope: Vec<f64>,
}

impl Pchip {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return Err(Error::numerics(
                "interpolation needs >= 2 nodes and matching lengths",
            ));
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::numerics("interpolation nodes must strictly increase"));
        }
        if x.iter().chain(y.iter()).any(|v| !v.is_finite()) {
            return Err(Error::numerics("interpolation data must be finite"));
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let delta: Vec<f64> = (0..n - 1).map(|i| (y[i + 1] - y[i]) / h[i]).collect();
        let mut slope = vec![0.0; n];
        for i in 1..n - 1 {
            let (d0, d1) = (delta[i - 1], delta[i]);
            if d0 * d1 <= 0.0 {
                slope[i] = 0.0; // local extremum: flat tangent
            } else {
                // weighted harmonic mean keeps the interpolant monotone
                let w1 = 2.0 * h[i] + h[i - 1];
                let w2 = h[i] + 2.0 * h[i - 1];
                slope[i] = (w1 + w2) / (w1 / d0 + w2 / d1);
            }
        }
        slope[0] = endpoint_slope(h[0], h.get(1).copied(), delta[0], delta.get(1).copied());
        slope[n - 1] = endpoint_slope(
            h[n - 2],
            (n >= 3).then(|| h[n - 3]),
            delta[n - 2],
            (n >= 3).then(|| delta[n - 3]),
        );
        Ok(Pchip { x, y, slope })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.x[0], *self.x.last().unwrap())
    }

    /// Evaluate at `t`, which must lie inside the node range (a small
    /// tolerance of rounding slack is clamped at the ends).
    pub fn eval(&self, t: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        let slack = 1e-12 * (hi - lo);
        if t < lo - slack || t > hi + slack {
            return Err(Error::numerics(format!(
                "interpolation query {t:e} outside node range [{lo:e}, {hi:e}]"
            )));
        }
        let t = t.clamp(lo, hi);
        // index of the interval containing t
        let idx = match self.x.binary_search_by(|v| v.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(self.x.len() - 2),
            Err(i) => i.saturating_sub(1).min(self.x.len() - 2),
        };
        let h = self.x[idx + 1] - self.x[idx];
        let s = (t - self.x[idx]) / h;
        let (y0, y1) = (self.y[idx], self.y[idx + 1]);
        let (m0, m1) = (self.slope[idx] * h, self.slope[idx + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        Ok(y0 * (2.0 * s3 - 3.0 * s2 + 1.0)
            + m0 * (s3 - 2.0 * s2 + s)
            + y1 * (-2.0 * s3 + 3.0 * s2)
            + m1 * (s3 - s2))
    }
}

/// Three-point one-sided endpoint slope with the Fritsch-Carlson
/// monotonicity clamps; falls back to the secant for two-node data.
fn endpoint_slope(h0: f64, h1: Option<f64>, d0: f64, d1: Option<f64>) -> f64 {
    let (h1, d1) = match (h1, d1) {
        (Some(h), Some(d)) => (h, d),
        _ => return d0,
    };
    let s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if s * d0 <= 0.0 {
        0.0
    } else if d0 * d1 < 0.0 && s.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        s
    }
}
