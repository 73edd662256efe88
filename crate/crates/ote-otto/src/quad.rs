//! Adaptive Gauss–Kronrod quadrature (G7/K15) for scalar and small-matrix
//! integrands.
//!
//! The driver bisects the worst interval until the accumulated Kronrod error
//! estimate drops below `rel_tol * |integral|` (with an absolute floor for
//! integrals that are genuinely zero). Everything is deterministic: same
//! integrand, same subdivisions, same result.

use crate::error::{Error, Result};
use nalgebra::Matrix3;
use num_complex::Complex64;

/// QUADPACK G7K15 abscissae on [-1, 1] (positive half; rule is symmetric).
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
/// 15-point Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
/// 7-point Gauss weights for the odd-index abscissae of `XGK`.
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

/// Values an integrand may return: a vector space over f64 with a norm.
pub trait Integrand: Clone {
    fn zero() -> Self;
    fn add_scaled(&mut self, other: &Self, w: f64);
    fn norm(&self) -> f64;
}

impl Integrand for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add_scaled(&mut self, other: &Self, w: f64) {
        *self += other * w;
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add_scaled(&mut self, other: &Self, w: f64) {
        *self += other * w;
    }
    fn norm(&self) -> f64 {
        num_complex::ComplexFloat::abs(*self)
    }
}

impl Integrand for Matrix3<Complex64> {
    fn zero() -> Self {
        Matrix3::zeros()
    }
    fn add_scaled(&mut self, other: &Self, w: f64) {
        *self += other * Complex64::new(w, 0.0);
    }
    fn norm(&self) -> f64 {
        self.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Pair of 3x3 matrices integrated together (slab and environment kernels
/// share every scattering-amplitude evaluation).
#[derive(Clone, Debug)]
pub struct MatrixPair {
    pub a: Matrix3<Complex64>,
    pub b: Matrix3<Complex64>,
}

impl Integrand for MatrixPair {
    fn zero() -> Self {
        MatrixPair {
            a: Matrix3::zeros(),
            b: Matrix3::zeros(),
        }
    }
    fn add_scaled(&mut self, other: &Self, w: f64) {
        self.a.add_scaled(&other.a, w);
        self.b.add_scaled(&other.b, w);
    }
    fn norm(&self) -> f64 {
        self.a.norm().hypot(self.b.norm())
    }
}

/// One G7K15 evaluation on [a, b]: returns (K15 value, |K15 - G7| error estimate).
fn kronrod_15<T: Integrand>(f: &mut impl FnMut(f64) -> T, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut k15 = T::zero();
    let mut g7 = T::zero();
    for i in 0..8 {
        if i == 7 {
            let v = f(c);
            k15.add_scaled(&v, WGK[7] * h);
            g7.add_scaled(&v, WG[3] * h);
        } else {
            let vp = f(c + h * XGK[i]);
            let vm = f(c - h * XGK[i]);
            k15.add_scaled(&vp, WGK[i] * h);
            k15.add_scaled(&vm, WGK[i] * h);
            if i % 2 == 1 {
                let wg = WG[i / 2];
                g7.add_scaled(&vp, wg * h);
                g7.add_scaled(&vm, wg * h);
            }
        }
    }
    let mut diff = k15.clone();
    diff.add_scaled(&g7, -1.0);
    (k15, diff.norm())
}

/// Result of an adaptive integration.
#[derive(Clone, Debug)]
pub struct QuadResult<T> {
    pub value: T,
    /// Absolute error estimate (sum of per-interval Kronrod estimates).
    pub error: f64,
    pub subdivisions: usize,
}

/// Adaptively integrate `f` over [a, b] to relative tolerance `rel_tol`.
///
/// `abs_floor` stops refinement once the absolute error estimate is below it,
/// protecting integrals whose true value is (near) zero. Exceeding
/// `max_subdivisions` before convergence is an error.
pub fn integrate<T: Integrand>(
    mut f: impl FnMut(f64) -> T,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_floor: f64,
    max_subdivisions: usize,
) -> Result<QuadResult<T>> {
    if !(b > a) {
        return Err(Error::numerics(format!(
            "quadrature interval is empty or inverted: [{a}, {b}]"
        )));
    }
    struct Seg<T> {
        a: f64,
        b: f64,
        value: T,
        error: f64,
    }
    let (v0, e0) = kronrod_15(&mut f, a, b);
    let mut segs = vec![Seg {
        a,
        b,
        value: v0,
        error: e0,
    }];
    let mut n_splits = 0usize;
    loop {
        let mut total = T::zero();
        let mut err = 0.0;
        for s in &segs {
            total.add_scaled(&s.value, 1.0);
            err += s.error;
        }
        let target = (rel_tol * total.norm()).max(abs_floor);
        if err <= target {
            return Ok(QuadResult {
                value: total,
                error: err,
                subdivisions: n_splits,
            });
        }
        if n_splits >= max_subdivisions {
            let mut ranked: Vec<(f64, f64, f64)> =
                segs.iter().map(|s| (s.a, s.b, s.error)).collect();
            ranked.sort_by(|x, y| y.2.total_cmp(&x.2));
            let top: Vec<String> = ranked
                .iter()
                .take(4)
                .map(|(a, b, e)| format!("[{a:.9e}, {b:.9e}] err {e:.3e}"))
                .collect();
            return Err(Error::numerics(format!(
                "quadrature over [{a:e}, {b:e}] failed to converge: error estimate {err:.3e} > \
                 target {target:.3e} after {n_splits} subdivisions ({} segments); worst: {}",
                segs.len(),
                top.join(", ")
            )));
        }
        // split the interval with the largest error estimate
        let worst = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .unwrap();
        let Seg { a: sa, b: sb, .. } = segs[worst];
        let mid = 0.5 * (sa + sb);
        if mid <= sa || mid >= sb {
            return Err(Error::numerics(format!(
                "quadrature interval [{sa}, {sb}] cannot be split further (error {:.3e})",
                segs[worst].error
            )));
        }
        let (vl, el) = kronrod_15(&mut f, sa, mid);
        let (vr, er) = kronrod_15(&mut f, mid, sb);
        segs[worst] = Seg {
            a: sa,
            b: mid,
            value: vl,
            error: el,
        };
        segs.push(Seg {
            a: mid,
            b: sb,
            value: vr,
            error: er,
        });
        n_splits += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_is_exact() {
        // K15 integrates degree <= 22 exactly
        let r = integrate(|x: f64| x.powi(8) - 3.0 * x.powi(3) + 1.0, 0.0, 2.0, 1e-12, 0.0, 10)
            .unwrap();
        let exact = 2f64.powi(9) / 9.0 - 3.0 * 2f64.powi(4) / 4.0 + 2.0;
        assert_relative_eq!(r.value, exact, max_relative = 1e-14);
    }

    #[test]
    fn oscillatory_integrand() {
        // int_0^{10 pi} sin(x) dx = 0 ; needs the abs_floor to stop
        let r = integrate(|x: f64| x.sin(), 0.0, 10.0 * PI, 1e-10, 1e-12, 200).unwrap();
        assert!(r.value.abs() < 1e-11, "got {}", r.value);
        // int_0^1 cos(50 x) dx = sin(50)/50
        let r = integrate(|x: f64| (50.0 * x).cos(), 0.0, 1.0, 1e-12, 0.0, 200).unwrap();
        assert_relative_eq!(r.value, 50f64.sin() / 50.0, max_relative = 1e-10);
    }

    #[test]
    fn sharply_peaked_integrand() {
        // Lorentzian of width 1e-4 centered mid-interval: int = atan spans ~ pi
        let w = 1e-4;
        let r = integrate(
            |x: f64| w / ((x - 0.3) * (x - 0.3) + w * w),
            0.0,
            1.0,
            1e-10,
            0.0,
            500,
        )
        .unwrap();
        let exact = ((1.0 - 0.3) / w).atan() + (0.3f64 / w).atan();
        assert_relative_eq!(r.value, exact, max_relative = 1e-9);
        assert!(r.error <= 1e-9 * exact.abs() * 10.0);
    }

    #[test]
    fn exponential_tail() {
        // int_0^50 e^{-x} dx
        let r = integrate(|x: f64| (-x).exp(), 0.0, 50.0, 1e-12, 0.0, 200).unwrap();
        assert_relative_eq!(r.value, 1.0 - (-50f64).exp(), max_relative = 1e-12);
    }

    #[test]
    fn complex_integrand() {
        // int_0^1 e^{i a x} dx = (e^{ia} - 1)/(ia)
        let a = 7.0;
        let r = integrate(
            |x: f64| Complex64::new(0.0, a * x).exp(),
            0.0,
            1.0,
            1e-12,
            0.0,
            100,
        )
        .unwrap();
        let exact = (Complex64::new(0.0, a).exp() - 1.0) / Complex64::new(0.0, a);
        assert!((r.value - exact).norm() < 1e-12);
    }

    #[test]
    fn non_convergence_reports_error() {
        // |x-0.37|^{-0.9} is integrable but slow; tiny budget must fail loudly
        let r = integrate(
            |x: f64| (x - 0.37f64).abs().powf(-0.9),
            0.0,
            1.0,
            1e-12,
            0.0,
            3,
        );
        assert!(r.is_err());
    }

    #[test]
    fn error_estimate_covers_tolerance_halving() {
        let f = |x: f64| (3.0 * x).sin() * (-x).exp() + 1.0 / (1.0 + x * x);
        let loose = integrate(f, 0.0, 4.0, 1e-6, 0.0, 400).unwrap();
        let tight = integrate(f, 0.0, 4.0, 5e-7, 0.0, 400).unwrap();
        assert!((loose.value - tight.value).abs() <= loose.error + tight.error);
    }
}
