#![allow(dead_code)]
//! Shared oracles for the integration suites: a standalone matrix
//! exponential (independent of the crate's integrators) and the trace
//! distance used to compare density matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Matrix exponential by scaling-and-squaring with the [13/13] Padé
/// approximant (Higham's coefficients). Deliberately independent of the
/// crate's ODE machinery so propagation tests have a second opinion.
pub fn expm(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    const B: [f64; 14] = [
        64_764_752_532_480_000.0,
        32_382_376_266_240_000.0,
        7_771_770_303_897_600.0,
        1_187_353_796_428_800.0,
        129_060_195_264_000.0,
        10_559_470_521_600.0,
        670_442_572_800.0,
        33_522_128_640.0,
        1_323_241_920.0,
        40_840_800.0,
        960_960.0,
        16_380.0,
        182.0,
        1.0,
    ];
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "expm needs a square matrix");
    let norm1 = (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let theta13 = 5.371_920_351_148_152;
    let s = if norm1 > theta13 {
        (norm1 / theta13).log2().ceil() as i32
    } else {
        0
    };
    let a = a * Complex64::new(0.5_f64.powi(s), 0.0);
    let id = DMatrix::<Complex64>::identity(n, n);
    let c = |k: usize| Complex64::new(B[k], 0.0);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a2 * &a4;
    let u = &a
        * &(&a6 * &(&a6 * c(13) + &a4 * c(11) + &a2 * c(9))
            + &a6 * c(7)
            + &a4 * c(5)
            + &a2 * c(3)
            + &id * c(1));
    let v = &a6 * &(&a6 * c(12) + &a4 * c(10) + &a2 * c(8))
        + &a6 * c(6)
        + &a4 * c(4)
        + &a2 * c(2)
        + &id * c(0);
    let p = &v + &u;
    let q = &v - &u;
    let mut r = q.lu().solve(&p).expect("Padé denominator invertible");
    for _ in 0..s {
        r = &r * &r;
    }
    r
}

/// Trace distance (1/2) ||a - b||_1 for Hermitian matrices.
pub fn trace_distance(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    let d = a - b;
    ote_otto::linalg::hermitian_eigenvalues(&d)
        .iter()
        .map(|x| x.abs())
        .sum::<f64>()
        * 0.5
}
