//! Operators and Hamiltonian of the working-fluid + auxiliary-emitter pair.
//!
//! Composite basis |q, m> with q in {g, e} (two-level working fluid) and
//! m in {0, 1, 2} (three-level auxiliary), flattened as index 3 q + m:
//! (g0, g1, g2, e0, e1, e2).
//!
//! Level frequencies: working fluid (0, omega_a); auxiliary
//! (0, omega_s - omega_a, omega_s), so the auxiliary 1<->2 gap is exactly
//! omega_a (resonant with the working fluid) and 0<->2 is the strong
//! surface-resonance transition at omega_s.

use crate::constants::HBAR;
use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// The three transitions of the auxiliary emitter, named by level pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AuxTransition {
    /// |0> <-> |2| at omega_s.
    Aux02,
    /// |1> <-> |2| at omega_a (resonant with the working fluid).
    Aux12,
    /// |0> <-> |1| at omega_s - omega_a.
    Aux01,
}

impl AuxTransition {
    pub fn frequency(&self, omega_a: f64, omega_s: f64) -> f64 {
        match self {
            AuxTransition::Aux02 => omega_s,
            AuxTransition::Aux12 => omega_a,
            AuxTransition::Aux01 => omega_s - omega_a,
        }
    }

    fn levels(&self) -> (usize, usize) {
        match self {
            AuxTransition::Aux02 => (0, 2),
            AuxTransition::Aux12 => (1, 2),
            AuxTransition::Aux01 => (0, 1),
        }
    }
}

fn zeros6() -> DMatrix<Complex64> {
    DMatrix::from_element(6, 6, Complex64::new(0.0, 0.0))
}

/// Working-fluid lowering operator |g><e| (x) I_3.
pub fn lowering_q() -> DMatrix<Complex64> {
    let mut m = zeros6();
    for aux in 0..3 {
        m[(aux, 3 + aux)] = Complex64::new(1.0, 0.0);
    }
    m
}

/// Auxiliary lowering operator I_2 (x) |lo><hi| for the given transition.
pub fn aux_lowering(t: AuxTransition) -> DMatrix<Complex64> {
    let (lo, hi) = t.levels();
    let mut m = zeros6();
    for q in 0..2 {
        m[(3 * q + lo, 3 * q + hi)] = Complex64::new(1.0, 0.0);
    }
    m
}

/// Free and interaction parts of the composite Hamiltonian [J].
///
/// The |e,1> and |g,2> levels are exactly degenerate at hbar omega_s by
/// construction (the composite diagonal is assembled directly rather than as
/// a floating-point sum of subsystem energies), so the free evolution
/// commutes exactly with any state supported on populations plus that
/// degenerate coherence -- which is what makes the rotating-frame steady
/// state also a lab-frame steady state to machine precision.
pub fn composite_hamiltonian(
    omega_a: f64,
    omega_s: f64,
    lambda: f64,
) -> Result<(DMatrix<Complex64>, DMatrix<Complex64>)> {
    if !(omega_a > 0.0) || !omega_a.is_finite() {
        return Err(Error::config(format!(
            "working-fluid frequency must be positive, got {omega_a:e}"
        )));
    }
    if !(omega_s > omega_a) || !omega_s.is_finite() {
        return Err(Error::config(format!(
            "upper transition frequency {omega_s:e} must exceed the working-fluid frequency {omega_a:e}"
        )));
    }
    if !lambda.is_finite() {
        return Err(Error::config("coherent coupling must be finite"));
    }
    // (g0, g1, g2, e0, e1, e2): e1 and g2 share hbar omega_s exactly
    let freqs = [
        0.0,
        omega_s - omega_a,
        omega_s,
        omega_a,
        omega_s,
        omega_s + omega_a,
    ];
    let mut free = zeros6();
    for (i, f) in freqs.iter().enumerate() {
        free[(i, i)] = Complex64::new(HBAR * f, 0.0);
    }
    // hbar Lambda (sigma_q^- A12^+ + A12^- sigma_q^+): swaps |e,1> <-> |g,2>
    let sq = lowering_q();
    let a12 = aux_lowering(AuxTransition::Aux12);
    let mut int = &sq * a12.adjoint();
    int += int.adjoint();
    let int = int * Complex64::new(HBAR * lambda, 0.0);
    Ok((free, int))
}
