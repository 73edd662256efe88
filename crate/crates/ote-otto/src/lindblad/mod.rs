//! Lindblad master equation for small emitter networks: superoperator
//! assembly, steady states, propagation, and effective thermometry.

pub mod dynamics;
pub mod hamiltonian;
pub mod liouvillian;
pub mod system;
pub mod thermometry;

pub use dynamics::propagate;
pub use hamiltonian::{aux_lowering, composite_hamiltonian, lowering_q, AuxTransition};
pub use liouvillian::Liouvillian;
pub use system::{
    local_rates, t_env_at, CompositeSystem, DipoleOrientation, EmitterConfig, SteadyStateReport,
};
pub use thermometry::{emitter_temperature, partial_trace_aux, partial_trace_q};

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// Validated density matrix: square, Hermitian, unit trace, positive
/// semidefinite (all up to the stated tolerances).
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    m: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub const HERMITICITY_TOL: f64 = 1e-8;
    pub const TRACE_TOL: f64 = 1e-8;
    pub const PSD_TOL: f64 = 1e-8;

    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        let d = m.nrows();
        if d == 0 || m.ncols() != d {
            return Err(Error::numerics("density matrix must be square and nonempty"));
        }
        let herm_defect = (&m - m.adjoint()).norm();
        if herm_defect > Self::HERMITICITY_TOL * (1.0 + m.norm()) {
            return Err(Error::numerics(format!(
                "density matrix hermiticity defect {herm_defect:e} exceeds tolerance"
            )));
        }
        let trace = m.trace();
        if (trace.re - 1.0).abs() > Self::TRACE_TOL || trace.im.abs() > Self::TRACE_TOL {
            return Err(Error::numerics(format!(
                "density matrix trace {trace} differs from one"
            )));
        }
        let min_eig = crate::linalg::min_hermitian_eigenvalue(&m);
        if min_eig < -Self::PSD_TOL {
            return Err(Error::numerics(format!(
                "density matrix has negative eigenvalue {min_eig:e}"
            )));
        }
        Ok(DensityMatrix { m })
    }

    /// Diagonal state from populations (must sum to one within tolerance).
    pub fn from_populations(pops: &[f64]) -> Result<Self> {
        let d = pops.len();
        let mut m = DMatrix::from_element(d, d, Complex64::new(0.0, 0.0));
        for (i, &p) in pops.iter().enumerate() {
            m[(i, i)] = Complex64::new(p, 0.0);
        }
        Self::new(m)
    }

    /// Two-level thermal state diag(1 - p_e, p_e) at the given temperature.
    pub fn thermal_qubit(omega: f64, t: crate::em_env::EffectiveTemperature) -> Self {
        let p = t.excited_population(omega);
        let mut m = DMatrix::from_element(2, 2, Complex64::new(0.0, 0.0));
        m[(0, 0)] = Complex64::new(1.0 - p, 0.0);
        m[(1, 1)] = Complex64::new(p, 0.0);
        DensityMatrix { m }
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.m
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn population(&self, i: usize) -> f64 {
        self.m[(i, i)].re
    }

    /// Column-stacked vectorization.
    pub fn vectorize(&self) -> nalgebra::DVector<Complex64> {
        let d = self.dim();
        nalgebra::DVector::from_iterator(d * d, self.m.iter().cloned())
    }
}

/// One term gamma * [ L rho R^dagger - (1/2){R^dagger L, rho} ] of the
/// dissipator. Local terms have L == R and real non-negative gamma; cross
/// terms come in (i, j), (j, i) pairs with conjugate rates.
#[derive(Clone, Debug)]
pub struct LindbladTerm {
    pub left: DMatrix<Complex64>,
    pub right: DMatrix<Complex64>,
    pub rate: Complex64,
}

impl LindbladTerm {
    pub fn local(op: DMatrix<Complex64>, rate: f64) -> Result<Self> {
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(Error::numerics(format!(
                "local dissipator rate must be finite and non-negative, got {rate:e}"
            )));
        }
        Ok(LindbladTerm {
            left: op.clone(),
            right: op,
            rate: Complex64::new(rate, 0.0),
        })
    }

    pub fn cross(left: DMatrix<Complex64>, right: DMatrix<Complex64>, rate: Complex64) -> Result<Self> {
        if left.shape() != right.shape() {
            return Err(Error::numerics("cross dissipator operators must share a shape"));
        }
        if !rate.re.is_finite() || !rate.im.is_finite() {
            return Err(Error::numerics("cross dissipator rate must be finite"));
        }
        Ok(LindbladTerm { left, right, rate })
    }
}
