//! Superoperator assembly (column-stacking convention) and steady states.

use super::{DensityMatrix, LindbladTerm};
use crate::constants::HBAR;
use crate::error::{Error, Result};
use crate::linalg::kernel_basis;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Matrix form of the generator: d vec(rho)/dt = L vec(rho), with vec
/// stacking columns, so vec(A X B) = (B^T kron A) vec(X).
#[derive(Clone, Debug)]
pub struct Liouvillian {
    matrix: DMatrix<Complex64>,
    dim: usize,
}

impl Liouvillian {
    /// Build from an optional Hamiltonian [J] and dissipator terms [1/s].
    ///
    /// Trace preservation (the all-ones left eigenvector of the generator) is
    /// verified at build time; a violation means inconsistent terms.
    pub fn build(hamiltonian: Option<&DMatrix<Complex64>>, terms: &[LindbladTerm], dim: usize) -> Result<Self> {
        let d2 = dim * dim;
        let mut l = DMatrix::from_element(d2, d2, Complex64::new(0.0, 0.0));
        let id = DMatrix::<Complex64>::identity(dim, dim);

        if let Some(h) = hamiltonian {
            if h.shape() != (dim, dim) {
                return Err(Error::numerics("hamiltonian dimension mismatch"));
            }
            let herm = (h - h.adjoint()).norm();
            if herm > 1e-12 * (1.0 + h.norm()) {
                return Err(Error::numerics(format!(
                    "hamiltonian hermiticity defect {herm:e}"
                )));
            }
            let scale = Complex64::new(0.0, -1.0 / HBAR);
            l += (id.kronecker(h) - h.transpose().kronecker(&id)) * scale;
        }

        for term in terms {
            if term.left.shape() != (dim, dim) {
                return Err(Error::numerics("dissipator operator dimension mismatch"));
            }
            let rdl = term.right.adjoint() * &term.left;
            let sandwich = term.right.conjugate().kronecker(&term.left);
            let anti = id.kronecker(&rdl) + rdl.transpose().kronecker(&id);
            l += (sandwich - anti * Complex64::new(0.5, 0.0)) * term.rate;
        }

        // trace preservation: sum of rows picking diagonal entries must vanish
        let mut defect = 0.0_f64;
        for col in 0..d2 {
            let mut s = Complex64::new(0.0, 0.0);
            for i in 0..dim {
                s += l[(i * dim + i, col)];
            }
            defect = defect.max(s.norm());
        }
        let scale = l.norm().max(1.0);
        if defect > 1e-12 * scale {
            return Err(Error::numerics(format!(
                "liouvillian trace defect {defect:e} (scale {scale:e})"
            )));
        }

        Ok(Liouvillian { matrix: l, dim })
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// Apply the generator to a density operator (matrix in, matrix out).
    pub fn apply(&self, rho: &DMatrix<Complex64>) -> DMatrix<Complex64> {
        let d = self.dim;
        let v = DVector::from_iterator(d * d, rho.iter().cloned());
        let w = &self.matrix * v;
        DMatrix::from_iterator(d, d, w.iter().cloned())
    }

    /// Unique steady state from the numerical kernel.
    ///
    /// Errors when the kernel is empty at the given relative tolerance (no
    /// steady state resolved) or has dimension > 1 (degenerate; the caller
    /// must break the degeneracy physically, not by picking a vector).
    pub fn steady_state(&self, rel_tol: f64) -> Result<DensityMatrix> {
        let basis = kernel_basis(&self.matrix, rel_tol)?;
        match basis.len() {
            0 => Err(Error::numerics(
                "liouvillian kernel empty: no steady state at this tolerance",
            )),
            1 => {
                let d = self.dim;
                let v = &basis[0];
                let raw = DMatrix::from_iterator(d, d, v.iter().cloned());
                // kernel vector has arbitrary phase/scale: hermitize, renormalize
                let herm = (&raw + raw.adjoint()) * Complex64::new(0.5, 0.0);
                let tr = herm.trace();
                if tr.norm() < 1e-12 {
                    return Err(Error::numerics(
                        "steady-state candidate is traceless; kernel is unphysical",
                    ));
                }
                let rho = herm / tr;
                DensityMatrix::new(rho)
            }
            n => Err(Error::numerics(format!(
                "liouvillian kernel is {n}-dimensional: steady state not unique"
            ))),
        }
    }
}
