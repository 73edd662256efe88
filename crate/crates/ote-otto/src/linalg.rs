//! Complex linear-algebra helpers built on real embeddings.
//!
//! A complex matrix M = A + iB embeds as the real matrix E = [[A, -B], [B, A]].
//! E inherits M's singular values (each doubled) and, for Hermitian M, its
//! eigenvalues (each doubled); a complex kernel vector x + iy appears as the
//! real pair [x; y], [-y; x]. Working through the embedding keeps every
//! decomposition on the well-trodden real nalgebra paths.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Real embedding [[Re, -Im], [Im, Re]] of a complex matrix.
pub fn embed_real(m: &DMatrix<Complex64>) -> DMatrix<f64> {
    let (r, c) = m.shape();
    let mut e = DMatrix::zeros(2 * r, 2 * c);
    for i in 0..r {
        for j in 0..c {
            let v = m[(i, j)];
            e[(i, j)] = v.re;
            e[(i, j + c)] = -v.im;
            e[(i + r, j)] = v.im;
            e[(i + r, j + c)] = v.re;
        }
    }
    e
}

/// Orthonormal basis of the (right) kernel of a square complex matrix.
///
/// Singular values below `rel_tol * sigma_max` count as zero. Returns the
/// complex kernel vectors; empty when the matrix has full numerical rank.
pub fn kernel_basis(m: &DMatrix<Complex64>, rel_tol: f64) -> Result<Vec<DVector<Complex64>>> {
    let n = m.ncols();
    if m.nrows() != n {
        return Err(Error::numerics("kernel_basis expects a square matrix"));
    }
    let e = embed_real(m);
    let svd = e.svd(false, true);
    let v_t = svd
        .v_t
        .as_ref()
        .ok_or_else(|| Error::numerics("SVD failed to produce right singular vectors"))?;
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    if sigma_max == 0.0 {
        // zero matrix: kernel is everything; return the standard basis
        let mut basis = Vec::with_capacity(n);
        for k in 0..n {
            let mut v = DVector::from_element(n, Complex64::new(0.0, 0.0));
            v[k] = Complex64::new(1.0, 0.0);
            basis.push(v);
        }
        return Ok(basis);
    }
    let tol = rel_tol * sigma_max;
    // collect real null vectors, un-embed, then complex Gram-Schmidt: each
    // complex kernel direction shows up twice (as v and iv) in the embedding
    let mut basis: Vec<DVector<Complex64>> = Vec::new();
    for (idx, &s) in svd.singular_values.iter().enumerate() {
        if s > tol {
            continue;
        }
        let row = v_t.row(idx);
        let mut cand = DVector::from_element(n, Complex64::new(0.0, 0.0));
        for k in 0..n {
            cand[k] = Complex64::new(row[k], row[k + n]);
        }
        for b in &basis {
            let overlap = b.dotc(&cand);
            cand -= b * overlap;
        }
        let norm = cand.norm();
        if norm > 0.5 {
            // unit real vectors project to complex norm 1 or (if a duplicate
            // of an accepted direction) ~0; 0.5 separates the two cleanly
            basis.push(cand / Complex64::new(norm, 0.0));
        }
    }
    Ok(basis)
}

/// Eigenvalues of a Hermitian matrix, ascending. The input is hermitized
/// (H + H^dagger)/2 first; callers check hermiticity separately when needed.
pub fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Vec<f64> {
    let h = (m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let e = embed_real(&h);
    let sym = nalgebra::SymmetricEigen::new(e);
    let mut vals: Vec<f64> = sym.eigenvalues.iter().cloned().collect();
    vals.sort_by(f64::total_cmp);
    // doubled spectrum: take every second entry
    vals.into_iter().step_by(2).collect()
}

/// Smallest eigenvalue of a Hermitian matrix (for psd checks).
pub fn min_hermitian_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    hermitian_eigenvalues(m)[0]
}
