//! Hermitian eigendecomposition for small dense matrices, and unitary state
//! evolution exp(−iHt)|ψ⟩ through the spectral form.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EigenError {
    #[error("matrix is not Hermitian (residual {residual:.3e} exceeds {bound:.3e})")]
    NotHermitian { residual: f64, bound: f64 },
    #[error("matrix must be square and non-empty")]
    NotSquare,
    #[error("state vector is not normalized (‖ψ‖ = {norm})")]
    NotNormalized { norm: f64 },
}

/// Eigenvalues in ascending order with the matching unitary of column
/// eigenvectors.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<C64>,
}

impl SpectralDecomposition {
    /// V · diag(λ) · V†, for reconstruction checks.
    pub fn reconstruct(&self) -> DMatrix<C64> {
        let lam = DMatrix::from_diagonal(&self.eigenvalues.map(|x| C64::new(x, 0.0)));
        &self.eigenvectors * lam * self.eigenvectors.adjoint()
    }

    /// exp(−iHt)|ψ₀⟩ using the stored decomposition of H. Cheap to call for
    /// many times once the decomposition exists.
    pub fn evolve(&self, psi0: &DVector<C64>, t: f64) -> DVector<C64> {
        let mut coeffs = self.eigenvectors.adjoint() * psi0;
        for (c, lam) in coeffs.iter_mut().zip(self.eigenvalues.iter()) {
            *c *= C64::from_polar(1.0, -lam * t);
        }
        &self.eigenvectors * coeffs
    }
}

/// Diagonalize a Hermitian matrix; eigenvalues come back real and ascending.
pub fn hermitian_eigensystem(h: &DMatrix<C64>) -> Result<SpectralDecomposition, EigenError> {
    if h.nrows() != h.ncols() || h.is_empty() {
        return Err(EigenError::NotSquare);
    }
    let norm = h.map(|z| z.norm_sqr()).sum().sqrt();
    let residual = hermiticity_residual(h);
    let bound = 1e-10 * norm;
    if residual > bound {
        return Err(EigenError::NotHermitian { residual, bound });
    }

    let se = h.clone().symmetric_eigen();
    let n = h.nrows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| se.eigenvalues[a].total_cmp(&se.eigenvalues[b]));
    let eigenvalues = DVector::from_iterator(n, order.iter().map(|&i| se.eigenvalues[i]));
    let eigenvectors = DMatrix::from_fn(n, n, |r, c| se.eigenvectors[(r, order[c])]);
    Ok(SpectralDecomposition { eigenvalues, eigenvectors })
}

/// exp(−iHt)|ψ₀⟩ for a normalized |ψ₀⟩.
pub fn unitary_evolve(h: &DMatrix<C64>, psi0: &DVector<C64>, t: f64) -> Result<DVector<C64>, EigenError> {
    let norm = psi0.map(|z| z.norm_sqr()).sum().sqrt();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(EigenError::NotNormalized { norm });
    }
    Ok(hermitian_eigensystem(h)?.evolve(psi0, t))
}

/// max |H_ij − conj(H_ji)|.
pub fn hermiticity_residual(h: &DMatrix<C64>) -> f64 {
    let mut res: f64 = 0.0;
    for i in 0..h.nrows() {
        for j in 0..h.ncols() {
            res = res.max((h[(i, j)] - h[(j, i)].conj()).norm());
        }
    }
    res
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn diagonal_matrix_sorted_spectrum() {
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0, 0.0), c(-1.0, 0.0)]));
        let sd = hermitian_eigensystem(&h).unwrap();
        assert_eq!(sd.eigenvalues.as_slice(), &[-1.0, 1.0]);
    }

    #[test]
    fn pauli_x_spectrum() {
        let h = DMatrix::from_row_slice(2, 2, &[C64::ZERO, C64::ONE, C64::ONE, C64::ZERO]);
        let sd = hermitian_eigensystem(&h).unwrap();
        assert!((sd.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((sd.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn random_hermitian_reconstructs() {
        let mut rng = StdRng::seed_from_u64(7);
        let n = 10;
        let a = DMatrix::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let h = (&a + a.adjoint()) * c(0.5, 0.0);
        let sd = hermitian_eigensystem(&h).unwrap();
        let norm = h.map(|z| z.norm_sqr()).sum().sqrt();
        let err = (sd.reconstruct() - &h).map(|z| z.norm()).max();
        assert!(err < 1e-12 * norm, "reconstruction error {err}");
        let unit = (sd.eigenvectors.adjoint() * &sd.eigenvectors - DMatrix::<C64>::identity(n, n))
            .map(|z| z.norm())
            .max();
        assert!(unit < 1e-12, "unitarity error {unit}");
    }

    #[test]
    fn non_hermitian_rejected() {
        let h = DMatrix::from_row_slice(2, 2, &[C64::ONE, c(1.0, 0.0), c(0.5, 0.0), C64::ONE]);
        assert!(matches!(hermitian_eigensystem(&h), Err(EigenError::NotHermitian { .. })));
    }

    #[test]
    fn null_hamiltonian_leaves_state_fixed() {
        let h = DMatrix::from_element(2, 2, C64::ZERO);
        let psi = DVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8)]);
        let out = unitary_evolve(&h, &psi, 3.7).unwrap();
        assert!((&out - &psi).map(|z| z.norm()).max() < 1e-14);
    }

    #[test]
    fn phase_rotation_closed_form() {
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![c(1.0, 0.0), c(-1.0, 0.0)]));
        let psi = DVector::from_vec(vec![C64::ONE, C64::ZERO]);
        let out = unitary_evolve(&h, &psi, std::f64::consts::PI).unwrap();
        // exp(−iπ) = −1 on the first component.
        assert!((out[0] - c(-1.0, 0.0)).norm() < 1e-12);
        assert!(out[1].norm() < 1e-15);
        let overlap = (psi.adjoint() * &out)[(0, 0)].norm();
        assert!((overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn evolution_preserves_norm_and_composes() {
        let mut rng = StdRng::seed_from_u64(11);
        let a = DMatrix::from_fn(4, 4, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let h = (&a + a.adjoint()) * c(0.5, 0.0);
        let mut psi = DVector::from_fn(4, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let norm = psi.map(|z| z.norm_sqr()).sum().sqrt();
        psi /= c(norm, 0.0);

        let sd = hermitian_eigensystem(&h).unwrap();
        let one = sd.evolve(&sd.evolve(&psi, 0.7), 1.9);
        let two = sd.evolve(&psi, 2.6);
        assert!((&one - &two).map(|z| z.norm()).max() < 1e-10);
        let n1 = one.map(|z| z.norm_sqr()).sum().sqrt();
        assert!((n1 - 1.0).abs() < 1e-10);
    }

    #[test]
    fn unnormalized_state_rejected() {
        let h = DMatrix::from_element(2, 2, C64::ZERO);
        let psi = DVector::from_vec(vec![c(2.0, 0.0), C64::ZERO]);
        assert!(matches!(unitary_evolve(&h, &psi, 1.0), Err(EigenError::NotNormalized { .. })));
    }
}
