//! Dense eigendecomposition, ground-space identification, and spectral
//! diagnostics — the reference frame for every convergence claim.
//!
//! For a Hermitian `H` with eigenvalues ordered `λ_0 ≤ λ_1 ≤ … ≤ λ_N`
//! (`N = 2^Q − 1`), the quantities that control imaginary-time
//! convergence are the *ground multiplicity* `μ` (the size of the
//! degeneracy cluster at `λ_0`) and the *spectral gap* `Δ = λ_μ − λ_0`.
//! A [`Spectrum`] stores the sorted eigenvalues, orthonormal
//! eigenvectors, and both derived quantities.
//!
//! Degeneracy is decided by a relative tolerance: eigenvalues within
//! `degeneracy_tol · max(1, |λ_0|)` of `λ_0` belong to the ground
//! cluster. The default separates true degeneracy from floating-point
//! scatter at dense-solver accuracy; callers with nearly-degenerate
//! physical spectra can widen it. A Hamiltonian proportional to the
//! identity has `μ = 2^Q` and no gap; that case is flagged
//! (`gap = None`) rather than erroring, and downstream bounds degrade
//! to trivial statements.

use alloc::vec::Vec;

use nalgebra::linalg::SymmetricEigen;

use crate::error::{Error, Result};
use crate::pauli::{Hamiltonian, DEFAULT_DENSE_CAP};
use crate::state::StateVector;
use crate::Complex64;

/// Default relative degeneracy tolerance for clustering eigenvalues.
pub const DEFAULT_DEGENERACY_TOL: f64 = 1e-9;

/// Sorted eigensystem of a Hamiltonian with ground-space metadata.
///
/// Immutable after construction and safe to share across threads.
#[derive(Debug, Clone)]
pub struct Spectrum {
    qubits: usize,
    eigenvalues: Vec<f64>,
    eigenvectors: Vec<StateVector>,
    ground_multiplicity: usize,
    gap: Option<f64>,
    degeneracy_tol: f64,
}

impl Spectrum {
    /// Number of qubits `Q`.
    pub fn qubits(&self) -> usize {
        self.qubits
    }

    /// Hilbert-space dimension `2^Q`.
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvalues in non-decreasing order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Orthonormal eigenvector for eigenvalue `j` (within a degenerate
    /// cluster the individual vectors are basis-dependent; only the
    /// cluster projector is well defined).
    pub fn eigenvector(&self, j: usize) -> &StateVector {
        &self.eigenvectors[j]
    }

    /// Ground multiplicity `μ`.
    pub fn ground_multiplicity(&self) -> usize {
        self.ground_multiplicity
    }

    /// Spectral gap `Δ = λ_μ − λ_0`, or `None` when `H` is a multiple of
    /// the identity (the flagged degenerate case).
    pub fn gap(&self) -> Option<f64> {
        self.gap
    }

    /// Whether the spectrum is a single degeneracy cluster (identity
    /// multiple): no gap, every state is stationary under ITE.
    pub fn is_identity_multiple(&self) -> bool {
        self.gap.is_none()
    }

    /// The relative degeneracy tolerance the clustering used.
    pub fn degeneracy_tol(&self) -> f64 {
        self.degeneracy_tol
    }

    /// Half-open index range `[lo, hi)` of the degeneracy cluster
    /// containing eigenvalue `anchor` (relative tolerance around
    /// `λ_anchor`).
    pub fn cluster_at(&self, anchor: usize) -> (usize, usize) {
        let lambda = self.eigenvalues[anchor];
        let tol = self.degeneracy_tol * lambda.abs().max(1.0);
        let lo = self.eigenvalues[..anchor]
            .iter()
            .rposition(|l| (lambda - l).abs() > tol)
            .map_or(0, |p| p + 1);
        let hi = self.eigenvalues[anchor..]
            .iter()
            .position(|l| (l - lambda).abs() > tol)
            .map_or(self.dim(), |p| anchor + p);
        (lo, hi)
    }

    /// Ground-space fidelity `f = Σ_{j<μ} |⟨ψ_j|ψ⟩|²`.
    ///
    /// # Errors
    ///
    /// Dimension mismatch.
    pub fn fidelity(&self, state: &StateVector) -> Result<f64> {
        self.check_dims(state)?;
        let mut f = 0.0;
        for j in 0..self.ground_multiplicity {
            f += self.eigenvectors[j].inner(state)?.norm_sqr();
        }
        Ok(f)
    }

    /// Eigenbasis coefficients `α_j = ⟨ψ_j|ψ⟩` for all `j`.
    pub fn eigen_coeffs(&self, state: &StateVector) -> Result<Vec<Complex64>> {
        self.check_dims(state)?;
        self.eigenvectors.iter().map(|v| v.inner(state)).collect()
    }

    /// Rebuilds `Σ_j α_j |ψ_j⟩` from eigenbasis coefficients.
    pub fn reconstruct(&self, coeffs: &[Complex64]) -> Result<StateVector> {
        if coeffs.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.qubits,
                got: coeffs.len().trailing_zeros() as usize,
            });
        }
        let mut amps = alloc::vec![Complex64::new(0.0, 0.0); self.dim()];
        for (alpha, vector) in coeffs.iter().zip(&self.eigenvectors) {
            for (a, v) in amps.iter_mut().zip(vector.amps()) {
                *a += alpha * v;
            }
        }
        StateVector::from_amps(self.qubits, amps)
    }

    fn check_dims(&self, state: &StateVector) -> Result<()> {
        if state.qubits() != self.qubits {
            return Err(Error::DimensionMismatch {
                expected: self.qubits,
                got: state.qubits(),
            });
        }
        Ok(())
    }
}

/// Diagonalises `H` under the default dense cap.
///
/// `degeneracy_tol` defaults to [`DEFAULT_DEGENERACY_TOL`] when `None`.
pub fn eigendecompose(h: &Hamiltonian, degeneracy_tol: Option<f64>) -> Result<Spectrum> {
    eigendecompose_capped(h, degeneracy_tol, DEFAULT_DENSE_CAP)
}

/// Diagonalises `H` with an explicit dense qubit cap.
///
/// # Errors
///
/// [`Error::DenseCapExceeded`] above the cap; [`Error::NonHermitian`]
/// should the dense realisation fail its Hermiticity check;
/// [`Error::OutOfDomain`] for a non-positive tolerance.
pub fn eigendecompose_capped(
    h: &Hamiltonian,
    degeneracy_tol: Option<f64>,
    cap: usize,
) -> Result<Spectrum> {
    let tol = degeneracy_tol.unwrap_or(DEFAULT_DEGENERACY_TOL);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::OutOfDomain {
            name: "degeneracy_tol",
            value: tol,
            requirement: "requires a finite tolerance > 0",
        });
    }
    let m = h.to_dense_capped(cap)?;
    let herm = (&m - m.adjoint())
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    if herm > 1e-12 {
        return Err(Error::NonHermitian { deviation: herm });
    }

    let eig = SymmetricEigen::new(m);
    let dim = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let eigenvectors: Vec<StateVector> = order
        .iter()
        .map(|&i| {
            StateVector::from_amps(
                h.qubits(),
                eig.eigenvectors.column(i).iter().copied().collect(),
            )
        })
        .collect::<Result<_>>()?;

    let lambda0 = eigenvalues[0];
    let cluster_tol = tol * lambda0.abs().max(1.0);
    let ground_multiplicity = eigenvalues
        .iter()
        .position(|l| (l - lambda0).abs() > cluster_tol)
        .unwrap_or(dim);
    let gap = if ground_multiplicity == dim {
        None
    } else {
        Some(eigenvalues[ground_multiplicity] - lambda0)
    };

    Ok(Spectrum {
        qubits: h.qubits(),
        eigenvalues,
        eigenvectors,
        ground_multiplicity,
        gap,
        degeneracy_tol: tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::test_rng;

    #[test]
    fn single_qubit_z_spectrum() {
        let h = Hamiltonian::parse_terms(&[(1.0, "Z")]).unwrap();
        let s = eigendecompose(&h, None).unwrap();
        assert_eq!(s.eigenvalues(), &[-1.0, 1.0]);
        assert_eq!(s.ground_multiplicity(), 1);
        assert_eq!(s.gap(), Some(2.0));
        // Ground state is |1⟩ up to phase.
        assert!((s.eigenvector(0).amps()[1].norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn xor_hamiltonian_spectrum() {
        let h = Hamiltonian::parse_terms(&[(0.5, "II"), (-0.5, "ZZ")]).unwrap();
        let s = eigendecompose(&h, None).unwrap();
        let expect = [0.0, 0.0, 1.0, 1.0];
        for (l, e) in s.eigenvalues().iter().zip(expect) {
            assert!((l - e).abs() < 1e-12);
        }
        assert_eq!(s.ground_multiplicity(), 2);
        assert!((s.gap().unwrap() - 1.0).abs() < 1e-12);
        assert!(!s.is_identity_multiple());
    }

    #[test]
    fn identity_multiple_is_flagged() {
        let h = Hamiltonian::parse_terms(&[(0.0, "XZ")]).unwrap();
        let s = eigendecompose(&h, None).unwrap();
        assert!(s.is_identity_multiple());
        assert_eq!(s.ground_multiplicity(), 4);
        assert_eq!(s.gap(), None);
    }

    #[test]
    fn fidelity_examples() {
        let h = Hamiltonian::parse_terms(&[(1.0, "Z")]).unwrap();
        let s = eigendecompose(&h, None).unwrap();
        assert!((s.fidelity(s.eigenvector(0)).unwrap() - 1.0).abs() < 1e-12);
        let plus = StateVector::equal_superposition(1).unwrap();
        assert!((s.fidelity(&plus).unwrap() - 0.5).abs() < 1e-12);

        // Diagonal H: equal superposition has fidelity μ·2^{-Q}.
        let h = Hamiltonian::parse_terms(&[(0.5, "II"), (-0.5, "ZZ")]).unwrap();
        let s = eigendecompose(&h, None).unwrap();
        let sup = StateVector::equal_superposition(2).unwrap();
        assert!((s.fidelity(&sup).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn eigen_coeffs_and_reconstruction() {
        let h = Hamiltonian::parse_terms(&[(0.3, "XI"), (0.4, "ZZ"), (-0.2, "IY")]).unwrap();
        let s = eigendecompose(&h, None).unwrap();

        // An eigenstate maps to a coordinate vector up to phase.
        let alpha = s.eigen_coeffs(s.eigenvector(2)).unwrap();
        assert!((alpha[2].norm() - 1.0).abs() < 1e-10);
        for (j, a) in alpha.iter().enumerate() {
            if j != 2 {
                assert!(a.norm() < 1e-10);
            }
        }

        // Parseval plus reconstruction for a random state.
        let mut rng = test_rng(23);
        let psi = StateVector::random(2, &mut rng).unwrap();
        let alpha = s.eigen_coeffs(&psi).unwrap();
        let total: f64 = alpha.iter().map(|a| a.norm_sqr()).sum();
        assert!((total - 1.0).abs() < 1e-10);
        let back = s.reconstruct(&alpha).unwrap();
        assert!(back.distance(&psi).unwrap() < 1e-10);
    }

    #[test]
    fn plus_state_coefficients_for_z() {
        let h = Hamiltonian::parse_terms(&[(1.0, "Z")]).unwrap();
        let s = eigendecompose(&h, None).unwrap();
        let plus = StateVector::equal_superposition(1).unwrap();
        let alpha = s.eigen_coeffs(&plus).unwrap();
        for a in &alpha {
            assert!((a.norm() - core::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        }
    }

    #[test]
    fn eigenvector_matrix_is_unitary() {
        let h = Hamiltonian::parse_terms(&[(0.7, "XY"), (0.1, "ZI"), (0.4, "YZ")]).unwrap();
        let s = eigendecompose(&h, None).unwrap();
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                let ip = s.eigenvector(i).inner(s.eigenvector(j)).unwrap();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip.norm() - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn clusters_are_anchored_ranges() {
        let h = Hamiltonian::parse_terms(&[(0.5, "II"), (-0.5, "ZZ")]).unwrap();
        let s = eigendecompose(&h, None).unwrap();
        assert_eq!(s.cluster_at(0), (0, 2));
        assert_eq!(s.cluster_at(1), (0, 2));
        assert_eq!(s.cluster_at(2), (2, 4));
        assert_eq!(s.cluster_at(3), (2, 4));
    }
}
