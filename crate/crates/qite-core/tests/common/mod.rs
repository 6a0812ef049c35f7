//! Shared oracles for the integration suites.
//!
//! Everything here reaches results by a route the library does not use:
//! dense matrices come from Kronecker products of 2×2 Pauli blocks
//! (the library walks amplitude bitmasks), and propagators come from a
//! hand-rolled scaling-and-squaring exponential applied in renormalised
//! chunks (the library diagonalises). Agreement between the two routes
//! is then evidence rather than tautology.

// Each integration binary compiles this module separately and uses a
// different subset of it.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use qite_core::pauli::{Hamiltonian, Pauli, PauliString, PauliTerm};
use qite_core::spectral::{eigendecompose, Spectrum};
use qite_core::state::StateVector;
use qite_core::Complex64;
use rand::Rng;

/// The 2×2 matrix of one Pauli factor.
pub fn pauli_matrix(p: Pauli) -> DMatrix<Complex64> {
    let o = Complex64::new(0.0, 0.0);
    let l = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let rows = match p {
        Pauli::I => [[l, o], [o, l]],
        Pauli::X => [[o, l], [l, o]],
        Pauli::Y => [[o, -i], [i, o]],
        Pauli::Z => [[l, o], [o, -l]],
    };
    DMatrix::from_fn(2, 2, |r, c| rows[r][c])
}

/// Dense realisation of a Pauli string as an explicit Kronecker
/// product, qubit 0 as the most significant (leftmost) factor.
pub fn string_matrix(s: &PauliString) -> DMatrix<Complex64> {
    let mut m = DMatrix::from_element(1, 1, Complex64::new(1.0, 0.0));
    for q in 0..s.qubits() {
        m = m.kronecker(&pauli_matrix(s.op(q)));
    }
    m
}

/// Dense realisation of a Hamiltonian by summing Kronecker products.
pub fn dense_oracle(h: &Hamiltonian) -> DMatrix<Complex64> {
    let dim = 1usize << h.qubits();
    let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for term in h.terms() {
        m += string_matrix(&term.string).map(|z| z * term.coefficient);
    }
    m
}

/// Largest absolute row sum (induced ∞-norm).
pub fn inf_norm(a: &DMatrix<Complex64>) -> f64 {
    (0..a.nrows())
        .map(|r| (0..a.ncols()).map(|c| a[(r, c)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Matrix exponential by scaling and squaring around a plain Taylor
/// series; accurate to near machine precision for the moderate norms
/// used here (the callers scale their exponents below ~2).
pub fn expm(a: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = a.nrows();
    let norm = inf_norm(a);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scale = 2.0f64.powi(squarings as i32);
    let scaled = a.map(|z| z / scale);

    let mut sum = DMatrix::<Complex64>::identity(n, n);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    for k in 1..80u32 {
        term = (&term * &scaled).map(|z| z / f64::from(k));
        sum += &term;
        let largest = term.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if largest < 1e-22 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// Normalised `exp(−tH)ψ0` computed without the library's spectral
/// machinery: the propagator is split into renormalised chunks with
/// `δ‖H‖ ≤ 1.5` each, so no intermediate quantity can over- or
/// underflow regardless of `t`.
pub fn evolve_oracle(h: &Hamiltonian, psi0: &StateVector, t: f64) -> Vec<Complex64> {
    let m = dense_oracle(h);
    let mut v = DVector::from_column_slice(psi0.amps());
    if t > 0.0 {
        let chunks = (t * inf_norm(&m) / 1.5).ceil().max(1.0) as usize;
        let delta = t / chunks as f64;
        let step = expm(&m.map(|z| z * -delta));
        for _ in 0..chunks {
            v = &step * v;
            normalize(&mut v);
        }
    }
    normalize(&mut v);
    v.iter().copied().collect()
}

fn normalize(v: &mut DVector<Complex64>) {
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    assert!(norm > 0.0, "oracle state vanished");
    for z in v.iter_mut() {
        *z /= norm;
    }
}

/// Euclidean distance between two amplitude vectors.
pub fn vec_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `|⟨a|b⟩|²` between two amplitude vectors.
pub fn vec_overlap_sq(a: &[Complex64], b: &[Complex64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| x.conj() * y)
        .sum::<Complex64>()
        .norm_sqr()
}

/// A random Hamiltonian of `n_terms` Pauli strings with weights in
/// `1..=order` and coefficients bounded away from zero.
pub fn random_hamiltonian<R: Rng + ?Sized>(
    rng: &mut R,
    qubits: usize,
    order: usize,
    n_terms: usize,
) -> Hamiltonian {
    let order = order.min(qubits);
    let mut terms = Vec::with_capacity(n_terms);
    for _ in 0..n_terms {
        let weight = rng.random_range(1..=order);
        let mut ops = vec![Pauli::I; qubits];
        let mut placed = 0;
        while placed < weight {
            let q = rng.random_range(0..qubits);
            if ops[q] == Pauli::I {
                ops[q] = match rng.random_range(0..3) {
                    0 => Pauli::X,
                    1 => Pauli::Y,
                    _ => Pauli::Z,
                };
                placed += 1;
            }
        }
        let magnitude = rng.random_range(0.2..1.0);
        let sign = if rng.random_range(0..2) == 0 {
            1.0
        } else {
            -1.0
        };
        terms.push(PauliTerm::new(sign * magnitude, PauliString::new(ops).unwrap()).unwrap());
    }
    Hamiltonian::with_order_bound(terms, order).unwrap()
}

/// Whether some pair of terms fails to commute.
pub fn has_noncommuting_pair(h: &Hamiltonian) -> bool {
    let terms = h.terms();
    for (k, a) in terms.iter().enumerate() {
        for b in &terms[k + 1..] {
            if !a.string.commutes_with(&b.string) {
                return true;
            }
        }
    }
    false
}

/// Draws random Hamiltonians until one has a spectral gap of at least
/// `min_gap` (degenerate draws would make `t = 3/Δ` explode and say
/// nothing new about the evolution).
pub fn gapped_random_hamiltonian<R: Rng + ?Sized>(
    rng: &mut R,
    qubits: usize,
    order: usize,
    n_terms: usize,
    min_gap: f64,
) -> (Hamiltonian, Spectrum) {
    loop {
        let h = random_hamiltonian(rng, qubits, order, n_terms);
        let spectrum = eigendecompose(&h, None).unwrap();
        if spectrum.gap().is_some_and(|g| g >= min_gap) {
            return (h, spectrum);
        }
    }
}
