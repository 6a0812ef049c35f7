//! First-order Trotterized ITE: `Π_τ Π_i e^{-δ a_i S_i}` with
//! renormalization after every factor.
//!
//! Each factor uses the operator identity (from `S² = I`)
//!
//! ```text
//! e^{-δaS} = cosh(δa)·I − sinh(δa)·S
//! ```
//!
//! so a factor costs one sweep over the state vector — no matrix is
//! ever formed, and the factor count is `layers · terms` =
//! `O(Q^B · t/δ)` for a bounded-order Hamiltonian. Non-commuting terms
//! make the product approximate with first-order error `O(δ)` per unit
//! time; commuting (e.g. all-Z) Hamiltonians are reproduced exactly for
//! any step size.

// With std (tests) the inherent f64 methods win and this import idles.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::ite_exact::{gradient_norm_sq, ORTHOGONALITY_TOL};
use crate::pauli::{Hamiltonian, PauliTerm};
use crate::spectral::Spectrum;
use crate::state::StateVector;
use crate::trace::{EvolutionTrace, TrotterInfo};
use crate::Complex64;

/// Largest admissible layer count; beyond this the run would not
/// terminate in reasonable time and the request is almost certainly a
/// unit error.
pub const MAX_LAYERS: f64 = 1e9;

/// Result of a Trotterized evolution run.
#[derive(Debug, Clone)]
pub struct TrotterOutcome {
    /// Per-layer diagnostics; `trace.trotter` carries the step
    /// accounting.
    pub trace: EvolutionTrace,
    /// Normalised state after the last layer.
    pub final_state: StateVector,
}

/// Applies one non-unitary factor `e^{-δa S} = cosh(δa)I − sinh(δa)S`
/// in place and returns the norm of the (unnormalised) result. The
/// caller decides when to renormalize.
///
/// # Errors
///
/// Dimension mismatch, `δ < 0` or non-finite, or a non-finite `δ·a`
/// (or an overflowing `cosh(δa)`), which would poison the state.
pub fn factor_apply_in_place(state: &mut StateVector, term: &PauliTerm, delta: f64) -> Result<f64> {
    if term.string.qubits() != state.qubits() {
        return Err(Error::DimensionMismatch {
            expected: state.qubits(),
            got: term.string.qubits(),
        });
    }
    if !(delta >= 0.0 && delta.is_finite()) {
        return Err(Error::OutOfDomain {
            name: "delta",
            value: delta,
            requirement: "requires finite delta >= 0",
        });
    }
    let angle = delta * term.coefficient;
    if !angle.is_finite() {
        return Err(Error::NonFinite {
            what: "delta * coefficient",
            value: angle,
        });
    }
    let u = Complex64::new(angle.cosh(), 0.0);
    let v = Complex64::new(-angle.sinh(), 0.0);
    term.string.blend(state.amps_mut(), u, v);
    let norm = state.norm();
    if !norm.is_finite() {
        return Err(Error::NonFinite {
            what: "factor norm",
            value: norm,
        });
    }
    Ok(norm)
}

/// Pure variant of [`factor_apply_in_place`]: returns the unnormalised
/// image `cosh(δa)ψ − sinh(δa)Sψ` together with its norm.
pub fn factor_apply(
    state: &StateVector,
    term: &PauliTerm,
    delta: f64,
) -> Result<(StateVector, f64)> {
    let mut out = state.clone();
    let norm = factor_apply_in_place(&mut out, term, delta)?;
    Ok((out, norm))
}

/// Runs the first-order Trotter product for time `t` with step `δ`.
///
/// The layer count is `round(t/δ)`, clamped to one layer when `t > 0`
/// (so `δ > t` still evolves; the condition is flagged as
/// `delta_exceeds_time` in the returned [`TrotterInfo`] rather than
/// rejected). The simulated horizon is therefore `layers·δ`, and the
/// difference `t − layers·δ` is reported as `residual_time`. Terms are
/// applied in Hamiltonian order, renormalizing after every factor; the
/// discarded norms accumulate into the `norm_log` column.
///
/// A spectrum is optional: with one, the fidelity and fidelity-bound
/// columns are filled against the ground cluster (`NaN` bound for a
/// start orthogonal to it); without one those columns are `NaN`, which
/// keeps the evolution usable beyond the dense-diagonalisation cap.
///
/// # Errors
///
/// Unnormalised or mismatched start state, `t < 0`, `δ ≤ 0`, a layer
/// count beyond [`MAX_LAYERS`], or a factor failure mid-run.
pub fn trotter_evolve(
    state0: &StateVector,
    h: &Hamiltonian,
    t: f64,
    delta: f64,
    spectrum: Option<&Spectrum>,
) -> Result<TrotterOutcome> {
    h.check_dims(state0)?;
    let norm = state0.norm();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::NotNormalised { norm });
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::OutOfDomain {
            name: "t",
            value: t,
            requirement: "requires finite t >= 0",
        });
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::OutOfDomain {
            name: "delta",
            value: delta,
            requirement: "requires finite delta > 0",
        });
    }
    let raw_layers = (t / delta).round();
    if raw_layers > MAX_LAYERS {
        return Err(Error::OutOfDomain {
            name: "t/delta",
            value: raw_layers,
            requirement: "requires at most 1e9 layers",
        });
    }
    let mut layers = raw_layers as usize;
    if t > 0.0 && layers == 0 {
        layers = 1; // single-layer fallback for δ > 2t
    }

    let ground = spectrum.map(|s| (s.ground_multiplicity(), s.gap()));
    let f0 = match spectrum {
        Some(s) => s.fidelity(state0)?,
        None => f64::NAN,
    };

    let mut trace = EvolutionTrace::new(state0.qubits());
    trace.ground_multiplicity = ground.map(|(mu, _)| mu);
    trace.gap = ground.and_then(|(_, gap)| gap);
    trace.f0 = f0;
    trace.orthogonal_start = f0.is_finite() && f0 < ORTHOGONALITY_TOL;
    trace.target_level = 0;
    trace.target_multiplicity = ground.map(|(mu, _)| mu);
    trace.trotter = Some(TrotterInfo {
        delta,
        layers,
        factors_total: layers * h.terms().len(),
        residual_time: t - layers as f64 * delta,
        delta_exceeds_time: delta > t && t > 0.0,
    });

    let mut state = state0.clone();
    let mut norm_log = 0.0f64;
    push_layer_row(&mut trace, 0.0, &state, h, spectrum, f0, norm_log)?;

    for layer in 1..=layers {
        for term in h.terms() {
            let factor_norm = factor_apply_in_place(&mut state, term, delta)?;
            if factor_norm < 1e-300 {
                return Err(Error::ZeroNorm);
            }
            norm_log += factor_norm.ln();
            let inv = 1.0 / factor_norm;
            for a in state.amps_mut() {
                *a *= inv;
            }
        }
        let tau = layer as f64 * delta;
        push_layer_row(&mut trace, tau, &state, h, spectrum, f0, norm_log)?;
    }

    Ok(TrotterOutcome {
        trace,
        final_state: state,
    })
}

pub(crate) fn push_layer_row(
    trace: &mut EvolutionTrace,
    tau: f64,
    state: &StateVector,
    h: &Hamiltonian,
    spectrum: Option<&Spectrum>,
    f0: f64,
    norm_log: f64,
) -> Result<()> {
    let energy = h.expectation(state)?;
    let grad = gradient_norm_sq(state, h)?;
    let fidelity = match spectrum {
        Some(s) => s.fidelity(state)?,
        None => f64::NAN,
    };
    let bound = match spectrum.and_then(|s| s.gap()) {
        Some(gap) if f0 >= ORTHOGONALITY_TOL => 1.0 / (1.0 + (-2.0 * tau * gap).exp() / f0),
        _ => f64::NAN,
    };
    trace.push_row(tau, energy, fidelity, grad, bound, norm_log);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ite_exact::{exact_evolve, exact_evolve_with_spectrum};
    use crate::spectral::eigendecompose;
    use crate::state::test_rng;

    fn term(coefficient: f64, ops: &str) -> PauliTerm {
        PauliTerm::new(coefficient, ops.parse().unwrap()).unwrap()
    }

    #[test]
    fn zero_delta_is_identity() {
        let psi = StateVector::equal_superposition(2).unwrap();
        let (out, norm) = factor_apply(&psi, &term(0.7, "XY"), 0.0).unwrap();
        assert_eq!(norm, 1.0);
        for (a, b) in out.amps().iter().zip(psi.amps()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn diagonal_factor_matches_scalar_oracle() {
        // e^{-0.1 Z}|0⟩ = e^{-0.1}|0⟩ (oracle: diag(e^{-δ}, e^{δ})).
        let zero = StateVector::basis_state(1, "0").unwrap();
        let (out, norm) = factor_apply(&zero, &term(1.0, "Z"), 0.1).unwrap();
        assert!((norm - (-0.1f64).exp()).abs() < 1e-15);
        assert!((out.amps()[0].re - (-0.1f64).exp()).abs() < 1e-15);
        assert_eq!(out.amps()[1], Complex64::new(0.0, 0.0));
        // Negative coefficient flips the sign in the exponent.
        let (_, norm_neg) = factor_apply(&zero, &term(-1.0, "Z"), 0.1).unwrap();
        assert!((norm_neg - (0.1f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn eigenstate_of_the_term_scales_uniformly() {
        // S|+⟩ = |+⟩ for S = X, so the factor is the scalar e^{-δ}.
        let plus = StateVector::equal_superposition(1).unwrap();
        let (out, norm) = factor_apply(&plus, &term(1.0, "X"), 0.3).unwrap();
        assert!((norm - (-0.3f64).exp()).abs() < 1e-15);
        assert!((out.amps()[0].re * 2.0f64.sqrt() - (-0.3f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn single_factor_matches_exact_single_term_evolution() {
        // One normalized factor IS exact ITE of the single-term
        // Hamiltonian for t = δ (independent eigen route).
        let h = Hamiltonian::parse_terms(&[(0.7, "XY")]).unwrap();
        let mut rng = test_rng(11);
        let psi0 = StateVector::random(2, &mut rng).unwrap();
        let (mut out, norm) = factor_apply(&psi0, &h.terms()[0], 0.3).unwrap();
        let inv = 1.0 / norm;
        for a in out.amps_mut() {
            *a *= inv;
        }
        let exact = exact_evolve(&psi0, &h, 0.3, 2).unwrap();
        assert!(out.overlap_sq(&exact.final_state).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let psi = StateVector::equal_superposition(1).unwrap();
        assert!(matches!(
            factor_apply(&psi, &term(1.0, "ZZ"), 0.1),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(factor_apply(&psi, &term(1.0, "Z"), -0.1).is_err());
        assert!(factor_apply(&psi, &term(1.0, "Z"), f64::NAN).is_err());
        // cosh overflow is reported, not silently propagated.
        assert!(matches!(
            factor_apply(&psi, &term(1e6, "Z"), 1.0),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn commuting_hamiltonian_is_exact_for_any_delta() {
        let h = Hamiltonian::parse_terms(&[(0.6, "ZI"), (0.25, "IZ"), (0.1, "ZZ")]).unwrap();
        let spectrum = eigendecompose(&h, None).unwrap();
        let mut rng = test_rng(3);
        let psi0 = StateVector::random(2, &mut rng).unwrap();
        // δ divides t so the horizons coincide.
        let run = trotter_evolve(&psi0, &h, 1.2, 0.15, Some(&spectrum)).unwrap();
        let exact = exact_evolve_with_spectrum(&psi0, &spectrum, 1.2, 2).unwrap();
        assert!(run.final_state.distance(&exact.final_state).unwrap() < 1e-9);
        let info = run.trace.trotter.as_ref().unwrap();
        assert_eq!(info.layers, 8);
        assert_eq!(info.factors_total, 24);
        assert!(info.residual_time.abs() < 1e-12);
        assert!(!info.delta_exceeds_time);
        // Product of factor norms telescopes to the exact norm.
        let exact_norm_log = exact.trace.norm_log.last().unwrap();
        assert!((run.trace.norm_log.last().unwrap() - exact_norm_log).abs() < 1e-9);
    }

    #[test]
    fn error_halves_when_delta_halves() {
        let h = Hamiltonian::parse_terms(&[(0.5, "X"), (0.5, "Z")]).unwrap();
        let psi0 = StateVector::basis_state(1, "0").unwrap();
        let exact = exact_evolve(&psi0, &h, 1.0, 2).unwrap().final_state;
        let err = |delta: f64| {
            let run = trotter_evolve(&psi0, &h, 1.0, delta, None).unwrap();
            run.final_state.distance(&exact).unwrap()
        };
        let ratio = err(0.02) / err(0.01);
        assert!((1.6..=2.4).contains(&ratio), "first-order ratio {ratio}");
    }

    #[test]
    fn delta_equal_to_t_is_one_exact_layer() {
        let h = Hamiltonian::parse_terms(&[(0.7, "XY")]).unwrap();
        let mut rng = test_rng(5);
        let psi0 = StateVector::random(2, &mut rng).unwrap();
        let run = trotter_evolve(&psi0, &h, 0.4, 0.4, None).unwrap();
        let exact = exact_evolve(&psi0, &h, 0.4, 2).unwrap();
        assert_eq!(run.trace.trotter.as_ref().unwrap().layers, 1);
        assert!(run.final_state.distance(&exact.final_state).unwrap() < 1e-10);
    }

    #[test]
    fn oversized_delta_falls_back_to_one_layer() {
        let h = Hamiltonian::parse_terms(&[(1.0, "Z")]).unwrap();
        let plus = StateVector::equal_superposition(1).unwrap();
        let run = trotter_evolve(&plus, &h, 0.1, 0.5, None).unwrap();
        let info = run.trace.trotter.as_ref().unwrap();
        assert_eq!(info.layers, 1);
        assert!(info.delta_exceeds_time);
        assert!((info.residual_time - (0.1 - 0.5)).abs() < 1e-15);
        assert_eq!(run.trace.len(), 2);
    }

    #[test]
    fn zero_time_is_a_single_row() {
        let h = Hamiltonian::parse_terms(&[(1.0, "Z")]).unwrap();
        let plus = StateVector::equal_superposition(1).unwrap();
        let run = trotter_evolve(&plus, &h, 0.0, 0.5, None).unwrap();
        assert_eq!(run.trace.len(), 1);
        assert_eq!(run.trace.trotter.as_ref().unwrap().layers, 0);
        assert!(run.final_state.distance(&plus).unwrap() < 1e-15);
    }

    #[test]
    fn energy_descends_within_first_order_slack() {
        let h =
            Hamiltonian::parse_terms(&[(0.45, "XZI"), (-0.3, "IYZ"), (0.2, "ZIZ"), (0.15, "IXI")])
                .unwrap();
        let mut rng = test_rng(17);
        let psi0 = StateVector::random(3, &mut rng).unwrap();
        let delta = 0.05;
        let run = trotter_evolve(&psi0, &h, 2.0, delta, None).unwrap();
        let norm1: f64 = h.terms().iter().map(|t| t.coefficient.abs()).sum();
        assert!(run.trace.energy_is_monotone(2.0 * delta * norm1 * norm1));
    }

    #[test]
    fn trace_columns_with_and_without_spectrum() {
        let h = Hamiltonian::parse_terms(&[(0.5, "X"), (0.5, "Z")]).unwrap();
        let plus = StateVector::equal_superposition(1).unwrap();
        let blind = trotter_evolve(&plus, &h, 0.5, 0.05, None).unwrap();
        assert!(blind.trace.fidelity.iter().all(|f| f.is_nan()));
        assert!(blind.trace.fidelity_bound.iter().all(|b| b.is_nan()));
        let spectrum = eigendecompose(&h, None).unwrap();
        let seen = trotter_evolve(&plus, &h, 0.5, 0.05, Some(&spectrum)).unwrap();
        assert!(seen.trace.fidelity.iter().all(|f| f.is_finite()));
        // O(δ) Trotter error can nibble at the exact-evolution bound
        // margin, hence the loose slack.
        assert!(seen.trace.bound_is_dominated(1e-3));
        assert_eq!(seen.trace.ground_multiplicity, Some(1));
    }

    #[test]
    fn layer_cap_is_enforced() {
        let h = Hamiltonian::parse_terms(&[(1.0, "Z")]).unwrap();
        let plus = StateVector::equal_superposition(1).unwrap();
        assert!(matches!(
            trotter_evolve(&plus, &h, 1e12, 1e-9, None),
            Err(Error::OutOfDomain {
                name: "t/delta",
                ..
            })
        ));
    }
}
