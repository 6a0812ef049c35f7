//! Convergence traces shared by the exact, Trotter, and compiled
//! evolutions: sampled times with energy, ground-space fidelity,
//! gradient norm, the a-priori fidelity bound, and the accumulated
//! normalisation log.
//!
//! Quantities that need spectral information (fidelity and its bound)
//! are `NaN` when a run had no spectrum available — Trotter evolutions
//! above the dense cap still produce energy and gradient columns.

use alloc::vec::Vec;

/// Per-run Trotter accounting attached to a trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrotterInfo {
    /// Time step δ of one layer.
    pub delta: f64,
    /// Number of layers applied (`round(t/δ)`, at least one for `t > 0`).
    pub layers: usize,
    /// Total factors applied (`layers · term_count`).
    pub factors_total: usize,
    /// Unsimulated remainder `t − layers·δ` (reported, never folded in).
    pub residual_time: f64,
    /// Whether δ exceeded the requested total time (single-layer run).
    pub delta_exceeds_time: bool,
}

/// Sampled evolution diagnostics plus run metadata.
///
/// All column vectors have equal length and strictly increasing `times`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionTrace {
    /// Sampled times, strictly increasing.
    pub times: Vec<f64>,
    /// Energy `E(t) = ⟨ψ(t)|H|ψ(t)⟩`.
    pub energy: Vec<f64>,
    /// Target-space fidelity `f(t)` (`NaN` without a spectrum).
    pub fidelity: Vec<f64>,
    /// Tangent gradient norm `‖Hψ − ⟨H⟩ψ‖²` (the energy variance).
    pub gradient_norm_sq: Vec<f64>,
    /// A-priori bound `1/(1 + f(0)^{-1} e^{-2tΔ})` (`NaN` without a
    /// spectrum or for a gapless target).
    pub fidelity_bound: Vec<f64>,
    /// Accumulated `ln` of the norms divided out by normalisation up to
    /// each sample — recovers `‖e^{-tH}ψ(0)‖` without underflow.
    pub norm_log: Vec<f64>,

    /// Number of qubits.
    pub qubits: usize,
    /// Ground multiplicity μ of the underlying spectrum, when known.
    pub ground_multiplicity: Option<usize>,
    /// Effective gap Δ the bound used (re-targeted for orthogonal
    /// starts), `None` when unknown or gapless.
    pub gap: Option<f64>,
    /// Overlap of the start state with the target eigenspace (`NaN`
    /// when unknown).
    pub f0: f64,
    /// Whether the start was orthogonal to the ground space (within
    /// `1e-14`) and the convergence target was re-aimed at the lowest
    /// non-orthogonal level.
    pub orthogonal_start: bool,
    /// First eigenvalue index of the target cluster (0 unless the start
    /// was orthogonal).
    pub target_level: usize,
    /// Size of the target cluster, when known.
    pub target_multiplicity: Option<usize>,
    /// Trotter accounting, for Trotterised/compiled runs.
    pub trotter: Option<TrotterInfo>,
}

impl EvolutionTrace {
    /// An empty trace for `qubits` qubits with unknown metadata.
    pub fn new(qubits: usize) -> Self {
        Self {
            times: Vec::new(),
            energy: Vec::new(),
            fidelity: Vec::new(),
            gradient_norm_sq: Vec::new(),
            fidelity_bound: Vec::new(),
            norm_log: Vec::new(),
            qubits,
            ground_multiplicity: None,
            gap: None,
            f0: f64::NAN,
            orthogonal_start: false,
            target_level: 0,
            target_multiplicity: None,
            trotter: None,
        }
    }

    /// Appends one sampled row.
    pub fn push_row(
        &mut self,
        t: f64,
        energy: f64,
        fidelity: f64,
        gradient_norm_sq: f64,
        fidelity_bound: f64,
        norm_log: f64,
    ) {
        debug_assert!(self.times.last().map_or(true, |last| t > *last));
        self.times.push(t);
        self.energy.push(energy);
        self.fidelity.push(fidelity);
        self.gradient_norm_sq.push(gradient_norm_sq);
        self.fidelity_bound.push(fidelity_bound);
        self.norm_log.push(norm_log);
    }

    /// Number of sampled rows.
    pub fn len(&self) -> usize {
        self.times.len()
    }

    /// Whether the trace has no rows.
    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Whether energy is non-increasing along the trace within `slack`.
    pub fn energy_is_monotone(&self, slack: f64) -> bool {
        self.energy.windows(2).all(|w| w[1] <= w[0] + slack)
    }

    /// Whether fidelity is non-decreasing along the trace within
    /// `slack` (`NaN` rows vacuously pass).
    pub fn fidelity_is_monotone(&self, slack: f64) -> bool {
        self.fidelity
            .windows(2)
            .all(|w| w[0].is_nan() || w[1].is_nan() || w[1] >= w[0] - slack)
    }

    /// Whether every sampled fidelity dominates its a-priori bound
    /// within `slack` (`NaN` rows vacuously pass).
    pub fn bound_is_dominated(&self, slack: f64) -> bool {
        self.fidelity
            .iter()
            .zip(&self.fidelity_bound)
            .all(|(f, b)| f.is_nan() || b.is_nan() || *f >= *b - slack)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_trace() -> EvolutionTrace {
        let mut tr = EvolutionTrace::new(1);
        tr.push_row(0.0, 0.5, 0.50, 1.0, 0.50, 0.0);
        tr.push_row(1.0, -0.3, 0.80, 0.5, 0.75, -0.2);
        tr.push_row(2.0, -0.9, 0.99, 0.1, 0.95, -0.9);
        tr
    }

    #[test]
    fn monotonicity_helpers_read_the_columns() {
        let tr = toy_trace();
        assert_eq!(tr.len(), 3);
        assert!(tr.energy_is_monotone(0.0));
        assert!(tr.fidelity_is_monotone(0.0));
        assert!(tr.bound_is_dominated(0.0));

        let mut bad = toy_trace();
        bad.energy[2] = 0.6;
        assert!(!bad.energy_is_monotone(1e-9));
        assert!(bad.energy_is_monotone(1.0));
    }

    #[test]
    fn nan_rows_pass_vacuously() {
        let mut tr = EvolutionTrace::new(2);
        tr.push_row(0.0, 1.0, f64::NAN, 0.3, f64::NAN, 0.0);
        tr.push_row(0.5, 0.9, f64::NAN, 0.2, f64::NAN, -0.1);
        assert!(tr.fidelity_is_monotone(0.0));
        assert!(tr.bound_is_dominated(0.0));
    }
}
