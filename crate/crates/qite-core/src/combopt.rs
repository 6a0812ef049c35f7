//! QUBO front-end: encode binary quadratic objectives as diagonal
//! Pauli-Z Hamiltonians, run ITE from the equal superposition, and
//! check the a-priori success-probability guarantees.
//!
//! The substitution `x_i = (1 − Z_i)/2` (bit 0 ↦ eigenvalue +1) turns
//!
//! ```text
//! f(x) = Σ_i l_i x_i + Σ_{i<j} q_ij x_i x_j
//! ```
//!
//! into a Hamiltonian of `I`/`Z` strings of weight ≤ 2 whose eigenvalue
//! on the basis state `|x⟩` equals `f(x)` *exactly* — the constant
//! offset is kept as an explicit identity term so that the minimum
//! count `μ` and the spectral gap `Δ` read directly off the objective.
//! For such diagonal Hamiltonians the computational basis is the
//! eigenbasis, so the success probability of a measurement after
//! imaginary time `t` obeys
//!
//! ```text
//! p(t) = Σ_{j<μ} |α_j(t)|² ≥ 1 / (1 + 2^Q μ^{-1} e^{-2tΔ})
//! ```
//!
//! from the equal-superposition start, reaching any target `ε` by
//! `t ≥ (Q ln2 − ln μ + ln ε − ln(1−ε)) / (2Δ)` — linear in `Q/Δ`.
//! Repeating the measurement `S` times boosts the success chance to
//! `1 − (1−ε)^S`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

// With std (tests) the inherent f64 methods win and this import idles.
#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::ite_exact::exact_evolve;
use crate::ite_trotter::trotter_evolve;
use crate::pauli::{Hamiltonian, Pauli, PauliString, PauliTerm};
use crate::state::{index_to_bits, StateVector};
use crate::varqite::{compile_evolution, GeneratorPolicy};

/// Variable-count cap for exhaustive enumeration.
pub const BRUTE_FORCE_CAP: usize = 20;

/// A quadratic unconstrained binary optimisation instance, always in
/// minimisation sense. The quadratic part is strictly upper triangular
/// (`i < j`); diagonal entries fold into the linear part since
/// `x_i² = x_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuboInstance {
    n: usize,
    linear: Vec<f64>,
    quadratic: BTreeMap<(usize, usize), f64>,
}

impl QuboInstance {
    /// Builds an instance over `linear.len()` variables.
    ///
    /// # Errors
    ///
    /// Zero variables, non-finite coefficients, or quadratic keys that
    /// are out of range or not strictly upper triangular.
    pub fn new(linear: Vec<f64>, quadratic: BTreeMap<(usize, usize), f64>) -> Result<Self> {
        let n = linear.len();
        if n == 0 {
            return Err(Error::OutOfDomain {
                name: "n",
                value: 0.0,
                requirement: "requires at least one variable",
            });
        }
        for (i, v) in linear.iter().enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    what: "linear coefficient",
                    value: *v,
                });
            }
            let _ = i;
        }
        for (&(i, j), v) in &quadratic {
            if i >= j || j >= n {
                return Err(Error::OutOfDomain {
                    name: "quadratic index",
                    value: j as f64,
                    requirement: "requires 0 <= i < j < n",
                });
            }
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    what: "quadratic coefficient",
                    value: *v,
                });
            }
        }
        Ok(Self {
            n,
            linear,
            quadratic,
        })
    }

    /// Variable count.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Linear coefficients.
    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    /// Strictly upper-triangular quadratic coefficients.
    pub fn quadratic(&self) -> &BTreeMap<(usize, usize), f64> {
        &self.quadratic
    }

    /// Objective value at the assignment encoded by a basis-state
    /// index: variable `i` is bit `n−1−i` of the index (so the leftmost
    /// character of the bitstring is variable 0, matching the sampling
    /// convention).
    pub fn objective(&self, index: usize) -> f64 {
        let bit = |i: usize| (index >> (self.n - 1 - i)) & 1;
        let mut acc = 0.0;
        for (i, l) in self.linear.iter().enumerate() {
            if bit(i) == 1 {
                acc += l;
            }
        }
        for (&(i, j), q) in &self.quadratic {
            if bit(i) == 1 && bit(j) == 1 {
                acc += q;
            }
        }
        acc
    }
}

/// Encodes a QUBO as a diagonal Hamiltonian via `x_i = (1 − Z_i)/2`.
///
/// Term order is deterministic: the identity term first (always
/// present, even at coefficient 0), then single-`Z` terms by variable,
/// then `ZZ` terms by `(i, j)` — each included only when its
/// accumulated coefficient is nonzero. The eigenvalue on `|x⟩` equals
/// the objective at `x` exactly (same additions, no matrix round
/// trips).
pub fn qubo_to_hamiltonian(q: &QuboInstance) -> Result<Hamiltonian> {
    let n = q.n();
    let mut identity = 0.0f64;
    let mut z = alloc::vec![0.0f64; n];
    let mut zz: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (i, l) in q.linear().iter().enumerate() {
        identity += 0.5 * l;
        z[i] -= 0.5 * l;
    }
    for (&(i, j), qc) in q.quadratic() {
        identity += 0.25 * qc;
        z[i] -= 0.25 * qc;
        z[j] -= 0.25 * qc;
        *zz.entry((i, j)).or_insert(0.0) += 0.25 * qc;
    }

    let string_with = |positions: &[usize]| -> Result<PauliString> {
        let mut ops = alloc::vec![Pauli::I; n];
        for &p in positions {
            ops[p] = Pauli::Z;
        }
        PauliString::new(ops)
    };
    let mut terms = Vec::new();
    terms.push(PauliTerm::new(identity, string_with(&[])?)?);
    for (i, c) in z.iter().enumerate() {
        if *c != 0.0 {
            terms.push(PauliTerm::new(*c, string_with(&[i])?)?);
        }
    }
    for (&(i, j), c) in &zz {
        if *c != 0.0 {
            terms.push(PauliTerm::new(*c, string_with(&[i, j])?)?);
        }
    }
    Hamiltonian::new(terms)
}

/// Exhaustively enumerates all `2^n` assignments, returning every
/// minimiser (as bitstrings, ascending) and the minimum value. Ties
/// use exact float equality, which is the right notion here: equal
/// objective values produce equal eigenvalues by construction.
///
/// # Errors
///
/// `n >` [`BRUTE_FORCE_CAP`].
pub fn brute_force_minima(q: &QuboInstance) -> Result<(Vec<String>, f64)> {
    if q.n() > BRUTE_FORCE_CAP {
        return Err(Error::StateCapExceeded {
            qubits: q.n(),
            cap: BRUTE_FORCE_CAP,
        });
    }
    let dim = 1usize << q.n();
    let mut best = f64::INFINITY;
    let mut minima: Vec<usize> = Vec::new();
    for x in 0..dim {
        let v = q.objective(x);
        if v < best {
            best = v;
            minima.clear();
            minima.push(x);
        } else if v == best {
            minima.push(x);
        }
    }
    Ok((
        minima
            .into_iter()
            .map(|x| index_to_bits(q.n(), x))
            .collect(),
        best,
    ))
}

/// Spectral summary of a diagonal instance, from enumeration rather
/// than matrix diagonalisation (exact for this problem class and valid
/// up to the brute-force cap, beyond any dense-matrix limit).
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalSpectrum {
    /// Every minimiser bitstring, ascending.
    pub minima: Vec<String>,
    /// Minimum objective value (= ground energy).
    pub min_value: f64,
    /// Ground multiplicity `μ = minima.len()`.
    pub mu: usize,
    /// Gap to the next distinct objective value; `None` when the
    /// objective is constant (identity-multiple Hamiltonian).
    pub gap: Option<f64>,
}

/// Enumerates minima, multiplicity and gap of the diagonal encoding.
///
/// # Errors
///
/// As [`brute_force_minima`].
pub fn diagonal_spectrum(q: &QuboInstance) -> Result<DiagonalSpectrum> {
    let (minima, min_value) = brute_force_minima(q)?;
    let mu = minima.len();
    let dim = 1usize << q.n();
    let mut next = f64::INFINITY;
    for x in 0..dim {
        let v = q.objective(x);
        if v > min_value && v < next {
            next = v;
        }
    }
    let gap = if next.is_finite() {
        Some(next - min_value)
    } else {
        None
    };
    Ok(DiagonalSpectrum {
        minima,
        min_value,
        mu,
        gap,
    })
}

/// Probability that a computational-basis measurement of `state` hits
/// one of `minima`.
///
/// # Errors
///
/// Unnormalised state or a bitstring not matching the register width.
pub fn success_probability(state: &StateVector, minima: &[String]) -> Result<f64> {
    let norm = state.norm();
    if (norm - 1.0).abs() > 1e-6 {
        return Err(Error::NotNormalised { norm });
    }
    let mut p = 0.0;
    for bits in minima {
        let idx = crate::state::bits_to_index(state.qubits(), bits)?;
        p += state.amps()[idx].norm_sqr();
    }
    Ok(p)
}

/// The a-priori success bound `1/(1 + 2^Q μ^{-1} e^{-2tΔ})`, evaluated
/// in log space so large `Q` cannot overflow.
///
/// # Errors
///
/// `μ = 0`, non-positive gap, or negative/non-finite `t`.
pub fn success_bound(qubits: usize, mu: usize, gap: f64, t: f64) -> Result<f64> {
    if mu == 0 {
        return Err(Error::OutOfDomain {
            name: "mu",
            value: 0.0,
            requirement: "requires mu >= 1",
        });
    }
    if !(gap > 0.0 && gap.is_finite()) {
        return Err(Error::OutOfDomain {
            name: "gap",
            value: gap,
            requirement: "requires a finite gap > 0",
        });
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::OutOfDomain {
            name: "t",
            value: t,
            requirement: "requires finite t >= 0",
        });
    }
    let exponent = qubits as f64 * core::f64::consts::LN_2 - (mu as f64).ln() - 2.0 * t * gap;
    Ok(1.0 / (1.0 + exponent.exp()))
}

/// Time after which [`success_bound`] reaches `ε`:
/// `t ≥ (Q ln2 − ln μ + ln ε − ln(1−ε)) / (2Δ)`, clamped at 0.
///
/// # Errors
///
/// `ε ∉ (0,1)`, `μ = 0`, or a non-positive gap.
pub fn threshold_time(qubits: usize, mu: usize, gap: f64, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::OutOfDomain {
            name: "epsilon",
            value: epsilon,
            requirement: "requires 0 < epsilon < 1",
        });
    }
    if mu == 0 {
        return Err(Error::OutOfDomain {
            name: "mu",
            value: 0.0,
            requirement: "requires mu >= 1",
        });
    }
    if !(gap > 0.0 && gap.is_finite()) {
        return Err(Error::OutOfDomain {
            name: "gap",
            value: gap,
            requirement: "requires a finite gap > 0",
        });
    }
    let t = (qubits as f64 * core::f64::consts::LN_2 - (mu as f64).ln() + epsilon.ln()
        - (1.0 - epsilon).ln())
        / (2.0 * gap);
    Ok(t.max(0.0))
}

/// Probability that at least one of `S` independent measurements
/// succeeds when each succeeds with probability `ε`: `1 − (1−ε)^S`.
/// At `ε = n/S` this converges to `1 − e^{-n}` for large `S`.
///
/// # Errors
///
/// `ε ∉ [0,1]` or `S = 0`.
pub fn shot_success(epsilon: f64, shots: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::OutOfDomain {
            name: "epsilon",
            value: epsilon,
            requirement: "requires 0 <= epsilon <= 1",
        });
    }
    if shots == 0 {
        return Err(Error::OutOfDomain {
            name: "shots",
            value: 0.0,
            requirement: "requires shots >= 1",
        });
    }
    Ok(1.0 - (1.0 - epsilon).powf(shots as f64))
}

/// Evolution backend for [`run_combinatorial`], with its own knobs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Backend {
    /// Eigenbasis evolution (exact; needs the dense-diagonalisation
    /// cap).
    Exact,
    /// First-order Trotter product with step `delta`.
    Trotter {
        /// Trotter step.
        delta: f64,
    },
    /// Compiled parametric circuits with step `delta`.
    Varqite {
        /// Trotter step driving the compilation.
        delta: f64,
        /// Generator-set policy per step.
        policy: GeneratorPolicy,
    },
}

/// Outcome of a combinatorial run, pairing the measured success
/// probability with the a-priori guarantees.
#[derive(Debug, Clone, PartialEq)]
pub struct SuccessReport {
    /// Evolution time used (the ε-threshold time).
    pub t: f64,
    /// Success probability of the evolved state, `Σ_minima |α|²`.
    pub p_measured: f64,
    /// A-priori bound at `t`.
    pub p_bound: f64,
    /// Target single-shot success threshold ε.
    pub epsilon: f64,
    /// Measurement repetitions per experiment.
    pub shots: u64,
    /// `1 − (1 − p_measured)^S`.
    pub success_prob_shots: f64,
    /// All minimiser bitstrings.
    pub minima: Vec<String>,
    /// Ground multiplicity μ.
    pub mu: usize,
    /// Whether `p_measured ≥ p_bound − 1e−9`; guaranteed (and enforced)
    /// for the exact backend, reported for approximate ones.
    pub bound_ok: bool,
    /// Fraction of repeated experiments in which at least one sampled
    /// bitstring was a minimiser.
    pub empirical_success: f64,
    /// Number of repeated experiments behind `empirical_success`.
    pub repeats: u32,
}

/// Runs the full combinatorial pipeline: encode, evolve the equal
/// superposition to the ε-threshold time, measure, and verify the
/// guarantees.
///
/// A constant objective (identity-multiple Hamiltonian) short-circuits
/// to `t = 0`: every assignment is optimal and `p = 1`.
///
/// The empirical success rate re-runs the `S`-shot experiment
/// `repeats` times on split streams of `seed`; each experiment counts
/// as a success if any sampled bitstring is a minimiser. For the exact
/// backend a violation of the a-priori bound is a hard error (it would
/// indicate a defect, not noise); approximate backends report it via
/// `bound_ok`.
///
/// # Errors
///
/// Invalid ε/shots/repeats, instance caps, backend failures (including
/// aborted compilations), or an exact-backend bound violation.
pub fn run_combinatorial(
    q: &QuboInstance,
    epsilon: f64,
    shots: u64,
    seed: u64,
    backend: Backend,
    repeats: u32,
) -> Result<SuccessReport> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::OutOfDomain {
            name: "epsilon",
            value: epsilon,
            requirement: "requires 0 < epsilon < 1",
        });
    }
    if repeats == 0 {
        return Err(Error::OutOfDomain {
            name: "repeats",
            value: 0.0,
            requirement: "requires repeats >= 1",
        });
    }
    let h = qubo_to_hamiltonian(q)?;
    let diag = diagonal_spectrum(q)?;
    let qubits = q.n();

    let (t, p_bound) = match diag.gap {
        Some(gap) => {
            let t = threshold_time(qubits, diag.mu, gap, epsilon)?;
            (t, success_bound(qubits, diag.mu, gap, t)?)
        }
        // Constant objective: no evolution needed, bound at t = 0.
        None => (0.0, 1.0 / (1.0 + (qubits as f64).exp2() / diag.mu as f64)),
    };

    let start = StateVector::equal_superposition(qubits)?;
    let final_state = match backend {
        Backend::Exact => exact_evolve(&start, &h, t, 2)?.final_state,
        Backend::Trotter { delta } => trotter_evolve(&start, &h, t, delta, None)?.final_state,
        Backend::Varqite { delta, policy } => {
            let compiled = compile_evolution(&start, &h, t, delta, policy, None)?;
            if let crate::varqite::CompileStatus::Aborted { error, .. } = compiled.status {
                return Err(error);
            }
            compiled.final_state
        }
    };

    let p_measured = success_probability(&final_state, &diag.minima)?;
    let bound_ok = p_measured >= p_bound - 1e-9;
    if !bound_ok && matches!(backend, Backend::Exact) {
        return Err(Error::OutOfDomain {
            name: "p_measured",
            value: p_measured,
            requirement: "requires p >= bound - 1e-9 on the exact backend",
        });
    }
    let success_prob_shots = shot_success(p_measured, shots)?;

    let minima_set: alloc::collections::BTreeSet<&str> =
        diag.minima.iter().map(|s| s.as_str()).collect();
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut hits = 0u32;
    for _ in 0..repeats {
        let counts = final_state.sample_z_with(shots, &mut rng)?;
        if counts
            .counts()
            .keys()
            .any(|bits| minima_set.contains(bits.as_str()))
        {
            hits += 1;
        }
    }

    Ok(SuccessReport {
        t,
        p_measured,
        p_bound,
        epsilon,
        shots,
        success_prob_shots,
        minima: diag.minima,
        mu: diag.mu,
        bound_ok,
        empirical_success: f64::from(hits) / f64::from(repeats),
        repeats,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::eigendecompose;

    fn xor_instance() -> QuboInstance {
        // f(x) = x₀ + x₁ − 2x₀x₁, minimised exactly on agreement.
        let mut quad = BTreeMap::new();
        quad.insert((0, 1), -2.0);
        QuboInstance::new(alloc::vec![1.0, 1.0], quad).unwrap()
    }

    #[test]
    fn xor_encodes_to_half_identity_minus_half_zz() {
        let h = qubo_to_hamiltonian(&xor_instance()).unwrap();
        let printed: Vec<String> = h
            .terms()
            .iter()
            .map(|t| alloc::format!("{} {}", t.coefficient, t.string))
            .collect();
        assert_eq!(printed, ["0.5 II", "-0.5 ZZ"]);
        let spectrum = eigendecompose(&h, None).unwrap();
        assert_eq!(spectrum.eigenvalues(), &[0.0, 0.0, 1.0, 1.0]);
        assert_eq!(spectrum.ground_multiplicity(), 2);
        assert_eq!(spectrum.gap(), Some(1.0));
    }

    #[test]
    fn single_variable_and_constant_objectives() {
        let h = qubo_to_hamiltonian(&QuboInstance::new(alloc::vec![1.0], BTreeMap::new()).unwrap())
            .unwrap();
        let printed: Vec<String> = h
            .terms()
            .iter()
            .map(|t| alloc::format!("{} {}", t.coefficient, t.string))
            .collect();
        assert_eq!(printed, ["0.5 I", "-0.5 Z"]);

        let zero = QuboInstance::new(alloc::vec![0.0, 0.0], BTreeMap::new()).unwrap();
        let hz = qubo_to_hamiltonian(&zero).unwrap();
        assert_eq!(hz.terms().len(), 1);
        assert!(hz.terms()[0].string.is_identity());
        assert_eq!(hz.terms()[0].coefficient, 0.0);
        let s = eigendecompose(&hz, None).unwrap();
        assert!(s.is_identity_multiple());
    }

    #[test]
    fn encoding_matches_objective_on_every_bitstring() {
        // Deterministic pseudo-random instance, n = 6.
        let n = 6;
        let mut linear = Vec::new();
        let mut quad = BTreeMap::new();
        let mut x = 0.37f64;
        let mut next = move || {
            x = (x * 997.0 + 0.123).fract() * 2.0 - 1.0;
            x
        };
        for _ in 0..n {
            linear.push(next());
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if (i + j) % 2 == 0 {
                    quad.insert((i, j), next());
                }
            }
        }
        let q = QuboInstance::new(linear, quad).unwrap();
        let h = qubo_to_hamiltonian(&q).unwrap();
        for x in 0..(1usize << n) {
            let basis = StateVector::basis_state(n, &index_to_bits(n, x)).unwrap();
            let e = h.expectation(&basis).unwrap();
            assert!(
                (e - q.objective(x)).abs() < 1e-10,
                "index {x}: {e} vs {}",
                q.objective(x)
            );
        }
    }

    #[test]
    fn brute_force_finds_all_minima() {
        let (minima, value) = brute_force_minima(&xor_instance()).unwrap();
        assert_eq!(minima, ["00", "11"]);
        assert_eq!(value, 0.0);
        let single = QuboInstance::new(alloc::vec![1.0], BTreeMap::new()).unwrap();
        assert_eq!(
            brute_force_minima(&single).unwrap(),
            (alloc::vec!["0".into()], 0.0)
        );
        let constant = QuboInstance::new(alloc::vec![0.0, 0.0], BTreeMap::new()).unwrap();
        assert_eq!(brute_force_minima(&constant).unwrap().0.len(), 4);
        let big = QuboInstance::new(alloc::vec![0.0; 21], BTreeMap::new()).unwrap();
        assert!(brute_force_minima(&big).is_err());
    }

    #[test]
    fn diagonal_spectrum_matches_eigendecompose() {
        let q = xor_instance();
        let diag = diagonal_spectrum(&q).unwrap();
        assert_eq!(diag.mu, 2);
        assert_eq!(diag.gap, Some(1.0));
        assert_eq!(diag.min_value, 0.0);
        let h = qubo_to_hamiltonian(&q).unwrap();
        let s = eigendecompose(&h, None).unwrap();
        assert_eq!(s.ground_multiplicity(), diag.mu);
        assert_eq!(s.gap(), diag.gap);
    }

    #[test]
    fn success_probability_examples() {
        let minima: Vec<String> = alloc::vec!["00".into(), "11".into()];
        let plus = StateVector::equal_superposition(2).unwrap();
        assert!((success_probability(&plus, &minima).unwrap() - 0.5).abs() < 1e-12);
        let basis = StateVector::basis_state(2, "11").unwrap();
        assert!((success_probability(&basis, &minima).unwrap() - 1.0).abs() < 1e-12);
        // Exact ITE of the XOR encoding at t = 1: p = 1/(1 + e^{-2}).
        let h = qubo_to_hamiltonian(&xor_instance()).unwrap();
        let run = exact_evolve(&plus, &h, 1.0, 2).unwrap();
        let p = success_probability(&run.final_state, &minima).unwrap();
        assert!((p - 1.0 / (1.0 + (-2.0f64).exp())).abs() < 1e-10);
        assert!((p - 0.8808).abs() < 1e-4);
    }

    #[test]
    fn success_bound_examples() {
        let b = success_bound(2, 2, 1.0, 1.0).unwrap();
        assert!((b - 1.0 / (1.0 + 2.0 * (-2.0f64).exp())).abs() < 1e-12);
        assert!((b - 0.7870).abs() < 1e-4);
        // t = 0 closed form and the t → ∞ limit.
        assert!((success_bound(4, 2, 1.0, 0.0).unwrap() - 1.0 / 9.0).abs() < 1e-12);
        assert!(success_bound(4, 2, 1.0, 1e6).unwrap() > 1.0 - 1e-12);
        // Large instances stay finite (log-space evaluation).
        let tiny = success_bound(400, 1, 1.0, 0.0).unwrap();
        assert!((0.0..1e-100).contains(&tiny));
        assert!(success_bound(2, 0, 1.0, 1.0).is_err());
        assert!(success_bound(2, 2, 0.0, 1.0).is_err());
        assert!(success_bound(2, 2, 1.0, -1.0).is_err());
    }

    #[test]
    fn threshold_time_examples_and_exactness() {
        let t = threshold_time(4, 2, 1.0, 0.5).unwrap();
        assert!((t - 1.5 * core::f64::consts::LN_2).abs() < 1e-12);
        assert!((t - 1.0397).abs() < 1e-4);
        // Substituting back reaches exactly ε.
        for (qb, mu, gap, eps) in [(4, 2, 1.0, 0.5), (6, 3, 0.7, 0.9), (3, 1, 2.0, 0.2)] {
            let tt = threshold_time(qb, mu, gap, eps).unwrap();
            let b = success_bound(qb, mu, gap, tt).unwrap();
            assert!((b - eps).abs() < 1e-12, "{b} vs {eps}");
        }
        // Already-met bounds clamp to zero.
        let eps0 = 2.0 / (4.0 + 2.0); // μ2^{-Q}/(1+μ2^{-Q}) at Q=2, μ=2
        assert_eq!(threshold_time(2, 2, 1.0, eps0 - 0.05).unwrap(), 0.0);
        // Doubling Q adds Q ln2 / (2Δ).
        let t8 = threshold_time(8, 2, 1.0, 0.5).unwrap();
        assert!((t8 - t - 4.0 * core::f64::consts::LN_2 / 2.0).abs() < 1e-12);
        assert!(threshold_time(4, 2, 1.0, 1.0).is_err());
    }

    #[test]
    fn shot_success_examples() {
        let p = shot_success(0.1, 30).unwrap();
        assert!((p - (1.0 - 0.9f64.powi(30))).abs() < 1e-12);
        assert!((p - 0.9576).abs() < 1e-4);
        assert_eq!(shot_success(1.0, 7).unwrap(), 1.0);
        // ε = n/S with n = 1: approaches 1 − e^{-1}.
        let limit = shot_success(1.0 / 1e5, 100_000).unwrap();
        assert!((limit - (1.0 - (-1.0f64).exp())).abs() < 1e-4);
        assert!(shot_success(1.1, 3).is_err());
        assert!(shot_success(0.5, 0).is_err());
    }

    #[test]
    fn xor_run_meets_the_bound_at_threshold_time() {
        let report = run_combinatorial(&xor_instance(), 0.5, 8, 7, Backend::Exact, 50).unwrap();
        assert!((report.t - 0.5 * core::f64::consts::LN_2).abs() < 1e-12);
        // p(t) = 1/(1 + e^{-2t}) = 2/3 at t = ln2/2; bound = ε = 1/2.
        assert!((report.p_measured - 2.0 / 3.0).abs() < 1e-10);
        assert!((report.p_bound - 0.5).abs() < 1e-12);
        assert!(report.bound_ok);
        assert_eq!(report.mu, 2);
        assert_eq!(report.minima, ["00", "11"]);
        let expect_shots = 1.0 - (1.0f64 / 3.0).powi(8);
        assert!((report.success_prob_shots - expect_shots).abs() < 1e-12);
        // 50 repeats of 8 shots at p = 2/3 per shot: failures are rare
        // but possible; the empirical rate must sit near the formula.
        assert!(report.empirical_success >= expect_shots - 0.2);
        assert!(report.empirical_success <= 1.0);
    }

    #[test]
    fn constant_objective_short_circuits() {
        let zero = QuboInstance::new(alloc::vec![0.0, 0.0], BTreeMap::new()).unwrap();
        let report = run_combinatorial(&zero, 0.5, 1, 3, Backend::Exact, 5).unwrap();
        assert_eq!(report.t, 0.0);
        assert_eq!(report.p_measured, 1.0);
        assert_eq!(report.mu, 4);
        // p = 1 with one shot: success every time.
        assert_eq!(report.empirical_success, 1.0);
        assert_eq!(report.success_prob_shots, 1.0);
    }

    #[test]
    fn trotter_and_varqite_backends_agree_with_exact() {
        let q = xor_instance();
        let exact = run_combinatorial(&q, 0.5, 4, 11, Backend::Exact, 10).unwrap();
        // δ must divide the threshold time exactly — the product formula
        // rounds to whole layers — and then all-Z instances are
        // Trotter-exact.
        let delta = exact.t / 8.0;
        let trotter = run_combinatorial(&q, 0.5, 4, 11, Backend::Trotter { delta }, 10).unwrap();
        assert!((trotter.p_measured - exact.p_measured).abs() < 1e-12);
        assert!(trotter.bound_ok);
        let varqite = run_combinatorial(
            &q,
            0.5,
            4,
            11,
            Backend::Varqite {
                delta,
                policy: GeneratorPolicy::Reduced,
            },
            10,
        )
        .unwrap();
        assert!((varqite.p_measured - exact.p_measured).abs() < 1e-4);
    }

    #[test]
    fn instance_validation() {
        assert!(QuboInstance::new(alloc::vec![], BTreeMap::new()).is_err());
        let mut bad = BTreeMap::new();
        bad.insert((1, 1), 1.0);
        assert!(QuboInstance::new(alloc::vec![1.0, 2.0], bad).is_err());
        let mut oob = BTreeMap::new();
        oob.insert((0, 2), 1.0);
        assert!(QuboInstance::new(alloc::vec![1.0, 2.0], oob).is_err());
        let inf = alloc::vec![f64::INFINITY];
        assert!(QuboInstance::new(inf, BTreeMap::new()).is_err());
    }
}
