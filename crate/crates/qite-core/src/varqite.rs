//! Compilation of ITE factors into parametric Pauli-rotation circuits.
//!
//! Each non-unitary Trotter factor `e^{-δaS}` is replaced by a unitary
//! circuit `C(θ)` of Pauli rotations on the support of `S`, with the
//! angles chosen to maximise the overlap functional
//!
//! ```text
//! Ω(δ, θ) = ⟨ψ| (cosh(δa) − sinh(δa)·S) C(θ) |ψ⟩
//! ```
//!
//! on the current state `ψ`. The maximiser of `Re Ω` aligns `C(θ)|ψ⟩`
//! with the normalised ITE step both in direction and phase, and the
//! achieved step fidelity is `Re Ω / ‖(cosh − sinh·S)ψ‖`.
//!
//! In the variables `s_j = sin(θ_j/2)`, `c_j = cos(θ_j/2)` (see
//! [`TrigPoint`]) the stationarity conditions are polynomial, with the
//! trivial solution `θ = 0` at `δ = 0`. That structure drives the two
//! solvers here:
//!
//! * [`solve_step`] — damped Newton on `∇_θ Re Ω = 0` seeded at `θ = 0`
//!   (the optimum is `O(δ)` away), with gradient and Hessian evaluated
//!   exactly by parameter-shift rules rather than finite differences;
//! * [`continuation_solve`] — homotopy in `δ` from the trivial solution
//!   for steps too aggressive for a cold Newton start, halving the
//!   sub-step on failure down to `delta_min`.
//!
//! A full evolution is compiled by [`compile_evolution`], which solves
//! every `(layer, term)` step on the state of the simulated device
//! immediately prior, applies the circuit unitarily, and reports a
//! per-layer trace plus the gate-count accounting.
//!
//! # Parameter-shift conventions
//!
//! With `R_j(θ) = cos(θ/2)I − i·sin(θ/2)P_j`, the functional Ω is
//! *linear* in each rotation, hence a half-frequency sinusoid in each
//! angle (period `4π`). The exact shift identities are therefore
//!
//! ```text
//! ∂_j Re Ω  = [Re Ω(θ_j + π/2) − Re Ω(θ_j − π/2)] / (2√2)
//! ∂_j∂_k Re Ω = [++ − +− − −+ + −−] / 8            (j ≠ k, ±π/2 shifts)
//! ∂_j² Re Ω = −Re Ω(θ) / 4
//! ```
//!
//! (note the `2√2`, not the `2` of the expectation-value rule, whose
//! objective is quadratic in the circuit). Both identities are verified
//! against central finite differences in the test suite.

use alloc::vec;
use alloc::vec::Vec;

use nalgebra::{DMatrix, DVector};
// With std (tests) the inherent f64 methods win and this import idles.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::homotopy::{newton_correct, track_path, NewtonOptions, PathDiagnostics, TrackOptions};
use crate::pauli::{Hamiltonian, Pauli, PauliString, PauliTerm};
use crate::spectral::Spectrum;
use crate::state::StateVector;
use crate::trace::{EvolutionTrace, TrotterInfo};
use crate::Complex64;

/// Default gradient-norm tolerance for step solves.
pub const DEFAULT_STEP_TOL: f64 = 1e-9;
/// Default Newton iteration cap per step solve.
pub const DEFAULT_STEP_MAX_ITER: usize = 50;
/// Rank tolerance for the reduced generator policy.
pub const REDUCTION_TOL: f64 = 1e-8;
/// Tikhonov shift added to the Hessian before each Newton solve; near
/// `θ = 0` redundant generators make the Hessian ill-conditioned.
pub const HESSIAN_REGULARIZATION: f64 = 1e-12;

/// Smallest continuation sub-step for a given target, `δ/2^10`: bounded
/// work per step while keeping failures diagnosable.
pub fn default_delta_min(delta_target: f64) -> f64 {
    delta_target / 1024.0
}

/// How [`compile_evolution`] picks each step's generator set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GeneratorPolicy {
    /// All `4^w − 1` non-identity strings on the term's support —
    /// guaranteed expressive.
    #[default]
    Full,
    /// Prune generators whose initial tangent direction is linearly
    /// dependent on earlier ones for the current state (rank test with
    /// tolerance [`REDUCTION_TOL`]); faster, state-adapted.
    Reduced,
}

/// One Pauli rotation `R(θ) = e^{-i·θ/2·P}` inside a circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitGate {
    /// Hermitian generator `P` (never the identity string).
    pub generator: PauliString,
    /// Rotation angle in radians.
    pub angle: f64,
}

/// An ordered list of Pauli rotations on a fixed qubit subset.
///
/// Invariants, checked at construction: every generator is non-identity
/// and acts only inside `support`; the gate count never exceeds
/// `4^|support|`; and the circuit is the identity at all-zero angles
/// (which holds gate-by-gate since `R(0) = I`).
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricCircuit {
    qubits: usize,
    gates: Vec<CircuitGate>,
    support: Vec<usize>,
}

impl ParametricCircuit {
    /// Builds a circuit from explicit gates (angles included), deriving
    /// the support as the union of the gate supports.
    ///
    /// # Errors
    ///
    /// Identity generators, generators on the wrong register width, or
    /// more than `4^|support|` gates.
    pub fn new(qubits: usize, gates: Vec<CircuitGate>) -> Result<Self> {
        let mut support: Vec<usize> = Vec::new();
        for gate in &gates {
            if gate.generator.qubits() != qubits {
                return Err(Error::DimensionMismatch {
                    expected: qubits,
                    got: gate.generator.qubits(),
                });
            }
            if gate.generator.is_identity() {
                return Err(Error::OutOfDomain {
                    name: "generator",
                    value: 0.0,
                    requirement: "requires non-identity rotation generators",
                });
            }
            if !gate.angle.is_finite() {
                return Err(Error::NonFinite {
                    what: "gate angle",
                    value: gate.angle,
                });
            }
            for q in gate.generator.support() {
                if !support.contains(&q) {
                    support.push(q);
                }
            }
        }
        support.sort_unstable();
        let cap = 1usize
            .checked_shl(2 * support.len() as u32)
            .unwrap_or(usize::MAX);
        if gates.len() > cap {
            return Err(Error::OutOfDomain {
                name: "gates",
                value: gates.len() as f64,
                requirement: "requires at most 4^|support| rotation gates",
            });
        }
        Ok(Self {
            qubits,
            gates,
            support,
        })
    }

    /// Register width the circuit acts on.
    pub fn qubits(&self) -> usize {
        self.qubits
    }

    /// Gates in application order (first entry acts first).
    pub fn gates(&self) -> &[CircuitGate] {
        &self.gates
    }

    /// Number of rotation gates.
    pub fn len(&self) -> usize {
        self.gates.len()
    }

    /// Whether the circuit has no gates (identity).
    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    /// Qubits the circuit acts on, ascending.
    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Current angles, in gate order.
    pub fn angles(&self) -> Vec<f64> {
        self.gates.iter().map(|g| g.angle).collect()
    }

    /// Overwrites all angles.
    ///
    /// # Errors
    ///
    /// Length mismatch or non-finite angles.
    pub fn set_angles(&mut self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.gates.len() {
            return Err(Error::DimensionMismatch {
                expected: self.gates.len(),
                got: theta.len(),
            });
        }
        for (gate, &angle) in self.gates.iter_mut().zip(theta) {
            if !angle.is_finite() {
                return Err(Error::NonFinite {
                    what: "gate angle",
                    value: angle,
                });
            }
            gate.angle = angle;
        }
        Ok(())
    }

    /// Copy of the circuit with the given angles.
    pub fn with_angles(&self, theta: &[f64]) -> Result<Self> {
        let mut out = self.clone();
        out.set_angles(theta)?;
        Ok(out)
    }

    /// Applies the circuit in place with its stored angles.
    pub fn apply_in_place(&self, state: &mut StateVector) -> Result<()> {
        for gate in &self.gates {
            state.apply_rotation(&gate.generator, gate.angle)?;
        }
        Ok(())
    }

    /// `C(θ)|ψ⟩` with the stored angles.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        let mut out = state.clone();
        self.apply_in_place(&mut out)?;
        Ok(out)
    }
}

/// A point on the torus in the polynomial variables `s_j = sin(θ_j/2)`,
/// `c_j = cos(θ_j/2)`; the trivial solution `θ = 0` is `(s, c) = (0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigPoint {
    s: Vec<f64>,
    c: Vec<f64>,
}

impl TrigPoint {
    /// Exact trig point of an angle vector.
    pub fn from_angles(theta: &[f64]) -> Self {
        Self {
            s: theta.iter().map(|t| (0.5 * t).sin()).collect(),
            c: theta.iter().map(|t| (0.5 * t).cos()).collect(),
        }
    }

    /// Builds from raw coordinates, enforcing `s² + c² = 1` within
    /// `1e-12` per component.
    ///
    /// # Errors
    ///
    /// Length mismatch or an off-circle component.
    pub fn new(s: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        if s.len() != c.len() {
            return Err(Error::DimensionMismatch {
                expected: c.len(),
                got: s.len(),
            });
        }
        for (sj, cj) in s.iter().zip(&c) {
            let r = sj * sj + cj * cj;
            let deviation = (r - 1.0).abs();
            if deviation.is_nan() || deviation > 1e-12 {
                return Err(Error::OutOfDomain {
                    name: "s^2 + c^2",
                    value: r,
                    requirement: "requires s_j^2 + c_j^2 = 1 within 1e-12",
                });
            }
        }
        Ok(Self { s, c })
    }

    /// `sin(θ_j/2)` coordinates.
    pub fn s(&self) -> &[f64] {
        &self.s
    }

    /// `cos(θ_j/2)` coordinates.
    pub fn c(&self) -> &[f64] {
        &self.c
    }

    /// Number of angles.
    pub fn len(&self) -> usize {
        self.s.len()
    }

    /// Whether the point is empty.
    pub fn is_empty(&self) -> bool {
        self.s.is_empty()
    }

    /// Angles `θ_j = 2·atan2(s_j, c_j)` in `(−2π, 2π]`.
    pub fn angles(&self) -> Vec<f64> {
        self.s
            .iter()
            .zip(&self.c)
            .map(|(s, c)| 2.0 * s.atan2(*c))
            .collect()
    }
}

/// Builds the default (full-policy) ansatz for one term: all `4^w − 1`
/// non-identity Pauli strings on the term's weight-`w` support, ordered
/// lexicographically with `I < X < Y < Z`, each at angle 0. An identity
/// term yields an empty circuit (the factor is a pure normalisation and
/// needs no gates).
pub fn build_ansatz(term: &PauliTerm) -> Result<ParametricCircuit> {
    let qubits = term.string.qubits();
    let support = term.string.support();
    let w = support.len();
    if w == 0 {
        return ParametricCircuit::new(qubits, Vec::new());
    }
    let count = 1usize << (2 * w); // 4^w, w ≤ 64-qubit strings keep this tiny
    let mut gates = Vec::with_capacity(count - 1);
    for code in 1..count {
        let mut ops = vec![Pauli::I; qubits];
        for (k, &q) in support.iter().enumerate() {
            // Leftmost support position is the most significant digit,
            // which makes the enumeration order lexicographic.
            let digit = (code >> (2 * (w - 1 - k))) & 3;
            ops[q] = match digit {
                0 => Pauli::I,
                1 => Pauli::X,
                2 => Pauli::Y,
                _ => Pauli::Z,
            };
        }
        let generator = PauliString::new(ops)?;
        if generator.is_identity() {
            continue; // code 0 only; unreachable for code ≥ 1
        }
        gates.push(CircuitGate {
            generator,
            angle: 0.0,
        });
    }
    ParametricCircuit::new(qubits, gates)
}

/// Reduced generator policy: keeps the (greedily earliest) gates whose
/// initial tangent directions `−(i/2)P_j|ψ⟩` are linearly independent
/// over the reals, dropping the rest. Echoes dimensional-expressivity
/// pruning: dependent tangents add no first-order expressivity at
/// `θ = 0` for this state.
///
/// # Errors
///
/// Dimension mismatch between circuit and state.
pub fn reduce_for_state(
    circuit: &ParametricCircuit,
    state: &StateVector,
) -> Result<ParametricCircuit> {
    if circuit.qubits() != state.qubits() {
        return Err(Error::DimensionMismatch {
            expected: state.qubits(),
            got: circuit.qubits(),
        });
    }
    let dim = state.amps().len();
    // Realified tangents: [Re; Im] of −(i/2)P|ψ⟩ as 2·dim real vectors.
    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut kept = Vec::new();
    for gate in circuit.gates() {
        let mut image = state.clone();
        image.apply_pauli(&gate.generator)?;
        let mut v = vec![0.0f64; 2 * dim];
        for (k, a) in image.amps().iter().enumerate() {
            let t = Complex64::new(0.0, -0.5) * a;
            v[k] = t.re;
            v[dim + k] = t.im;
        }
        let scale = norm(&v); // = 1/2 exactly for normalised ψ
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            for (x, y) in v.iter_mut().zip(b) {
                *x -= dot * y;
            }
        }
        if norm(&v) > REDUCTION_TOL * scale {
            let inv = 1.0 / norm(&v);
            for x in &mut v {
                *x *= inv;
            }
            basis.push(v);
            kept.push(gate.clone());
        }
    }
    ParametricCircuit::new(circuit.qubits(), kept)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Shared evaluation context for one `(ψ, δ, term, circuit)` step: the
/// left vector `(cosh(δa) − sinh(δa)S)|ψ⟩` is fixed across all Ω
/// evaluations of a solve, so it is computed once.
struct OmegaEngine<'a> {
    base: &'a StateVector,
    circuit: &'a ParametricCircuit,
    left: StateVector,
    left_norm: f64,
}

impl<'a> OmegaEngine<'a> {
    fn new(
        state: &'a StateVector,
        delta: f64,
        term: &PauliTerm,
        circuit: &'a ParametricCircuit,
    ) -> Result<Self> {
        if term.string.qubits() != state.qubits() {
            return Err(Error::DimensionMismatch {
                expected: state.qubits(),
                got: term.string.qubits(),
            });
        }
        if circuit.qubits() != state.qubits() {
            return Err(Error::DimensionMismatch {
                expected: state.qubits(),
                got: circuit.qubits(),
            });
        }
        let state_norm = state.norm();
        if (state_norm - 1.0).abs() > 1e-6 {
            return Err(Error::NotNormalised { norm: state_norm });
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
        let mut left = state.clone();
        term.string.blend(
            left.amps_mut(),
            Complex64::new(angle.cosh(), 0.0),
            Complex64::new(-angle.sinh(), 0.0),
        );
        let left_norm = left.norm();
        if !left_norm.is_finite() {
            return Err(Error::NonFinite {
                what: "factor norm",
                value: left_norm,
            });
        }
        Ok(Self {
            base: state,
            circuit,
            left,
            left_norm,
        })
    }

    fn check_theta(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.circuit.len() {
            return Err(Error::DimensionMismatch {
                expected: self.circuit.len(),
                got: theta.len(),
            });
        }
        Ok(())
    }

    /// `Ω(δ, θ) = ⟨left|C(θ)|ψ⟩` (the factor is Hermitian, so it may be
    /// moved onto the bra).
    fn omega(&self, theta: &[f64]) -> Complex64 {
        let mut phi = self.base.clone();
        for (gate, &angle) in self.circuit.gates().iter().zip(theta) {
            phi.apply_rotation(&gate.generator, angle)
                .expect("engine-validated dimensions");
        }
        self.left.inner(&phi).expect("engine-validated dimensions")
    }

    fn re_omega(&self, theta: &[f64]) -> f64 {
        self.omega(theta).re
    }

    /// Exact gradient of `Re Ω` by the half-frequency parameter-shift
    /// rule (`±π/2` shifts, divisor `2√2`).
    fn gradient(&self, theta: &[f64]) -> Vec<f64> {
        let denom = 2.0 * core::f64::consts::SQRT_2;
        let mut shifted = theta.to_vec();
        let mut g = Vec::with_capacity(theta.len());
        for j in 0..theta.len() {
            shifted[j] = theta[j] + core::f64::consts::FRAC_PI_2;
            let plus = self.re_omega(&shifted);
            shifted[j] = theta[j] - core::f64::consts::FRAC_PI_2;
            let minus = self.re_omega(&shifted);
            shifted[j] = theta[j];
            g.push((plus - minus) / denom);
        }
        g
    }

    /// Exact Hessian of `Re Ω`: double `±π/2` shifts off the diagonal
    /// and the sinusoid identity `∂_j² Re Ω = −Re Ω/4` on it.
    fn hessian(&self, theta: &[f64]) -> DMatrix<f64> {
        let m = theta.len();
        let mut h = DMatrix::<f64>::zeros(m, m);
        let diag = -0.25 * self.re_omega(theta);
        let half_pi = core::f64::consts::FRAC_PI_2;
        let mut shifted = theta.to_vec();
        for j in 0..m {
            h[(j, j)] = diag;
            for k in (j + 1)..m {
                let mut four = 0.0;
                for (sj, sk, sign) in [
                    (1.0, 1.0, 1.0),
                    (1.0, -1.0, -1.0),
                    (-1.0, 1.0, -1.0),
                    (-1.0, -1.0, 1.0),
                ] {
                    shifted[j] = theta[j] + sj * half_pi;
                    shifted[k] = theta[k] + sk * half_pi;
                    four += sign * self.re_omega(&shifted);
                }
                shifted[j] = theta[j];
                shifted[k] = theta[k];
                let value = four / 8.0;
                h[(j, k)] = value;
                h[(k, j)] = value;
            }
        }
        h
    }

    fn regularized_hessian(&self, theta: &[f64]) -> DMatrix<f64> {
        let mut h = self.hessian(theta);
        for j in 0..theta.len() {
            h[(j, j)] += HESSIAN_REGULARIZATION;
        }
        h
    }

    fn step_fidelity(&self, theta: &[f64]) -> f64 {
        self.re_omega(theta) / self.left_norm
    }
}

/// The overlap functional `Ω(δ, θ) = ⟨ψ|(cosh(δa) − sinh(δa)S)C(θ)|ψ⟩`,
/// evaluated exactly by state-vector simulation. Its modulus is bounded
/// by `‖(cosh(δa) − sinh(δa)S)ψ‖ ≤ cosh(δ|a|) + |sinh(δa)|`.
///
/// # Errors
///
/// Dimension mismatches, unnormalised state, invalid `δ`, or a `θ`
/// length not matching the gate count.
pub fn omega(
    state: &StateVector,
    delta: f64,
    term: &PauliTerm,
    circuit: &ParametricCircuit,
    theta: &[f64],
) -> Result<Complex64> {
    let engine = OmegaEngine::new(state, delta, term, circuit)?;
    engine.check_theta(theta)?;
    Ok(engine.omega(theta))
}

/// Gradient of `Re Ω` with respect to `θ` via the exact parameter-shift
/// rule; matches central finite differences to `O(h²)` (validated at
/// `1e-7` in the test suite).
///
/// # Errors
///
/// As [`omega`].
pub fn omega_gradient(
    state: &StateVector,
    delta: f64,
    term: &PauliTerm,
    circuit: &ParametricCircuit,
    theta: &[f64],
) -> Result<Vec<f64>> {
    let engine = OmegaEngine::new(state, delta, term, circuit)?;
    engine.check_theta(theta)?;
    Ok(engine.gradient(theta))
}

/// Hessian of `Re Ω` by second-order parameter shifts (exact, not a
/// difference approximation).
///
/// # Errors
///
/// As [`omega`].
pub fn omega_hessian(
    state: &StateVector,
    delta: f64,
    term: &PauliTerm,
    circuit: &ParametricCircuit,
    theta: &[f64],
) -> Result<DMatrix<f64>> {
    let engine = OmegaEngine::new(state, delta, term, circuit)?;
    engine.check_theta(theta)?;
    Ok(engine.hessian(theta))
}

/// A solved (or best-effort) compilation step.
#[derive(Debug, Clone)]
pub struct StepSolution {
    /// Stationary angles (best iterate when not converged).
    pub theta: Vec<f64>,
    /// Polynomial-variable view of `theta`.
    pub trig: TrigPoint,
    /// Newton iterations consumed.
    pub iterations: usize,
    /// `‖∇ Re Ω‖` at `theta`.
    pub residual_norm: f64,
    /// Whether the gradient tolerance was met.
    pub converged: bool,
    /// `Re Ω / ‖(cosh − sinh·S)ψ‖` at `theta`; 1 means the circuit
    /// reproduces the normalised ITE step exactly.
    pub step_fidelity: f64,
}

/// Solves one compilation step by damped Newton on the stationarity
/// system `∇_θ Re Ω(δ, θ) = 0`, starting from `init_theta` (θ = 0 is
/// the natural seed: the solution is `O(δ)` away from it).
///
/// Non-convergence within `max_iter` is not an error — the best iterate
/// is returned with `converged = false` so the caller can fall back to
/// [`continuation_solve`] with a smaller effective step.
///
/// # Errors
///
/// Invalid inputs (see [`omega`]), `tol ≤ 0`, a mismatched
/// `init_theta`, or an exactly singular regularised Hessian.
pub fn solve_step(
    state: &StateVector,
    delta: f64,
    term: &PauliTerm,
    circuit: &ParametricCircuit,
    init_theta: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<StepSolution> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::OutOfDomain {
            name: "tol",
            value: tol,
            requirement: "requires finite tol > 0",
        });
    }
    let engine = OmegaEngine::new(state, delta, term, circuit)?;
    engine.check_theta(init_theta)?;
    if circuit.is_empty() {
        // Identity factor up to normalisation; nothing to solve.
        return Ok(StepSolution {
            theta: Vec::new(),
            trig: TrigPoint::from_angles(&[]),
            iterations: 0,
            residual_norm: 0.0,
            converged: true,
            step_fidelity: engine.step_fidelity(&[]),
        });
    }
    // The +1e-12 regularisation deliberately leaves near-zero curvature
    // directions with a tiny eigenvalue, so the raw condition number is
    // huge by design; damping, not a condition gate, handles those.
    let opts = NewtonOptions {
        tol,
        max_iter,
        cond_limit: f64::INFINITY,
        ..Default::default()
    };
    let outcome = newton_correct(
        |x| DVector::from_vec(engine.gradient(x.as_slice())),
        |x| engine.regularized_hessian(x.as_slice()),
        &DVector::from_column_slice(init_theta),
        &opts,
    )?;
    let theta: Vec<f64> = outcome.x.as_slice().to_vec();
    Ok(StepSolution {
        trig: TrigPoint::from_angles(&theta),
        step_fidelity: engine.step_fidelity(&theta),
        theta,
        iterations: outcome.iterations,
        residual_norm: outcome.residual_norm,
        converged: outcome.converged,
    })
}

/// A continuation-solved compilation step with its path trace.
#[derive(Debug, Clone)]
pub struct ContinuationSolution {
    /// Angles at `delta_target`.
    pub theta: Vec<f64>,
    /// Polynomial-variable view of `theta`.
    pub trig: TrigPoint,
    /// Step fidelity at `delta_target`.
    pub step_fidelity: f64,
    /// Accepted sub-steps and failure count.
    pub diagnostics: PathDiagnostics,
}

/// Tracks the stationary angles from the trivial solution
/// `(δ, θ) = (0, 0)` to `δ = delta_target`, warm-starting Newton at
/// each accepted sub-step and halving the sub-step on failure.
///
/// # Errors
///
/// Invalid inputs, or [`Error::ContinuationStalled`] when the sub-step
/// would drop below `delta_min` (the returned diagnostics carry the
/// partial path).
pub fn continuation_solve(
    state: &StateVector,
    term: &PauliTerm,
    circuit: &ParametricCircuit,
    delta_target: f64,
    delta_min: f64,
) -> Result<ContinuationSolution> {
    // Validates everything except δ-specific inputs, which track_path owns.
    OmegaEngine::new(state, 0.0, term, circuit)?;
    if circuit.is_empty() {
        let engine = OmegaEngine::new(state, delta_target.max(0.0), term, circuit)?;
        return Ok(ContinuationSolution {
            theta: Vec::new(),
            trig: TrigPoint::from_angles(&[]),
            step_fidelity: engine.step_fidelity(&[]),
            diagnostics: PathDiagnostics::default(),
        });
    }
    let opts = TrackOptions {
        newton: NewtonOptions {
            tol: DEFAULT_STEP_TOL,
            max_iter: DEFAULT_STEP_MAX_ITER,
            cond_limit: f64::INFINITY,
            ..Default::default()
        },
        ..Default::default()
    };
    let m = circuit.len();
    let path = track_path(
        |d, x| {
            let engine = OmegaEngine::new(state, d, term, circuit)
                .expect("validated by the delta = 0 probe");
            DVector::from_vec(engine.gradient(x.as_slice()))
        },
        |d, x| {
            let engine = OmegaEngine::new(state, d, term, circuit)
                .expect("validated by the delta = 0 probe");
            engine.regularized_hessian(x.as_slice())
        },
        &DVector::zeros(m),
        delta_target,
        delta_min,
        &opts,
    )?;
    let theta: Vec<f64> = path.x.as_slice().to_vec();
    let engine = OmegaEngine::new(state, delta_target, term, circuit)?;
    Ok(ContinuationSolution {
        trig: TrigPoint::from_angles(&theta),
        step_fidelity: engine.step_fidelity(&theta),
        theta,
        diagnostics: path.diagnostics,
    })
}

/// One compiled `(layer, term)` step.
#[derive(Debug, Clone)]
pub struct CompiledStep {
    /// Trotter layer, 1-based.
    pub layer: usize,
    /// Term index within the Hamiltonian (file order).
    pub term_index: usize,
    /// The solved circuit, angles included (empty for identity terms).
    pub circuit: ParametricCircuit,
    /// Achieved `Re Ω / ‖(cosh − sinh·S)ψ‖` on the pre-step state.
    pub step_fidelity: f64,
    /// Newton iterations spent (0 when continuation solved the step,
    /// whose per-sub-step counts live in the run diagnostics).
    pub newton_iterations: usize,
}

/// Why a compilation ended.
#[derive(Debug)]
pub enum CompileStatus {
    /// Every step of every layer solved.
    Completed,
    /// A step failed even under continuation; `steps` holds everything
    /// solved before the failure.
    Aborted {
        /// Layer of the failing step (1-based).
        layer: usize,
        /// Term index of the failing step.
        term_index: usize,
        /// The continuation failure.
        error: Error,
    },
}

impl CompileStatus {
    /// Whether the compilation ran to completion.
    pub fn is_completed(&self) -> bool {
        matches!(self, CompileStatus::Completed)
    }
}

/// A compiled evolution: the circuit program plus simulation artifacts.
#[derive(Debug)]
pub struct CompiledEvolution {
    /// Solved steps ordered by `(layer, term_index)`.
    pub steps: Vec<CompiledStep>,
    /// Total rotation-gate count across all steps (≤ `4^B · terms ·
    /// layers`).
    pub total_gates: usize,
    /// Per-layer diagnostics (same schema as the Trotter trace).
    pub trace: EvolutionTrace,
    /// Simulated state after the last compiled layer.
    pub final_state: StateVector,
    /// Completed, or aborted with a partial artifact.
    pub status: CompileStatus,
}

/// Compiles the full Trotterized evolution into parametric circuits.
///
/// Layer accounting matches `trotter_evolve`: `round(t/δ)` layers
/// (clamped to one when `t > 0`), terms in Hamiltonian order. Each step
/// is solved *on the current simulated state* — the state of the
/// quantum device immediately prior — seeded at `θ = 0`; a cold-start
/// failure falls back to homotopy continuation, and a continuation
/// failure aborts with the partial artifact in `status`.
///
/// The trace's `norm_log` column accumulates the log-norms of the ideal
/// non-unitary factors on the simulated states, mirroring the
/// normalisation bookkeeping of the non-compiled evolutions.
///
/// # Errors
///
/// Input validation as `trotter_evolve` (continuation failures are
/// reported via `status`, not as an `Err`).
pub fn compile_evolution(
    state0: &StateVector,
    h: &Hamiltonian,
    t: f64,
    delta: f64,
    policy: GeneratorPolicy,
    spectrum: Option<&Spectrum>,
) -> Result<CompiledEvolution> {
    h.check_dims(state0)?;
    let state_norm = state0.norm();
    if (state_norm - 1.0).abs() > 1e-6 {
        return Err(Error::NotNormalised { norm: state_norm });
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
    if raw_layers > crate::ite_trotter::MAX_LAYERS {
        return Err(Error::OutOfDomain {
            name: "t/delta",
            value: raw_layers,
            requirement: "requires at most 1e9 layers",
        });
    }
    let mut layers = raw_layers as usize;
    if t > 0.0 && layers == 0 {
        layers = 1;
    }

    // Full ansätze are state-independent: build once per term.
    let full_circuits: Vec<ParametricCircuit> =
        h.terms().iter().map(build_ansatz).collect::<Result<_>>()?;

    let ground = spectrum.map(|s| (s.ground_multiplicity(), s.gap()));
    let f0 = match spectrum {
        Some(s) => s.fidelity(state0)?,
        None => f64::NAN,
    };
    let mut trace = EvolutionTrace::new(state0.qubits());
    trace.ground_multiplicity = ground.map(|(mu, _)| mu);
    trace.gap = ground.and_then(|(_, gap)| gap);
    trace.f0 = f0;
    trace.orthogonal_start = f0.is_finite() && f0 < crate::ite_exact::ORTHOGONALITY_TOL;
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
    crate::ite_trotter::push_layer_row(&mut trace, 0.0, &state, h, spectrum, f0, norm_log)?;

    let mut steps: Vec<CompiledStep> = Vec::new();
    let mut total_gates = 0usize;
    let mut status = CompileStatus::Completed;

    'layers: for layer in 1..=layers {
        for (term_index, term) in h.terms().iter().enumerate() {
            let circuit = match policy {
                GeneratorPolicy::Full => full_circuits[term_index].clone(),
                GeneratorPolicy::Reduced => reduce_for_state(&full_circuits[term_index], &state)?,
            };
            // Ideal factor norm on this state, for the norm_log column.
            let (_, factor_norm) = crate::ite_trotter::factor_apply(&state, term, delta)?;
            norm_log += factor_norm.ln();

            let zeros = vec![0.0f64; circuit.len()];
            let solved = solve_step(
                &state,
                delta,
                term,
                &circuit,
                &zeros,
                DEFAULT_STEP_TOL,
                DEFAULT_STEP_MAX_ITER,
            )?;
            let (theta, step_fidelity, newton_iterations) = if solved.converged {
                (solved.theta, solved.step_fidelity, solved.iterations)
            } else {
                match continuation_solve(&state, term, &circuit, delta, default_delta_min(delta)) {
                    Ok(cont) => (cont.theta, cont.step_fidelity, 0),
                    Err(error) => {
                        status = CompileStatus::Aborted {
                            layer,
                            term_index,
                            error,
                        };
                        break 'layers;
                    }
                }
            };
            let solved_circuit = circuit.with_angles(&theta)?;
            solved_circuit.apply_in_place(&mut state)?;
            total_gates += solved_circuit.len();
            steps.push(CompiledStep {
                layer,
                term_index,
                circuit: solved_circuit,
                step_fidelity,
                newton_iterations,
            });
        }
        let tau = layer as f64 * delta;
        crate::ite_trotter::push_layer_row(&mut trace, tau, &state, h, spectrum, f0, norm_log)?;
    }

    Ok(CompiledEvolution {
        steps,
        total_gates,
        trace,
        final_state: state,
        status,
    })
}
