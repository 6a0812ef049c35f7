//! Pauli-string algebra: parsing, in-place application to amplitude
//! buffers, expectation values, dense realisations, and order-bound
//! bookkeeping for Hamiltonians of the form
//!
//! ```text
//! H = Σ_i a_i · S_i,    a_i ∈ ℝ,   S_i = σ_1 ⊗ σ_2 ⊗ … ⊗ σ_Q
//! ```
//!
//! where each `σ` is one of `I, X, Y, Z` and every `S_i` acts
//! non-trivially on at most `B` qubits (the *order bound*).
//!
//! # Representation
//!
//! A [`PauliString`] stores its operator list plus three derived items
//! used by the application kernels:
//!
//! * `flip_mask` — bit set where the factor is `X` or `Y` (flips the
//!   basis index),
//! * `phase_mask` — bit set where the factor is `Z` or `Y` (contributes
//!   a sign `(-1)^{x_q}`),
//! * `num_y` — number of `Y` factors (contributes a global `i^{num_y}`).
//!
//! With these, the action on a computational basis state is
//!
//! ```text
//! S |x⟩ = i^{num_y} · (-1)^{popcount(x & phase_mask)} · |x ⊕ flip_mask⟩
//! ```
//!
//! and every state-side operation in this crate (plain application,
//! rotation gates, imaginary-time factors) reduces to the blended update
//! `(u·I + v·S)|ψ⟩` over amplitude pairs — no dense matrices outside the
//! test-oracle path.
//!
//! # Conventions
//!
//! Qubit 0 is the **leftmost** character of a string, and basis-state
//! bitstrings read the same way: `|x⟩` has index `Σ_q x_q · 2^(Q-1-q)`.
//! Coefficients are real, which makes every term (and hence `H`)
//! Hermitian by construction.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::state::StateVector;
use crate::Complex64;

/// Default cap on qubit count for dense-matrix realisations (`2^12`
/// squared complex entries ≈ 256 MB is the practical desk limit).
pub const DEFAULT_DENSE_CAP: usize = 12;

/// One single-qubit Pauli factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    /// Identity.
    I,
    /// Bit flip.
    X,
    /// Bit and phase flip.
    Y,
    /// Phase flip.
    Z,
}

impl Pauli {
    /// Parses a single Pauli character.
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    /// The character used in the text format.
    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// A tensor product of single-qubit Pauli operators.
///
/// Immutable after construction; cheap to clone and safe to share.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    ops: Vec<Pauli>,
    flip_mask: usize,
    phase_mask: usize,
    num_y: u32,
}

impl PauliString {
    /// Builds a string from an explicit operator list (index 0 =
    /// qubit 0 = leftmost).
    ///
    /// # Errors
    ///
    /// [`Error::EmptyPauliString`] for an empty list, and
    /// [`Error::StateCapExceeded`] beyond the index-mask width of the
    /// platform (64 qubits).
    pub fn new(ops: Vec<Pauli>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::EmptyPauliString);
        }
        if ops.len() > usize::BITS as usize {
            return Err(Error::StateCapExceeded {
                qubits: ops.len(),
                cap: usize::BITS as usize,
            });
        }
        let qubits = ops.len();
        let mut flip_mask = 0usize;
        let mut phase_mask = 0usize;
        let mut num_y = 0u32;
        for (q, op) in ops.iter().enumerate() {
            let bit = 1usize << (qubits - 1 - q);
            match op {
                Pauli::I => {}
                Pauli::X => flip_mask |= bit,
                Pauli::Y => {
                    flip_mask |= bit;
                    phase_mask |= bit;
                    num_y += 1;
                }
                Pauli::Z => phase_mask |= bit,
            }
        }
        Ok(Self {
            ops,
            flip_mask,
            phase_mask,
            num_y,
        })
    }

    /// Parses a string like `"XIZY"`.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidPauliChar`] naming the zero-based position of the
    /// first character outside `IXYZ`; [`Error::EmptyPauliString`] for
    /// empty input.
    pub fn parse(text: &str) -> Result<Self> {
        let mut ops = Vec::with_capacity(text.len());
        for (position, c) in text.chars().enumerate() {
            let op = Pauli::from_char(c).ok_or(Error::InvalidPauliChar { position, found: c })?;
            ops.push(op);
        }
        Self::new(ops)
    }

    /// The all-identity string on `qubits` qubits.
    pub fn identity(qubits: usize) -> Result<Self> {
        Self::new(vec![Pauli::I; qubits])
    }

    /// Number of qubits the string is written on.
    pub fn qubits(&self) -> usize {
        self.ops.len()
    }

    /// The operator list, leftmost qubit first.
    pub fn ops(&self) -> &[Pauli] {
        &self.ops
    }

    /// The factor on one qubit.
    pub fn op(&self, qubit: usize) -> Pauli {
        self.ops[qubit]
    }

    /// Number of non-identity factors.
    pub fn weight(&self) -> usize {
        self.ops.iter().filter(|op| **op != Pauli::I).count()
    }

    /// Whether every factor is the identity.
    pub fn is_identity(&self) -> bool {
        self.flip_mask == 0 && self.phase_mask == 0
    }

    /// Sorted list of qubits the string acts on non-trivially.
    pub fn support(&self) -> Vec<usize> {
        self.ops
            .iter()
            .enumerate()
            .filter(|(_, op)| **op != Pauli::I)
            .map(|(q, _)| q)
            .collect()
    }

    /// Whether the string commutes with `other` (strings of equal
    /// length anticommute iff the symplectic form is odd).
    pub fn commutes_with(&self, other: &PauliString) -> bool {
        debug_assert_eq!(self.qubits(), other.qubits());
        let cross = (self.flip_mask & other.phase_mask).count_ones()
            + (self.phase_mask & other.flip_mask).count_ones();
        cross % 2 == 0
    }

    /// Phase picked up when acting on basis index `x`:
    /// `i^{num_y} · (-1)^{popcount(x & phase_mask)}`.
    #[inline]
    fn phase(&self, x: usize) -> Complex64 {
        let sign = if (x & self.phase_mask).count_ones() & 1 == 1 {
            -1.0
        } else {
            1.0
        };
        match self.num_y & 3 {
            0 => Complex64::new(sign, 0.0),
            1 => Complex64::new(0.0, sign),
            2 => Complex64::new(-sign, 0.0),
            _ => Complex64::new(0.0, -sign),
        }
    }

    /// In-place blended update `ψ ← (u·I + v·S)·ψ` over amplitude pairs.
    ///
    /// This single kernel realises plain application (`u=0, v=1`),
    /// rotation gates (`u=cos(θ/2), v=-i·sin(θ/2)`), and imaginary-time
    /// factors (`u=cosh(δa), v=-sinh(δa)`).
    pub(crate) fn blend(&self, amps: &mut [Complex64], u: Complex64, v: Complex64) {
        debug_assert_eq!(amps.len(), 1usize << self.qubits());
        if self.flip_mask == 0 {
            for (x, a) in amps.iter_mut().enumerate() {
                *a *= u + v * self.phase(x);
            }
        } else {
            for x in 0..amps.len() {
                let y = x ^ self.flip_mask;
                if y < x {
                    continue; // each pair visited once, from its lower index
                }
                let (ax, ay) = (amps[x], amps[y]);
                // S maps |y⟩ → phase(y)·|x⟩ and |x⟩ → phase(x)·|y⟩.
                amps[x] = u * ax + v * self.phase(y) * ay;
                amps[y] = u * ay + v * self.phase(x) * ax;
            }
        }
    }

    /// Diagonal matrix element `⟨ψ|S|ψ⟩` over a raw amplitude buffer.
    pub(crate) fn expect(&self, amps: &[Complex64]) -> Complex64 {
        debug_assert_eq!(amps.len(), 1usize << self.qubits());
        let mut acc = Complex64::ZERO;
        for (x, a) in amps.iter().enumerate() {
            let y = x ^ self.flip_mask;
            acc += a.conj() * self.phase(y) * amps[y];
        }
        acc
    }

    /// Scatters `coefficient · S` into a dense matrix (column-major add).
    fn add_to_dense(&self, coefficient: f64, m: &mut DMatrix<Complex64>) {
        let dim = 1usize << self.qubits();
        debug_assert_eq!(m.nrows(), dim);
        for x in 0..dim {
            // S |x⟩ = phase(x) |x ⊕ flip⟩, i.e. column x, row x⊕flip.
            m[(x ^ self.flip_mask, x)] += self.phase(x) * coefficient;
        }
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for op in &self.ops {
            write!(f, "{}", op.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

/// One Hamiltonian term `a·S` with a real coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    /// Real coefficient `a` (energy units).
    pub coefficient: f64,
    /// The Pauli string `S`.
    pub string: PauliString,
}

impl PauliTerm {
    /// Builds a term, rejecting non-finite coefficients (Hermiticity of
    /// each term requires a finite real `a`).
    pub fn new(coefficient: f64, string: PauliString) -> Result<Self> {
        if !coefficient.is_finite() {
            return Err(Error::NonFinite {
                what: "term coefficient",
                value: coefficient,
            });
        }
        Ok(Self {
            coefficient,
            string,
        })
    }
}

impl fmt::Display for PauliTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.coefficient, self.string)
    }
}

/// A Hamiltonian `H = Σ_i a_i·S_i` of bounded interaction order.
///
/// Terms keep their construction order; the Trotter module applies them
/// in exactly this order, so it is part of the reproducibility contract.
#[derive(Debug, Clone, PartialEq)]
pub struct Hamiltonian {
    qubits: usize,
    terms: Vec<PauliTerm>,
    order_bound: usize,
}

impl Hamiltonian {
    /// Builds a Hamiltonian from terms, inferring the order bound `B` as
    /// the maximum term weight.
    ///
    /// # Errors
    ///
    /// Mixed qubit counts, an empty term list, or a term count beyond
    /// the loose `C(Q,B)·4^B` budget of a weight-`B` operator.
    pub fn new(terms: Vec<PauliTerm>) -> Result<Self> {
        let bound = terms.iter().map(|t| t.string.weight()).max().unwrap_or(0);
        Self::with_order_bound(terms, bound)
    }

    /// Builds a Hamiltonian with an explicitly declared order bound,
    /// rejecting any term whose weight exceeds it.
    pub fn with_order_bound(terms: Vec<PauliTerm>, order_bound: usize) -> Result<Self> {
        let qubits = match terms.first() {
            Some(t) => t.string.qubits(),
            None => return Err(Error::EmptyPauliString),
        };
        for term in &terms {
            if term.string.qubits() != qubits {
                return Err(Error::DimensionMismatch {
                    expected: qubits,
                    got: term.string.qubits(),
                });
            }
            let weight = term.string.weight();
            if weight > order_bound {
                return Err(Error::OrderBoundExceeded {
                    weight,
                    bound: order_bound,
                });
            }
        }
        let limit = term_budget(qubits, order_bound.min(qubits));
        if terms.len() as u128 > limit {
            return Err(Error::TermCountExceeded {
                terms: terms.len(),
                bound: order_bound,
                limit,
            });
        }
        Ok(Self {
            qubits,
            terms,
            order_bound,
        })
    }

    /// Convenience constructor from `(coefficient, string)` text pairs.
    pub fn parse_terms(pairs: &[(f64, &str)]) -> Result<Self> {
        let terms = pairs
            .iter()
            .map(|(c, s)| PauliTerm::new(*c, PauliString::parse(s)?))
            .collect::<Result<Vec<_>>>()?;
        Self::new(terms)
    }

    /// Number of qubits `Q`.
    pub fn qubits(&self) -> usize {
        self.qubits
    }

    /// The terms in application order.
    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    /// The interaction order bound `B` (maximum term weight).
    pub fn order_bound(&self) -> usize {
        self.order_bound
    }

    /// Energy expectation `E = ⟨ψ|H|ψ⟩` of a normalised state.
    ///
    /// The imaginary residue of the accumulated sum is checked and then
    /// discarded: residues above `1e-8` indicate a non-Hermitian input
    /// and are an error, residues up to `1e-10` are expected round-off.
    ///
    /// # Errors
    ///
    /// Dimension mismatch, an unnormalised state (norm deviating from 1
    /// by more than `1e-6`), or a non-Hermitian accumulation.
    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        self.check_dims(state)?;
        let norm = state.norm();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::NotNormalised { norm });
        }
        let mut acc = Complex64::ZERO;
        for term in &self.terms {
            acc += term.string.expect(state.amps()) * term.coefficient;
        }
        if acc.im.abs() > 1e-8 {
            return Err(Error::NonHermitian {
                deviation: acc.im.abs(),
            });
        }
        Ok(acc.re)
    }

    /// The (unnormalised) image `H|ψ⟩`.
    pub fn apply(&self, state: &StateVector) -> Result<StateVector> {
        self.check_dims(state)?;
        let dim = state.amps().len();
        let mut out = vec![Complex64::ZERO; dim];
        let mut scratch = vec![Complex64::ZERO; dim];
        for term in &self.terms {
            scratch.copy_from_slice(state.amps());
            term.string
                .blend(&mut scratch, Complex64::ZERO, Complex64::ONE);
            for (o, s) in out.iter_mut().zip(&scratch) {
                *o += s * term.coefficient;
            }
        }
        StateVector::from_amps(self.qubits, out)
    }

    /// Dense `2^Q × 2^Q` realisation under the default cap
    /// ([`DEFAULT_DENSE_CAP`]).
    pub fn to_dense(&self) -> Result<DMatrix<Complex64>> {
        self.to_dense_capped(DEFAULT_DENSE_CAP)
    }

    /// Dense realisation with an explicit qubit cap (for callers that
    /// deliberately accept the `4^Q` memory cost).
    ///
    /// # Errors
    ///
    /// [`Error::DenseCapExceeded`] above the cap.
    pub fn to_dense_capped(&self, cap: usize) -> Result<DMatrix<Complex64>> {
        if self.qubits > cap {
            return Err(Error::DenseCapExceeded {
                qubits: self.qubits,
                cap,
            });
        }
        let dim = 1usize << self.qubits;
        let mut m = DMatrix::<Complex64>::zeros(dim, dim);
        for term in &self.terms {
            term.string.add_to_dense(term.coefficient, &mut m);
        }
        Ok(m)
    }

    /// Checks that `state` lives on the same register as this
    /// Hamiltonian.
    pub fn check_dims(&self, state: &StateVector) -> Result<()> {
        if state.qubits() != self.qubits {
            return Err(Error::DimensionMismatch {
                expected: self.qubits,
                got: state.qubits(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for Hamiltonian {
    /// Renders in the text file format, one `<coefficient> <string>`
    /// term per line.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, term) in self.terms.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{term}")?;
        }
        Ok(())
    }
}

/// Loose admissible term count `C(Q,B)·4^B` for a weight-`B` operator
/// on `Q` qubits (saturating).
fn term_budget(qubits: usize, bound: usize) -> u128 {
    binomial(qubits, bound).saturating_mul(4u128.saturating_pow(bound as u32))
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::StateVector;

    #[test]
    fn parse_reads_weight_and_length() {
        let p = PauliString::parse("ZZ").unwrap();
        assert_eq!(p.qubits(), 2);
        assert_eq!(p.weight(), 2);

        let p = PauliString::parse("IIII").unwrap();
        assert_eq!(p.qubits(), 4);
        assert_eq!(p.weight(), 0);
        assert!(p.is_identity());

        let p = PauliString::parse("XIZY").unwrap();
        assert_eq!(p.qubits(), 4);
        assert_eq!(p.weight(), 3);
        assert_eq!(p.support(), vec![0, 2, 3]);
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert_eq!(
            PauliString::parse("XQZ"),
            Err(Error::InvalidPauliChar {
                position: 1,
                found: 'Q'
            })
        );
        assert_eq!(PauliString::parse(""), Err(Error::EmptyPauliString));
    }

    #[test]
    fn display_round_trips() {
        for text in ["Z", "XIZY", "IIYY"] {
            let p = PauliString::parse(text).unwrap();
            assert_eq!(alloc::format!("{p}"), text);
        }
    }

    #[test]
    fn x_flips_basis_state() {
        let mut psi = StateVector::basis_state(1, "0").unwrap();
        psi.apply_pauli(&PauliString::parse("X").unwrap()).unwrap();
        let target = StateVector::basis_state(1, "1").unwrap();
        assert!((psi.amps()[0] - target.amps()[0]).norm() < 1e-15);
        assert!((psi.amps()[1] - target.amps()[1]).norm() < 1e-15);
    }

    #[test]
    fn z_turns_plus_into_minus() {
        let mut psi = StateVector::equal_superposition(1).unwrap();
        psi.apply_pauli(&PauliString::parse("Z").unwrap()).unwrap();
        let r = core::f64::consts::FRAC_1_SQRT_2;
        assert!((psi.amps()[0].re - r).abs() < 1e-15);
        assert!((psi.amps()[1].re + r).abs() < 1e-15);
    }

    #[test]
    fn y_phases_match_convention() {
        // Y|0⟩ = i|1⟩, Y|1⟩ = -i|0⟩.
        let y = PauliString::parse("Y").unwrap();
        let mut psi = StateVector::basis_state(1, "0").unwrap();
        psi.apply_pauli(&y).unwrap();
        assert!((psi.amps()[1] - Complex64::new(0.0, 1.0)).norm() < 1e-15);
        let mut psi = StateVector::basis_state(1, "1").unwrap();
        psi.apply_pauli(&y).unwrap();
        assert!((psi.amps()[0] - Complex64::new(0.0, -1.0)).norm() < 1e-15);
    }

    #[test]
    fn application_is_an_involution() {
        let p = PauliString::parse("XYZ").unwrap();
        let mut rng = crate::state::test_rng(17);
        let psi = StateVector::random(3, &mut rng).unwrap();
        let mut out = psi.clone();
        out.apply_pauli(&p).unwrap();
        out.apply_pauli(&p).unwrap();
        let overlap = psi.inner(&out).unwrap();
        assert!((overlap.re - 1.0).abs() < 1e-12 && overlap.im.abs() < 1e-12);
    }

    #[test]
    fn expectation_matches_hand_values() {
        let h = Hamiltonian::parse_terms(&[(1.0, "Z")]).unwrap();
        let zero = StateVector::basis_state(1, "0").unwrap();
        assert!((h.expectation(&zero).unwrap() - 1.0).abs() < 1e-15);
        let plus = StateVector::equal_superposition(1).unwrap();
        assert!(h.expectation(&plus).unwrap().abs() < 1e-15);

        let xor = Hamiltonian::parse_terms(&[(0.5, "II"), (-0.5, "ZZ")]).unwrap();
        let zz = StateVector::basis_state(2, "00").unwrap();
        assert!(xor.expectation(&zz).unwrap().abs() < 1e-15);
    }

    #[test]
    fn dense_realisation_matches_hand_expansion() {
        let z = Hamiltonian::parse_terms(&[(1.0, "Z")]).unwrap();
        let m = z.to_dense().unwrap();
        assert!((m[(0, 0)].re - 1.0).abs() < 1e-15);
        assert!((m[(1, 1)].re + 1.0).abs() < 1e-15);
        assert!(m[(0, 1)].norm() < 1e-15 && m[(1, 0)].norm() < 1e-15);

        let xor = Hamiltonian::parse_terms(&[(0.5, "II"), (-0.5, "ZZ")]).unwrap();
        let m = xor.to_dense().unwrap();
        let diag: Vec<f64> = (0..4).map(|i| m[(i, i)].re).collect();
        assert_eq!(diag, vec![0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn dense_cap_is_enforced() {
        let p = PauliString::identity(13).unwrap();
        let h = Hamiltonian::new(vec![PauliTerm::new(1.0, p).unwrap()]).unwrap();
        assert!(matches!(
            h.to_dense(),
            Err(Error::DenseCapExceeded {
                qubits: 13,
                cap: 12
            })
        ));
        assert!(h.to_dense_capped(13).is_ok());
    }

    #[test]
    fn order_bound_is_enforced() {
        let terms = vec![PauliTerm::new(1.0, PauliString::parse("XYZ").unwrap()).unwrap()];
        assert!(matches!(
            Hamiltonian::with_order_bound(terms, 2),
            Err(Error::OrderBoundExceeded {
                weight: 3,
                bound: 2
            })
        ));
        let h = Hamiltonian::parse_terms(&[(1.0, "XYZ")]).unwrap();
        assert_eq!(h.order_bound(), 3);
    }

    #[test]
    fn non_finite_coefficients_are_rejected() {
        let p = PauliString::parse("Z").unwrap();
        assert!(PauliTerm::new(f64::NAN, p.clone()).is_err());
        assert!(PauliTerm::new(f64::INFINITY, p).is_err());
    }

    #[test]
    fn commutation_test_matches_examples() {
        let x = PauliString::parse("X").unwrap();
        let z = PauliString::parse("Z").unwrap();
        assert!(!x.commutes_with(&z));
        let xx = PauliString::parse("XX").unwrap();
        let zz = PauliString::parse("ZZ").unwrap();
        assert!(xx.commutes_with(&zz));
    }
}
