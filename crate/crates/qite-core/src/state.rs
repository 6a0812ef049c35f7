//! Dense state vectors: construction, normalisation, inner products,
//! Pauli and rotation-gate application, and seeded Z-basis sampling.
//!
//! A [`StateVector`] owns `2^Q` complex amplitudes in computational-basis
//! order. Basis index `x` corresponds to the big-endian bitstring of the
//! qubits: qubit 0 is the leftmost bit, so `|101⟩` on three qubits sits
//! at index 5 (see the `pauli` module for the full convention).
//!
//! Sampling uses a seeded counter-based PRNG (ChaCha12) so that every
//! experiment in this crate is bit-for-bit reproducible from `(state,
//! seed)`; repeated experiments draw from per-repeat streams of the same
//! seed rather than ad-hoc reseeding.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

// With std (tests) the inherent f64 methods win and this import idles.
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::pauli::PauliString;
use crate::Complex64;

/// Default cap on state-vector qubit count (2^20 amplitudes = 16 MB of
/// complex doubles): the desk-scale guarantee.
pub const DEFAULT_STATE_CAP: usize = 20;

/// Norm threshold below which a vector is treated as identically zero.
/// Renormalising such a vector would amplify garbage, so it is a hard
/// error — it signals a broken evolution step, not a numerical nuisance.
pub const ZERO_NORM_THRESHOLD: f64 = 1e-300;

/// A normalisable vector of `2^Q` complex amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The computational basis state labelled by a big-endian bitstring,
    /// e.g. `basis_state(3, "101")` puts amplitude 1 at index 5.
    ///
    /// # Errors
    ///
    /// [`Error::InvalidBitString`] when `bits` is not `qubits` many
    /// `0`/`1` characters; [`Error::StateCapExceeded`] beyond
    /// [`DEFAULT_STATE_CAP`].
    pub fn basis_state(qubits: usize, bits: &str) -> Result<Self> {
        let index = bits_to_index(qubits, bits)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); checked_dim(qubits)?];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { qubits, amps })
    }

    /// The equal superposition of all `2^Q` basis states (all amplitudes
    /// `2^{-Q/2}`).
    pub fn equal_superposition(qubits: usize) -> Result<Self> {
        let dim = checked_dim(qubits)?;
        let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
        Ok(Self {
            qubits,
            amps: vec![amp; dim],
        })
    }

    /// Wraps an existing amplitude buffer (length must be `2^qubits`).
    /// No normalisation is performed.
    pub fn from_amps(qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if qubits >= usize::BITS as usize || amps.len() != 1usize << qubits {
            return Err(Error::DimensionMismatch {
                expected: qubits,
                got: amps.len().trailing_zeros() as usize,
            });
        }
        Ok(Self { qubits, amps })
    }

    /// A Haar-like random normalised state: i.i.d. standard-normal real
    /// and imaginary parts, then normalised.
    pub fn random<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> Result<Self> {
        let dim = checked_dim(qubits)?;
        let mut amps = Vec::with_capacity(dim);
        for _ in 0..dim {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            amps.push(Complex64::new(re, im));
        }
        let mut state = Self { qubits, amps };
        state.normalize()?;
        Ok(state)
    }

    /// A random normalised state with real amplitudes only.
    pub fn random_real<R: Rng + ?Sized>(qubits: usize, rng: &mut R) -> Result<Self> {
        let dim = checked_dim(qubits)?;
        let mut amps = Vec::with_capacity(dim);
        for _ in 0..dim {
            let re: f64 = StandardNormal.sample(rng);
            amps.push(Complex64::new(re, 0.0));
        }
        let mut state = Self { qubits, amps };
        state.normalize()?;
        Ok(state)
    }

    /// Number of qubits `Q`.
    pub fn qubits(&self) -> usize {
        self.qubits
    }

    /// Read-only view of the amplitudes in basis order.
    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub(crate) fn amps_mut(&mut self) -> &mut [Complex64] {
        &mut self.amps
    }

    /// Euclidean norm `‖ψ‖₂`.
    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Scales the state to unit norm and returns the norm that was
    /// divided out (callers accumulate it into `norm_log` traces).
    ///
    /// # Errors
    ///
    /// [`Error::ZeroNorm`] below [`ZERO_NORM_THRESHOLD`].
    pub fn normalize(&mut self) -> Result<f64> {
        let norm = self.norm();
        if norm < ZERO_NORM_THRESHOLD {
            return Err(Error::ZeroNorm);
        }
        let inv = 1.0 / norm;
        for a in &mut self.amps {
            *a *= inv;
        }
        Ok(norm)
    }

    /// Inner product `⟨self|other⟩` (conjugation on `self`).
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_dims(other)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, b) in self.amps.iter().zip(&other.amps) {
            acc += a.conj() * b;
        }
        Ok(acc)
    }

    /// Squared overlap `|⟨self|other⟩|²`.
    pub fn overlap_sq(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// Euclidean distance `‖self − other‖₂` (phase-sensitive).
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        self.check_dims(other)?;
        let sum: f64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum();
        Ok(sum.sqrt())
    }

    /// Applies a Pauli string in place: `ψ ← S·ψ` (norm preserving).
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        self.check_pauli_dims(p)?;
        p.blend(
            &mut self.amps,
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
        );
        Ok(())
    }

    /// Applies the rotation gate `exp(-i·θ/2·P)` in place:
    /// `ψ ← cos(θ/2)·ψ − i·sin(θ/2)·P·ψ` (unitary, norm preserving to
    /// round-off).
    pub fn apply_rotation(&mut self, generator: &PauliString, angle: f64) -> Result<()> {
        self.check_pauli_dims(generator)?;
        let half = 0.5 * angle;
        let u = Complex64::new(half.cos(), 0.0);
        let v = Complex64::new(0.0, -half.sin());
        generator.blend(&mut self.amps, u, v);
        Ok(())
    }

    /// Draws `shots` i.i.d. Z-basis measurements from `|amps|²` using a
    /// ChaCha12 stream seeded by `seed`. Deterministic in `(state, seed)`.
    ///
    /// # Errors
    ///
    /// [`Error::NotNormalised`] when the norm deviates from 1 by more
    /// than `1e-6`; [`Error::OutOfDomain`] for `shots = 0`.
    pub fn sample_z(&self, shots: u64, seed: u64) -> Result<SampleCounts> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        self.sample_z_with(shots, &mut rng)
    }

    /// As [`sample_z`](Self::sample_z) but drawing from a caller-owned
    /// RNG, so repeated experiments can use split streams of one seed.
    pub fn sample_z_with<R: Rng + ?Sized>(&self, shots: u64, rng: &mut R) -> Result<SampleCounts> {
        if shots == 0 {
            return Err(Error::OutOfDomain {
                name: "shots",
                value: 0.0,
                requirement: "requires shots >= 1",
            });
        }
        let norm = self.norm();
        if (norm - 1.0).abs() > 1e-6 {
            return Err(Error::NotNormalised { norm });
        }
        // Cumulative distribution over basis indices.
        let mut cdf = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for a in &self.amps {
            acc += a.norm_sqr();
            cdf.push(acc);
        }
        let total = acc;
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        for _ in 0..shots {
            let u: f64 = rng.random::<f64>() * total;
            let idx = cdf.partition_point(|&c| c <= u).min(self.amps.len() - 1);
            *counts.entry(index_to_bits(self.qubits, idx)).or_insert(0) += 1;
        }
        Ok(SampleCounts { shots, counts })
    }

    fn check_dims(&self, other: &StateVector) -> Result<()> {
        if self.qubits != other.qubits {
            return Err(Error::DimensionMismatch {
                expected: self.qubits,
                got: other.qubits,
            });
        }
        Ok(())
    }

    fn check_pauli_dims(&self, p: &PauliString) -> Result<()> {
        if self.qubits != p.qubits() {
            return Err(Error::DimensionMismatch {
                expected: self.qubits,
                got: p.qubits(),
            });
        }
        Ok(())
    }
}

/// Z-basis measurement outcomes: `shots` draws grouped by bitstring.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleCounts {
    shots: u64,
    counts: BTreeMap<String, u64>,
}

impl SampleCounts {
    /// Total number of draws.
    pub fn shots(&self) -> u64 {
        self.shots
    }

    /// Counts per observed bitstring (bitstrings are big-endian, qubit 0
    /// leftmost; unobserved strings are absent).
    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.counts
    }

    /// Observed frequency of one bitstring.
    pub fn frequency(&self, bits: &str) -> f64 {
        *self.counts.get(bits).unwrap_or(&0) as f64 / self.shots as f64
    }
}

/// Converts a big-endian bitstring to its basis index.
pub fn bits_to_index(qubits: usize, bits: &str) -> Result<usize> {
    if bits.len() != qubits || qubits == 0 {
        return Err(Error::InvalidBitString {
            expected: qubits,
            got: bits.into(),
        });
    }
    let mut index = 0usize;
    for c in bits.chars() {
        index = (index << 1)
            | match c {
                '0' => 0,
                '1' => 1,
                _ => {
                    return Err(Error::InvalidBitString {
                        expected: qubits,
                        got: bits.into(),
                    })
                }
            };
    }
    Ok(index)
}

/// Converts a basis index to its big-endian bitstring.
pub fn index_to_bits(qubits: usize, index: usize) -> String {
    let mut out = String::with_capacity(qubits);
    for q in 0..qubits {
        let bit = (index >> (qubits - 1 - q)) & 1;
        out.push(if bit == 1 { '1' } else { '0' });
    }
    out
}

fn checked_dim(qubits: usize) -> Result<usize> {
    if qubits == 0 || qubits > DEFAULT_STATE_CAP {
        return Err(Error::StateCapExceeded {
            qubits,
            cap: DEFAULT_STATE_CAP,
        });
    }
    Ok(1usize << qubits)
}

#[cfg(test)]
pub(crate) fn test_rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_states_hit_the_right_index() {
        let s = StateVector::basis_state(2, "00").unwrap();
        assert_eq!(s.amps()[0], Complex64::new(1.0, 0.0));
        assert!(s.amps()[1..].iter().all(|a| a.norm() == 0.0));

        let s = StateVector::basis_state(1, "1").unwrap();
        assert_eq!(s.amps()[1], Complex64::new(1.0, 0.0));

        let s = StateVector::basis_state(3, "101").unwrap();
        assert_eq!(s.amps()[5], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn bitstring_round_trip() {
        assert_eq!(bits_to_index(3, "101").unwrap(), 5);
        assert_eq!(index_to_bits(3, 5), "101");
        assert_eq!(index_to_bits(4, 1), "0001");
        assert!(bits_to_index(3, "10").is_err());
        assert!(bits_to_index(3, "1a1").is_err());
    }

    #[test]
    fn equal_superposition_is_uniform() {
        let s = StateVector::equal_superposition(2).unwrap();
        for a in s.amps() {
            assert!((a.re - 0.5).abs() < 1e-15 && a.im == 0.0);
        }
        assert!((s.norm() - 1.0).abs() < 1e-15);
        // Overlap with any basis state is 2^{-Q}.
        let b = StateVector::basis_state(2, "10").unwrap();
        assert!((s.overlap_sq(&b).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn inner_products_match_hand_values() {
        let zero = StateVector::basis_state(1, "0").unwrap();
        let one = StateVector::basis_state(1, "1").unwrap();
        assert_eq!(zero.inner(&zero).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(zero.inner(&one).unwrap(), Complex64::new(0.0, 0.0));
        let mut rng = test_rng(3);
        let psi = StateVector::random(3, &mut rng).unwrap();
        assert!((psi.inner(&psi).unwrap().norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normalize_is_idempotent_and_reports_norm() {
        let mut s =
            StateVector::from_amps(1, vec![Complex64::new(3.0, 0.0), Complex64::new(4.0, 0.0)])
                .unwrap();
        let n = s.normalize().unwrap();
        assert!((n - 5.0).abs() < 1e-15);
        let n2 = s.normalize().unwrap();
        assert!((n2 - 1.0).abs() < 1e-12);
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_norm_is_a_hard_error() {
        let mut s = StateVector::from_amps(1, vec![Complex64::new(0.0, 0.0); 2]).unwrap();
        assert_eq!(s.normalize(), Err(Error::ZeroNorm));
    }

    #[test]
    fn rotation_at_zero_is_identity() {
        let mut rng = test_rng(11);
        let psi = StateVector::random(2, &mut rng).unwrap();
        let mut out = psi.clone();
        out.apply_rotation(&PauliString::parse("XY").unwrap(), 0.0)
            .unwrap();
        assert!(psi.distance(&out).unwrap() < 1e-15);
    }

    #[test]
    fn ry_half_pi_maps_zero_to_plus() {
        let mut s = StateVector::basis_state(1, "0").unwrap();
        s.apply_rotation(
            &PauliString::parse("Y").unwrap(),
            core::f64::consts::FRAC_PI_2,
        )
        .unwrap();
        let plus = StateVector::equal_superposition(1).unwrap();
        assert!(s.distance(&plus).unwrap() < 1e-12);
    }

    #[test]
    fn rotation_composes_additively() {
        let p = PauliString::parse("XZ").unwrap();
        let mut rng = test_rng(5);
        let psi = StateVector::random(2, &mut rng).unwrap();
        let mut once = psi.clone();
        once.apply_rotation(&p, 0.7).unwrap();
        let mut twice = psi;
        twice.apply_rotation(&p, 0.35).unwrap();
        twice.apply_rotation(&p, 0.35).unwrap();
        assert!(once.distance(&twice).unwrap() < 1e-12);
        assert!((once.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sampling_a_basis_state_is_certain() {
        let s = StateVector::basis_state(2, "00").unwrap();
        let counts = s.sample_z(100, 42).unwrap();
        assert_eq!(counts.shots(), 100);
        assert_eq!(counts.counts().get("00"), Some(&100));
        assert_eq!(counts.counts().len(), 1);
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        let s = StateVector::equal_superposition(3).unwrap();
        let a = s.sample_z(1000, 7).unwrap();
        let b = s.sample_z(1000, 7).unwrap();
        assert_eq!(a, b);
        let c = s.sample_z(1000, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn sampling_rejects_unnormalised_states() {
        let s = StateVector::from_amps(1, vec![Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0)])
            .unwrap();
        assert!(matches!(
            s.sample_z(10, 0),
            Err(Error::NotNormalised { .. })
        ));
    }

    #[test]
    fn plus_state_frequencies_within_five_sigma() {
        let s = StateVector::equal_superposition(1).unwrap();
        let shots = 100_000u64;
        let counts = s.sample_z(shots, 123).unwrap();
        let sigma = (0.25 / shots as f64).sqrt();
        for bits in ["0", "1"] {
            assert!((counts.frequency(bits) - 0.5).abs() < 5.0 * sigma);
        }

        let s = StateVector::equal_superposition(2).unwrap();
        let shots = 40_000u64;
        let counts = s.sample_z(shots, 321).unwrap();
        let sigma = (0.25 * 0.75 / shots as f64).sqrt();
        for bits in ["00", "01", "10", "11"] {
            assert!((counts.frequency(bits) - 0.25).abs() < 5.0 * sigma);
        }
    }
}
