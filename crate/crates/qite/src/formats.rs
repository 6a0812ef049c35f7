//! File formats: the two text inputs (Hamiltonian and QUBO) and the
//! artifacts a run writes (trace CSV, gate list, JSON reports).
//!
//! Input grammar is line-oriented. Blank lines and lines starting with
//! `#` are skipped; everything else is whitespace-separated fields.
//! Parse errors carry a 1-based line number so a typo in line 40 of a
//! generated file is findable (line 0 marks a whole-file problem).
//!
//! Every artifact embeds its provenance — the resolved flag set and the
//! seed — as a leading `#` comment (text formats) or a `flags`/`seed`
//! header (JSON), so any output can be regenerated from itself. No
//! artifact contains timestamps or absolute paths beyond what the user
//! passed, which keeps reruns byte-identical.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use qite_core::combopt::{QuboInstance, SuccessReport};
use qite_core::pauli::{Hamiltonian, PauliString, PauliTerm};
use qite_core::trace::EvolutionTrace;
use qite_core::varqite::CompiledStep;

/// A syntax or consistency error in an input file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based line of the offending text; 0 for whole-file problems
    /// (an empty file, inconsistent widths detected at the end, ...).
    pub line: usize,
    /// Human-readable description.
    pub message: String,
}

impl ParseError {
    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line == 0 {
            write!(f, "{}", self.message)
        } else {
            write!(f, "line {}: {}", self.line, self.message)
        }
    }
}

impl std::error::Error for ParseError {}

/// Yields `(1-based line number, trimmed content)` for every line that
/// carries data, skipping blanks and `#` comments.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, raw)| (i + 1, raw.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
}

/// Parses a Hamiltonian file: one `<coefficient> <pauli-string>` per
/// line. All strings must have the same length (the register width);
/// coefficients accept anything `f64` does, including scientific
/// notation.
///
/// # Errors
///
/// Wrong field count, unparseable coefficient, invalid Pauli character,
/// width mismatch against the first term, no terms at all, or any
/// structural error from [`Hamiltonian::new`] (reported against line 0).
pub fn parse_hamiltonian(text: &str) -> Result<Hamiltonian, ParseError> {
    let mut terms: Vec<PauliTerm> = Vec::new();
    let mut width: Option<(usize, usize)> = None; // (qubits, defining line)
    for (line, content) in data_lines(text) {
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(ParseError::at(
                line,
                format!(
                    "expected `<coefficient> <pauli-string>`, found {} field(s)",
                    fields.len()
                ),
            ));
        }
        let coefficient: f64 = fields[0]
            .parse()
            .map_err(|_| ParseError::at(line, format!("invalid coefficient `{}`", fields[0])))?;
        let string: PauliString = fields[1]
            .parse()
            .map_err(|e| ParseError::at(line, format!("invalid Pauli string: {e}")))?;
        match width {
            None => width = Some((string.qubits(), line)),
            Some((qubits, first)) if string.qubits() != qubits => {
                return Err(ParseError::at(
                    line,
                    format!(
                        "string has {} qubits but line {first} set the register to {qubits}",
                        string.qubits()
                    ),
                ));
            }
            Some(_) => {}
        }
        let term =
            PauliTerm::new(coefficient, string).map_err(|e| ParseError::at(line, e.to_string()))?;
        terms.push(term);
    }
    if terms.is_empty() {
        return Err(ParseError::at(0, "no Hamiltonian terms found"));
    }
    Hamiltonian::new(terms).map_err(|e| ParseError::at(0, e.to_string()))
}

/// Parses a QUBO file: `lin <i> <value>` and `quad <i> <j> <value>`
/// records with 0-based variable indices and `i < j` for quadratics.
/// Repeated records for the same index accumulate. The variable count
/// is the largest index mentioned plus one.
///
/// # Errors
///
/// Unknown record kind, wrong field count, unparseable index or value,
/// `i >= j` in a quadratic, or an empty file (line 0).
pub fn parse_qubo(text: &str) -> Result<QuboInstance, ParseError> {
    let mut linear: BTreeMap<usize, f64> = BTreeMap::new();
    let mut quadratic: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut max_index: Option<usize> = None;
    for (line, content) in data_lines(text) {
        let fields: Vec<&str> = content.split_whitespace().collect();
        let parse_index = |field: &str| -> Result<usize, ParseError> {
            field
                .parse()
                .map_err(|_| ParseError::at(line, format!("invalid variable index `{field}`")))
        };
        let parse_value = |field: &str| -> Result<f64, ParseError> {
            field
                .parse()
                .map_err(|_| ParseError::at(line, format!("invalid value `{field}`")))
        };
        match fields.as_slice() {
            ["lin", i, v] => {
                let i = parse_index(i)?;
                *linear.entry(i).or_insert(0.0) += parse_value(v)?;
                max_index = Some(max_index.map_or(i, |m| m.max(i)));
            }
            ["quad", i, j, v] => {
                let i = parse_index(i)?;
                let j = parse_index(j)?;
                if i >= j {
                    return Err(ParseError::at(
                        line,
                        format!("quadratic indices must satisfy i < j, got {i} and {j}"),
                    ));
                }
                *quadratic.entry((i, j)).or_insert(0.0) += parse_value(v)?;
                max_index = Some(max_index.map_or(j, |m| m.max(j)));
            }
            [kind, ..] => {
                return Err(ParseError::at(
                    line,
                    format!("unknown record `{kind}` (expected `lin` or `quad`)"),
                ));
            }
            [] => unreachable!("blank lines are filtered out"),
        }
    }
    let Some(max_index) = max_index else {
        return Err(ParseError::at(0, "no QUBO records found"));
    };
    let n = max_index + 1;
    let mut lin = vec![0.0; n];
    for (i, v) in linear {
        lin[i] = v;
    }
    QuboInstance::new(lin, quadratic).map_err(|e| ParseError::at(0, e.to_string()))
}

/// Resolved run provenance, embedded in every artifact.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    /// Subcommand name (`exact`, `trotter`, `compile`, `qubo`).
    pub command: String,
    /// Effective flag values after config/default resolution, keyed by
    /// long flag name. Values are the exact strings a rerun would pass.
    pub flags: BTreeMap<String, String>,
    /// RNG seed (also present in `flags`; duplicated for convenience).
    pub seed: u64,
}

impl Provenance {
    /// One-line `#` comment for text artifacts:
    /// `# qite <command> key=value ...`.
    pub fn comment(&self) -> String {
        let mut line = format!("# qite {}", self.command);
        for (key, value) in &self.flags {
            line.push_str(&format!(" {key}={value}"));
        }
        line
    }
}

/// Renders a trace as CSV: a provenance comment, a header, then one
/// row per sampled time. Trotterised traces append the (run-constant)
/// step-accounting columns. Unknown diagnostics print as `NaN`.
pub fn trace_csv(trace: &EvolutionTrace, provenance: &Provenance) -> String {
    let mut out = String::new();
    out.push_str(&provenance.comment());
    out.push('\n');
    out.push_str("t,energy,fidelity,grad_norm_sq,fidelity_bound,norm_log");
    if trace.trotter.is_some() {
        out.push_str(",delta,layers,factors_total");
    }
    out.push('\n');
    for row in 0..trace.len() {
        out.push_str(&format!(
            "{},{},{},{},{},{}",
            trace.times[row],
            trace.energy[row],
            trace.fidelity[row],
            trace.gradient_norm_sq[row],
            trace.fidelity_bound[row],
            trace.norm_log[row],
        ));
        if let Some(info) = &trace.trotter {
            out.push_str(&format!(
                ",{},{},{}",
                info.delta, info.layers, info.factors_total
            ));
        }
        out.push('\n');
    }
    out
}

/// Renders compiled steps as a flat gate list, one rotation per line:
/// `R(<pauli-string>, <angle>)` in execution order, after a provenance
/// comment. Identity steps (empty circuits) contribute no lines.
pub fn gate_list(steps: &[CompiledStep], provenance: &Provenance) -> String {
    let mut out = String::new();
    out.push_str(&provenance.comment());
    out.push('\n');
    for step in steps {
        for gate in step.circuit.gates() {
            out.push_str(&format!("R({}, {})\n", gate.generator, gate.angle));
        }
    }
    out
}

/// `NaN`-safe JSON embedding: `None` serialises as `null`.
fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

/// Trotter step accounting plus the (optional) cross-check against the
/// exact flow at the simulated time `layers · delta`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrotterReport {
    pub delta: f64,
    pub layers: usize,
    pub factors_total: usize,
    pub residual_time: f64,
    pub delta_exceeds_time: bool,
    /// ℓ² distance between the Trotterised and exact final states,
    /// `null` when the register exceeds the dense cap.
    pub error_vs_exact: Option<f64>,
}

/// Summary of an evolution run (`exact` and `trotter` subcommands).
/// The full per-time data lives in the sibling `trace.csv`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceReport {
    pub command: String,
    pub flags: BTreeMap<String, String>,
    pub seed: u64,
    pub qubits: usize,
    /// Number of sampled rows in `trace.csv`.
    pub rows: usize,
    pub ground_multiplicity: Option<usize>,
    pub gap: Option<f64>,
    /// Start-state overlap with the target eigenspace; `null` when the
    /// spectrum is unknown.
    pub f0: Option<f64>,
    pub orthogonal_start: bool,
    pub target_level: usize,
    pub final_energy: Option<f64>,
    pub final_fidelity: Option<f64>,
    pub final_norm_log: Option<f64>,
    /// Energy never increased along the sampled rows (1e-9 slack).
    pub energy_monotone: bool,
    /// Fidelity dominated its a-priori bound on every row (1e-9 slack);
    /// vacuously true when the bound is unknown.
    pub fidelity_bound_ok: bool,
    pub warnings: Vec<String>,
    pub trotter: Option<TrotterReport>,
}

impl TraceReport {
    /// Builds the summary from a finished trace. `warnings` collects
    /// run-level caveats (oversized δ, spectrum beyond the dense cap).
    pub fn new(trace: &EvolutionTrace, provenance: &Provenance, warnings: Vec<String>) -> Self {
        let last = trace.len().checked_sub(1);
        Self {
            command: provenance.command.clone(),
            flags: provenance.flags.clone(),
            seed: provenance.seed,
            qubits: trace.qubits,
            rows: trace.len(),
            ground_multiplicity: trace.ground_multiplicity,
            gap: trace.gap,
            f0: finite(trace.f0),
            orthogonal_start: trace.orthogonal_start,
            target_level: trace.target_level,
            final_energy: last.and_then(|i| finite(trace.energy[i])),
            final_fidelity: last.and_then(|i| finite(trace.fidelity[i])),
            final_norm_log: last.and_then(|i| finite(trace.norm_log[i])),
            energy_monotone: trace.energy_is_monotone(1e-9),
            fidelity_bound_ok: trace.bound_is_dominated(1e-9),
            warnings,
            trotter: trace.trotter.as_ref().map(|info| TrotterReport {
                delta: info.delta,
                layers: info.layers,
                factors_total: info.factors_total,
                residual_time: info.residual_time,
                delta_exceeds_time: info.delta_exceeds_time,
                error_vs_exact: None,
            }),
        }
    }
}

/// One compiled step in `steps.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepRecord {
    /// Trotter layer, 1-based.
    pub layer: usize,
    /// Term index within the Hamiltonian (file order).
    pub term_index: usize,
    /// Rotation generators in execution order.
    pub generators: Vec<String>,
    /// Matching rotation angles (radians).
    pub angles: Vec<f64>,
    pub step_fidelity: f64,
    pub newton_iters: usize,
}

impl StepRecord {
    fn new(step: &CompiledStep) -> Self {
        Self {
            layer: step.layer,
            term_index: step.term_index,
            generators: step
                .circuit
                .gates()
                .iter()
                .map(|g| g.generator.to_string())
                .collect(),
            angles: step.circuit.gates().iter().map(|g| g.angle).collect(),
            step_fidelity: step.step_fidelity,
            newton_iters: step.newton_iterations,
        }
    }
}

/// The `steps.json` document: provenance plus every solved step.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepsDocument {
    pub command: String,
    pub flags: BTreeMap<String, String>,
    pub seed: u64,
    pub steps: Vec<StepRecord>,
}

impl StepsDocument {
    pub fn new(steps: &[CompiledStep], provenance: &Provenance) -> Self {
        Self {
            command: provenance.command.clone(),
            flags: provenance.flags.clone(),
            seed: provenance.seed,
            steps: steps.iter().map(StepRecord::new).collect(),
        }
    }
}

/// Where and why a compilation aborted (partial artifacts are still
/// written for the solved prefix).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AbortRecord {
    pub layer: usize,
    pub term_index: usize,
    pub message: String,
}

/// Summary of a `compile` run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompileReport {
    pub command: String,
    pub flags: BTreeMap<String, String>,
    pub seed: u64,
    pub qubits: usize,
    /// Solved steps (layer × term pairs).
    pub steps: usize,
    /// Total rotation gates across all steps.
    pub total_gates: usize,
    /// A-priori ceiling `4^B · terms · layers` for max term weight `B`.
    pub gate_budget: u64,
    pub completed: bool,
    pub aborted: Option<AbortRecord>,
    pub rows: usize,
    pub final_energy: Option<f64>,
    pub final_fidelity: Option<f64>,
    pub energy_monotone: bool,
    pub warnings: Vec<String>,
    pub trotter: Option<TrotterReport>,
}

/// Mirror of [`SuccessReport`] with provenance attached (the core type
/// carries no serde support by design — it is `no_std`).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuboReport {
    pub command: String,
    pub flags: BTreeMap<String, String>,
    pub seed: u64,
    /// Number of binary variables (= qubits).
    pub qubits: usize,
    pub epsilon: f64,
    pub shots: u64,
    /// Evolution time used (the ε-threshold time).
    pub t: f64,
    pub p_measured: f64,
    pub p_bound: f64,
    pub bound_ok: bool,
    pub minima: Vec<String>,
    pub mu: usize,
    pub success_prob_shots: f64,
    pub empirical_success: f64,
    pub repeats: u32,
}

impl QuboReport {
    pub fn new(report: &SuccessReport, qubits: usize, provenance: &Provenance) -> Self {
        Self {
            command: provenance.command.clone(),
            flags: provenance.flags.clone(),
            seed: provenance.seed,
            qubits,
            epsilon: report.epsilon,
            shots: report.shots,
            t: report.t,
            p_measured: report.p_measured,
            p_bound: report.p_bound,
            bound_ok: report.bound_ok,
            minima: report.minima.clone(),
            mu: report.mu,
            success_prob_shots: report.success_prob_shots,
            empirical_success: report.empirical_success,
            repeats: report.repeats,
        }
    }
}
