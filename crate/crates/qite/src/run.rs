//! Command drivers: resolved options in, artifacts out, exit codes by
//! failure class.
//!
//! The exit-code contract is `0` success, `1` usage (bad flags, bad
//! files, unsatisfiable requests), `2` invariant violation (the run
//! finished but a mathematical guarantee did not hold — artifacts are
//! still written first so the evidence survives), `3` solver failure
//! (Newton/continuation breakdown, numerical collapse mid-run).
//!
//! Approximate backends get a deliberate asymmetry: the fidelity bound
//! is a theorem about the *exact* flow, so `exact` runs enforce it
//! (exit 2 on violation) while `trotter`/`compile` runs only report it
//! — a coarse δ legitimately dips below the bound, and that is a
//! property of the approximation, not a defect of the run.

use std::collections::BTreeMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;

use qite_core::combopt::{run_combinatorial, Backend};
use qite_core::error::Error as CoreError;
use qite_core::ite_exact::exact_evolve_with_spectrum;
use qite_core::ite_trotter::trotter_evolve;
use qite_core::pauli::{Hamiltonian, DEFAULT_DENSE_CAP};
use qite_core::spectral::{eigendecompose_capped, Spectrum};
use qite_core::state::StateVector;
use qite_core::varqite::{compile_evolution, CompileStatus, GeneratorPolicy};

use crate::formats::{
    self, AbortRecord, CompileReport, Provenance, QuboReport, StepsDocument, TraceReport,
};

/// A failed run, classified for the exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RunError {
    /// Bad flags, unreadable or malformed inputs, requests outside the
    /// supported domain. Exit 1.
    Usage(String),
    /// The run produced a result that breaks a guaranteed invariant.
    /// Exit 2.
    Invariant(String),
    /// The numerics gave out mid-run. Exit 3.
    Solver(String),
}

impl RunError {
    pub fn usage(message: impl Into<String>) -> Self {
        Self::Usage(message.into())
    }

    pub fn invariant(message: impl Into<String>) -> Self {
        Self::Invariant(message.into())
    }

    /// Process exit code for this failure class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 1,
            Self::Invariant(_) => 2,
            Self::Solver(_) => 3,
        }
    }
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Usage(m) => write!(f, "{m}"),
            Self::Invariant(m) => write!(f, "invariant violation: {m}"),
            Self::Solver(m) => write!(f, "solver failure: {m}"),
        }
    }
}

impl std::error::Error for RunError {}

/// Maps a core error onto the exit-code taxonomy. Solver breakdowns
/// and mid-run numerical collapse are exit 3; a measured success
/// probability below its proven bound is the one core-raised invariant
/// violation (exit 2); everything else reaching the CLI boundary is a
/// request we could not honour (exit 1).
fn classify(err: CoreError) -> RunError {
    match &err {
        CoreError::ContinuationStalled { .. }
        | CoreError::SingularJacobian { .. }
        | CoreError::ZeroNorm
        | CoreError::NonFinite { .. } => RunError::Solver(err.to_string()),
        CoreError::OutOfDomain { name, .. } if *name == "p_measured" => {
            RunError::Invariant(err.to_string())
        }
        _ => RunError::Usage(err.to_string()),
    }
}

/// Key=value defaults file. Lines are `key = value` (spaces optional);
/// blanks and `#` comments are skipped; later duplicates win. Flags
/// always override config values.
#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = fs::read_to_string(path)
            .map_err(|e| RunError::usage(format!("{}: {e}", path.display())))?;
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(RunError::usage(format!(
                    "{}: line {}: expected `key = value`, found `{line}`",
                    path.display(),
                    i + 1
                )));
            };
            values.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

/// Start-state selector for the evolution commands.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InitSpec {
    /// Uniform superposition `|+...+⟩`.
    Plus,
    /// Haar-like random real state, drawn from the run's seed.
    Random,
    /// Computational basis state from an explicit bitstring.
    Basis(String),
}

impl FromStr for InitSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "plus" => Ok(Self::Plus),
            "random" => Ok(Self::Random),
            _ => match s.strip_prefix("basis:") {
                Some(bits) if !bits.is_empty() && bits.chars().all(|c| c == '0' || c == '1') => {
                    Ok(Self::Basis(bits.to_string()))
                }
                _ => Err(format!(
                    "invalid init `{s}` (expected plus, random, or basis:<bits>)"
                )),
            },
        }
    }
}

impl fmt::Display for InitSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Plus => write!(f, "plus"),
            Self::Random => write!(f, "random"),
            Self::Basis(bits) => write!(f, "basis:{bits}"),
        }
    }
}

/// Generator policy flag (`full` | `reduced`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolicyArg(pub GeneratorPolicy);

impl FromStr for PolicyArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "full" => Ok(Self(GeneratorPolicy::Full)),
            "reduced" => Ok(Self(GeneratorPolicy::Reduced)),
            _ => Err(format!("invalid policy `{s}` (expected full or reduced)")),
        }
    }
}

impl fmt::Display for PolicyArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            GeneratorPolicy::Full => write!(f, "full"),
            GeneratorPolicy::Reduced => write!(f, "reduced"),
        }
    }
}

/// Backend flag for the `qubo` subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BackendKind {
    Exact,
    Trotter,
    Varqite,
}

impl FromStr for BackendKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exact" => Ok(Self::Exact),
            "trotter" => Ok(Self::Trotter),
            "varqite" => Ok(Self::Varqite),
            _ => Err(format!(
                "invalid backend `{s}` (expected exact, trotter, or varqite)"
            )),
        }
    }
}

impl fmt::Display for BackendKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Exact => write!(f, "exact"),
            Self::Trotter => write!(f, "trotter"),
            Self::Varqite => write!(f, "varqite"),
        }
    }
}

/// Dense-diagonalisation qubit cap: `QITE_DENSE_CAP` when set, the
/// library default otherwise.
pub fn dense_cap() -> Result<usize, RunError> {
    match std::env::var("QITE_DENSE_CAP") {
        Ok(raw) => raw
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|cap| *cap >= 1)
            .ok_or_else(|| {
                RunError::usage(format!(
                    "QITE_DENSE_CAP must be a positive integer, got `{raw}`"
                ))
            }),
        Err(std::env::VarError::NotPresent) => Ok(DEFAULT_DENSE_CAP),
        Err(e) => Err(RunError::usage(format!("QITE_DENSE_CAP: {e}"))),
    }
}

fn read_input(path: &Path) -> Result<String, RunError> {
    fs::read_to_string(path).map_err(|e| RunError::usage(format!("{}: {e}", path.display())))
}

fn load_hamiltonian(path: &Path) -> Result<Hamiltonian, RunError> {
    formats::parse_hamiltonian(&read_input(path)?)
        .map_err(|e| RunError::usage(format!("{}: {e}", path.display())))
}

fn build_init(init: &InitSpec, qubits: usize, seed: u64) -> Result<StateVector, RunError> {
    match init {
        InitSpec::Plus => StateVector::equal_superposition(qubits).map_err(classify),
        InitSpec::Random => {
            let mut rng = ChaCha12Rng::seed_from_u64(seed);
            StateVector::random_real(qubits, &mut rng).map_err(classify)
        }
        InitSpec::Basis(bits) => StateVector::basis_state(qubits, bits).map_err(classify),
    }
}

/// Diagonalises when the register fits under the cap; otherwise
/// returns `None` and a warning so fidelity columns degrade to `NaN`
/// instead of refusing the run.
fn optional_spectrum(
    h: &Hamiltonian,
    cap: usize,
    warnings: &mut Vec<String>,
) -> Result<Option<Spectrum>, RunError> {
    if h.qubits() <= cap {
        Ok(Some(eigendecompose_capped(h, None, cap).map_err(classify)?))
    } else {
        warn(
            warnings,
            format!(
                "register has {} qubits, above the dense cap {cap}: fidelity, bound and \
                 exact-error diagnostics are unavailable (NaN)",
                h.qubits()
            ),
        );
        Ok(None)
    }
}

/// Records a warning in the report and echoes it to stderr.
fn warn(warnings: &mut Vec<String>, message: String) {
    eprintln!("warning: {message}");
    warnings.push(message);
}

fn write_artifact(dir: &Path, name: &str, contents: &str) -> Result<PathBuf, RunError> {
    fs::create_dir_all(dir).map_err(|e| RunError::usage(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| RunError::usage(format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> Result<PathBuf, RunError> {
    let mut text =
        serde_json::to_string_pretty(value).map_err(|e| RunError::usage(format!("{name}: {e}")))?;
    text.push('\n');
    write_artifact(dir, name, &text)
}

/// Options for `qite exact`.
#[derive(Debug, Clone)]
pub struct ExactOpts {
    pub hamiltonian: PathBuf,
    pub time: f64,
    pub samples: usize,
    pub init: InitSpec,
    pub seed: u64,
    pub out: PathBuf,
}

/// Exact eigenbasis evolution: `trace.csv` + `report.json`, exit 2 if
/// a guaranteed invariant (energy monotone, fidelity above its bound)
/// fails to hold — after writing the evidence.
pub fn cmd_exact(opts: &ExactOpts, provenance: &Provenance) -> Result<(), RunError> {
    let h = load_hamiltonian(&opts.hamiltonian)?;
    let cap = dense_cap()?;
    if h.qubits() > cap {
        return Err(RunError::usage(format!(
            "register has {} qubits but the dense cap is {cap}: exact evolution must \
             diagonalise (raise QITE_DENSE_CAP, or switch to the trotter command)",
            h.qubits()
        )));
    }
    let psi0 = build_init(&opts.init, h.qubits(), opts.seed)?;
    let spectrum = eigendecompose_capped(&h, None, cap).map_err(classify)?;
    let evo =
        exact_evolve_with_spectrum(&psi0, &spectrum, opts.time, opts.samples).map_err(classify)?;

    let report = TraceReport::new(&evo.trace, provenance, Vec::new());
    let trace_path = write_artifact(
        &opts.out,
        "trace.csv",
        &formats::trace_csv(&evo.trace, provenance),
    )?;
    let report_path = write_json(&opts.out, "report.json", &report)?;
    println!("wrote {}", trace_path.display());
    println!("wrote {}", report_path.display());
    println!(
        "final energy {}, fidelity {} at t={} ({} rows)",
        evo.trace.energy.last().unwrap_or(&f64::NAN),
        evo.trace.fidelity.last().unwrap_or(&f64::NAN),
        opts.time,
        evo.trace.len()
    );

    if !report.energy_monotone {
        return Err(RunError::invariant(
            "energy increased along the exact flow; see report.json",
        ));
    }
    if !report.fidelity_bound_ok {
        return Err(RunError::invariant(
            "fidelity fell below its a-priori lower bound on the exact flow; see report.json",
        ));
    }
    Ok(())
}

/// Options for `qite trotter`. No sample count: the trace is
/// per-layer by construction.
#[derive(Debug, Clone)]
pub struct TrotterOpts {
    pub hamiltonian: PathBuf,
    pub time: f64,
    pub delta: f64,
    pub init: InitSpec,
    pub seed: u64,
    pub out: PathBuf,
}

/// Trotterised evolution: `trace.csv` + `report.json`. Bound dips are
/// reported (`fidelity_bound_ok`, a warning), never exit 2 — the bound
/// binds the exact flow only. When the register fits under the dense
/// cap the report also carries the final-state error against the exact
/// flow at the actually-simulated time `layers·δ`.
pub fn cmd_trotter(opts: &TrotterOpts, provenance: &Provenance) -> Result<(), RunError> {
    let h = load_hamiltonian(&opts.hamiltonian)?;
    let cap = dense_cap()?;
    let psi0 = build_init(&opts.init, h.qubits(), opts.seed)?;
    let mut warnings = Vec::new();
    let spectrum = optional_spectrum(&h, cap, &mut warnings)?;
    let outcome =
        trotter_evolve(&psi0, &h, opts.time, opts.delta, spectrum.as_ref()).map_err(classify)?;

    if let Some(info) = &outcome.trace.trotter {
        if info.delta_exceeds_time {
            warn(
                &mut warnings,
                format!(
                    "delta {} exceeds the requested time {}: a single full layer was applied",
                    info.delta, opts.time
                ),
            );
        } else if info.residual_time.abs() > 1e-9 * opts.delta.max(opts.time) {
            warn(
                &mut warnings,
                format!(
                    "time {} is not a multiple of delta {}: simulated {} layers covering {}",
                    opts.time,
                    info.delta,
                    info.layers,
                    info.delta * info.layers as f64
                ),
            );
        }
    }
    if spectrum.is_some() && !outcome.trace.bound_is_dominated(1e-9) {
        warn(
            &mut warnings,
            "fidelity dipped below the exact-flow bound (Trotter error; tighten delta)".to_string(),
        );
    }

    let mut report = TraceReport::new(&outcome.trace, provenance, warnings);
    if let (Some(spec), Some(tr)) = (&spectrum, report.trotter.as_mut()) {
        let simulated = tr.delta * tr.layers as f64;
        let exact = exact_evolve_with_spectrum(&psi0, spec, simulated, 2).map_err(classify)?;
        let err = outcome
            .final_state
            .distance(&exact.final_state)
            .map_err(classify)?;
        tr.error_vs_exact = Some(err);
    }

    let trace_path = write_artifact(
        &opts.out,
        "trace.csv",
        &formats::trace_csv(&outcome.trace, provenance),
    )?;
    let report_path = write_json(&opts.out, "report.json", &report)?;
    println!("wrote {}", trace_path.display());
    println!("wrote {}", report_path.display());
    println!(
        "final energy {}, fidelity {} over {} layers",
        outcome.trace.energy.last().unwrap_or(&f64::NAN),
        outcome.trace.fidelity.last().unwrap_or(&f64::NAN),
        outcome.trace.trotter.as_ref().map_or(0, |i| i.layers)
    );
    Ok(())
}

/// Options for `qite compile`.
#[derive(Debug, Clone)]
pub struct CompileOpts {
    pub hamiltonian: PathBuf,
    pub time: f64,
    pub delta: f64,
    pub policy: PolicyArg,
    pub init: InitSpec,
    pub seed: u64,
    pub out: PathBuf,
}

/// Circuit compilation: `circuit.txt` + `steps.json` + `trace.csv` +
/// `report.json`. An aborted compilation still writes the solved
/// prefix, then exits 3.
pub fn cmd_compile(opts: &CompileOpts, provenance: &Provenance) -> Result<(), RunError> {
    let h = load_hamiltonian(&opts.hamiltonian)?;
    let cap = dense_cap()?;
    let psi0 = build_init(&opts.init, h.qubits(), opts.seed)?;
    let mut warnings = Vec::new();
    let spectrum = optional_spectrum(&h, cap, &mut warnings)?;
    let compiled = compile_evolution(
        &psi0,
        &h,
        opts.time,
        opts.delta,
        opts.policy.0,
        spectrum.as_ref(),
    )
    .map_err(classify)?;

    let layers = compiled.trace.trotter.as_ref().map_or(0, |i| i.layers);
    let max_weight = h
        .terms()
        .iter()
        .map(|t| t.string.weight())
        .max()
        .unwrap_or(0);
    let gate_budget = 4u64
        .saturating_pow(max_weight as u32)
        .saturating_mul(h.terms().len() as u64)
        .saturating_mul(layers as u64);

    let trace_summary = TraceReport::new(&compiled.trace, provenance, Vec::new());
    let mut trotter = trace_summary.trotter.clone();
    if let (Some(spec), Some(tr)) = (&spectrum, trotter.as_mut()) {
        let simulated = tr.delta * tr.layers as f64;
        let exact = exact_evolve_with_spectrum(&psi0, spec, simulated, 2).map_err(classify)?;
        let err = compiled
            .final_state
            .distance(&exact.final_state)
            .map_err(classify)?;
        tr.error_vs_exact = Some(err);
    }
    let aborted = match &compiled.status {
        CompileStatus::Completed => None,
        CompileStatus::Aborted {
            layer,
            term_index,
            error,
        } => Some(AbortRecord {
            layer: *layer,
            term_index: *term_index,
            message: error.to_string(),
        }),
    };
    let report = CompileReport {
        command: provenance.command.clone(),
        flags: provenance.flags.clone(),
        seed: provenance.seed,
        qubits: h.qubits(),
        steps: compiled.steps.len(),
        total_gates: compiled.total_gates,
        gate_budget,
        completed: aborted.is_none(),
        aborted,
        rows: trace_summary.rows,
        final_energy: trace_summary.final_energy,
        final_fidelity: trace_summary.final_fidelity,
        energy_monotone: trace_summary.energy_monotone,
        warnings,
        trotter,
    };

    let circuit_path = write_artifact(
        &opts.out,
        "circuit.txt",
        &formats::gate_list(&compiled.steps, provenance),
    )?;
    let steps_path = write_json(
        &opts.out,
        "steps.json",
        &StepsDocument::new(&compiled.steps, provenance),
    )?;
    let trace_path = write_artifact(
        &opts.out,
        "trace.csv",
        &formats::trace_csv(&compiled.trace, provenance),
    )?;
    let report_path = write_json(&opts.out, "report.json", &report)?;
    for path in [&circuit_path, &steps_path, &trace_path, &report_path] {
        println!("wrote {}", path.display());
    }
    println!(
        "{} gates across {} steps (budget {})",
        report.total_gates, report.steps, report.gate_budget
    );

    if let Some(abort) = &report.aborted {
        return Err(RunError::Solver(format!(
            "compilation aborted at layer {}, term {}: {} (partial artifacts written)",
            abort.layer, abort.term_index, abort.message
        )));
    }
    Ok(())
}

/// Options for `qite qubo`.
#[derive(Debug, Clone)]
pub struct QuboOpts {
    pub qubo: PathBuf,
    pub epsilon: f64,
    pub shots: u64,
    pub seed: u64,
    pub backend: BackendKind,
    pub delta: f64,
    pub policy: PolicyArg,
    pub repeats: u32,
    pub out: Option<PathBuf>,
}

/// QUBO pipeline: encode, evolve to the ε-threshold time, report. The
/// report JSON goes to stdout (and to `report.json` under `--out`).
pub fn cmd_qubo(opts: &QuboOpts, provenance: &Provenance) -> Result<(), RunError> {
    let text = read_input(&opts.qubo)?;
    let q = formats::parse_qubo(&text)
        .map_err(|e| RunError::usage(format!("{}: {e}", opts.qubo.display())))?;
    if opts.backend == BackendKind::Exact {
        let cap = dense_cap()?;
        if q.n() > cap {
            return Err(RunError::usage(format!(
                "QUBO has {} variables but the dense cap is {cap}: the exact backend must \
                 diagonalise (raise QITE_DENSE_CAP, or pick another backend)",
                q.n()
            )));
        }
    }
    let backend = match opts.backend {
        BackendKind::Exact => Backend::Exact,
        BackendKind::Trotter => Backend::Trotter { delta: opts.delta },
        BackendKind::Varqite => Backend::Varqite {
            delta: opts.delta,
            policy: opts.policy.0,
        },
    };
    let report = run_combinatorial(
        &q,
        opts.epsilon,
        opts.shots,
        opts.seed,
        backend,
        opts.repeats,
    )
    .map_err(classify)?;
    let doc = QuboReport::new(&report, q.n(), provenance);
    let mut json =
        serde_json::to_string_pretty(&doc).map_err(|e| RunError::usage(format!("report: {e}")))?;
    json.push('\n');
    print!("{json}");
    if let Some(dir) = &opts.out {
        write_artifact(dir, "report.json", &json)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn init_specs_parse_and_echo() {
        assert_eq!("plus".parse::<InitSpec>().unwrap(), InitSpec::Plus);
        assert_eq!("random".parse::<InitSpec>().unwrap(), InitSpec::Random);
        assert_eq!(
            "basis:0110".parse::<InitSpec>().unwrap(),
            InitSpec::Basis("0110".to_string())
        );
        for bad in ["", "Plus", "basis:", "basis:012", "bases:01"] {
            assert!(bad.parse::<InitSpec>().is_err(), "{bad:?} should fail");
        }
        assert_eq!(InitSpec::Basis("01".into()).to_string(), "basis:01");
    }

    #[test]
    fn policy_and_backend_flags_round_trip() {
        for s in ["full", "reduced"] {
            assert_eq!(s.parse::<PolicyArg>().unwrap().to_string(), s);
        }
        for s in ["exact", "trotter", "varqite"] {
            assert_eq!(s.parse::<BackendKind>().unwrap().to_string(), s);
        }
        assert!("FULL".parse::<PolicyArg>().is_err());
        assert!("qpu".parse::<BackendKind>().is_err());
    }

    #[test]
    fn config_files_parse_trim_and_last_wins() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        write!(
            file,
            "# defaults\n\ntime = 2.5\nsamples=40\n  seed = 9  \nsamples = 60\n"
        )
        .unwrap();
        let config = Config::load(file.path()).unwrap();
        assert_eq!(config.get("time"), Some("2.5"));
        assert_eq!(config.get("samples"), Some("60"));
        assert_eq!(config.get("seed"), Some("9"));
        assert_eq!(config.get("missing"), None);
    }

    #[test]
    fn config_errors_name_the_line() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        write!(file, "time = 2.5\nnot a pair\n").unwrap();
        let err = Config::load(file.path()).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("line 2"), "{err}");
    }

    #[test]
    fn build_init_covers_the_three_specs() {
        let plus = build_init(&InitSpec::Plus, 2, 0).unwrap();
        assert!((plus.amps()[0].re - 0.5).abs() < 1e-15);
        let basis = build_init(&InitSpec::Basis("10".into()), 2, 0).unwrap();
        assert_eq!(basis.amps()[2].re, 1.0);
        let r1 = build_init(&InitSpec::Random, 3, 7).unwrap();
        let r2 = build_init(&InitSpec::Random, 3, 7).unwrap();
        assert_eq!(r1.amps(), r2.amps(), "same seed, same state");
        let r3 = build_init(&InitSpec::Random, 3, 8).unwrap();
        assert_ne!(r1.amps(), r3.amps(), "different seed, different state");
        // Width mismatch is a usage error (exit 1).
        let err = build_init(&InitSpec::Basis("101".into()), 2, 0).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn core_errors_classify_onto_exit_codes() {
        let usage = classify(CoreError::EmptyPauliString);
        assert_eq!(usage.exit_code(), 1);
        let solver = classify(CoreError::ZeroNorm);
        assert_eq!(solver.exit_code(), 3);
        let invariant = classify(CoreError::OutOfDomain {
            name: "p_measured",
            value: 0.1,
            requirement: "must dominate the bound",
        });
        assert_eq!(invariant.exit_code(), 2);
        let other_domain = classify(CoreError::OutOfDomain {
            name: "epsilon",
            value: 2.0,
            requirement: "requires 0 < epsilon < 1",
        });
        assert_eq!(other_domain.exit_code(), 1);
    }
}
