//! `qite` — simulate, Trotterise and compile imaginary-time evolution
//! for bounded-order Pauli Hamiltonians, and run the QUBO pipeline on
//! top of it.
//!
//! Flag resolution: explicit flags win over `--config` key=value
//! entries, which win over built-in defaults. Every artifact records
//! the *resolved* values, so a run is reproducible from any of its
//! outputs. Exit codes: 0 success, 1 usage, 2 invariant violation,
//! 3 solver failure.

mod formats;
mod run;

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

use formats::Provenance;
use run::{BackendKind, Config, InitSpec, PolicyArg, RunError};

#[derive(Parser)]
#[command(
    name = "qite",
    version,
    about = "Imaginary-time evolution: exact simulation, Trotterisation, \
             circuit compilation and QUBO solving",
    disable_help_subcommand = true
)]
struct Cli {
    /// Key=value file supplying defaults for any long flag
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact eigenbasis evolution (writes trace.csv, report.json)
    Exact(ExactArgs),
    /// First-order Trotterised evolution (writes trace.csv, report.json)
    Trotter(TrotterArgs),
    /// Compile the evolution into Pauli-rotation circuits
    /// (writes circuit.txt, steps.json, trace.csv, report.json)
    Compile(CompileArgs),
    /// Encode a QUBO, evolve to the ε-threshold time, report success
    /// probabilities (JSON on stdout)
    Qubo(QuboArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Hamiltonian file: one `<coefficient> <pauli-string>` per line
    #[arg(long, value_name = "FILE")]
    hamiltonian: Option<PathBuf>,

    /// Total evolution time t ≥ 0
    #[arg(long, value_name = "T")]
    time: Option<f64>,

    /// Start state: plus | random | basis:<bits> [default: plus]
    #[arg(long, value_name = "SPEC")]
    init: Option<InitSpec>,

    /// RNG seed (random init, sampling) [default: 0]
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,

    /// Output directory for artifacts [default: .]
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExactArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Number of sampled rows in the trace [default: 100]
    #[arg(long, value_name = "N")]
    samples: Option<usize>,
}

#[derive(Args)]
struct TrotterArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Trotter step δ > 0 (time is rounded to whole layers; the trace
    /// is per-layer)
    #[arg(long, value_name = "DELTA")]
    delta: Option<f64>,
}

#[derive(Args)]
struct CompileArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Trotter step δ > 0 driving the compilation
    #[arg(long, value_name = "DELTA")]
    delta: Option<f64>,

    /// Generator set per step: full | reduced [default: full]
    #[arg(long, value_name = "POLICY")]
    policy: Option<PolicyArg>,
}

#[derive(Args)]
struct QuboArgs {
    /// QUBO file: `lin <i> <value>` / `quad <i> <j> <value>` records
    #[arg(long, value_name = "FILE")]
    qubo: Option<PathBuf>,

    /// Target single-shot success probability ε in (0, 1) [default: 0.9]
    #[arg(long, value_name = "EPS")]
    epsilon: Option<f64>,

    /// Measurement shots per experiment [default: 32]
    #[arg(long, value_name = "N")]
    shots: Option<u64>,

    /// RNG seed for the shot experiments [default: 0]
    #[arg(long, value_name = "SEED")]
    seed: Option<u64>,

    /// Evolution backend: exact | trotter | varqite [default: exact]
    #[arg(long, value_name = "BACKEND")]
    backend: Option<BackendKind>,

    /// Trotter step for the approximate backends [default: 0.05]
    #[arg(long, value_name = "DELTA")]
    delta: Option<f64>,

    /// Generator policy for the varqite backend: full | reduced
    /// [default: full]
    #[arg(long, value_name = "POLICY")]
    policy: Option<PolicyArg>,

    /// Repeated shot experiments behind `empirical_success` [default: 1]
    #[arg(long, value_name = "N")]
    repeats: Option<u32>,

    /// Also write report.json to this directory
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

/// Resolves one flag at a time (flag > config > default) while
/// recording the effective value for provenance.
struct Resolver<'a> {
    config: &'a Config,
    flags: BTreeMap<String, String>,
}

impl<'a> Resolver<'a> {
    fn new(config: &'a Config) -> Self {
        Self {
            config,
            flags: BTreeMap::new(),
        }
    }

    fn pick<T>(&mut self, name: &str, flag: Option<T>, default: Option<T>) -> Result<T, RunError>
    where
        T: FromStr + fmt::Display,
    {
        let value = match flag {
            Some(v) => v,
            None => match self.config.get(name) {
                Some(raw) => raw.parse::<T>().map_err(|_| {
                    RunError::usage(format!("config key `{name}`: invalid value `{raw}`"))
                })?,
                None => default.ok_or_else(|| {
                    RunError::usage(format!(
                        "missing `--{name}` (not on the command line, not in the config)"
                    ))
                })?,
            },
        };
        self.flags.insert(name.to_string(), value.to_string());
        Ok(value)
    }

    fn pick_path(
        &mut self,
        name: &str,
        flag: Option<PathBuf>,
        default: Option<&str>,
    ) -> Result<PathBuf, RunError> {
        let value = match flag {
            Some(v) => v,
            None => match self.config.get(name) {
                Some(raw) => PathBuf::from(raw),
                None => PathBuf::from(default.ok_or_else(|| {
                    RunError::usage(format!(
                        "missing `--{name}` (not on the command line, not in the config)"
                    ))
                })?),
            },
        };
        self.flags
            .insert(name.to_string(), value.to_string_lossy().into_owned());
        Ok(value)
    }

    fn pick_optional_path(&mut self, name: &str, flag: Option<PathBuf>) -> Option<PathBuf> {
        let value = flag.or_else(|| self.config.get(name).map(PathBuf::from));
        if let Some(path) = &value {
            self.flags
                .insert(name.to_string(), path.to_string_lossy().into_owned());
        }
        value
    }

    fn provenance(self, command: &str, seed: u64) -> Provenance {
        Provenance {
            command: command.to_string(),
            flags: self.flags,
            seed,
        }
    }
}

fn run_exact(args: ExactArgs, config: &Config) -> Result<(), RunError> {
    let mut r = Resolver::new(config);
    let opts = run::ExactOpts {
        hamiltonian: r.pick_path("hamiltonian", args.common.hamiltonian, None)?,
        time: r.pick("time", args.common.time, None)?,
        samples: r.pick("samples", args.samples, Some(100))?,
        init: r.pick("init", args.common.init, Some(InitSpec::Plus))?,
        seed: r.pick("seed", args.common.seed, Some(0))?,
        out: r.pick_path("out", args.common.out, Some("."))?,
    };
    let provenance = r.provenance("exact", opts.seed);
    run::cmd_exact(&opts, &provenance)
}

fn run_trotter(args: TrotterArgs, config: &Config) -> Result<(), RunError> {
    let mut r = Resolver::new(config);
    let opts = run::TrotterOpts {
        hamiltonian: r.pick_path("hamiltonian", args.common.hamiltonian, None)?,
        time: r.pick("time", args.common.time, None)?,
        delta: r.pick("delta", args.delta, None)?,
        init: r.pick("init", args.common.init, Some(InitSpec::Plus))?,
        seed: r.pick("seed", args.common.seed, Some(0))?,
        out: r.pick_path("out", args.common.out, Some("."))?,
    };
    let provenance = r.provenance("trotter", opts.seed);
    run::cmd_trotter(&opts, &provenance)
}

fn run_compile(args: CompileArgs, config: &Config) -> Result<(), RunError> {
    let mut r = Resolver::new(config);
    let opts = run::CompileOpts {
        hamiltonian: r.pick_path("hamiltonian", args.common.hamiltonian, None)?,
        time: r.pick("time", args.common.time, None)?,
        delta: r.pick("delta", args.delta, None)?,
        policy: r.pick(
            "policy",
            args.policy,
            Some(PolicyArg::from_str("full").unwrap()),
        )?,
        init: r.pick("init", args.common.init, Some(InitSpec::Plus))?,
        seed: r.pick("seed", args.common.seed, Some(0))?,
        out: r.pick_path("out", args.common.out, Some("."))?,
    };
    let provenance = r.provenance("compile", opts.seed);
    run::cmd_compile(&opts, &provenance)
}

fn run_qubo(args: QuboArgs, config: &Config) -> Result<(), RunError> {
    let mut r = Resolver::new(config);
    let opts = run::QuboOpts {
        qubo: r.pick_path("qubo", args.qubo, None)?,
        epsilon: r.pick("epsilon", args.epsilon, Some(0.9))?,
        shots: r.pick("shots", args.shots, Some(32))?,
        seed: r.pick("seed", args.seed, Some(0))?,
        backend: r.pick("backend", args.backend, Some(BackendKind::Exact))?,
        delta: r.pick("delta", args.delta, Some(0.05))?,
        policy: r.pick(
            "policy",
            args.policy,
            Some(PolicyArg::from_str("full").unwrap()),
        )?,
        repeats: r.pick("repeats", args.repeats, Some(1))?,
        out: r.pick_optional_path("out", args.out),
    };
    let provenance = r.provenance("qubo", opts.seed);
    run::cmd_qubo(&opts, &provenance)
}

fn dispatch(cli: Cli) -> Result<(), RunError> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    };
    match cli.command {
        Command::Exact(args) => run_exact(args, &config),
        Command::Trotter(args) => run_trotter(args, &config),
        Command::Compile(args) => run_compile(args, &config),
        Command::Qubo(args) => run_qubo(args, &config),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version are successes; anything else is a usage
            // error, remapped from clap's exit 2 to honour the
            // 0/1/2/3 contract (2 is reserved for invariant
            // violations).
            let benign = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            std::process::exit(if benign { 0 } else { 1 });
        }
    };
    match dispatch(cli) {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}
