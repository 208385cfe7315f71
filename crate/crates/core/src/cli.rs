//! Command line front end: argument parsing, dispatch and the stable text
//! output that scripts and tests read.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bruteforce::{enumerate_domain, verify_sparsifier, Reference, VerifyScope};
use crate::error::{Error, Result};
use crate::instance::{parse_instance, DomainInstance};
use crate::mask::SubsetMask;
use crate::oracle::DomainOracle;
use crate::solvers::{solve, LimitedBuilder, Problem, ProblemSpec, SmallBuilder, SparsifierBuilder};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Small when the domain declares a size bound, limited otherwise.
    #[default]
    Auto,
    Small,
    Limited,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Solve,
    Sparsify,
    Enumerate,
    Verify,
}

/// Everything `run` needs besides the instance.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub problem: Option<Problem>,
    pub k: Option<usize>,
    pub d: Option<usize>,
    pub modified: bool,
    pub seed: u64,
    pub epsilon: f64,
    pub p: Option<usize>,
    pub trials: Option<u64>,
    pub mode: Mode,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            problem: None,
            k: None,
            d: None,
            modified: false,
            seed: 0,
            epsilon: 0.01,
            p: None,
            trials: None,
            mode: Mode::Auto,
        }
    }

    pub fn problem(mut self, problem: Problem, k: usize, d: usize) -> Self {
        self.problem = Some(problem);
        self.k = Some(k);
        self.d = Some(d);
        self
    }
}

#[derive(Debug, Parser)]
#[command(name = "maxdist", version, about = "Max-distance sparsifiers, diversification and clustering")]
pub struct Cli {
    #[command(subcommand)]
    pub command: CliCommand,
}

#[derive(Debug, Subcommand)]
pub enum CliCommand {
    /// Decide a diversification or clustering problem and print witnesses.
    Solve(CommonArgs),
    /// Build a sparsifier and print it with oracle call counts.
    Sparsify(CommonArgs),
    /// Print every member of the domain.
    Enumerate(CommonArgs),
    /// Build a sparsifier and check it against the enumerated domain.
    Verify(CommonArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// One of maxmin, maxsum, kcenter, ksumradii.
    #[arg(long)]
    pub problem: Option<Problem>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub modified: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long, value_enum, default_value_t = Mode::Auto)]
    pub mode: Mode,
}

impl CliCommand {
    pub fn into_parts(self) -> (RunConfig, PathBuf) {
        let (command, a) = match self {
            CliCommand::Solve(a) => (Command::Solve, a),
            CliCommand::Sparsify(a) => (Command::Sparsify, a),
            CliCommand::Enumerate(a) => (Command::Enumerate, a),
            CliCommand::Verify(a) => (Command::Verify, a),
        };
        let config = RunConfig {
            command,
            problem: a.problem,
            k: a.k,
            d: a.d,
            modified: a.modified,
            seed: a.seed,
            epsilon: a.epsilon,
            p: a.p,
            trials: a.trials,
            mode: a.mode,
        };
        (config, a.instance)
    }
}

fn write_set(out: &mut dyn Write, set: &SubsetMask) -> Result<()> {
    if set.is_empty() {
        writeln!(out, "set:")?;
    } else {
        writeln!(out, "set: {set}")?;
    }
    Ok(())
}

fn builder(config: &RunConfig, oracle: &dyn DomainOracle) -> Result<Box<dyn SparsifierBuilder>> {
    let small = match config.mode {
        Mode::Auto => oracle.size_bound().is_some(),
        Mode::Small => true,
        Mode::Limited => false,
    };
    Ok(if small {
        Box::new(SmallBuilder)
    } else {
        if !(config.epsilon > 0.0 && config.epsilon < 1.0) {
            return Err(Error::usage(format!("epsilon must lie in (0, 1), got {}", config.epsilon)));
        }
        Box::new(LimitedBuilder {
            seed: config.seed,
            epsilon: config.epsilon,
            p: config.p,
            trials: config.trials,
        })
    })
}

fn need(value: Option<usize>, flag: &str) -> Result<usize> {
    value.ok_or_else(|| Error::usage(format!("--{flag} is required")))
}

fn spec(config: &RunConfig) -> Result<ProblemSpec> {
    let problem = config
        .problem
        .ok_or_else(|| Error::usage("--problem is required"))?;
    let mut spec = ProblemSpec::new(problem, need(config.k, "k")?, need(config.d, "d")?);
    if config.modified {
        spec = spec.modified();
    }
    Ok(spec)
}

/// Sparsifier shape `(k, cap)`: the solver's shape when a problem is given,
/// otherwise `--k` and `--d` as they are.
fn shape(config: &RunConfig) -> Result<(usize, usize)> {
    if config.problem.is_some() {
        return Ok(spec(config)?.sparsifier_shape());
    }
    if config.modified {
        return Err(Error::usage("--modified needs --problem"));
    }
    let k = need(config.k, "k")?;
    if k == 0 {
        return Err(Error::usage("k must be at least 1"));
    }
    Ok((k, need(config.d, "d")?))
}

/// Runs one command against a parsed instance, writing its report to `out`.
pub fn run(config: &RunConfig, instance: &DomainInstance, out: &mut dyn Write) -> Result<()> {
    let oracle = instance.oracle()?;
    let oracle = oracle.as_ref();
    match config.command {
        Command::Solve => {
            let spec = spec(config)?;
            let b = builder(config, oracle)?;
            let answer = solve(oracle, &spec, b.as_ref())?.answer;
            writeln!(out, "{}", if answer.feasible { "YES" } else { "NO" })?;
            for w in &answer.witnesses {
                write_set(out, w)?;
            }
            for r in answer.radii.iter().flatten() {
                writeln!(out, "radius: {r}")?;
            }
            if let Some(v) = answer.objective {
                writeln!(out, "objective: {v}")?;
            }
        }
        Command::Sparsify => {
            let (k, cap) = shape(config)?;
            let report = builder(config, oracle)?.build(oracle, k, cap)?;
            writeln!(out, "size: {}", report.family.len())?;
            for s in report.family.sorted().iter() {
                write_set(out, s)?;
            }
            writeln!(out, "calls_opt: {}", report.calls_opt)?;
            writeln!(out, "calls_extend: {}", report.calls_extend)?;
            writeln!(out, "seed: {}", report.seed.unwrap_or(config.seed))?;
        }
        Command::Enumerate => {
            let family = enumerate_domain(oracle)?;
            writeln!(out, "size: {}", family.len())?;
            for s in family.sorted().iter() {
                write_set(out, s)?;
            }
        }
        Command::Verify => {
            let (k, cap) = shape(config)?;
            let report = builder(config, oracle)?.build(oracle, k, cap)?;
            let domain = enumerate_domain(oracle)?;
            let n = oracle.universe_size();
            // The sunflower construction is exact only for tuples inside its radius.
            let reference = match report.radius {
                Some(r) if report.cap.is_none() => Reference::Ball {
                    center: SubsetMask::empty(n),
                    radius: r,
                },
                _ => Reference::PowerSet,
            };
            let scope = VerifyScope {
                k,
                cap: Some(cap),
                reference,
            };
            match verify_sparsifier(&domain, &report.family, &scope)?.counterexample {
                None => writeln!(out, "OK")?,
                Some(c) => {
                    writeln!(out, "FAIL")?;
                    for s in c.tuple.iter().chain([&c.missed]) {
                        write_set(out, s)?;
                    }
                }
            }
        }
    }
    Ok(())
}

/// Reads and parses the instance file, then runs; the error carries the exit code.
pub fn run_file(config: &RunConfig, path: &std::path::Path, out: &mut dyn Write) -> Result<()> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::usage(format!("cannot read {}: {e}", path.display())))?;
    let instance = parse_instance(&text)?;
    run(config, &instance, out)
}
