//! `pta-synth` command line front end.
//!
//! Exit codes: 0 solution found / validation ok, 1 no solution / validation
//! failed, 2 depth bound hit, 3 input error. Results go to stdout, statistics
//! and diagnostics to stderr.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path as FsPath, PathBuf};

use clap::{Parser, Subcommand};

use crate::encoding::{encode_path, path_delays};
use crate::lp::feasible;
use crate::model::{parse_model, ParamId, ParamValuation, Pta, Spec};
use crate::rational::nat;
use crate::semantics::{step, Path, Run, RunStep, State};
use crate::synthesis::{synthesize, Outcome, Strategy, SynthesisConfig};
use crate::validate::validate;

pub const THREADS_ENV: &str = "PTA_SYNTH_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Failure = 1,
    BoundHit = 2,
    InputError = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "pta-synth",
    version,
    about = "Controller and parameter synthesis for parametric timed automata"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Synthesize a strategy and parameter valuation.
    Synth {
        model: PathBuf,
        /// Longest tree path explored, in transitions.
        #[arg(long, default_value_t = 64)]
        max_depth: usize,
        /// Solve every candidate and list all feasible valuations.
        #[arg(long)]
        all: bool,
        /// Print each candidate's constraint system on stderr.
        #[arg(long)]
        dump_lp: bool,
        /// Write the strategy here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Disable path-feasibility pruning.
        #[arg(long)]
        no_prune: bool,
    },
    /// Replay a strategy against every nondeterministic branch.
    Validate { model: PathBuf, strategy: PathBuf },
    /// Decide realizability of one path within the deadline.
    CheckPath {
        model: PathBuf,
        /// Interleaved path `l0 e1 l1 ... en ln`.
        #[arg(long)]
        path: String,
        #[arg(long)]
        dump_lp: bool,
    },
    /// Replay a single closed-loop run.
    Simulate {
        model: PathBuf,
        strategy: PathBuf,
        /// `first`, or 1-based successor choices per step, e.g. `2,1`.
        #[arg(long, default_value = "first")]
        resolve: String,
    },
}

struct InputError(String);

type CmdResult = Result<ExitStatus, InputError>;

fn read(path: &FsPath) -> Result<String, InputError> {
    fs::read_to_string(path).map_err(|e| InputError(format!("{}: {}", path.display(), e)))
}

fn load_model(path: &FsPath) -> Result<(Pta, Spec), InputError> {
    let text = read(path)?;
    parse_model(&text).map_err(|e| InputError(format!("{}: {}", path.display(), e)))
}

fn load_strategy(pta: &Pta, path: &FsPath) -> Result<Strategy, InputError> {
    let text = read(path)?;
    Strategy::parse(pta, &text).map_err(|e| InputError(format!("{}: {}", path.display(), e)))
}

fn threads_from_env() -> usize {
    std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(0)
}

/// Runs the command line `args` (including the program name).
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> ExitStatus
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{}", text);
                ExitStatus::InputError
            } else {
                let _ = write!(out, "{}", text);
                ExitStatus::Success
            };
        }
    };
    let result = match cli.command {
        Command::Synth {
            model,
            max_depth,
            all,
            dump_lp,
            out: out_file,
            no_prune,
        } => {
            let cfg = SynthesisConfig {
                max_depth,
                enumerate_all: all,
                prune: !no_prune,
                threads: threads_from_env(),
                dump_lp,
            };
            cmd_synth(&model, &cfg, out_file.as_deref(), out, err)
        }
        Command::Validate { model, strategy } => cmd_validate(&model, &strategy, out),
        Command::CheckPath {
            model,
            path,
            dump_lp,
        } => cmd_check_path(&model, &path, dump_lp, out, err),
        Command::Simulate {
            model,
            strategy,
            resolve,
        } => cmd_simulate(&model, &strategy, &resolve, out),
    };
    match result {
        Ok(status) => status,
        Err(InputError(msg)) => {
            let _ = writeln!(err, "error: {}", msg);
            ExitStatus::InputError
        }
    }
}

fn io_error(e: std::io::Error) -> InputError {
    InputError(format!("write failed: {}", e))
}

fn cmd_synth(
    model: &FsPath,
    cfg: &SynthesisConfig,
    out_file: Option<&FsPath>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let (pta, spec) = load_model(model)?;
    let report = synthesize(&pta, &spec, cfg).map_err(|e| InputError(e.to_string()))?;
    for g in &report.normalization.rewritten {
        writeln!(
            err,
            "note: conjoined guards of {} transitions from {} on input {}",
            g.transitions.len(),
            pta.location_name(g.source),
            pta.symbol_name(g.input)
        )
        .map_err(io_error)?;
    }
    for (i, dump) in &report.lp_dumps {
        writeln!(err, "# candidate {}", i).map_err(io_error)?;
        write!(err, "{}", dump).map_err(io_error)?;
    }
    writeln!(err, "stats: {}", report.stats.summary()).map_err(io_error)?;
    let status = match &report.outcome {
        Outcome::Solution(strategy) => {
            writeln!(out, "RESULT solution").map_err(io_error)?;
            if cfg.enumerate_all {
                writeln!(out, "SOLUTIONS {}", report.solutions.len()).map_err(io_error)?;
                for s in &report.solutions {
                    writeln!(out, "valuation {}", s.valuation().display(&pta)).map_err(io_error)?;
                }
            }
            let text = strategy.to_text(&pta);
            match out_file {
                Some(path) => {
                    fs::write(path, &text)
                        .map_err(|e| InputError(format!("{}: {}", path.display(), e)))?;
                    writeln!(out, "gamma {}", strategy.valuation().display(&pta))
                        .map_err(io_error)?;
                }
                None => write!(out, "{}", text).map_err(io_error)?,
            }
            ExitStatus::Success
        }
        Outcome::NoSolution => {
            writeln!(out, "RESULT no-solution").map_err(io_error)?;
            ExitStatus::Failure
        }
        Outcome::BoundHit => {
            writeln!(out, "RESULT bound-hit").map_err(io_error)?;
            writeln!(
                err,
                "note: no solution within depth {}; deeper branches were cut",
                cfg.max_depth
            )
            .map_err(io_error)?;
            ExitStatus::BoundHit
        }
    };
    Ok(status)
}

fn cmd_validate(model: &FsPath, strategy: &FsPath, out: &mut dyn Write) -> CmdResult {
    let (pta, spec) = load_model(model)?;
    let strategy = load_strategy(&pta, strategy)?;
    let report = validate(&pta, &spec, &strategy).map_err(|e| InputError(e.to_string()))?;
    write!(out, "{}", report.render(&pta, &strategy)).map_err(io_error)?;
    Ok(if report.ok {
        ExitStatus::Success
    } else {
        ExitStatus::Failure
    })
}

fn cmd_check_path(
    model: &FsPath,
    path: &str,
    dump_lp: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> CmdResult {
    let (pta, spec) = load_model(model)?;
    let path = Path::parse(&pta, path).map_err(|e| InputError(e.to_string()))?;
    let system = encode_path(&pta, &path, &spec);
    if dump_lp {
        write!(err, "{}", system.dump()).map_err(io_error)?;
    }
    match feasible(&system) {
        Some(w) => {
            let gamma = ParamValuation::new(
                (0..pta.params().len())
                    .map(|i| {
                        let name = crate::encoding::param_var(&pta, ParamId(i));
                        w.get(&name)
                            .and_then(|v| v.to_integer().try_into().ok())
                            .expect("integer parameter value")
                    })
                    .collect(),
            );
            let delays = path_delays(&system, w.values(), path.len());
            writeln!(out, "feasible").map_err(io_error)?;
            writeln!(out, "gamma {}", gamma.display(&pta)).map_err(io_error)?;
            let delays: Vec<String> = delays.iter().map(|d| d.to_string()).collect();
            writeln!(out, "delays {}", delays.join(" ")).map_err(io_error)?;
            Ok(ExitStatus::Success)
        }
        None => {
            writeln!(out, "infeasible").map_err(io_error)?;
            Ok(ExitStatus::Failure)
        }
    }
}

fn parse_resolve(text: &str) -> Result<Vec<usize>, InputError> {
    if text == "first" {
        return Ok(Vec::new());
    }
    text.split(',')
        .map(|w| match w.trim().parse::<usize>() {
            Ok(k) if k >= 1 => Ok(k),
            _ => Err(InputError(format!(
                "invalid --resolve entry {:?}: expected `first` or 1-based indices",
                w
            ))),
        })
        .collect()
}

fn cmd_simulate(
    model: &FsPath,
    strategy: &FsPath,
    resolve: &str,
    out: &mut dyn Write,
) -> CmdResult {
    let (pta, spec) = load_model(model)?;
    let strategy = load_strategy(&pta, strategy)?;
    let choices = parse_resolve(resolve)?;
    let gamma = strategy.valuation();
    let mut state = State::initial(&pta);
    let mut run = Run::default();
    let mut path = Vec::new();
    let verdict = loop {
        if spec.is_avoid(state.location) {
            break "avoid-hit";
        }
        if spec.is_target(state.location) {
            break if *state.valuation.global() <= nat(spec.deadline) {
                "ok"
            } else {
                "deadline-exceeded"
            };
        }
        let Some((d, a)) = strategy.lookup(&path) else {
            break "off-tree";
        };
        let d = d.clone();
        let successors = step(&pta, gamma, &state, &d, a).map_err(|e| InputError(e.to_string()))?;
        if successors.is_empty() {
            break "stuck";
        }
        let k = choices.get(run.steps.len()).copied().unwrap_or(1);
        let Some((e, next)) = successors.into_iter().nth(k - 1) else {
            return Err(InputError(format!(
                "--resolve index {} out of range at step {}",
                k,
                run.steps.len() + 1
            )));
        };
        run.steps.push(RunStep {
            delay: d,
            transition: e,
        });
        path.push(e);
        state = next;
    };
    let trace = run
        .format_trace(&pta, gamma)
        .map_err(|e| InputError(e.to_string()))?;
    write!(out, "{}", trace).map_err(io_error)?;
    writeln!(
        out,
        "SIMULATION result={} end={} time={}",
        verdict,
        pta.location_name(state.location),
        state.valuation.global()
    )
    .map_err(io_error)?;
    Ok(if verdict == "ok" {
        ExitStatus::Success
    } else {
        ExitStatus::Failure
    })
}
