//! Command-line front end.
//!
//! Exit codes: 0 controllable / clean, 1 uncontrollable / violation found,
//! 2 input error, 3 internal error or resource limit, 4 indeterminate.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::controller::{Controller, ControllerFile};
use crate::error::{invalid, Error, Result};
use crate::game::{self, LabelRule, SolveOptions, Verdict};
use crate::ground::GroundLimits;
use crate::oracle::{self, OracleOptions, OracleVerdict, OracleWitness};
use crate::problem::Problem;
use crate::quotient::SetOrder;
use crate::simulate::{self, trace_text, SimOptions};
use clap::{Parser, Subcommand, ValueEnum};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;
pub const EXIT_INDETERMINATE: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "golog-synth", version, about = "Controller synthesis for timed Golog programs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RuleArg {
    Existential,
    Universal,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum OrderArg {
    Smyth,
    Hoare,
}

#[derive(Debug, clap::Args)]
pub struct GameArgs {
    /// Labelling rule for expanded nodes.
    #[arg(long, value_enum, default_value = "existential")]
    pub label_rule: RuleArg,
    /// Maximum number of ground atoms.
    #[arg(long, default_value_t = 10_000)]
    pub max_atoms: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide controllability and write controller.json and controller.dot.
    Synthesize {
        input: PathBuf,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Order on word sets used for pruning.
        #[arg(long, value_enum, default_value = "smyth")]
        order: OrderArg,
        #[arg(long, default_value_t = 200_000)]
        max_nodes: usize,
        #[command(flatten)]
        game: GameArgs,
    },
    /// Evaluate the bad formula on the fluent trace of a timed action trace.
    Check {
        input: PathBuf,
        /// Lines of the form `t: action(args)`.
        #[arg(long)]
        trace: PathBuf,
    },
    /// Play a controller against random timing and environment choices.
    Simulate {
        input: PathBuf,
        #[arg(long)]
        controller: PathBuf,
        #[arg(long, default_value_t = 100)]
        plays: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 50)]
        max_steps: usize,
    },
    /// Solve by exhaustive search over a delay grid.
    Oracle {
        input: PathBuf,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        /// Delays are multiples of 1/DENOMINATOR.
        #[arg(long, default_value_t = 2)]
        denominator: i64,
        #[command(flatten)]
        game: GameArgs,
    },
    /// Print the specification automaton.
    DumpAta { input: PathBuf },
}

impl From<RuleArg> for LabelRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Existential => LabelRule::Existential,
            RuleArg::Universal => LabelRule::Universal,
        }
    }
}

impl From<OrderArg> for SetOrder {
    fn from(o: OrderArg) -> Self {
        match o {
            OrderArg::Smyth => SetOrder::Smyth,
            OrderArg::Hoare => SetOrder::Hoare,
        }
    }
}

fn load(path: &Path, max_atoms: usize, err: &mut dyn Write) -> Result<Problem> {
    let src = std::fs::read_to_string(path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    let limits = GroundLimits { max_atoms, ..GroundLimits::default() };
    let p = Problem::with_limits(&src, limits).map_err(|e| match e {
        Error::Parse(pe) => invalid(format!("{}:{pe}", path.display())),
        other => other,
    })?;
    for w in &p.theory.warnings {
        let _ = writeln!(err, "warning: {w}");
    }
    Ok(p)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) | Error::Invalid(_) | Error::Io(_) | Error::Json(_) => EXIT_INPUT,
        Error::Resource(_) | Error::Internal(_) => EXIT_INTERNAL,
    }
}

/// Parses `args` and runs the command, writing to `out` and `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    match dispatch(cli.command, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: Command, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Synthesize { input, out_dir, order, max_nodes, game } => {
            let p = load(&input, game.max_atoms, err)?;
            let opts = SolveOptions { order: order.into(), rule: game.label_rule.into(), max_nodes };
            let sol = game::solve(&p, opts)?;
            writeln!(out, "{}", sol.verdict.as_str())?;
            write!(err, "{}", sol.stats.to_kv())?;
            match sol.verdict {
                Verdict::Controllable => {
                    let c =
                        Controller::from_solution(&sol).ok_or_else(|| Error::Internal("missing strategy".into()))?;
                    c.validate(&p).map_err(|e| Error::Internal(format!("extracted controller: {e}")))?;
                    std::fs::create_dir_all(&out_dir)?;
                    let json = serde_json::to_string_pretty(&c.to_file(&p, sol.verdict)?)?;
                    std::fs::write(out_dir.join("controller.json"), json + "\n")?;
                    std::fs::write(out_dir.join("controller.dot"), c.to_dot(&p))?;
                    writeln!(out, "controller: {} nodes written to {}", c.nodes.len(), out_dir.display())?;
                    Ok(EXIT_OK)
                }
                Verdict::Uncontrollable => {
                    let w = sol.witness.as_ref().ok_or_else(|| Error::Internal("missing witness".into()))?;
                    writeln!(out, "witness:")?;
                    for s in &w.steps {
                        let name = p.theory.action_name(s.action);
                        let resets: Vec<&str> = s.resets.iter().map(|&c| p.theory.clocks[c].as_str()).collect();
                        let reset =
                            if resets.is_empty() { String::new() } else { format!(" reset {}", resets.join(", ")) };
                        writeln!(out, "  {name} [{}]{reset}", s.owner.keyword())?;
                    }
                    let end = if w.violation { "final node violating the specification" } else { "deadlock" };
                    writeln!(out, "  => {end}")?;
                    Ok(EXIT_NEGATIVE)
                }
            }
        }
        Command::Check { input, trace } => {
            let p = load(&input, GroundLimits::default().max_atoms, err)?;
            let text = std::fs::read_to_string(&trace).map_err(|e| invalid(format!("{}: {e}", trace.display())))?;
            let timed = p.parse_trace(&text).map_err(|e| match e {
                Error::Parse(pe) => invalid(format!("{}:{pe}", trace.display())),
                Error::Invalid(m) => invalid(format!("{}:{m}", trace.display())),
                other => other,
            })?;
            let (by_check, by_ata) = p.check_trace(&timed)?;
            let verdict = |b: bool| if b { "SAT" } else { "UNSAT" };
            writeln!(out, "{}", verdict(by_check))?;
            writeln!(err, "mtl={} ata={}", verdict(by_check), verdict(by_ata))?;
            if by_check != by_ata {
                return Err(Error::Internal("formula checker and automaton disagree".into()));
            }
            Ok(if by_check { EXIT_NEGATIVE } else { EXIT_OK })
        }
        Command::Simulate { input, controller, plays, seed, max_steps } => {
            let p = load(&input, GroundLimits::default().max_atoms, err)?;
            let text =
                std::fs::read_to_string(&controller).map_err(|e| invalid(format!("{}: {e}", controller.display())))?;
            let file: ControllerFile = serde_json::from_str(&text)?;
            let c = Controller::from_file(&p, &file)?;
            let r = simulate::simulate(&p, &c, SimOptions { plays, max_steps, seed })?;
            writeln!(
                out,
                "plays={} completed={} step_limited={} violations={} environment_blocked={} stuck={}",
                r.plays,
                r.completed,
                r.step_limited,
                r.violations.len(),
                r.env_blocked.len(),
                r.stuck.len()
            )?;
            for v in r.violations.iter().chain(&r.env_blocked).take(5) {
                writeln!(out, "play {} at node {}: {:?}", v.play, v.node, v.kind)?;
                write!(out, "{}", trace_text(&p, &v.trace))?;
            }
            Ok(if r.is_clean() { EXIT_OK } else { EXIT_NEGATIVE })
        }
        Command::Oracle { input, depth, denominator, game } => {
            if denominator < 1 {
                return Err(invalid("denominator must be positive"));
            }
            let p = load(&input, game.max_atoms, err)?;
            let opts = OracleOptions { depth, denominator, rule: game.label_rule.into(), ..OracleOptions::default() };
            let r = oracle::brute_solve(&p, opts)?;
            writeln!(out, "{}", r.verdict.as_str())?;
            writeln!(err, "positions={}", r.positions)?;
            match &r.witness {
                Some(OracleWitness::Violation(tr)) => write!(out, "violation:\n{}", trace_text(&p, tr))?,
                Some(OracleWitness::Deadlock(tr)) => write!(out, "deadlock after:\n{}", trace_text(&p, tr))?,
                None => {}
            }
            Ok(match r.verdict {
                OracleVerdict::Controllable => EXIT_OK,
                OracleVerdict::Uncontrollable => EXIT_NEGATIVE,
                OracleVerdict::Indeterminate => EXIT_INDETERMINATE,
            })
        }
        Command::DumpAta { input } => {
            let p = load(&input, GroundLimits::default().max_atoms, err)?;
            let named = p.bad.map_atoms(&mut |&i| Ok::<_, Error>(p.theory.atoms[i].clone()))?;
            if p.theory.scale != 1 {
                writeln!(out, "# time constants multiplied by {}", p.theory.scale)?;
            }
            write!(out, "{}", crate::ata::Ata::build(&named).dump())?;
            Ok(EXIT_OK)
        }
    }
}
