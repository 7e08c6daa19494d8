//! Brute-force game on a finite delay grid.
//!
//! The controller sees the action history but not the clocks, so a game
//! position is the set of concrete timed histories consistent with the
//! actions played. Delays range over multiples of `1/denominator` up to
//! `K + 1` and are chosen adversarially. A final position is bad if one of
//! its histories satisfies the bad formula under [`mtl::check`]. Positions
//! at the depth bound that still need their children are unknown.

use std::collections::BTreeSet;

use num_rational::Rational64;

use crate::dsl::Owner;
use crate::error::Result;
use crate::game::LabelRule;
use crate::ground::ActionId;
use crate::mtl;
use crate::problem::Problem;
use crate::program::ProgramExpr;
use crate::world::{guard_sat, FluentState};

#[derive(Debug, Clone, Copy)]
pub struct OracleOptions {
    pub depth: usize,
    /// Delays are multiples of `1/denominator` (scaled time units).
    pub denominator: i64,
    pub rule: LabelRule,
    /// Upper bound on concrete histories held in one position.
    pub max_histories: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions { depth: 8, denominator: 2, rule: LabelRule::Existential, max_histories: 2_000_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleVerdict {
    Controllable,
    Uncontrollable,
    Indeterminate,
}

impl OracleVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            OracleVerdict::Controllable => "CONTROLLABLE",
            OracleVerdict::Uncontrollable => "UNCONTROLLABLE",
            OracleVerdict::Indeterminate => "INDETERMINATE",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OracleWitness {
    /// A final timed history satisfying the bad formula (scaled time).
    Violation(Vec<(ActionId, Rational64)>),
    /// A non-final history from which nothing can fire.
    Deadlock(Vec<(ActionId, Rational64)>),
}

#[derive(Debug, Clone)]
pub struct OracleResult {
    pub verdict: OracleVerdict,
    pub witness: Option<OracleWitness>,
    pub positions: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum K3 {
    Good,
    Bad,
    Unknown,
}

impl K3 {
    fn and(self, o: K3) -> K3 {
        match (self, o) {
            (K3::Bad, _) | (_, K3::Bad) => K3::Bad,
            (K3::Unknown, _) | (_, K3::Unknown) => K3::Unknown,
            _ => K3::Good,
        }
    }

    fn or(self, o: K3) -> K3 {
        match (self, o) {
            (K3::Good, _) | (_, K3::Good) => K3::Good,
            (K3::Unknown, _) | (_, K3::Unknown) => K3::Unknown,
            _ => K3::Bad,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct History {
    clocks: Vec<Rational64>,
    trace: Vec<(ActionId, Rational64)>,
}

struct Position {
    fluents: FluentState,
    program: ProgramExpr,
    histories: BTreeSet<History>,
}

struct Child {
    owner: Owner,
    pos: Position,
}

struct Solver<'a> {
    p: &'a Problem,
    opts: OracleOptions,
    grid: Vec<Rational64>,
    positions: usize,
}

impl Solver<'_> {
    fn violating(&self, pos: &Position) -> Result<Option<Vec<(ActionId, Rational64)>>> {
        if !pos.program.is_final(&pos.fluents) {
            return Ok(None);
        }
        for h in &pos.histories {
            let word = mtl::fluent_trace(&self.p.theory, &h.trace)?;
            if mtl::check(&word, &self.p.bad, 0)? {
                return Ok(Some(h.trace.clone()));
            }
        }
        Ok(None)
    }

    fn children(&self, pos: &Position) -> Result<Vec<Child>> {
        let t = &self.p.theory;
        let mut out = Vec::new();
        for (a, rest) in pos.program.steps(&pos.fluents, t) {
            let action = t.action(a)?;
            let post = t.progress(&pos.fluents, a);
            let resets = t.resets(&post, a);
            let mut histories = BTreeSet::new();
            for h in &pos.histories {
                let now = h.trace.last().map_or(Rational64::from_integer(0), |x| x.1);
                for d in &self.grid {
                    let mut clocks: Vec<Rational64> = h.clocks.iter().map(|c| c + d).collect();
                    if !guard_sat(&action.guard, &clocks) {
                        continue;
                    }
                    for &r in &resets {
                        clocks[r] = Rational64::from_integer(0);
                    }
                    let mut trace = h.trace.clone();
                    trace.push((a, now + d));
                    histories.insert(History { clocks, trace });
                }
            }
            if histories.len() > self.opts.max_histories {
                return Err(crate::Error::Resource(format!(
                    "more than {} concrete histories",
                    self.opts.max_histories
                )));
            }
            if !histories.is_empty() {
                out.push(Child { owner: action.owner, pos: Position { fluents: post, program: rest, histories } });
            }
        }
        Ok(out)
    }

    /// Label and, for bad positions, a witness.
    fn solve(&mut self, pos: &Position, depth: usize) -> Result<(K3, Option<OracleWitness>)> {
        self.positions += 1;
        if let Some(tr) = self.violating(pos)? {
            return Ok((K3::Bad, Some(OracleWitness::Violation(tr))));
        }
        let is_final = pos.program.is_final(&pos.fluents);
        let children = self.children(pos)?;
        let deadlock = || {
            let h = pos.histories.iter().next().expect("positions are nonempty");
            Some(OracleWitness::Deadlock(h.trace.clone()))
        };
        if children.is_empty() {
            return Ok(if is_final { (K3::Good, None) } else { (K3::Bad, deadlock()) });
        }
        let has_env = children.iter().any(|c| c.owner == Owner::Environment);
        let env_only = self.opts.rule == LabelRule::Existential && (is_final || has_env);
        if depth == self.opts.depth {
            if env_only && !has_env {
                return Ok((K3::Good, None));
            }
            return Ok((K3::Unknown, None));
        }
        let mut env = K3::Good;
        let mut ctrl = K3::Bad;
        let mut ctrl_witness = None;
        let universal = self.opts.rule == LabelRule::Universal;
        for c in children.iter().filter(|c| c.owner == Owner::Environment || universal) {
            let (l, w) = self.solve(&c.pos, depth + 1)?;
            if l == K3::Bad {
                return Ok((K3::Bad, w));
            }
            env = env.and(l);
        }
        if universal || env_only {
            return Ok((env, None));
        }
        for c in children.iter().filter(|c| c.owner == Owner::Controller) {
            let (l, w) = self.solve(&c.pos, depth + 1)?;
            if l == K3::Good {
                return Ok((K3::Good, None));
            }
            if ctrl_witness.is_none() {
                ctrl_witness = w;
            }
            ctrl = ctrl.or(l);
        }
        Ok((ctrl, if ctrl == K3::Bad { ctrl_witness } else { None }))
    }
}

/// Delay grid `{0, 1/n, 2/n, …, K + 1}` in scaled units.
pub fn delay_grid(k: u32, denominator: i64) -> Vec<Rational64> {
    (0..=(i64::from(k) + 1) * denominator).map(|i| Rational64::new(i, denominator)).collect()
}

pub fn brute_solve(problem: &Problem, opts: OracleOptions) -> Result<OracleResult> {
    let k = problem.theory.k.max(problem.ata.max_constant().ceil().to_integer() as u32);
    let mut s = Solver { p: problem, opts, grid: delay_grid(k, opts.denominator), positions: 0 };
    let root = Position {
        fluents: problem.theory.initial.clone(),
        program: problem.program.clone(),
        histories: BTreeSet::from([History {
            clocks: vec![Rational64::from_integer(0); problem.theory.clocks.len()],
            trace: Vec::new(),
        }]),
    };
    let (label, witness) = s.solve(&root, 0)?;
    let verdict = match label {
        K3::Good => OracleVerdict::Controllable,
        K3::Bad => OracleVerdict::Uncontrollable,
        K3::Unknown => OracleVerdict::Indeterminate,
    };
    Ok(OracleResult { verdict, witness, positions: s.positions })
}
