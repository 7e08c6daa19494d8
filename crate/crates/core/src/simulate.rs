//! Randomised plays of a controller against adversarial timing and
//! environment choices.

use std::fmt::Write as _;

use num_rational::Rational64;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::controller::Controller;
use crate::dsl::Owner;
use crate::error::Result;
use crate::ground::{ActionId, Guard};
use crate::mtl;
use crate::problem::Problem;
use crate::world::guard_sat;

#[derive(Debug, Clone, Copy)]
pub struct SimOptions {
    pub plays: usize,
    pub max_steps: usize,
    pub seed: u64,
}

impl Default for SimOptions {
    fn default() -> Self {
        SimOptions { plays: 100, max_steps: 50, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IssueKind {
    /// A final node was reached on a trace satisfying the bad formula.
    Violation,
    /// An enabled environment action was not selected.
    EnvironmentBlocked(ActionId),
    /// No selected edge could fire at any delay.
    Stuck,
}

#[derive(Debug, Clone)]
pub struct Issue {
    pub play: usize,
    pub node: usize,
    pub kind: IssueKind,
    /// Timed actions, scaled time.
    pub trace: Vec<(ActionId, Rational64)>,
}

#[derive(Debug, Clone, Default)]
pub struct SimReport {
    pub plays: usize,
    pub completed: usize,
    pub step_limited: usize,
    pub violations: Vec<Issue>,
    pub env_blocked: Vec<Issue>,
    pub stuck: Vec<Issue>,
}

impl SimReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty() && self.env_blocked.is_empty()
    }
}

/// Trace text in source units, one `t: action` per line.
pub fn trace_text(problem: &Problem, trace: &[(ActionId, Rational64)]) -> String {
    let mut out = String::new();
    for &(a, t) in trace {
        let _ = writeln!(out, "{}: {}", t / problem.theory.scale, problem.theory.action_name(a));
    }
    out
}

/// Quarter-grid delays up to `K + 1` plus the delays that hit each guard
/// constant exactly, restricted to those satisfying `guard`.
pub fn admissible_delays(guard: &Guard, clocks: &[Rational64], k: u32) -> Vec<Rational64> {
    let mut cands: Vec<Rational64> = (0..=4 * (i64::from(k) + 1)).map(|i| Rational64::new(i, 4)).collect();
    for g in guard {
        let d = Rational64::from_integer(i64::from(g.value)) - clocks[g.clock];
        if d >= Rational64::from_integer(0) {
            cands.push(d);
        }
    }
    cands.sort();
    cands.dedup();
    cands
        .into_iter()
        .filter(|d| {
            let shifted: Vec<Rational64> = clocks.iter().map(|c| c + d).collect();
            guard_sat(guard, &shifted)
        })
        .collect()
}

enum Outcome {
    Completed,
    StepLimit,
    Issue(usize, IssueKind),
}

fn play(
    problem: &Problem,
    c: &Controller,
    rng: &mut ChaCha8Rng,
    max_steps: usize,
    trace: &mut Vec<(ActionId, Rational64)>,
) -> Result<Outcome> {
    let t = &problem.theory;
    let k = t.k.max(problem.ata.max_constant().ceil().to_integer() as u32);
    let mut clocks = vec![Rational64::from_integer(0); t.clocks.len()];
    let mut now = Rational64::from_integer(0);
    let mut node = 0;
    for step in 0..=max_steps {
        let n = &c.nodes[node];
        if n.is_final {
            let word = mtl::fluent_trace(t, trace)?;
            if mtl::check(&word, &problem.bad, 0)? {
                return Ok(Outcome::Issue(node, IssueKind::Violation));
            }
            if n.selected.is_empty() {
                return Ok(Outcome::Completed);
            }
        }
        if step == max_steps {
            return Ok(Outcome::StepLimit);
        }
        for (a, rest) in n.program.steps(&n.fluents, t) {
            if t.action(a)?.owner != Owner::Environment || admissible_delays(t.guard(a)?, &clocks, k).is_empty() {
                continue;
            }
            let chosen = n.selected.iter().any(|e| e.action == a && c.nodes[e.target].program == rest);
            if !chosen {
                return Ok(Outcome::Issue(node, IssueKind::EnvironmentBlocked(a)));
            }
        }
        let mut options = Vec::new();
        for e in &n.selected {
            let delays = admissible_delays(t.guard(e.action)?, &clocks, k);
            if !delays.is_empty() {
                options.push((e, delays));
            }
        }
        let Some((e, delays)) = options.choose(rng) else {
            return Ok(Outcome::Issue(node, IssueKind::Stuck));
        };
        let d = *delays.choose(rng).expect("nonempty");
        now += d;
        for x in &mut clocks {
            *x += d;
        }
        let post = t.progress(&n.fluents, e.action);
        for r in t.resets(&post, e.action) {
            clocks[r] = Rational64::from_integer(0);
        }
        trace.push((e.action, now));
        node = e.target;
    }
    unreachable!("loop returns at max_steps")
}

/// Runs `opts.plays` plays; play `i` uses stream `i` of a ChaCha8 generator
/// seeded with `opts.seed`.
pub fn simulate(problem: &Problem, c: &Controller, opts: SimOptions) -> Result<SimReport> {
    c.validate(problem)?;
    let mut report = SimReport { plays: opts.plays, ..SimReport::default() };
    for i in 0..opts.plays {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(i as u64);
        let mut trace = Vec::new();
        match play(problem, c, &mut rng, opts.max_steps, &mut trace)? {
            Outcome::Completed => report.completed += 1,
            Outcome::StepLimit => report.step_limited += 1,
            Outcome::Issue(node, kind) => {
                let list = match kind {
                    IssueKind::Violation => &mut report.violations,
                    IssueKind::EnvironmentBlocked(_) => &mut report.env_blocked,
                    IssueKind::Stuck => &mut report.stuck,
                };
                list.push(Issue { play: i, node, kind, trace });
            }
        }
    }
    Ok(report)
}
