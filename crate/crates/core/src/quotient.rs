//! Finite quotient of the product of program, world and specification.
//!
//! A node holds the fluent state, the remaining program and the set of
//! canonical words that the timing could have produced so far. Actions are
//! chosen without seeing clock values, so all timings sharing an action
//! history are kept together in one node.

use std::collections::BTreeSet;

use crate::ata::Ata;
use crate::dsl::Owner;
use crate::error::Result;
use crate::ground::{ActionId, GroundTheory};
use crate::program::ProgramExpr;
use crate::region::{canonical_word, guard_holds, time_successors, word_accepting, word_edge_step, CanonicalWord};
use crate::world::FluentState;
use num_rational::Rational64;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QNode {
    pub fluents: FluentState,
    pub program: ProgramExpr,
    pub words: BTreeSet<CanonicalWord>,
}

#[derive(Debug, Clone)]
pub struct Successor {
    pub action: ActionId,
    pub owner: Owner,
    pub resets: Vec<usize>,
    pub node: QNode,
}

/// Order on word sets used for pruning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SetOrder {
    /// Every word of the larger set dominates some word of the smaller.
    #[default]
    Smyth,
    /// Every word of the smaller set is dominated by some word of the larger.
    Hoare,
}

/// `a ⪯ b`: a monotone injection maps every class of `a` into a superset
/// class of `b`. Dead and live words are incomparable.
pub fn word_leq(a: &CanonicalWord, b: &CanonicalWord) -> bool {
    if a.dead != b.dead || a.classes.len() > b.classes.len() {
        return false;
    }
    let mut j = 0;
    for class in &a.classes {
        while j < b.classes.len() && !class.is_subset(&b.classes[j]) {
            j += 1;
        }
        if j == b.classes.len() {
            return false;
        }
        j += 1;
    }
    true
}

pub fn set_leq(order: SetOrder, a: &BTreeSet<CanonicalWord>, b: &BTreeSet<CanonicalWord>) -> bool {
    match order {
        SetOrder::Smyth => b.iter().all(|y| a.iter().any(|x| word_leq(x, y))),
        SetOrder::Hoare => a.iter().all(|x| b.iter().any(|y| word_leq(x, y))),
    }
}

/// `a ≤_d b`.
pub fn node_leq(order: SetOrder, a: &QNode, b: &QNode) -> bool {
    a.fluents == b.fluents && a.program == b.program && set_leq(order, &a.words, &b.words)
}

pub struct Quotient<'a> {
    pub theory: &'a GroundTheory,
    pub ata: &'a Ata<usize>,
    pub k: u32,
}

impl<'a> Quotient<'a> {
    pub fn new(theory: &'a GroundTheory, ata: &'a Ata<usize>) -> Self {
        let k = theory.k.max(ata.max_constant().ceil().to_integer() as u32);
        Quotient { theory, ata, k }
    }

    pub fn initial(&self, program: &ProgramExpr) -> QNode {
        let fluents = self.theory.initial.clone();
        let zeros = vec![Rational64::from_integer(0); self.theory.clocks.len()];
        let configs = self.ata.initial_configs(&fluents);
        let words = if configs.is_empty() {
            BTreeSet::from([canonical_word(&zeros, &Default::default(), self.k, true)])
        } else {
            configs.iter().map(|g| canonical_word(&zeros, g, self.k, false)).collect()
        };
        QNode { fluents, program: program.clone(), words }
    }

    pub fn is_final(&self, n: &QNode) -> bool {
        n.program.is_final(&n.fluents)
    }

    /// Final, and some timing makes the specification automaton accept.
    pub fn is_bad(&self, n: &QNode) -> bool {
        self.is_final(n) && n.words.iter().any(|w| word_accepting(w, self.ata))
    }

    /// Successors in canonical order: action name, then remainder text.
    /// Program steps whose guard no timing satisfies are dropped.
    pub fn successors(&self, n: &QNode) -> Result<Vec<Successor>> {
        let mut timed: BTreeSet<CanonicalWord> = BTreeSet::new();
        for w in &n.words {
            timed.extend(time_successors(w, self.k));
        }
        let mut out = Vec::new();
        for (a, rest) in n.program.steps(&n.fluents, self.theory) {
            let action = self.theory.action(a)?;
            let post = self.theory.progress(&n.fluents, a);
            let resets = self.theory.resets(&post, a);
            let mut words = BTreeSet::new();
            for h in &timed {
                if guard_holds(h, &action.guard, self.k)? {
                    words.extend(word_edge_step(h, self.ata, &post, &resets, self.k));
                }
            }
            if words.is_empty() {
                continue;
            }
            out.push(Successor {
                action: a,
                owner: action.owner,
                resets,
                node: QNode { fluents: post, program: rest, words },
            });
        }
        out.sort_by_cached_key(|s| {
            (self.theory.action_name(s.action).to_string(), s.node.program.display(self.theory).to_string())
        });
        Ok(out)
    }
}
