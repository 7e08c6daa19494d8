//! Fluent states and single-world progression.

use std::fmt;

use crate::error::Result;
use num_rational::Rational64;

use crate::ground::{ActionId, GroundTheory, Guard};

/// Truth assignment over ground atoms, closed world.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FluentState {
    bits: Vec<u64>,
    len: usize,
}

impl FluentState {
    pub fn new(len: usize) -> Self {
        FluentState { bits: vec![0; len.div_ceil(64)], len }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.bits[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, v: bool) {
        let mask = 1u64 << (i % 64);
        if v {
            self.bits[i / 64] |= mask;
        } else {
            self.bits[i / 64] &= !mask;
        }
    }

    pub fn true_atoms(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(|&i| self.get(i))
    }
}

impl fmt::Debug for FluentState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.true_atoms()).finish()
    }
}

impl GroundTheory {
    pub fn poss(&self, state: &FluentState, a: ActionId) -> Result<bool> {
        Ok(self.action(a)?.pre.eval(state))
    }

    /// The successor state: every atom takes the value of its successor
    /// condition evaluated in `state`.
    pub fn progress(&self, state: &FluentState, a: ActionId) -> FluentState {
        let mut next = FluentState::new(state.len());
        for (i, cond) in self.ssa[a.index()].iter().enumerate() {
            next.set(i, cond.eval(state));
        }
        next
    }

    /// Clocks reset by `a`, with reset formulas evaluated in the post-state.
    pub fn resets(&self, post: &FluentState, a: ActionId) -> Vec<usize> {
        self.resets[a.index()].iter().enumerate().filter(|(_, r)| r.eval(post)).map(|(c, _)| c).collect()
    }

    pub fn guard(&self, a: ActionId) -> Result<&Guard> {
        Ok(&self.action(a)?.guard)
    }
}

/// Truth of a guard under concrete (scaled) clock values.
pub fn guard_sat(guard: &Guard, clocks: &[Rational64]) -> bool {
    guard.iter().all(|g| g.cmp.holds(clocks[g.clock], Rational64::from_integer(i64::from(g.value))))
}
