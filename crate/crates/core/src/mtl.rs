//! Metric temporal logic over finite timed words, pointwise semantics.
//!
//! Until is strict in both arguments: `φ1 U_I φ2` holds at position `i` iff
//! some `j > i` satisfies `φ2` with `τ_j − τ_i ∈ I`, and `φ1` holds at every
//! position strictly between `i` and `j`.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Rational64;
use num_traits::Zero;

use crate::error::{invalid, Result};
use crate::ground::{ActionId, GroundTheory};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Interval {
    pub lo: Rational64,
    pub lo_closed: bool,
    /// `None` is `+∞`, always open.
    pub hi: Option<Rational64>,
    pub hi_closed: bool,
}

impl Interval {
    pub fn full() -> Self {
        Interval { lo: Rational64::zero(), lo_closed: true, hi: None, hi_closed: false }
    }

    pub fn closed(lo: i64, hi: i64) -> Self {
        Interval {
            lo: Rational64::from_integer(lo),
            lo_closed: true,
            hi: Some(Rational64::from_integer(hi)),
            hi_closed: true,
        }
    }

    pub fn contains(&self, d: Rational64) -> bool {
        let lo_ok = if self.lo_closed { d >= self.lo } else { d > self.lo };
        let hi_ok = match self.hi {
            None => true,
            Some(h) if self.hi_closed => d <= h,
            Some(h) => d < h,
        };
        lo_ok && hi_ok
    }

    pub fn is_full(&self) -> bool {
        self.lo.is_zero() && self.lo_closed && self.hi.is_none()
    }

    pub fn endpoints(&self) -> impl Iterator<Item = Rational64> {
        std::iter::once(self.lo).chain(self.hi)
    }

    pub fn scaled(&self, k: i64) -> Self {
        Interval { lo: self.lo * k, lo_closed: self.lo_closed, hi: self.hi.map(|h| h * k), hi_closed: self.hi_closed }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let open = if self.lo_closed { '[' } else { '(' };
        match self.hi {
            None => write!(f, "{open}{},inf)", self.lo),
            Some(h) => write!(f, "{open}{},{}{}", self.lo, h, if self.hi_closed { ']' } else { ')' }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mtl<A> {
    True,
    False,
    Atom(A),
    Not(Box<Mtl<A>>),
    And(Box<Mtl<A>>, Box<Mtl<A>>),
    Or(Box<Mtl<A>>, Box<Mtl<A>>),
    Until(Interval, Box<Mtl<A>>, Box<Mtl<A>>),
}

impl<A> Mtl<A> {
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Mtl<A>) -> Self {
        Mtl::Not(Box::new(f))
    }

    pub fn and(l: Mtl<A>, r: Mtl<A>) -> Self {
        Mtl::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Mtl<A>, r: Mtl<A>) -> Self {
        Mtl::Or(Box::new(l), Box::new(r))
    }

    pub fn until(i: Interval, l: Mtl<A>, r: Mtl<A>) -> Self {
        Mtl::Until(i, Box::new(l), Box::new(r))
    }

    /// `F_I φ = ⊤ U_I φ`
    pub fn eventually(i: Interval, f: Mtl<A>) -> Self {
        Mtl::until(i, Mtl::True, f)
    }

    /// `G_I φ = ¬F_I ¬φ`
    pub fn always(i: Interval, f: Mtl<A>) -> Self {
        Mtl::not(Mtl::eventually(i, Mtl::not(f)))
    }

    pub fn map_atoms<B, E>(&self, f: &mut impl FnMut(&A) -> Result<B, E>) -> Result<Mtl<B>, E> {
        Ok(match self {
            Mtl::True => Mtl::True,
            Mtl::False => Mtl::False,
            Mtl::Atom(a) => Mtl::Atom(f(a)?),
            Mtl::Not(x) => Mtl::not(x.map_atoms(f)?),
            Mtl::And(l, r) => Mtl::and(l.map_atoms(f)?, r.map_atoms(f)?),
            Mtl::Or(l, r) => Mtl::or(l.map_atoms(f)?, r.map_atoms(f)?),
            Mtl::Until(i, l, r) => Mtl::until(i.clone(), l.map_atoms(f)?, r.map_atoms(f)?),
        })
    }

    pub fn atoms(&self) -> Vec<&A> {
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if let Mtl::Atom(a) = f {
                out.push(a);
            }
        });
        out
    }

    pub fn intervals(&self) -> Vec<&Interval> {
        let mut out = Vec::new();
        self.visit(&mut |f| {
            if let Mtl::Until(i, _, _) = f {
                out.push(i);
            }
        });
        out
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Mtl<A>)) {
        f(self);
        match self {
            Mtl::Not(x) => x.visit(f),
            Mtl::And(l, r) | Mtl::Or(l, r) | Mtl::Until(_, l, r) => {
                l.visit(f);
                r.visit(f);
            }
            _ => {}
        }
    }

    pub fn scale_intervals(&mut self, k: i64) {
        match self {
            Mtl::Not(x) => x.scale_intervals(k),
            Mtl::And(l, r) | Mtl::Or(l, r) => {
                l.scale_intervals(k);
                r.scale_intervals(k);
            }
            Mtl::Until(i, l, r) => {
                *i = i.scaled(k);
                l.scale_intervals(k);
                r.scale_intervals(k);
            }
            _ => {}
        }
    }
}

pub type TimedWord<A> = Vec<(BTreeSet<A>, Rational64)>;

/// Truth of `phi` at position `pos` of `word`.
pub fn check<A: Ord>(word: &[(BTreeSet<A>, Rational64)], phi: &Mtl<A>, pos: usize) -> Result<bool> {
    if pos >= word.len() {
        return Err(invalid(format!("position {pos} outside word of length {}", word.len())));
    }
    if word.windows(2).any(|w| w[1].1 < w[0].1) {
        return Err(invalid("timestamps are decreasing"));
    }
    Ok(sat(word, phi)[pos])
}

/// Truth vector of `phi` over all positions.
fn sat<A: Ord>(word: &[(BTreeSet<A>, Rational64)], phi: &Mtl<A>) -> Vec<bool> {
    let n = word.len();
    match phi {
        Mtl::True => vec![true; n],
        Mtl::False => vec![false; n],
        Mtl::Atom(a) => word.iter().map(|(s, _)| s.contains(a)).collect(),
        Mtl::Not(x) => sat(word, x).into_iter().map(|b| !b).collect(),
        Mtl::And(l, r) => sat(word, l).into_iter().zip(sat(word, r)).map(|(a, b)| a && b).collect(),
        Mtl::Or(l, r) => sat(word, l).into_iter().zip(sat(word, r)).map(|(a, b)| a || b).collect(),
        Mtl::Until(iv, l, r) => {
            let (sl, sr) = (sat(word, l), sat(word, r));
            (0..n)
                .map(|i| {
                    for j in i + 1..n {
                        if sr[j] && iv.contains(word[j].1 - word[i].1) {
                            return true;
                        }
                        if !sl[j] {
                            return false;
                        }
                    }
                    false
                })
                .collect()
        }
    }
}

/// Timed fluent trace of a timed action sequence from the initial state.
/// Position 0 carries the initial state at time 0.
pub fn fluent_trace(theory: &GroundTheory, trace: &[(ActionId, Rational64)]) -> Result<TimedWord<usize>> {
    let mut state = theory.initial.clone();
    let mut word = vec![(state.true_atoms().collect(), Rational64::zero())];
    let mut last = Rational64::zero();
    for &(a, t) in trace {
        if t < last {
            return Err(invalid(format!("timestamp {t} precedes {last}")));
        }
        theory.action(a)?;
        state = theory.progress(&state, a);
        word.push((state.true_atoms().collect(), t));
        last = t;
    }
    Ok(word)
}

impl<A: fmt::Display> Mtl<A> {
    fn prec(&self) -> u8 {
        match self {
            Mtl::Until(_, l, _) if matches!(**l, Mtl::True) => 3,
            Mtl::Until(..) => 0,
            Mtl::Or(..) => 1,
            Mtl::And(..) => 2,
            _ => 3,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let p = self.prec();
        if p < min {
            write!(f, "(")?;
        }
        match self {
            Mtl::True => write!(f, "true")?,
            Mtl::False => write!(f, "false")?,
            Mtl::Atom(a) => write!(f, "{a}")?,
            Mtl::Not(x) => match &**x {
                Mtl::Until(i, l, r) if matches!(**l, Mtl::True) && matches!(**r, Mtl::Not(_)) => {
                    let Mtl::Not(inner) = &**r else { unreachable!() };
                    write!(f, "G{i} ")?;
                    inner.fmt_at(f, 3)?;
                }
                _ => {
                    write!(f, "!")?;
                    x.fmt_at(f, 3)?;
                }
            },
            Mtl::And(l, r) => {
                l.fmt_at(f, 2)?;
                write!(f, " & ")?;
                r.fmt_at(f, 3)?;
            }
            Mtl::Or(l, r) => {
                l.fmt_at(f, 1)?;
                write!(f, " | ")?;
                r.fmt_at(f, 2)?;
            }
            Mtl::Until(i, l, r) if matches!(**l, Mtl::True) => {
                write!(f, "F{i} ")?;
                r.fmt_at(f, 3)?;
            }
            Mtl::Until(i, l, r) => {
                l.fmt_at(f, 1)?;
                write!(f, " U{i} ")?;
                r.fmt_at(f, 0)?;
            }
        }
        if p < min {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl<A: fmt::Display> fmt::Display for Mtl<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}
