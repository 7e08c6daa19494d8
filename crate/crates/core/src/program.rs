//! Golog program terms and their single-step transition semantics.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};
use crate::ground::{ActionId, GroundTheory, Prop};
use crate::world::FluentState;

/// Program term. Build through the smart constructors so that terms stay in
/// canonical form: `nil` (the test `?true`) is absorbed by `;` and `||`,
/// duplicate choice branches collapse, and `nil*` is `nil`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProgramExpr {
    Act(ActionId),
    Test(Prop),
    Seq(Box<ProgramExpr>, Box<ProgramExpr>),
    Choice(Box<ProgramExpr>, Box<ProgramExpr>),
    Conc(Box<ProgramExpr>, Box<ProgramExpr>),
    Star(Box<ProgramExpr>),
}

impl ProgramExpr {
    pub fn nil() -> Self {
        ProgramExpr::Test(Prop::True)
    }

    pub fn is_nil(&self) -> bool {
        matches!(self, ProgramExpr::Test(Prop::True))
    }

    pub fn seq(l: Self, r: Self) -> Self {
        if l.is_nil() {
            r
        } else if r.is_nil() {
            l
        } else {
            ProgramExpr::Seq(Box::new(l), Box::new(r))
        }
    }

    pub fn choice(l: Self, r: Self) -> Self {
        if l == r {
            l
        } else {
            ProgramExpr::Choice(Box::new(l), Box::new(r))
        }
    }

    pub fn conc(l: Self, r: Self) -> Self {
        if l.is_nil() {
            r
        } else if r.is_nil() {
            l
        } else {
            ProgramExpr::Conc(Box::new(l), Box::new(r))
        }
    }

    pub fn star(x: Self) -> Self {
        if x.is_nil() {
            x
        } else {
            ProgramExpr::Star(Box::new(x))
        }
    }

    /// Rebuilds the term through the smart constructors.
    pub fn canonicalize(&self) -> Self {
        match self {
            ProgramExpr::Act(_) | ProgramExpr::Test(_) => self.clone(),
            ProgramExpr::Seq(l, r) => Self::seq(l.canonicalize(), r.canonicalize()),
            ProgramExpr::Choice(l, r) => Self::choice(l.canonicalize(), r.canonicalize()),
            ProgramExpr::Conc(l, r) => Self::conc(l.canonicalize(), r.canonicalize()),
            ProgramExpr::Star(x) => Self::star(x.canonicalize()),
        }
    }

    pub fn is_final(&self, state: &FluentState) -> bool {
        match self {
            ProgramExpr::Act(_) => false,
            ProgramExpr::Test(p) => p.eval(state),
            ProgramExpr::Seq(l, r) | ProgramExpr::Conc(l, r) => l.is_final(state) && r.is_final(state),
            ProgramExpr::Choice(l, r) => l.is_final(state) || r.is_final(state),
            ProgramExpr::Star(_) => true,
        }
    }

    /// Enabled steps `(a, remainder)` in `state`, sorted and deduplicated.
    pub fn steps(&self, state: &FluentState, theory: &GroundTheory) -> BTreeSet<(ActionId, ProgramExpr)> {
        let mut out = BTreeSet::new();
        self.collect_steps(
            &mut |a| theory.poss(state, a).unwrap_or(false),
            &|p: &ProgramExpr| p.is_final(state),
            &mut out,
        );
        out
    }

    fn collect_steps(
        &self,
        enabled: &mut impl FnMut(ActionId) -> bool,
        is_final: &impl Fn(&ProgramExpr) -> bool,
        out: &mut BTreeSet<(ActionId, ProgramExpr)>,
    ) {
        match self {
            ProgramExpr::Act(a) => {
                if enabled(*a) {
                    out.insert((*a, Self::nil()));
                }
            }
            ProgramExpr::Test(_) => {}
            ProgramExpr::Seq(l, r) => {
                let mut left = BTreeSet::new();
                l.collect_steps(enabled, is_final, &mut left);
                out.extend(left.into_iter().map(|(a, rest)| (a, Self::seq(rest, (**r).clone()))));
                if is_final(l) {
                    r.collect_steps(enabled, is_final, out);
                }
            }
            ProgramExpr::Choice(l, r) => {
                l.collect_steps(enabled, is_final, out);
                r.collect_steps(enabled, is_final, out);
            }
            ProgramExpr::Conc(l, r) => {
                let mut left = BTreeSet::new();
                l.collect_steps(enabled, is_final, &mut left);
                out.extend(left.into_iter().map(|(a, rest)| (a, Self::conc(rest, (**r).clone()))));
                let mut right = BTreeSet::new();
                r.collect_steps(enabled, is_final, &mut right);
                out.extend(right.into_iter().map(|(a, rest)| (a, Self::conc((**l).clone(), rest))));
            }
            ProgramExpr::Star(x) => {
                let mut inner = BTreeSet::new();
                x.collect_steps(enabled, is_final, &mut inner);
                out.extend(inner.into_iter().map(|(a, rest)| (a, Self::seq(rest, self.clone()))));
            }
        }
    }

    /// Finality when tests are treated as unknown: only `?false` is never final.
    fn may_be_final(&self) -> bool {
        match self {
            ProgramExpr::Act(_) => false,
            ProgramExpr::Test(p) => *p != Prop::False,
            ProgramExpr::Seq(l, r) | ProgramExpr::Conc(l, r) => l.may_be_final() && r.may_be_final(),
            ProgramExpr::Choice(l, r) => l.may_be_final() || r.may_be_final(),
            ProgramExpr::Star(_) => true,
        }
    }

    /// Every remainder reachable from `self` when preconditions and tests are
    /// ignored. A superset of the remainders of any actual execution.
    pub fn sub_programs(&self, bound: usize) -> Result<BTreeSet<ProgramExpr>> {
        let mut seen = BTreeSet::from([self.clone()]);
        let mut queue = VecDeque::from([self.clone()]);
        while let Some(p) = queue.pop_front() {
            let mut out = BTreeSet::new();
            p.collect_steps(&mut |_| true, &|q: &ProgramExpr| q.may_be_final(), &mut out);
            for (_, rest) in out {
                if seen.insert(rest.clone()) {
                    if seen.len() > bound {
                        return Err(Error::Resource(format!("more than {bound} program remainders")));
                    }
                    queue.push_back(rest);
                }
            }
        }
        Ok(seen)
    }

    pub fn display<'a>(&'a self, theory: &'a GroundTheory) -> ProgramDisplay<'a> {
        ProgramDisplay { prog: self, theory, min: 0 }
    }

    fn prec(&self) -> u8 {
        match self {
            ProgramExpr::Choice(..) => 0,
            ProgramExpr::Conc(..) => 1,
            ProgramExpr::Seq(..) => 2,
            ProgramExpr::Star(..) => 3,
            _ => 4,
        }
    }
}

/// Prints in the surface syntax, so the text grounds back to the same term.
pub struct ProgramDisplay<'a> {
    prog: &'a ProgramExpr,
    theory: &'a GroundTheory,
    min: u8,
}

impl fmt::Display for ProgramDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |prog, min| ProgramDisplay { prog, theory: self.theory, min };
        let p = self.prog.prec();
        if p < self.min {
            write!(f, "(")?;
        }
        match self.prog {
            ProgramExpr::Act(a) => write!(f, "{}", self.theory.action_name(*a))?,
            ProgramExpr::Test(Prop::True) => write!(f, "nil")?,
            ProgramExpr::Test(prop) => {
                let body = prop.display(self.theory).to_string();
                if matches!(prop, Prop::And(_) | Prop::Or(_)) {
                    write!(f, "?({body})")?;
                } else {
                    write!(f, "?{body}")?;
                }
            }
            ProgramExpr::Seq(l, r) => write!(f, "{}; {}", sub(l, 3), sub(r, 2))?,
            ProgramExpr::Conc(l, r) => write!(f, "{} || {}", sub(l, 2), sub(r, 1))?,
            ProgramExpr::Choice(l, r) => write!(f, "{} | {}", sub(l, 1), sub(r, 0))?,
            ProgramExpr::Star(x) => write!(f, "{}*", sub(x, 3))?,
        }
        if p < self.min {
            write!(f, ")")?;
        }
        Ok(())
    }
}
