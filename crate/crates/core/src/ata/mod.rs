//! One-clock alternating timed automata for MTL.
//!
//! Each until subformula becomes a non-accepting location and each release
//! subformula (negated until) an accepting one. Transition formulas are
//! positive boolean combinations of locations, clock constraints and resets
//! `x.l`. Runs start from the minimal models of the formula itself at the
//! first letter, so a temporal top-level formula starts as `{(l0, 0)}`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::Rational64;
use num_traits::Zero;

use crate::dsl::Cmp;
use crate::mtl::{Interval, Mtl};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocId(pub u32);

impl LocId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Positive normal form; temporal subformulas are replaced by locations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pnf<A> {
    True,
    False,
    Lit(A, bool),
    And(Box<Pnf<A>>, Box<Pnf<A>>),
    Or(Box<Pnf<A>>, Box<Pnf<A>>),
    Loc(LocId),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LocKind<A> {
    /// Non-temporal top-level formula.
    Init(Pnf<A>),
    Until(Interval, Pnf<A>, Pnf<A>),
    Release(Interval, Pnf<A>, Pnf<A>),
}

#[derive(Debug, Clone)]
pub struct Location<A> {
    pub name: String,
    pub kind: LocKind<A>,
    pub accepting: bool,
}

/// Transition formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Trans {
    True,
    False,
    /// Location, clock kept.
    Loc(LocId),
    /// `x.l`: location with the clock reset.
    Spawn(LocId),
    Clock(Cmp, Rational64),
    And(Vec<Trans>),
    Or(Vec<Trans>),
}

impl Trans {
    pub fn and(parts: impl IntoIterator<Item = Trans>) -> Trans {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Trans::True => {}
                Trans::False => return Trans::False,
                Trans::And(xs) => out.extend(xs),
                x => out.push(x),
            }
        }
        match out.len() {
            0 => Trans::True,
            1 => out.pop().unwrap(),
            _ => Trans::And(out),
        }
    }

    pub fn or(parts: impl IntoIterator<Item = Trans>) -> Trans {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Trans::False => {}
                Trans::True => return Trans::True,
                Trans::Or(xs) => out.extend(xs),
                x => out.push(x),
            }
        }
        match out.len() {
            0 => Trans::False,
            1 => out.pop().unwrap(),
            _ => Trans::Or(out),
        }
    }

    pub fn display<'a, A>(&'a self, ata: &'a Ata<A>) -> TransDisplay<'a, A> {
        TransDisplay { t: self, ata, min: 0 }
    }
}

/// Clock value or abstraction thereof that decides clock constraints.
pub trait ClockVal {
    fn sat(&self, cmp: Cmp, c: Rational64) -> bool;
}

impl ClockVal for Rational64 {
    fn sat(&self, cmp: Cmp, c: Rational64) -> bool {
        cmp.holds(*self, c)
    }
}

/// A model is a set of `(location, reset)` pairs.
pub type Model = BTreeSet<(LocId, bool)>;

/// Keeps only the ⊆-minimal sets, deduplicated, in sorted order.
pub fn minimize<T: Ord + Clone>(sets: Vec<BTreeSet<T>>) -> Vec<BTreeSet<T>> {
    let mut sets: Vec<BTreeSet<T>> = sets.into_iter().collect::<BTreeSet<_>>().into_iter().collect();
    sets.sort_by_key(|s| s.len());
    let mut out: Vec<BTreeSet<T>> = Vec::new();
    for s in sets {
        if !out.iter().any(|m| m.is_subset(&s)) {
            out.push(s);
        }
    }
    out.sort();
    out
}

/// Minimal models of `t` for clock value `v`, as location/reset pairs.
pub fn models(t: &Trans, v: &impl ClockVal) -> Vec<Model> {
    fn dnf(t: &Trans, v: &impl ClockVal) -> Vec<Model> {
        match t {
            Trans::True => vec![Model::new()],
            Trans::False => vec![],
            Trans::Loc(l) => vec![Model::from([(*l, false)])],
            Trans::Spawn(l) => vec![Model::from([(*l, true)])],
            Trans::Clock(cmp, c) => {
                if v.sat(*cmp, *c) {
                    vec![Model::new()]
                } else {
                    vec![]
                }
            }
            Trans::Or(xs) => minimize(xs.iter().flat_map(|x| dnf(x, v)).collect()),
            Trans::And(xs) => {
                let mut acc = vec![Model::new()];
                for x in xs {
                    let parts = dnf(x, v);
                    acc = minimize(
                        acc.iter().flat_map(|a| parts.iter().map(move |p| a.union(p).copied().collect())).collect(),
                    );
                    if acc.is_empty() {
                        break;
                    }
                }
                acc
            }
        }
    }
    dnf(t, v)
}

/// Concrete state of a run.
pub type State = (LocId, Rational64);
pub type Config = BTreeSet<State>;

/// Letter valuation for transition evaluation.
pub trait Valuation<A> {
    fn holds(&self, a: &A) -> bool;
}

impl<A: Ord> Valuation<A> for BTreeSet<A> {
    fn holds(&self, a: &A) -> bool {
        self.contains(a)
    }
}

impl Valuation<usize> for crate::world::FluentState {
    fn holds(&self, a: &usize) -> bool {
        self.get(*a)
    }
}

#[derive(Debug, Clone)]
pub struct Ata<A> {
    pub locations: Vec<Location<A>>,
    pub initial: LocId,
    top: Pnf<A>,
}

struct Builder<A> {
    index: BTreeMap<LocKind<A>, LocId>,
    kinds: Vec<LocKind<A>>,
}

impl<A: Clone + Ord> Builder<A> {
    fn location(&mut self, kind: LocKind<A>) -> Pnf<A> {
        if let Some(l) = self.index.get(&kind) {
            return Pnf::Loc(*l);
        }
        let l = LocId(self.kinds.len() as u32);
        self.index.insert(kind.clone(), l);
        self.kinds.push(kind);
        Pnf::Loc(l)
    }

    fn pnf(&mut self, f: &Mtl<A>, positive: bool) -> Pnf<A> {
        match (f, positive) {
            (Mtl::True, true) | (Mtl::False, false) => Pnf::True,
            (Mtl::True, false) | (Mtl::False, true) => Pnf::False,
            (Mtl::Atom(a), pol) => Pnf::Lit(a.clone(), pol),
            (Mtl::Not(x), pol) => self.pnf(x, !pol),
            (Mtl::And(l, r), true) | (Mtl::Or(l, r), false) => {
                Pnf::And(Box::new(self.pnf(l, positive)), Box::new(self.pnf(r, positive)))
            }
            (Mtl::Or(l, r), true) | (Mtl::And(l, r), false) => {
                Pnf::Or(Box::new(self.pnf(l, positive)), Box::new(self.pnf(r, positive)))
            }
            (Mtl::Until(i, l, r), true) => {
                let (l, r) = (self.pnf(l, true), self.pnf(r, true));
                self.location(LocKind::Until(i.clone(), l, r))
            }
            (Mtl::Until(i, l, r), false) => {
                let (l, r) = (self.pnf(l, false), self.pnf(r, false));
                self.location(LocKind::Release(i.clone(), l, r))
            }
        }
    }
}

fn renumber<A: Clone>(p: &Pnf<A>, map: &[LocId]) -> Pnf<A> {
    match p {
        Pnf::Loc(l) => Pnf::Loc(map[l.index()]),
        Pnf::And(a, b) => Pnf::And(Box::new(renumber(a, map)), Box::new(renumber(b, map))),
        Pnf::Or(a, b) => Pnf::Or(Box::new(renumber(a, map)), Box::new(renumber(b, map))),
        other => other.clone(),
    }
}

fn pnf_locs<A>(p: &Pnf<A>, out: &mut Vec<LocId>) {
    match p {
        Pnf::Loc(l) => out.push(*l),
        Pnf::And(a, b) | Pnf::Or(a, b) => {
            pnf_locs(a, out);
            pnf_locs(b, out);
        }
        _ => {}
    }
}

fn in_interval(i: &Interval) -> Trans {
    let lo = if i.lo.is_zero() && i.lo_closed {
        Trans::True
    } else {
        Trans::Clock(if i.lo_closed { Cmp::Ge } else { Cmp::Gt }, i.lo)
    };
    let hi = match i.hi {
        None => Trans::True,
        Some(h) => Trans::Clock(if i.hi_closed { Cmp::Le } else { Cmp::Lt }, h),
    };
    Trans::and([lo, hi])
}

fn outside_interval(i: &Interval) -> Trans {
    let lo = if i.lo.is_zero() && i.lo_closed {
        Trans::False
    } else {
        Trans::Clock(if i.lo_closed { Cmp::Lt } else { Cmp::Le }, i.lo)
    };
    let hi = match i.hi {
        None => Trans::False,
        Some(h) => Trans::Clock(if i.hi_closed { Cmp::Gt } else { Cmp::Ge }, h),
    };
    Trans::or([lo, hi])
}

impl<A: Clone + Ord> Ata<A> {
    pub fn build(phi: &Mtl<A>) -> Self {
        let mut b = Builder { index: BTreeMap::new(), kinds: Vec::new() };
        let mut top = b.pnf(phi, true);
        if !matches!(top, Pnf::Loc(_)) {
            // keep the non-temporal top-level formula addressable as l0
            let Pnf::Loc(l) = b.location(LocKind::Init(top.clone())) else { unreachable!() };
            top = Pnf::Loc(l);
        }
        // number locations breadth-first from the top so that l0 = phi0
        let Pnf::Loc(root) = top else { unreachable!() };
        let mut order = vec![root];
        let mut k = 0;
        while k < order.len() {
            let mut next = Vec::new();
            match &b.kinds[order[k].index()] {
                LocKind::Init(p) => pnf_locs(p, &mut next),
                LocKind::Until(_, l, r) | LocKind::Release(_, l, r) => {
                    pnf_locs(l, &mut next);
                    pnf_locs(r, &mut next);
                }
            }
            for l in next {
                if !order.contains(&l) {
                    order.push(l);
                }
            }
            k += 1;
        }
        let mut map = vec![LocId(u32::MAX); b.kinds.len()];
        for (new, old) in order.iter().enumerate() {
            map[old.index()] = LocId(new as u32);
        }
        let locations = order
            .iter()
            .enumerate()
            .map(|(n, old)| {
                let kind = match &b.kinds[old.index()] {
                    LocKind::Init(p) => LocKind::Init(renumber(p, &map)),
                    LocKind::Until(i, l, r) => LocKind::Until(i.clone(), renumber(l, &map), renumber(r, &map)),
                    LocKind::Release(i, l, r) => LocKind::Release(i.clone(), renumber(l, &map), renumber(r, &map)),
                };
                let accepting = matches!(kind, LocKind::Release(..));
                Location { name: format!("phi{n}"), kind, accepting }
            })
            .collect();
        let top = match &b.kinds[root.index()] {
            LocKind::Init(p) => renumber(p, &map),
            _ => Pnf::Loc(LocId(0)),
        };
        Ata { locations, initial: LocId(0), top }
    }
}

impl<A> Ata<A> {
    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    pub fn is_accepting(&self, l: LocId) -> bool {
        self.locations[l.index()].accepting
    }

    pub fn accepting(&self) -> BTreeSet<LocId> {
        (0..self.len() as u32).map(LocId).filter(|&l| self.is_accepting(l)).collect()
    }

    /// Largest clock constant.
    pub fn max_constant(&self) -> Rational64 {
        self.locations
            .iter()
            .filter_map(|l| match &l.kind {
                LocKind::Until(i, ..) | LocKind::Release(i, ..) => Some(i.hi.unwrap_or(i.lo).max(i.lo)),
                LocKind::Init(_) => None,
            })
            .max()
            .unwrap_or_else(Rational64::zero)
    }

    fn now(&self, p: &Pnf<A>, sigma: &impl Valuation<A>) -> Trans {
        match p {
            Pnf::True => Trans::True,
            Pnf::False => Trans::False,
            Pnf::Lit(a, pol) => {
                if sigma.holds(a) == *pol {
                    Trans::True
                } else {
                    Trans::False
                }
            }
            Pnf::And(a, b) => Trans::and([self.now(a, sigma), self.now(b, sigma)]),
            Pnf::Or(a, b) => Trans::or([self.now(a, sigma), self.now(b, sigma)]),
            Pnf::Loc(l) => Trans::Spawn(*l),
        }
    }

    /// `δ(l, σ)`.
    pub fn delta(&self, l: LocId, sigma: &impl Valuation<A>) -> Trans {
        match &self.locations[l.index()].kind {
            LocKind::Init(p) => self.now(p, sigma),
            LocKind::Until(i, left, right) => Trans::or([
                Trans::and([self.now(right, sigma), in_interval(i)]),
                Trans::and([self.now(left, sigma), Trans::Loc(l)]),
            ]),
            LocKind::Release(i, left, right) => Trans::and([
                Trans::or([self.now(right, sigma), outside_interval(i)]),
                Trans::or([self.now(left, sigma), Trans::Loc(l)]),
            ]),
        }
    }

    /// Transition taken on the first letter of a word.
    pub fn initial_trans(&self, sigma: &impl Valuation<A>) -> Trans {
        self.now(&self.top, sigma)
    }

    /// Configurations after reading the first letter at time 0.
    pub fn initial_configs(&self, sigma: &impl Valuation<A>) -> BTreeSet<Config> {
        models(&self.initial_trans(sigma), &Rational64::zero())
            .into_iter()
            .map(|m| m.into_iter().map(|(l, _)| (l, Rational64::zero())).collect())
            .collect()
    }

    /// Minimal models of `δ(l, σ)` at clock value `v`, as concrete states.
    pub fn minimal_models(&self, l: LocId, sigma: &impl Valuation<A>, v: Rational64) -> Vec<Config> {
        let concrete = models(&self.delta(l, sigma), &v)
            .into_iter()
            .map(|m| m.into_iter().map(|(l2, reset)| (l2, if reset { Rational64::zero() } else { v })).collect())
            .collect();
        minimize(concrete)
    }

    pub fn flow_step(config: &Config, t: Rational64) -> Config {
        config.iter().map(|&(l, v)| (l, v + t)).collect()
    }

    /// All successor configurations on `sigma`: one minimal model per state.
    pub fn edge_step(&self, config: &Config, sigma: &impl Valuation<A>) -> BTreeSet<Config> {
        let mut acc: BTreeSet<Config> = BTreeSet::from([Config::new()]);
        for &(l, v) in config {
            let ms = self.minimal_models(l, sigma, v);
            acc = acc.iter().flat_map(|c| ms.iter().map(move |m| c.union(m).copied().collect())).collect();
            if acc.is_empty() {
                break;
            }
        }
        acc
    }

    pub fn config_accepting(&self, config: &Config) -> bool {
        config.iter().all(|&(l, _)| self.is_accepting(l))
    }

    /// Acceptance of a non-empty timed word. Only ⊆-minimal configurations
    /// are tracked, which is sound because acceptance is monotone.
    pub fn accepts<V: Valuation<A>>(&self, word: &[(V, Rational64)]) -> bool {
        let Some((first, t0)) = word.first() else { return false };
        let mut configs: Vec<Config> = self.initial_configs(first).into_iter().collect();
        let mut last = *t0;
        for (sigma, t) in &word[1..] {
            let next =
                configs.iter().flat_map(|c| self.edge_step(&Self::flow_step(c, *t - last), sigma)).collect::<Vec<_>>();
            configs = minimize(next);
            last = *t;
            if configs.is_empty() {
                return false;
            }
        }
        configs.iter().any(|c| self.config_accepting(c))
    }
}

pub struct TransDisplay<'a, A> {
    t: &'a Trans,
    ata: &'a Ata<A>,
    min: u8,
}

impl<A> fmt::Display for TransDisplay<'_, A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (prec, sep) = match self.t {
            Trans::Or(_) => (0, " | "),
            Trans::And(_) => (1, " & "),
            _ => (2, ""),
        };
        if prec < self.min {
            write!(f, "(")?;
        }
        match self.t {
            Trans::True => write!(f, "true")?,
            Trans::False => write!(f, "false")?,
            Trans::Loc(l) => write!(f, "{}", self.ata.locations[l.index()].name)?,
            Trans::Spawn(l) => write!(f, "x.{}", self.ata.locations[l.index()].name)?,
            Trans::Clock(cmp, c) => write!(f, "x {} {c}", cmp.symbol())?,
            Trans::And(xs) | Trans::Or(xs) => {
                for (k, x) in xs.iter().enumerate() {
                    if k > 0 {
                        write!(f, "{sep}")?;
                    }
                    write!(f, "{}", TransDisplay { t: x, ata: self.ata, min: prec + 1 })?;
                }
            }
        }
        if prec < self.min {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl<A: fmt::Display> Ata<A> {
    /// Text listing of locations, accepting set and initial location.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for l in &self.locations {
            let (kind, formula) = match &l.kind {
                LocKind::Init(p) => ("init", pnf_text(p, self)),
                LocKind::Until(i, a, b) => ("until", format!("({}) U{i} ({})", pnf_text(a, self), pnf_text(b, self))),
                LocKind::Release(i, a, b) => {
                    ("release", format!("({}) R{i} ({})", pnf_text(a, self), pnf_text(b, self)))
                }
            };
            s.push_str(&format!("location {} [{kind}] := {formula}\n", l.name));
        }
        let acc: Vec<&str> = self.accepting().iter().map(|l| self.locations[l.index()].name.as_str()).collect();
        s.push_str(&format!("accepting {{{}}}\n", acc.join(", ")));
        s.push_str(&format!("initial {}\n", self.locations[self.initial.index()].name));
        s
    }
}

fn pnf_text<A: fmt::Display>(p: &Pnf<A>, ata: &Ata<A>) -> String {
    match p {
        Pnf::True => "true".into(),
        Pnf::False => "false".into(),
        Pnf::Lit(a, true) => a.to_string(),
        Pnf::Lit(a, false) => format!("!{a}"),
        Pnf::And(a, b) => format!("({} & {})", pnf_text(a, ata), pnf_text(b, ata)),
        Pnf::Or(a, b) => format!("({} | {})", pnf_text(a, ata), pnf_text(b, ata)),
        Pnf::Loc(l) => ata.locations[l.index()].name.clone(),
    }
}
