//! Region abstraction of clock valuations and ATA configurations.
//!
//! With maximal constant `K`, region `2i` is the point `{i}`, region `2i+1`
//! the open interval `(i, i+1)`, and region `2K+1` is `(K, ∞)`. A canonical
//! word lists the entries (clocks and ATA states) grouped by fractional part:
//! an optional class of integral values first, then one class per distinct
//! fractional part in ascending order, then one class with every value above
//! `K`.

use std::collections::BTreeSet;
use std::fmt;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};

use crate::ata::{models, Ata, ClockVal, Config, LocId, Valuation};
use crate::dsl::Cmp;
use crate::error::{Error, Result};
use crate::ground::Guard;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Owner {
    Clock(u32),
    Loc(LocId),
}

pub type Letter = (Owner, u32);

pub fn reg(v: Rational64, k: u32) -> u32 {
    if v > Rational64::from_integer(k as i64) {
        2 * k + 1
    } else if v.is_integer() {
        2 * v.to_integer() as u32
    } else {
        2 * v.floor().to_integer() as u32 + 1
    }
}

/// A region index read as a clock value for constraint evaluation.
#[derive(Debug, Clone, Copy)]
pub struct RegionAt {
    pub index: u32,
    pub k: u32,
}

impl ClockVal for RegionAt {
    /// Region order agrees with value order, and `2c` is the point `{c}`.
    fn sat(&self, cmp: Cmp, c: Rational64) -> bool {
        debug_assert!(c.is_integer() && c.to_integer() <= self.k as i64, "constant {c} not an integer ≤ K");
        cmp.holds(self.index as i64, 2 * c.to_integer())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalWord {
    pub classes: Vec<BTreeSet<Letter>>,
    /// The ATA part has no run left; only clocks are tracked.
    pub dead: bool,
}

/// Where an entry sits within a word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Slot {
    Point,
    Frac(usize),
    Unbounded,
}

/// A word split into its point, fractional and unbounded parts.
#[derive(Debug, Clone, Default)]
struct Layers {
    point: BTreeSet<Letter>,
    fracs: Vec<BTreeSet<Letter>>,
    unbounded: BTreeSet<Letter>,
}

impl Layers {
    fn of(word: &CanonicalWord, k: u32) -> Self {
        let mut l = Layers::default();
        for class in &word.classes {
            let r = class.iter().next().expect("classes are non-empty").1;
            if r == 2 * k + 1 {
                l.unbounded = class.clone();
            } else if r % 2 == 0 {
                l.point = class.clone();
            } else {
                l.fracs.push(class.clone());
            }
        }
        l
    }

    fn word(self, dead: bool) -> CanonicalWord {
        let mut classes = Vec::new();
        if !self.point.is_empty() {
            classes.push(self.point);
        }
        classes.extend(self.fracs.into_iter().filter(|c| !c.is_empty()));
        if !self.unbounded.is_empty() {
            classes.push(self.unbounded);
        }
        CanonicalWord { classes, dead }
    }

    fn insert(&mut self, slot: Slot, letter: Letter) {
        match slot {
            Slot::Point => self.point.insert(letter),
            Slot::Frac(i) => self.fracs[i].insert(letter),
            Slot::Unbounded => self.unbounded.insert(letter),
        };
    }

    fn entries(&self) -> impl Iterator<Item = (Slot, Letter)> + '_ {
        self.point
            .iter()
            .map(|l| (Slot::Point, *l))
            .chain(self.fracs.iter().enumerate().flat_map(|(i, c)| c.iter().map(move |l| (Slot::Frac(i), *l))))
            .chain(self.unbounded.iter().map(|l| (Slot::Unbounded, *l)))
    }

    /// Clock entries only, with the clocks in `resets` moved to `{0}`.
    fn clocks_after_reset(&self, resets: &[usize]) -> Layers {
        let mut out = Layers { fracs: vec![BTreeSet::new(); self.fracs.len()], ..Layers::default() };
        for (slot, (owner, r)) in self.entries() {
            if let Owner::Clock(c) = owner {
                if resets.contains(&(c as usize)) {
                    out.point.insert((owner, 0));
                } else {
                    out.insert(slot, (owner, r));
                }
            }
        }
        out
    }
}

/// `H(ν, G)`.
pub fn canonical_word(clocks: &[Rational64], config: &Config, k: u32, dead: bool) -> CanonicalWord {
    let kq = Rational64::from_integer(k as i64);
    let entries = clocks
        .iter()
        .enumerate()
        .map(|(c, v)| (Owner::Clock(c as u32), *v))
        .chain(config.iter().map(|(l, v)| (Owner::Loc(*l), *v)));
    let mut layers = Layers::default();
    let mut fracs: Vec<(Rational64, BTreeSet<Letter>)> = Vec::new();
    for (owner, v) in entries {
        let letter = (owner, reg(v, k));
        if v > kq {
            layers.unbounded.insert(letter);
        } else if v.is_integer() {
            layers.point.insert(letter);
        } else {
            let f = v.fract();
            match fracs.iter_mut().find(|(g, _)| *g == f) {
                Some((_, set)) => {
                    set.insert(letter);
                }
                None => fracs.push((f, BTreeSet::from([letter]))),
            }
        }
    }
    fracs.sort_by_key(|a| a.0);
    layers.fracs = fracs.into_iter().map(|(_, s)| s).collect();
    layers.word(dead)
}

/// Every word reachable by letting time elapse, starting with `word` itself.
pub fn time_successors(word: &CanonicalWord, k: u32) -> Vec<CanonicalWord> {
    let mut cur = Layers::of(word, k);
    let mut out = vec![word.clone()];
    loop {
        if !cur.point.is_empty() {
            // integral entries leave their point and get the smallest fraction
            let mut fresh = BTreeSet::new();
            for (o, r) in std::mem::take(&mut cur.point) {
                if r == 2 * k {
                    cur.unbounded.insert((o, 2 * k + 1));
                } else {
                    fresh.insert((o, r + 1));
                }
            }
            if !fresh.is_empty() {
                cur.fracs.insert(0, fresh);
            }
        } else if let Some(last) = cur.fracs.pop() {
            // the largest fraction reaches the next integer
            cur.point = last.into_iter().map(|(o, r)| (o, r + 1)).collect();
        } else {
            break;
        }
        out.push(cur.clone().word(word.dead));
    }
    out
}

pub fn guard_holds(word: &CanonicalWord, guard: &Guard, k: u32) -> Result<bool> {
    for g in guard {
        if g.value > k {
            return Err(Error::Internal(format!("guard constant {} exceeds K = {k}", g.value)));
        }
        let region = word
            .classes
            .iter()
            .flatten()
            .find(|(o, _)| *o == Owner::Clock(g.clock as u32))
            .map(|(_, r)| *r)
            .ok_or_else(|| Error::Internal(format!("clock {} missing from word", g.clock)))?;
        let at = RegionAt { index: region, k };
        if !at.sat(g.cmp, Rational64::from_integer(g.value as i64)) {
            return Ok(false);
        }
    }
    Ok(true)
}

type Target = (LocId, Slot, u32);

/// Discrete step on symbol `sigma` with clock resets `resets`.
///
/// Each ATA letter picks one minimal model. A letter above `K` stands for all
/// states of its location beyond `K`, which behave identically from then on,
/// so they are treated as one state (see [`normalize`]). If some letter has
/// no model the run dies and a dead word keeps only the clocks.
pub fn word_edge_step<A>(
    word: &CanonicalWord,
    ata: &Ata<A>,
    sigma: &impl Valuation<A>,
    resets: &[usize],
    k: u32,
) -> Vec<CanonicalWord> {
    let layers = Layers::of(word, k);
    let base = layers.clocks_after_reset(resets);
    if word.dead {
        return vec![base.word(true)];
    }
    let mut choices: Vec<Vec<BTreeSet<Target>>> = Vec::new();
    for (slot, (owner, r)) in layers.entries() {
        let Owner::Loc(l) = owner else { continue };
        let targets: Vec<BTreeSet<Target>> = models(&ata.delta(l, sigma), &RegionAt { index: r, k })
            .into_iter()
            .map(|m| {
                m.into_iter().map(|(l2, reset)| if reset { (l2, Slot::Point, 0) } else { (l2, slot, r) }).collect()
            })
            .collect();
        let targets = crate::ata::minimize(targets);
        if targets.is_empty() {
            return vec![base.word(true)];
        }
        choices.push(targets);
    }
    let mut combos: BTreeSet<BTreeSet<Target>> = BTreeSet::from([BTreeSet::new()]);
    for options in &choices {
        combos = combos.iter().flat_map(|acc| options.iter().map(move |o| acc.union(o).copied().collect())).collect();
    }
    let mut out = BTreeSet::new();
    for combo in combos {
        let mut next = base.clone();
        for (l, slot, r) in combo {
            next.insert(slot, (Owner::Loc(l), r));
        }
        out.insert(next.word(false));
    }
    out.into_iter().collect()
}

/// Entries of a live word whose ATA letters are all accepting.
pub fn word_accepting<A>(word: &CanonicalWord, ata: &Ata<A>) -> bool {
    !word.dead
        && word.classes.iter().flatten().all(|(o, _)| match o {
            Owner::Loc(l) => ata.is_accepting(*l),
            Owner::Clock(_) => true,
        })
}

pub fn region_text(r: u32, k: u32) -> String {
    if r == 2 * k + 1 {
        format!("({k},inf)")
    } else if r % 2 == 0 {
        format!("{{{}}}", r / 2)
    } else {
        format!("({},{})", r / 2, r / 2 + 1)
    }
}

pub struct WordDisplay<'a, A> {
    pub word: &'a CanonicalWord,
    pub clocks: &'a [String],
    pub ata: &'a Ata<A>,
}

impl<A> fmt::Display for WordDisplay<'_, A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let classes: Vec<String> = self
            .word
            .classes
            .iter()
            .map(|c| {
                let items: Vec<String> = c
                    .iter()
                    .map(|(o, r)| match o {
                        Owner::Clock(i) => format!("{}:r{r}", self.clocks[*i as usize]),
                        Owner::Loc(l) => format!("{}:r{r}", self.ata.locations[l.index()].name),
                    })
                    .collect();
                format!("{{{}}}", items.join(", "))
            })
            .collect();
        write!(f, "[{}]", classes.join(" | "))?;
        if self.word.dead {
            write!(f, " dead")?;
        }
        Ok(())
    }
}

/// Concrete delays that realise every region-distinct time successor of the
/// given values: 0, each crossing of an integer up to `K + 1`, the midpoints
/// in between, and one delay past the last crossing.
pub fn representative_delays(values: &[Rational64], k: u32) -> Vec<Rational64> {
    let mut crossings = BTreeSet::new();
    for v in values {
        for n in 0..=(k as i64 + 1) {
            let d = Rational64::from_integer(n) - v;
            if d > Rational64::zero() {
                crossings.insert(d);
            }
        }
    }
    let mut out = vec![Rational64::zero()];
    let mut prev = Rational64::zero();
    for c in &crossings {
        out.push((prev + c) / 2);
        out.push(*c);
        prev = *c;
    }
    out.push(prev + 1);
    out
}

/// Merges the states of each location whose value exceeds `K` into one
/// state, keeping the smallest value. Such states satisfy the same clock
/// constraints forever, and acceptance is monotone in the configuration, so
/// the accepted language is unchanged.
pub fn normalize(config: &Config, k: u32) -> Config {
    let kq = Rational64::from_integer(k as i64);
    let mut out = Config::new();
    let mut seen = BTreeSet::new();
    for &(l, v) in config {
        if v <= kq || seen.insert(l) {
            out.insert((l, v));
        }
    }
    out
}

/// Successor words computed on concrete values: for every representative
/// delay whose valuation satisfies `guard`, every ATA edge successor,
/// abstracted with [`canonical_word`]. Used to cross-check the symbolic
/// operations.
pub fn concrete_successors<A>(
    clocks: &[Rational64],
    config: &Config,
    ata: &Ata<A>,
    sigma: &impl Valuation<A>,
    guard: &Guard,
    resets: &[usize],
    k: u32,
) -> BTreeSet<CanonicalWord> {
    let values: Vec<Rational64> = clocks.iter().copied().chain(config.iter().map(|(_, v)| *v)).collect();
    let mut out = BTreeSet::new();
    for d in representative_delays(&values, k) {
        let nu: Vec<Rational64> = clocks.iter().map(|v| v + d).collect();
        let ok = guard.iter().all(|g| g.cmp.holds(nu[g.clock], Rational64::from_integer(g.value as i64)));
        if !ok {
            continue;
        }
        let after: Vec<Rational64> =
            nu.iter().enumerate().map(|(c, v)| if resets.contains(&c) { Rational64::zero() } else { *v }).collect();
        let next = ata.edge_step(&normalize(&Ata::<A>::flow_step(config, d), k), sigma);
        if next.is_empty() {
            out.insert(canonical_word(&after, &Config::new(), k, true));
        }
        for g in next {
            out.insert(canonical_word(&after, &g, k, false));
        }
    }
    out
}

/// Integer value of a scaled constant.
pub fn as_u32(v: Rational64) -> Option<u32> {
    if v.is_integer() {
        v.to_integer().to_u32()
    } else {
        None
    }
}
