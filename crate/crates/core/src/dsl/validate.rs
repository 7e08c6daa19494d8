use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;

use super::ast::*;
use crate::error::{ParseError, Pos};

type PResult<T> = Result<T, ParseError>;

/// Name resolution tables for a parsed document.
pub struct Signature<'a> {
    pub constants: BTreeMap<&'a str, &'a str>,
    pub types: BTreeSet<&'a str>,
    pub fluents: BTreeMap<&'a str, &'a [String]>,
    pub actions: BTreeMap<&'a str, &'a ActionDecl>,
    pub clocks: BTreeSet<&'a str>,
}

const ACTION_VAR: &str = "a";
const RESERVED: &[&str] = &[ACTION_VAR, "true", "false", "nil", "exists", "forall", "inf", "U", "F", "G", "Poss"];

fn err<T>(pos: Pos, msg: impl Into<String>) -> PResult<T> {
    Err(ParseError::new(pos, msg))
}

fn not_reserved(name: &str, pos: Pos) -> PResult<()> {
    if RESERVED.contains(&name) {
        return err(pos, format!("`{name}` is reserved"));
    }
    Ok(())
}

impl<'a> Signature<'a> {
    pub fn build(spec: &'a SourceSpec) -> PResult<Self> {
        let mut sig = Signature {
            constants: BTreeMap::new(),
            types: BTreeSet::new(),
            fluents: BTreeMap::new(),
            actions: BTreeMap::new(),
            clocks: BTreeSet::new(),
        };
        let mut names: BTreeSet<&str> = BTreeSet::new();
        for t in &spec.types {
            not_reserved(&t.name, t.pos)?;
            if !sig.types.insert(&t.name) {
                return err(t.pos, format!("duplicate type `{}`", t.name));
            }
            for c in &t.constants {
                not_reserved(c, t.pos)?;
                if sig.constants.insert(c, &t.name).is_some() {
                    return err(t.pos, format!("constant `{c}` declared twice"));
                }
            }
        }
        for f in &spec.fluents {
            not_reserved(&f.name, f.pos)?;
            if !names.insert(&f.name) {
                return err(f.pos, format!("duplicate name `{}`", f.name));
            }
            for ty in &f.arg_types {
                if !sig.types.contains(ty.as_str()) {
                    return err(f.pos, format!("unknown type `{ty}` in fluent `{}`", f.name));
                }
            }
            sig.fluents.insert(&f.name, &f.arg_types);
        }
        for c in &spec.clocks {
            not_reserved(&c.name, c.pos)?;
            if !names.insert(&c.name) {
                return err(c.pos, format!("duplicate name `{}`", c.name));
            }
            sig.clocks.insert(&c.name);
        }
        for a in &spec.actions {
            not_reserved(&a.name, a.pos)?;
            if !names.insert(&a.name) {
                return err(a.pos, format!("duplicate name `{}`", a.name));
            }
            sig.actions.insert(&a.name, a);
        }
        Ok(sig)
    }

    fn term_type(&self, name: &str, scope: &[(&str, &'a str)], pos: Pos) -> PResult<&'a str> {
        if let Some((_, ty)) = scope.iter().rev().find(|(v, _)| *v == name) {
            return Ok(ty);
        }
        match self.constants.get(name) {
            Some(ty) => Ok(ty),
            None => err(pos, format!("unknown variable or constant `{name}`")),
        }
    }

    fn check_args(&self, what: &str, r: &AtomRef, want: &[&str], scope: &[(&str, &'a str)], pos: Pos) -> PResult<()> {
        if r.args.len() != want.len() {
            return err(pos, format!("{what} `{}` expects {} argument(s), got {}", r.name, want.len(), r.args.len()));
        }
        for (arg, ty) in r.args.iter().zip(want) {
            let got = self.term_type(arg, scope, pos)?;
            if got != *ty {
                return err(pos, format!("argument `{arg}` of `{}` has type `{got}`, expected `{ty}`", r.name));
            }
        }
        Ok(())
    }

    fn fluent_atom(&self, r: &AtomRef, scope: &[(&str, &'a str)], pos: Pos) -> PResult<()> {
        if r.name == "Poss" {
            return err(pos, "`Poss` may not be used inside formulas");
        }
        let Some(types) = self.fluents.get(r.name.as_str()) else {
            return err(pos, format!("unknown fluent `{}`", r.name));
        };
        let want: Vec<&str> = types.iter().map(String::as_str).collect();
        self.check_args("fluent", r, &want, scope, pos)
    }

    pub fn action_term(&self, r: &AtomRef, scope: &[(&str, &'a str)], pos: Pos) -> PResult<()> {
        let Some(decl) = self.actions.get(r.name.as_str()) else {
            return err(pos, format!("unknown action `{}`", r.name));
        };
        let want: Vec<&str> = decl.params.iter().map(|p| p.ty.as_str()).collect();
        self.check_args("action", r, &want, scope, pos)
    }

    /// `allow_a`: whether the action variable may be compared.
    pub fn formula(&self, f: &'a Formula, scope: &mut Vec<(&'a str, &'a str)>, allow_a: bool, pos: Pos) -> PResult<()> {
        match f {
            Formula::True | Formula::False => Ok(()),
            Formula::Atom(r, p) => self.fluent_atom(r, scope, *p),
            Formula::Eq(l, r, p) => {
                if l.name == ACTION_VAR && l.args.is_empty() {
                    if !allow_a {
                        return err(*p, "the action variable `a` is only available in ssa and reset formulas");
                    }
                    return self.action_term(r, scope, *p);
                }
                if !l.args.is_empty() || !r.args.is_empty() {
                    return err(*p, "equality compares objects or the action variable `a`");
                }
                let (lt, rt) = (self.term_type(&l.name, scope, *p)?, self.term_type(&r.name, scope, *p)?);
                if lt != rt {
                    return err(
                        *p,
                        format!("cannot compare `{}` of type `{lt}` with `{}` of type `{rt}`", l.name, r.name),
                    );
                }
                Ok(())
            }
            Formula::Not(x) => self.formula(x, scope, allow_a, pos),
            Formula::And(l, r) | Formula::Or(l, r) | Formula::Implies(l, r) | Formula::Iff(l, r) => {
                self.formula(l, scope, allow_a, pos)?;
                self.formula(r, scope, allow_a, pos)
            }
            Formula::Exists(bs, body) | Formula::Forall(bs, body) => {
                let depth = scope.len();
                for b in bs {
                    not_reserved(&b.name, pos)?;
                    if !self.types.contains(b.ty.as_str()) {
                        return err(pos, format!("unknown type `{}`", b.ty));
                    }
                    scope.push((&b.name, &b.ty));
                }
                let r = self.formula(body, scope, allow_a, pos);
                scope.truncate(depth);
                r
            }
        }
    }

    fn program(&self, p: &'a ProgramSrc, pos: Pos) -> PResult<()> {
        match p {
            ProgramSrc::Nil => Ok(()),
            ProgramSrc::Action(r, p) => self.action_term(r, &[], *p),
            ProgramSrc::Test(f) => self.formula(f, &mut Vec::new(), false, pos),
            ProgramSrc::Seq(l, r) | ProgramSrc::Choice(l, r) | ProgramSrc::Conc(l, r) => {
                self.program(l, pos)?;
                self.program(r, pos)
            }
            ProgramSrc::Star(x) => self.program(x, pos),
        }
    }
}

/// Checks names, arities, types and the one-axiom-per-symbol rules.
pub fn validate(spec: &SourceSpec) -> PResult<()> {
    let sig = Signature::build(spec)?;
    for a in &spec.actions {
        let mut scope = Vec::new();
        let mut seen = BTreeSet::new();
        for p in &a.params {
            not_reserved(&p.name, a.pos)?;
            if !sig.types.contains(p.ty.as_str()) {
                return err(a.pos, format!("unknown type `{}` in action `{}`", p.ty, a.name));
            }
            if !seen.insert(&p.name) {
                return err(a.pos, format!("duplicate parameter `{}` in action `{}`", p.name, a.name));
            }
            scope.push((p.name.as_str(), p.ty.as_str()));
        }
        sig.formula(&a.pre, &mut scope, false, a.pos)?;
        for g in &a.guard {
            if !sig.clocks.contains(g.clock.as_str()) {
                return err(g.pos, format!("unknown clock `{}`", g.clock));
            }
            if g.value < num_rational::Rational64::zero() {
                return err(g.pos, "clock constants must be non-negative");
            }
        }
    }
    let mut ssa_seen = BTreeSet::new();
    for s in &spec.ssas {
        let Some(types) = sig.fluents.get(s.fluent.as_str()) else {
            return err(s.pos, format!("successor-state formula for unknown fluent `{}`", s.fluent));
        };
        if !ssa_seen.insert(s.fluent.as_str()) {
            return err(s.pos, format!("fluent `{}` has more than one successor-state formula", s.fluent));
        }
        if types.len() != s.params.len() {
            return err(
                s.pos,
                format!("fluent `{}` has {} argument(s), ssa binds {}", s.fluent, types.len(), s.params.len()),
            );
        }
        let mut scope = Vec::new();
        for (p, ty) in s.params.iter().zip(types.iter()) {
            not_reserved(p, s.pos)?;
            scope.push((p.as_str(), ty.as_str()));
        }
        sig.formula(&s.body, &mut scope, true, s.pos)?;
    }
    if let Some(f) = spec.fluents.iter().find(|f| !ssa_seen.contains(f.name.as_str())) {
        return err(f.pos, format!("fluent `{}` has no successor-state formula", f.name));
    }
    let mut reset_seen = BTreeSet::new();
    for r in &spec.resets {
        if !sig.clocks.contains(r.clock.as_str()) {
            return err(r.pos, format!("reset formula for unknown clock `{}`", r.clock));
        }
        if !reset_seen.insert(r.clock.as_str()) {
            return err(r.pos, format!("clock `{}` has more than one reset formula", r.clock));
        }
        sig.formula(&r.body, &mut Vec::new(), true, r.pos)?;
    }
    if let Some(c) = spec.clocks.iter().find(|c| !reset_seen.contains(c.name.as_str())) {
        return err(c.pos, format!("clock `{}` has no reset formula", c.name));
    }
    for (atom, pos) in &spec.init {
        sig.fluent_atom(atom, &[], *pos)?;
    }
    sig.program(&spec.program, Pos::default())?;
    for atom in spec.spec.atoms() {
        sig.fluent_atom(atom, &[], spec.spec_pos)?;
    }
    Ok(())
}
