//! Finite-domain grounding of a parsed problem.
//!
//! Every fluent and action schema is instantiated over the declared object
//! domains. Quantifiers expand to finite conjunctions and disjunctions, and
//! each successor-state and reset formula is specialised per ground action.
//! Rational constants are scaled to integers by the least common denominator.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::ToPrimitive;

use crate::dsl::{AtomRef, Cmp, Formula, Owner, ProgramSrc, SourceSpec};
use crate::error::{invalid, Error, Result};
use crate::mtl::Mtl;
use crate::program::ProgramExpr;
use crate::world::FluentState;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ActionId(pub u32);

impl ActionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Ground static formula over atom indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Prop {
    True,
    False,
    Atom(usize),
    Not(Box<Prop>),
    And(Vec<Prop>),
    Or(Vec<Prop>),
}

impl Prop {
    #[allow(clippy::should_implement_trait)]
    pub fn not(p: Prop) -> Prop {
        match p {
            Prop::True => Prop::False,
            Prop::False => Prop::True,
            Prop::Not(x) => *x,
            other => Prop::Not(Box::new(other)),
        }
    }

    pub fn and(parts: impl IntoIterator<Item = Prop>) -> Prop {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Prop::True => {}
                Prop::False => return Prop::False,
                Prop::And(xs) => out.extend(xs),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Prop::True,
            1 => out.pop().unwrap(),
            _ => Prop::And(out),
        }
    }

    pub fn or(parts: impl IntoIterator<Item = Prop>) -> Prop {
        let mut out = Vec::new();
        for p in parts {
            match p {
                Prop::False => {}
                Prop::True => return Prop::True,
                Prop::Or(xs) => out.extend(xs),
                other => out.push(other),
            }
        }
        match out.len() {
            0 => Prop::False,
            1 => out.pop().unwrap(),
            _ => Prop::Or(out),
        }
    }

    pub fn eval(&self, state: &FluentState) -> bool {
        match self {
            Prop::True => true,
            Prop::False => false,
            Prop::Atom(i) => state.get(*i),
            Prop::Not(x) => !x.eval(state),
            Prop::And(xs) => xs.iter().all(|x| x.eval(state)),
            Prop::Or(xs) => xs.iter().any(|x| x.eval(state)),
        }
    }

    pub fn display<'a>(&'a self, theory: &'a GroundTheory) -> PropDisplay<'a> {
        PropDisplay { prop: self, theory, min: 0 }
    }
}

pub struct PropDisplay<'a> {
    prop: &'a Prop,
    theory: &'a GroundTheory,
    min: u8,
}

impl fmt::Display for PropDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sub = |prop, min| PropDisplay { prop, theory: self.theory, min };
        let (prec, sep) = match self.prop {
            Prop::Or(_) => (2, " | "),
            Prop::And(_) => (3, " & "),
            _ => (4, ""),
        };
        if prec < self.min {
            write!(f, "(")?;
        }
        match self.prop {
            Prop::True => write!(f, "true")?,
            Prop::False => write!(f, "false")?,
            Prop::Atom(i) => write!(f, "{}", self.theory.atoms[*i])?,
            Prop::Not(x) => write!(f, "!{}", sub(x, 4))?,
            Prop::And(xs) | Prop::Or(xs) => {
                for (k, x) in xs.iter().enumerate() {
                    if k > 0 {
                        write!(f, "{sep}")?;
                    }
                    write!(f, "{}", sub(x, prec + 1))?;
                }
            }
        }
        if prec < self.min {
            write!(f, ")")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ClockConstraint {
    pub clock: usize,
    pub cmp: Cmp,
    /// Scaled integer constant.
    pub value: u32,
}

pub type Guard = Vec<ClockConstraint>;

#[derive(Debug, Clone)]
pub struct GroundAction {
    /// Canonical ground name, e.g. `start_grasp(o1,l1)`.
    pub name: String,
    pub owner: Owner,
    pub pre: Prop,
    pub guard: Guard,
}

#[derive(Debug, Clone)]
pub struct GroundTheory {
    pub atoms: Vec<String>,
    pub actions: Vec<GroundAction>,
    pub clocks: Vec<String>,
    /// `ssa[action][atom]`: the atom holds after the action iff this holds before.
    pub ssa: Vec<Vec<Prop>>,
    /// `resets[action][clock]`: evaluated in the post-state.
    pub resets: Vec<Vec<Prop>>,
    pub initial: FluentState,
    /// Largest scaled constant in guards and in the specification.
    pub k: u32,
    /// Factor applied to every time constant.
    pub scale: i64,
    pub domains: BTreeMap<String, Vec<String>>,
    pub warnings: Vec<String>,
    atom_index: HashMap<String, usize>,
    action_index: HashMap<String, ActionId>,
}

#[derive(Debug, Clone, Copy)]
pub struct GroundLimits {
    pub max_atoms: usize,
    pub max_actions: usize,
}

impl Default for GroundLimits {
    fn default() -> Self {
        GroundLimits { max_atoms: 10_000, max_actions: 10_000 }
    }
}

pub fn ground_name(name: &str, args: &[String]) -> String {
    if args.is_empty() {
        name.to_string()
    } else {
        format!("{name}({})", args.join(","))
    }
}

fn product(domains: &[&Vec<String>]) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for d in domains {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                d.iter().map(move |c| {
                    let mut v = prefix.clone();
                    v.push(c.clone());
                    v
                })
            })
            .collect();
    }
    out
}

/// Variable bindings plus the bound action, if any.
struct Env<'a> {
    vars: Vec<(&'a str, String)>,
    action: Option<ActionId>,
}

impl GroundTheory {
    pub fn atom(&self, name: &str) -> Option<usize> {
        self.atom_index.get(name).copied()
    }

    pub fn action_id(&self, name: &str) -> Option<ActionId> {
        self.action_index.get(name).copied()
    }

    pub fn action(&self, a: ActionId) -> Result<&GroundAction> {
        self.actions.get(a.index()).ok_or_else(|| invalid(format!("unknown action id {}", a.0)))
    }

    pub fn action_name(&self, a: ActionId) -> &str {
        &self.actions[a.index()].name
    }

    fn resolve(&self, name: &str, env: &Env) -> String {
        env.vars.iter().rev().find(|(v, _)| *v == name).map_or_else(|| name.to_string(), |(_, c)| c.clone())
    }

    fn resolve_ref(&self, r: &AtomRef, env: &Env) -> String {
        let args: Vec<String> = r.args.iter().map(|x| self.resolve(x, env)).collect();
        ground_name(&r.name, &args)
    }

    fn formula<'a>(&mut self, f: &'a Formula, env: &mut Env<'a>) -> Result<Prop> {
        Ok(match f {
            Formula::True => Prop::True,
            Formula::False => Prop::False,
            Formula::Atom(r, pos) => {
                let name = self.resolve_ref(r, env);
                Prop::Atom(self.atom(&name).ok_or_else(|| invalid(format!("{pos}: unknown ground atom `{name}`")))?)
            }
            Formula::Eq(l, r, pos) => {
                if l.name == "a" && l.args.is_empty() {
                    let bound = env.action.ok_or_else(|| invalid(format!("{pos}: action variable unbound")))?;
                    let name = self.resolve_ref(r, env);
                    let id = self.action_id(&name).ok_or_else(|| invalid(format!("{pos}: unknown action `{name}`")))?;
                    if id == bound {
                        Prop::True
                    } else {
                        Prop::False
                    }
                } else if self.resolve(&l.name, env) == self.resolve(&r.name, env) {
                    Prop::True
                } else {
                    Prop::False
                }
            }
            Formula::Not(x) => Prop::not(self.formula(x, env)?),
            Formula::And(l, r) => Prop::and([self.formula(l, env)?, self.formula(r, env)?]),
            Formula::Or(l, r) => Prop::or([self.formula(l, env)?, self.formula(r, env)?]),
            Formula::Implies(l, r) => Prop::or([Prop::not(self.formula(l, env)?), self.formula(r, env)?]),
            Formula::Iff(l, r) => {
                let (a, b) = (self.formula(l, env)?, self.formula(r, env)?);
                Prop::or([Prop::and([a.clone(), b.clone()]), Prop::and([Prop::not(a), Prop::not(b)])])
            }
            Formula::Exists(bs, body) | Formula::Forall(bs, body) => {
                let exists = matches!(f, Formula::Exists(..));
                let mut domains = Vec::new();
                for b in bs {
                    let d = self.domains.get(&b.ty).ok_or_else(|| invalid(format!("unknown type `{}`", b.ty)))?;
                    if d.is_empty() {
                        self.warnings.push(format!("quantifier over empty type `{}`", b.ty));
                    }
                    domains.push(d.clone());
                }
                let refs: Vec<&Vec<String>> = domains.iter().collect();
                let mut parts = Vec::new();
                for tuple in product(&refs) {
                    let depth = env.vars.len();
                    env.vars.extend(bs.iter().map(|b| b.name.as_str()).zip(tuple));
                    let p = self.formula(body, env);
                    env.vars.truncate(depth);
                    parts.push(p?);
                }
                if exists {
                    Prop::or(parts)
                } else {
                    Prop::and(parts)
                }
            }
        })
    }

    /// Grounds a closed formula such as a program test.
    pub fn ground_formula(&mut self, f: &Formula) -> Result<Prop> {
        self.formula(f, &mut Env { vars: Vec::new(), action: None })
    }

    /// Grounds a program whose action terms are ground.
    pub fn ground_program(&mut self, p: &ProgramSrc) -> Result<ProgramExpr> {
        Ok(match p {
            ProgramSrc::Nil => ProgramExpr::nil(),
            ProgramSrc::Action(r, pos) => {
                let name = ground_name(&r.name, &r.args);
                ProgramExpr::Act(
                    self.action_id(&name).ok_or_else(|| invalid(format!("{pos}: unknown action `{name}`")))?,
                )
            }
            ProgramSrc::Test(f) => ProgramExpr::Test(self.ground_formula(f)?),
            ProgramSrc::Seq(l, r) => ProgramExpr::seq(self.ground_program(l)?, self.ground_program(r)?),
            ProgramSrc::Choice(l, r) => ProgramExpr::choice(self.ground_program(l)?, self.ground_program(r)?),
            ProgramSrc::Conc(l, r) => ProgramExpr::conc(self.ground_program(l)?, self.ground_program(r)?),
            ProgramSrc::Star(x) => ProgramExpr::star(self.ground_program(x)?),
        })
    }

    /// Parses and grounds program text over this theory's signature.
    pub fn parse_program(&mut self, text: &str) -> Result<ProgramExpr> {
        let src = crate::dsl::parse_program(text)?;
        self.ground_program(&src)
    }

    pub fn mtl_atom(&self, r: &AtomRef) -> Result<usize> {
        let name = ground_name(&r.name, &r.args);
        self.atom(&name).ok_or_else(|| invalid(format!("unknown atom `{name}`")))
    }

    pub fn fluent_names(&self, state: &FluentState) -> Vec<String> {
        state.true_atoms().map(|i| self.atoms[i].clone()).collect()
    }

    pub fn state_from_names<S: AsRef<str>>(&self, names: &[S]) -> Result<FluentState> {
        let mut st = FluentState::new(self.atoms.len());
        for n in names {
            let n = n.as_ref();
            let r = crate::dsl::parse_formula(n)?;
            let Formula::Atom(r, _) = r else { return Err(invalid(format!("`{n}` is not an atom"))) };
            st.set(self.mtl_atom(&r)?, true);
        }
        Ok(st)
    }
}

/// Grounds a validated document. Returns the theory, the program and the
/// scaled formula for undesired behaviour.
pub fn ground(spec: &SourceSpec, limits: GroundLimits) -> Result<(GroundTheory, ProgramExpr, Mtl<usize>)> {
    let domains: BTreeMap<String, Vec<String>> =
        spec.types.iter().map(|t| (t.name.clone(), t.constants.clone())).collect();

    let mut atoms = Vec::new();
    let mut atom_params = Vec::new();
    for fl in &spec.fluents {
        let ds: Vec<&Vec<String>> = fl.arg_types.iter().map(|t| &domains[t]).collect();
        for args in product(&ds) {
            atoms.push(ground_name(&fl.name, &args));
            atom_params.push((fl.name.clone(), args));
            if atoms.len() > limits.max_atoms {
                return Err(Error::Resource(format!("more than {} ground atoms", limits.max_atoms)));
            }
        }
    }

    let mut action_params = Vec::new();
    for (decl_ix, a) in spec.actions.iter().enumerate() {
        let ds: Vec<&Vec<String>> = a.params.iter().map(|p| &domains[&p.ty]).collect();
        for args in product(&ds) {
            action_params.push((decl_ix, args));
            if action_params.len() > limits.max_actions {
                return Err(Error::Resource(format!("more than {} ground actions", limits.max_actions)));
            }
        }
    }

    let mut denom = 1i64;
    let rationals = spec
        .actions
        .iter()
        .flat_map(|a| a.guard.iter().map(|g| g.value))
        .chain(spec.spec.intervals().into_iter().flat_map(|i| i.endpoints().collect::<Vec<_>>()));
    for r in rationals {
        denom = denom.lcm(r.denom());
    }

    let clocks: Vec<String> = spec.clocks.iter().map(|c| c.name.clone()).collect();
    let mut theory = GroundTheory {
        atom_index: atoms.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect(),
        initial: FluentState::new(atoms.len()),
        atoms,
        actions: Vec::new(),
        clocks,
        ssa: Vec::new(),
        resets: Vec::new(),
        k: 0,
        scale: denom,
        domains,
        warnings: Vec::new(),
        action_index: HashMap::new(),
    };
    for (decl_ix, args) in &action_params {
        let decl = &spec.actions[*decl_ix];
        let name = ground_name(&decl.name, args);
        theory.action_index.insert(name, ActionId(theory.action_index.len() as u32));
    }

    let scale_const = |v: Rational64| -> Result<u32> {
        (v * denom).to_integer().to_u32().ok_or_else(|| Error::Resource(format!("time constant {v} too large")))
    };
    let mut k = 0u32;
    for (decl_ix, args) in &action_params {
        let decl = &spec.actions[*decl_ix];
        let mut env =
            Env { vars: decl.params.iter().map(|p| p.name.as_str()).zip(args.iter().cloned()).collect(), action: None };
        let pre = theory.formula(&decl.pre, &mut env)?;
        let mut guard = Vec::new();
        for g in &decl.guard {
            let value = scale_const(g.value)?;
            k = k.max(value);
            let clock = theory.clocks.iter().position(|c| *c == g.clock).expect("validated clock");
            guard.push(ClockConstraint { clock, cmp: g.cmp, value });
        }
        theory.actions.push(GroundAction { name: ground_name(&decl.name, args), owner: decl.owner, pre, guard });
    }

    let ssa_by_fluent: HashMap<&str, &crate::dsl::SsaDecl> = spec.ssas.iter().map(|s| (s.fluent.as_str(), s)).collect();
    let reset_by_clock: HashMap<&str, &crate::dsl::ResetDecl> =
        spec.resets.iter().map(|r| (r.clock.as_str(), r)).collect();
    for a in 0..theory.actions.len() {
        let action = Some(ActionId(a as u32));
        let mut row = Vec::with_capacity(atom_params.len());
        for (fluent, args) in &atom_params {
            let decl = ssa_by_fluent[fluent.as_str()];
            let mut env =
                Env { vars: decl.params.iter().map(String::as_str).zip(args.iter().cloned()).collect(), action };
            row.push(theory.formula(&decl.body, &mut env)?);
        }
        theory.ssa.push(row);
        let mut resets = Vec::new();
        for c in &spec.clocks {
            let decl = reset_by_clock[c.name.as_str()];
            resets.push(theory.formula(&decl.body, &mut Env { vars: Vec::new(), action })?);
        }
        theory.resets.push(resets);
    }

    for (atom, pos) in &spec.init {
        let ix = theory.mtl_atom(atom).map_err(|e| invalid(format!("{pos}: {e}")))?;
        theory.initial.set(ix, true);
    }

    let program = theory.ground_program(&spec.program)?;
    let mut phi = spec.bad_formula().map_atoms(&mut |r| theory.mtl_atom(r))?;
    phi.scale_intervals(denom);
    for i in phi.intervals() {
        for e in i.endpoints() {
            k = k.max(e.to_integer().to_u32().ok_or_else(|| Error::Resource(format!("interval bound {e} too large")))?);
        }
    }
    theory.k = k;
    theory.warnings.dedup();
    Ok((theory, program, phi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::parse_spec;

    const ROBOT: &str = include_str!("../tests/fixtures/robot_camera.tgs");

    fn robot() -> (GroundTheory, ProgramExpr, Mtl<usize>) {
        ground(&parse_spec(ROBOT).unwrap(), GroundLimits::default()).unwrap()
    }

    #[test]
    fn robot_atoms_and_actions() {
        let (t, _, _) = robot();
        assert_eq!(t.atoms, ["obj_at(o1,l1)", "grasping(o1)", "holding(o1)", "cam_on", "cam_booting"]);
        let names: Vec<&str> = t.actions.iter().map(|a| a.name.as_str()).collect();
        assert_eq!(names, ["start_grasp(o1,l1)", "end_grasp(o1,l1)", "start_cam", "end_cam"]);
        assert_eq!(t.k, 1);
        assert_eq!(t.scale, 1);
        assert_eq!(t.fluent_names(&t.initial), ["obj_at(o1,l1)"]);
    }

    #[test]
    fn two_locations_give_six_actions() {
        let src = ROBOT.replace("loc: l1;", "loc: l1, l2;");
        let (t, _, _) = ground(&parse_spec(&src).unwrap(), GroundLimits::default()).unwrap();
        assert_eq!(t.actions.len(), 6);
        assert_eq!(t.atoms.len(), 6);
    }

    #[test]
    fn ssa_specialises_per_action() {
        let (t, _, _) = robot();
        let sc = t.action_id("start_cam").unwrap();
        let ec = t.action_id("end_cam").unwrap();
        let booting = t.atom("cam_booting").unwrap();
        assert_eq!(t.ssa[sc.index()][booting], Prop::True);
        assert_eq!(t.ssa[ec.index()][booting], Prop::False);
        let sg = t.action_id("start_grasp(o1,l1)").unwrap();
        assert_eq!(t.ssa[sg.index()][booting], Prop::Atom(booting));
        assert_eq!(t.resets[sc.index()][0], Prop::True);
        assert_eq!(t.resets[ec.index()][0], Prop::False);
    }

    #[test]
    fn constants_are_scaled_by_common_denominator() {
        let src = ROBOT.replace("guard: c_cam = 1;", "guard: c_cam = 1/2;").replace("F<=1 (", "F(1/3,1] (");
        let (t, _, phi) = ground(&parse_spec(&src).unwrap(), GroundLimits::default()).unwrap();
        assert_eq!(t.scale, 6);
        assert_eq!(t.actions[3].guard[0].value, 3);
        assert_eq!(t.k, 6);
        assert_eq!(phi.intervals()[0].lo, Rational64::from_integer(2));
    }

    #[test]
    fn empty_quantifier_domain_warns() {
        let src = ROBOT
            .replace("loc: l1;", "loc: l1;\n  tool: ;")
            .replace("pre: grasping(o);", "pre: grasping(o) & !(exists t: tool. obj_at(o, l));");
        let (t, _, _) = ground(&parse_spec(&src).unwrap(), GroundLimits::default()).unwrap();
        assert!(t.warnings.iter().any(|w| w.contains("tool")));
    }

    #[test]
    fn atom_budget_is_enforced() {
        let e = ground(&parse_spec(ROBOT).unwrap(), GroundLimits { max_atoms: 3, max_actions: 100 }).unwrap_err();
        assert!(matches!(e, Error::Resource(_)));
    }

    #[test]
    fn program_text_round_trips_through_grounding() {
        let (mut t, prog, _) = robot();
        let text = prog.display(&t).to_string();
        assert_eq!(t.parse_program(&text).unwrap(), prog);
    }
}
