use num_rational::Rational64;

use crate::error::Pos;
use crate::mtl::Mtl;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Owner {
    Controller,
    Environment,
}

impl Owner {
    pub fn keyword(self) -> &'static str {
        match self {
            Owner::Controller => "controllable",
            Owner::Environment => "environment",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Cmp {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Cmp {
    pub fn symbol(self) -> &'static str {
        match self {
            Cmp::Lt => "<",
            Cmp::Le => "<=",
            Cmp::Eq => "=",
            Cmp::Ge => ">=",
            Cmp::Gt => ">",
        }
    }

    pub fn holds<T: Ord>(self, lhs: T, rhs: T) -> bool {
        match self {
            Cmp::Lt => lhs < rhs,
            Cmp::Le => lhs <= rhs,
            Cmp::Eq => lhs == rhs,
            Cmp::Ge => lhs >= rhs,
            Cmp::Gt => lhs > rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeDecl {
    pub name: String,
    pub constants: Vec<String>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FluentDecl {
    pub name: String,
    pub arg_types: Vec<String>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClockDecl {
    pub name: String,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Param {
    pub name: String,
    pub ty: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClockAtom {
    pub clock: String,
    pub cmp: Cmp,
    pub value: Rational64,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionDecl {
    pub name: String,
    pub params: Vec<Param>,
    pub owner: Owner,
    pub pre: Formula,
    /// Conjunction of clock constraints; empty means `true`.
    pub guard: Vec<ClockAtom>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SsaDecl {
    pub fluent: String,
    pub params: Vec<String>,
    pub body: Formula,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResetDecl {
    pub clock: String,
    pub body: Formula,
    pub pos: Pos,
}

/// `name` or `name(arg, ...)`, used for fluent atoms and action terms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AtomRef {
    pub name: String,
    pub args: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Formula {
    True,
    False,
    Atom(AtomRef, Pos),
    /// `lhs = rhs`; the left side is either an object term or the action
    /// variable `a`.
    Eq(AtomRef, AtomRef, Pos),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(Vec<Param>, Box<Formula>),
    Forall(Vec<Param>, Box<Formula>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProgramSrc {
    Nil,
    Action(AtomRef, Pos),
    Test(Formula),
    Seq(Box<ProgramSrc>, Box<ProgramSrc>),
    Choice(Box<ProgramSrc>, Box<ProgramSrc>),
    Conc(Box<ProgramSrc>, Box<ProgramSrc>),
    Star(Box<ProgramSrc>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SpecKind {
    /// The formula describes undesired behaviour.
    Bad,
    /// The formula describes desired behaviour and is negated before use.
    Good,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceSpec {
    pub types: Vec<TypeDecl>,
    pub fluents: Vec<FluentDecl>,
    pub clocks: Vec<ClockDecl>,
    pub actions: Vec<ActionDecl>,
    pub ssas: Vec<SsaDecl>,
    pub resets: Vec<ResetDecl>,
    pub init: Vec<(AtomRef, Pos)>,
    pub program: ProgramSrc,
    pub spec_kind: SpecKind,
    pub spec: Mtl<AtomRef>,
    pub spec_pos: Pos,
}

impl SourceSpec {
    /// The formula for undesired behaviour.
    pub fn bad_formula(&self) -> Mtl<AtomRef> {
        match self.spec_kind {
            SpecKind::Bad => self.spec.clone(),
            SpecKind::Good => Mtl::Not(Box::new(self.spec.clone())),
        }
    }
}
