use std::fmt::{self, Display, Formatter};

use super::ast::*;

impl Display for AtomRef {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name)?;
        if !self.args.is_empty() {
            write!(f, "({})", self.args.join(", "))?;
        }
        Ok(())
    }
}

fn binders(bs: &[Param]) -> String {
    bs.iter().map(|b| format!("{}: {}", b.name, b.ty)).collect::<Vec<_>>().join(", ")
}

impl Formula {
    fn prec(&self) -> u8 {
        match self {
            Formula::Iff(..) => 0,
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            _ => 4,
        }
    }

    pub(crate) fn fmt_at(&self, f: &mut Formatter<'_>, min: u8) -> fmt::Result {
        let p = self.prec();
        if p < min {
            write!(f, "(")?;
        }
        match self {
            Formula::True => write!(f, "true")?,
            Formula::False => write!(f, "false")?,
            Formula::Atom(r, _) => write!(f, "{r}")?,
            Formula::Eq(l, r, _) => write!(f, "{l} = {r}")?,
            Formula::Not(x) => match &**x {
                Formula::Eq(l, r, _) => write!(f, "{l} != {r}")?,
                _ => {
                    write!(f, "!")?;
                    x.fmt_at(f, 4)?;
                }
            },
            Formula::And(l, r) => {
                l.fmt_at(f, 3)?;
                write!(f, " & ")?;
                r.fmt_at(f, 4)?;
            }
            Formula::Or(l, r) => {
                l.fmt_at(f, 2)?;
                write!(f, " | ")?;
                r.fmt_at(f, 3)?;
            }
            Formula::Implies(l, r) => {
                l.fmt_at(f, 2)?;
                write!(f, " -> ")?;
                r.fmt_at(f, 1)?;
            }
            Formula::Iff(l, r) => {
                l.fmt_at(f, 1)?;
                write!(f, " <-> ")?;
                r.fmt_at(f, 0)?;
            }
            Formula::Exists(bs, body) => write!(f, "(exists {}. {body})", binders(bs))?,
            Formula::Forall(bs, body) => write!(f, "(forall {}. {body})", binders(bs))?,
        }
        if p < min {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl Display for Formula {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

impl ProgramSrc {
    fn prec(&self) -> u8 {
        match self {
            ProgramSrc::Choice(..) => 0,
            ProgramSrc::Conc(..) => 1,
            ProgramSrc::Seq(..) => 2,
            ProgramSrc::Star(..) => 3,
            _ => 4,
        }
    }

    fn fmt_at(&self, f: &mut Formatter<'_>, min: u8) -> fmt::Result {
        let p = self.prec();
        if p < min {
            write!(f, "(")?;
        }
        match self {
            ProgramSrc::Nil => write!(f, "nil")?,
            ProgramSrc::Action(r, _) => write!(f, "{r}")?,
            ProgramSrc::Test(x) => {
                write!(f, "?")?;
                x.fmt_at(f, 4)?;
            }
            ProgramSrc::Seq(l, r) => {
                l.fmt_at(f, 3)?;
                write!(f, "; ")?;
                r.fmt_at(f, 2)?;
            }
            ProgramSrc::Conc(l, r) => {
                l.fmt_at(f, 2)?;
                write!(f, " || ")?;
                r.fmt_at(f, 1)?;
            }
            ProgramSrc::Choice(l, r) => {
                l.fmt_at(f, 1)?;
                write!(f, " | ")?;
                r.fmt_at(f, 0)?;
            }
            ProgramSrc::Star(x) => {
                x.fmt_at(f, 3)?;
                write!(f, "*")?;
            }
        }
        if p < min {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl Display for ProgramSrc {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

impl Display for SourceSpec {
    fn fmt(&self, f: &mut Formatter<'_>) -> fmt::Result {
        writeln!(f, "objects {{")?;
        for t in &self.types {
            writeln!(f, "  {}: {};", t.name, t.constants.join(", "))?;
        }
        writeln!(f, "}}\nfluents {{")?;
        for fl in &self.fluents {
            let r = AtomRef { name: fl.name.clone(), args: fl.arg_types.clone() };
            writeln!(f, "  {r};")?;
        }
        writeln!(f, "}}\nclocks {{")?;
        for c in &self.clocks {
            writeln!(f, "  {};", c.name)?;
        }
        writeln!(f, "}}")?;
        for a in &self.actions {
            write!(f, "action {}", a.name)?;
            if !a.params.is_empty() {
                write!(f, "({})", binders(&a.params))?;
            }
            writeln!(f, " {} {{", a.owner.keyword())?;
            writeln!(f, "  pre: {};", a.pre)?;
            if !a.guard.is_empty() {
                let atoms: Vec<String> =
                    a.guard.iter().map(|g| format!("{} {} {}", g.clock, g.cmp.symbol(), g.value)).collect();
                writeln!(f, "  guard: {};", atoms.join(" & "))?;
            }
            writeln!(f, "}}")?;
        }
        for s in &self.ssas {
            let head = AtomRef { name: s.fluent.clone(), args: s.params.clone() };
            writeln!(f, "ssa {head} := {};", s.body)?;
        }
        for r in &self.resets {
            writeln!(f, "reset {} := {};", r.clock, r.body)?;
        }
        writeln!(f, "init {{")?;
        for (atom, _) in &self.init {
            writeln!(f, "  {atom};")?;
        }
        writeln!(f, "}}\nprogram {{\n  {}\n}}", self.program)?;
        let kw = match self.spec_kind {
            SpecKind::Bad => "spec_bad",
            SpecKind::Good => "spec_good",
        };
        writeln!(f, "{kw} {{\n  {}\n}}", self.spec)
    }
}
