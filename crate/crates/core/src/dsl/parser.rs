use num_rational::Rational64;
use num_traits::Zero;

use super::ast::*;
use super::lexer::{tokenize, Tok, Token};
use crate::error::{ParseError, Pos};
use crate::mtl::{Interval, Mtl};

type PResult<T> = Result<T, ParseError>;

pub struct Parser {
    toks: Vec<Token>,
    i: usize,
}

impl Parser {
    pub fn new(src: &str) -> PResult<Self> {
        Ok(Parser { toks: tokenize(src)?, i: 0 })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.i + k).min(self.toks.len() - 1)].tok
    }

    pub fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].tok.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn error<T>(&self, what: &str) -> PResult<T> {
        Err(ParseError::new(self.pos(), format!("expected {what}, found {}", self.peek().describe())))
    }

    fn expect(&mut self, t: Tok) -> PResult<()> {
        if self.eat(&t) {
            Ok(())
        } else {
            let what = t.describe();
            self.error(&what)
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn ident(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(s)
            }
            _ => self.error("identifier"),
        }
    }

    pub fn expect_eof(&mut self) -> PResult<()> {
        match self.peek() {
            Tok::Eof => Ok(()),
            _ => self.error("end of input"),
        }
    }

    fn ident_list(&mut self, close: Tok) -> PResult<Vec<String>> {
        let mut out = Vec::new();
        if self.eat(&close) {
            return Ok(out);
        }
        loop {
            out.push(self.ident()?);
            if self.eat(&close) {
                return Ok(out);
            }
            self.expect(Tok::Comma)?;
        }
    }

    /// `name` or `name(arg, ...)`.
    fn atom_ref(&mut self) -> PResult<AtomRef> {
        let name = self.ident()?;
        let args = if self.eat(&Tok::LParen) { self.ident_list(Tok::RParen)? } else { Vec::new() };
        Ok(AtomRef { name, args })
    }

    fn number(&mut self) -> PResult<Rational64> {
        let n = match self.peek().clone() {
            Tok::Num(n) => n,
            _ => return self.error("number"),
        };
        self.bump();
        if self.eat(&Tok::Slash) {
            let pos = self.pos();
            let d = match self.bump() {
                Tok::Num(d) if !d.is_zero() => d,
                _ => return Err(ParseError::new(pos, "expected non-zero denominator")),
            };
            return Ok(n / d);
        }
        Ok(n)
    }

    pub fn spec(&mut self) -> PResult<SourceSpec> {
        let mut types = Vec::new();
        let mut fluents = Vec::new();
        let mut clocks = Vec::new();
        let mut actions = Vec::new();
        let mut ssas = Vec::new();
        let mut resets = Vec::new();
        let mut init = Vec::new();
        let mut program = None;
        let mut spec = None;
        while self.peek() != &Tok::Eof {
            let pos = self.pos();
            let kw = self.ident()?;
            match kw.as_str() {
                "objects" => {
                    self.expect(Tok::LBrace)?;
                    while !self.eat(&Tok::RBrace) {
                        let pos = self.pos();
                        let name = self.ident()?;
                        self.expect(Tok::Colon)?;
                        let constants = self.ident_list(Tok::Semi)?;
                        types.push(TypeDecl { name, constants, pos });
                    }
                }
                "fluents" => {
                    self.expect(Tok::LBrace)?;
                    while !self.eat(&Tok::RBrace) {
                        let pos = self.pos();
                        let r = self.atom_ref()?;
                        self.expect(Tok::Semi)?;
                        fluents.push(FluentDecl { name: r.name, arg_types: r.args, pos });
                    }
                }
                "clocks" => {
                    self.expect(Tok::LBrace)?;
                    while !self.eat(&Tok::RBrace) {
                        loop {
                            let pos = self.pos();
                            clocks.push(ClockDecl { name: self.ident()?, pos });
                            if self.eat(&Tok::Semi) {
                                break;
                            }
                            self.expect(Tok::Comma)?;
                        }
                    }
                }
                "action" => actions.push(self.action(pos)?),
                "ssa" => {
                    let r = self.atom_ref()?;
                    self.expect(Tok::Assign)?;
                    let body = self.formula()?;
                    self.expect(Tok::Semi)?;
                    ssas.push(SsaDecl { fluent: r.name, params: r.args, body, pos });
                }
                "reset" => {
                    let clock = self.ident()?;
                    self.expect(Tok::Assign)?;
                    let body = self.formula()?;
                    self.expect(Tok::Semi)?;
                    resets.push(ResetDecl { clock, body, pos });
                }
                "init" => {
                    self.expect(Tok::LBrace)?;
                    while !self.eat(&Tok::RBrace) {
                        let pos = self.pos();
                        init.push((self.atom_ref()?, pos));
                        self.expect(Tok::Semi)?;
                    }
                }
                "program" => {
                    if program.is_some() {
                        return Err(ParseError::new(pos, "duplicate program block"));
                    }
                    self.expect(Tok::LBrace)?;
                    program = Some(self.program()?);
                    self.expect(Tok::RBrace)?;
                }
                "spec_bad" | "spec_good" => {
                    if spec.is_some() {
                        return Err(ParseError::new(pos, "duplicate specification block"));
                    }
                    let kind = if kw == "spec_bad" { SpecKind::Bad } else { SpecKind::Good };
                    self.expect(Tok::LBrace)?;
                    let f = self.mtl()?;
                    self.expect(Tok::RBrace)?;
                    spec = Some((kind, f, pos));
                }
                other => {
                    return Err(ParseError::new(
                        pos,
                        format!("unknown declaration `{other}`, expected one of objects, fluents, clocks, action, ssa, reset, init, program, spec_bad, spec_good"),
                    ))
                }
            }
        }
        let end = self.pos();
        let program = program.ok_or_else(|| ParseError::new(end, "missing program block"))?;
        let (spec_kind, spec, spec_pos) =
            spec.ok_or_else(|| ParseError::new(end, "missing spec_bad or spec_good block"))?;
        Ok(SourceSpec { types, fluents, clocks, actions, ssas, resets, init, program, spec_kind, spec, spec_pos })
    }

    fn action(&mut self, pos: Pos) -> PResult<ActionDecl> {
        let name = self.ident()?;
        let mut params = Vec::new();
        if self.eat(&Tok::LParen) && !self.eat(&Tok::RParen) {
            loop {
                let pname = self.ident()?;
                self.expect(Tok::Colon)?;
                params.push(Param { name: pname, ty: self.ident()? });
                if self.eat(&Tok::RParen) {
                    break;
                }
                self.expect(Tok::Comma)?;
            }
        }
        let owner = if self.eat_kw("controllable") {
            Owner::Controller
        } else if self.eat_kw("environment") {
            Owner::Environment
        } else {
            return Err(ParseError::new(
                self.pos(),
                format!("action `{name}` needs an ownership tag: `controllable` or `environment`"),
            ));
        };
        let mut pre = None;
        let mut guard = None;
        self.expect(Tok::LBrace)?;
        while !self.eat(&Tok::RBrace) {
            let fpos = self.pos();
            let field = self.ident()?;
            self.expect(Tok::Colon)?;
            match field.as_str() {
                "pre" if pre.is_none() => pre = Some(self.formula()?),
                "guard" if guard.is_none() => guard = Some(self.guard()?),
                "pre" | "guard" => return Err(ParseError::new(fpos, format!("duplicate `{field}`"))),
                _ => return Err(ParseError::new(fpos, format!("unknown action field `{field}`"))),
            }
            self.expect(Tok::Semi)?;
        }
        Ok(ActionDecl { name, params, owner, pre: pre.unwrap_or(Formula::True), guard: guard.unwrap_or_default(), pos })
    }

    fn guard(&mut self) -> PResult<Vec<ClockAtom>> {
        if self.eat_kw("true") {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        loop {
            let pos = self.pos();
            if self.is_kw("box") || self.peek() == &Tok::LBracket {
                return Err(ParseError::new(pos, "temporal operators are not supported in guards"));
            }
            let clock = self.ident()?;
            let cmp = match self.bump() {
                Tok::Lt => Cmp::Lt,
                Tok::Le => Cmp::Le,
                Tok::Eq => Cmp::Eq,
                Tok::Ge => Cmp::Ge,
                Tok::Gt => Cmp::Gt,
                _ => return Err(ParseError::new(pos, format!("expected a comparison after clock `{clock}`"))),
            };
            let value = self.number()?;
            out.push(ClockAtom { clock, cmp, value, pos });
            if !self.eat(&Tok::Amp) {
                return Ok(out);
            }
        }
    }

    pub fn formula(&mut self) -> PResult<Formula> {
        let lhs = self.implication()?;
        if self.eat(&Tok::Iff) {
            let rhs = self.formula()?;
            return Ok(Formula::Iff(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn implication(&mut self) -> PResult<Formula> {
        let lhs = self.disjunction()?;
        if self.eat(&Tok::Arrow) {
            let rhs = self.implication()?;
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> PResult<Formula> {
        let mut f = self.conjunction()?;
        while self.eat(&Tok::Pipe) {
            f = Formula::Or(Box::new(f), Box::new(self.conjunction()?));
        }
        Ok(f)
    }

    fn conjunction(&mut self) -> PResult<Formula> {
        let mut f = self.unary()?;
        while self.eat(&Tok::Amp) {
            f = Formula::And(Box::new(f), Box::new(self.unary()?));
        }
        Ok(f)
    }

    fn unary(&mut self) -> PResult<Formula> {
        if self.eat(&Tok::Bang) {
            return Ok(Formula::Not(Box::new(self.unary()?)));
        }
        if self.is_kw("exists") || self.is_kw("forall") {
            let exists = self.is_kw("exists");
            self.bump();
            let mut binders = Vec::new();
            loop {
                let name = self.ident()?;
                self.expect(Tok::Colon)?;
                binders.push(Param { name, ty: self.ident()? });
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::Dot)?;
            let body = Box::new(self.formula()?);
            return Ok(if exists { Formula::Exists(binders, body) } else { Formula::Forall(binders, body) });
        }
        self.primary()
    }

    fn primary(&mut self) -> PResult<Formula> {
        let pos = self.pos();
        if self.eat(&Tok::LParen) {
            let f = self.formula()?;
            self.expect(Tok::RParen)?;
            return Ok(f);
        }
        if self.eat_kw("true") {
            return Ok(Formula::True);
        }
        if self.eat_kw("false") {
            return Ok(Formula::False);
        }
        if !matches!(self.peek(), Tok::Ident(_)) {
            return self.error("formula");
        }
        let lhs = self.atom_ref()?;
        if self.eat(&Tok::Eq) {
            return Ok(Formula::Eq(lhs, self.atom_ref()?, pos));
        }
        if self.eat(&Tok::Neq) {
            return Ok(Formula::Not(Box::new(Formula::Eq(lhs, self.atom_ref()?, pos))));
        }
        Ok(Formula::Atom(lhs, pos))
    }

    /// Precedence from loosest: `|`, `||`, `;`, postfix `*`.
    pub fn program(&mut self) -> PResult<ProgramSrc> {
        let lhs = self.conc()?;
        if self.eat(&Tok::Pipe) {
            return Ok(ProgramSrc::Choice(Box::new(lhs), Box::new(self.program()?)));
        }
        Ok(lhs)
    }

    fn conc(&mut self) -> PResult<ProgramSrc> {
        let lhs = self.seq()?;
        if self.eat(&Tok::PipePipe) {
            return Ok(ProgramSrc::Conc(Box::new(lhs), Box::new(self.conc()?)));
        }
        Ok(lhs)
    }

    fn seq(&mut self) -> PResult<ProgramSrc> {
        let lhs = self.postfix()?;
        if self.eat(&Tok::Semi) {
            return Ok(ProgramSrc::Seq(Box::new(lhs), Box::new(self.seq()?)));
        }
        Ok(lhs)
    }

    fn postfix(&mut self) -> PResult<ProgramSrc> {
        let mut p = self.program_primary()?;
        while self.eat(&Tok::Star) {
            p = ProgramSrc::Star(Box::new(p));
        }
        Ok(p)
    }

    fn program_primary(&mut self) -> PResult<ProgramSrc> {
        let pos = self.pos();
        if self.eat(&Tok::LParen) {
            let p = self.program()?;
            self.expect(Tok::RParen)?;
            return Ok(p);
        }
        if self.eat(&Tok::Question) {
            return Ok(ProgramSrc::Test(self.unary()?));
        }
        if self.eat_kw("nil") {
            return Ok(ProgramSrc::Nil);
        }
        if matches!(self.peek(), Tok::Ident(_)) {
            return Ok(ProgramSrc::Action(self.atom_ref()?, pos));
        }
        self.error("program")
    }

    /// Precedence from loosest: `U` (right-associative), `|`, `&`, unary.
    pub fn mtl(&mut self) -> PResult<Mtl<AtomRef>> {
        let lhs = self.mtl_or()?;
        if self.eat_kw("U") {
            let i = self.interval()?;
            return Ok(Mtl::until(i, lhs, self.mtl()?));
        }
        Ok(lhs)
    }

    fn mtl_or(&mut self) -> PResult<Mtl<AtomRef>> {
        let mut f = self.mtl_and()?;
        while self.eat(&Tok::Pipe) {
            f = Mtl::or(f, self.mtl_and()?);
        }
        Ok(f)
    }

    fn mtl_and(&mut self) -> PResult<Mtl<AtomRef>> {
        let mut f = self.mtl_unary()?;
        while self.eat(&Tok::Amp) {
            f = Mtl::and(f, self.mtl_unary()?);
        }
        Ok(f)
    }

    fn mtl_unary(&mut self) -> PResult<Mtl<AtomRef>> {
        if self.eat(&Tok::Bang) {
            return Ok(Mtl::not(self.mtl_unary()?));
        }
        if self.eat_kw("F") {
            let i = self.interval()?;
            return Ok(Mtl::eventually(i, self.mtl_unary()?));
        }
        if self.eat_kw("G") {
            let i = self.interval()?;
            return Ok(Mtl::always(i, self.mtl_unary()?));
        }
        if self.eat(&Tok::LParen) {
            let f = self.mtl()?;
            self.expect(Tok::RParen)?;
            return Ok(f);
        }
        if self.eat_kw("true") {
            return Ok(Mtl::True);
        }
        if self.eat_kw("false") {
            return Ok(Mtl::False);
        }
        if self.is_kw("U") {
            return self.error("formula before `U`");
        }
        if !matches!(self.peek(), Tok::Ident(_)) {
            return self.error("temporal formula");
        }
        Ok(Mtl::Atom(self.atom_ref()?))
    }

    /// Optional interval after `U`, `F` or `G`; absent means `[0,inf)`.
    fn interval(&mut self) -> PResult<Interval> {
        let pos = self.pos();
        let iv = match self.peek() {
            Tok::LBracket => self.bracket_interval()?,
            Tok::LParen if matches!(self.peek_at(1), Tok::Num(_)) => self.bracket_interval()?,
            Tok::Le | Tok::Lt => {
                let closed = self.bump() == Tok::Le;
                let hi = self.number()?;
                Interval { lo: Rational64::zero(), lo_closed: true, hi: Some(hi), hi_closed: closed }
            }
            Tok::Ge | Tok::Gt => {
                let closed = self.bump() == Tok::Ge;
                let lo = self.number()?;
                Interval { lo, lo_closed: closed, hi: None, hi_closed: false }
            }
            _ => return Ok(Interval::full()),
        };
        if iv.lo < Rational64::zero() {
            return Err(ParseError::new(pos, "interval bounds must be non-negative"));
        }
        if let Some(hi) = iv.hi {
            if hi < iv.lo || (hi == iv.lo && !(iv.lo_closed && iv.hi_closed)) {
                return Err(ParseError::new(pos, "empty interval"));
            }
        }
        Ok(iv)
    }

    fn bracket_interval(&mut self) -> PResult<Interval> {
        let lo_closed = self.bump() == Tok::LBracket;
        let lo = self.number()?;
        self.expect(Tok::Comma)?;
        let hi = if self.eat_kw("inf") { None } else { Some(self.number()?) };
        let hi_closed = match self.bump() {
            Tok::RBracket if hi.is_some() => true,
            Tok::RBracket => return Err(ParseError::new(self.pos(), "an infinite upper bound must be open")),
            Tok::RParen => false,
            _ => return self.error("`]` or `)`"),
        };
        Ok(Interval { lo, lo_closed, hi, hi_closed })
    }

    /// `t: {atom, ...}` lines.
    pub fn timed_word(&mut self) -> PResult<Vec<(Vec<AtomRef>, Rational64)>> {
        let mut out = Vec::new();
        while self.peek() != &Tok::Eof {
            let t = self.number()?;
            self.expect(Tok::Colon)?;
            self.expect(Tok::LBrace)?;
            let mut atoms = Vec::new();
            if !self.eat(&Tok::RBrace) {
                loop {
                    atoms.push(self.atom_ref()?);
                    if self.eat(&Tok::RBrace) {
                        break;
                    }
                    self.expect(Tok::Comma)?;
                }
            }
            out.push((atoms, t));
        }
        Ok(out)
    }

    /// `t: action(args)` lines.
    pub fn action_trace(&mut self) -> PResult<Vec<(AtomRef, Rational64, Pos)>> {
        let mut out = Vec::new();
        while self.peek() != &Tok::Eof {
            let pos = self.pos();
            let t = self.number()?;
            self.expect(Tok::Colon)?;
            out.push((self.atom_ref()?, t, pos));
        }
        Ok(out)
    }
}
