//! Surface syntax for problems: declarations, formulas, programs and the
//! MTL specification. See `docs/dsl.md` for the grammar.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod print;
pub mod validate;

use num_rational::Rational64;

pub use ast::*;
use parser::Parser;

use crate::error::{ParseError, Pos};
use crate::mtl::Mtl;

/// Parses and validates a complete problem document.
pub fn parse_spec(src: &str) -> Result<SourceSpec, ParseError> {
    let mut p = Parser::new(src)?;
    let spec = p.spec()?;
    validate::validate(&spec)?;
    Ok(spec)
}

/// Parses a standalone temporal formula.
pub fn parse_mtl(src: &str) -> Result<Mtl<AtomRef>, ParseError> {
    let mut p = Parser::new(src)?;
    let f = p.mtl()?;
    p.expect_eof()?;
    Ok(f)
}

/// Parses a standalone program expression (no name resolution).
pub fn parse_program(src: &str) -> Result<ProgramSrc, ParseError> {
    let mut p = Parser::new(src)?;
    let prog = p.program()?;
    p.expect_eof()?;
    Ok(prog)
}

/// Parses a static formula (no name resolution).
pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(src)?;
    let f = p.formula()?;
    p.expect_eof()?;
    Ok(f)
}

/// Parses `t: {atom, ...}` lines.
pub fn parse_timed_word(src: &str) -> Result<Vec<(Vec<AtomRef>, Rational64)>, ParseError> {
    Parser::new(src)?.timed_word()
}

/// Parses `t: action(args)` lines.
pub fn parse_action_trace(src: &str) -> Result<Vec<(AtomRef, Rational64, Pos)>, ParseError> {
    Parser::new(src)?.action_trace()
}

#[cfg(test)]
mod tests;
