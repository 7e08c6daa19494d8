use num_rational::Rational64;

use crate::ata::Ata;
use crate::dsl::{self, SourceSpec};
use crate::error::{invalid, Result};
use crate::ground::{ground, ground_name, ActionId, GroundLimits, GroundTheory};
use crate::mtl::Mtl;
use crate::program::ProgramExpr;

/// A grounded synthesis problem.
#[derive(Debug, Clone)]
pub struct Problem {
    pub source: SourceSpec,
    pub theory: GroundTheory,
    pub program: ProgramExpr,
    /// Undesired behaviour over atom indices, time constants scaled.
    pub bad: Mtl<usize>,
    pub ata: Ata<usize>,
}

impl Problem {
    pub fn from_source(src: &str) -> Result<Self> {
        Self::with_limits(src, GroundLimits::default())
    }

    pub fn with_limits(src: &str, limits: GroundLimits) -> Result<Self> {
        let source = dsl::parse_spec(src)?;
        let (theory, program, bad) = ground(&source, limits)?;
        let ata = Ata::build(&bad);
        Ok(Problem { source, theory, program, bad, ata })
    }

    /// Reads `t: action(args)` lines into a timed action sequence in scaled
    /// time.
    pub fn parse_trace(&self, text: &str) -> Result<Vec<(ActionId, Rational64)>> {
        let mut out = Vec::new();
        for (r, t, pos) in dsl::parse_action_trace(text)? {
            let name = ground_name(&r.name, &r.args);
            let a = self.theory.action_id(&name).ok_or_else(|| invalid(format!("{pos}: unknown action `{name}`")))?;
            out.push((a, t * Rational64::from_integer(self.theory.scale)));
        }
        Ok(out)
    }

    /// Truth of the bad formula on the fluent trace of `trace`, by the
    /// formula checker and by the automaton.
    pub fn check_trace(&self, trace: &[(ActionId, Rational64)]) -> Result<(bool, bool)> {
        let word = crate::mtl::fluent_trace(&self.theory, trace)?;
        Ok((crate::mtl::check(&word, &self.bad, 0)?, self.ata.accepts(&word)))
    }
}
