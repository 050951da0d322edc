//! Common interface of the rule-based change operators, used by the
//! localized change algorithm and the postulate harness.

use crate::error::Result;
use crate::lattice::SubsetLattice;
use crate::program::{Program, Vocabulary};
use crate::semantics::{Operand, SeSet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Revision,
    Contraction,
}

pub trait ChangeOperator {
    fn direction(&self) -> Direction;

    /// The subset of the lattice's program that survives a change by a
    /// second argument with SE models `models`.
    fn kept(&self, lattice: &SubsetLattice, models: &SeSet) -> Result<u32>;

    /// Changes `p` by `q`. Revision adds the rules of `q` when it was given
    /// as a program.
    fn apply(&self, p: &Program, q: &Operand) -> Result<Program> {
        let lattice = SubsetLattice::new(p, q.vocab())?;
        let kept = lattice.program(self.kept(&lattice, q.models())?);
        Ok(match self.direction() {
            Direction::Revision => kept.union(&q.rules()),
            Direction::Contraction => kept,
        })
    }
}

/// Vocabulary spanning all programs plus an optional declared one.
pub fn joint_vocabulary(programs: &[&Program], declared: Option<&Vocabulary>) -> Vocabulary {
    let mut v = declared.cloned().unwrap_or_default();
    for p in programs {
        v = v.union(&p.vocabulary());
    }
    v
}
