//! Syntax-preserving revision and contraction of generalized logic programs
//! under SE-model semantics.

pub mod baselines;
pub mod ensconcement;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod localization;
pub mod operator;
pub mod partial_meet;
pub mod program;
pub mod semantics;

pub use error::{Error, Result};
pub use operator::{joint_vocabulary, ChangeOperator, Direction};
pub use partial_meet::{pm_contract, pm_revise, PartialMeet, SelectionPolicy};
pub use program::{parse_program, parse_rule, print_program, Program, Rule, Vocabulary};
pub use semantics::{canonical_program, se_models, Operand, SeSet};
