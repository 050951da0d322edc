//! Modules of a program around the atoms of a second program, and change
//! carried out module by module.

use std::collections::BTreeSet;
use std::fmt;

use crate::ensconcement::{Ensconcement, EnsconcementOperator};
use crate::error::{Error, Result};
use crate::operator::{ChangeOperator, Direction};
use crate::partial_meet::{PartialMeet, SelectionPolicy};
use crate::program::{Program, Rule};
use crate::semantics::{se_models, Operand};

/// The rules connected to `anchor_rule` through shared atoms other than
/// `anchor_atom`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProgramModule {
    pub anchor_rule: Rule,
    pub anchor_atom: String,
    pub rules: Program,
}

impl fmt::Display for ProgramModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{} @ {}] {{{}}}",
            self.anchor_rule,
            self.anchor_atom,
            self.rules.inline()
        )
    }
}

/// Least fixpoint of the atom-sharing closure around `rule`, never
/// propagating through `atom`.
pub fn extract_module(p: &Program, rule: &Rule, atom: &str) -> Result<ProgramModule> {
    if !p.contains(rule) {
        return Err(Error::RuleNotInProgram(rule.to_string()));
    }
    if !rule.atoms().contains(atom) {
        return Err(Error::Invalid(format!(
            "`{atom}` does not occur in `{rule}`"
        )));
    }
    let mut module: Program = [rule.clone()].into_iter().collect();
    loop {
        let mut reach: BTreeSet<&str> = module.atoms();
        reach.remove(atom);
        let next: Program = p
            .iter()
            .filter(|r| r == &rule || r.atoms().iter().any(|a| reach.contains(a)))
            .cloned()
            .collect();
        if next == module {
            break;
        }
        module = next;
    }
    Ok(ProgramModule {
        anchor_rule: rule.clone(),
        anchor_atom: atom.to_string(),
        rules: module,
    })
}

/// One module for every rule of `p` and every atom of that rule in
/// `atoms`, in rule then atom order, duplicates kept.
pub fn modules_for_atoms<'a>(
    p: &Program,
    atoms: impl IntoIterator<Item = &'a str>,
) -> Result<Vec<ProgramModule>> {
    let atoms: BTreeSet<&str> = atoms.into_iter().collect();
    let mut out = Vec::new();
    for rule in p {
        for atom in rule.atoms() {
            if atoms.contains(atom) {
                out.push(extract_module(p, rule, atom)?);
            }
        }
    }
    Ok(out)
}

/// Distinct module rule sets relevant to a second program, plus the rules
/// lying in none of them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModuleFamily {
    /// Sorted by single-line text; each entry lists every anchor producing it.
    pub modules: Vec<(Program, Vec<(Rule, String)>)>,
    pub residue: Program,
}

impl ModuleFamily {
    pub fn rule_sets(&self) -> Vec<Program> {
        self.modules.iter().map(|(m, _)| m.clone()).collect()
    }

    pub fn union(&self) -> Program {
        self.modules
            .iter()
            .fold(Program::new(), |acc, (m, _)| acc.union(m))
    }
}

impl fmt::Display for ModuleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (rules, anchors) in &self.modules {
            let names: Vec<String> = anchors.iter().map(|(r, a)| format!("{r} @ {a}")).collect();
            writeln!(f, "module {{{}}} from {}", rules.inline(), names.join(", "))?;
        }
        writeln!(f, "residue {{{}}}", self.residue.inline())
    }
}

/// Modules of `p` anchored at the atoms shared with `q_atoms`.
pub fn relevant_modules<'a>(
    p: &Program,
    q_atoms: impl IntoIterator<Item = &'a str>,
) -> Result<ModuleFamily> {
    let mut modules: Vec<(Program, Vec<(Rule, String)>)> = Vec::new();
    for m in modules_for_atoms(p, q_atoms)? {
        let anchor = (m.anchor_rule, m.anchor_atom);
        match modules.iter_mut().find(|(rules, _)| *rules == m.rules) {
            Some((_, anchors)) => anchors.push(anchor),
            None => modules.push((m.rules, vec![anchor])),
        }
    }
    modules.sort_by_key(|(rules, _)| rules.inline());
    let covered = modules
        .iter()
        .fold(Program::new(), |acc, (m, _)| acc.union(m));
    Ok(ModuleFamily {
        residue: p.difference(&covered),
        modules,
    })
}

/// Atoms of a change argument: its rules' atoms, or the whole vocabulary
/// for a raw SE set.
pub fn operand_atoms(q: &Operand) -> Vec<String> {
    match q.program() {
        Some(program) => program.atoms().into_iter().map(str::to_string).collect(),
        None => q.vocab().atoms().to_vec(),
    }
}

/// A change operator that can be applied to any part of the program it
/// was configured for.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LocalOperator {
    PartialMeet(PartialMeet),
    /// The ensconcement is restricted to each part before use.
    Ensconcement(EnsconcementOperator),
}

impl LocalOperator {
    pub fn partial_meet(direction: Direction, policy: SelectionPolicy) -> Self {
        LocalOperator::PartialMeet(PartialMeet { policy, direction })
    }

    pub fn ensconcement(direction: Direction, ensconcement: Ensconcement) -> Self {
        LocalOperator::Ensconcement(EnsconcementOperator {
            ensconcement,
            direction,
        })
    }

    pub fn direction(&self) -> Direction {
        match self {
            LocalOperator::PartialMeet(op) => op.direction,
            LocalOperator::Ensconcement(op) => op.direction,
        }
    }

    pub fn apply(&self, part: &Program, q: &Operand) -> Result<Program> {
        match self {
            LocalOperator::PartialMeet(op) => op.apply(part, q),
            LocalOperator::Ensconcement(op) => EnsconcementOperator {
                ensconcement: op.ensconcement.restrict(part),
                direction: op.direction,
            }
            .apply(part, q),
        }
    }
}

/// Resolves conflicts of every combination of modules with `q`, smallest
/// combinations first. Replacements are visible to later combinations;
/// members that became equal are merged after each combination size.
pub fn mod_change(modules: &[Program], op: &LocalOperator, q: &Operand) -> Result<Vec<Program>> {
    mod_change_with(modules, op.direction(), q, |part| op.apply(part, q))
}

/// [`mod_change`] with the change of a module union supplied by `change`,
/// which returns the full operator output (including `q` for revision).
pub fn mod_change_with(
    modules: &[Program],
    direction: Direction,
    q: &Operand,
    mut change: impl FnMut(&Program) -> Result<Program>,
) -> Result<Vec<Program>> {
    let mut family = collapse(modules.to_vec());
    let outside = q.models().complement();
    let mut n = 1;
    while n <= family.len() {
        for combo in combinations(family.len(), n) {
            let union = combo
                .iter()
                .fold(Program::new(), |acc, &i| acc.union(&family[i]));
            let models = se_models(&union, q.vocab())?;
            let replacement = match direction {
                Direction::Revision if !models.intersects(q.models()) => {
                    Some(change(&union)?.difference(&q.rules()))
                }
                Direction::Contraction if !models.intersects(&outside) => Some(change(&union)?),
                _ => None,
            };
            if let Some(changed) = replacement {
                for &i in &combo {
                    family[i] = changed.clone();
                }
            }
        }
        family = collapse(family);
        n += 1;
    }
    Ok(family)
}

fn collapse(mut family: Vec<Program>) -> Vec<Program> {
    family.sort_by_key(Program::inline);
    family.dedup();
    family
}

/// Index combinations of size `k` out of `n`, in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(current.clone());
        let Some(pos) = (0..k).rev().find(|&i| current[i] != i + n - k) else {
            return out;
        };
        current[pos] += 1;
        for j in pos + 1..k {
            current[j] = current[j - 1] + 1;
        }
    }
}

/// The residue, plus the changed modules, plus the rules of `q` for
/// revision.
pub fn localized_change(p: &Program, op: &LocalOperator, q: &Operand) -> Result<Program> {
    localized_change_with(p, op.direction(), q, |part| op.apply(part, q))
}

/// [`localized_change`] with a caller-supplied change of module unions.
pub fn localized_change_with(
    p: &Program,
    direction: Direction,
    q: &Operand,
    change: impl FnMut(&Program) -> Result<Program>,
) -> Result<Program> {
    let atoms = operand_atoms(q);
    let family = relevant_modules(p, atoms.iter().map(String::as_str))?;
    let changed = mod_change_with(&family.rule_sets(), direction, q, change)?;
    let mut out = changed
        .iter()
        .fold(family.residue.clone(), |acc, m| acc.union(m));
    if direction == Direction::Revision {
        out = out.union(&q.rules());
    }
    Ok(out)
}
