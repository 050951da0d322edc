//! Ensconcements over rules and over subsets, cuts, and the ensconcement
//! revision and contraction operators.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::lattice::{bits, SubsetLattice};
use crate::operator::{ChangeOperator, Direction};
use crate::program::{parse_rule, Program, Rule, Vocabulary};
use crate::semantics::{Operand, SeSet};

/// Largest program whose subset ensconcements are validated exhaustively.
pub const MAX_SUBSET_VALIDATION: usize = 6;

/// A total preorder on the rules of a program, stored as levels from least
/// to most ensconced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ensconcement {
    levels: Vec<Program>,
}

/// A failed validity condition, naming the rules involved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// The rules at least as ensconced as `rule` strictly imply it.
    StrictImplication { rule: Rule, above: Program },
    /// Strongly equivalent rules sit on different levels.
    SplitEquivalents { lower: Rule, upper: Rule },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::StrictImplication { rule, above } => write!(
                f,
                "`{rule}` is strictly implied by the rules at or above its level: {}",
                above.inline()
            ),
            Violation::SplitEquivalents { lower, upper } => write!(
                f,
                "strongly equivalent rules `{lower}` and `{upper}` are on different levels"
            ),
        }
    }
}

impl Ensconcement {
    /// Builds an ensconcement from levels (least ensconced first) without
    /// checking the validity conditions. Levels must be non-empty and
    /// pairwise disjoint.
    pub fn unchecked(levels: Vec<Program>) -> Result<Ensconcement> {
        let mut seen = Program::new();
        for level in &levels {
            if level.is_empty() {
                return Err(Error::InvalidEnsconcement("empty level".into()));
            }
            for rule in level {
                if !seen.insert(rule.clone()) {
                    return Err(Error::InvalidEnsconcement(format!(
                        "`{rule}` appears on more than one level"
                    )));
                }
            }
        }
        Ok(Ensconcement { levels })
    }

    /// Builds and validates an ensconcement associated with `program`.
    pub fn new(
        program: &Program,
        levels: Vec<Program>,
        vocab: &Vocabulary,
    ) -> Result<Ensconcement> {
        let ens = Ensconcement::unchecked(levels)?;
        ens.check_program(program)?;
        let violations = ens.violations(vocab)?;
        if !violations.is_empty() {
            let text: Vec<String> = violations.iter().map(ToString::to_string).collect();
            return Err(Error::InvalidEnsconcement(text.join("; ")));
        }
        Ok(ens)
    }

    /// Parses the level file format: one level per line, least ensconced
    /// first, rules separated by ` | `. Blank lines and `%` comments are
    /// skipped. Every rule of `program` must be listed exactly once.
    pub fn parse(text: &str, program: &Program) -> Result<Ensconcement> {
        let mut levels = Vec::new();
        for line in text.lines() {
            let line = line.split('%').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut level = Program::new();
            for part in line.split(" | ") {
                let rule = parse_rule(part.trim())?;
                if !program.contains(&rule) {
                    return Err(Error::RuleNotInProgram(rule.to_string()));
                }
                level.insert(rule);
            }
            levels.push(level);
        }
        let ens = Ensconcement::unchecked(levels)?;
        ens.check_program(program)?;
        Ok(ens)
    }

    /// Level file text, least ensconced first.
    pub fn to_text(&self) -> String {
        self.levels
            .iter()
            .map(|level| {
                let rules: Vec<&str> = level.iter().map(Rule::text).collect();
                format!("{}\n", rules.join(" | "))
            })
            .collect()
    }

    /// Single level holding every rule.
    pub fn flat(program: &Program) -> Ensconcement {
        let levels = if program.is_empty() {
            Vec::new()
        } else {
            vec![program.clone()]
        };
        Ensconcement { levels }
    }

    pub fn levels(&self) -> &[Program] {
        &self.levels
    }

    pub fn program(&self) -> Program {
        self.levels.iter().flatten().cloned().collect()
    }

    /// Position of the level holding `rule`, 0 being least ensconced.
    pub fn level_of(&self, rule: &Rule) -> Option<usize> {
        self.levels.iter().position(|l| l.contains(rule))
    }

    fn check_program(&self, program: &Program) -> Result<()> {
        let listed = self.program();
        if let Some(missing) = program.difference(&listed).iter().next() {
            return Err(Error::InvalidEnsconcement(format!(
                "`{missing}` is not ranked"
            )));
        }
        if let Some(extra) = listed.difference(program).iter().next() {
            return Err(Error::RuleNotInProgram(extra.to_string()));
        }
        Ok(())
    }

    /// Rank of every lattice rule, in lattice order.
    pub fn ranks(&self, lattice: &SubsetLattice) -> Result<Vec<usize>> {
        if lattice.len() != self.levels.iter().map(Program::len).sum::<usize>() {
            return Err(Error::InvalidEnsconcement(
                "ensconcement is not associated with the program".into(),
            ));
        }
        lattice
            .rules()
            .iter()
            .map(|r| {
                self.level_of(r)
                    .ok_or_else(|| Error::InvalidEnsconcement(format!("`{r}` is not ranked")))
            })
            .collect()
    }

    /// Every failed validity condition, in rule order.
    pub fn violations(&self, vocab: &Vocabulary) -> Result<Vec<Violation>> {
        let lattice = SubsetLattice::new(&self.program(), vocab)?;
        let ranks = self.ranks(&lattice)?;
        Ok(violations_on(&lattice, &ranks))
    }

    pub fn is_valid(&self, vocab: &Vocabulary) -> Result<bool> {
        Ok(self.violations(vocab)?.is_empty())
    }

    /// Removes the rules outside `keep`, dropping emptied levels.
    pub fn restrict(&self, keep: &Program) -> Ensconcement {
        let levels = self
            .levels
            .iter()
            .map(|l| l.intersection(keep))
            .filter(|l| !l.is_empty())
            .collect();
        Ensconcement { levels }
    }

    /// Levels from a rank vector over the lattice rules (rank 0 least ensconced).
    pub fn from_ranks(lattice: &SubsetLattice, ranks: &[usize]) -> Ensconcement {
        let mut by_rank: BTreeMap<usize, Program> = BTreeMap::new();
        for (i, rule) in lattice.rules().iter().enumerate() {
            by_rank.entry(ranks[i]).or_default().insert(rule.clone());
        }
        Ensconcement {
            levels: by_rank.into_values().collect(),
        }
    }
}

impl fmt::Display for Ensconcement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

/// Rules at least as ensconced as rank `k`.
fn upper_mask(ranks: &[usize], k: usize) -> u32 {
    ranks
        .iter()
        .enumerate()
        .filter(|(_, &r)| r >= k)
        .fold(0, |m, (i, _)| m | (1 << i))
}

fn violations_on(lattice: &SubsetLattice, ranks: &[usize]) -> Vec<Violation> {
    let mut out = Vec::new();
    for i in 0..lattice.len() {
        let above = upper_mask(ranks, ranks[i]) & !(1 << i);
        if strictly_implies(lattice.models(above), lattice.rule_models(i)) {
            out.push(Violation::StrictImplication {
                rule: lattice.rules()[i].clone(),
                above: lattice.program(above),
            });
        }
    }
    for i in 0..lattice.len() {
        for j in 0..lattice.len() {
            if ranks[i] < ranks[j] && lattice.rule_models(i) == lattice.rule_models(j) {
                out.push(Violation::SplitEquivalents {
                    lower: lattice.rules()[i].clone(),
                    upper: lattice.rules()[j].clone(),
                });
            }
        }
    }
    out
}

fn strictly_implies(a: &SeSet, b: &SeSet) -> bool {
    a.is_subset(b) && a != b
}

/// Rules whose upper set meets `target`.
pub fn cut_mask(lattice: &SubsetLattice, ranks: &[usize], target: &SeSet) -> u32 {
    (0..lattice.len())
        .filter(|&i| {
            lattice
                .models(upper_mask(ranks, ranks[i]))
                .intersects(target)
        })
        .fold(0, |m, i| m | (1 << i))
}

/// Kept rules for a change whose relevant models are `target` (`SE(Q)` for
/// revision, its complement for contraction): everything when `target` is
/// empty, otherwise the rules containing every model shared by the cut and
/// `target`.
pub fn kept_mask(lattice: &SubsetLattice, ranks: &[usize], target: &SeSet) -> u32 {
    if target.is_empty() {
        return lattice.full_mask();
    }
    let cut = lattice.models(cut_mask(lattice, ranks, target));
    (0..lattice.len())
        .filter(|&i| cut.meet_within(target, lattice.rule_models(i)))
        .fold(0, |m, i| m | (1 << i))
}

fn target_for(direction: Direction, models: &SeSet) -> SeSet {
    match direction {
        Direction::Revision => models.clone(),
        Direction::Contraction => models.complement(),
    }
}

/// The rules of `p` whose upper sets are consistent with `q`.
pub fn cut(p: &Program, ens: &Ensconcement, q: &Operand) -> Result<Program> {
    let lattice = SubsetLattice::new(p, q.vocab())?;
    let ranks = ens.ranks(&lattice)?;
    Ok(lattice.program(cut_mask(&lattice, &ranks, q.models())))
}

/// The rules of `p` whose upper sets are consistent with the complement of
/// `q`'s models.
pub fn cut_minus(p: &Program, ens: &Ensconcement, q: &Operand) -> Result<Program> {
    let lattice = SubsetLattice::new(p, q.vocab())?;
    let ranks = ens.ranks(&lattice)?;
    Ok(lattice.program(cut_mask(&lattice, &ranks, &q.models().complement())))
}

pub fn ens_revise(p: &Program, ens: &Ensconcement, q: &Operand) -> Result<Program> {
    EnsconcementOperator::revision(ens.clone()).apply(p, q)
}

pub fn ens_contract(p: &Program, ens: &Ensconcement, q: &Operand) -> Result<Program> {
    EnsconcementOperator::contraction(ens.clone()).apply(p, q)
}

/// Ensconcement operator bound to one ensconcement.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnsconcementOperator {
    pub ensconcement: Ensconcement,
    pub direction: Direction,
}

impl EnsconcementOperator {
    pub fn revision(ensconcement: Ensconcement) -> Self {
        EnsconcementOperator {
            ensconcement,
            direction: Direction::Revision,
        }
    }

    pub fn contraction(ensconcement: Ensconcement) -> Self {
        EnsconcementOperator {
            ensconcement,
            direction: Direction::Contraction,
        }
    }
}

impl ChangeOperator for EnsconcementOperator {
    fn direction(&self) -> Direction {
        self.direction
    }

    fn kept(&self, lattice: &SubsetLattice, models: &SeSet) -> Result<u32> {
        let ranks = self.ensconcement.ranks(lattice)?;
        Ok(kept_mask(
            lattice,
            &ranks,
            &target_for(self.direction, models),
        ))
    }
}

/// Every valid ensconcement of `program`, as rank vectors over the lattice
/// rules (rank 0 least ensconced), in a deterministic order.
pub fn all_rankings(lattice: &SubsetLattice) -> Vec<Vec<usize>> {
    let classes = equivalence_classes(lattice);
    let mut out = Vec::new();
    let mut stack: Vec<u32> = Vec::new();
    extend_rankings(lattice, &classes, 0, &mut stack, &mut out);
    out
}

/// Masks of the strong-equivalence classes of single rules.
fn equivalence_classes(lattice: &SubsetLattice) -> Vec<u32> {
    let mut classes: Vec<u32> = Vec::new();
    for i in 0..lattice.len() {
        match classes
            .iter_mut()
            .find(|c| lattice.rule_models(c.trailing_zeros() as usize) == lattice.rule_models(i))
        {
            Some(c) => *c |= 1 << i,
            None => classes.push(1 << i),
        }
    }
    classes
}

/// Whether `level` may sit directly below the rules in `above`.
fn level_fits(lattice: &SubsetLattice, above: u32, level: u32) -> bool {
    let upper = above | level;
    bits(level)
        .all(|i| !strictly_implies(lattice.models(upper & !(1 << i)), lattice.rule_models(i)))
}

/// Levels are chosen top-down; `stack` holds them most ensconced first.
fn extend_rankings(
    lattice: &SubsetLattice,
    classes: &[u32],
    placed: u32,
    stack: &mut Vec<u32>,
    out: &mut Vec<Vec<usize>>,
) {
    if placed == lattice.full_mask() {
        let mut ranks = vec![0; lattice.len()];
        for (depth, level) in stack.iter().enumerate() {
            for i in bits(*level) {
                ranks[i] = stack.len() - 1 - depth;
            }
        }
        out.push(ranks);
        return;
    }
    let free: Vec<u32> = classes
        .iter()
        .copied()
        .filter(|c| c & placed == 0)
        .collect();
    for choice in 1u32..(1 << free.len()) {
        let level = bits(choice).fold(0, |m, k| m | free[k]);
        if level_fits(lattice, placed, level) {
            stack.push(level);
            extend_rankings(lattice, classes, placed | level, stack, out);
            stack.pop();
        }
    }
}

/// Every valid ensconcement associated with `program`.
pub fn all_ensconcements(program: &Program, vocab: &Vocabulary) -> Result<Vec<Ensconcement>> {
    let lattice = SubsetLattice::new(program, vocab)?;
    Ok(all_rankings(&lattice)
        .iter()
        .map(|ranks| Ensconcement::from_ranks(&lattice, ranks))
        .collect())
}

/// A valid ensconcement with every rule of `discard` strictly below every
/// rule of `keep`, using as few levels as possible within each part.
pub fn ensconcement_from_partition(
    keep: &Program,
    discard: &Program,
    vocab: &Vocabulary,
) -> Result<Ensconcement> {
    if !keep.intersection(discard).is_empty() {
        return Err(Error::InvalidEnsconcement(
            "keep and discard overlap".into(),
        ));
    }
    let program = keep.union(discard);
    let lattice = SubsetLattice::new(&program, vocab)?;
    let keep_mask = lattice.mask_of(keep)?;
    let ranks = partition_ranks(&lattice, keep_mask).ok_or_else(|| {
        Error::InvalidEnsconcement(
            "no valid ensconcement places the discarded rules below the kept ones".into(),
        )
    })?;
    Ok(Ensconcement::from_ranks(&lattice, &ranks))
}

/// Rank vector for [`ensconcement_from_partition`] on lattice masks.
pub fn partition_ranks(lattice: &SubsetLattice, keep: u32) -> Option<Vec<usize>> {
    let classes = equivalence_classes(lattice);
    if classes.iter().any(|&c| c & keep != 0 && c & !keep != 0) {
        return None;
    }
    let top = fewest_levels(lattice, &classes, 0, keep)?;
    let bottom = fewest_levels(lattice, &classes, keep, lattice.full_mask())?;
    let mut ranks = vec![0; lattice.len()];
    let levels: Vec<u32> = top.into_iter().chain(bottom).collect();
    for (depth, level) in levels.iter().enumerate() {
        for i in bits(*level) {
            ranks[i] = levels.len() - 1 - depth;
        }
    }
    Some(ranks)
}

/// Fewest valid levels, most ensconced first, filling `goal ∖ start`
/// below the rules of `start`.
fn fewest_levels(
    lattice: &SubsetLattice,
    classes: &[u32],
    start: u32,
    goal: u32,
) -> Option<Vec<u32>> {
    let free: Vec<u32> = classes
        .iter()
        .copied()
        .filter(|c| c & goal != 0 && c & start == 0)
        .collect();
    let k = free.len();
    let full = (1usize << k) - 1;
    let to_mask = |choice: usize| bits(choice as u32).fold(0u32, |m, j| m | free[j]);
    // best[s]: fewest levels to place the classes outside s, given s placed.
    let mut best: Vec<Option<(usize, usize)>> = vec![None; 1 << k];
    best[full] = Some((0, 0));
    for placed in (0..full).rev() {
        let rest = full & !placed;
        let above = start | to_mask(placed);
        let mut sub = rest;
        while sub != 0 {
            if let Some((n, _)) = best[placed | sub] {
                if best[placed].is_none_or(|(m, _)| n + 1 < m)
                    && level_fits(lattice, above, to_mask(sub))
                {
                    best[placed] = Some((n + 1, sub));
                }
            }
            sub = (sub - 1) & rest;
        }
    }
    let mut levels = Vec::new();
    let mut placed = 0;
    while placed != full {
        let (_, sub) = best[placed]?;
        levels.push(to_mask(sub));
        placed |= sub;
    }
    Some(levels)
}

/// A total preorder on the subsets of a program, as a rank per subset mask
/// (higher is more ensconced).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubsetEnsconcement {
    rules: Vec<Rule>,
    ranks: Vec<usize>,
}

impl SubsetEnsconcement {
    /// Ranks each subset by its least ensconced rule; the empty subset goes
    /// above everything.
    pub fn lift(program: &Program, ens: &Ensconcement) -> Result<SubsetEnsconcement> {
        ens.check_program(program)?;
        let rules: Vec<Rule> = program.iter().cloned().collect();
        let rule_ranks: Vec<usize> = rules
            .iter()
            .map(|r| ens.level_of(r).expect("checked above"))
            .collect();
        Ok(Self::lift_ranks(rules, &rule_ranks))
    }

    fn lift_ranks(rules: Vec<Rule>, rule_ranks: &[usize]) -> SubsetEnsconcement {
        let top = rule_ranks.iter().max().map_or(0, |m| m + 1);
        let ranks = (0..1u32 << rules.len())
            .map(|mask| bits(mask).map(|i| rule_ranks[i]).min().unwrap_or(top))
            .collect();
        SubsetEnsconcement { rules, ranks }
    }

    /// Builds the preorder from levels of subsets, least ensconced first.
    /// Every subset of `program` must appear exactly once.
    pub fn from_levels(program: &Program, levels: &[Vec<Program>]) -> Result<SubsetEnsconcement> {
        let rules: Vec<Rule> = program.iter().cloned().collect();
        if rules.len() > crate::lattice::MAX_RULES {
            return Err(Error::ProgramTooLarge {
                size: rules.len(),
                max: crate::lattice::MAX_RULES,
            });
        }
        let mut ranks = vec![usize::MAX; 1 << rules.len()];
        for (rank, level) in levels.iter().enumerate() {
            for subset in level {
                let mask = mask_in(&rules, subset)?;
                if ranks[mask as usize] != usize::MAX {
                    return Err(Error::InvalidEnsconcement(format!(
                        "subset {{{}}} is ranked twice",
                        subset.inline()
                    )));
                }
                ranks[mask as usize] = rank;
            }
        }
        if let Some(mask) = ranks.iter().position(|&r| r == usize::MAX) {
            let missing: Program = bits(mask as u32).map(|i| rules[i].clone()).collect();
            return Err(Error::InvalidEnsconcement(format!(
                "subset {{{}}} is not ranked",
                missing.inline()
            )));
        }
        Ok(SubsetEnsconcement { rules, ranks })
    }

    /// Moves one subset to `rank`; ranks are compared numerically, higher
    /// meaning more ensconced.
    pub fn with_override(mut self, subset: &Program, rank: usize) -> Result<SubsetEnsconcement> {
        let mask = mask_in(&self.rules, subset)?;
        self.ranks[mask as usize] = rank;
        Ok(self)
    }

    pub fn rank_of(&self, subset: &Program) -> Result<usize> {
        Ok(self.ranks[mask_in(&self.rules, subset)? as usize])
    }

    pub fn program(&self) -> Program {
        self.rules.iter().cloned().collect()
    }

    /// Union of all subsets at least as ensconced as rank `k`.
    fn upper_union(&self, k: usize) -> u32 {
        self.ranks
            .iter()
            .enumerate()
            .filter(|(_, &r)| r >= k)
            .fold(0, |m, (mask, _)| m | mask as u32)
    }

    fn lattice(&self, vocab: &Vocabulary) -> Result<SubsetLattice> {
        SubsetLattice::new(&self.program(), vocab)
    }

    /// Failed validity conditions, described in words. Only programs of up
    /// to [`MAX_SUBSET_VALIDATION`] rules are checked.
    pub fn violations(&self, vocab: &Vocabulary) -> Result<Vec<String>> {
        if self.rules.len() > MAX_SUBSET_VALIDATION {
            return Err(Error::ProgramTooLarge {
                size: self.rules.len(),
                max: MAX_SUBSET_VALIDATION,
            });
        }
        let lattice = self.lattice(vocab)?;
        let mut out = Vec::new();
        for r in 0..self.ranks.len() as u32 {
            let above = self
                .ranks
                .iter()
                .enumerate()
                .filter(|&(m, &k)| m as u32 & r == 0 && k >= self.ranks[r as usize])
                .fold(0, |acc, (m, _)| acc | m as u32);
            if strictly_implies(lattice.models(above), lattice.models(r)) {
                out.push(format!(
                    "{{{}}} is strictly implied by the disjoint subsets at or above its level",
                    lattice.program(r).inline()
                ));
            }
        }
        for r in 0..self.ranks.len() as u32 {
            for s in r + 1..self.ranks.len() as u32 {
                let tied = self.ranks[r as usize] == self.ranks[s as usize];
                let equivalent = lattice.models(r) == lattice.models(s);
                if tied != equivalent {
                    out.push(format!(
                        "{{{}}} and {{{}}} are {} but {}",
                        lattice.program(r).inline(),
                        lattice.program(s).inline(),
                        if tied { "tied" } else { "on different levels" },
                        if equivalent {
                            "strongly equivalent"
                        } else {
                            "not strongly equivalent"
                        }
                    ));
                }
            }
        }
        Ok(out)
    }

    /// Kept rules (as a mask over the program's rules) for a change whose
    /// relevant models are `target`.
    pub fn kept_mask(&self, lattice: &SubsetLattice, target: &SeSet) -> u32 {
        if target.is_empty() {
            return lattice.full_mask();
        }
        let mut levels: Vec<usize> = self.ranks.clone();
        levels.sort_unstable();
        levels.dedup();
        let meeting: Vec<usize> = levels
            .into_iter()
            .filter(|&k| lattice.models(self.upper_union(k)).intersects(target))
            .collect();
        let cut = (0..self.ranks.len() as u32)
            .filter(|&r| meeting.contains(&self.ranks[r as usize]))
            .fold(0, |m, r| m | r);
        let shared = lattice.models(cut);
        (0..self.ranks.len() as u32)
            .filter(|&r| shared.meet_within(target, lattice.models(r)))
            .fold(0, |m, r| m | r)
    }

    fn change(&self, p: &Program, q: &Operand, direction: Direction) -> Result<Program> {
        if *p != self.program() {
            return Err(Error::InvalidEnsconcement(
                "subset ensconcement is not associated with the program".into(),
            ));
        }
        let lattice = SubsetLattice::new(p, q.vocab())?;
        let kept = lattice.program(self.kept_mask(&lattice, &target_for(direction, q.models())));
        Ok(match direction {
            Direction::Revision => kept.union(&q.rules()),
            Direction::Contraction => kept,
        })
    }

    pub fn revise(&self, p: &Program, q: &Operand) -> Result<Program> {
        self.change(p, q, Direction::Revision)
    }

    pub fn contract(&self, p: &Program, q: &Operand) -> Result<Program> {
        self.change(p, q, Direction::Contraction)
    }
}

/// Subset ensconcement lifted from rank vectors over lattice rules.
pub fn lift_ranks(lattice: &SubsetLattice, ranks: &[usize]) -> SubsetEnsconcement {
    SubsetEnsconcement::lift_ranks(lattice.rules().to_vec(), ranks)
}

fn mask_in(rules: &[Rule], subset: &Program) -> Result<u32> {
    let mut mask = 0;
    for rule in subset {
        let i = rules
            .binary_search(rule)
            .map_err(|_| Error::RuleNotInProgram(rule.to_string()))?;
        mask |= 1 << i;
    }
    Ok(mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::program::parse_program;

    fn prog(text: &str) -> Program {
        parse_program(text, None).unwrap().0
    }

    fn levels(spec: &[&str]) -> Vec<Program> {
        spec.iter().map(|t| prog(t)).collect()
    }

    fn example() -> (Program, Program, Vocabulary) {
        let p = prog("a. a :- b. b :- a.");
        let q = prog(":- b.");
        let v = Vocabulary::new(["a", "b"]);
        (p, q, v)
    }

    #[test]
    fn five_orderings_of_a_small_program() {
        let (p, q, v) = example();
        let qo = Operand::from_program(&q, &v).unwrap();
        let cases = [
            (
                &["a.", "a :- b.", "b :- a."][..],
                "a :- b. b :- a.",
                "a :- b. b :- a. :- b.",
            ),
            (
                &["a.", "a :- b. b :- a."][..],
                "a :- b. b :- a.",
                "a :- b. b :- a. :- b.",
            ),
            (
                &["a.", "b :- a.", "a :- b."][..],
                "a :- b. b :- a.",
                "a :- b. b :- a. :- b.",
            ),
            (&["a. b :- a.", "a :- b."][..], "a :- b.", "a :- b. :- b."),
            (
                &["b :- a.", "a.", "a :- b."][..],
                "a :- b. a.",
                "a :- b. a. :- b.",
            ),
        ];
        for (spec, want_cut, want_rev) in cases {
            let ens = Ensconcement::new(&p, levels(spec), &v).unwrap();
            assert_eq!(cut(&p, &ens, &qo).unwrap(), prog(want_cut), "{spec:?}");
            assert_eq!(
                ens_revise(&p, &ens, &qo).unwrap(),
                prog(want_rev),
                "{spec:?}"
            );
        }
    }

    #[test]
    fn strict_implication_on_one_level_is_rejected() {
        let p = prog("a. a :- b. a ; b.");
        let v = p.vocabulary();
        assert!(Ensconcement::new(&p, levels(&["a.", "a :- b. a ; b."]), &v).is_ok());
        let bad = Ensconcement::unchecked(levels(&["a. a :- b.", "a ; b."])).unwrap();
        let found = bad.violations(&v).unwrap();
        assert!(found.iter().any(|x| matches!(
            x,
            Violation::StrictImplication { rule, .. } if rule.text() == "a :- b."
        )));
        let flat = Ensconcement::flat(&prog("a. b. c."));
        assert!(flat.is_valid(&Vocabulary::new(["a", "b", "c"])).unwrap());
    }

    #[test]
    fn equivalent_rules_must_share_a_level() {
        let p = prog("a :- a. b :- b.");
        let v = p.vocabulary();
        let split = Ensconcement::unchecked(levels(&["a :- a.", "b :- b."])).unwrap();
        assert!(split
            .violations(&v)
            .unwrap()
            .iter()
            .any(|x| matches!(x, Violation::SplitEquivalents { .. })));
    }

    #[test]
    fn file_round_trip() {
        let (p, _, _) = example();
        let ens = Ensconcement::parse("% lowest first\na. | b :- a.\n\na :- b.\n", &p).unwrap();
        assert_eq!(ens.levels(), levels(&["a. b :- a.", "a :- b."]).as_slice());
        assert_eq!(Ensconcement::parse(&ens.to_text(), &p).unwrap(), ens);
        assert!(matches!(
            Ensconcement::parse("a.\nc.\n", &p),
            Err(Error::RuleNotInProgram(_))
        ));
        assert!(Ensconcement::parse("a.\n", &p).is_err());
    }

    #[test]
    fn cut_edge_cases() {
        let (p, _, v) = example();
        let ens = Ensconcement::new(&p, levels(&["a. b :- a.", "a :- b."]), &v).unwrap();
        let unsat = Operand::from_program(&prog("a. :- a."), &v).unwrap();
        assert!(cut(&p, &ens, &unsat).unwrap().is_empty());
        assert_eq!(
            ens_revise(&p, &ens, &unsat).unwrap(),
            p.union(&prog("a. :- a."))
        );
        let fine = Operand::from_program(&prog("b."), &v).unwrap();
        assert_eq!(cut(&p, &ens, &fine).unwrap(), p);
        let taut = Operand::from_program(&prog("a :- a."), &v).unwrap();
        assert!(cut_minus(&p, &ens, &taut).unwrap().is_empty());
        assert_eq!(ens_contract(&p, &ens, &taut).unwrap(), p);
        let weak = Operand::from_program(&prog(":- b."), &v).unwrap();
        assert_eq!(cut_minus(&p, &ens, &weak).unwrap(), p);
    }

    #[test]
    fn contraction_examples() {
        let p = prog("a. b :- a.");
        let v = Vocabulary::new(["a", "b"]);
        let q = Operand::from_program(&prog("a :- b."), &v).unwrap();
        let fact = parse_rule("a.").unwrap();
        let rule = parse_rule("b :- a.").unwrap();
        for ens in all_ensconcements(&p, &v).unwrap() {
            assert_eq!(ens_contract(&p, &ens, &q).unwrap(), prog("b :- a."));
            let above = ens.level_of(&rule) > ens.level_of(&fact);
            assert_eq!(cut_minus(&p, &ens, &q).unwrap().contains(&rule), above);
        }
        let a = prog("a.");
        let va = Vocabulary::new(["a"]);
        let qa = Operand::from_program(&a, &va).unwrap();
        assert!(ens_contract(&a, &Ensconcement::flat(&a), &qa)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn enumeration_finds_exactly_the_valid_orderings() {
        let (p, _, v) = example();
        let all = all_ensconcements(&p, &v).unwrap();
        let lattice = SubsetLattice::new(&p, &v).unwrap();
        let mut brute = 0;
        for ranks in (0..27usize).map(|n| vec![n % 3, n / 3 % 3, n / 9]) {
            let mut used: Vec<usize> = ranks.clone();
            used.sort_unstable();
            used.dedup();
            if used != (0..used.len()).collect::<Vec<_>>() {
                continue;
            }
            if violations_on(&lattice, &ranks).is_empty() {
                brute += 1;
                let ens = Ensconcement::from_ranks(&lattice, &ranks);
                assert!(all.contains(&ens));
            }
        }
        assert_eq!(all.len(), brute);
        assert!(all.iter().all(|e| e.is_valid(&v).unwrap()));
    }

    #[test]
    fn partition_places_discarded_rules_below() {
        let p = prog("a. b :- a.");
        let v = Vocabulary::new(["a", "b"]);
        let ens = ensconcement_from_partition(&prog("b :- a."), &prog("a."), &v).unwrap();
        assert_eq!(ens.levels(), levels(&["a.", "b :- a."]).as_slice());
        let q = Operand::from_program(&prog(":- a."), &v).unwrap();
        assert_eq!(ens_revise(&p, &ens, &q).unwrap(), prog("b :- a. :- a."));
        let single = ensconcement_from_partition(&prog("a. b."), &Program::new(), &v).unwrap();
        assert_eq!(single.levels().len(), 1);
        let implied = ensconcement_from_partition(&prog("a. a ; b."), &Program::new(), &v).unwrap();
        assert_eq!(implied.levels(), levels(&["a.", "a ; b."]).as_slice());
        assert!(ensconcement_from_partition(&prog("a :- a."), &prog("b :- b."), &v).is_err());
    }

    #[test]
    fn ensconcement_cannot_always_be_matched_by_selection() {
        let p = prog("a. b. c.");
        let v = Vocabulary::new(["a", "b", "c"]);
        let ens = Ensconcement::new(&p, levels(&["a. b.", "c."]), &v).unwrap();
        let q = Operand::from_program(&prog(":- a."), &v).unwrap();
        assert_eq!(cut(&p, &ens, &q).unwrap(), prog("c."));
        assert_eq!(ens_revise(&p, &ens, &q).unwrap(), prog("c. :- a."));
    }

    #[test]
    fn lifted_subset_ensconcement_agrees_with_rules() {
        let (p, _, v) = example();
        let queries = [
            "",
            ":- b.",
            ":- a.",
            "a. :- a.",
            "b.",
            "a :- a.",
            "a ; b.",
            ":- not a.",
        ];
        for ens in all_ensconcements(&p, &v).unwrap() {
            let lifted = SubsetEnsconcement::lift(&p, &ens).unwrap();
            for text in queries {
                let q = Operand::from_program(&prog(text), &v).unwrap();
                assert_eq!(
                    lifted.revise(&p, &q).unwrap(),
                    ens_revise(&p, &ens, &q).unwrap()
                );
                assert_eq!(
                    lifted.contract(&p, &q).unwrap(),
                    ens_contract(&p, &ens, &q).unwrap()
                );
            }
        }
    }

    #[test]
    fn subset_levels_and_overrides() {
        let p = prog("a. b.");
        let v = p.vocabulary();
        let levels = vec![
            vec![prog("a. b.")],
            vec![prog("a.")],
            vec![prog("b.")],
            vec![Program::new()],
        ];
        let sens = SubsetEnsconcement::from_levels(&p, &levels).unwrap();
        assert!(sens.violations(&v).unwrap().is_empty());
        assert_eq!(sens.rank_of(&prog("b.")).unwrap(), 2);
        let moved = sens.with_override(&prog("a."), 3).unwrap();
        assert!(!moved.violations(&v).unwrap().is_empty());
        assert!(SubsetEnsconcement::from_levels(&p, &levels[1..]).is_err());
    }
}
