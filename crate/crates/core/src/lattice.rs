//! The subset lattice `2^P` of a program with the SE models of every subset
//! precomputed. Subsets are bit masks over the rules in canonical order.

use crate::error::{Error, Result};
use crate::program::{Program, Rule, Vocabulary};
use crate::semantics::{rule_se_models, SeSet};

/// Largest program whose subsets are enumerated.
pub const MAX_RULES: usize = 12;

#[derive(Debug, Clone)]
pub struct SubsetLattice {
    rules: Vec<Rule>,
    rule_models: Vec<SeSet>,
    models: Vec<SeSet>,
}

impl SubsetLattice {
    pub fn new(program: &Program, vocab: &Vocabulary) -> Result<SubsetLattice> {
        let rules: Vec<Rule> = program.iter().cloned().collect();
        if rules.len() > MAX_RULES {
            return Err(Error::ProgramTooLarge {
                size: rules.len(),
                max: MAX_RULES,
            });
        }
        let rule_models = rules
            .iter()
            .map(|r| rule_se_models(r, vocab))
            .collect::<Result<Vec<_>>>()?;
        Self::from_parts(rules, rule_models, vocab)
    }

    /// Builds the lattice from rules with already known SE models; the
    /// rules must be in canonical order.
    pub fn from_parts(
        rules: Vec<Rule>,
        rule_models: Vec<SeSet>,
        vocab: &Vocabulary,
    ) -> Result<SubsetLattice> {
        debug_assert!(rules.windows(2).all(|w| w[0] < w[1]));
        let n = rules.len();
        let mut models = Vec::with_capacity(1 << n);
        models.push(SeSet::full(vocab)?);
        for mask in 1usize..(1 << n) {
            let low = mask.trailing_zeros() as usize;
            let rest = mask & (mask - 1);
            let m = models[rest].intersection(&rule_models[low]);
            models.push(m);
        }
        Ok(SubsetLattice {
            rules,
            rule_models,
            models,
        })
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn vocab(&self) -> &Vocabulary {
        self.models[0].vocab()
    }

    pub fn full_mask(&self) -> u32 {
        ((1u64 << self.rules.len()) - 1) as u32
    }

    /// SE models of the subset `mask`.
    pub fn models(&self, mask: u32) -> &SeSet {
        &self.models[mask as usize]
    }

    pub fn rule_models(&self, i: usize) -> &SeSet {
        &self.rule_models[i]
    }

    pub fn program(&self, mask: u32) -> Program {
        self.rules
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, r)| r.clone())
            .collect()
    }

    pub fn index_of(&self, rule: &Rule) -> Option<usize> {
        self.rules.binary_search(rule).ok()
    }

    pub fn mask_of(&self, program: &Program) -> Result<u32> {
        let mut mask = 0;
        for rule in program {
            let i = self
                .index_of(rule)
                .ok_or_else(|| Error::RuleNotInProgram(rule.to_string()))?;
            mask |= 1 << i;
        }
        Ok(mask)
    }

    /// The ⊆-maximal subsets whose SE models meet `target`, in ascending
    /// mask order.
    pub fn maximal_meeting(&self, target: &SeSet) -> Vec<u32> {
        let mut by_size: Vec<u32> = (0..=self.full_mask())
            .filter(|&m| self.models(m).intersects(target))
            .collect();
        by_size.sort_by_key(|m| std::cmp::Reverse(m.count_ones()));
        let mut out: Vec<u32> = Vec::new();
        for m in by_size {
            if !out.iter().any(|&big| m & !big == 0) {
                out.push(m);
            }
        }
        out.sort_unstable();
        out
    }
}

/// Iterates the set bits of `mask` as indices.
pub fn bits(mask: u32) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let i = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(i)
    })
}
