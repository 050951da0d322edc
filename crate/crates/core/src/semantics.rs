//! Classical models, reducts, SE models and answer sets.
//!
//! Interpretations are bit masks over a [`Vocabulary`]. An SE set stores one
//! bit per pair `(X, Y)` at index `Y << n | X`, so set algebra is word-wise.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::program::{Program, Rule, Vocabulary};

/// Set of SE interpretations `(X, Y)`, `X ⊆ Y`, over a fixed vocabulary.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SeSet {
    vocab: Vocabulary,
    bits: Vec<u64>,
}

impl SeSet {
    pub fn empty(vocab: &Vocabulary) -> Result<SeSet> {
        vocab.check_enumerable()?;
        let slots = 1usize << (2 * vocab.len());
        Ok(SeSet {
            vocab: vocab.clone(),
            bits: vec![0; slots.div_ceil(64)],
        })
    }

    /// Every SE interpretation over the vocabulary.
    pub fn full(vocab: &Vocabulary) -> Result<SeSet> {
        let mut s = SeSet::empty(vocab)?;
        for y in 0..=vocab.full_mask() {
            for x in submasks(y) {
                s.insert(x, y);
            }
        }
        Ok(s)
    }

    pub fn from_pairs<I: IntoIterator<Item = (u32, u32)>>(
        vocab: &Vocabulary,
        pairs: I,
    ) -> Result<SeSet> {
        let mut s = SeSet::empty(vocab)?;
        for (x, y) in pairs {
            if x & !y != 0 || y > vocab.full_mask() {
                return Err(Error::Invalid(format!(
                    "({},{}) is not an SE interpretation",
                    vocab.render(x),
                    vocab.render(y)
                )));
            }
            s.insert(x, y);
        }
        Ok(s)
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    fn index(&self, x: u32, y: u32) -> usize {
        ((y as usize) << self.vocab.len()) | x as usize
    }

    pub fn insert(&mut self, x: u32, y: u32) {
        debug_assert_eq!(x & !y, 0);
        let i = self.index(x, y);
        self.bits[i / 64] |= 1 << (i % 64);
    }

    pub fn remove(&mut self, x: u32, y: u32) {
        let i = self.index(x, y);
        self.bits[i / 64] &= !(1 << (i % 64));
    }

    pub fn contains(&self, x: u32, y: u32) -> bool {
        let i = self.index(x, y);
        self.bits[i / 64] & (1 << (i % 64)) != 0
    }

    /// Pairs in index order (by `Y`, then `X`).
    pub fn iter(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        let n = self.vocab.len();
        let low = (1usize << n) - 1;
        self.bits.iter().enumerate().flat_map(move |(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let b = word.trailing_zeros() as usize;
                word &= word - 1;
                let i = w * 64 + b;
                Some(((i & low) as u32, (i >> n) as u32))
            })
        })
    }

    pub fn len(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    fn check_same(&self, other: &SeSet) {
        assert_eq!(
            self.vocab, other.vocab,
            "SE sets over different vocabularies"
        );
    }

    pub fn intersection(&self, other: &SeSet) -> SeSet {
        self.zip(other, |a, b| a & b)
    }

    pub fn union(&self, other: &SeSet) -> SeSet {
        self.zip(other, |a, b| a | b)
    }

    pub fn difference(&self, other: &SeSet) -> SeSet {
        self.zip(other, |a, b| a & !b)
    }

    fn zip(&self, other: &SeSet, f: impl Fn(u64, u64) -> u64) -> SeSet {
        self.check_same(other);
        SeSet {
            vocab: self.vocab.clone(),
            bits: self
                .bits
                .iter()
                .zip(&other.bits)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    pub fn intersect_with(&mut self, other: &SeSet) {
        self.check_same(other);
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a &= b;
        }
    }

    /// `S̄`, taken against all SE interpretations over the vocabulary.
    pub fn complement(&self) -> SeSet {
        let full = SeSet::full(&self.vocab).expect("vocabulary already checked");
        full.difference(self)
    }

    pub fn is_subset(&self, other: &SeSet) -> bool {
        self.check_same(other);
        self.bits
            .iter()
            .zip(&other.bits)
            .all(|(&a, &b)| a & !b == 0)
    }

    pub fn intersects(&self, other: &SeSet) -> bool {
        self.check_same(other);
        self.bits.iter().zip(&other.bits).any(|(&a, &b)| a & b != 0)
    }

    /// Whether `self ∩ other ⊆ target`, without allocating.
    pub fn meet_within(&self, other: &SeSet, target: &SeSet) -> bool {
        self.check_same(other);
        self.check_same(target);
        self.bits
            .iter()
            .zip(&other.bits)
            .zip(&target.bits)
            .all(|((&a, &b), &t)| a & b & !t == 0)
    }

    /// Whether `self ∩ other ∩ third ≠ ∅`, without allocating.
    pub fn meets_both(&self, other: &SeSet, third: &SeSet) -> bool {
        self.check_same(other);
        self.check_same(third);
        self.bits
            .iter()
            .zip(&other.bits)
            .zip(&third.bits)
            .any(|((&a, &b), &c)| a & b & c != 0)
    }

    pub fn is_full(&self) -> bool {
        *self == SeSet::full(&self.vocab).expect("vocabulary already checked")
    }

    /// `(X,Y) ∈ S` implies `(Y,Y) ∈ S`.
    pub fn is_well_defined(&self) -> bool {
        self.first_ill_defined().is_none()
    }

    fn first_ill_defined(&self) -> Option<(u32, u32)> {
        self.iter().find(|&(_, y)| !self.contains(y, y))
    }

    /// The `Y` with `(Y,Y)` in the set.
    pub fn totals(&self) -> Vec<u32> {
        self.iter()
            .filter(|&(x, y)| x == y)
            .map(|(_, y)| y)
            .collect()
    }

    /// Same members re-expressed over a larger vocabulary.
    pub fn extend_to(&self, vocab: &Vocabulary) -> Result<SeSet> {
        if !self.vocab.is_subset(vocab) {
            return Err(Error::VocabularyMismatch);
        }
        let map = |m: u32| -> u32 {
            self.vocab
                .atoms_in(m)
                .iter()
                .map(|a| 1 << vocab.index_of(a).expect("subset checked"))
                .sum()
        };
        let extra = vocab.full_mask() & !map(self.vocab.full_mask());
        let mut out = SeSet::empty(vocab)?;
        for (x, y) in self.iter() {
            let (x, y) = (map(x), map(y));
            for ey in submasks(extra) {
                for ex in submasks(ey) {
                    out.insert(x | ex, y | ey);
                }
            }
        }
        Ok(out)
    }

    /// Members rendered as `(here, there)` atom lists, sorted.
    pub fn rendered(&self) -> Vec<(String, String)> {
        let mut out: Vec<_> = self
            .iter()
            .map(|(x, y)| (self.vocab.render(x), self.vocab.render(y)))
            .collect();
        out.sort();
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&SeSetJson::from(self)).expect("plain data serializes")
    }

    pub fn from_json(text: &str) -> Result<SeSet> {
        let parsed: SeSetJson =
            serde_json::from_str(text).map_err(|e| Error::Invalid(e.to_string()))?;
        parsed.try_into()
    }
}

/// Paper-style rendering: `{(,),(,b),(b,b)}` with atoms concatenated by `,`.
impl fmt::Display for SeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self
            .rendered()
            .into_iter()
            .map(|(x, y)| format!("({},{})", braces(&x), braces(&y)))
            .collect();
        write!(f, "{{{}}}", items.join(", "))
    }
}

fn braces(s: &str) -> String {
    if s.is_empty() {
        "∅".to_string()
    } else {
        s.replace(',', "")
    }
}

/// Serialized form of an [`SeSet`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeSetJson {
    pub vocab: Vec<String>,
    pub models: Vec<[String; 2]>,
}

impl From<&SeSet> for SeSetJson {
    fn from(s: &SeSet) -> Self {
        SeSetJson {
            vocab: s.vocab.atoms().to_vec(),
            models: s.rendered().into_iter().map(|(x, y)| [x, y]).collect(),
        }
    }
}

impl TryFrom<SeSetJson> for SeSet {
    type Error = Error;

    fn try_from(j: SeSetJson) -> Result<SeSet> {
        let vocab = Vocabulary::new(j.vocab);
        let mut pairs = Vec::new();
        for [x, y] in &j.models {
            pairs.push((
                vocab.parse_interpretation(x)?,
                vocab.parse_interpretation(y)?,
            ));
        }
        SeSet::from_pairs(&vocab, pairs)
    }
}

/// All submasks of `mask`, from `mask` down to 0.
pub fn submasks(mask: u32) -> impl Iterator<Item = u32> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            Some((cur - 1) & mask)
        };
        Some(cur)
    })
}

/// A rule compiled to masks over a vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct RuleBits {
    hp: u32,
    hn: u32,
    bp: u32,
    bn: u32,
}

impl RuleBits {
    pub(crate) fn compile(rule: &Rule, vocab: &Vocabulary) -> Result<RuleBits> {
        Ok(RuleBits {
            hp: vocab.mask_of(rule.head_pos())?,
            hn: vocab.mask_of(rule.head_neg())?,
            bp: vocab.mask_of(rule.body_pos())?,
            bn: vocab.mask_of(rule.body_neg())?,
        })
    }

    /// `Y ⊨ r` read as `(B⁺ ∧ ¬B⁻) → (∨H⁺ ∨ ∨¬H⁻)`.
    fn satisfied_by(self, y: u32) -> bool {
        let body = self.bp & !y == 0 && self.bn & y == 0;
        let head = self.hp & y != 0 || self.hn & !y != 0;
        !body || head
    }

    /// Whether the rule survives in the reduct relative to `y`.
    fn kept_in_reduct(self, y: u32) -> bool {
        self.hn & !y == 0 && self.bn & y == 0
    }

    /// `X ⊨ H⁺ ← B⁺`.
    fn positive_part_satisfied_by(self, x: u32) -> bool {
        self.bp & !x != 0 || self.hp & x != 0
    }
}

fn compile(program: &Program, vocab: &Vocabulary) -> Result<Vec<RuleBits>> {
    vocab.check_enumerable()?;
    program
        .iter()
        .map(|r| RuleBits::compile(r, vocab))
        .collect()
}

/// `P^Y`: `H⁺(r) ← B⁺(r)` for every rule with `H⁻(r) ⊆ Y` and `B⁻(r) ∩ Y = ∅`.
pub fn reduct(program: &Program, vocab: &Vocabulary, y: u32) -> Result<Program> {
    let mut out = Program::new();
    for rule in program {
        if RuleBits::compile(rule, vocab)?.kept_in_reduct(y) {
            let none: [String; 0] = [];
            out.insert(Rule::new(
                rule.head_pos().iter().cloned(),
                none.iter().cloned(),
                rule.body_pos().iter().cloned(),
                none.iter().cloned(),
            ));
        }
    }
    Ok(out)
}

/// All `Y ⊆ 𝒜` with `Y ⊨ P`, ascending by mask.
pub fn classical_models(program: &Program, vocab: &Vocabulary) -> Result<Vec<u32>> {
    let rules = compile(program, vocab)?;
    Ok((0..=vocab.full_mask())
        .filter(|&y| rules.iter().all(|r| r.satisfied_by(y)))
        .collect())
}

pub fn se_models(program: &Program, vocab: &Vocabulary) -> Result<SeSet> {
    let rules = compile(program, vocab)?;
    let mut out = SeSet::empty(vocab)?;
    for y in 0..=vocab.full_mask() {
        if !rules.iter().all(|r| r.satisfied_by(y)) {
            continue;
        }
        let reduct: Vec<RuleBits> = rules
            .iter()
            .copied()
            .filter(|r| r.kept_in_reduct(y))
            .collect();
        for x in submasks(y) {
            if reduct.iter().all(|r| r.positive_part_satisfied_by(x)) {
                out.insert(x, y);
            }
        }
    }
    Ok(out)
}

pub fn rule_se_models(rule: &Rule, vocab: &Vocabulary) -> Result<SeSet> {
    se_models(&std::iter::once(rule.clone()).collect(), vocab)
}

/// Answer sets read off the SE models: `(Y,Y)` present and no `(X,Y)` with `X ⊂ Y`.
pub fn answer_sets(program: &Program, vocab: &Vocabulary) -> Result<Vec<u32>> {
    let se = se_models(program, vocab)?;
    Ok(answer_sets_of(&se))
}

pub fn answer_sets_of(se: &SeSet) -> Vec<u32> {
    se.totals()
        .into_iter()
        .filter(|&y| submasks(y).skip(1).all(|x| !se.contains(x, y)))
        .collect()
}

/// Answer sets computed as the classical models that are subset-minimal
/// models of their own reduct.
pub fn answer_sets_via_reduct(program: &Program, vocab: &Vocabulary) -> Result<Vec<u32>> {
    let mut out = Vec::new();
    for y in classical_models(program, vocab)? {
        let positive = reduct(program, vocab, y)?;
        let models = classical_models(&positive, vocab)?;
        if models.contains(&y) && !models.iter().any(|&x| x != y && x & !y == 0) {
            out.push(y);
        }
    }
    Ok(out)
}

pub fn implies(p: &SeSet, q: &SeSet) -> bool {
    p.is_subset(q)
}

pub fn strongly_equivalent(p: &SeSet, q: &SeSet) -> bool {
    p == q
}

pub fn is_satisfiable(p: &SeSet) -> bool {
    !p.is_empty()
}

/// A program whose SE models are exactly `s`.
///
/// Emits `:- Y, not (𝒜∖Y).` for every `Y` with `(Y,Y) ∉ s`, and
/// `(Y∖X) ; not (Y∖X) :- X, not (𝒜∖Y).` for every `X ⊂ Y` with
/// `(Y,Y) ∈ s` and `(X,Y) ∉ s`.
pub fn canonical_program(s: &SeSet) -> Result<Program> {
    if let Some((x, y)) = s.first_ill_defined() {
        return Err(Error::NotWellDefined {
            here: s.vocab.render(x),
            there: s.vocab.render(y),
        });
    }
    let vocab = s.vocab();
    let names =
        |m: u32| -> Vec<String> { vocab.atoms_in(m).iter().map(|a| a.to_string()).collect() };
    let all = vocab.full_mask();
    let mut out = Program::new();
    for y in 0..=all {
        if !s.contains(y, y) {
            out.insert(Rule::constraint(names(y), names(all & !y)));
            continue;
        }
        for x in submasks(y).skip(1) {
            if !s.contains(x, y) {
                let gap = y & !x;
                out.insert(Rule::new(names(gap), names(gap), names(x), names(all & !y)));
            }
        }
    }
    Ok(out)
}

/// The second argument of a change operation: its SE models, and the
/// program itself when it was given as one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Operand {
    models: SeSet,
    program: Option<Program>,
}

impl Operand {
    pub fn from_program(program: &Program, vocab: &Vocabulary) -> Result<Operand> {
        Ok(Operand {
            models: se_models(program, vocab)?,
            program: Some(program.clone()),
        })
    }

    pub fn from_models(models: SeSet) -> Operand {
        Operand {
            models,
            program: None,
        }
    }

    pub fn models(&self) -> &SeSet {
        &self.models
    }

    pub fn program(&self) -> Option<&Program> {
        self.program.as_ref()
    }

    pub fn vocab(&self) -> &Vocabulary {
        self.models.vocab()
    }

    /// Rules added syntactically by revision; empty for raw SE sets.
    pub fn rules(&self) -> Program {
        self.program.clone().unwrap_or_default()
    }

    /// Operand for `Q̄`.
    pub fn complement(&self) -> Operand {
        Operand::from_models(self.models.complement())
    }
}
