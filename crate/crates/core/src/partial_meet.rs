//! Compatible sets, remainder sets, selection policies and the partial meet
//! revision and contraction operators.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use serde_json::Value;

use crate::error::{Error, Result};
use crate::lattice::SubsetLattice;
use crate::operator::{ChangeOperator, Direction};
use crate::program::{parse_program, Program};
use crate::semantics::{Operand, SeSet};

pub type Score = Ratio<i64>;

/// Scores for subsets of a program, keyed by their single-line canonical
/// text. Selection keeps the members with the highest score.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Relation {
    weights: BTreeMap<String, Score>,
    maximised: bool,
}

impl Relation {
    /// Subsets without an explicit weight score 0, or their size when the
    /// relation is declared maximised.
    pub fn new(weights: BTreeMap<String, Score>, maximised: bool) -> Result<Relation> {
        let mut normalized = BTreeMap::new();
        for (key, w) in weights {
            let (p, _) = parse_program(&key, None)
                .map_err(|e| Error::InvalidPolicy(format!("weight key `{key}`: {e}")))?;
            normalized.insert(p.inline(), w);
        }
        Ok(Relation {
            weights: normalized,
            maximised,
        })
    }

    /// Maximised relation ordering subsets by size alone.
    pub fn by_size() -> Relation {
        Relation {
            weights: BTreeMap::new(),
            maximised: true,
        }
    }

    /// Accepts `{"key": score, ...}` or
    /// `{"maximised": bool, "weights": {"key": score, ...}}`. Scores are
    /// integers, decimals or `"p/q"` strings.
    pub fn from_json(text: &str) -> Result<Relation> {
        let value: Value =
            serde_json::from_str(text).map_err(|e| Error::InvalidPolicy(e.to_string()))?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::InvalidPolicy("weights must be a JSON object".into()))?;
        let (map, maximised) = match obj.get("weights") {
            Some(Value::Object(w)) => {
                let maximised = obj
                    .get("maximised")
                    .and_then(Value::as_bool)
                    .unwrap_or(false);
                (w.clone(), maximised)
            }
            Some(_) => return Err(Error::InvalidPolicy("`weights` must be an object".into())),
            None => (obj.clone(), false),
        };
        let mut weights = BTreeMap::new();
        for (key, v) in map {
            let text = match &v {
                Value::Number(n) => n.to_string(),
                Value::String(s) => s.clone(),
                _ => return Err(Error::InvalidPolicy(format!("bad score for `{key}`"))),
            };
            weights.insert(key, parse_score(&text)?);
        }
        Relation::new(weights, maximised)
    }

    pub fn is_maximised(&self) -> bool {
        self.maximised
    }

    pub fn score(&self, subset: &Program) -> Score {
        match self.weights.get(&subset.inline()) {
            Some(w) => *w,
            None if self.maximised => Score::from_integer(subset.len() as i64),
            None => Score::from_integer(0),
        }
    }

    /// Whether `R ⊂ R′` implies a strictly higher score for `R′` on every
    /// pair of subsets of the lattice's program.
    pub fn is_maximised_on(&self, lattice: &SubsetLattice) -> bool {
        let scores: Vec<Score> = (0..=lattice.full_mask())
            .map(|m| self.score(&lattice.program(m)))
            .collect();
        (0..=lattice.full_mask()).all(|m| {
            (0..lattice.len())
                .filter(|i| m & (1 << i) == 0)
                .all(|i| scores[m as usize] < scores[(m | (1 << i)) as usize])
        })
    }
}

fn parse_score(text: &str) -> Result<Score> {
    let bad = || Error::InvalidPolicy(format!("bad score `{text}`"));
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n: i64 = n.trim().parse().map_err(|_| bad())?;
        let d: i64 = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(bad());
        }
        return Ok(Score::new(n, d));
    }
    if let Some((int, frac)) = text.split_once('.') {
        let negative = int.starts_with('-');
        let digits = format!("{}{}", int.trim_start_matches('-'), frac);
        let n: i64 = digits.parse().map_err(|_| bad())?;
        let d = 10i64.checked_pow(frac.len() as u32).ok_or_else(bad)?;
        return Ok(Score::new(if negative { -n } else { n }, d));
    }
    Ok(Score::from_integer(text.parse().map_err(|_| bad())?))
}

/// How partial meet picks members of a candidate family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SelectionPolicy {
    /// Every member.
    FullMeet,
    /// The member with the lexicographically least canonical text.
    MaxichoiceLex,
    /// Same choice as [`SelectionPolicy::MaxichoiceLex`], under the name
    /// used for answer-set based revision.
    SingleChoiceLex,
    /// All members with the highest score.
    Relational(Relation),
}

impl SelectionPolicy {
    /// `full`, `maxichoice`, `single`, `relational` or `relational-max`.
    pub fn parse(name: &str) -> Result<SelectionPolicy> {
        Ok(match name {
            "full" | "full-meet" => SelectionPolicy::FullMeet,
            "maxichoice" | "maxichoice-lex" => SelectionPolicy::MaxichoiceLex,
            "single" | "single-choice" | "single-choice-lex" => SelectionPolicy::SingleChoiceLex,
            "relational" => SelectionPolicy::Relational(Relation::default()),
            "relational-max" => SelectionPolicy::Relational(Relation::by_size()),
            _ => return Err(Error::InvalidPolicy(format!("unknown policy `{name}`"))),
        })
    }

    /// Selected members of `family` (masks over the lattice), in input
    /// order. Empty exactly when `family` is.
    pub fn select(&self, lattice: &SubsetLattice, family: &[u32]) -> Vec<u32> {
        if family.is_empty() {
            return Vec::new();
        }
        match self {
            SelectionPolicy::FullMeet => family.to_vec(),
            SelectionPolicy::MaxichoiceLex | SelectionPolicy::SingleChoiceLex => {
                let best = family
                    .iter()
                    .min_by_key(|&&m| lattice.program(m).inline())
                    .expect("family is non-empty");
                vec![*best]
            }
            SelectionPolicy::Relational(rel) => {
                let scores: Vec<Score> = family
                    .iter()
                    .map(|&m| rel.score(&lattice.program(m)))
                    .collect();
                let top = *scores.iter().max().expect("family is non-empty");
                family
                    .iter()
                    .zip(&scores)
                    .filter(|(_, s)| **s == top)
                    .map(|(m, _)| *m)
                    .collect()
            }
        }
    }
}

impl fmt::Display for SelectionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectionPolicy::FullMeet => f.write_str("full-meet"),
            SelectionPolicy::MaxichoiceLex => f.write_str("maxichoice-lex"),
            SelectionPolicy::SingleChoiceLex => f.write_str("single-choice-lex"),
            SelectionPolicy::Relational(r) if r.maximised && r.weights.is_empty() => {
                f.write_str("relational-max")
            }
            SelectionPolicy::Relational(_) => f.write_str("relational"),
        }
    }
}

/// Intersection of the selected members; ∅ for an empty selection.
pub fn meet(selected: &[u32]) -> u32 {
    match selected.split_first() {
        None => 0,
        Some((first, rest)) => rest.iter().fold(*first, |acc, m| acc & m),
    }
}

/// Maximal subsets of `p` consistent with the second argument.
pub fn compatible_sets(p: &Program, q: &Operand) -> Result<Vec<Program>> {
    let lattice = SubsetLattice::new(p, q.vocab())?;
    Ok(family(&lattice, &lattice.maximal_meeting(q.models())))
}

/// Maximal subsets of `p` that do not imply the second argument.
pub fn remainder_sets(p: &Program, q: &Operand) -> Result<Vec<Program>> {
    let lattice = SubsetLattice::new(p, q.vocab())?;
    Ok(family(
        &lattice,
        &lattice.maximal_meeting(&q.models().complement()),
    ))
}

fn family(lattice: &SubsetLattice, masks: &[u32]) -> Vec<Program> {
    let mut out: Vec<Program> = masks.iter().map(|&m| lattice.program(m)).collect();
    out.sort_by_key(Program::inline);
    out
}

/// Partial meet operator with a fixed selection policy.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialMeet {
    pub policy: SelectionPolicy,
    pub direction: Direction,
}

impl PartialMeet {
    pub fn revision(policy: SelectionPolicy) -> Self {
        PartialMeet {
            policy,
            direction: Direction::Revision,
        }
    }

    pub fn contraction(policy: SelectionPolicy) -> Self {
        PartialMeet {
            policy,
            direction: Direction::Contraction,
        }
    }
}

impl ChangeOperator for PartialMeet {
    fn direction(&self) -> Direction {
        self.direction
    }

    fn kept(&self, lattice: &SubsetLattice, models: &SeSet) -> Result<u32> {
        Ok(match self.direction {
            Direction::Revision => revision_kept(lattice, models, &self.policy),
            Direction::Contraction => contraction_kept(lattice, models, &self.policy),
        })
    }
}

pub fn revision_kept(lattice: &SubsetLattice, models: &SeSet, policy: &SelectionPolicy) -> u32 {
    if models.is_empty() {
        return lattice.full_mask();
    }
    meet(&policy.select(lattice, &lattice.maximal_meeting(models)))
}

pub fn contraction_kept(lattice: &SubsetLattice, models: &SeSet, policy: &SelectionPolicy) -> u32 {
    if models.is_full() {
        return lattice.full_mask();
    }
    let outside = models.complement();
    meet(&policy.select(lattice, &lattice.maximal_meeting(&outside)))
}

/// `P *_γ Q`: `P + Q` when `Q` is unsatisfiable, otherwise the meet of the
/// selected compatible sets plus `Q`.
pub fn pm_revise(p: &Program, q: &Operand, policy: &SelectionPolicy) -> Result<Program> {
    PartialMeet::revision(policy.clone()).apply(p, q)
}

/// `P ∸_γ Q`: `P` when `Q` is a tautology, otherwise the meet of the
/// selected remainder sets.
pub fn pm_contract(p: &Program, q: &Operand, policy: &SelectionPolicy) -> Result<Program> {
    PartialMeet::contraction(policy.clone()).apply(p, q)
}
