//! Comparison operators: distance-based revision on SE models, partial meet
//! revision under answer set semantics, screened consolidation, and
//! C-update equivalence.

use crate::error::Result;
use crate::lattice::SubsetLattice;
use crate::program::{Program, Vocabulary};
use crate::semantics::{answer_sets_of, canonical_program, se_models, SeSet};

/// `(X,X′) ⊆ (Y,Y′)`: the second components are ordered first, the first
/// components only break ties.
pub fn pair_le(a: (u32, u32), b: (u32, u32)) -> bool {
    let (x, x2) = a;
    let (y, y2) = b;
    x2 & !y2 == 0 && (x2 != y2 || x & !y == 0)
}

pub fn pair_lt(a: (u32, u32), b: (u32, u32)) -> bool {
    pair_le(a, b) && !pair_le(b, a)
}

/// Members of `e` having a partner in `e2` at a ⊆-minimal difference
/// among all pairs drawn from `e × e2`.
fn sigma_by<T: Copy + PartialEq, D: Copy>(
    e: &[T],
    e2: &[T],
    delta: impl Fn(T, T) -> D,
    lt: impl Fn(D, D) -> bool,
) -> Vec<T> {
    let diffs: Vec<D> = e
        .iter()
        .flat_map(|&a| e2.iter().map(move |&b| (a, b)))
        .map(|(a, b)| delta(a, b))
        .collect();
    e.iter()
        .copied()
        .filter(|&a| {
            e2.iter().any(|&b| {
                let d = delta(a, b);
                !diffs.iter().any(|&other| lt(other, d))
            })
        })
        .collect()
}

/// Minimal-difference members of `e` against `e2`, for interpretations.
pub fn sigma_sets(e: &[u32], e2: &[u32]) -> Vec<u32> {
    sigma_by(e, e2, |a, b| a ^ b, |d, d2| d & !d2 == 0 && d != d2)
}

/// Minimal-difference members of `e` against `e2`, for SE interpretations
/// under the componentwise difference and the pair order.
pub fn sigma_pairs(e: &[(u32, u32)], e2: &[(u32, u32)]) -> Vec<(u32, u32)> {
    sigma_by(e, e2, |a, b| (a.0 ^ b.0, a.1 ^ b.1), pair_lt)
}

/// SE models of the distance-based revision of `p` by `q`, both given by
/// their SE models over one vocabulary.
pub fn distance_revise_models(p: &SeSet, q: &SeSet) -> SeSet {
    if p.is_empty() {
        return q.clone();
    }
    let totals = sigma_sets(&q.totals(), &p.totals());
    let q_pairs: Vec<(u32, u32)> = q.iter().collect();
    let p_pairs: Vec<(u32, u32)> = p.iter().collect();
    let close = sigma_pairs(&q_pairs, &p_pairs);
    let mut out = SeSet::empty(q.vocab()).expect("vocabulary already checked");
    for y in totals {
        out.insert(y, y);
    }
    for (x, y) in close {
        if x != y && out.contains(y, y) {
            out.insert(x, y);
        }
    }
    out
}

pub fn distance_revise_se(p: &Program, q: &Program, vocab: &Vocabulary) -> Result<SeSet> {
    Ok(distance_revise_models(
        &se_models(p, vocab)?,
        &se_models(q, vocab)?,
    ))
}

/// A program with exactly the SE models of the distance-based revision.
pub fn distance_revise_materialized(
    p: &Program,
    q: &Program,
    vocab: &Vocabulary,
) -> Result<Program> {
    canonical_program(&distance_revise_se(p, q, vocab)?)
}

/// Maximal subsets `R` of `p` with `R ∪ q` having an answer set.
pub fn compatible_sets_as(p: &Program, q: &Program, vocab: &Vocabulary) -> Result<Vec<Program>> {
    let lattice = SubsetLattice::new(p, vocab)?;
    let q_models = se_models(q, vocab)?;
    let consistent: Vec<u32> = (0..=lattice.full_mask())
        .filter(|&m| !answer_sets_of(&lattice.models(m).intersection(&q_models)).is_empty())
        .collect();
    let mut out: Vec<Program> = consistent
        .iter()
        .filter(|&&m| !consistent.iter().any(|&big| big != m && m & !big == 0))
        .map(|&m| lattice.program(m))
        .collect();
    out.sort_by_key(Program::inline);
    Ok(out)
}

/// Single-choice partial meet revision under answer set semantics; the
/// choice is the compatible set with the least single-line text.
pub fn pm_revise_as(p: &Program, q: &Program, vocab: &Vocabulary) -> Result<Program> {
    let family = compatible_sets_as(p, q, vocab)?;
    let q_consistent = !answer_sets_of(&se_models(q, vocab)?).is_empty();
    Ok(match family.first() {
        None if !q_consistent => p.union(q),
        None => q.clone(),
        Some(chosen) => chosen.union(q),
    })
}

/// Which consistency notion screened consolidation uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Consistency {
    /// Non-empty SE models.
    Se,
    /// At least one answer set.
    AnswerSets,
}

/// Maximal `R` with `q ⊆ R ⊆ base` that are consistent; empty when `q`
/// is not contained in `base`.
pub fn screened_remainders(
    base: &Program,
    q: &Program,
    vocab: &Vocabulary,
    consistency: Consistency,
) -> Result<Vec<Program>> {
    if !q.is_subset(base) {
        return Ok(Vec::new());
    }
    let lattice = SubsetLattice::new(base, vocab)?;
    let required = lattice.mask_of(q)?;
    let consistent: Vec<u32> = (0..=lattice.full_mask())
        .filter(|&m| m & required == required)
        .filter(|&m| match consistency {
            Consistency::Se => !lattice.models(m).is_empty(),
            Consistency::AnswerSets => !answer_sets_of(lattice.models(m)).is_empty(),
        })
        .collect();
    let mut out: Vec<Program> = consistent
        .iter()
        .filter(|&&m| !consistent.iter().any(|&big| big != m && m & !big == 0))
        .map(|&m| lattice.program(m))
        .collect();
    out.sort_by_key(Program::inline);
    Ok(out)
}

/// Screened consolidation of `base` by `q ⊆ base`, choosing the remainder
/// with the least `key`; `base` itself when there is none.
pub fn screened_consolidation<K: Ord>(
    base: &Program,
    q: &Program,
    vocab: &Vocabulary,
    consistency: Consistency,
    key: impl Fn(&Program) -> K,
) -> Result<Program> {
    let family = screened_remainders(base, q, vocab, consistency)?;
    Ok(family
        .into_iter()
        .min_by_key(|r| key(r))
        .unwrap_or_else(|| base.clone()))
}

/// `P1 ∖ P2` and `P2 ∖ P1` are strongly equivalent.
pub fn c_update_equivalent(p1: &Program, p2: &Program, vocab: &Vocabulary) -> Result<bool> {
    Ok(se_models(&p1.difference(p2), vocab)? == se_models(&p2.difference(p1), vocab)?)
}
