//! Exhaustive checking of change postulates, identities and structural
//! properties over a corpus of programs drawn from a rule pool.
//!
//! Sweeps work on compact encodings: programs are bit sets over a rule
//! universe (the pool, then any materialized rules), SE sets are bit sets
//! over the `3^n` SE interpretations. Each failing instance becomes a
//! [`Witness`], and [`holds`] re-evaluates a witness through the public
//! operators, independently of the sweep.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use serde_json::{json, Value};

use crate::baselines::{
    distance_revise_models, pm_revise_as, screened_consolidation, screened_remainders, Consistency,
};
use crate::ensconcement::{
    all_ensconcements, all_rankings, ensconcement_from_partition, kept_mask, lift_ranks,
    partition_ranks, Ensconcement, EnsconcementOperator, SubsetEnsconcement,
};
use crate::error::{Error, Result};
use crate::lattice::{bits, SubsetLattice};
use crate::localization::{
    localized_change, localized_change_with, relevant_modules, LocalOperator,
};
use crate::operator::{ChangeOperator, Direction};
use crate::partial_meet::{compatible_sets, meet, remainder_sets, PartialMeet, SelectionPolicy};
use crate::program::{parse_program, Program, Rule, Vocabulary};
use crate::semantics::{canonical_program, rule_se_models, se_models, Operand, SeSet};

pub const MAX_CORPUS_VOCABULARY: usize = 4;
pub const MAX_POOL: usize = 12;

/// The nine two-atom rules used throughout, plus the facts `a.` and `b.`.
pub const STANDARD_POOL: &str = "
:- a.
:- b.
a :- b.
b :- a.
:- a, b.
:- b, not a.
:- a, not b.
a ; not b.
not a ; b.
a.
b.
";

/// All subsets of a rule pool up to a size bound, ordered by size and then
/// by bit mask over the pool in canonical rule order.
#[derive(Debug, Clone)]
pub struct Corpus {
    vocab: Vocabulary,
    pool: Vec<Rule>,
    max_rules: usize,
    masks: Vec<u32>,
}

impl Corpus {
    pub fn new(vocab: &Vocabulary, pool: &Program, max_rules: usize) -> Result<Corpus> {
        if vocab.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        if vocab.len() > MAX_CORPUS_VOCABULARY {
            return Err(Error::VocabularyTooLarge {
                size: vocab.len(),
                max: MAX_CORPUS_VOCABULARY,
            });
        }
        if pool.len() > MAX_POOL {
            return Err(Error::ProgramTooLarge {
                size: pool.len(),
                max: MAX_POOL,
            });
        }
        if let Some(atom) = pool.atoms().into_iter().find(|a| !vocab.contains(a)) {
            return Err(Error::UnknownAtom(atom.to_string()));
        }
        let pool: Vec<Rule> = pool.iter().cloned().collect();
        let mut masks: Vec<u32> = (0..1u32 << pool.len())
            .filter(|m| m.count_ones() as usize <= max_rules)
            .collect();
        masks.sort_by_key(|&m| (m.count_ones(), m));
        Ok(Corpus {
            vocab: vocab.clone(),
            pool,
            max_rules,
            masks,
        })
    }

    /// Vocabulary `{a, b}`, [`STANDARD_POOL`], at most four rules.
    pub fn standard() -> Corpus {
        let vocab = Vocabulary::new(["a", "b"]);
        let pool = parse_program(STANDARD_POOL, Some(&vocab))
            .expect("standard pool parses")
            .0;
        Corpus::new(&vocab, &pool, 4).expect("standard corpus is within the caps")
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn pool(&self) -> &[Rule] {
        &self.pool
    }

    pub fn max_rules(&self) -> usize {
        self.max_rules
    }

    pub fn len(&self) -> usize {
        self.masks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masks.is_empty()
    }

    pub fn program(&self, index: usize) -> Program {
        self.program_of(self.masks[index])
    }

    pub fn programs(&self) -> impl Iterator<Item = Program> + '_ {
        self.masks.iter().map(|&m| self.program_of(m))
    }

    /// The programs at `indices`, in corpus order. Both arguments of every
    /// instance range over the kept programs.
    pub fn select(&self, indices: &[usize]) -> Result<Corpus> {
        let mut keep: Vec<usize> = indices.to_vec();
        keep.sort_unstable();
        keep.dedup();
        if let Some(&bad) = keep.iter().find(|&&i| i >= self.masks.len()) {
            return Err(Error::Invalid(format!(
                "corpus index {bad} out of range ({} programs)",
                self.masks.len()
            )));
        }
        Ok(Corpus {
            masks: keep.iter().map(|&i| self.masks[i]).collect(),
            ..self.clone()
        })
    }

    fn program_of(&self, mask: u32) -> Program {
        bits(mask).map(|i| self.pool[i].clone()).collect()
    }
}

/// Numbered postulates. `R` are revision postulates, `C` contraction
/// postulates; a `b` suffix marks the base variants and `m` the model-level
/// revision variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Postulate {
    R1,
    R2,
    R3,
    R4,
    R5,
    R6,
    R7,
    R8,
    R1b,
    R2b,
    R3b,
    R4b,
    R5b,
    R1m,
    R2m,
    R3m,
    R4m,
    R5m,
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    C7,
    C8,
    C1b,
    C2b,
    C3b,
    C4b,
    C5b,
    C6b,
    C7b,
    C8b,
}

use Postulate::*;

pub const REVISION_POSTULATES: [Postulate; 13] =
    [R1, R2, R3, R4, R5, R6, R7, R8, R1b, R2b, R3b, R4b, R5b];
pub const MODEL_REVISION_POSTULATES: [Postulate; 5] = [R1m, R2m, R3m, R4m, R5m];
pub const CONTRACTION_POSTULATES: [Postulate; 16] = [
    C1, C2, C3, C4, C5, C6, C7, C8, C1b, C2b, C3b, C4b, C5b, C6b, C7b, C8b,
];

impl Postulate {
    /// Short identifier such as `*3b` or `-7`.
    pub fn id(self) -> String {
        let name = format!("{self:?}");
        let (kind, rest) = name.split_at(1);
        let sign = if kind == "R" { "*" } else { "-" };
        format!("{sign}{rest}")
    }

    pub fn parse(id: &str) -> Result<Postulate> {
        REVISION_POSTULATES
            .iter()
            .chain(&MODEL_REVISION_POSTULATES)
            .chain(&CONTRACTION_POSTULATES)
            .copied()
            .find(|p| p.id() == id.trim_matches(|c| c == '(' || c == ')'))
            .ok_or_else(|| Error::Invalid(format!("unknown postulate `{id}`")))
    }

    pub fn direction(self) -> Direction {
        if format!("{self:?}").starts_with('R') {
            Direction::Revision
        } else {
            Direction::Contraction
        }
    }
}

impl fmt::Display for Postulate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let id = self.id();
        match id.strip_prefix('-') {
            Some(rest) => write!(f, "(∸{rest})"),
            None => write!(f, "({id})"),
        }
    }
}

/// Everything the harness decides per instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Property {
    Postulate(Postulate),
    /// Relevance implies disjunctive elimination, instance by instance.
    RelevanceImpliesElimination,
    /// Revision equals contraction by the complement plus the input.
    LeviIdentity,
    /// Contraction equals the program intersected with revision by the
    /// complement.
    HarperIdentity,
    /// Every partial meet outcome is reached by an ensconcement built from
    /// the kept/discarded split.
    PartitionRealization,
    /// Every partial meet outcome is reached by some valid ensconcement.
    EnsconcementRealization,
    /// The subset ensconcement lifted from a rule ensconcement gives the
    /// same change.
    SubsetLift,
    /// The ensconcement outcome is not reached by any selection.
    OutsideSelection,
    /// Minimal conflicting subsets lie inside the relevant modules.
    ConflictCoverage,
    /// Conflict with the program and conflict with its relevant modules
    /// coincide.
    ConflictLocality,
    /// The localized result is an achievable partial meet outcome.
    LocalizedAchievable,
    /// As above, for programs with at least one SE model.
    LocalizedAchievableSatisfiable,
    /// Every screened SE remainder of `P ∪ Q` is an achievable revision.
    ScreenedRemainderAchievable,
    /// Answer-set revision equals screened consolidation under paired
    /// choices.
    AnswerSetConsolidation,
}

impl Property {
    pub fn name(&self) -> String {
        match self {
            Property::Postulate(p) => p.to_string(),
            Property::RelevanceImpliesElimination => "relevance-implies-elimination".into(),
            Property::LeviIdentity => "levi-identity".into(),
            Property::HarperIdentity => "harper-identity".into(),
            Property::PartitionRealization => "partition-realization".into(),
            Property::EnsconcementRealization => "ensconcement-realization".into(),
            Property::SubsetLift => "subset-lift".into(),
            Property::OutsideSelection => "outside-selection".into(),
            Property::ConflictCoverage => "conflict-coverage".into(),
            Property::ConflictLocality => "conflict-locality".into(),
            Property::LocalizedAchievable => "localized-achievable".into(),
            Property::LocalizedAchievableSatisfiable => "localized-achievable-satisfiable".into(),
            Property::ScreenedRemainderAchievable => "screened-remainder-achievable".into(),
            Property::AnswerSetConsolidation => "answer-set-consolidation".into(),
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// A family of operators swept over the corpus. Ensconcement covers every
/// valid ensconcement of each program.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OperatorFamily {
    PartialMeet(SelectionPolicy),
    Ensconcement,
    Distance,
}

impl OperatorFamily {
    /// `pm` (full meet), `pm:<policy>`, `ens` or `distance`.
    pub fn parse(text: &str) -> Result<OperatorFamily> {
        Ok(match text {
            "pm" => OperatorFamily::PartialMeet(SelectionPolicy::FullMeet),
            "ens" => OperatorFamily::Ensconcement,
            "distance" => OperatorFamily::Distance,
            _ => match text.strip_prefix("pm:") {
                Some(policy) => OperatorFamily::PartialMeet(SelectionPolicy::parse(policy)?),
                None => return Err(Error::Invalid(format!("unknown operator `{text}`"))),
            },
        })
    }

    pub fn id(&self) -> String {
        match self {
            OperatorFamily::PartialMeet(policy) => format!("pm:{policy}"),
            OperatorFamily::Ensconcement => "ens".into(),
            OperatorFamily::Distance => "distance".into(),
        }
    }
}

/// One concrete operator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OperatorConfig {
    PartialMeet(SelectionPolicy),
    /// Bound to the ensconcement of the instance's first program.
    Ensconcement(Ensconcement),
    /// Distance-based revision, materialized as a program.
    Distance,
}

impl fmt::Display for OperatorConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OperatorConfig::PartialMeet(policy) => write!(f, "pm:{policy}"),
            OperatorConfig::Ensconcement(e) => {
                let levels: Vec<String> = e
                    .levels()
                    .iter()
                    .map(|l| format!("{{{}}}", l.inline()))
                    .collect();
                write!(f, "ens:{}", levels.join(" < "))
            }
            OperatorConfig::Distance => f.write_str("distance"),
        }
    }
}

/// The data a property is evaluated on. `r` is the second change argument
/// where one is needed; `p_alt` a second first argument.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub vocab: Vocabulary,
    pub p: Program,
    pub q: Program,
    pub r: Option<Program>,
    pub p_alt: Option<Program>,
    pub operator: OperatorConfig,
    pub direction: Direction,
}

impl Instance {
    pub fn new(
        vocab: &Vocabulary,
        p: Program,
        q: Program,
        operator: OperatorConfig,
        direction: Direction,
    ) -> Self {
        Instance {
            vocab: vocab.clone(),
            p,
            q,
            r: None,
            p_alt: None,
            operator,
            direction,
        }
    }

    pub fn with_r(mut self, r: Program) -> Self {
        self.r = Some(r);
        self
    }

    pub fn with_p_alt(mut self, p: Program) -> Self {
        self.p_alt = Some(p);
        self
    }

    fn operand(&self, q: &Program) -> Result<Operand> {
        Operand::from_program(q, &self.vocab)
    }

    fn change(&self, p: &Program, q: &Program) -> Result<Program> {
        self.change_by(p, &self.operand(q)?, self.direction)
    }

    fn change_by(&self, p: &Program, q: &Operand, direction: Direction) -> Result<Program> {
        match &self.operator {
            OperatorConfig::PartialMeet(policy) => PartialMeet {
                policy: policy.clone(),
                direction,
            }
            .apply(p, q),
            OperatorConfig::Ensconcement(e) => EnsconcementOperator {
                ensconcement: e.clone(),
                direction,
            }
            .apply(p, q),
            OperatorConfig::Distance => {
                if direction != Direction::Revision {
                    return Err(Error::Invalid(
                        "distance-based change is revision only".into(),
                    ));
                }
                canonical_program(&distance_revise_models(
                    &se_models(p, &self.vocab)?,
                    q.models(),
                ))
            }
        }
    }

    fn r(&self) -> Result<&Program> {
        self.r
            .as_ref()
            .ok_or_else(|| Error::Invalid("instance needs a second change argument".into()))
    }

    fn models(&self, p: &Program) -> Result<SeSet> {
        se_models(p, &self.vocab)
    }

    fn sat(&self, p: &Program) -> Result<bool> {
        Ok(!self.models(p)?.is_empty())
    }

    fn implies(&self, p: &Program, q: &Program) -> Result<bool> {
        Ok(self.models(p)?.is_subset(&self.models(q)?))
    }

    fn to_json(&self) -> Value {
        json!({
            "vocabulary": self.vocab.atoms(),
            "p": self.p.inline(),
            "q": self.q.inline(),
            "r": self.r.as_ref().map(Program::inline),
            "p_alt": self.p_alt.as_ref().map(Program::inline),
            "operator": self.operator.to_string(),
            "direction": match self.direction {
                Direction::Revision => "revision",
                Direction::Contraction => "contraction",
            },
        })
    }
}

/// A failing instance together with the operator outputs involved.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    pub instance: Instance,
    pub outputs: Vec<(String, String)>,
}

impl Witness {
    pub fn new(instance: Instance) -> Witness {
        let mut outputs = Vec::new();
        let sign = match instance.direction {
            Direction::Revision => "*",
            Direction::Contraction => "∸",
        };
        let mut show = |label: String, p: &Program, q: &Program| {
            let text = match instance.change(p, q) {
                Ok(out) => format!("{{{}}}", out.inline()),
                Err(e) => format!("error: {e}"),
            };
            outputs.push((label, text));
        };
        show(format!("P{sign}Q"), &instance.p, &instance.q);
        if let Some(r) = &instance.r {
            show(format!("P{sign}R"), &instance.p, r);
            show(format!("P{sign}(Q+R)"), &instance.p, &instance.q.union(r));
        }
        if let (Some(p2), Some(r)) = (&instance.p_alt, &instance.r) {
            show(format!("P'{sign}R"), p2, r);
        }
        Witness { instance, outputs }
    }

    /// [`Witness::new`], plus the localized result for the localization
    /// properties.
    pub fn for_property(property: Property, instance: Instance) -> Witness {
        let mut w = Witness::new(instance);
        let localized = matches!(
            property,
            Property::LocalizedAchievable | Property::LocalizedAchievableSatisfiable
        );
        if let (true, OperatorConfig::PartialMeet(policy)) = (localized, &w.instance.operator) {
            let i = &w.instance;
            let op = LocalOperator::partial_meet(i.direction, policy.clone());
            let text = match i
                .operand(&i.q)
                .and_then(|q| localized_change(&i.p, &op, &q))
            {
                Ok(out) => format!("{{{}}}", out.inline()),
                Err(e) => format!("error: {e}"),
            };
            w.outputs.push((format!("localized[{policy}]"), text));
        }
        w
    }

    pub fn to_json(&self) -> Value {
        let outputs: serde_json::Map<String, Value> = self
            .outputs
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        json!({ "instance": self.instance.to_json(), "outputs": outputs })
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = &self.instance;
        write!(f, "P={{{}}} Q={{{}}}", i.p.inline(), i.q.inline())?;
        if let Some(r) = &i.r {
            write!(f, " R={{{}}}", r.inline())?;
        }
        if let Some(p2) = &i.p_alt {
            write!(f, " P'={{{}}}", p2.inline())?;
        }
        write!(f, " [{}]", i.operator)?;
        for (k, v) in &self.outputs {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Fails,
}

/// Outcome of one property for one operator over a corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PostulateReport {
    pub operator: String,
    pub property: Property,
    /// Number of instances evaluated.
    pub checked: u64,
    /// Number of failing instances.
    pub failures: u64,
    /// First failing instance in corpus order.
    pub witness: Option<Witness>,
}

impl PostulateReport {
    pub fn verdict(&self) -> Verdict {
        if self.witness.is_some() {
            Verdict::Fails
        } else {
            Verdict::Holds
        }
    }

    pub fn holds(&self) -> bool {
        self.witness.is_none()
    }

    /// Re-evaluates the witness through the public operators; `None` when
    /// there is none.
    pub fn replay(&self) -> Result<Option<bool>> {
        self.witness
            .as_ref()
            .map(|w| holds(self.property, &w.instance))
            .transpose()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "operator": self.operator,
            "property": self.property.name(),
            "verdict": if self.holds() { "holds" } else { "fails" },
            "checked": self.checked,
            "failures": self.failures,
            "witness": self.witness.as_ref().map(Witness::to_json),
        })
    }
}

impl fmt::Display for PostulateReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} ", self.operator, self.property)?;
        if self.holds() {
            write!(f, "holds ({} instances)", self.checked)?;
        } else {
            write!(f, "fails ({} of {} instances)", self.failures, self.checked)?;
        }
        if let Some(w) = &self.witness {
            write!(f, ": {w}")?;
        }
        Ok(())
    }
}

/// Decides `property` on one instance using the public operators.
pub fn holds(property: Property, inst: &Instance) -> Result<bool> {
    let p = &inst.p;
    let q = &inst.q;
    match property {
        Property::Postulate(post) => postulate_holds(post, inst),
        Property::RelevanceImpliesElimination => {
            Ok(!postulate_holds(C3b, inst)? || postulate_holds(C8b, inst)?)
        }
        Property::LeviIdentity => {
            let q_op = inst.operand(q)?;
            let direct = inst.change_by(p, &q_op, Direction::Revision)?;
            let via = inst.change_by(p, &q_op.complement(), Direction::Contraction)?;
            Ok(direct == via.union(q))
        }
        Property::HarperIdentity => {
            let q_op = inst.operand(q)?;
            let direct = inst.change_by(p, &q_op, Direction::Contraction)?;
            let via = inst.change_by(p, &q_op.complement(), Direction::Revision)?;
            Ok(direct == p.intersection(&via))
        }
        Property::PartitionRealization => {
            let q_op = inst.operand(q)?;
            for outcome in achievable_outcomes(p, &q_op, inst.direction)? {
                let keep = outcome.intersection(p);
                let ens =
                    match ensconcement_from_partition(&keep, &p.difference(&keep), &inst.vocab) {
                        Ok(e) => e,
                        Err(_) => return Ok(false),
                    };
                let op = EnsconcementOperator {
                    ensconcement: ens,
                    direction: inst.direction,
                };
                if op.apply(p, &q_op)? != outcome {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        Property::EnsconcementRealization => {
            let q_op = inst.operand(q)?;
            let mut reached = Vec::new();
            for ens in all_ensconcements(p, &inst.vocab)? {
                let op = EnsconcementOperator {
                    ensconcement: ens,
                    direction: inst.direction,
                };
                reached.push(op.apply(p, &q_op)?);
            }
            Ok(achievable_outcomes(p, &q_op, inst.direction)?
                .iter()
                .all(|o| reached.contains(o)))
        }
        Property::SubsetLift => {
            let OperatorConfig::Ensconcement(e) = &inst.operator else {
                return Err(Error::Invalid("subset lift needs an ensconcement".into()));
            };
            let lifted = SubsetEnsconcement::lift(p, e)?;
            let q_op = inst.operand(q)?;
            let via = match inst.direction {
                Direction::Revision => lifted.revise(p, &q_op)?,
                Direction::Contraction => lifted.contract(p, &q_op)?,
            };
            Ok(via == inst.change(p, q)?)
        }
        Property::OutsideSelection => {
            let out = inst.change(p, q)?;
            Ok(!achievable_outcomes(p, &inst.operand(q)?, inst.direction)?.contains(&out))
        }
        Property::ConflictCoverage => {
            let (pm, qm) = (inst.models(p)?, inst.models(q)?);
            if pm.is_empty() || qm.is_empty() {
                return Ok(true);
            }
            let covered = relevant_modules(p, q.atoms())?.union();
            let lattice = SubsetLattice::new(p, &inst.vocab)?;
            let conflicts = |m: u32| !lattice.models(m).intersects(&qm);
            Ok((0..=lattice.full_mask())
                .filter(|&m| conflicts(m) && bits(m).all(|i| !conflicts(m & !(1 << i))))
                .all(|m| lattice.program(m).is_subset(&covered)))
        }
        Property::ConflictLocality => {
            let (pm, qm) = (inst.models(p)?, inst.models(q)?);
            if pm.is_empty() {
                return Ok(true);
            }
            let union = relevant_modules(p, q.atoms())?.union();
            Ok(pm.intersects(&qm) == inst.models(&union)?.intersects(&qm))
        }
        Property::LocalizedAchievableSatisfiable => {
            Ok(!inst.sat(p)? || holds(Property::LocalizedAchievable, inst)?)
        }
        Property::LocalizedAchievable => {
            let q_op = inst.operand(q)?;
            some_selection_agrees(p, &q_op, inst.direction)
        }
        Property::ScreenedRemainderAchievable => {
            let base = p.union(q);
            let achievable = achievable_outcomes(p, &inst.operand(q)?, Direction::Revision)?;
            let remainders = screened_remainders(&base, q, &inst.vocab, Consistency::Se)?;
            if remainders.is_empty() {
                return Ok(achievable.contains(&base));
            }
            Ok(remainders.iter().all(|r| achievable.contains(r)))
        }
        Property::AnswerSetConsolidation => {
            let direct = pm_revise_as(p, q, &inst.vocab)?;
            let screened = screened_consolidation(
                &p.union(q),
                q,
                &inst.vocab,
                Consistency::AnswerSets,
                |r| r.intersection(p).inline(),
            )?;
            Ok(direct == screened)
        }
    }
}

/// Every outcome of partial meet change of `p` by `q` under some selection:
/// the meets of all non-empty subfamilies of the candidate family, or the
/// fixed outcome when the change is trivial. Sorted by rule text.
pub fn achievable_outcomes(p: &Program, q: &Operand, direction: Direction) -> Result<Vec<Program>> {
    let lattice = SubsetLattice::new(p, q.vocab())?;
    let target = match direction {
        Direction::Revision => q.models().clone(),
        Direction::Contraction => q.models().complement(),
    };
    let mut keeps: Vec<u32> = if target.is_empty() {
        vec![lattice.full_mask()]
    } else {
        subfamily_meets(&lattice.maximal_meeting(&target))
    };
    keeps.sort_unstable();
    keeps.dedup();
    let mut out: Vec<Program> = keeps
        .into_iter()
        .map(|k| {
            let kept = lattice.program(k);
            match direction {
                Direction::Revision => kept.union(&q.rules()),
                Direction::Contraction => kept,
            }
        })
        .collect();
    out.sort_by_key(Program::inline);
    Ok(out)
}

/// Whether some selection function makes the localized change and the
/// global partial meet change of `p` by `q` coincide. Choices are explored
/// per distinct candidate family, so every program with the same family
/// (including `p` itself) gets the same choice.
fn some_selection_agrees(p: &Program, q: &Operand, direction: Direction) -> Result<bool> {
    let family_of = |part: &Program| match direction {
        Direction::Revision => compatible_sets(part, q),
        Direction::Contraction => remainder_sets(part, q),
    };
    let global_family = family_of(p)?;
    let global = achievable_outcomes(p, q, direction)?;
    let mut forced: Vec<usize> = Vec::new();
    loop {
        let mut picks: HashMap<Vec<Program>, usize> = HashMap::new();
        let mut branching: Vec<usize> = Vec::new();
        let local = localized_change_with(p, direction, q, |part| {
            let options = achievable_outcomes(part, q, direction)?;
            let family = family_of(part)?;
            let pick = match picks.get(&family) {
                Some(&pick) => pick,
                None => {
                    let pick = forced.get(branching.len()).copied().unwrap_or(0);
                    branching.push(options.len());
                    picks.insert(family, pick);
                    pick
                }
            };
            Ok(options[pick].clone())
        })?;
        let agrees = match picks.get(&global_family) {
            Some(&pick) => global[pick] == local,
            None => global.contains(&local),
        };
        if agrees {
            return Ok(true);
        }
        let mut choice: Vec<usize> = (0..branching.len())
            .map(|i| forced.get(i).copied().unwrap_or(0))
            .collect();
        let Some(i) = (0..choice.len())
            .rev()
            .find(|&i| choice[i] + 1 < branching[i])
        else {
            return Ok(false);
        };
        choice[i] += 1;
        choice.truncate(i + 1);
        forced = choice;
    }
}

fn subfamily_meets(family: &[u32]) -> Vec<u32> {
    (1u32..1 << family.len())
        .map(|g| meet(&bits(g).map(|i| family[i]).collect::<Vec<_>>()))
        .collect()
}

fn postulate_holds(post: Postulate, inst: &Instance) -> Result<bool> {
    let p = &inst.p;
    let q = &inst.q;
    let out = inst.change(p, q)?;
    let pq = p.union(q);
    let in_vocab = |prog: &Program| prog.atoms().iter().all(|a| inst.vocab.contains(a));
    Ok(match post {
        R1 | C1 => in_vocab(&out),
        R2 | R1b => q.is_subset(&out),
        R3 | R2b => out.is_subset(&pq),
        R4 => !inst.sat(&pq)? || pq.is_subset(&out),
        R5 => inst.sat(&out)? == inst.sat(q)?,
        R5b | R3m => !inst.sat(q)? || inst.sat(&out)?,
        R6 => {
            let r = inst.r()?;
            inst.models(q)? != inst.models(r)?
                || inst.models(&out)? == inst.models(&inst.change(p, r)?)?
        }
        R7 => {
            let r = inst.r()?;
            inst.change(p, &q.union(r))?.is_subset(&out.union(r))
        }
        R8 => {
            let r = inst.r()?;
            let expanded = out.union(r);
            !inst.sat(&expanded)? || expanded.is_subset(&inst.change(p, &q.union(r))?)
        }
        R3b => {
            let removed = p.difference(&out);
            if removed.is_empty() {
                return Ok(true);
            }
            if !out.is_subset(&pq) {
                return Ok(false);
            }
            let between = between(&out, &pq, inst)?;
            for r in &removed {
                let mut found = false;
                for mid in &between {
                    let with_r: Program = mid.iter().cloned().chain([r.clone()]).collect();
                    if inst.sat(mid)? && !inst.sat(&with_r)? {
                        found = true;
                        break;
                    }
                }
                if !found {
                    return Ok(false);
                }
            }
            true
        }
        R4b => {
            let r = inst.r()?;
            for sub in subsets(p, inst)? {
                if inst.sat(&sub.union(q))? != inst.sat(&sub.union(r))? {
                    return Ok(true);
                }
            }
            p.intersection(&out) == p.intersection(&inst.change(p, r)?)
        }
        R1m => inst.implies(&out, q)?,
        R2m => {
            let both = inst.models(p)?.intersection(&inst.models(q)?);
            both.is_empty() || inst.models(&out)? == both
        }
        R4m => {
            let r = inst.r()?;
            let p2 = inst
                .p_alt
                .as_ref()
                .ok_or_else(|| Error::Invalid("instance needs a second first argument".into()))?;
            inst.models(p)? != inst.models(p2)?
                || inst.models(q)? != inst.models(r)?
                || inst.models(&out)? == inst.models(&inst.change(p2, r)?)?
        }
        R5m => {
            let r = inst.r()?;
            inst.models(&out)?
                .intersection(&inst.models(r)?)
                .is_subset(&inst.models(&inst.change(p, &q.union(r))?)?)
        }
        C2 | C1b => out.is_subset(p),
        C3 | C5b => inst.implies(p, q)? || out == *p,
        C4 | C2b => inst.models(q)?.is_full() || !inst.implies(&out, q)?,
        C5 => p.is_subset(&out.union(q)),
        C6 | C6b => {
            let r = inst.r()?;
            inst.models(q)? != inst.models(r)? || out == inst.change(p, r)?
        }
        C7 => {
            let r = inst.r()?;
            out.intersection(&inst.change(p, r)?)
                .is_subset(&inst.change(p, &q.union(r))?)
        }
        C8 => {
            let r = inst.r()?;
            let joint = inst.change(p, &q.union(r))?;
            inst.implies(&joint, q)? || joint.is_subset(&out)
        }
        C3b => {
            let removed = p.difference(&out);
            if removed.is_empty() {
                return Ok(true);
            }
            if !out.is_subset(p) {
                return Ok(false);
            }
            let between = between(&out, p, inst)?;
            for r in &removed {
                let mut found = false;
                for mid in &between {
                    let with_r: Program = mid.iter().cloned().chain([r.clone()]).collect();
                    if !inst.implies(mid, q)? && inst.implies(&with_r, q)? {
                        found = true;
                        break;
                    }
                }
                if !found {
                    return Ok(false);
                }
            }
            true
        }
        C4b => {
            let r = inst.r()?;
            for sub in subsets(p, inst)? {
                if inst.implies(&sub, q)? != inst.implies(&sub, r)? {
                    return Ok(true);
                }
            }
            out == inst.change(p, r)?
        }
        C7b => {
            let r = inst.r()?;
            let out_r = inst.change(p, r)?;
            let joint = inst.change(p, &q.union(r))?;
            joint == out || joint == out_r || joint == out.intersection(&out_r)
        }
        C8b => {
            let kept = inst.models(&out)?;
            let qm = inst.models(q)?;
            for r in &p.difference(&out) {
                if kept.is_subset(&qm.union(&rule_se_models(r, &inst.vocab)?)) {
                    return Ok(false);
                }
            }
            true
        }
    })
}

fn subsets(p: &Program, inst: &Instance) -> Result<Vec<Program>> {
    let lattice = SubsetLattice::new(p, &inst.vocab)?;
    Ok((0..=lattice.full_mask())
        .map(|m| lattice.program(m))
        .collect())
}

/// Programs `M` with `low ⊆ M ⊂ high`.
fn between(low: &Program, high: &Program, inst: &Instance) -> Result<Vec<Program>> {
    let free = high.difference(low);
    Ok(subsets(&free, inst)?
        .into_iter()
        .filter(|s| s.len() < free.len())
        .map(|s| s.union(low))
        .collect())
}

// ---------------------------------------------------------------------------
// Compact engine used by the sweeps.

fn bits128(mask: u128) -> impl Iterator<Item = usize> {
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

fn submasks32(mask: u32) -> impl Iterator<Item = u32> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let current = next?;
        next = if current == 0 {
            None
        } else {
            Some((current - 1) & mask)
        };
        Some(current)
    })
}

/// Applies `f` to `0..n` on all available cores; results keep index order.
fn par_map<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync) -> Vec<T> {
    let workers = std::thread::available_parallelism()
        .map_or(1, |w| w.get())
        .min(n.max(1));
    let next = AtomicUsize::new(0);
    let done: Vec<Vec<(usize, T)>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|_| {
                s.spawn(|| {
                    let mut out = Vec::new();
                    loop {
                        let i = next.fetch_add(1, Ordering::Relaxed);
                        if i >= n {
                            return out;
                        }
                        out.push((i, f(i)));
                    }
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("harness worker panicked"))
            .collect()
    });
    let mut slots: Vec<Option<T>> = (0..n).map(|_| None).collect();
    for (i, t) in done.into_iter().flatten() {
        slots[i] = Some(t);
    }
    slots
        .into_iter()
        .map(|t| t.expect("every index is computed"))
        .collect()
}

struct Engine {
    corpus: Corpus,
    /// Compact index of `(X, Y)` at `(Y << n) | X`.
    slots: Vec<u8>,
    pairs: Vec<(u32, u32)>,
    rules: Vec<Rule>,
    rule_models: Vec<u128>,
    index: HashMap<Rule, usize>,
    pool_models: Vec<u128>,
    class_of: Vec<usize>,
    class_models: Vec<u128>,
    class_sets: Vec<SeSet>,
    class_complements: Vec<SeSet>,
    full: u128,
    distance: HashMap<(usize, usize), u128>,
}

impl Engine {
    fn new(corpus: &Corpus) -> Result<Engine> {
        let vocab = corpus.vocab();
        let n = vocab.len();
        let mut slots = vec![u8::MAX; 1 << (2 * n)];
        let mut pairs = Vec::new();
        for y in 0u32..1 << n {
            for x in crate::semantics::submasks(y) {
                slots[((y << n) | x) as usize] = pairs.len() as u8;
                pairs.push((x, y));
            }
        }
        let full = if pairs.len() == 128 {
            u128::MAX
        } else {
            (1u128 << pairs.len()) - 1
        };
        let mut engine = Engine {
            corpus: corpus.clone(),
            slots,
            pairs,
            rules: Vec::new(),
            rule_models: Vec::new(),
            index: HashMap::new(),
            pool_models: Vec::new(),
            class_of: Vec::new(),
            class_models: Vec::new(),
            class_sets: Vec::new(),
            class_complements: Vec::new(),
            full,
            distance: HashMap::new(),
        };
        for rule in corpus.pool() {
            engine.intern_rule(rule)?;
        }
        let pool_len = corpus.pool().len();
        let mut pool_models = Vec::with_capacity(1 << pool_len);
        pool_models.push(full);
        for mask in 1usize..1 << pool_len {
            let low = mask.trailing_zeros() as usize;
            pool_models.push(pool_models[mask & (mask - 1)] & engine.rule_models[low]);
        }
        let mut seen: HashMap<u128, usize> = HashMap::new();
        let mut class_of = Vec::with_capacity(pool_models.len());
        for &m in &pool_models {
            let next = seen.len();
            let c = *seen.entry(m).or_insert(next);
            if c == engine.class_models.len() {
                engine.class_models.push(m);
                let set = engine.decode(m);
                engine.class_complements.push(set.complement());
                engine.class_sets.push(set);
            }
            class_of.push(c);
        }
        engine.pool_models = pool_models;
        engine.class_of = class_of;
        Ok(engine)
    }

    fn vocab(&self) -> &Vocabulary {
        self.corpus.vocab()
    }

    fn encode(&self, se: &SeSet) -> u128 {
        let n = self.vocab().len();
        se.iter().fold(0, |m, (x, y)| {
            m | 1u128 << self.slots[((y << n) | x) as usize]
        })
    }

    fn decode(&self, m: u128) -> SeSet {
        SeSet::from_pairs(self.vocab(), bits128(m).map(|i| self.pairs[i]))
            .expect("pairs come from the vocabulary")
    }

    fn intern_rule(&mut self, rule: &Rule) -> Result<usize> {
        if let Some(&i) = self.index.get(rule) {
            return Ok(i);
        }
        if self.rules.len() == 128 {
            return Err(Error::Invalid("rule universe exceeds 128 rules".into()));
        }
        let models = self.encode(&rule_se_models(rule, self.corpus.vocab())?);
        self.index.insert(rule.clone(), self.rules.len());
        self.rules.push(rule.clone());
        self.rule_models.push(models);
        Ok(self.rules.len() - 1)
    }

    fn intern(&mut self, p: &Program) -> Result<u128> {
        let mut mask = 0;
        for rule in p {
            mask |= 1u128 << self.intern_rule(rule)?;
        }
        Ok(mask)
    }

    fn pool_bits(&self) -> u128 {
        (1u128 << self.corpus.pool().len()) - 1
    }

    fn models(&self, m: u128) -> u128 {
        let pool = self.pool_bits();
        bits128(m & !pool).fold(self.pool_models[(m & pool) as usize], |s, i| {
            s & self.rule_models[i]
        })
    }

    fn class(&self, pool_mask: u128) -> usize {
        self.class_of[pool_mask as usize]
    }

    fn program(&self, m: u128) -> Program {
        bits128(m).map(|i| self.rules[i].clone()).collect()
    }

    fn lattice(&self, p: u32) -> Result<SubsetLattice> {
        let program = self.corpus.program_of(p);
        let models = bits(p)
            .map(|i| Ok(self.decode(self.rule_models[i])))
            .collect::<Result<Vec<_>>>()?;
        SubsetLattice::from_parts(program.iter().cloned().collect(), models, self.vocab())
    }

    fn corpus_masks(&self) -> Vec<u128> {
        self.corpus.masks.iter().map(|&m| m as u128).collect()
    }

    fn prepare_distance(&mut self) -> Result<()> {
        let p_classes: HashSet<usize> = self
            .corpus
            .masks
            .iter()
            .map(|&m| self.class_of[m as usize])
            .collect();
        let mut p_classes: Vec<usize> = p_classes.into_iter().collect();
        p_classes.sort_unstable();
        for cp in p_classes {
            for cq in 0..self.class_sets.len() {
                if self.distance.contains_key(&(cp, cq)) {
                    continue;
                }
                let out = distance_revise_models(&self.class_sets[cp], &self.class_sets[cq]);
                let program = canonical_program(&out)?;
                let mask = self.intern(&program)?;
                self.distance.insert((cp, cq), mask);
            }
        }
        Ok(())
    }

    /// Operator configurations for program `p`, each as its output table
    /// over the SE classes of second arguments.
    fn configs(
        &self,
        family: &OperatorFamily,
        direction: Direction,
        p: u32,
    ) -> Result<Vec<Config>> {
        let lattice = self.lattice(p)?;
        let spread = Spread::new(p);
        let targets = match direction {
            Direction::Revision => &self.class_sets,
            Direction::Contraction => &self.class_complements,
        };
        Ok(match family {
            OperatorFamily::PartialMeet(policy) => {
                let op = PartialMeet {
                    policy: policy.clone(),
                    direction,
                };
                let outs = self
                    .class_sets
                    .iter()
                    .map(|s| Ok(spread.apply(op.kept(&lattice, s)?)))
                    .collect::<Result<Vec<_>>>()?;
                vec![Config {
                    operator: OperatorConfig::PartialMeet(policy.clone()),
                    outs,
                    adds_q: direction == Direction::Revision,
                }]
            }
            OperatorFamily::Ensconcement => {
                let mut seen: HashSet<Vec<u128>> = HashSet::new();
                let mut out = Vec::new();
                for ranks in all_rankings(&lattice) {
                    let outs: Vec<u128> = targets
                        .iter()
                        .map(|t| spread.apply(kept_mask(&lattice, &ranks, t)))
                        .collect();
                    if seen.insert(outs.clone()) {
                        out.push(Config {
                            operator: OperatorConfig::Ensconcement(Ensconcement::from_ranks(
                                &lattice, &ranks,
                            )),
                            outs,
                            adds_q: direction == Direction::Revision,
                        });
                    }
                }
                out
            }
            OperatorFamily::Distance => {
                if direction != Direction::Revision {
                    return Err(Error::Invalid(
                        "distance-based change is revision only".into(),
                    ));
                }
                let cp = self.class_of[p as usize];
                let outs = (0..self.class_sets.len())
                    .map(|cq| {
                        self.distance
                            .get(&(cp, cq))
                            .copied()
                            .ok_or_else(|| Error::Invalid("distance table not prepared".into()))
                    })
                    .collect::<Result<Vec<_>>>()?;
                vec![Config {
                    operator: OperatorConfig::Distance,
                    outs,
                    adds_q: false,
                }]
            }
        })
    }

    fn instance(
        &self,
        p: u128,
        q: u128,
        operator: &OperatorConfig,
        direction: Direction,
    ) -> Instance {
        Instance::new(
            self.vocab(),
            self.program(p),
            self.program(q),
            operator.clone(),
            direction,
        )
    }
}

/// Maps lattice masks (over the rules of one corpus program) to pool masks.
struct Spread {
    positions: Vec<usize>,
}

impl Spread {
    fn new(p: u32) -> Spread {
        Spread {
            positions: bits(p).collect(),
        }
    }

    fn apply(&self, lattice_mask: u32) -> u128 {
        bits(lattice_mask).fold(0, |m, i| m | 1u128 << self.positions[i])
    }
}

struct Config {
    operator: OperatorConfig,
    outs: Vec<u128>,
    adds_q: bool,
}

#[derive(Debug, Clone, Default)]
struct Tally {
    checked: u64,
    failures: u64,
    witness: Option<Witness>,
}

impl Tally {
    fn record(&mut self, ok: bool, make: impl FnOnce() -> Instance) {
        self.record_with(ok, || Witness::new(make()));
    }

    fn record_with(&mut self, ok: bool, make: impl FnOnce() -> Witness) {
        self.checked += 1;
        if !ok {
            self.failures += 1;
            if self.witness.is_none() {
                self.witness = Some(make());
            }
        }
    }

    fn merge(&mut self, other: Tally) {
        self.checked += other.checked;
        self.failures += other.failures;
        if self.witness.is_none() {
            self.witness = other.witness;
        }
    }
}

fn merge_tallies(per_item: Vec<Vec<Tally>>, width: usize) -> Vec<Tally> {
    let mut total = vec![Tally::default(); width];
    for tallies in per_item {
        for (t, o) in total.iter_mut().zip(tallies) {
            t.merge(o);
        }
    }
    total
}

fn reports(operator: &str, properties: &[Property], tallies: Vec<Tally>) -> Vec<PostulateReport> {
    properties
        .iter()
        .zip(tallies)
        .map(|(&property, t)| PostulateReport {
            operator: operator.to_string(),
            property,
            checked: t.checked,
            failures: t.failures,
            witness: t.witness,
        })
        .collect()
}

/// Fast view of one operator configuration at one program.
struct View<'a> {
    engine: &'a Engine,
    p: u128,
    config: &'a Config,
}

impl View<'_> {
    fn out(&self, q: u128) -> u128 {
        let kept = self.config.outs[self.engine.class(q)];
        if self.config.adds_q {
            kept | q
        } else {
            kept
        }
    }

    fn models(&self, m: u128) -> u128 {
        self.engine.models(m)
    }

    fn sat(&self, m: u128) -> bool {
        self.models(m) != 0
    }

    fn implies(&self, a: u128, q: u128) -> bool {
        self.models(a) & !self.models(q) == 0
    }

    fn known(&self, m: u128) -> bool {
        m >> self.engine.rules.len() == 0 || self.engine.rules.len() == 128
    }

    fn revision_relevance(&self, q: u128, out: u128) -> bool {
        let removed = self.p & !out;
        if removed == 0 {
            return true;
        }
        let pq = self.p | q;
        if out & !pq != 0 {
            return false;
        }
        let free = (pq & !out) as u32;
        bits128(removed).all(|r| {
            submasks32(free).filter(|&s| s != free).any(|s| {
                let mid = out | s as u128;
                self.sat(mid) && !self.sat(mid | 1u128 << r)
            })
        })
    }

    fn contraction_relevance(&self, q: u128, out: u128) -> bool {
        let removed = self.p & !out;
        if removed == 0 {
            return true;
        }
        if out & !self.p != 0 {
            return false;
        }
        let free = removed as u32;
        bits128(removed).all(|r| {
            submasks32(free).filter(|&s| s != free).any(|s| {
                let mid = out | s as u128;
                !self.implies(mid, q) && self.implies(mid | 1u128 << r, q)
            })
        })
    }

    fn elimination(&self, q: u128, out: u128) -> bool {
        let kept = self.models(out);
        let qm = self.models(q);
        bits128(self.p & !out).all(|r| kept & !(qm | self.engine.rule_models[r]) != 0)
    }
}

/// Subset signatures of second arguments: bit `k` records the test on the
/// `k`-th subset of `p`.
fn signatures(p: u128, qs: &[u128], test: impl Fn(u128, u128) -> bool) -> Vec<Vec<u64>> {
    let subs: Vec<u128> = submasks32(p as u32).map(|s| s as u128).collect();
    qs.iter()
        .map(|&q| {
            let mut sig = vec![0u64; subs.len().div_ceil(64)];
            for (k, &s) in subs.iter().enumerate() {
                if test(s, q) {
                    sig[k / 64] |= 1 << (k % 64);
                }
            }
            sig
        })
        .collect()
}

fn revision_properties(family: &OperatorFamily) -> Vec<Property> {
    let mut out: Vec<Property> = REVISION_POSTULATES
        .iter()
        .map(|&p| Property::Postulate(p))
        .collect();
    out.extend(
        MODEL_REVISION_POSTULATES
            .iter()
            .filter(|&&p| p != R4m || *family != OperatorFamily::Ensconcement)
            .map(|&p| Property::Postulate(p)),
    );
    out
}

/// Checks every revision postulate (plus the model-level variants) for
/// `family` over all programs `P` and second arguments `Q`, `R` of the
/// corpus.
pub fn check_revision_postulates(
    family: &OperatorFamily,
    corpus: &Corpus,
) -> Result<Vec<PostulateReport>> {
    let mut engine = Engine::new(corpus)?;
    if *family == OperatorFamily::Distance {
        engine.prepare_distance()?;
    }
    let engine = engine;
    let props = revision_properties(family);
    let qs = engine.corpus_masks();
    let slot = |post: Postulate| props.iter().position(|&p| p == Property::Postulate(post));
    let per_p: Vec<Result<(Vec<Tally>, Vec<ModelEntry>)>> = par_map(qs.len(), |pi| {
        let p = qs[pi];
        let configs = engine.configs(family, Direction::Revision, p as u32)?;
        let sigs = signatures(p, &qs, |s, q| engine.models(s | q) != 0);
        let mut tallies = vec![Tally::default(); props.len()];
        let mut entries = Vec::new();
        for config in &configs {
            let view = View {
                engine: &engine,
                p,
                config,
            };
            let inst = |q: u128| engine.instance(p, q, &config.operator, Direction::Revision);
            let outs: Vec<u128> = qs.iter().map(|&q| view.out(q)).collect();
            for (qi, &q) in qs.iter().enumerate() {
                let o = outs[qi];
                let pq = p | q;
                let checks: [(Postulate, bool); 11] = [
                    (R1, view.known(o)),
                    (R2, q & !o == 0),
                    (R3, o & !pq == 0),
                    (R4, !view.sat(pq) || pq & !o == 0),
                    (R5, view.sat(o) == view.sat(q)),
                    (R1b, q & !o == 0),
                    (R2b, o & !pq == 0),
                    (R5b, !view.sat(q) || view.sat(o)),
                    (R1m, view.implies(o, q)),
                    (R2m, {
                        let both = view.models(p) & view.models(q);
                        both == 0 || view.models(o) == both
                    }),
                    (R3m, !view.sat(q) || view.sat(o)),
                ];
                for (post, ok) in checks {
                    if let Some(k) = slot(post) {
                        tallies[k].record(ok, || inst(q));
                    }
                }
                if let Some(k) = slot(R3b) {
                    tallies[k].record(view.revision_relevance(q, o), || inst(q));
                }
                if slot(R4m).is_some() {
                    entries.push(ModelEntry {
                        p,
                        q,
                        class_p: engine.class(p),
                        class_q: engine.class(q),
                        models: view.models(o),
                        operator: config.operator.clone(),
                    });
                }
            }
            for (qi, &q) in qs.iter().enumerate() {
                let o_q = outs[qi];
                let m_q = view.models(o_q);
                for (ri, &r) in qs.iter().enumerate() {
                    let qr = q | r;
                    let o_qr = view.out(qr);
                    let o_r = outs[ri];
                    let expanded = o_q | r;
                    let with_r = || inst(q).with_r(engine.program(r));
                    let checks: [(Postulate, bool); 5] = [
                        (
                            R6,
                            engine.class(q) != engine.class(r) || m_q == view.models(o_r),
                        ),
                        (R7, o_qr & !(o_q | r) == 0),
                        (R8, !view.sat(expanded) || expanded & !o_qr == 0),
                        (R4b, sigs[qi] != sigs[ri] || p & o_q == p & o_r),
                        (R5m, m_q & view.models(r) & !view.models(o_qr) == 0),
                    ];
                    for (post, ok) in checks {
                        if let Some(k) = slot(post) {
                            tallies[k].record(ok, with_r);
                        }
                    }
                }
            }
        }
        Ok((tallies, entries))
    });
    let mut all = Vec::with_capacity(per_p.len());
    let mut model_tally = Tally::default();
    let mut first: HashMap<(usize, usize), ModelEntry> = HashMap::new();
    for item in per_p {
        let (tallies, entries) = item?;
        all.push(tallies);
        for e in entries {
            match first.get(&(e.class_p, e.class_q)) {
                None => {
                    first.insert((e.class_p, e.class_q), e);
                }
                Some(f) => model_tally.record(f.models == e.models, || {
                    engine
                        .instance(f.p, f.q, &f.operator, Direction::Revision)
                        .with_p_alt(engine.program(e.p))
                        .with_r(engine.program(e.q))
                }),
            }
        }
    }
    let mut tallies = merge_tallies(all, props.len());
    if let Some(k) = slot(R4m) {
        tallies[k] = model_tally;
    }
    Ok(reports(&family.id(), &props, tallies))
}

struct ModelEntry {
    p: u128,
    q: u128,
    class_p: usize,
    class_q: usize,
    models: u128,
    operator: OperatorConfig,
}

/// Checks every contraction postulate for `family`, plus the per-instance
/// implication from relevance to disjunctive elimination.
pub fn check_contraction_postulates(
    family: &OperatorFamily,
    corpus: &Corpus,
) -> Result<Vec<PostulateReport>> {
    if *family == OperatorFamily::Distance {
        return Err(Error::Invalid(
            "distance-based change is revision only".into(),
        ));
    }
    let engine = Engine::new(corpus)?;
    let mut props: Vec<Property> = CONTRACTION_POSTULATES
        .iter()
        .map(|&p| Property::Postulate(p))
        .collect();
    props.push(Property::RelevanceImpliesElimination);
    let relevance_slot = props.len() - 1;
    let qs = engine.corpus_masks();
    let slot = |post: Postulate| {
        props
            .iter()
            .position(|&p| p == Property::Postulate(post))
            .expect("every contraction postulate has a slot")
    };
    let per_p: Vec<Result<Vec<Tally>>> = par_map(qs.len(), |pi| {
        let p = qs[pi];
        let configs = engine.configs(family, Direction::Contraction, p as u32)?;
        let sigs = signatures(p, &qs, |s, q| engine.models(s) & !engine.models(q) != 0);
        let mut tallies = vec![Tally::default(); props.len()];
        for config in &configs {
            let view = View {
                engine: &engine,
                p,
                config,
            };
            let inst = |q: u128| engine.instance(p, q, &config.operator, Direction::Contraction);
            let outs: Vec<u128> = qs.iter().map(|&q| view.out(q)).collect();
            for (qi, &q) in qs.iter().enumerate() {
                let o = outs[qi];
                let relevance = view.contraction_relevance(q, o);
                let elimination = view.elimination(q, o);
                let tautology = view.models(q) == engine.full;
                let checks: [(Postulate, bool); 11] = [
                    (C1, view.known(o)),
                    (C2, o & !p == 0),
                    (C3, view.implies(p, q) || o == p),
                    (C4, tautology || !view.implies(o, q)),
                    (C5, p & !(o | q) == 0),
                    (C1b, o & !p == 0),
                    (C2b, tautology || !view.implies(o, q)),
                    (C3b, relevance),
                    (C5b, view.implies(p, q) || o == p),
                    (C8b, elimination),
                    (C8b, true),
                ];
                for (post, ok) in &checks[..10] {
                    tallies[slot(*post)].record(*ok, || inst(q));
                }
                tallies[relevance_slot].record(!relevance || elimination, || inst(q));
            }
            for (qi, &q) in qs.iter().enumerate() {
                let o_q = outs[qi];
                for (ri, &r) in qs.iter().enumerate() {
                    let o_r = outs[ri];
                    let o_qr = view.out(q | r);
                    let with_r = || inst(q).with_r(engine.program(r));
                    let same_class = engine.class(q) == engine.class(r);
                    let checks: [(Postulate, bool); 6] = [
                        (C6, !same_class || o_q == o_r),
                        (C6b, !same_class || o_q == o_r),
                        (C7, (o_q & o_r) & !o_qr == 0),
                        (C8, view.implies(o_qr, q) || o_qr & !o_q == 0),
                        (C4b, sigs[qi] != sigs[ri] || o_q == o_r),
                        (C7b, o_qr == o_q || o_qr == o_r || o_qr == o_q & o_r),
                    ];
                    for (post, ok) in checks {
                        tallies[slot(post)].record(ok, with_r);
                    }
                }
            }
        }
        Ok(tallies)
    });
    let per_p = per_p.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(reports(
        &family.id(),
        &props,
        merge_tallies(per_p, props.len()),
    ))
}

/// The operators whose identities and characterizations are checked:
/// three selection policies and every ensconcement.
fn bridge_policies() -> Vec<SelectionPolicy> {
    vec![
        SelectionPolicy::FullMeet,
        SelectionPolicy::MaxichoiceLex,
        SelectionPolicy::Relational(crate::partial_meet::Relation::by_size()),
    ]
}

/// Levi and Harper identities for partial meet (several policies) and for
/// every ensconcement of every corpus program, with the complement passed
/// as a raw SE set.
pub fn check_identity_bridges(corpus: &Corpus) -> Result<Vec<PostulateReport>> {
    let engine = Engine::new(corpus)?;
    let qs = engine.corpus_masks();
    let mut operators: Vec<String> = bridge_policies()
        .iter()
        .map(|p| format!("pm:{p}"))
        .collect();
    operators.push("ens".into());
    let width = operators.len() * 2;
    let per_p: Vec<Result<Vec<Tally>>> = par_map(qs.len(), |pi| {
        let p = qs[pi];
        let lattice = engine.lattice(p as u32)?;
        let spread = Spread::new(p as u32);
        let mut tallies = vec![Tally::default(); width];
        let mut run = |slot: usize,
                       config: OperatorConfig,
                       rev: &dyn ChangeOperator,
                       con: &dyn ChangeOperator|
         -> Result<()> {
            let table = |op: &dyn ChangeOperator, sets: &[SeSet]| -> Result<Vec<u128>> {
                sets.iter()
                    .map(|s| Ok(spread.apply(op.kept(&lattice, s)?)))
                    .collect()
            };
            let rev_q = table(rev, &engine.class_sets)?;
            let rev_bar = table(rev, &engine.class_complements)?;
            let con_q = table(con, &engine.class_sets)?;
            let con_bar = table(con, &engine.class_complements)?;
            for &q in &qs {
                let c = engine.class(q);
                tallies[2 * slot].record(rev_q[c] | q == con_bar[c] | q, || {
                    engine.instance(p, q, &config, Direction::Revision)
                });
                tallies[2 * slot + 1].record(con_q[c] == p & rev_bar[c], || {
                    engine.instance(p, q, &config, Direction::Contraction)
                });
            }
            Ok(())
        };
        for (slot, policy) in bridge_policies().into_iter().enumerate() {
            let rev = PartialMeet::revision(policy.clone());
            let con = PartialMeet::contraction(policy.clone());
            run(slot, OperatorConfig::PartialMeet(policy), &rev, &con)?;
        }
        let ens_slot = operators.len() - 1;
        for ranks in all_rankings(&lattice) {
            let ens = Ensconcement::from_ranks(&lattice, &ranks);
            let rev = EnsconcementOperator::revision(ens.clone());
            let con = EnsconcementOperator::contraction(ens.clone());
            run(ens_slot, OperatorConfig::Ensconcement(ens), &rev, &con)?;
        }
        Ok(tallies)
    });
    let per_p = per_p.into_iter().collect::<Result<Vec<_>>>()?;
    let totals = merge_tallies(per_p, width);
    let mut out = Vec::new();
    for (k, t) in totals.into_iter().enumerate() {
        out.push(PostulateReport {
            operator: operators[k / 2].clone(),
            property: if k % 2 == 0 {
                Property::LeviIdentity
            } else {
                Property::HarperIdentity
            },
            checked: t.checked,
            failures: t.failures,
            witness: t.witness,
        });
    }
    Ok(out)
}

/// The example of three facts with `c.` above `a.` and `b.`: revising by
/// `:- a.` and contracting by `a.` give outcomes no selection reaches.
pub fn outside_selection_instances() -> Vec<Instance> {
    let vocab = Vocabulary::new(["a", "b", "c"]);
    let prog = |t: &str| {
        parse_program(t, Some(&vocab))
            .expect("fixed program parses")
            .0
    };
    let p = prog("a. b. c.");
    let ens =
        Ensconcement::unchecked(vec![prog("a. b."), prog("c.")]).expect("levels are disjoint");
    vec![
        Instance::new(
            &vocab,
            p.clone(),
            prog(":- a."),
            OperatorConfig::Ensconcement(ens.clone()),
            Direction::Revision,
        ),
        Instance::new(
            &vocab,
            p,
            prog("a."),
            OperatorConfig::Ensconcement(ens),
            Direction::Contraction,
        ),
    ]
}

/// Partition realization of every achievable partial meet outcome, lifted
/// subset ensconcements against rule ensconcements, and the outcomes of
/// ensconcement change that no selection reaches.
pub fn check_characterizations(corpus: &Corpus) -> Result<Vec<PostulateReport>> {
    let engine = Engine::new(corpus)?;
    let qs = engine.corpus_masks();
    const DIRECTIONS: [Direction; 2] = [Direction::Revision, Direction::Contraction];
    let per_p: Vec<Result<Vec<Tally>>> = par_map(qs.len(), |pi| {
        let p = qs[pi];
        let lattice = engine.lattice(p as u32)?;
        let spread = Spread::new(p as u32);
        let mut tallies = vec![Tally::default(); 6];
        let mut partitions: HashMap<u32, Option<Vec<usize>>> = HashMap::new();
        let rankings = all_rankings(&lattice);
        for (d, &direction) in DIRECTIONS.iter().enumerate() {
            let targets = match direction {
                Direction::Revision => &engine.class_sets,
                Direction::Contraction => &engine.class_complements,
            };
            // Per class: (meet of the selection, realized kept set) for
            // every selection.
            let outcomes: Vec<Vec<(u32, Option<u32>)>> = targets
                .iter()
                .map(|t| {
                    let keeps = if t.is_empty() {
                        vec![lattice.full_mask()]
                    } else {
                        subfamily_meets(&lattice.maximal_meeting(t))
                    };
                    keeps
                        .into_iter()
                        .map(|keep| {
                            let ranks = partitions
                                .entry(keep)
                                .or_insert_with(|| partition_ranks(&lattice, keep));
                            (keep, ranks.as_ref().map(|r| kept_mask(&lattice, r, t)))
                        })
                        .collect()
                })
                .collect();
            let adds_q = direction == Direction::Revision;
            let reached: Vec<Vec<u32>> = targets
                .iter()
                .map(|t| rankings.iter().map(|r| kept_mask(&lattice, r, t)).collect())
                .collect();
            for &q in &qs {
                let c = engine.class(q);
                let ok = outcomes[c].iter().all(|&(keep, _)| {
                    reached[c].iter().any(|&real| {
                        spread.apply(keep) | (q * adds_q as u128)
                            == spread.apply(real) | (q * adds_q as u128)
                    })
                });
                tallies[4 + d].record(ok, || {
                    engine.instance(
                        p,
                        q,
                        &OperatorConfig::PartialMeet(SelectionPolicy::FullMeet),
                        direction,
                    )
                });
            }
            for &q in &qs {
                let ok = outcomes[engine.class(q)]
                    .iter()
                    .all(|&(keep, real)| match real {
                        None => false,
                        Some(real) if adds_q => spread.apply(keep) | q == spread.apply(real) | q,
                        Some(real) => keep == real,
                    });
                tallies[d].record(ok, || {
                    engine.instance(
                        p,
                        q,
                        &OperatorConfig::PartialMeet(SelectionPolicy::FullMeet),
                        direction,
                    )
                });
            }
            for ranks in &rankings {
                let lifted = lift_ranks(&lattice, ranks);
                let agree: Vec<bool> = targets
                    .iter()
                    .map(|t| lifted.kept_mask(&lattice, t) == kept_mask(&lattice, ranks, t))
                    .collect();
                let config =
                    OperatorConfig::Ensconcement(Ensconcement::from_ranks(&lattice, ranks));
                for &q in &qs {
                    tallies[2 + d].record(agree[engine.class(q)], || {
                        engine.instance(p, q, &config, direction)
                    });
                }
            }
        }
        Ok(tallies)
    });
    let per_p = per_p.into_iter().collect::<Result<Vec<_>>>()?;
    let totals = merge_tallies(per_p, 6);
    let names = [
        "pm-revision",
        "pm-contraction",
        "ens-revision",
        "ens-contraction",
        "pm-revision",
        "pm-contraction",
    ];
    let mut out: Vec<PostulateReport> = totals
        .into_iter()
        .enumerate()
        .map(|(k, t)| PostulateReport {
            operator: names[k].into(),
            property: match k {
                0 | 1 => Property::PartitionRealization,
                2 | 3 => Property::SubsetLift,
                _ => Property::EnsconcementRealization,
            },
            checked: t.checked,
            failures: t.failures,
            witness: t.witness,
        })
        .collect();
    for inst in outside_selection_instances() {
        let ok = holds(Property::OutsideSelection, &inst)?;
        out.push(PostulateReport {
            operator: match inst.direction {
                Direction::Revision => "ens-revision".into(),
                Direction::Contraction => "ens-contraction".into(),
            },
            property: Property::OutsideSelection,
            checked: 1,
            failures: u64::from(!ok),
            witness: (!ok).then(|| Witness::new(inst)),
        });
    }
    Ok(out)
}

/// Runs `properties` on every pair of corpus programs through [`holds`].
fn pairwise(
    corpus: &Corpus,
    rows: &[(String, Property, OperatorConfig, Direction)],
) -> Result<Vec<PostulateReport>> {
    let programs: Vec<Program> = corpus.programs().collect();
    let per_p: Vec<Result<Vec<Tally>>> = par_map(programs.len(), |pi| {
        let mut tallies = vec![Tally::default(); rows.len()];
        for q in &programs {
            for (k, (_, property, config, direction)) in rows.iter().enumerate() {
                let inst = Instance::new(
                    corpus.vocab(),
                    programs[pi].clone(),
                    q.clone(),
                    config.clone(),
                    *direction,
                );
                let ok = holds(*property, &inst)?;
                tallies[k].record_with(ok, || Witness::for_property(*property, inst));
            }
        }
        Ok(tallies)
    });
    let per_p = per_p.into_iter().collect::<Result<Vec<_>>>()?;
    let totals = merge_tallies(per_p, rows.len());
    Ok(rows
        .iter()
        .zip(totals)
        .map(|((op, property, _, _), t)| PostulateReport {
            operator: op.clone(),
            property: *property,
            checked: t.checked,
            failures: t.failures,
            witness: t.witness,
        })
        .collect())
}

/// Conflict coverage and locality of the relevant modules, and membership
/// of the localized full-meet result among the achievable outcomes.
pub fn check_localization(corpus: &Corpus) -> Result<Vec<PostulateReport>> {
    let full = OperatorConfig::PartialMeet(SelectionPolicy::FullMeet);
    let rows = vec![
        (
            "modules".to_string(),
            Property::ConflictCoverage,
            full.clone(),
            Direction::Revision,
        ),
        (
            "modules".to_string(),
            Property::ConflictLocality,
            full.clone(),
            Direction::Revision,
        ),
        (
            "pm:any-selection revision".to_string(),
            Property::LocalizedAchievable,
            full.clone(),
            Direction::Revision,
        ),
        (
            "pm:any-selection contraction".to_string(),
            Property::LocalizedAchievable,
            full.clone(),
            Direction::Contraction,
        ),
        (
            "pm:any-selection revision".to_string(),
            Property::LocalizedAchievableSatisfiable,
            full.clone(),
            Direction::Revision,
        ),
        (
            "pm:any-selection contraction".to_string(),
            Property::LocalizedAchievableSatisfiable,
            full,
            Direction::Contraction,
        ),
    ];
    pairwise(corpus, &rows)
}

/// Screened consolidation against partial meet revision, under SE and
/// answer set consistency.
pub fn check_baseline_bridges(corpus: &Corpus) -> Result<Vec<PostulateReport>> {
    let full = OperatorConfig::PartialMeet(SelectionPolicy::FullMeet);
    let rows = vec![
        (
            "screened-se".to_string(),
            Property::ScreenedRemainderAchievable,
            full.clone(),
            Direction::Revision,
        ),
        (
            "pm-as".to_string(),
            Property::AnswerSetConsolidation,
            full,
            Direction::Revision,
        ),
    ];
    pairwise(corpus, &rows)
}

/// Reports as an aligned text table, one row per report.
pub fn render_table(reports: &[PostulateReport]) -> String {
    let width = reports.iter().map(|r| r.operator.len()).max().unwrap_or(0);
    let prop_width = reports
        .iter()
        .map(|r| r.property.name().chars().count())
        .max()
        .unwrap_or(0);
    let mut out = String::new();
    for r in reports {
        let name = r.property.name();
        let pad = prop_width - name.chars().count();
        out.push_str(&format!(
            "{:<width$}  {}{}  {:<5}  {:>9}",
            r.operator,
            name,
            " ".repeat(pad),
            if r.holds() { "holds" } else { "fails" },
            r.checked,
        ));
        if let Some(w) = &r.witness {
            out.push_str(&format!("  {w}"));
        }
        out.push('\n');
    }
    out
}

pub fn reports_to_json(reports: &[PostulateReport]) -> Value {
    Value::Array(reports.iter().map(PostulateReport::to_json).collect())
}
