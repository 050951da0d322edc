//! Searches for concrete programs realizing abstract counterexamples given
//! as families of SE-model regions, verifies each against the harness and
//! writes them as JSON fixtures.
//!
//! Each abstract example names regions `A`, `B`, ... and lists, per rule,
//! the regions it has as SE models. The search picks one rule per entry so
//! that every region (the SE interpretations with exactly that membership
//! pattern) is non-empty; when the example fixes the whole SE space, no
//! interpretation may fall outside the regions. The second arguments are
//! built with `canonical_program` from unions of regions.
//!
//! Usage: `cargo run --release -p lpchange --example find_fixtures [out_dir]`

use std::collections::{BTreeMap, HashMap};
use std::path::PathBuf;

use lpchange::ensconcement::Ensconcement;
use lpchange::harness::{holds, Instance, OperatorConfig, Postulate, Property};
use lpchange::operator::Direction;
use lpchange::partial_meet::{Relation, Score, SelectionPolicy};
use lpchange::program::{Program, Rule, Vocabulary};
use lpchange::semantics::{canonical_program, rule_se_models, SeSet};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

const RESTARTS: usize = 500;

#[derive(Clone)]
enum Op {
    Policy(&'static str),
    /// Weights on subsets given by rule indices; unlisted subsets score
    /// their size.
    Weighted(Vec<(Vec<usize>, Score)>),
    /// Levels of rule indices, least ensconced first.
    Levels(Vec<Vec<usize>>),
}

struct Example {
    name: &'static str,
    postulate: &'static str,
    direction: Direction,
    rules: Vec<&'static str>,
    closed: bool,
    q: &'static str,
    /// Regions of `Q + R`, when the example gives those instead of `R`.
    q_plus_r: Option<&'static str>,
    r: Option<&'static str>,
    op: Op,
}

fn examples() -> Vec<Example> {
    let tie = Op::Levels(vec![vec![0, 1], vec![2]]);
    let weighted = Op::Weighted(vec![
        (vec![0, 1], Score::from_integer(2)),
        (vec![0, 4], Score::new(5, 2)),
        (vec![0, 1, 2], Score::from_integer(3)),
        (vec![0, 1, 3], Score::from_integer(3)),
    ]);
    vec![
        Example {
            name: "pm-revision-7",
            postulate: "*7",
            direction: Direction::Revision,
            rules: vec!["BC", "AC", "ABC"],
            closed: false,
            q: "AB",
            q_plus_r: Some("A"),
            r: None,
            op: Op::Policy("relational-max"),
        },
        Example {
            name: "pm-revision-8",
            postulate: "*8",
            direction: Direction::Revision,
            rules: vec!["ABCDE", "ABCE", "AE", "BE", "DE"],
            closed: false,
            q: "ABCD",
            q_plus_r: Some("CD"),
            r: None,
            op: weighted.clone(),
        },
        Example {
            name: "pm-contraction-8",
            postulate: "-8",
            direction: Direction::Contraction,
            rules: vec!["ABCDE", "ABCE", "AE", "BE", "DE"],
            closed: false,
            q: "ABE",
            q_plus_r: Some("E"),
            r: None,
            op: weighted,
        },
        Example {
            name: "pm-contraction-7b",
            postulate: "-7b",
            direction: Direction::Contraction,
            rules: vec!["ABCDE", "ABE", "ACE", "CDE"],
            closed: false,
            q: "ADE",
            q_plus_r: None,
            r: Some("BCE"),
            op: Op::Policy("full-meet"),
        },
        Example {
            name: "ens-revision-7",
            postulate: "*7",
            direction: Direction::Revision,
            rules: vec!["BC", "AC", "ABC"],
            closed: false,
            q: "AB",
            q_plus_r: Some("A"),
            r: None,
            op: tie.clone(),
        },
        Example {
            name: "ens-revision-3b",
            postulate: "*3b",
            direction: Direction::Revision,
            rules: vec!["CD", "BC", "ABC"],
            closed: true,
            q: "AB",
            q_plus_r: None,
            r: None,
            op: tie.clone(),
        },
        Example {
            name: "ens-contraction-3b",
            postulate: "-3b",
            direction: Direction::Contraction,
            rules: vec!["CD", "BC", "ABC"],
            closed: true,
            q: "C",
            q_plus_r: None,
            r: None,
            op: tie.clone(),
        },
        Example {
            name: "ens-revision-4b",
            postulate: "*4b",
            direction: Direction::Revision,
            rules: vec!["CD", "AC", "ABC"],
            closed: true,
            q: "AB",
            q_plus_r: None,
            r: Some("A"),
            op: tie.clone(),
        },
        Example {
            name: "ens-contraction-4b",
            postulate: "-4b",
            direction: Direction::Contraction,
            rules: vec!["CD", "AC", "ABC"],
            closed: true,
            q: "C",
            q_plus_r: None,
            r: Some("BC"),
            op: tie,
        },
    ]
}

/// Distinct SE sets of single rules over `vocab`, each with its shortest
/// rule, as bit masks over the SE interpretations of `points`.
fn rule_catalogue(vocab: &Vocabulary, points: &[(u32, u32)]) -> Vec<(u64, Rule)> {
    let atoms = vocab.atoms();
    let n = atoms.len();
    let pick = |m: u32| -> Vec<String> {
        (0..n)
            .filter(|i| m & (1 << i) != 0)
            .map(|i| atoms[i].clone())
            .collect()
    };
    let mut best: HashMap<u64, Rule> = HashMap::new();
    for code in 0u32..1 << (4 * n) {
        let part = |k: u32| (code >> (k * n as u32)) & ((1 << n) - 1);
        let rule = Rule::new(pick(part(0)), pick(part(1)), pick(part(2)), pick(part(3)));
        let se = rule_se_models(&rule, vocab).expect("atoms are in the vocabulary");
        let mask = encode(&se, points);
        let shorter = best.get(&mask).map_or(true, |old| {
            (rule.text().len(), rule.text()) < (old.text().len(), old.text())
        });
        if shorter {
            best.insert(mask, rule);
        }
    }
    let mut out: Vec<(u64, Rule)> = best.into_iter().collect();
    out.sort_by(|a, b| (a.1.text().len(), a.1.text()).cmp(&(b.1.text().len(), b.1.text())));
    out
}

fn encode(se: &SeSet, points: &[(u32, u32)]) -> u64 {
    points
        .iter()
        .enumerate()
        .filter(|(_, &(x, y))| se.contains(x, y))
        .fold(0, |m, (i, _)| m | 1 << i)
}

fn decode(mask: u64, points: &[(u32, u32)], vocab: &Vocabulary) -> SeSet {
    let pairs = points
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, &p)| p);
    SeSet::from_pairs(vocab, pairs).expect("points come from the vocabulary")
}

/// Visits rule choices where every region is non-empty (and, for closed
/// examples, the regions cover every interpretation) until `visit` returns
/// true or the budget of complete choices runs out.
fn search(
    catalogue: &[(u64, Rule)],
    signatures: &[u32],
    k: usize,
    all: u64,
    closed: bool,
    order: &[usize],
    visit: &mut dyn FnMut(&[usize], &[u64]) -> bool,
) -> bool {
    struct Ctx<'a> {
        catalogue: &'a [(u64, Rule)],
        order: &'a [usize],
        signatures: &'a [u32],
        k: usize,
        all: u64,
        closed: bool,
        budget: usize,
    }
    fn go(
        ctx: &mut Ctx<'_>,
        chosen: &mut Vec<usize>,
        regions: Vec<u64>,
        visit: &mut dyn FnMut(&[usize], &[u64]) -> bool,
    ) -> bool {
        let Ctx {
            catalogue,
            signatures,
            k,
            all,
            closed,
            ..
        } = *ctx;
        let i = chosen.len();
        if i == k {
            let covered = regions.iter().fold(0, |m, r| m | r);
            if closed && covered != all {
                return false;
            }
            ctx.budget = ctx.budget.saturating_sub(1);
            return visit(chosen, &regions);
        }
        for &c in ctx.order {
            let mask = &catalogue[c].0;
            if chosen.contains(&c) {
                continue;
            }
            let next: Vec<u64> = regions
                .iter()
                .zip(signatures)
                .map(|(&r, &sig)| {
                    if sig & (1 << i) != 0 {
                        r & mask
                    } else {
                        r & !mask
                    }
                })
                .collect();
            if next.iter().any(|&r| r == 0) {
                continue;
            }
            if closed {
                // Points outside every region stay outside; in a closed
                // example there must be none. A point leaves all regions
                // once its pattern on the chosen rules matches no letter.
                let prefix = (1u32 << (i + 1)) - 1;
                let stray = (0..64).filter(|p| all & (1 << p) != 0).any(|p| {
                    let pattern = chosen
                        .iter()
                        .chain([&c])
                        .enumerate()
                        .filter(|(_, &cc)| catalogue[cc].0 & (1 << p) != 0)
                        .fold(0u32, |m, (j, _)| m | 1 << j);
                    !signatures.iter().any(|s| s & prefix == pattern)
                });
                if stray {
                    continue;
                }
            }
            chosen.push(c);
            if go(ctx, chosen, next, visit) {
                return true;
            }
            chosen.pop();
            if ctx.budget == 0 {
                return false;
            }
        }
        false
    }
    let mut ctx = Ctx {
        catalogue,
        order,
        signatures,
        k,
        all,
        closed,
        budget: 20_000,
    };
    go(
        &mut ctx,
        &mut Vec::new(),
        vec![all; signatures.len()],
        visit,
    )
}

fn letters_of(ex: &Example) -> Vec<char> {
    let mut letters: Vec<char> = ex
        .rules
        .iter()
        .chain([&ex.q])
        .chain(ex.q_plus_r.iter())
        .chain(ex.r.iter())
        .flat_map(|s| s.chars())
        .collect();
    letters.sort_unstable();
    letters.dedup();
    letters
}

fn region_union(text: &str, letters: &[char], regions: &[u64]) -> u64 {
    text.chars()
        .map(|c| regions[letters.iter().position(|&l| l == c).expect("known letter")])
        .fold(0, |m, r| m | r)
}

fn build(ex: &Example, vocab: &Vocabulary) -> Option<(Instance, Value)> {
    let n = vocab.len();
    let points: Vec<(u32, u32)> = (0u32..1 << n)
        .flat_map(|y| {
            (0u32..1 << n)
                .filter(move |x| x & !y == 0)
                .map(move |x| (x, y))
        })
        .collect();
    let all = (1u64 << points.len()) - 1;
    let catalogue = rule_catalogue(vocab, &points);
    let letters = letters_of(ex);
    let signatures: Vec<u32> = letters
        .iter()
        .map(|&l| {
            ex.rules
                .iter()
                .enumerate()
                .filter(|(_, r)| r.contains(l))
                .fold(0, |m, (i, _)| m | 1 << i)
        })
        .collect();
    // The first pass keeps the shortest rules first; later passes restart
    // from seeded shuffles to leave the neighbourhood of early choices.
    let mut order: Vec<usize> = (0..catalogue.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut found = None;
    for _ in 0..RESTARTS {
        search(
            &catalogue,
            &signatures,
            ex.rules.len(),
            all,
            ex.closed,
            &order,
            &mut |chosen, regions| {
                found = attempt(ex, vocab, &points, &catalogue, &letters, chosen, regions);
                found.is_some()
            },
        );
        if found.is_some() {
            break;
        }
        order.shuffle(&mut rng);
    }
    found
}

fn attempt(
    ex: &Example,
    vocab: &Vocabulary,
    points: &[(u32, u32)],
    catalogue: &[(u64, Rule)],
    letters: &[char],
    chosen: &[usize],
    regions: &[u64],
) -> Option<(Instance, Value)> {
    let (points, letters) = (points.to_vec(), letters.to_vec());
    let rules: Vec<Rule> = chosen.iter().map(|&c| catalogue[c].1.clone()).collect();
    let program_of = |mask: u64| canonical_program(&decode(mask, &points, vocab)).ok();
    let well_defined = |mask: u64| decode(mask, &points, vocab).is_well_defined();
    let q_mask = region_union(ex.q, &letters, &regions);
    let r_mask = ex
        .q_plus_r
        .or(ex.r)
        .map(|t| region_union(t, &letters, &regions));
    if !well_defined(q_mask) || r_mask.is_some_and(|m| !well_defined(m)) {
        return None;
    }
    let p: Program = rules.iter().cloned().collect();
    let q = program_of(q_mask)?;
    let r = match r_mask {
        Some(m) => Some(program_of(m)?),
        None => None,
    };
    let subset = |idx: &[usize]| -> Program { idx.iter().map(|&i| rules[i].clone()).collect() };
    let (operator, op_json) = match &ex.op {
        Op::Policy(name) => (
            OperatorConfig::PartialMeet(SelectionPolicy::parse(name).ok()?),
            json!({ "method": "pm", "policy": name }),
        ),
        Op::Weighted(weights) => {
            let map: BTreeMap<String, Score> = weights
                .iter()
                .map(|(idx, w)| (subset(idx).inline(), *w))
                .collect();
            let rel = Relation::new(map.clone(), true).ok()?;
            let weights_json: serde_json::Map<String, Value> = map
                .iter()
                .map(|(k, w)| {
                    (
                        k.clone(),
                        Value::String(format!("{}/{}", w.numer(), w.denom())),
                    )
                })
                .collect();
            (
                OperatorConfig::PartialMeet(SelectionPolicy::Relational(rel)),
                json!({ "method": "pm", "policy": "relational", "maximised": true, "weights": weights_json }),
            )
        }
        Op::Levels(levels) => {
            let levels: Vec<Program> = levels.iter().map(|l| subset(l)).collect();
            let ens = Ensconcement::unchecked(levels.clone()).ok()?;
            let valid = ens.is_valid(vocab).ok()?;
            let texts: Vec<Vec<String>> = levels
                .iter()
                .map(|l| l.iter().map(|r| r.text().to_string()).collect())
                .collect();
            (
                OperatorConfig::Ensconcement(ens),
                json!({ "method": "ens", "levels": texts, "valid": valid }),
            )
        }
    };
    let mut inst = Instance::new(vocab, p, q.clone(), operator, ex.direction);
    if let Some(r) = &r {
        inst = inst.with_r(r.clone());
    }
    let post = Postulate::parse(ex.postulate).ok()?;
    if holds(Property::Postulate(post), &inst).ok()? {
        return None;
    }
    let region_json: serde_json::Map<String, Value> = letters
        .iter()
        .zip(regions)
        .map(|(l, &m)| (l.to_string(), json!(decode(m, &points, vocab).rendered())))
        .collect();
    let fixture = json!({
        "name": ex.name,
        "postulate": ex.postulate,
        "direction": match ex.direction {
            Direction::Revision => "revision",
            Direction::Contraction => "contraction",
        },
        "vocabulary": vocab.atoms(),
        "p": rules.iter().map(|r| r.text()).collect::<Vec<_>>(),
        "q": q.inline(),
        "r": r.as_ref().map(Program::inline),
        "r_is_conjunct_of_q": ex.q_plus_r.is_some(),
        "rule_regions": ex.rules,
        "q_regions": ex.q,
        "r_regions": ex.q_plus_r.or(ex.r),
        "operator": op_json,
        "regions": region_json,
    });
    Some((inst, fixture))
}

fn main() {
    let out_dir: PathBuf = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("crates/core/tests/fixtures"));
    std::fs::create_dir_all(&out_dir).expect("create fixture directory");
    let vocabularies = [
        Vocabulary::new(["a", "b"]),
        Vocabulary::new(["a", "b", "c"]),
    ];
    for ex in examples() {
        let found = vocabularies.iter().find_map(|v| build(&ex, v));
        match found {
            Some((_, fixture)) => {
                let path = out_dir.join(format!("{}.json", ex.name));
                let text = serde_json::to_string_pretty(&fixture).expect("serializable");
                std::fs::write(&path, text + "\n").expect("write fixture");
                println!("{}: {}", ex.name, path.display());
            }
            None => println!("{}: no instance found", ex.name),
        }
    }
}
