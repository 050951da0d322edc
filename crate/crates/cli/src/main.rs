//! `lpchange` command-line front end.
//!
//! Exit codes: 0 on success, 1 on domain errors (unreadable files, parse
//! errors, invalid policies or ensconcements), 2 on usage errors.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use lpchange::baselines::{c_update_equivalent, distance_revise_models, pm_revise_as};
use lpchange::ensconcement::{all_ensconcements, Ensconcement};
use lpchange::harness::{self, Corpus, OperatorFamily, Postulate, PostulateReport, Property};
use lpchange::localization::{localized_change, operand_atoms, relevant_modules, LocalOperator};
use lpchange::partial_meet::{compatible_sets, remainder_sets, Relation};
use lpchange::semantics::{answer_sets, implies, strongly_equivalent};
use lpchange::{
    canonical_program, joint_vocabulary, parse_program, se_models, Direction, Operand, Program,
    SeSet, SelectionPolicy, Vocabulary,
};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Map, Value};

#[derive(Parser, Debug)]
#[command(
    name = "lpchange",
    version,
    about = "Revision and contraction of generalized logic programs under SE-model semantics"
)]
struct Cli {
    /// JSON file supplying defaults for options not given on the command
    /// line; keys are the long option names (`method`, `policy`, `vocab`,
    /// `format`, `ensconcement`, `seed`, ...).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Output format.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,

    /// Explicit vocabulary, comma-separated (defaults to the atoms of all
    /// inputs).
    #[arg(long, global = true, value_name = "ATOMS")]
    vocab: Option<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// SE models of a program.
    SeModels { program: PathBuf },
    /// Answer sets of a program.
    AnswerSets { program: PathBuf },
    /// Strong equivalence, implication both ways and C-update equivalence.
    Equiv { p: PathBuf, q: PathBuf },
    /// Revise P by Q.
    Revise(ChangeArgs),
    /// Contract Q from P.
    Contract(ChangeArgs),
    /// Modules of P relevant to the atoms of Q, and the residue.
    Modules { p: PathBuf, q: PathBuf },
    /// Program whose SE models are exactly those in a JSON SE-set file.
    Canonical { se_models: PathBuf },
    /// Sweep postulates and bridge properties over a program corpus.
    Check(CheckArgs),
}

#[derive(Args, Debug)]
struct ChangeArgs {
    /// First argument (the program being changed).
    p: PathBuf,
    /// Second argument; omit when `--q-se-models` is given.
    q: Option<PathBuf>,
    /// pm, ens, distance or pm-as (distance and pm-as revise only).
    #[arg(long)]
    method: Option<String>,
    /// full, maxichoice, single, relational-max, or relational:WEIGHTS.json.
    #[arg(long)]
    policy: Option<String>,
    /// Ensconcement file: one level per line, least ensconced first, rules
    /// separated by ` | `.
    #[arg(long, value_name = "FILE")]
    ensconcement: Option<PathBuf>,
    /// Change only the modules relevant to Q.
    #[arg(long)]
    localized: bool,
    /// Second argument as a raw SE-set JSON file.
    #[arg(long, value_name = "FILE")]
    q_se_models: Option<PathBuf>,
    /// For distance revision, also print a program with the resulting SE
    /// models.
    #[arg(long)]
    materialize: bool,
    /// Comma-separated methods to run side by side.
    #[arg(long, value_name = "METHODS")]
    compare: Option<String>,
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// Comma-separated operator families: pm, pm:<policy>, ens, distance.
    #[arg(long, default_value = "pm,ens,distance")]
    operators: String,
    /// `all`, `none`, or comma-separated postulate ids such as `*7,-3b`.
    #[arg(long, default_value = "all")]
    postulates: String,
    /// Extra property groups: bridges, characterizations, localization,
    /// baselines, or all.
    #[arg(long, value_name = "GROUPS")]
    properties: Option<String>,
    /// Rule pool file (defaults to the nine two-atom rules plus `a.`, `b.`).
    #[arg(long, value_name = "FILE")]
    pool: Option<PathBuf>,
    #[arg(long, default_value_t = 4)]
    max_rules: usize,
    /// Check a random sample of this many corpus programs.
    #[arg(long, value_name = "N")]
    sample: Option<usize>,
    /// Seed for `--sample`.
    #[arg(long)]
    seed: Option<u64>,
}

/// Option values after merging the config file under the command line.
struct Settings {
    format: Format,
    vocab: Option<Vocabulary>,
    config: Map<String, Value>,
}

impl Settings {
    fn string(&self, flag: Option<&String>, key: &str) -> Option<String> {
        flag.cloned().or_else(|| {
            self.config
                .get(key)
                .and_then(Value::as_str)
                .map(str::to_string)
        })
    }

    fn path(&self, flag: Option<&PathBuf>, key: &str) -> Option<PathBuf> {
        flag.cloned().or_else(|| {
            self.config
                .get(key)
                .and_then(Value::as_str)
                .map(PathBuf::from)
        })
    }

    fn flag(&self, flag: bool, key: &str) -> bool {
        flag || self
            .config
            .get(key)
            .and_then(Value::as_bool)
            .unwrap_or(false)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<String> {
    let config = match &cli.config {
        Some(path) => match serde_json::from_str::<Value>(&read(path)?)
            .with_context(|| format!("{}: not JSON", path.display()))?
        {
            Value::Object(map) => map,
            _ => bail!("{}: config must be a JSON object", path.display()),
        },
        None => Map::new(),
    };
    let format = match cli.format {
        Some(f) => f,
        None => match config.get("format").and_then(Value::as_str) {
            Some("json") => Format::Json,
            Some("table") | None => Format::Table,
            Some(other) => bail!("unknown format `{other}` in config"),
        },
    };
    let vocab_text = cli.vocab.clone().or_else(|| {
        config
            .get("vocab")
            .and_then(Value::as_str)
            .map(str::to_string)
    });
    let vocab =
        vocab_text.map(|t| Vocabulary::new(t.split(',').map(str::trim).filter(|a| !a.is_empty())));
    let settings = Settings {
        format,
        vocab,
        config,
    };
    match &cli.command {
        Command::SeModels { program } => se_models_cmd(&settings, program),
        Command::AnswerSets { program } => answer_sets_cmd(&settings, program),
        Command::Equiv { p, q } => equiv_cmd(&settings, p, q),
        Command::Revise(args) => change_cmd(&settings, args, Direction::Revision),
        Command::Contract(args) => change_cmd(&settings, args, Direction::Contraction),
        Command::Modules { p, q } => modules_cmd(&settings, p, q),
        Command::Canonical { se_models } => canonical_cmd(&settings, se_models),
        Command::Check(args) => check_cmd(&settings, args),
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load(path: &Path, vocab: Option<&Vocabulary>) -> Result<(Program, Vocabulary)> {
    parse_program(&read(path)?, vocab).with_context(|| path.display().to_string())
}

/// Parses every input and settles the vocabulary: the explicit one if
/// given, otherwise the declared and occurring atoms of all inputs.
fn load_all(settings: &Settings, paths: &[&Path]) -> Result<(Vec<Program>, Vocabulary)> {
    let mut programs = Vec::new();
    let mut vocab = settings.vocab.clone().unwrap_or_default();
    for path in paths {
        let (p, v) = load(path, settings.vocab.as_ref())?;
        vocab = vocab.union(&v);
        programs.push(p);
    }
    let refs: Vec<&Program> = programs.iter().collect();
    Ok((programs.clone(), joint_vocabulary(&refs, Some(&vocab))))
}

fn rules_json(p: &Program) -> Value {
    json!(p.iter().map(|r| r.text()).collect::<Vec<_>>())
}

fn models_json(s: &SeSet) -> Value {
    json!(s
        .rendered()
        .into_iter()
        .map(|(x, y)| [x, y])
        .collect::<Vec<_>>())
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("plain data serializes") + "\n"
}

fn se_models_cmd(settings: &Settings, path: &Path) -> Result<String> {
    let (programs, vocab) = load_all(settings, &[path])?;
    let models = se_models(&programs[0], &vocab)?;
    Ok(match settings.format {
        Format::Json => pretty(&json!({
            "vocabulary": vocab.atoms(),
            "se_models": models_json(&models),
        })),
        Format::Table => format!("vocabulary: {vocab}\n{models}\n"),
    })
}

fn answer_sets_cmd(settings: &Settings, path: &Path) -> Result<String> {
    let (programs, vocab) = load_all(settings, &[path])?;
    let sets: Vec<String> = answer_sets(&programs[0], &vocab)?
        .into_iter()
        .map(|m| vocab.render(m))
        .collect();
    Ok(match settings.format {
        Format::Json => pretty(&json!({ "vocabulary": vocab.atoms(), "answer_sets": sets })),
        Format::Table => {
            let shown: Vec<String> = sets.iter().map(|s| format!("{{{s}}}")).collect();
            format!("vocabulary: {vocab}\n{}\n", shown.join(" "))
        }
    })
}

fn equiv_cmd(settings: &Settings, p: &Path, q: &Path) -> Result<String> {
    let (programs, vocab) = load_all(settings, &[p, q])?;
    let (sp, sq) = (
        se_models(&programs[0], &vocab)?,
        se_models(&programs[1], &vocab)?,
    );
    let c_update = c_update_equivalent(&programs[0], &programs[1], &vocab)?;
    let fields = [
        ("strongly_equivalent", strongly_equivalent(&sp, &sq)),
        ("p_implies_q", implies(&sp, &sq)),
        ("q_implies_p", implies(&sq, &sp)),
        ("c_update_equivalent", c_update),
    ];
    Ok(match settings.format {
        Format::Json => {
            let mut obj = Map::new();
            obj.insert("vocabulary".into(), json!(vocab.atoms()));
            for (k, v) in fields {
                obj.insert(k.into(), json!(v));
            }
            pretty(&Value::Object(obj))
        }
        Format::Table => {
            let mut out = format!("vocabulary: {vocab}\n");
            for (k, v) in fields {
                out.push_str(&format!("{k}: {v}\n"));
            }
            out
        }
    })
}

fn parse_policy(text: &str) -> Result<SelectionPolicy> {
    if let Some(file) = text.strip_prefix("relational:") {
        let rel = Relation::from_json(&read(Path::new(file))?)?;
        return Ok(SelectionPolicy::Relational(rel));
    }
    Ok(SelectionPolicy::parse(text)?)
}

/// Resolved inputs of a change command.
struct ChangeInput {
    p: Program,
    q: Operand,
    /// The second argument as a program, when given as one.
    q_program: Option<Program>,
    vocab: Vocabulary,
}

fn change_input(settings: &Settings, args: &ChangeArgs) -> Result<ChangeInput> {
    let q_models_path = settings.path(args.q_se_models.as_ref(), "q-se-models");
    match (&args.q, q_models_path) {
        (Some(q), None) => {
            let (programs, vocab) = load_all(settings, &[&args.p, q])?;
            let q_op = Operand::from_program(&programs[1], &vocab)?;
            Ok(ChangeInput {
                p: programs[0].clone(),
                q: q_op,
                q_program: Some(programs[1].clone()),
                vocab,
            })
        }
        (None, Some(models)) => {
            let set =
                SeSet::from_json(&read(&models)?).with_context(|| models.display().to_string())?;
            let (programs, p_vocab) = load_all(settings, &[&args.p])?;
            let vocab = set.vocab().union(&p_vocab);
            let set = set.extend_to(&vocab)?;
            Ok(ChangeInput {
                p: programs[0].clone(),
                q: Operand::from_models(set),
                q_program: None,
                vocab,
            })
        }
        (Some(_), Some(_)) => bail!("give Q either as a program or with --q-se-models, not both"),
        (None, None) => bail!("missing second argument Q (or --q-se-models)"),
    }
}

/// Result of one method on one input.
enum Outcome {
    Program(Program),
    /// Ensconcement change over every valid ensconcement of P.
    PerEnsconcement(Vec<(String, Program)>),
    Models {
        models: SeSet,
        materialized: Option<Program>,
    },
}

impl Outcome {
    fn models(&self, vocab: &Vocabulary) -> Result<Option<SeSet>> {
        Ok(match self {
            Outcome::Program(p) => Some(se_models(p, vocab)?),
            Outcome::PerEnsconcement(list) => {
                let first = list.first().map(|(_, p)| p);
                match first {
                    Some(p) if list.iter().all(|(_, o)| o == p) => Some(se_models(p, vocab)?),
                    _ => None,
                }
            }
            Outcome::Models { models, .. } => Some(models.clone()),
        })
    }
}

fn apply_method(
    settings: &Settings,
    args: &ChangeArgs,
    input: &ChangeInput,
    method: &str,
    direction: Direction,
) -> Result<Outcome> {
    let localized = settings.flag(args.localized, "localized");
    let apply = |op: LocalOperator| -> Result<Program> {
        if localized {
            Ok(localized_change(&input.p, &op, &input.q)?)
        } else {
            Ok(op.apply(&input.p, &input.q)?)
        }
    };
    match method {
        "pm" => {
            let policy = parse_policy(
                &settings
                    .string(args.policy.as_ref(), "policy")
                    .unwrap_or_else(|| "full".into()),
            )?;
            Ok(Outcome::Program(apply(LocalOperator::partial_meet(
                direction, policy,
            ))?))
        }
        "ens" => match settings.path(args.ensconcement.as_ref(), "ensconcement") {
            Some(path) => {
                let ens = Ensconcement::parse(&read(&path)?, &input.p)
                    .with_context(|| path.display().to_string())?;
                let violations = ens.violations(&input.vocab)?;
                if !violations.is_empty() {
                    let text: Vec<String> = violations.iter().map(ToString::to_string).collect();
                    bail!(
                        "{}: invalid ensconcement: {}",
                        path.display(),
                        text.join("; ")
                    );
                }
                Ok(Outcome::Program(apply(LocalOperator::ensconcement(
                    direction, ens,
                ))?))
            }
            None => {
                let mut list = Vec::new();
                for ens in all_ensconcements(&input.p, &input.vocab)? {
                    // Levels on one line, least ensconced first.
                    let text = ens.to_text();
                    let label: Vec<&str> = text.lines().filter(|l| !l.is_empty()).collect();
                    let label = label.join(" < ");
                    list.push((label, apply(LocalOperator::ensconcement(direction, ens))?));
                }
                Ok(Outcome::PerEnsconcement(list))
            }
        },
        "distance" | "pm-as" if direction == Direction::Contraction => {
            bail!("method `{method}` is revision only")
        }
        "distance" | "pm-as" if localized => bail!("--localized applies to pm and ens only"),
        "distance" => {
            let p_models = se_models(&input.p, &input.vocab)?;
            let models = distance_revise_models(&p_models, input.q.models());
            let materialized = if settings.flag(args.materialize, "materialize") {
                Some(canonical_program(&models)?)
            } else {
                None
            };
            Ok(Outcome::Models {
                models,
                materialized,
            })
        }
        "pm-as" => {
            let policy = settings
                .string(args.policy.as_ref(), "policy")
                .unwrap_or_else(|| "single".into());
            if !matches!(
                policy.as_str(),
                "single" | "single-choice" | "single-choice-lex"
            ) {
                bail!("pm-as supports only the single-choice policy");
            }
            let q = input
                .q_program
                .as_ref()
                .ok_or_else(|| anyhow!("pm-as needs Q as a program"))?;
            Ok(Outcome::Program(pm_revise_as(&input.p, q, &input.vocab)?))
        }
        other => bail!("unknown method `{other}` (pm, ens, distance, pm-as)"),
    }
}

/// Why the selection had nothing to choose from, if so.
fn empty_family_note(
    input: &ChangeInput,
    method: &str,
    direction: Direction,
) -> Result<Option<&'static str>> {
    if method != "pm" {
        return Ok(None);
    }
    let empty = match direction {
        Direction::Revision => compatible_sets(&input.p, &input.q)?.is_empty(),
        Direction::Contraction => remainder_sets(&input.p, &input.q)?.is_empty(),
    };
    Ok(empty.then_some(match direction {
        Direction::Revision => {
            "Q has no SE models: no compatible sets, the empty selection keeps no rule of P"
        }
        Direction::Contraction => {
            "Q is tautological: no remainder sets, the empty selection keeps no rule of P"
        }
    }))
}

fn outcome_json(outcome: &Outcome, vocab: &Vocabulary) -> Result<Value> {
    let mut obj = Map::new();
    match outcome {
        Outcome::Program(p) => {
            obj.insert("result".into(), rules_json(p));
        }
        Outcome::PerEnsconcement(list) => {
            let rows: Vec<Value> = list
                .iter()
                .map(|(ens, p)| json!({ "ensconcement": ens, "result": rules_json(p) }))
                .collect();
            obj.insert("per_ensconcement".into(), Value::Array(rows));
        }
        Outcome::Models { materialized, .. } => {
            if let Some(p) = materialized {
                obj.insert("materialized".into(), rules_json(p));
            }
        }
    }
    if let Some(models) = outcome.models(vocab)? {
        obj.insert("se_models".into(), models_json(&models));
    }
    Ok(Value::Object(obj))
}

fn outcome_text(outcome: &Outcome) -> String {
    match outcome {
        Outcome::Program(p) => p.to_string(),
        Outcome::PerEnsconcement(list) => {
            let mut out = String::new();
            for (ens, p) in list {
                out.push_str(&format!("% ensconcement {ens}\n{p}"));
            }
            out
        }
        Outcome::Models {
            models,
            materialized,
        } => match materialized {
            Some(p) => format!("% SE models {models}\n{p}"),
            None => format!("{models}\n"),
        },
    }
}

fn change_cmd(settings: &Settings, args: &ChangeArgs, direction: Direction) -> Result<String> {
    let input = change_input(settings, args)?;
    let command = match direction {
        Direction::Revision => "revise",
        Direction::Contraction => "contract",
    };
    if let Some(list) = settings.string(args.compare.as_ref(), "compare") {
        return compare(settings, args, &input, direction, &list);
    }
    let method = settings
        .string(args.method.as_ref(), "method")
        .unwrap_or_else(|| "pm".into());
    let outcome = apply_method(settings, args, &input, &method, direction)?;
    let note = empty_family_note(&input, &method, direction)?;
    Ok(match settings.format {
        Format::Json => {
            let mut obj = Map::new();
            obj.insert("command".into(), json!(command));
            obj.insert("method".into(), json!(method));
            obj.insert("vocabulary".into(), json!(input.vocab.atoms()));
            obj.insert(
                "localized".into(),
                json!(settings.flag(args.localized, "localized")),
            );
            if let Value::Object(fields) = outcome_json(&outcome, &input.vocab)? {
                obj.extend(fields);
            }
            if let Some(note) = note {
                obj.insert("note".into(), json!(note));
            }
            pretty(&Value::Object(obj))
        }
        Format::Table => {
            if let Some(note) = note {
                eprintln!("note: {note}");
            }
            outcome_text(&outcome)
        }
    })
}

fn compare(
    settings: &Settings,
    args: &ChangeArgs,
    input: &ChangeInput,
    direction: Direction,
    list: &str,
) -> Result<String> {
    let mut rows = Vec::new();
    for method in list.split(',').map(str::trim).filter(|m| !m.is_empty()) {
        let outcome = apply_method(settings, args, input, method, direction)?;
        rows.push((method.to_string(), outcome));
    }
    if settings.format == Format::Json {
        let mut out = Vec::new();
        for (method, outcome) in &rows {
            let mut row = Map::new();
            row.insert("method".into(), json!(method));
            if let Value::Object(fields) = outcome_json(outcome, &input.vocab)? {
                row.extend(fields);
            }
            out.push(Value::Object(row));
        }
        return Ok(pretty(&json!({
            "command": match direction {
                Direction::Revision => "revise",
                Direction::Contraction => "contract",
            },
            "vocabulary": input.vocab.atoms(),
            "p": rules_json(&input.p),
            "q": input.q_program.as_ref().map(rules_json),
            "rows": out,
        })));
    }
    let mut table = vec![(
        "method".to_string(),
        "result".to_string(),
        "SE models".to_string(),
    )];
    for (method, outcome) in &rows {
        let result = match outcome {
            Outcome::Program(p) => format!("{{{}}}", p.inline()),
            Outcome::PerEnsconcement(list) => {
                let mut distinct: Vec<String> = list
                    .iter()
                    .map(|(_, p)| format!("{{{}}}", p.inline()))
                    .collect();
                distinct.sort();
                distinct.dedup();
                distinct.join(" | ")
            }
            Outcome::Models { materialized, .. } => match materialized {
                Some(p) => format!("{{{}}}", p.inline()),
                None => "-".to_string(),
            },
        };
        let models = match outcome.models(&input.vocab)? {
            Some(m) => m.to_string(),
            None => "varies".to_string(),
        };
        table.push((method.clone(), result, models));
    }
    let w0 = table.iter().map(|r| r.0.chars().count()).max().unwrap_or(0);
    let w1 = table.iter().map(|r| r.1.chars().count()).max().unwrap_or(0);
    let mut out = format!("vocabulary: {}\n", input.vocab);
    for (m, r, s) in table {
        let pad0 = " ".repeat(w0 - m.chars().count());
        let pad1 = " ".repeat(w1 - r.chars().count());
        out.push_str(&format!("{m}{pad0}  {r}{pad1}  {s}\n"));
    }
    Ok(out)
}

fn modules_cmd(settings: &Settings, p: &Path, q: &Path) -> Result<String> {
    let (programs, vocab) = load_all(settings, &[p, q])?;
    let q_op = Operand::from_program(&programs[1], &vocab)?;
    let atoms = operand_atoms(&q_op);
    let family = relevant_modules(&programs[0], atoms.iter().map(String::as_str))?;
    Ok(match settings.format {
        Format::Json => {
            let modules: Vec<Value> = family
                .modules
                .iter()
                .map(|(rules, anchors)| {
                    json!({
                        "rules": rules_json(rules),
                        "anchors": anchors
                            .iter()
                            .map(|(r, a)| json!({ "rule": r.text(), "atom": a }))
                            .collect::<Vec<_>>(),
                    })
                })
                .collect();
            pretty(&json!({
                "vocabulary": vocab.atoms(),
                "atoms": atoms,
                "modules": modules,
                "residue": rules_json(&family.residue),
            }))
        }
        Format::Table => format!("vocabulary: {vocab}\n{family}"),
    })
}

fn canonical_cmd(settings: &Settings, path: &Path) -> Result<String> {
    let mut set = SeSet::from_json(&read(path)?).with_context(|| path.display().to_string())?;
    if let Some(v) = &settings.vocab {
        set = set.extend_to(v)?;
    }
    let program = canonical_program(&set)?;
    Ok(match settings.format {
        Format::Json => pretty(&json!({
            "vocabulary": set.vocab().atoms(),
            "program": rules_json(&program),
        })),
        Format::Table => program.to_string(),
    })
}

fn check_cmd(settings: &Settings, args: &CheckArgs) -> Result<String> {
    let vocab = settings
        .vocab
        .clone()
        .unwrap_or_else(|| Vocabulary::new(["a", "b"]));
    let pool_path = settings.path(args.pool.as_ref(), "pool");
    let pool = match &pool_path {
        Some(path) => load(path, Some(&vocab))?.0,
        None => parse_program(harness::STANDARD_POOL, Some(&vocab))?.0,
    };
    let mut corpus = Corpus::new(&vocab, &pool, args.max_rules)?;
    let seed = args
        .seed
        .or_else(|| settings.config.get("seed").and_then(Value::as_u64))
        .unwrap_or(0);
    if let Some(n) = args.sample {
        if n < corpus.len() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let picked = sample(&mut rng, corpus.len(), n).into_vec();
            corpus = corpus.select(&picked)?;
        }
    }

    let families: Vec<OperatorFamily> = args
        .operators
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(OperatorFamily::parse)
        .collect::<lpchange::Result<_>>()?;
    let wanted: Option<Vec<Postulate>> = match args.postulates.as_str() {
        "all" => None,
        "none" => Some(Vec::new()),
        list => Some(
            list.split(',')
                .map(|id| Postulate::parse(id.trim().trim_start_matches('(').trim_end_matches(')')))
                .collect::<lpchange::Result<_>>()?,
        ),
    };
    let keep = |r: &PostulateReport| match (&wanted, r.property) {
        (None, _) => true,
        (Some(list), Property::Postulate(p)) => list.contains(&p),
        (Some(_), _) => false,
    };

    let mut reports = Vec::new();
    let needs = |d: Direction| {
        wanted
            .as_ref()
            .map_or(true, |list| list.iter().any(|p| p.direction() == d))
    };
    for family in &families {
        if needs(Direction::Revision) {
            reports.extend(
                harness::check_revision_postulates(family, &corpus)?
                    .into_iter()
                    .filter(keep),
            );
        }
        if needs(Direction::Contraction) && *family != OperatorFamily::Distance {
            reports.extend(
                harness::check_contraction_postulates(family, &corpus)?
                    .into_iter()
                    .filter(keep),
            );
        }
    }
    if let Some(groups) = settings.string(args.properties.as_ref(), "properties") {
        for group in groups.split(',').map(str::trim) {
            let all = group == "all";
            if all || group == "bridges" {
                reports.extend(harness::check_identity_bridges(&corpus)?);
            }
            if all || group == "characterizations" {
                reports.extend(harness::check_characterizations(&corpus)?);
            }
            if all || group == "localization" {
                reports.extend(harness::check_localization(&corpus)?);
            }
            if all || group == "baselines" {
                reports.extend(harness::check_baseline_bridges(&corpus)?);
            }
            if !all
                && !matches!(
                    group,
                    "bridges" | "characterizations" | "localization" | "baselines"
                )
            {
                bail!("unknown property group `{group}`");
            }
        }
    }

    Ok(match settings.format {
        Format::Json => pretty(&json!({
            "vocabulary": vocab.atoms(),
            "pool": corpus.pool().iter().map(|r| r.text()).collect::<Vec<_>>(),
            "max_rules": corpus.max_rules(),
            "programs": corpus.len(),
            "sample_seed": args.sample.map(|_| seed),
            "reports": harness::reports_to_json(&reports),
        })),
        Format::Table => format!(
            "vocabulary: {vocab}\nprograms: {}\n{}",
            corpus.len(),
            harness::render_table(&reports)
        ),
    })
}
