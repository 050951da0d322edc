//! Rules, programs and the vocabulary they range over, with the text
//! format used for input and canonical output.
//!
//! A rule `a ; not b :- c, not d.` has positive head `{a}`, negative head
//! `{b}`, positive body `{c}` and negative body `{d}`. Parts are stored as
//! sorted sets, so rules that differ only in literal order are equal.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};

use crate::error::{Error, Result};

/// Largest vocabulary for which SE interpretations are enumerated.
pub const MAX_VOCABULARY: usize = 8;

/// Ordered set of atom names. Bit `i` of an interpretation mask stands for
/// the `i`-th atom in sorted order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vocabulary {
    atoms: Vec<String>,
}

impl Vocabulary {
    pub fn new<I, S>(atoms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let set: BTreeSet<String> = atoms.into_iter().map(Into::into).collect();
        Vocabulary {
            atoms: set.into_iter().collect(),
        }
    }

    pub fn atoms(&self) -> &[String] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn contains(&self, atom: &str) -> bool {
        self.index_of(atom).is_some()
    }

    pub fn index_of(&self, atom: &str) -> Option<usize> {
        self.atoms.binary_search_by(|a| a.as_str().cmp(atom)).ok()
    }

    pub fn union(&self, other: &Vocabulary) -> Vocabulary {
        Vocabulary::new(self.atoms.iter().chain(other.atoms.iter()).cloned())
    }

    pub fn is_subset(&self, other: &Vocabulary) -> bool {
        self.atoms.iter().all(|a| other.contains(a))
    }

    /// Mask with every atom set.
    pub fn full_mask(&self) -> u32 {
        if self.atoms.len() >= 32 {
            u32::MAX
        } else {
            (1u32 << self.atoms.len()) - 1
        }
    }

    pub fn mask_of<'a, I>(&self, atoms: I) -> Result<u32>
    where
        I: IntoIterator<Item = &'a String>,
    {
        let mut mask = 0;
        for atom in atoms {
            let i = self
                .index_of(atom)
                .ok_or_else(|| Error::UnknownAtom(atom.clone()))?;
            mask |= 1 << i;
        }
        Ok(mask)
    }

    pub fn atoms_in(&self, mask: u32) -> Vec<&str> {
        self.atoms
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, a)| a.as_str())
            .collect()
    }

    /// Comma-separated atoms of an interpretation, `""` for the empty one.
    pub fn render(&self, mask: u32) -> String {
        self.atoms_in(mask).join(",")
    }

    /// Inverse of [`Vocabulary::render`].
    pub fn parse_interpretation(&self, text: &str) -> Result<u32> {
        let mut mask = 0;
        for atom in text.split(',').map(str::trim).filter(|a| !a.is_empty()) {
            let i = self
                .index_of(atom)
                .ok_or_else(|| Error::UnknownAtom(atom.to_string()))?;
            mask |= 1 << i;
        }
        Ok(mask)
    }

    pub(crate) fn check_enumerable(&self) -> Result<()> {
        if self.atoms.len() > MAX_VOCABULARY {
            return Err(Error::VocabularyTooLarge {
                size: self.atoms.len(),
                max: MAX_VOCABULARY,
            });
        }
        Ok(())
    }
}

impl fmt::Display for Vocabulary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.atoms.join(","))
    }
}

/// A normalized generalized rule. Immutable; the canonical text is computed
/// once and drives equality, hashing and ordering.
#[derive(Debug, Clone)]
pub struct Rule {
    head_pos: BTreeSet<String>,
    head_neg: BTreeSet<String>,
    body_pos: BTreeSet<String>,
    body_neg: BTreeSet<String>,
    text: String,
}

impl Rule {
    pub fn new<I1, I2, I3, I4, S>(head_pos: I1, head_neg: I2, body_pos: I3, body_neg: I4) -> Rule
    where
        I1: IntoIterator<Item = S>,
        I2: IntoIterator<Item = S>,
        I3: IntoIterator<Item = S>,
        I4: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let head_pos: BTreeSet<String> = head_pos.into_iter().map(Into::into).collect();
        let head_neg: BTreeSet<String> = head_neg.into_iter().map(Into::into).collect();
        let body_pos: BTreeSet<String> = body_pos.into_iter().map(Into::into).collect();
        let body_neg: BTreeSet<String> = body_neg.into_iter().map(Into::into).collect();
        let text = render_rule(&head_pos, &head_neg, &body_pos, &body_neg);
        Rule {
            head_pos,
            head_neg,
            body_pos,
            body_neg,
            text,
        }
    }

    pub fn fact(atom: &str) -> Rule {
        Rule::new([atom], [], [], [])
    }

    pub fn constraint<I1, I2, S>(body_pos: I1, body_neg: I2) -> Rule
    where
        I1: IntoIterator<Item = S>,
        I2: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let none: [String; 0] = [];
        let body_pos: Vec<String> = body_pos.into_iter().map(Into::into).collect();
        let body_neg: Vec<String> = body_neg.into_iter().map(Into::into).collect();
        Rule::new(none.clone(), none, body_pos, body_neg)
    }

    pub fn head_pos(&self) -> &BTreeSet<String> {
        &self.head_pos
    }

    pub fn head_neg(&self) -> &BTreeSet<String> {
        &self.head_neg
    }

    pub fn body_pos(&self) -> &BTreeSet<String> {
        &self.body_pos
    }

    pub fn body_neg(&self) -> &BTreeSet<String> {
        &self.body_neg
    }

    pub fn is_fact(&self) -> bool {
        self.head_pos.len() == 1
            && self.head_neg.is_empty()
            && self.body_pos.is_empty()
            && self.body_neg.is_empty()
    }

    pub fn is_constraint(&self) -> bool {
        self.head_pos.is_empty() && self.head_neg.is_empty()
    }

    /// Atoms occurring anywhere in the rule.
    pub fn atoms(&self) -> BTreeSet<&str> {
        self.head_pos
            .iter()
            .chain(&self.head_neg)
            .chain(&self.body_pos)
            .chain(&self.body_neg)
            .map(String::as_str)
            .collect()
    }

    pub fn text(&self) -> &str {
        &self.text
    }
}

fn render_rule(
    head_pos: &BTreeSet<String>,
    head_neg: &BTreeSet<String>,
    body_pos: &BTreeSet<String>,
    body_neg: &BTreeSet<String>,
) -> String {
    let head: Vec<String> = head_pos
        .iter()
        .cloned()
        .chain(head_neg.iter().map(|a| format!("not {a}")))
        .collect();
    let body: Vec<String> = body_pos
        .iter()
        .cloned()
        .chain(body_neg.iter().map(|a| format!("not {a}")))
        .collect();
    match (head.is_empty(), body.is_empty()) {
        (false, true) => format!("{}.", head.join(" ; ")),
        (false, false) => format!("{} :- {}.", head.join(" ; "), body.join(", ")),
        (true, false) => format!(":- {}.", body.join(", ")),
        (true, true) => ":-.".to_string(),
    }
}

impl PartialEq for Rule {
    fn eq(&self, other: &Self) -> bool {
        self.text == other.text
    }
}

impl Eq for Rule {}

impl Hash for Rule {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.text.hash(state);
    }
}

// Constraints sort after rules with a head; otherwise by canonical text.
impl Ord for Rule {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.is_constraint(), &self.text).cmp(&(other.is_constraint(), &other.text))
    }
}

impl PartialOrd for Rule {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.text)
    }
}

/// A finite set of rules.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Program {
    rules: BTreeSet<Rule>,
}

impl Program {
    pub fn new() -> Self {
        Program::default()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Rule> + '_ {
        self.rules.iter()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn contains(&self, rule: &Rule) -> bool {
        self.rules.contains(rule)
    }

    pub fn insert(&mut self, rule: Rule) -> bool {
        self.rules.insert(rule)
    }

    /// Expansion `P + Q`.
    pub fn union(&self, other: &Program) -> Program {
        self.rules.union(&other.rules).cloned().collect()
    }

    pub fn intersection(&self, other: &Program) -> Program {
        self.rules.intersection(&other.rules).cloned().collect()
    }

    pub fn difference(&self, other: &Program) -> Program {
        self.rules.difference(&other.rules).cloned().collect()
    }

    pub fn is_subset(&self, other: &Program) -> bool {
        self.rules.is_subset(&other.rules)
    }

    pub fn atoms(&self) -> BTreeSet<&str> {
        self.rules.iter().flat_map(|r| r.atoms()).collect()
    }

    pub fn vocabulary(&self) -> Vocabulary {
        Vocabulary::new(self.atoms())
    }

    /// Canonical text on a single line, rules separated by spaces.
    pub fn inline(&self) -> String {
        self.rules
            .iter()
            .map(Rule::text)
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl FromIterator<Rule> for Program {
    fn from_iter<T: IntoIterator<Item = Rule>>(iter: T) -> Self {
        Program {
            rules: iter.into_iter().collect(),
        }
    }
}

impl<'a> IntoIterator for &'a Program {
    type Item = &'a Rule;
    type IntoIter = std::collections::btree_set::Iter<'a, Rule>;

    fn into_iter(self) -> Self::IntoIter {
        self.rules.iter()
    }
}

/// Canonical serialization: one rule per line in canonical order.
impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for rule in &self.rules {
            writeln!(f, "{rule}")?;
        }
        Ok(())
    }
}

pub fn print_program(program: &Program) -> String {
    program.to_string()
}

/// Parses program text. When a vocabulary is passed or the text declares
/// one with `#vocab`, atoms outside it are rejected. The returned
/// vocabulary is the declared one together with the atoms of the program.
pub fn parse_program(text: &str, vocab: Option<&Vocabulary>) -> Result<(Program, Vocabulary)> {
    let mut parser = Parser::new(text);
    let mut rules = Vec::new();
    let mut declared: Option<BTreeSet<String>> = vocab.map(|v| v.atoms().iter().cloned().collect());
    let mut pending = Vec::new();
    loop {
        parser.skip_trivia();
        if parser.at_end() {
            break;
        }
        if parser.peek() == Some('#') {
            let atoms = parser.directive()?;
            declared.get_or_insert_with(BTreeSet::new).extend(atoms);
            continue;
        }
        let (rule, positions) = parser.rule()?;
        pending.extend(positions);
        rules.push(rule);
    }
    if let Some(declared) = &declared {
        if let Some((atom, line, column)) = pending.iter().find(|(a, _, _)| !declared.contains(a)) {
            return Err(Error::UndeclaredAtom {
                atom: atom.clone(),
                line: *line,
                column: *column,
            });
        }
    }
    let program: Program = rules.into_iter().collect();
    let mut vocabulary = program.vocabulary();
    if let Some(declared) = declared {
        vocabulary = vocabulary.union(&Vocabulary::new(declared));
    }
    Ok((program, vocabulary))
}

/// Parses a single rule such as `b :- a.`.
pub fn parse_rule(text: &str) -> Result<Rule> {
    let mut parser = Parser::new(text);
    parser.skip_trivia();
    let (rule, _) = parser.rule()?;
    parser.skip_trivia();
    if !parser.at_end() {
        return Err(parser.error("unexpected input after rule"));
    }
    Ok(rule)
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    column: usize,
    _src: &'a str,
}

type AtomPos = (String, usize, usize);

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            chars: src.chars().collect(),
            pos: 0,
            line: 1,
            column: 1,
            _src: src,
        }
    }

    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn error(&self, message: &str) -> Error {
        Error::Syntax {
            line: self.line,
            column: self.column,
            message: message.to_string(),
        }
    }

    fn skip_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.bump();
            } else if c == '%' {
                while let Some(c) = self.bump() {
                    if c == '\n' {
                        break;
                    }
                }
            } else {
                break;
            }
        }
    }

    fn eat(&mut self, s: &str) -> bool {
        let n = s.chars().count();
        if self.chars.len() >= self.pos + n
            && self.chars[self.pos..self.pos + n]
                .iter()
                .copied()
                .eq(s.chars())
        {
            for _ in 0..n {
                self.bump();
            }
            true
        } else {
            false
        }
    }

    fn identifier(&mut self) -> Option<AtomPos> {
        let (line, column) = (self.line, self.column);
        match self.peek() {
            Some(c) if c.is_ascii_lowercase() => {}
            _ => return None,
        }
        let mut name = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                name.push(c);
                self.bump();
            } else {
                break;
            }
        }
        Some((name, line, column))
    }

    fn directive(&mut self) -> Result<Vec<String>> {
        if !self.eat("#vocab") {
            return Err(self.error("unknown directive, expected `#vocab`"));
        }
        let mut atoms = Vec::new();
        loop {
            self.skip_trivia();
            if self.eat(".") {
                break;
            }
            match self.identifier() {
                Some((name, _, _)) if name != "not" => atoms.push(name),
                _ => return Err(self.error("expected atom or `.` in `#vocab`")),
            }
        }
        if atoms.is_empty() {
            return Err(self.error("`#vocab` needs at least one atom"));
        }
        Ok(atoms)
    }

    /// Literal: `atom` or `not atom`. Returns (negated, atom).
    fn literal(&mut self) -> Result<(bool, AtomPos)> {
        self.skip_trivia();
        let first = self
            .identifier()
            .ok_or_else(|| self.error("expected literal"))?;
        if first.0 != "not" {
            return Ok((false, first));
        }
        self.skip_trivia();
        match self.identifier() {
            Some(atom) if atom.0 != "not" => Ok((true, atom)),
            _ => Err(self.error("expected atom after `not`")),
        }
    }

    fn literals(&mut self, sep: char) -> Result<Vec<(bool, AtomPos)>> {
        let mut out = vec![self.literal()?];
        loop {
            self.skip_trivia();
            if self.peek() == Some(sep) {
                self.bump();
                out.push(self.literal()?);
            } else {
                return Ok(out);
            }
        }
    }

    fn body(&mut self) -> Result<Vec<(bool, AtomPos)>> {
        self.skip_trivia();
        if self.peek() == Some('.') {
            return Ok(Vec::new());
        }
        self.literals(',')
    }

    fn rule(&mut self) -> Result<(Rule, Vec<AtomPos>)> {
        let head = if self.eat(":-") {
            self.skip_trivia();
            let body = self.body()?;
            self.expect_dot()?;
            return Ok(build(Vec::new(), body));
        } else {
            self.literals(';')?
        };
        self.skip_trivia();
        if self.eat(".") {
            return Ok(build(head, Vec::new()));
        }
        if self.eat(":-") {
            let body = self.body()?;
            self.expect_dot()?;
            return Ok(build(head, body));
        }
        Err(self.error("expected `.`, `;` or `:-`"))
    }

    fn expect_dot(&mut self) -> Result<()> {
        self.skip_trivia();
        if self.eat(".") {
            Ok(())
        } else {
            Err(self.error("expected `.`"))
        }
    }
}

fn build(head: Vec<(bool, AtomPos)>, body: Vec<(bool, AtomPos)>) -> (Rule, Vec<AtomPos>) {
    let split = |lits: &[(bool, AtomPos)], neg: bool| -> Vec<String> {
        lits.iter()
            .filter(|(n, _)| *n == neg)
            .map(|(_, a)| a.0.clone())
            .collect()
    };
    let rule = Rule::new(
        split(&head, false),
        split(&head, true),
        split(&body, false),
        split(&body, true),
    );
    let positions = head.into_iter().chain(body).map(|(_, a)| a).collect();
    (rule, positions)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prog(text: &str) -> Program {
        parse_program(text, None).unwrap().0
    }

    #[test]
    fn parses_facts_and_rules() {
        let (p, v) = parse_program("a. b :- a.", None).unwrap();
        assert_eq!(p.len(), 2);
        assert!(p.contains(&Rule::fact("a")));
        assert!(p.contains(&Rule::new(["b"], [], ["a"], [])));
        assert_eq!(v.atoms(), ["a", "b"]);
    }

    #[test]
    fn parses_constraint_and_head_negation() {
        let p = prog(":- a, b.");
        let r = p.iter().next().unwrap();
        assert!(r.is_constraint());
        assert_eq!(r.body_pos().len(), 2);

        let p = prog("a ; not b.");
        let r = p.iter().next().unwrap();
        assert_eq!(r.head_pos().iter().collect::<Vec<_>>(), ["a"]);
        assert_eq!(r.head_neg().iter().collect::<Vec<_>>(), ["b"]);
        assert!(r.body_pos().is_empty() && r.body_neg().is_empty());
    }

    #[test]
    fn prints_canonically() {
        assert_eq!(prog("b :- a. a.").to_string(), "a.\nb :- a.\n");
        assert_eq!(Program::new().to_string(), "");
        assert_eq!(prog(":- a.").to_string(), ":- a.\n");
        assert_eq!(prog("not b ; a.").to_string(), "a ; not b.\n");
        assert_eq!(prog(":- a. b :- a.").to_string(), "b :- a.\n:- a.\n");
        assert_eq!(
            prog("x :- not d, c, not b, a.").to_string(),
            "x :- a, c, not b, not d.\n"
        );
    }

    #[test]
    fn literal_order_is_irrelevant() {
        assert_eq!(prog("a ; b :- c, d."), prog("b ; a :- d, c."));
        assert_eq!(prog("a. a."), prog("a."));
    }

    #[test]
    fn comments_and_vocab_directive() {
        let (p, v) = parse_program("% header\n#vocab a b c.\na. % trailing\n", None).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(v.atoms(), ["a", "b", "c"]);
    }

    #[test]
    fn rejects_atoms_outside_declared_vocab() {
        let err = parse_program("#vocab a.\nb :- a.", None).unwrap_err();
        assert_eq!(
            err,
            Error::UndeclaredAtom {
                atom: "b".into(),
                line: 2,
                column: 1
            }
        );
        let v = Vocabulary::new(["a"]);
        assert!(parse_program("c.", Some(&v)).is_err());
    }

    #[test]
    fn syntax_errors_carry_positions() {
        match parse_program("a.\nb :- .c", None).unwrap_err() {
            Error::Syntax { line, .. } => assert_eq!(line, 2),
            e => panic!("unexpected {e:?}"),
        }
        assert!(matches!(
            parse_program("a", None),
            Err(Error::Syntax { line: 1, .. })
        ));
        assert!(parse_program("A.", None).is_err());
        assert!(parse_program("a :- not.", None).is_err());
    }

    #[test]
    fn union_is_set_union() {
        let a = prog("a.");
        assert_eq!(a.union(&a), a);
        assert_eq!(a.union(&prog("b :- a.")), prog("a. b :- a."));
        assert_eq!(
            prog("a. b :- a.").union(&prog(":- a.")),
            prog("a. b :- a. :- a.")
        );
    }

    #[test]
    fn single_rule_parser() {
        assert_eq!(
            parse_rule(" b :- a. ").unwrap(),
            Rule::new(["b"], [], ["a"], [])
        );
        assert!(parse_rule("a. b.").is_err());
    }
}
