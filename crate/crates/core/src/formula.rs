//! Formulas, their text syntax, lexicons and the count check.
//!
//! The surface grammar is
//!
//! ```text
//! formula := atom | '(' formula ')' | formula '/' [digits] formula
//!          | formula '\' [digits] formula | formula '-o' formula
//! ```
//!
//! Operands that are themselves binary must be parenthesised, so
//! `a/b/c` is rejected while `(a/b)/c` is accepted. Mode `0` is the
//! unmarked connective and is never printed.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors raised while reading formulas or lexicons.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormulaError {
    /// Malformed formula text.
    #[error("syntax error at byte {pos}: {message}")]
    Syntax {
        /// Byte offset of the offending token.
        pos: usize,
        /// What went wrong.
        message: String,
    },
    /// A formula used both directional and linear connectives.
    #[error("formula mixes directional and linear connectives")]
    MixedConnectives,
    /// An atom name that is not a lowercase identifier.
    #[error("invalid atom name `{0}`")]
    InvalidAtom(String),
    /// A lexicon without words.
    #[error("lexicon has no entries")]
    EmptyLexicon,
    /// A lexicon file that is not valid JSON of the expected shape.
    #[error("lexicon JSON: {0}")]
    Json(String),
    /// A lexicon entry whose formula failed to parse.
    #[error("entry {index} (`{word}`): {source}")]
    Entry {
        /// Position of the entry.
        index: usize,
        /// The word of the entry.
        word: String,
        /// The underlying parse error.
        source: Box<FormulaError>,
    },
    /// The goal formula failed to parse.
    #[error("goal: {0}")]
    Goal(Box<FormulaError>),
}

/// An atomic formula name such as `np` or `s`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Atom(String);

impl Atom {
    /// Validates and wraps an atom name.
    pub fn new(name: impl Into<String>) -> Result<Self, FormulaError> {
        let name = name.into();
        if is_atom_name(&name) {
            Ok(Atom(name))
        } else {
            Err(FormulaError::InvalidAtom(name))
        }
    }

    /// The atom name.
    pub fn name(&self) -> &str {
        &self.0
    }
}

fn is_atom_name(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_')
}

impl TryFrom<String> for Atom {
    type Error = FormulaError;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        Atom::new(s)
    }
}

impl From<Atom> for String {
    fn from(a: Atom) -> String {
        a.0
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A mode index on a connective. Mode 0 is the default.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Mode(pub u32);

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Producer or consumer polarity of an atomic occurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarity {
    /// Producer: not connected from below.
    Negative,
    /// Consumer: not connected from above.
    Positive,
}

impl Polarity {
    /// The opposite polarity.
    pub fn flip(self) -> Self {
        match self {
            Polarity::Negative => Polarity::Positive,
            Polarity::Positive => Polarity::Negative,
        }
    }
}

/// A directional, multimodal or linear formula.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    /// An atomic formula.
    Atomic(Atom),
    /// `C /m B`: result on the left, argument on the right.
    Over(Box<Formula>, Mode, Box<Formula>),
    /// `A \m C`: argument on the left, result on the right.
    Under(Box<Formula>, Mode, Box<Formula>),
    /// `A -o B`: argument then result.
    Lolli(Box<Formula>, Box<Formula>),
}

impl Formula {
    /// An atomic formula; panics on an invalid name.
    pub fn atom(name: &str) -> Formula {
        Formula::Atomic(Atom::new(name).expect("valid atom name"))
    }

    /// Builds `result /mode arg`.
    pub fn over(result: Formula, mode: Mode, arg: Formula) -> Formula {
        Formula::Over(Box::new(result), mode, Box::new(arg))
    }

    /// Builds `arg \mode result`.
    pub fn under(arg: Formula, mode: Mode, result: Formula) -> Formula {
        Formula::Under(Box::new(arg), mode, Box::new(result))
    }

    /// Builds `arg -o result`.
    pub fn lolli(arg: Formula, result: Formula) -> Formula {
        Formula::Lolli(Box::new(arg), Box::new(result))
    }

    /// True for atomic formulas.
    pub fn is_atomic(&self) -> bool {
        matches!(self, Formula::Atomic(_))
    }

    /// True if any `/` or `\` occurs.
    pub fn is_directional(&self) -> bool {
        match self {
            Formula::Atomic(_) => false,
            Formula::Over(..) | Formula::Under(..) => true,
            Formula::Lolli(a, b) => a.is_directional() || b.is_directional(),
        }
    }

    /// True if any `-o` occurs.
    pub fn is_linear(&self) -> bool {
        match self {
            Formula::Atomic(_) => false,
            Formula::Lolli(..) => true,
            Formula::Over(a, _, b) | Formula::Under(a, _, b) => a.is_linear() || b.is_linear(),
        }
    }

    /// Visits the atomic leaves with the polarity they receive when
    /// the formula is unfolded at `polarity`.
    pub fn for_each_leaf(&self, polarity: Polarity, visit: &mut impl FnMut(&Atom, Polarity)) {
        match self {
            Formula::Atomic(a) => visit(a, polarity),
            Formula::Over(c, _, b) => {
                c.for_each_leaf(polarity, visit);
                b.for_each_leaf(polarity.flip(), visit);
            }
            Formula::Under(a, _, c) | Formula::Lolli(a, c) => {
                a.for_each_leaf(polarity.flip(), visit);
                c.for_each_leaf(polarity, visit);
            }
        }
    }

    /// Number of atomic occurrences.
    pub fn size(&self) -> usize {
        match self {
            Formula::Atomic(_) => 1,
            Formula::Over(a, _, b) | Formula::Under(a, _, b) | Formula::Lolli(a, b) => a.size() + b.size(),
        }
    }

    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_atomic() {
            write!(f, "{self}")
        } else {
            write!(f, "({self})")
        }
    }
}

fn write_slash(f: &mut fmt::Formatter<'_>, slash: char, mode: Mode) -> fmt::Result {
    if mode.0 == 0 {
        write!(f, "{slash}")
    } else {
        write!(f, "{slash}{} ", mode.0)
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Atomic(a) => write!(f, "{a}"),
            Formula::Over(c, m, b) => {
                c.fmt_operand(f)?;
                write_slash(f, '/', *m)?;
                b.fmt_operand(f)
            }
            Formula::Under(a, m, c) => {
                a.fmt_operand(f)?;
                write_slash(f, '\\', *m)?;
                c.fmt_operand(f)
            }
            Formula::Lolli(a, b) => {
                a.fmt_operand(f)?;
                f.write_str(" -o ")?;
                b.fmt_operand(f)
            }
        }
    }
}

impl FromStr for Formula {
    type Err = FormulaError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_formula(s)
    }
}

/// Parses formula text.
pub fn parse_formula(text: &str) -> Result<Formula, FormulaError> {
    let mut p = Parser { src: text, pos: 0 };
    let f = p.formula()?;
    p.skip_ws();
    if p.pos < text.len() {
        return Err(p.error("unexpected trailing input"));
    }
    if f.is_directional() && f.is_linear() {
        return Err(FormulaError::MixedConnectives);
    }
    Ok(f)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

enum Op {
    Over(Mode),
    Under(Mode),
    Lolli,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> FormulaError {
        FormulaError::Syntax { pos: self.pos, message: message.to_string() }
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn formula(&mut self) -> Result<Formula, FormulaError> {
        let left = self.operand()?;
        let Some(op) = self.op()? else {
            return Ok(left);
        };
        let right = self.operand()?;
        let f = match op {
            Op::Over(m) => Formula::over(left, m, right),
            Op::Under(m) => Formula::under(left, m, right),
            Op::Lolli => Formula::lolli(left, right),
        };
        if self.peek_op() {
            return Err(self.error("nested binary operands must be parenthesised"));
        }
        Ok(f)
    }

    fn operand(&mut self) -> Result<Formula, FormulaError> {
        self.skip_ws();
        let rest = self.rest();
        if rest.starts_with('(') {
            self.pos += 1;
            let f = self.formula()?;
            self.skip_ws();
            if !self.rest().starts_with(')') {
                return Err(self.error("expected `)`"));
            }
            self.pos += 1;
            return Ok(f);
        }
        let len = rest.find(|c: char| !(c.is_ascii_alphanumeric() || c == '_')).unwrap_or(rest.len());
        if len == 0 {
            return Err(self.error("expected an atom or `(`"));
        }
        let name = &rest[..len];
        let atom = Atom::new(name).map_err(|_| self.error(&format!("invalid atom `{name}`")))?;
        self.pos += len;
        Ok(Formula::Atomic(atom))
    }

    fn peek_op(&mut self) -> bool {
        self.skip_ws();
        let rest = self.rest();
        rest.starts_with('/') || rest.starts_with('\\') || rest.starts_with("-o")
    }

    fn op(&mut self) -> Result<Option<Op>, FormulaError> {
        self.skip_ws();
        let rest = self.rest();
        if rest.starts_with("-o") {
            self.pos += 2;
            return Ok(Some(Op::Lolli));
        }
        let over = match rest.chars().next() {
            Some('/') => true,
            Some('\\') => false,
            _ => return Ok(None),
        };
        self.pos += 1;
        let digits = self.rest().chars().take_while(char::is_ascii_digit).count();
        let mode = if digits == 0 {
            Mode(0)
        } else {
            let text = &self.rest()[..digits];
            let m = text.parse().map_err(|_| self.error("mode index out of range"))?;
            self.pos += digits;
            Mode(m)
        };
        Ok(Some(if over { Op::Over(mode) } else { Op::Under(mode) }))
    }
}

/// One lexicon entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexEntry {
    /// The word or token.
    pub word: String,
    /// Its formula.
    pub formula: Formula,
}

/// A sentence-sized lexicon: one formula per token plus a goal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    /// Entries in sentence order.
    pub entries: Vec<LexEntry>,
    /// The goal formula.
    pub goal: Formula,
}

#[derive(Serialize, Deserialize)]
struct LexiconJson {
    words: Vec<EntryJson>,
    goal: String,
}

#[derive(Serialize, Deserialize)]
struct EntryJson {
    w: String,
    f: String,
}

impl Lexicon {
    /// Builds a lexicon, rejecting an empty entry list.
    pub fn new(entries: Vec<LexEntry>, goal: Formula) -> Result<Self, FormulaError> {
        if entries.is_empty() {
            return Err(FormulaError::EmptyLexicon);
        }
        Ok(Lexicon { entries, goal })
    }

    /// Builds a lexicon from `(word, formula text)` pairs.
    pub fn parse(words: &[(&str, &str)], goal: &str) -> Result<Self, FormulaError> {
        let entries = words
            .iter()
            .enumerate()
            .map(|(index, (w, f))| {
                Ok(LexEntry {
                    word: w.to_string(),
                    formula: parse_formula(f).map_err(|e| FormulaError::Entry {
                        index,
                        word: w.to_string(),
                        source: Box::new(e),
                    })?,
                })
            })
            .collect::<Result<Vec<_>, FormulaError>>()?;
        let goal = parse_formula(goal).map_err(|e| FormulaError::Goal(Box::new(e)))?;
        Lexicon::new(entries, goal)
    }

    /// Reads the `{"words": [{"w", "f"}], "goal"}` format.
    pub fn from_json(text: &str) -> Result<Self, FormulaError> {
        let raw: LexiconJson = serde_json::from_str(text).map_err(|e| FormulaError::Json(e.to_string()))?;
        let pairs: Vec<(&str, &str)> = raw.words.iter().map(|e| (e.w.as_str(), e.f.as_str())).collect();
        Lexicon::parse(&pairs, &raw.goal)
    }

    /// Writes the JSON lexicon format.
    pub fn to_json(&self) -> String {
        let raw = LexiconJson {
            words: self.entries.iter().map(|e| EntryJson { w: e.word.clone(), f: e.formula.to_string() }).collect(),
            goal: self.goal.to_string(),
        };
        serde_json::to_string_pretty(&raw).expect("lexicon serialises")
    }

    /// Number of entries.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// Always false for a constructed lexicon.
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The formulas in sentence order.
    pub fn formulas(&self) -> impl Iterator<Item = &Formula> {
        self.entries.iter().map(|e| &e.formula)
    }
}

/// Negative and positive occurrence counts of one atom.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AtomCount {
    /// Producer occurrences.
    pub negatives: usize,
    /// Consumer occurrences.
    pub positives: usize,
}

impl AtomCount {
    /// True when both counts agree.
    pub fn is_balanced(&self) -> bool {
        self.negatives == self.positives
    }
}

/// Per-atom occurrence counts of a lexicon.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CountReport(pub BTreeMap<Atom, AtomCount>);

impl CountReport {
    /// True when every atom balances.
    pub fn is_balanced(&self) -> bool {
        self.0.values().all(AtomCount::is_balanced)
    }

    /// The atoms that do not balance.
    pub fn unbalanced(&self) -> Vec<(&Atom, AtomCount)> {
        self.0.iter().filter(|(_, c)| !c.is_balanced()).map(|(a, c)| (a, *c)).collect()
    }

    /// Counts for one atom name.
    pub fn get(&self, name: &str) -> Option<AtomCount> {
        self.0.iter().find(|(a, _)| a.name() == name).map(|(_, c)| *c)
    }
}

impl fmt::Display for CountReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (atom, c)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{atom}: -{} +{}", c.negatives, c.positives)?;
        }
        Ok(())
    }
}

/// Counts producer and consumer atom occurrences: words are unfolded
/// as producers, the goal as a consumer.
pub fn count_check(lexicon: &Lexicon) -> CountReport {
    let mut counts: BTreeMap<Atom, AtomCount> = BTreeMap::new();
    let mut visit = |a: &Atom, p: Polarity| {
        let c = counts.entry(a.clone()).or_default();
        match p {
            Polarity::Negative => c.negatives += 1,
            Polarity::Positive => c.positives += 1,
        }
    };
    for f in lexicon.formulas() {
        f.for_each_leaf(Polarity::Negative, &mut visit);
    }
    lexicon.goal.for_each_leaf(Polarity::Positive, &mut visit);
    CountReport(counts)
}
