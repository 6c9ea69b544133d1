use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Errors on lambda terms and their nets.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    /// Malformed term text.
    #[error("syntax error at byte {pos}: {message}")]
    Syntax {
        /// Byte offset.
        pos: usize,
        /// What went wrong.
        message: String,
    },
    /// A variable used other than exactly once.
    #[error("variable `{0}` is not used exactly once")]
    NotLinear(String),
    /// A variable bound twice or bound and free.
    #[error("variable `{0}` is bound more than once")]
    Rebound(String),
    /// A subterm without free variables.
    #[error("closed subterm `{0}`")]
    ClosedSubterm(String),
    /// An abstraction in functor position.
    #[error("beta redex `{0}`")]
    BetaRedex(String),
    /// A free variable that is not a word variable `x1`, `x2`, ...
    #[error("free variable `{0}` is not a word variable")]
    NotAWordVariable(String),
    /// A net that does not read as a linear lambda term.
    #[error("not a proof net: {0}")]
    NotANet(String),
}

/// A lambda term.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LambdaTerm {
    /// A variable.
    Var(String),
    /// Application of a functor to an argument.
    App(Box<LambdaTerm>, Box<LambdaTerm>),
    /// Abstraction of a variable over a body.
    Abs(String, Box<LambdaTerm>),
}

impl LambdaTerm {
    /// A variable.
    pub fn var(name: &str) -> Self {
        LambdaTerm::Var(name.to_string())
    }

    /// `(f a)`.
    pub fn app(f: LambdaTerm, a: LambdaTerm) -> Self {
        LambdaTerm::App(Box::new(f), Box::new(a))
    }

    /// `\x.body`.
    pub fn abs(x: &str, body: LambdaTerm) -> Self {
        LambdaTerm::Abs(x.to_string(), Box::new(body))
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        match self {
            LambdaTerm::Var(_) => 1,
            LambdaTerm::App(f, a) => 1 + f.size() + a.size(),
            LambdaTerm::Abs(_, b) => 1 + b.size(),
        }
    }

    /// Number of application nodes.
    pub fn app_count(&self) -> usize {
        match self {
            LambdaTerm::Var(_) => 0,
            LambdaTerm::App(f, a) => 1 + f.app_count() + a.app_count(),
            LambdaTerm::Abs(_, b) => b.app_count(),
        }
    }

    /// Number of abstraction nodes.
    pub fn abs_count(&self) -> usize {
        match self {
            LambdaTerm::Var(_) => 0,
            LambdaTerm::App(f, a) => f.abs_count() + a.abs_count(),
            LambdaTerm::Abs(_, b) => 1 + b.abs_count(),
        }
    }

    /// Free variable occurrences, with multiplicity, in order.
    pub fn free_occurrences(&self) -> Vec<String> {
        fn go(t: &LambdaTerm, bound: &mut Vec<String>, out: &mut Vec<String>) {
            match t {
                LambdaTerm::Var(x) => {
                    if !bound.contains(x) {
                        out.push(x.clone());
                    }
                }
                LambdaTerm::App(f, a) => {
                    go(f, bound, out);
                    go(a, bound, out);
                }
                LambdaTerm::Abs(x, b) => {
                    bound.push(x.clone());
                    go(b, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Free variables as a set.
    pub fn free_vars(&self) -> BTreeSet<String> {
        self.free_occurrences().into_iter().collect()
    }

    /// Renames free variables through `map`; unmapped names stay.
    pub fn rename_free(&self, map: &BTreeMap<String, String>) -> LambdaTerm {
        fn go(t: &LambdaTerm, map: &BTreeMap<String, String>, bound: &mut Vec<String>) -> LambdaTerm {
            match t {
                LambdaTerm::Var(x) if !bound.contains(x) => LambdaTerm::Var(map.get(x).unwrap_or(x).clone()),
                LambdaTerm::Var(x) => LambdaTerm::Var(x.clone()),
                LambdaTerm::App(f, a) => LambdaTerm::app(go(f, map, bound), go(a, map, bound)),
                LambdaTerm::Abs(x, b) => {
                    bound.push(x.clone());
                    let body = go(b, map, bound);
                    bound.pop();
                    LambdaTerm::Abs(x.clone(), Box::new(body))
                }
            }
        }
        go(self, map, &mut Vec::new())
    }

    /// Renames bound variables to `y1, y2, ...` in printing order.
    pub fn canonical_bound(&self) -> LambdaTerm {
        self.rename_bound(|i| format!("y{i}"))
    }

    /// Renames bound variables by their position in printing order.
    pub fn rename_bound(&self, name: impl Fn(usize) -> String) -> LambdaTerm {
        fn go(
            t: &LambdaTerm,
            env: &mut Vec<(String, String)>,
            counter: &mut usize,
            name: &dyn Fn(usize) -> String,
        ) -> LambdaTerm {
            match t {
                LambdaTerm::Var(x) => {
                    let renamed = env.iter().rev().find(|(old, _)| old == x).map(|(_, new)| new.clone());
                    LambdaTerm::Var(renamed.unwrap_or_else(|| x.clone()))
                }
                LambdaTerm::App(f, a) => {
                    let f = go(f, env, counter, name);
                    LambdaTerm::app(f, go(a, env, counter, name))
                }
                LambdaTerm::Abs(x, b) => {
                    *counter += 1;
                    let fresh = name(*counter);
                    env.push((x.clone(), fresh.clone()));
                    let body = go(b, env, counter, name);
                    env.pop();
                    LambdaTerm::Abs(fresh, Box::new(body))
                }
            }
        }
        go(self, &mut Vec::new(), &mut 0, &name)
    }

    /// True when the terms are equal up to renaming of bound variables.
    pub fn alpha_eq(&self, other: &LambdaTerm) -> bool {
        let name = |i| format!("\u{0}{i}");
        self.rename_bound(name) == other.rename_bound(name)
    }

    /// Checks linearity, the absence of closed subterms and beta-normality.
    pub fn validate(&self) -> Result<(), TermError> {
        let mut binders = BTreeSet::new();
        self.check_binders(&mut binders)?;
        let free = self.free_occurrences();
        let mut seen = BTreeSet::new();
        for x in &free {
            if binders.contains(x) {
                return Err(TermError::Rebound(x.clone()));
            }
            if !seen.insert(x) {
                return Err(TermError::NotLinear(x.clone()));
            }
        }
        self.check_shape().map(|_| ())
    }

    fn check_binders(&self, binders: &mut BTreeSet<String>) -> Result<(), TermError> {
        match self {
            LambdaTerm::Var(_) => Ok(()),
            LambdaTerm::App(f, a) => {
                f.check_binders(binders)?;
                a.check_binders(binders)
            }
            LambdaTerm::Abs(x, b) => {
                if !binders.insert(x.clone()) {
                    return Err(TermError::Rebound(x.clone()));
                }
                let uses = b.free_occurrences().iter().filter(|v| *v == x).count();
                if uses != 1 {
                    return Err(TermError::NotLinear(x.clone()));
                }
                b.check_binders(binders)
            }
        }
    }

    /// Returns the number of free occurrences, failing on closed
    /// subterms and redexes.
    fn check_shape(&self) -> Result<usize, TermError> {
        let free = match self {
            LambdaTerm::Var(_) => 1,
            LambdaTerm::App(f, a) => {
                if matches!(**f, LambdaTerm::Abs(..)) {
                    return Err(TermError::BetaRedex(self.to_string()));
                }
                f.check_shape()? + a.check_shape()?
            }
            LambdaTerm::Abs(_, b) => b.check_shape()? - 1,
        };
        if free == 0 {
            return Err(TermError::ClosedSubterm(self.to_string()));
        }
        Ok(free)
    }

    fn render(&self, top: bool, lambda: &str) -> String {
        match self {
            LambdaTerm::Var(x) => x.clone(),
            LambdaTerm::App(f, a) => {
                let left = match **f {
                    LambdaTerm::Abs(..) => format!("({})", f.render(true, lambda)),
                    _ => f.render(false, lambda),
                };
                let right = a.render(false, lambda);
                let sep = if left.ends_with(')') && right.starts_with('(') { "" } else { " " };
                if top {
                    format!("{left}{sep}{right}")
                } else {
                    format!("({left}{sep}{right})")
                }
            }
            LambdaTerm::Abs(x, b) => format!("{lambda}{x}.{}", b.render(false, lambda)),
        }
    }

    /// Renders with `λ` instead of `\`.
    pub fn to_unicode(&self) -> String {
        self.render(true, "λ")
    }
}

impl fmt::Display for LambdaTerm {
    /// Every application is parenthesised except the outermost one;
    /// the alternate form uses `λ`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(true, if f.alternate() { "λ" } else { "\\" }))
    }
}

impl FromStr for LambdaTerm {
    type Err = TermError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_term(s)
    }
}

/// Parses term text. Application is left-associative, abstraction
/// (`\x.` or `λx.`) extends as far right as possible.
pub fn parse_term(text: &str) -> Result<LambdaTerm, TermError> {
    let mut p = TermParser { src: text, pos: 0 };
    let t = p.sequence()?;
    p.skip_ws();
    if p.pos < text.len() {
        return Err(p.error("unexpected input"));
    }
    Ok(t)
}

struct TermParser<'a> {
    src: &'a str,
    pos: usize,
}

impl TermParser<'_> {
    fn error(&self, message: &str) -> TermError {
        TermError::Syntax { pos: self.pos, message: message.to_string() }
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        let t = self.rest().trim_start();
        self.pos = self.src.len() - t.len();
    }

    fn lambda(&mut self) -> bool {
        self.skip_ws();
        for l in ["\\", "λ"] {
            if self.rest().starts_with(l) {
                self.pos += l.len();
                return true;
            }
        }
        false
    }

    fn ident(&mut self) -> Option<String> {
        self.skip_ws();
        let rest = self.rest();
        let first = rest.chars().next()?;
        if !(first.is_alphabetic() || first == '_') || first == 'λ' {
            return None;
        }
        let len = rest
            .char_indices()
            .find(|(_, c)| !(c.is_alphanumeric() || *c == '_' || *c == '\'') || *c == 'λ')
            .map_or(rest.len(), |(i, _)| i);
        let name = rest[..len].to_string();
        self.pos += len;
        Some(name)
    }

    fn sequence(&mut self) -> Result<LambdaTerm, TermError> {
        let mut acc: Option<LambdaTerm> = None;
        loop {
            self.skip_ws();
            if self.rest().is_empty() || self.rest().starts_with(')') {
                break;
            }
            let item = if self.lambda() {
                let mut vars = Vec::new();
                while let Some(x) = self.ident() {
                    vars.push(x);
                }
                if vars.is_empty() {
                    return Err(self.error("expected a variable after lambda"));
                }
                self.skip_ws();
                if !self.rest().starts_with('.') {
                    return Err(self.error("expected `.`"));
                }
                self.pos += 1;
                let mut body = self.sequence()?;
                for x in vars.iter().rev() {
                    body = LambdaTerm::abs(x, body);
                }
                body
            } else if self.rest().starts_with('(') {
                self.pos += 1;
                let inner = self.sequence()?;
                self.skip_ws();
                if !self.rest().starts_with(')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                inner
            } else if let Some(x) = self.ident() {
                LambdaTerm::Var(x)
            } else {
                return Err(self.error("expected a term"));
            };
            acc = Some(match acc {
                None => item,
                Some(f) => LambdaTerm::app(f, item),
            });
        }
        acc.ok_or_else(|| self.error("empty term"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(s: &str) -> LambdaTerm {
        parse_term(s).unwrap()
    }

    #[test]
    fn prints_like_the_example() {
        let s = "(c i)((u f) \\x.(((a s) x) j))";
        let term = t(s);
        assert_eq!(term.to_string(), s);
        assert_eq!(term.to_unicode(), "(c i)((u f) λx.(((a s) x) j))");
        assert_eq!(format!("{term:#}"), term.to_unicode());
        assert_eq!(t("(c i)((u f) λx.(((a s) x) j))"), term);
        assert!(term.validate().is_ok());
    }

    #[test]
    fn application_is_left_associative() {
        assert_eq!(t("a b c"), t("(a b) c"));
        assert_eq!(t("a b c").to_string(), "(a b) c");
        assert_eq!(t("a (b c)").to_string(), "a (b c)");
        assert_eq!(t("\\x y.x y").to_string(), "\\x.\\y.(x y)");
    }

    #[test]
    fn validation() {
        assert!(t("x1").validate().is_ok());
        assert!(t("x1 \\y.(y x2)").validate().is_ok());
        assert_eq!(t("x1 x1").validate(), Err(TermError::NotLinear("x1".into())));
        assert!(matches!(t("x1 \\y.y").validate(), Err(TermError::ClosedSubterm(_))));
        assert!(matches!(t("\\y.x1").validate(), Err(TermError::NotLinear(_))));
        assert!(matches!(t("(\\y.(y x1)) x2").validate(), Err(TermError::BetaRedex(_))));
        assert!(matches!(t("\\y.(y \\y.(y x1))").validate(), Err(TermError::Rebound(_))));
    }

    #[test]
    fn bound_renaming() {
        let a = t("x1 \\p.(p \\q.(q x2))");
        assert_eq!(a.canonical_bound().to_string(), "x1 \\y1.(y1 \\y2.(y2 x2))");
        assert!(a.alpha_eq(&t("x1 \\u.(u \\v.(v x2))")));
        assert!(!a.alpha_eq(&t("x1 \\u.(u \\v.(v x3))")));
    }

    #[test]
    fn syntax_errors() {
        assert!(matches!(parse_term(""), Err(TermError::Syntax { .. })));
        assert!(matches!(parse_term("(a b"), Err(TermError::Syntax { .. })));
        assert!(matches!(parse_term("\\.a"), Err(TermError::Syntax { .. })));
        assert!(matches!(parse_term("a)"), Err(TermError::Syntax { .. })));
    }
}
