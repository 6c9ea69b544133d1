use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde_json::Value;
use thiserror::Error;

use crate::formula::Mode;
use crate::frame::Direction;

/// Errors in regime configuration.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RegimeError {
    /// Unknown path-class name.
    #[error("unknown path class `{0}`")]
    UnknownClass(String),
    /// Unknown structural rule name.
    #[error("unknown structural rule `{0}`")]
    UnknownRule(String),
    /// Malformed configuration.
    #[error("regime config: {0}")]
    Config(String),
}

/// A step through a tensor link: into its left or right premise.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    /// `l`
    Left,
    /// `r`
    Right,
}

impl Side {
    /// The side a par with this direction withdraws from, if fixed.
    pub fn of_direction(d: Option<Direction>) -> Option<Side> {
        match d {
            Some(Direction::Under) => Some(Side::Left),
            Some(Direction::Over) => Some(Side::Right),
            _ => None,
        }
    }
}

/// A sequence of tensor steps from a par premise to its withdrawn
/// hypothesis.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PathWord(pub Vec<Side>);

impl fmt::Display for PathWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.0 {
            f.write_str(match s {
                Side::Left => "l",
                Side::Right => "r",
            })?;
        }
        Ok(())
    }
}

impl FromStr for PathWord {
    type Err = RegimeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                'l' => Ok(Side::Left),
                'r' => Ok(Side::Right),
                _ => Err(RegimeError::Config(format!("bad path letter `{c}`"))),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(PathWord)
    }
}

/// The logic whose path language a par contraction must satisfy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PathClass {
    /// Exactly one step, on the par's side.
    NL,
    /// One or more steps, all on the par's side.
    L,
    /// Any path whose last step is on the par's side.
    BranchExt,
    /// Any non-empty path.
    LP,
}

impl PathClass {
    /// All classes from strictest to most permissive.
    pub const ALL: [PathClass; 4] = [PathClass::NL, PathClass::L, PathClass::BranchExt, PathClass::LP];
}

impl fmt::Display for PathClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PathClass::NL => "NL",
            PathClass::L => "L",
            PathClass::BranchExt => "BranchExt",
            PathClass::LP => "LP",
        })
    }
}

impl FromStr for PathClass {
    type Err = RegimeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "NL" | "nl" => Ok(PathClass::NL),
            "L" | "l" => Ok(PathClass::L),
            "BranchExt" | "branchext" | "branch-ext" | "branch_ext" => Ok(PathClass::BranchExt),
            "LP" | "lp" => Ok(PathClass::LP),
            _ => Err(RegimeError::UnknownClass(s.to_string())),
        }
    }
}

/// True iff `word` belongs to the path language of `class` on `side`.
pub fn path_accepts(class: PathClass, side: Side, word: &PathWord) -> bool {
    let w = &word.0;
    match class {
        PathClass::NL => w.len() == 1 && w[0] == side,
        PathClass::L => !w.is_empty() && w.iter().all(|s| *s == side),
        PathClass::BranchExt => w.last() == Some(&side),
        PathClass::LP => !w.is_empty(),
    }
}

/// True iff the word is accepted for a par with the given direction.
/// Undirected pars accept either side.
pub fn par_accepts(class: PathClass, direction: Option<Direction>, word: &PathWord) -> bool {
    match Side::of_direction(direction) {
        Some(side) => path_accepts(class, side, word),
        None => path_accepts(class, Side::Left, word) || path_accepts(class, Side::Right, word),
    }
}

/// Path classes per mode and direction, with a default.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Regime {
    default: PathClass,
    per_mode: BTreeMap<Mode, PathClass>,
    per_direction: BTreeMap<(Mode, Direction), PathClass>,
}

impl Regime {
    /// Every par uses the same class.
    pub fn uniform(class: PathClass) -> Self {
        Regime { default: class, per_mode: BTreeMap::new(), per_direction: BTreeMap::new() }
    }

    /// Sets the class of every direction of one mode.
    pub fn with_mode(mut self, mode: Mode, class: PathClass) -> Self {
        self.per_mode.insert(mode, class);
        self
    }

    /// Sets the class of one direction of one mode.
    pub fn with_direction(mut self, mode: Mode, direction: Direction, class: PathClass) -> Self {
        self.per_direction.insert((mode, direction), class);
        self
    }

    /// The default class.
    pub fn default_class(&self) -> PathClass {
        self.default
    }

    /// The class governing a par of this mode and direction.
    pub fn class_for(&self, mode: Mode, direction: Option<Direction>) -> PathClass {
        direction
            .and_then(|d| self.per_direction.get(&(mode, d)))
            .or_else(|| self.per_mode.get(&mode))
            .copied()
            .unwrap_or(self.default)
    }

    /// True when every class in the regime is LP, so word order is free.
    pub fn is_commutative(&self) -> bool {
        self.default == PathClass::LP
            && self.per_mode.values().all(|c| *c == PathClass::LP)
            && self.per_direction.values().all(|c| *c == PathClass::LP)
    }
}

/// A mode-indexed tree rewrite: the right daughter of a tensor of this
/// mode may be re-attached anywhere inside the left daughter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StructuralRule {
    /// The licensing mode.
    pub mode: Mode,
}

impl StructuralRule {
    /// The built-in mode-1 right-insertion rule.
    pub fn mode1_insert() -> Self {
        StructuralRule { mode: Mode(1) }
    }

    /// The configuration name of this rule.
    pub fn name(&self) -> String {
        format!("mode{}-insert", self.mode.0)
    }
}

impl FromStr for StructuralRule {
    type Err = RegimeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.strip_prefix("mode")
            .and_then(|r| r.strip_suffix("-insert"))
            .and_then(|m| m.parse().ok())
            .map(|m| StructuralRule { mode: Mode(m) })
            .ok_or_else(|| RegimeError::UnknownRule(s.to_string()))
    }
}

/// A regime together with the structural rules used to repair word order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegimeConfig {
    /// Contraction classes.
    pub regime: Regime,
    /// Structural rewrites.
    pub structural: Vec<StructuralRule>,
}

impl RegimeConfig {
    /// A regime without structural rules.
    pub fn new(regime: Regime) -> Self {
        RegimeConfig { regime, structural: Vec::new() }
    }

    /// Reads `{"default": .., "modes": {..}, "structural": [..]}`.
    pub fn from_json(text: &str) -> Result<Self, RegimeError> {
        let v: Value = serde_json::from_str(text).map_err(|e| RegimeError::Config(e.to_string()))?;
        let obj = v.as_object().ok_or_else(|| RegimeError::Config("expected an object".into()))?;
        let class = |v: &Value| -> Result<PathClass, RegimeError> {
            v.as_str().ok_or_else(|| RegimeError::Config(format!("expected a class name, got {v}")))?.parse()
        };
        let default = match obj.get("default") {
            Some(v) => class(v)?,
            None => PathClass::NL,
        };
        let mut regime = Regime::uniform(default);
        if let Some(modes) = obj.get("modes") {
            let modes = modes.as_object().ok_or_else(|| RegimeError::Config("`modes` must be an object".into()))?;
            for (k, v) in modes {
                let mode = Mode(k.parse().map_err(|_| RegimeError::Config(format!("bad mode `{k}`")))?);
                match v {
                    Value::String(_) => regime = regime.with_mode(mode, class(v)?),
                    Value::Object(dirs) => {
                        for (d, c) in dirs {
                            let dir = match d.as_str() {
                                "/" => Direction::Over,
                                "\\" => Direction::Under,
                                "-o" | "@" | "λ" => Direction::Linear,
                                "*" => {
                                    regime = regime.with_mode(mode, class(c)?);
                                    continue;
                                }
                                _ => return Err(RegimeError::Config(format!("bad direction `{d}`"))),
                            };
                            regime = regime.with_direction(mode, dir, class(c)?);
                        }
                    }
                    _ => return Err(RegimeError::Config(format!("bad entry for mode {k}"))),
                }
            }
        }
        let mut structural = Vec::new();
        if let Some(rules) = obj.get("structural") {
            let rules = rules.as_array().ok_or_else(|| RegimeError::Config("`structural` must be a list".into()))?;
            for r in rules {
                let name = r.as_str().ok_or_else(|| RegimeError::Config("rule names are strings".into()))?;
                structural.push(name.parse()?);
            }
        }
        Ok(RegimeConfig { regime, structural })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> PathWord {
        s.parse().unwrap()
    }

    #[test]
    fn path_languages() {
        assert!(path_accepts(PathClass::NL, Side::Right, &w("r")));
        assert!(!path_accepts(PathClass::NL, Side::Right, &w("rr")));
        assert!(path_accepts(PathClass::L, Side::Right, &w("rr")));
        assert!(!path_accepts(PathClass::L, Side::Right, &w("lr")));
        assert!(path_accepts(PathClass::BranchExt, Side::Left, &w("rl")));
        assert!(!path_accepts(PathClass::BranchExt, Side::Left, &w("lr")));
        assert!(path_accepts(PathClass::LP, Side::Left, &w("lr")));
        for c in PathClass::ALL {
            assert!(!path_accepts(c, Side::Left, &w("")));
            assert!(!path_accepts(c, Side::Right, &w("")));
        }
    }

    #[test]
    fn languages_nest() {
        let words = ["l", "r", "ll", "lr", "rl", "rr", "lrl", "rrr", "llr"];
        for s in words {
            for side in [Side::Left, Side::Right] {
                let acc: Vec<bool> = PathClass::ALL.iter().map(|c| path_accepts(*c, side, &w(s))).collect();
                for i in 1..acc.len() {
                    assert!(!acc[i - 1] || acc[i], "{s} {side:?}");
                }
            }
        }
    }

    #[test]
    fn undirected_par_accepts_either_side() {
        assert!(par_accepts(PathClass::NL, None, &w("l")));
        assert!(par_accepts(PathClass::NL, Some(Direction::Linear), &w("r")));
        assert!(!par_accepts(PathClass::NL, Some(Direction::Over), &w("l")));
    }

    #[test]
    fn config_parsing() {
        let c = RegimeConfig::from_json(
            r#"{"default":"NL","modes":{"2":"BranchExt","3":{"/":"L","\\":"LP"}},"structural":["mode1-insert"]}"#,
        )
        .unwrap();
        assert_eq!(c.regime.class_for(Mode(0), Some(Direction::Over)), PathClass::NL);
        assert_eq!(c.regime.class_for(Mode(2), Some(Direction::Under)), PathClass::BranchExt);
        assert_eq!(c.regime.class_for(Mode(3), Some(Direction::Over)), PathClass::L);
        assert_eq!(c.regime.class_for(Mode(3), Some(Direction::Under)), PathClass::LP);
        assert_eq!(c.structural, vec![StructuralRule::mode1_insert()]);
        assert!(matches!(RegimeConfig::from_json(r#"{"default":"XX"}"#), Err(RegimeError::UnknownClass(_))));
        assert!(matches!(RegimeConfig::from_json(r#"{"structural":["swap"]}"#), Err(RegimeError::UnknownRule(_))));
        assert!(Regime::uniform(PathClass::LP).is_commutative());
        assert!(!Regime::uniform(PathClass::LP).with_mode(Mode(1), PathClass::L).is_commutative());
    }
}
