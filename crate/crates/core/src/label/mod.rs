//! Formula recovery for semantic nets: principal typing, label slots,
//! atom and connective labels, and directional lexicons.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Atom, Formula, Lexicon, Mode};
use crate::frame::{Direction, Link, ProofNet, VertexId};
use crate::generate::semantic_target;

mod typing;

pub use typing::{label_slots, principal_typing, recover_net, var_name, LabelSlots, Type, TypeVarTyping};

/// Errors of the labelling module.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabelError {
    /// The input is not a proof net.
    #[error("not a proof net: {0}")]
    NotANet(String),
    /// A typing with a variable not occurring exactly twice.
    #[error("not a principal typing: {0}")]
    NotPrincipal(String),
    /// A type variable without an atom.
    #[error("no atom for type variable {0}")]
    MissingAtom(String),
    /// A connective slot without a label.
    #[error("no connective label for vertex {0}")]
    MissingConnective(VertexId),
    /// A vertex that is not an atom slot.
    #[error("vertex {0} is not an atom slot")]
    NotASlot(VertexId),
    /// Two labels for one variable.
    #[error("type variable {var} labelled both {first} and {second}")]
    Inconsistent {
        /// The variable.
        var: String,
        /// One label.
        first: Atom,
        /// The other label.
        second: Atom,
    },
    /// Malformed labelling JSON.
    #[error("bad labelling: {0}")]
    Json(String),
}

/// Direction and mode of one connective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectiveLabel {
    /// `/` or `\`.
    #[serde(with = "dir_text")]
    pub dir: Direction,
    /// Mode index.
    pub mode: u32,
}

mod dir_text {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    use crate::frame::Direction;

    pub fn serialize<S: Serializer>(d: &Direction, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(d.tag(true))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Direction, D::Error> {
        match String::deserialize(d)?.as_str() {
            "/" => Ok(Direction::Over),
            "\\" => Ok(Direction::Under),
            other => Err(D::Error::custom(format!("direction must be `/` or `\\`, got `{other}`"))),
        }
    }
}

/// Atom labels per type variable and connective labels per vertex.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Labelling {
    /// Type variable name to atom.
    pub atoms: BTreeMap<String, Atom>,
    /// Connective slot to direction and mode.
    #[serde(with = "slot_keys")]
    pub connectives: BTreeMap<VertexId, ConnectiveLabel>,
}

mod slot_keys {
    use std::collections::BTreeMap;

    use serde::{de::Error, Deserialize, Deserializer, Serialize, Serializer};

    use super::ConnectiveLabel;
    use crate::frame::VertexId;

    pub fn serialize<S: Serializer>(m: &BTreeMap<VertexId, ConnectiveLabel>, s: S) -> Result<S::Ok, S::Error> {
        let text: BTreeMap<String, &ConnectiveLabel> = m.iter().map(|(k, v)| (k.0.to_string(), v)).collect();
        text.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<VertexId, ConnectiveLabel>, D::Error> {
        BTreeMap::<String, ConnectiveLabel>::deserialize(d)?
            .into_iter()
            .map(|(k, v)| {
                k.parse().map(|id| (VertexId(id), v)).map_err(|_| D::Error::custom(format!("bad vertex id `{k}`")))
            })
            .collect()
    }
}

impl Labelling {
    /// Reads the JSON labelling format.
    pub fn from_json(text: &str) -> Result<Self, LabelError> {
        serde_json::from_str(text).map_err(|e| LabelError::Json(e.to_string()))
    }

    /// Writes the JSON labelling format.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("labelling serialises")
    }

    /// Collapses per-vertex atom labels to per-variable labels.
    pub fn from_vertex_atoms(
        typing: &TypeVarTyping,
        vertex_atoms: &BTreeMap<VertexId, Atom>,
        connectives: BTreeMap<VertexId, ConnectiveLabel>,
    ) -> Result<Self, LabelError> {
        let var_of: BTreeMap<VertexId, usize> = typing.var_slots.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let mut atoms: BTreeMap<String, Atom> = BTreeMap::new();
        for (v, atom) in vertex_atoms {
            let var = var_name(*var_of.get(v).ok_or(LabelError::NotASlot(*v))?);
            match atoms.get(&var) {
                Some(first) if first != atom => {
                    return Err(LabelError::Inconsistent { var, first: first.clone(), second: atom.clone() })
                }
                _ => {
                    atoms.insert(var, atom.clone());
                }
            }
        }
        Ok(Labelling { atoms, connectives })
    }
}

fn directional(t: &Type, labelling: &Labelling) -> Result<Formula, LabelError> {
    match t {
        Type::Var(i) => {
            let name = var_name(*i);
            let atom = labelling.atoms.get(&name).ok_or(LabelError::MissingAtom(name))?;
            Ok(Formula::Atomic(atom.clone()))
        }
        Type::Arrow { slot, arg, res } => {
            let label = labelling.connectives.get(slot).ok_or(LabelError::MissingConnective(*slot))?;
            let (arg, res) = (directional(arg, labelling)?, directional(res, labelling)?);
            Ok(match label.dir {
                Direction::Under => Formula::under(arg, Mode(label.mode), res),
                _ => Formula::over(res, Mode(label.mode), arg),
            })
        }
    }
}

/// Replaces every variable by its atom and every linear implication by
/// the direction and mode at its slot.
pub fn directionalize(typing: &TypeVarTyping, labelling: &Labelling, words: &[String]) -> Result<Lexicon, LabelError> {
    let mut entries = Vec::with_capacity(typing.words.len());
    for (i, t) in typing.words.iter().enumerate() {
        let word = words.get(i).cloned().unwrap_or_else(|| format!("x{}", i + 1));
        entries.push((word, directional(t, labelling)?.to_string()));
    }
    let goal = directional(&typing.goal, labelling)?.to_string();
    let pairs: Vec<(&str, &str)> = entries.iter().map(|(w, f)| (w.as_str(), f.as_str())).collect();
    Lexicon::parse(&pairs, &goal).map_err(|e| LabelError::NotANet(e.to_string()))
}

/// The labels a perfect labeller assigns to the semantic version of a
/// directional proof structure, together with its principal typing.
pub fn gold_labels(directional_net: &ProofNet) -> Result<(TypeVarTyping, Labelling), LabelError> {
    let typing = principal_typing(&semantic_target(directional_net))?;
    let mut atoms = BTreeMap::new();
    for (i, v) in typing.var_slots.iter().enumerate() {
        let atom = directional_net
            .vertex(*v)
            .and_then(|x| x.atom())
            .ok_or_else(|| LabelError::NotANet(format!("vertex {v} carries no atom")))?;
        atoms.insert(var_name(i), atom.clone());
    }
    let mut connectives = BTreeMap::new();
    for (_, link) in directional_net.links() {
        let slot = match *link {
            Link::Tensor { conclusion, .. } => conclusion,
            Link::Par { arrow, .. } => arrow,
        };
        let dir = match link.tag() {
            Some(Direction::Under) => Direction::Under,
            Some(Direction::Over) => Direction::Over,
            other => return Err(LabelError::NotANet(format!("link at {slot} has no direction ({other:?})"))),
        };
        connectives.insert(slot, ConnectiveLabel { dir, mode: link.mode().0 });
    }
    Ok((typing, Labelling { atoms, connectives }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::Vertex;
    use crate::term::{parse_term, term_to_net};

    #[test]
    fn single_vertex() {
        let mut net = ProofNet::new();
        net.add_vertex(Vertex::word(0));
        let t = principal_typing(&net).unwrap();
        assert_eq!(t.to_string(), "x1: A\ngoal: A");
        let slots = label_slots(&net);
        assert_eq!(slots.atom_slots.len(), 1);
        assert!(slots.connective_slots.is_empty());
        let lab = Labelling { atoms: [("A".to_string(), Atom::new("np").unwrap())].into(), ..Default::default() };
        let lex = directionalize(&t, &lab, &["w".to_string()]).unwrap();
        assert_eq!(lex.entries[0].formula.to_string(), "np");
        assert_eq!(lex.goal.to_string(), "np");
    }

    #[test]
    fn lifted_argument() {
        let net = term_to_net(&parse_term("x1 \\y1.(y1 x2)").unwrap()).unwrap();
        let t = principal_typing(&net).unwrap();
        assert_eq!(t.to_string(), "x1: ((A -o B) -o B) -o C\nx2: A\ngoal: C");
        let mut occ = t.occurrences();
        occ.sort_unstable();
        assert_eq!(occ, vec![0, 0, 1, 1, 2, 2]);
        assert_eq!(t.connective_slots().len(), label_slots(&net).connective_slots.len());
    }

    #[test]
    fn missing_labels_are_reported() {
        let net = term_to_net(&parse_term("x1 x2").unwrap()).unwrap();
        let t = principal_typing(&net).unwrap();
        let mut lab = Labelling { atoms: [("A".to_string(), Atom::new("np").unwrap())].into(), ..Default::default() };
        let slot = net.roots()[0];
        assert_eq!(directionalize(&t, &lab, &[]), Err(LabelError::MissingConnective(slot)));
        lab.connectives.insert(slot, ConnectiveLabel { dir: Direction::Under, mode: 0 });
        assert!(matches!(directionalize(&t, &lab, &[]), Err(LabelError::MissingAtom(v)) if v == "B"));
    }

    #[test]
    fn inconsistent_vertex_labels() {
        let net = term_to_net(&parse_term("x1 x2").unwrap()).unwrap();
        let t = principal_typing(&net).unwrap();
        let slot = t.var_slots[0];
        let ok = Labelling::from_vertex_atoms(&t, &[(slot, Atom::new("np").unwrap())].into(), BTreeMap::new());
        assert_eq!(ok.unwrap().atoms["A"].to_string(), "np");
        let functor = net.word_vertex(0).unwrap();
        let bad = Labelling::from_vertex_atoms(&t, &[(functor, Atom::new("np").unwrap())].into(), BTreeMap::new());
        assert_eq!(bad, Err(LabelError::NotASlot(functor)));
    }

    #[test]
    fn labelling_json() {
        let text = r#"{"atoms":{"A":"n"},"connectives":{"7":{"dir":"\\","mode":1}}}"#;
        let lab = Labelling::from_json(text).unwrap();
        assert_eq!(lab.connectives[&VertexId(7)], ConnectiveLabel { dir: Direction::Under, mode: 1 });
        assert_eq!(Labelling::from_json(&lab.to_json()).unwrap(), lab);
        assert!(Labelling::from_json(r#"{"atoms":{},"connectives":{"x":{"dir":"/","mode":0}}}"#).is_err());
        assert!(Labelling::from_json(r#"{"atoms":{},"connectives":{"1":{"dir":"-o","mode":0}}}"#).is_err());
    }
}
