use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::state::{GenState, ParserAction};
use crate::frame::{Link, ProofNet, Vertex, VertexId};

/// An action in state-independent coordinates: the terms of the
/// components it touches, with the selected vertices marked.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ActionKey(String);

impl ActionKey {
    /// The key text.
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ActionKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

struct Marked<'a> {
    net: &'a ProofNet,
    marks: BTreeMap<VertexId, (&'static str, &'static str)>,
    names: BTreeMap<VertexId, String>,
    bound: usize,
}

impl Marked<'_> {
    fn render(&mut self, v: VertexId, out: &mut String) {
        let (open, close) = self.marks.get(&v).copied().unwrap_or(("", ""));
        out.push_str(open);
        match self.net.above(v) {
            Some((_, Link::Par { arrow, premise, withdrawn, .. })) if *arrow == v => {
                let (premise, withdrawn) = (*premise, *withdrawn);
                self.bound += 1;
                let name = format!("y{}", self.bound);
                out.push_str(&format!("(\\{name}."));
                self.names.insert(withdrawn, name);
                self.render(premise, out);
                out.push(')');
            }
            Some((_, Link::Par { .. })) => out.push_str(self.names.get(&v).map_or("?", String::as_str)),
            Some((_, Link::Tensor { left, right, .. })) => {
                let (left, right) = (*left, *right);
                out.push('(');
                self.render(left, out);
                out.push(' ');
                self.render(right, out);
                out.push(')');
            }
            None => match self.net.vertex(v).and_then(Vertex::word_index) {
                Some(i) => out.push_str(&format!("x{}", i + 1)),
                None => out.push('?'),
            },
        }
        out.push_str(close);
    }
}

fn render(state: &GenState, root: VertexId, marks: &[(VertexId, (&'static str, &'static str))]) -> String {
    let mut m = Marked { net: state.net(), marks: marks.iter().copied().collect(), names: BTreeMap::new(), bound: 0 };
    let mut out = String::new();
    m.render(root, &mut out);
    out
}

/// The key of an action taken in `state`.
pub fn action_key(state: &GenState, action: ParserAction) -> ActionKey {
    ActionKey(match action {
        ParserAction::Stop => "stop".into(),
        ParserAction::Compose { functor, argument } => {
            format!("compose {} {}", render(state, functor, &[]), render(state, argument, &[]))
        }
        ParserAction::ExpandFunctor { root, descendant } | ParserAction::ExpandArgument { root, descendant } => {
            let top = state.component_root(root);
            let marks = if root == descendant {
                vec![(root, ("<[", "]>"))]
            } else {
                vec![(root, ("<", ">")), (descendant, ("[", "]"))]
            };
            format!("{} {}", action.op(), render(state, top, &marks))
        }
    })
}

/// Keys of a sequence of actions replayed from the first state.
pub fn sequence_keys(start: &GenState, actions: &[ParserAction]) -> Result<Vec<ActionKey>, super::GenError> {
    let mut state = start.clone();
    let mut out = Vec::with_capacity(actions.len());
    for a in actions {
        out.push(action_key(&state, *a));
        state = state.apply(*a)?;
    }
    Ok(out)
}

/// Precision, recall and F1 of a predicted set against a gold set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FScore {
    /// Fraction of predicted items that are gold.
    pub precision: f64,
    /// Fraction of gold items that were predicted.
    pub recall: f64,
    /// Harmonic mean of the two.
    pub f1: f64,
}

/// Set-based F-score; two empty sets score 1.
pub fn action_fscore<T: Ord>(predicted: &BTreeSet<T>, gold: &BTreeSet<T>) -> FScore {
    if predicted.is_empty() && gold.is_empty() {
        return FScore { precision: 1.0, recall: 1.0, f1: 1.0 };
    }
    let hits = predicted.intersection(gold).count() as f64;
    let precision = if predicted.is_empty() { 0.0 } else { hits / predicted.len() as f64 };
    let recall = if gold.is_empty() { 0.0 } else { hits / gold.len() as f64 };
    let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
    FScore { precision, recall, f1 }
}
