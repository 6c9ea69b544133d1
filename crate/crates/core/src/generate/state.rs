use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::contraction::contract_pair;
use crate::formula::Mode;
use crate::frame::{canonical_form, CanonicalForm, Direction, Link, NetError, ProofNet, Vertex, VertexId};
use crate::term::{extract_component, LambdaTerm, TermError};

/// Errors of the generation engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    /// A sentence needs at least one word.
    #[error("a sentence needs at least one word")]
    NoWords,
    /// The action is not legal in the state.
    #[error("illegal action {action}: {reason}")]
    Illegal {
        /// The rejected action.
        action: ParserAction,
        /// Why it was rejected.
        reason: String,
    },
    /// A malformed action description.
    #[error("bad action: {0}")]
    BadAction(String),
    /// A structural error.
    #[error(transparent)]
    Net(#[from] NetError),
    /// A component stopped reading as a term.
    #[error(transparent)]
    Term(#[from] TermError),
}

/// A graph rewrite of the generation engine.
///
/// Vertex ids refer to the state the action is applied to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "ActionJson", into = "ActionJson")]
pub enum ParserAction {
    /// Joins two component roots with an application link.
    Compose {
        /// Root of the functor component.
        functor: VertexId,
        /// Root of the argument component.
        argument: VertexId,
    },
    /// `P[M[N]]` to `P[λx.M[(x N)]]` with `M` at `root` and `N` at
    /// `descendant`.
    ExpandFunctor {
        /// Where the abstraction is placed.
        root: VertexId,
        /// Where the new variable is applied.
        descendant: VertexId,
    },
    /// `P[M[N]]` to `P[λx.M[(N x)]]`.
    ExpandArgument {
        /// Where the abstraction is placed.
        root: VertexId,
        /// What the new variable is given to.
        descendant: VertexId,
    },
    /// Ends generation of a connected graph.
    Stop,
}

impl ParserAction {
    /// The wire name of the operation.
    pub fn op(&self) -> &'static str {
        match self {
            ParserAction::Compose { .. } => "compose",
            ParserAction::ExpandFunctor { .. } => "expand_f",
            ParserAction::ExpandArgument { .. } => "expand_a",
            ParserAction::Stop => "stop",
        }
    }

    /// True for the two expansions.
    pub fn is_expansion(&self) -> bool {
        matches!(self, ParserAction::ExpandFunctor { .. } | ParserAction::ExpandArgument { .. })
    }
}

impl fmt::Display for ParserAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParserAction::Compose { functor, argument } => write!(f, "compose({functor}, {argument})"),
            ParserAction::ExpandFunctor { root, descendant } => write!(f, "expand_f({root}, {descendant})"),
            ParserAction::ExpandArgument { root, descendant } => write!(f, "expand_a({root}, {descendant})"),
            ParserAction::Stop => f.write_str("stop"),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct ActionJson {
    op: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    functor: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    argument: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    root: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    descendant: Option<usize>,
}

impl From<ParserAction> for ActionJson {
    fn from(a: ParserAction) -> Self {
        let mut j = ActionJson { op: a.op().to_string(), functor: None, argument: None, root: None, descendant: None };
        match a {
            ParserAction::Compose { functor, argument } => {
                j.functor = Some(functor.0);
                j.argument = Some(argument.0);
            }
            ParserAction::ExpandFunctor { root, descendant } | ParserAction::ExpandArgument { root, descendant } => {
                j.root = Some(root.0);
                j.descendant = Some(descendant.0);
            }
            ParserAction::Stop => {}
        }
        j
    }
}

impl TryFrom<ActionJson> for ParserAction {
    type Error = GenError;

    fn try_from(j: ActionJson) -> Result<Self, GenError> {
        let need = |v: Option<usize>, field: &str| {
            v.map(VertexId).ok_or_else(|| GenError::BadAction(format!("`{}` needs `{field}`", j.op)))
        };
        Ok(match j.op.as_str() {
            "compose" => {
                ParserAction::Compose { functor: need(j.functor, "functor")?, argument: need(j.argument, "argument")? }
            }
            "expand_f" => ParserAction::ExpandFunctor {
                root: need(j.root, "root")?,
                descendant: need(j.descendant, "descendant")?,
            },
            "expand_a" => ParserAction::ExpandArgument {
                root: need(j.root, "root")?,
                descendant: need(j.descendant, "descendant")?,
            },
            "stop" => ParserAction::Stop,
            other => return Err(GenError::BadAction(format!("unknown op `{other}`"))),
        })
    }
}

/// A generation state: a semantic net whose components are proofs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenState {
    net: ProofNet,
    words: usize,
    stopped: bool,
}

const LINEAR: Option<Direction> = Some(Direction::Linear);

impl GenState {
    /// One isolated vertex per word.
    pub fn init(words: usize) -> Result<Self, GenError> {
        if words == 0 {
            return Err(GenError::NoWords);
        }
        let mut net = ProofNet::new();
        for i in 0..words {
            net.add_vertex(Vertex::word(i));
        }
        Ok(GenState { net, words, stopped: false })
    }

    /// Wraps a semantic net as an unstopped state after checking every
    /// component.
    pub fn from_net(net: ProofNet) -> Result<Self, GenError> {
        let words = net.word_vertices().len();
        if words == 0 {
            return Err(GenError::NoWords);
        }
        let state = GenState { net, words, stopped: false };
        state.check()?;
        Ok(state)
    }

    /// The current net.
    pub fn net(&self) -> &ProofNet {
        &self.net
    }

    /// Number of words.
    pub fn words(&self) -> usize {
        self.words
    }

    /// True once `Stop` was applied.
    pub fn is_stopped(&self) -> bool {
        self.stopped
    }

    /// Number of expansions performed so far.
    pub fn expansions(&self) -> usize {
        self.net.par_count()
    }

    /// Component roots in id order.
    pub fn roots(&self) -> Vec<VertexId> {
        self.net.roots()
    }

    /// Canonical form of the net.
    pub fn canonical(&self) -> CanonicalForm {
        canonical_form(&self.net)
    }

    fn is_abstraction(&self, v: VertexId) -> bool {
        matches!(self.net.above(v), Some((_, Link::Par { arrow, .. })) if *arrow == v)
    }

    fn is_hypothesis(&self, v: VertexId) -> bool {
        matches!(self.net.above(v), Some((_, Link::Par { withdrawn, .. })) if *withdrawn == v)
    }

    fn on_left_branch(&self, v: VertexId) -> bool {
        matches!(self.net.below(v), Some((_, Link::Tensor { left, .. })) if *left == v)
    }

    /// Vertices where an expansion may place its abstraction: component
    /// roots and hypotheses introduced by earlier expansions, minus
    /// those in functor position.
    pub fn expansion_roots(&self) -> Vec<VertexId> {
        let mut out: BTreeSet<VertexId> = self.net.roots().into_iter().collect();
        out.extend(self.net.vertex_ids().filter(|v| self.is_hypothesis(*v)));
        out.into_iter().filter(|v| !self.on_left_branch(*v)).collect()
    }

    /// The root of the component containing `v`.
    pub fn component_root(&self, mut v: VertexId) -> VertexId {
        loop {
            match self.net.below(v) {
                Some((_, l)) => v = l.conclusions()[0],
                None => match self.net.above(v) {
                    Some((_, Link::Par { withdrawn, arrow, .. })) if *withdrawn == v => v = *arrow,
                    _ => return v,
                },
            }
        }
    }

    /// All legal actions: `Stop` when connected, then compositions, then
    /// expansions. No action puts an abstraction in functor position.
    pub fn legal_actions(&self) -> Vec<ParserAction> {
        if self.stopped {
            return Vec::new();
        }
        let roots = self.net.roots();
        let mut out = Vec::new();
        if roots.len() == 1 {
            out.push(ParserAction::Stop);
        }
        for &functor in &roots {
            if self.is_abstraction(functor) {
                continue;
            }
            for &argument in &roots {
                if functor != argument {
                    out.push(ParserAction::Compose { functor, argument });
                }
            }
        }
        for root in self.expansion_roots() {
            for descendant in self.net.subtree(root) {
                out.push(ParserAction::ExpandFunctor { root, descendant });
                if !self.is_abstraction(descendant) {
                    out.push(ParserAction::ExpandArgument { root, descendant });
                }
            }
        }
        out
    }

    fn illegal(&self, action: ParserAction) -> Option<String> {
        if self.stopped {
            return Some("state is stopped".into());
        }
        let exists = |v: VertexId| self.net.vertex(v).is_some();
        match action {
            ParserAction::Stop => (self.net.roots().len() != 1).then(|| "graph is not connected".into()),
            ParserAction::Compose { functor, argument } => {
                if !exists(functor) || !exists(argument) {
                    Some("unknown vertex".into())
                } else if self.net.below(functor).is_some() || self.net.below(argument).is_some() {
                    Some("not a component root".into())
                } else if self.component_root(functor) == self.component_root(argument) {
                    Some("same component".into())
                } else if self.is_abstraction(functor) {
                    Some("abstraction in functor position".into())
                } else {
                    None
                }
            }
            ParserAction::ExpandFunctor { root, descendant } | ParserAction::ExpandArgument { root, descendant } => {
                if !exists(root) || !exists(descendant) {
                    Some("unknown vertex".into())
                } else if !self.expansion_roots().contains(&root) {
                    Some(format!("{root} is not an expansion root"))
                } else if !self.net.subtree(root).contains(&descendant) {
                    Some(format!("{descendant} is not above {root}"))
                } else if matches!(action, ParserAction::ExpandArgument { .. }) && self.is_abstraction(descendant) {
                    Some("abstraction in functor position".into())
                } else {
                    None
                }
            }
        }
    }

    /// Applies a legal action.
    pub fn apply(&self, action: ParserAction) -> Result<GenState, GenError> {
        if let Some(reason) = self.illegal(action) {
            return Err(GenError::Illegal { action, reason });
        }
        let mut next = self.clone();
        let net = &mut next.net;
        match action {
            ParserAction::Stop => next.stopped = true,
            ParserAction::Compose { functor, argument } => {
                let c = net.add_vertex(Vertex::internal());
                net.add_link(Link::Tensor {
                    mode: Mode(0),
                    tag: LINEAR,
                    left: functor,
                    right: argument,
                    conclusion: c,
                })?;
            }
            ParserAction::ExpandFunctor { root, descendant } | ParserAction::ExpandArgument { root, descendant } => {
                let x = net.add_vertex(Vertex::internal());
                let c = net.add_vertex(Vertex::internal());
                let arrow = net.add_vertex(Vertex::internal());
                net.move_below(descendant, c)?;
                let (left, right) = match action {
                    ParserAction::ExpandFunctor { .. } => (x, descendant),
                    _ => (descendant, x),
                };
                net.add_link(Link::Tensor { mode: Mode(0), tag: LINEAR, left, right, conclusion: c })?;
                let premise = if descendant == root { c } else { root };
                net.move_below(premise, arrow)?;
                net.add_link(Link::Par { mode: Mode(0), tag: LINEAR, premise, arrow, withdrawn: x })?;
            }
        }
        Ok(next)
    }

    /// Lambda terms of the components, one per root in id order.
    pub fn terms(&self) -> Result<Vec<LambdaTerm>, TermError> {
        self.net.roots().into_iter().map(|r| extract_component(&self.net, r)).collect()
    }

    /// Checks that every component reads as a valid term.
    pub fn check(&self) -> Result<(), GenError> {
        self.terms()?;
        Ok(())
    }

    /// The states this one can be reached from in one action, with the
    /// action taking each of them here.
    pub fn predecessors(&self) -> Vec<(GenState, ParserAction)> {
        let mut out = Vec::new();
        if self.stopped {
            let mut open = self.clone();
            open.stopped = false;
            out.push((open, ParserAction::Stop));
            return out;
        }
        let target = self.canonical();
        for (lid, link) in self.net.links() {
            let candidate = match *link {
                Link::Tensor { left, right, conclusion, .. } if self.net.below(conclusion).is_none() => {
                    let mut net = self.net.clone();
                    net.remove_link(lid).expect("link exists");
                    net.remove_vertex(conclusion).expect("vertex is free");
                    Some((net, ParserAction::Compose { functor: left, argument: right }))
                }
                Link::Par { premise, withdrawn, .. } => {
                    let Some((tid, Link::Tensor { left, right, conclusion, .. })) = self.net.below(withdrawn) else {
                        continue;
                    };
                    let Ok(net) = contract_pair(&self.net, lid, tid) else { continue };
                    let descendant = if *left == withdrawn { *right } else { *left };
                    let root = if *conclusion == premise { descendant } else { premise };
                    let action = if *left == withdrawn {
                        ParserAction::ExpandFunctor { root, descendant }
                    } else {
                        ParserAction::ExpandArgument { root, descendant }
                    };
                    Some((net, action))
                }
                _ => None,
            };
            let Some((net, action)) = candidate else { continue };
            let prev = GenState { net, words: self.words, stopped: false };
            if prev.check().is_err() {
                continue;
            }
            if matches!(prev.apply(action), Ok(s) if s.canonical() == target) {
                out.push((prev, action));
            }
        }
        out
    }
}

/// Number of (root, descendant) choices times two directions in the
/// component rooted at `root`, counting hypotheses that are expansion
/// roots as well.
pub fn expansion_count(state: &GenState, root: VertexId) -> usize {
    state
        .expansion_roots()
        .into_iter()
        .filter(|r| state.component_root(*r) == root)
        .map(|r| 2 * state.net().subtree(r).len())
        .sum()
}

/// `2 (n² + n - 1)` for a component of `n` vertices.
pub fn expansion_bound(vertices: usize) -> usize {
    2 * (vertices * vertices + vertices).saturating_sub(1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contraction::{is_proof_net, PathClass, Regime};

    fn compose(s: &GenState, f: usize, a: usize) -> GenState {
        s.apply(ParserAction::Compose { functor: VertexId(f), argument: VertexId(a) }).unwrap()
    }

    #[test]
    fn init_counts() {
        assert_eq!(GenState::init(0), Err(GenError::NoWords));
        let s = GenState::init(7).unwrap();
        let acts = s.legal_actions();
        let composes = acts.iter().filter(|a| matches!(a, ParserAction::Compose { .. })).count();
        let expands = acts.iter().filter(|a| a.is_expansion()).count();
        assert_eq!((composes, expands), (42, 14));
        assert!(!acts.contains(&ParserAction::Stop));

        let one = GenState::init(1).unwrap();
        let acts = one.legal_actions();
        assert_eq!(acts.len(), 3);
        assert_eq!(acts[0], ParserAction::Stop);
        assert_eq!(expansion_count(&one, VertexId(0)), 2);
    }

    #[test]
    fn compose_then_stop() {
        let s = compose(&GenState::init(2).unwrap(), 0, 1);
        let done = s.apply(ParserAction::Stop).unwrap();
        assert!(done.is_stopped());
        assert!(done.legal_actions().is_empty());
        assert_eq!(done.terms().unwrap()[0].to_string(), "x1 x2");
        assert!(matches!(done.apply(ParserAction::Stop), Err(GenError::Illegal { .. })));
    }

    #[test]
    fn expansions_build_terms() {
        let s = GenState::init(1).unwrap();
        let f = s.apply(ParserAction::ExpandFunctor { root: VertexId(0), descendant: VertexId(0) }).unwrap();
        assert_eq!(f.terms().unwrap()[0].to_string(), "\\y1.(y1 x1)");
        let a = s.apply(ParserAction::ExpandArgument { root: VertexId(0), descendant: VertexId(0) }).unwrap();
        assert_eq!(a.terms().unwrap()[0].to_string(), "\\y1.(x1 y1)");
        assert_eq!(a.net().vertex_count(), 4);
        assert_eq!(a.net().link_count(), 2);
        assert!(!a.legal_actions().iter().any(|x| matches!(x, ParserAction::Compose { .. })));
    }

    #[test]
    fn abstraction_stays_out_of_functor_position() {
        let s = GenState::init(2).unwrap();
        let s = s.apply(ParserAction::ExpandArgument { root: VertexId(0), descendant: VertexId(0) }).unwrap();
        let lam = s.roots().into_iter().find(|r| s.is_abstraction(*r)).unwrap();
        let err = s.apply(ParserAction::Compose { functor: lam, argument: VertexId(1) });
        assert!(matches!(err, Err(GenError::Illegal { .. })));
        let ok = s.apply(ParserAction::Compose { functor: VertexId(1), argument: lam }).unwrap();
        assert_eq!(ok.terms().unwrap()[0].to_string(), "x2 \\y1.(x1 y1)");
    }

    #[test]
    fn argument_lowering_through_hypothesis_root() {
        let s = GenState::init(1).unwrap();
        let s = s.apply(ParserAction::ExpandArgument { root: VertexId(0), descendant: VertexId(0) }).unwrap();
        let x = s.net().vertex_ids().find(|v| s.is_hypothesis(*v)).unwrap();
        assert!(s.expansion_roots().contains(&x));
        let s = s.apply(ParserAction::ExpandFunctor { root: x, descendant: x }).unwrap();
        assert_eq!(s.terms().unwrap()[0].to_string(), "\\y1.(x1 \\y2.(y2 y1))");
        assert!(is_proof_net(s.net(), &Regime::uniform(PathClass::LP), &[]).is_some());
    }

    #[test]
    fn predecessors_invert_actions() {
        let s = compose(&GenState::init(3).unwrap(), 0, 1);
        let s = s.apply(ParserAction::ExpandArgument { root: VertexId(3), descendant: VertexId(0) }).unwrap();
        let preds = s.predecessors();
        assert_eq!(preds.len(), 1);
        let (p, a) = &preds[0];
        assert!(a.is_expansion());
        assert_eq!(p.apply(*a).unwrap().canonical(), s.canonical());
        assert!(GenState::init(3).unwrap().predecessors().is_empty());
    }

    #[test]
    fn action_json() {
        let a = ParserAction::Compose { functor: VertexId(3), argument: VertexId(1) };
        let text = serde_json::to_string(&a).unwrap();
        assert_eq!(text, r#"{"op":"compose","functor":3,"argument":1}"#);
        assert_eq!(serde_json::from_str::<ParserAction>(&text).unwrap(), a);
        assert_eq!(serde_json::to_string(&ParserAction::Stop).unwrap(), r#"{"op":"stop"}"#);
        assert!(serde_json::from_str::<ParserAction>(r#"{"op":"expand_f","root":1}"#).is_err());
    }

    #[test]
    fn bounds() {
        assert_eq!(expansion_bound(1), 2);
        assert_eq!(expansion_bound(16), 542);
    }
}
