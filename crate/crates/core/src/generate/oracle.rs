use std::collections::{HashSet, VecDeque};

use super::keys::action_key;
use super::state::{GenError, GenState, ParserAction};
use crate::frame::{CanonicalForm, Link, ProofNet, Vertex, VertexId};
use crate::term::to_semantic;

/// The generation target of any proof net: its semantic net with atoms,
/// goal mark, modes and directions erased.
pub fn semantic_target(net: &ProofNet) -> ProofNet {
    to_semantic(net).skeleton()
}

/// Knows every state from which a gold net can still be generated.
#[derive(Debug, Clone)]
pub struct GoldOracle {
    gold: GenState,
    good: HashSet<CanonicalForm>,
}

impl GoldOracle {
    /// Builds the oracle by walking predecessors back from the gold net.
    pub fn new(gold: &ProofNet) -> Result<Self, GenError> {
        let gold = GenState::from_net(semantic_target(gold))?;
        let mut good = HashSet::from([gold.canonical()]);
        let mut queue = VecDeque::from([gold.clone()]);
        while let Some(s) = queue.pop_front() {
            for (prev, _) in s.predecessors() {
                if good.insert(prev.canonical()) {
                    queue.push_back(prev);
                }
            }
        }
        Ok(GoldOracle { gold, good })
    }

    /// The gold state.
    pub fn gold(&self) -> &GenState {
        &self.gold
    }

    /// Number of states from which the gold net is reachable.
    pub fn good_states(&self) -> usize {
        self.good.len()
    }

    /// True when the gold net is reachable from `state`.
    pub fn reaches(&self, state: &GenState) -> bool {
        !state.is_stopped() && self.good.contains(&state.canonical())
    }

    /// True when `action` keeps the gold net reachable, or stops on it.
    pub fn is_good(&self, state: &GenState, action: ParserAction) -> bool {
        match action {
            ParserAction::Stop => !state.is_stopped() && state.canonical() == self.gold.canonical(),
            _ => state.apply(action).is_ok_and(|next| self.reaches(&next)),
        }
    }

    /// 1 for good actions, 0 otherwise.
    pub fn score(&self, state: &GenState, actions: &[ParserAction]) -> Vec<f64> {
        if !self.reaches(state) {
            return vec![0.0; actions.len()];
        }
        actions.iter().map(|a| if self.is_good(state, *a) { 1.0 } else { 0.0 }).collect()
    }

    /// The canonical action sequence generating the gold net from the
    /// initial state.
    ///
    /// At each step the good action of least priority is taken:
    /// compositions before expansions before `Stop`. Compositions go by
    /// the number of words they join, then by leftmost word. Expansions
    /// go by depth of the root below its component root, leftmost word
    /// of the root, depth of the descendant, leftmost word of the
    /// descendant, functor before argument.
    pub fn canonical_sequence(&self) -> Result<Vec<ParserAction>, GenError> {
        let mut state = GenState::init(self.gold.words())?;
        let mut out = Vec::new();
        while !state.is_stopped() {
            let best = state
                .legal_actions()
                .into_iter()
                .filter(|a| self.is_good(&state, *a))
                .min_by_key(|a| (priority(&state, *a), action_key(&state, *a)))
                .ok_or_else(|| GenError::Illegal {
                    action: ParserAction::Stop,
                    reason: "gold net is unreachable".into(),
                })?;
            state = state.apply(best)?;
            out.push(best);
        }
        Ok(out)
    }
}

fn words_above(state: &GenState, v: VertexId) -> Vec<usize> {
    let mut ws: Vec<usize> =
        state.net().subtree(v).into_iter().filter_map(|u| state.net().vertex(u).and_then(Vertex::word_index)).collect();
    ws.sort_unstable();
    ws
}

fn depth(state: &GenState, mut v: VertexId, top: VertexId) -> usize {
    let mut d = 0;
    while v != top {
        let next = match state.net().below(v) {
            Some((_, l)) => l.conclusions()[0],
            None => match state.net().above(v) {
                Some((_, Link::Par { arrow, withdrawn, .. })) if *withdrawn == v => *arrow,
                _ => break,
            },
        };
        v = next;
        d += 1;
    }
    d
}

type Priority = (u8, usize, usize, usize, usize, u8);

fn priority(state: &GenState, action: ParserAction) -> Priority {
    let leftmost = |v| words_above(state, v).first().copied().unwrap_or(usize::MAX);
    match action {
        ParserAction::Compose { functor, argument } => {
            let size = words_above(state, functor).len() + words_above(state, argument).len();
            (0, size, leftmost(functor).min(leftmost(argument)), 0, 0, 0)
        }
        ParserAction::ExpandFunctor { root, descendant } | ParserAction::ExpandArgument { root, descendant } => {
            let top = state.component_root(root);
            let side = u8::from(matches!(action, ParserAction::ExpandArgument { .. }));
            (1, depth(state, root, top), leftmost(root), depth(state, descendant, root), leftmost(descendant), side)
        }
        ParserAction::Stop => (2, 0, 0, 0, 0, 0),
    }
}

/// Replays actions from the initial state.
pub fn replay(words: usize, actions: &[ParserAction]) -> Result<GenState, GenError> {
    actions.iter().try_fold(GenState::init(words)?, |s, a| s.apply(*a))
}
