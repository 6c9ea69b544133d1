//! Backward generation of semantic proof nets, sequent style.
//!
//! A derivation keeps a partial net and a list of open boxes. A box
//! knows its hypothesis ports and its conclusion port and stands for a
//! part of the net still to be built. `-o L` splits a box around an
//! application link, `-o R` adds an abstraction with a fresh
//! hypothesis, and `stop` closes a box with a single hypothesis by
//! identifying it with the conclusion.

use std::collections::BTreeMap;

use rayon::prelude::*;
use thiserror::Error;

use crate::formula::Mode;
use crate::frame::{canonical_form, CanonicalForm, Direction, Link, NetError, ProofNet, Vertex, VertexId};

/// Errors of the backward generator.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BackwardError {
    /// A sentence needs at least one word.
    #[error("a sentence needs at least one word")]
    NoWords,
    /// No box at this index.
    #[error("no open box {0}")]
    NoBox(usize),
    /// The rule does not apply to the box.
    #[error("rule does not apply: {0}")]
    Inapplicable(String),
    /// A structural error.
    #[error(transparent)]
    Net(#[from] NetError),
}

/// An unfinished part of the net.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoalBox {
    /// Hypothesis ports in order.
    pub hypotheses: Vec<VertexId>,
    /// The conclusion port.
    pub conclusion: VertexId,
}

/// A partial derivation.
#[derive(Debug, Clone)]
pub struct BwState {
    /// Links built so far.
    pub net: ProofNet,
    /// Open boxes.
    pub boxes: Vec<GoalBox>,
    /// Number of `-o R` steps taken.
    pub pars: usize,
}

const LINEAR: Option<Direction> = Some(Direction::Linear);

impl BwState {
    /// True when no box is open.
    pub fn is_complete(&self) -> bool {
        self.boxes.is_empty()
    }

    fn open(&self, index: usize) -> Result<&GoalBox, BackwardError> {
        self.boxes.get(index).ok_or(BackwardError::NoBox(index))
    }
}

/// One box with a hypothesis per word.
pub fn bw_init(words: usize) -> Result<BwState, BackwardError> {
    if words == 0 {
        return Err(BackwardError::NoWords);
    }
    let mut net = ProofNet::new();
    let hypotheses = (0..words).map(|i| net.add_vertex(Vertex::word(i))).collect();
    let conclusion = net.add_vertex(Vertex::internal());
    Ok(BwState { net, boxes: vec![GoalBox { hypotheses, conclusion }], pars: 0 })
}

/// Applies `main` to the conclusion of a box built from the hypotheses
/// outside `left_side`; the application result joins `left_side` in a
/// box keeping the original conclusion.
pub fn bw_impl_left(
    state: &BwState,
    index: usize,
    main: VertexId,
    left_side: &[VertexId],
) -> Result<BwState, BackwardError> {
    let b = state.open(index)?;
    if !b.hypotheses.contains(&main) {
        return Err(BackwardError::Inapplicable(format!("{main} is not a hypothesis")));
    }
    if left_side.iter().any(|v| *v == main || !b.hypotheses.contains(v)) {
        return Err(BackwardError::Inapplicable("not a partition of the other hypotheses".into()));
    }
    let mut q: Vec<VertexId> = Vec::new();
    for v in left_side {
        if q.contains(v) {
            return Err(BackwardError::Inapplicable(format!("{v} listed twice")));
        }
        q.push(*v);
    }
    let r: Vec<VertexId> = b.hypotheses.iter().copied().filter(|v| *v != main && !q.contains(v)).collect();
    let mut next = state.clone();
    let arg = next.net.add_vertex(Vertex::internal());
    let result = next.net.add_vertex(Vertex::internal());
    next.net.add_link(Link::Tensor { mode: Mode(0), tag: LINEAR, left: main, right: arg, conclusion: result })?;
    let mut q_hyps: Vec<VertexId> = b.hypotheses.iter().copied().filter(|v| q.contains(v)).collect();
    q_hyps.push(result);
    let conclusion = b.conclusion;
    next.boxes.remove(index);
    next.boxes.insert(index, GoalBox { hypotheses: r, conclusion: arg });
    next.boxes.insert(index, GoalBox { hypotheses: q_hyps, conclusion });
    Ok(next)
}

/// Abstracts the conclusion of a box over a fresh hypothesis.
pub fn bw_impl_right(state: &BwState, index: usize) -> Result<BwState, BackwardError> {
    let b = state.open(index)?.clone();
    if b.hypotheses.is_empty() {
        return Err(BackwardError::Inapplicable("box has no hypotheses".into()));
    }
    let mut next = state.clone();
    let hyp = next.net.add_vertex(Vertex::internal());
    let body = next.net.add_vertex(Vertex::internal());
    next.net.add_link(Link::Par { mode: Mode(0), tag: LINEAR, premise: body, arrow: b.conclusion, withdrawn: hyp })?;
    let mut hypotheses = b.hypotheses;
    hypotheses.push(hyp);
    next.boxes[index] = GoalBox { hypotheses, conclusion: body };
    next.pars += 1;
    Ok(next)
}

/// Closes a box with exactly one hypothesis.
pub fn bw_stop(state: &BwState, index: usize) -> Result<BwState, BackwardError> {
    let b = state.open(index)?.clone();
    let [h] = b.hypotheses[..] else {
        return Err(BackwardError::Inapplicable(format!("stop needs one hypothesis, box has {}", b.hypotheses.len())));
    };
    let mut next = state.clone();
    next.net.merge(h, b.conclusion)?;
    next.boxes.remove(index);
    Ok(next)
}

/// Every `(main, left side)` choice of `-o L` for a box, empty sides
/// included: `k 2^(k-1)` for `k` hypotheses.
pub fn impl_left_choices(b: &GoalBox) -> Vec<(VertexId, Vec<VertexId>)> {
    let mut out = Vec::new();
    for &main in &b.hypotheses {
        let rest: Vec<VertexId> = b.hypotheses.iter().copied().filter(|v| *v != main).collect();
        for mask in 0u64..(1 << rest.len()) {
            let q = rest.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, v)| *v).collect();
            out.push((main, q));
        }
    }
    out
}

fn successors(state: &BwState, max_par: usize) -> Vec<BwState> {
    let b = &state.boxes[0];
    let mut out = Vec::new();
    if b.hypotheses.len() == 1 {
        out.extend(bw_stop(state, 0));
    }
    if state.pars < max_par {
        out.extend(bw_impl_right(state, 0));
    }
    for (main, q) in impl_left_choices(b) {
        // an argument box without hypotheses would be a closed subterm
        if q.len() + 1 == b.hypotheses.len() {
            continue;
        }
        out.extend(bw_impl_left(state, 0, main, &q));
    }
    out
}

fn explore(state: BwState, max_par: usize, depth: usize, out: &mut BTreeMap<CanonicalForm, ProofNet>) {
    if state.is_complete() {
        out.insert(canonical_form(&state.net), state.net);
        return;
    }
    let next = successors(&state, max_par);
    if depth < 2 {
        let parts: Vec<BTreeMap<CanonicalForm, ProofNet>> = next
            .into_par_iter()
            .map(|s| {
                let mut m = BTreeMap::new();
                explore(s, max_par, depth + 1, &mut m);
                m
            })
            .collect();
        for m in parts {
            out.extend(m);
        }
    } else {
        for s in next {
            explore(s, max_par, depth + 1, out);
        }
    }
}

/// Every net derivable with at most `max_par` uses of `-o R`, in
/// canonical order.
pub fn bw_enumerate(words: usize, max_par: usize) -> Result<Vec<ProofNet>, BackwardError> {
    let mut out = BTreeMap::new();
    explore(bw_init(words)?, max_par, 0, &mut out);
    Ok(out.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::extract_term;

    #[test]
    fn init() {
        assert!(matches!(bw_init(0), Err(BackwardError::NoWords)));
        let s = bw_init(3).unwrap();
        assert_eq!(s.boxes[0].hypotheses.len(), 3);
        let one = bw_init(1).unwrap();
        assert!(bw_stop(&one, 0).unwrap().is_complete());
    }

    #[test]
    fn choice_counts() {
        for k in 1..=8usize {
            let b = GoalBox { hypotheses: (0..k).map(VertexId).collect(), conclusion: VertexId(99) };
            assert_eq!(impl_left_choices(&b).len(), k << (k - 1));
        }
    }

    #[test]
    fn right_rule_and_stop() {
        let s = bw_init(2).unwrap();
        assert!(matches!(bw_stop(&s, 0), Err(BackwardError::Inapplicable(_))));
        let r = bw_impl_right(&bw_impl_right(&s, 0).unwrap(), 0).unwrap();
        assert_eq!(r.boxes[0].hypotheses.len(), 4);
        assert_eq!(r.net.par_count(), 2);
        assert!(matches!(bw_stop(&s, 3), Err(BackwardError::NoBox(3))));
    }

    #[test]
    fn left_rule_validates_partition() {
        let s = bw_init(3).unwrap();
        let [a, b, c] = [VertexId(0), VertexId(1), VertexId(2)];
        assert!(bw_impl_left(&s, 0, a, &[a]).is_err());
        assert!(bw_impl_left(&s, 0, a, &[b, b]).is_err());
        assert!(bw_impl_left(&s, 0, a, &[VertexId(7)]).is_err());
        let n = bw_impl_left(&s, 0, a, &[b]).unwrap();
        assert_eq!(n.boxes.len(), 2);
        assert_eq!(n.boxes[0].hypotheses.len(), 2);
        assert_eq!(n.boxes[1].hypotheses, vec![c]);
    }

    #[test]
    fn small_enumerations() {
        let one = bw_enumerate(1, 0).unwrap();
        assert_eq!(one.len(), 1);
        let two: Vec<String> =
            bw_enumerate(2, 0).unwrap().iter().map(|n| extract_term(n).unwrap().to_string()).collect();
        assert_eq!(two.len(), 2);
        assert!(two.contains(&"x1 x2".into()) && two.contains(&"x2 x1".into()));
        assert_eq!(bw_enumerate(1, 1).unwrap().len(), 3);
    }
}
