use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use super::net::{NetError, ProofNet, VertexId, VertexKind};
use crate::formula::{Atom, Polarity};

/// Errors raised by matching enumeration and application.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    /// A vertex that is not a dangling atom slot.
    #[error("vertex {0} is not an atom slot")]
    NotASlot(VertexId),
    /// A pair whose first vertex is not negative or second not positive.
    #[error("pair {0} -> {1} does not go from a negative to a positive slot")]
    Polarity(VertexId, VertexId),
    /// A pair joining different atoms.
    #[error("pair {neg} -> {pos} joins `{neg_atom}` with `{pos_atom}`")]
    AtomMismatch {
        /// Negative slot.
        neg: VertexId,
        /// Positive slot.
        pos: VertexId,
        /// Its atom.
        neg_atom: Atom,
        /// The other atom.
        pos_atom: Atom,
    },
    /// A slot used by two pairs.
    #[error("slot {0} is matched twice")]
    Reused(VertexId),
    /// A slot left out of a matching that must be total.
    #[error("slot {0} is unmatched")]
    Unmatched(VertexId),
    /// The product of factorials does not fit.
    #[error("matching count overflows")]
    Overflow,
    /// A structural error while merging.
    #[error(transparent)]
    Net(#[from] NetError),
}

/// The dangling slots of one atom.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AtomSlots {
    /// Negative (producer) slots in id order.
    pub negatives: Vec<VertexId>,
    /// Positive (consumer) slots in id order.
    pub positives: Vec<VertexId>,
}

/// Groups the dangling atom slots of a frame by atom.
pub fn atom_slots(frame: &ProofNet) -> BTreeMap<Atom, AtomSlots> {
    let mut out: BTreeMap<Atom, AtomSlots> = BTreeMap::new();
    for (id, v) in frame.vertices() {
        if let VertexKind::Atom { atom, polarity: Some(p) } = &v.kind {
            let slots = out.entry(atom.clone()).or_default();
            match p {
                Polarity::Negative => slots.negatives.push(id),
                Polarity::Positive => slots.positives.push(id),
            }
        }
    }
    out
}

/// A set of negative-to-positive slot pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Matching {
    pairs: BTreeMap<VertexId, VertexId>,
}

impl Matching {
    /// An empty matching.
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a matching from pairs.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (VertexId, VertexId)>) -> Self {
        Matching { pairs: pairs.into_iter().collect() }
    }

    /// Adds a pair.
    pub fn insert(&mut self, neg: VertexId, pos: VertexId) {
        self.pairs.insert(neg, pos);
    }

    /// The positive partner of a negative slot.
    pub fn get(&self, neg: VertexId) -> Option<VertexId> {
        self.pairs.get(&neg).copied()
    }

    /// Pairs in negative-id order.
    pub fn pairs(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.pairs.iter().map(|(n, p)| (*n, *p))
    }

    /// Number of pairs.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    /// True when no pairs are present.
    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Checks every pair against the frame's slots.
    pub fn validate(&self, frame: &ProofNet) -> Result<(), FrameError> {
        let mut used = BTreeSet::new();
        for (n, p) in self.pairs() {
            let nv = frame.vertex(n).ok_or(NetError::UnknownVertex(n))?;
            let pv = frame.vertex(p).ok_or(NetError::UnknownVertex(p))?;
            let (Some(na), Some(pa)) = (nv.atom(), pv.atom()) else {
                return Err(FrameError::NotASlot(if nv.atom().is_none() { n } else { p }));
            };
            if nv.polarity() != Some(Polarity::Negative) || pv.polarity() != Some(Polarity::Positive) {
                return Err(FrameError::Polarity(n, p));
            }
            if na != pa {
                return Err(FrameError::AtomMismatch { neg: n, pos: p, neg_atom: na.clone(), pos_atom: pa.clone() });
            }
            if !used.insert(p) {
                return Err(FrameError::Reused(p));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Matching {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.pairs().map(|(n, p)| format!("{n}-{p}")).collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

/// An atom whose negative and positive counts differ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Imbalance {
    /// The atom.
    pub atom: Atom,
    /// Free negative slots.
    pub negatives: usize,
    /// Free positive slots.
    pub positives: usize,
}

/// The stream of total matchings extending a fixed partial matching,
/// in lexicographic order of the positive partners of the negative
/// slots taken in id order.
#[derive(Debug, Clone)]
pub struct MatchingStream {
    fixed: Matching,
    negs: Vec<VertexId>,
    pools: Vec<Vec<VertexId>>,
    cursor: Vec<usize>,
    assigned: Vec<VertexId>,
    used: BTreeSet<VertexId>,
    started: bool,
    exhausted: bool,
    imbalance: Vec<Imbalance>,
}

impl MatchingStream {
    /// Atoms whose counts differ; the stream is empty when non-empty.
    pub fn imbalance(&self) -> &[Imbalance] {
        &self.imbalance
    }

    fn pop(&mut self) -> bool {
        match self.assigned.pop() {
            Some(p) => {
                self.used.remove(&p);
                true
            }
            None => false,
        }
    }
}

impl Iterator for MatchingStream {
    type Item = Matching;

    fn next(&mut self) -> Option<Matching> {
        if self.exhausted {
            return None;
        }
        if self.started && !self.pop() {
            self.exhausted = true;
            return None;
        }
        self.started = true;
        loop {
            let d = self.assigned.len();
            if d == self.negs.len() {
                let mut m = self.fixed.clone();
                for (n, p) in self.negs.iter().zip(&self.assigned) {
                    m.insert(*n, *p);
                }
                return Some(m);
            }
            let pool = &self.pools[d];
            let next = (self.cursor[d]..pool.len()).find(|i| !self.used.contains(&pool[*i]));
            match next {
                Some(i) => {
                    self.cursor[d] = i + 1;
                    self.used.insert(pool[i]);
                    self.assigned.push(pool[i]);
                }
                None => {
                    self.cursor[d] = 0;
                    if !self.pop() {
                        self.exhausted = true;
                        return None;
                    }
                }
            }
        }
    }
}

struct FreeSlots {
    per_atom: Vec<(Atom, Vec<VertexId>, Vec<VertexId>)>,
}

fn free_slots(frame: &ProofNet, fixed: &Matching) -> Result<FreeSlots, FrameError> {
    fixed.validate(frame)?;
    let fixed_pos: BTreeSet<VertexId> = fixed.pairs().map(|(_, p)| p).collect();
    let per_atom = atom_slots(frame)
        .into_iter()
        .map(|(atom, s)| {
            let negs = s.negatives.into_iter().filter(|n| fixed.get(*n).is_none()).collect();
            let poss = s.positives.into_iter().filter(|p| !fixed_pos.contains(p)).collect();
            (atom, negs, poss)
        })
        .collect();
    Ok(FreeSlots { per_atom })
}

fn imbalances(free: &FreeSlots) -> Vec<Imbalance> {
    free.per_atom
        .iter()
        .filter(|(_, n, p)| n.len() != p.len())
        .map(|(atom, n, p)| Imbalance { atom: atom.clone(), negatives: n.len(), positives: p.len() })
        .collect()
}

/// Enumerates every total matching of a frame extending `fixed`.
pub fn enumerate_matchings(frame: &ProofNet, fixed: &Matching) -> Result<MatchingStream, FrameError> {
    let free = free_slots(frame, fixed)?;
    let imbalance = imbalances(&free);
    let mut negs: Vec<(VertexId, usize)> = Vec::new();
    for (i, (_, ns, _)) in free.per_atom.iter().enumerate() {
        negs.extend(ns.iter().map(|n| (*n, i)));
    }
    negs.sort();
    let pools = negs.iter().map(|(_, i)| free.per_atom[*i].2.clone()).collect();
    let n = negs.len();
    Ok(MatchingStream {
        fixed: fixed.clone(),
        negs: negs.into_iter().map(|(v, _)| v).collect(),
        pools,
        cursor: vec![0; n],
        assigned: Vec::with_capacity(n),
        used: BTreeSet::new(),
        started: false,
        exhausted: !imbalance.is_empty(),
        imbalance,
    })
}

/// Counts the total matchings extending `fixed` without enumerating.
pub fn count_matchings(frame: &ProofNet, fixed: &Matching) -> Result<u128, FrameError> {
    let free = free_slots(frame, fixed)?;
    if !imbalances(&free).is_empty() {
        return Ok(0);
    }
    let mut total: u128 = 1;
    for (_, negs, _) in &free.per_atom {
        for k in 2..=negs.len() as u128 {
            total = total.checked_mul(k).ok_or(FrameError::Overflow)?;
        }
    }
    Ok(total)
}

/// Identifies each matched pair, keeping the negative slot's id. The
/// merged vertex keeps its atom but loses its polarity.
pub fn apply_matching(frame: &ProofNet, m: &Matching) -> Result<ProofNet, FrameError> {
    m.validate(frame)?;
    let matched_pos: BTreeSet<VertexId> = m.pairs().map(|(_, p)| p).collect();
    for (_, slots) in atom_slots(frame) {
        for n in &slots.negatives {
            if m.get(*n).is_none() {
                return Err(FrameError::Unmatched(*n));
            }
        }
        for p in &slots.positives {
            if !matched_pos.contains(p) {
                return Err(FrameError::Unmatched(*p));
            }
        }
    }
    let mut net = frame.clone();
    for (n, p) in m.pairs() {
        net.merge(n, p)?;
        if let Some(VertexKind::Atom { polarity, .. }) = net.vertex_mut(n).map(|v| &mut v.kind) {
            *polarity = None;
        }
    }
    Ok(net)
}
