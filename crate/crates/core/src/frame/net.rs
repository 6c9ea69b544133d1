use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::{Atom, Mode, Polarity};

/// Identifier of a vertex inside one [`ProofNet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub usize);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Identifier of a link inside one [`ProofNet`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LinkId(pub usize);

/// Structural errors on proof nets.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    /// A vertex id not present in the net.
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    /// A link id not present in the net.
    #[error("unknown link {0:?}")]
    UnknownLink(LinkId),
    /// A link whose incident vertices are not pairwise distinct.
    #[error("link repeats vertex {0}")]
    RepeatedVertex(VertexId),
    /// A vertex would get a second link above it.
    #[error("vertex {0} already has a link above it")]
    AboveTaken(VertexId),
    /// A vertex would get a second link below it.
    #[error("vertex {0} already has a link below it")]
    BelowTaken(VertexId),
    /// Removing a vertex that still has links.
    #[error("vertex {0} is still linked")]
    VertexInUse(VertexId),
    /// Inserting a vertex id twice.
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(VertexId),
    /// Malformed JSON input.
    #[error("proof net JSON: {0}")]
    Json(String),
}

/// What a vertex carries.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum VertexKind {
    /// An atomic formula occurrence; unmatched slots carry a polarity.
    Atom {
        /// The atom name.
        atom: Atom,
        /// Polarity of a dangling slot, `None` once matched.
        polarity: Option<Polarity>,
    },
    /// A complex formula occurrence or an unlabelled vertex.
    Internal,
}

/// Where a vertex comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Origin {
    /// The lexical hypothesis of the word at this position.
    Word(usize),
    /// The goal conclusion.
    Goal,
}

/// A vertex of a proof net.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vertex {
    /// Payload.
    pub kind: VertexKind,
    /// Word or goal origin, if any.
    pub origin: Option<Origin>,
}

impl Vertex {
    /// An unlabelled vertex without origin.
    pub fn internal() -> Self {
        Vertex { kind: VertexKind::Internal, origin: None }
    }

    /// The hypothesis vertex of word `i`.
    pub fn word(i: usize) -> Self {
        Vertex { kind: VertexKind::Internal, origin: Some(Origin::Word(i)) }
    }

    /// The atom name, if this is an atom vertex.
    pub fn atom(&self) -> Option<&Atom> {
        match &self.kind {
            VertexKind::Atom { atom, .. } => Some(atom),
            VertexKind::Internal => None,
        }
    }

    /// The polarity of a dangling atom slot.
    pub fn polarity(&self) -> Option<Polarity> {
        match &self.kind {
            VertexKind::Atom { polarity, .. } => *polarity,
            VertexKind::Internal => None,
        }
    }

    /// The word index, if this is a word hypothesis.
    pub fn word_index(&self) -> Option<usize> {
        match self.origin {
            Some(Origin::Word(i)) => Some(i),
            _ => None,
        }
    }
}

/// Connective direction carried as a link tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Direction {
    /// `/`
    Over,
    /// `\`
    Under,
    /// `@` on tensors, `λ` on pars.
    Linear,
}

impl Direction {
    /// The tag text of this direction on a tensor (`true`) or a par.
    pub fn tag(self, tensor: bool) -> &'static str {
        match (self, tensor) {
            (Direction::Over, _) => "/",
            (Direction::Under, _) => "\\",
            (Direction::Linear, true) => "@",
            (Direction::Linear, false) => "λ",
        }
    }

    fn from_tag(s: &str) -> Option<Self> {
        match s {
            "/" => Some(Direction::Over),
            "\\" => Some(Direction::Under),
            "@" | "λ" | "\\lambda" | "lambda" => Some(Direction::Linear),
            _ => None,
        }
    }
}

/// A tensor (elimination) or par (introduction) link.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Link {
    /// Two premises above, one conclusion below.
    Tensor {
        /// Mode index.
        mode: Mode,
        /// Direction tag.
        tag: Option<Direction>,
        /// Left premise.
        left: VertexId,
        /// Right premise.
        right: VertexId,
        /// Conclusion.
        conclusion: VertexId,
    },
    /// One premise above; the arrow conclusion and the withdrawn
    /// hypothesis below.
    Par {
        /// Mode index.
        mode: Mode,
        /// Direction tag.
        tag: Option<Direction>,
        /// Premise (the body).
        premise: VertexId,
        /// Arrow conclusion (the implication).
        arrow: VertexId,
        /// Withdrawn hypothesis.
        withdrawn: VertexId,
    },
}

impl Link {
    /// Incident vertices in role order.
    pub fn vertices(&self) -> [VertexId; 3] {
        match *self {
            Link::Tensor { left, right, conclusion, .. } => [left, right, conclusion],
            Link::Par { premise, arrow, withdrawn, .. } => [premise, arrow, withdrawn],
        }
    }

    /// Vertices for which this link is the link below.
    pub fn premises(&self) -> Vec<VertexId> {
        match *self {
            Link::Tensor { left, right, .. } => vec![left, right],
            Link::Par { premise, .. } => vec![premise],
        }
    }

    /// Vertices for which this link is the link above.
    pub fn conclusions(&self) -> Vec<VertexId> {
        match *self {
            Link::Tensor { conclusion, .. } => vec![conclusion],
            Link::Par { arrow, withdrawn, .. } => vec![arrow, withdrawn],
        }
    }

    /// Mode index.
    pub fn mode(&self) -> Mode {
        match *self {
            Link::Tensor { mode, .. } | Link::Par { mode, .. } => mode,
        }
    }

    /// Direction tag.
    pub fn tag(&self) -> Option<Direction> {
        match *self {
            Link::Tensor { tag, .. } | Link::Par { tag, .. } => tag,
        }
    }

    /// True for tensor links.
    pub fn is_tensor(&self) -> bool {
        matches!(self, Link::Tensor { .. })
    }

    /// True for par links.
    pub fn is_par(&self) -> bool {
        matches!(self, Link::Par { .. })
    }

    /// The same link with every incident vertex mapped through `f`.
    pub fn mapped(&self, f: impl Fn(VertexId) -> VertexId) -> Link {
        match *self {
            Link::Tensor { mode, tag, left, right, conclusion } => {
                Link::Tensor { mode, tag, left: f(left), right: f(right), conclusion: f(conclusion) }
            }
            Link::Par { mode, tag, premise, arrow, withdrawn } => {
                Link::Par { mode, tag, premise: f(premise), arrow: f(arrow), withdrawn: f(withdrawn) }
            }
        }
    }

    fn substitute(&mut self, from: VertexId, to: VertexId) {
        *self = self.mapped(|v| if v == from { to } else { v });
    }

    /// The functor premise of a tensor: the left premise except for `\`.
    pub fn functor(&self) -> Option<VertexId> {
        match *self {
            Link::Tensor { tag: Some(Direction::Under), right, .. } => Some(right),
            Link::Tensor { left, .. } => Some(left),
            Link::Par { .. } => None,
        }
    }

    /// The argument premise of a tensor.
    pub fn argument(&self) -> Option<VertexId> {
        match *self {
            Link::Tensor { tag: Some(Direction::Under), left, .. } => Some(left),
            Link::Tensor { right, .. } => Some(right),
            Link::Par { .. } => None,
        }
    }
}

/// A hypergraph of vertices and tensor/par links.
///
/// The same type holds proof frames (dangling polarised atom slots),
/// proof structures, abstract and semantic nets, and generation states.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ProofNet {
    vertices: BTreeMap<VertexId, Vertex>,
    links: BTreeMap<LinkId, Link>,
    above: BTreeMap<VertexId, LinkId>,
    below: BTreeMap<VertexId, LinkId>,
    next_vertex: usize,
    next_link: usize,
}

impl ProofNet {
    /// An empty net.
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a vertex with a fresh id.
    pub fn add_vertex(&mut self, v: Vertex) -> VertexId {
        let id = VertexId(self.next_vertex);
        self.next_vertex += 1;
        self.vertices.insert(id, v);
        id
    }

    /// Adds a vertex with a given id.
    pub fn insert_vertex(&mut self, id: VertexId, v: Vertex) -> Result<(), NetError> {
        if self.vertices.contains_key(&id) {
            return Err(NetError::DuplicateVertex(id));
        }
        self.vertices.insert(id, v);
        self.next_vertex = self.next_vertex.max(id.0 + 1);
        Ok(())
    }

    /// Adds a link, checking the one-above/one-below discipline.
    pub fn add_link(&mut self, link: Link) -> Result<LinkId, NetError> {
        let vs = link.vertices();
        for (i, v) in vs.iter().enumerate() {
            if !self.vertices.contains_key(v) {
                return Err(NetError::UnknownVertex(*v));
            }
            if vs[..i].contains(v) {
                return Err(NetError::RepeatedVertex(*v));
            }
        }
        for v in link.premises() {
            if self.below.contains_key(&v) {
                return Err(NetError::BelowTaken(v));
            }
        }
        for v in link.conclusions() {
            if self.above.contains_key(&v) {
                return Err(NetError::AboveTaken(v));
            }
        }
        let id = LinkId(self.next_link);
        self.next_link += 1;
        for v in link.premises() {
            self.below.insert(v, id);
        }
        for v in link.conclusions() {
            self.above.insert(v, id);
        }
        self.links.insert(id, link);
        Ok(id)
    }

    /// Removes a link and returns it.
    pub fn remove_link(&mut self, id: LinkId) -> Result<Link, NetError> {
        let link = self.links.remove(&id).ok_or(NetError::UnknownLink(id))?;
        for v in link.premises() {
            self.below.remove(&v);
        }
        for v in link.conclusions() {
            self.above.remove(&v);
        }
        Ok(link)
    }

    /// Removes an unlinked vertex.
    pub fn remove_vertex(&mut self, id: VertexId) -> Result<Vertex, NetError> {
        if self.above.contains_key(&id) || self.below.contains_key(&id) {
            return Err(NetError::VertexInUse(id));
        }
        self.vertices.remove(&id).ok_or(NetError::UnknownVertex(id))
    }

    /// Identifies `drop` with `keep`: the links of `drop` are moved to
    /// `keep`, which must not already have a link in the same position.
    pub fn merge(&mut self, keep: VertexId, drop: VertexId) -> Result<(), NetError> {
        if keep == drop {
            return Ok(());
        }
        let kv = self.vertices.get(&keep).ok_or(NetError::UnknownVertex(keep))?;
        let dv = self.vertices.get(&drop).ok_or(NetError::UnknownVertex(drop))?;
        if self.above.contains_key(&keep) && self.above.contains_key(&drop) {
            return Err(NetError::AboveTaken(keep));
        }
        if self.below.contains_key(&keep) && self.below.contains_key(&drop) {
            return Err(NetError::BelowTaken(keep));
        }
        let mut merged = kv.clone();
        if merged.kind == VertexKind::Internal {
            merged.kind = dv.kind.clone();
        }
        merged.origin = match (kv.origin, dv.origin) {
            (Some(Origin::Word(i)), _) | (_, Some(Origin::Word(i))) => Some(Origin::Word(i)),
            (a, b) => a.or(b),
        };
        if let Some(l) = self.above.remove(&drop) {
            self.links.get_mut(&l).expect("indexed link").substitute(drop, keep);
            self.above.insert(keep, l);
        }
        if let Some(l) = self.below.remove(&drop) {
            self.links.get_mut(&l).expect("indexed link").substitute(drop, keep);
            self.below.insert(keep, l);
        }
        self.vertices.remove(&drop);
        self.vertices.insert(keep, merged);
        Ok(())
    }

    /// Moves the link below `from` so that it hangs below `to` instead.
    pub fn move_below(&mut self, from: VertexId, to: VertexId) -> Result<(), NetError> {
        if !self.vertices.contains_key(&to) {
            return Err(NetError::UnknownVertex(to));
        }
        if let Some(l) = self.below.get(&from).copied() {
            if self.below.contains_key(&to) {
                return Err(NetError::BelowTaken(to));
            }
            if self.links[&l].vertices().contains(&to) {
                return Err(NetError::RepeatedVertex(to));
            }
            self.below.remove(&from);
            self.links.get_mut(&l).expect("indexed link").substitute(from, to);
            self.below.insert(to, l);
        }
        Ok(())
    }

    /// Looks up a vertex.
    pub fn vertex(&self, id: VertexId) -> Option<&Vertex> {
        self.vertices.get(&id)
    }

    /// Mutable access to a vertex payload.
    pub fn vertex_mut(&mut self, id: VertexId) -> Option<&mut Vertex> {
        self.vertices.get_mut(&id)
    }

    /// Looks up a link.
    pub fn link(&self, id: LinkId) -> Option<&Link> {
        self.links.get(&id)
    }

    /// Mutable access to a link's mode and tag. Incidences must not be
    /// changed through this reference.
    pub(crate) fn link_mut(&mut self, id: LinkId) -> Option<&mut Link> {
        self.links.get_mut(&id)
    }

    /// Swaps the two premises of a tensor link.
    pub fn swap_premises(&mut self, id: LinkId) -> Result<(), NetError> {
        match self.links.get_mut(&id) {
            Some(Link::Tensor { left, right, .. }) => {
                std::mem::swap(left, right);
                Ok(())
            }
            Some(Link::Par { .. }) => Ok(()),
            None => Err(NetError::UnknownLink(id)),
        }
    }

    /// All vertices in id order.
    pub fn vertices(&self) -> impl Iterator<Item = (VertexId, &Vertex)> {
        self.vertices.iter().map(|(k, v)| (*k, v))
    }

    /// All vertex ids in order.
    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices.keys().copied()
    }

    /// All links in id order.
    pub fn links(&self) -> impl Iterator<Item = (LinkId, &Link)> {
        self.links.iter().map(|(k, v)| (*k, v))
    }

    /// The link of which `v` is a conclusion.
    pub fn above(&self, v: VertexId) -> Option<(LinkId, &Link)> {
        self.above.get(&v).map(|l| (*l, &self.links[l]))
    }

    /// The link of which `v` is a premise.
    pub fn below(&self, v: VertexId) -> Option<(LinkId, &Link)> {
        self.below.get(&v).map(|l| (*l, &self.links[l]))
    }

    /// Number of vertices.
    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Number of links.
    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    /// Number of par links.
    pub fn par_count(&self) -> usize {
        self.links.values().filter(|l| l.is_par()).count()
    }

    /// Number of tensor links.
    pub fn tensor_count(&self) -> usize {
        self.links.values().filter(|l| l.is_tensor()).count()
    }

    /// Vertices with no link below them.
    pub fn roots(&self) -> Vec<VertexId> {
        self.vertices.keys().copied().filter(|v| !self.below.contains_key(v)).collect()
    }

    /// The hypothesis vertex of word `i`.
    pub fn word_vertex(&self, i: usize) -> Option<VertexId> {
        self.vertices.iter().find(|(_, v)| v.origin == Some(Origin::Word(i))).map(|(k, _)| *k)
    }

    /// Word hypothesis vertices sorted by word index.
    pub fn word_vertices(&self) -> Vec<(usize, VertexId)> {
        let mut ws: Vec<(usize, VertexId)> =
            self.vertices.iter().filter_map(|(k, v)| v.word_index().map(|i| (i, *k))).collect();
        ws.sort();
        ws
    }

    /// The goal vertex, if marked.
    pub fn goal_vertex(&self) -> Option<VertexId> {
        self.vertices.iter().find(|(_, v)| v.origin == Some(Origin::Goal)).map(|(k, _)| *k)
    }

    /// Neighbours of `v` through its links.
    pub fn neighbours(&self, v: VertexId) -> impl Iterator<Item = VertexId> + '_ {
        [self.above.get(&v), self.below.get(&v)]
            .into_iter()
            .flatten()
            .flat_map(|l| self.links[l].vertices())
            .filter(move |u| *u != v)
    }

    /// Connected components, each sorted, ordered by smallest id.
    pub fn components(&self) -> Vec<BTreeSet<VertexId>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for start in self.vertices.keys() {
            if seen.contains(start) {
                continue;
            }
            let mut comp = BTreeSet::new();
            let mut stack = vec![*start];
            while let Some(v) = stack.pop() {
                if !comp.insert(v) {
                    continue;
                }
                stack.extend(self.neighbours(v).filter(|u| !comp.contains(u)));
            }
            seen.extend(comp.iter().copied());
            out.push(comp);
        }
        out
    }

    /// The component containing `v`.
    pub fn component_of(&self, v: VertexId) -> BTreeSet<VertexId> {
        let mut comp = BTreeSet::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            if comp.insert(u) {
                stack.extend(self.neighbours(u).filter(|w| !comp.contains(w)));
            }
        }
        comp
    }

    /// The sub-net induced by a set of vertices, keeping ids. Links
    /// are kept when all their vertices are in the set.
    pub fn subnet(&self, keep: &BTreeSet<VertexId>) -> ProofNet {
        let mut out = ProofNet::new();
        for v in keep {
            if let Some(vx) = self.vertices.get(v) {
                out.insert_vertex(*v, vx.clone()).expect("fresh id");
            }
        }
        for link in self.links.values() {
            if link.vertices().iter().all(|v| keep.contains(v)) {
                out.add_link(link.clone()).expect("sub-net of a valid net");
            }
        }
        out.next_vertex = out.next_vertex.max(self.next_vertex);
        out
    }

    /// True for a single-rooted tree built from tensor links only.
    pub fn is_tree(&self) -> bool {
        if self.vertices.is_empty() || self.links.values().any(Link::is_par) {
            return false;
        }
        let roots = self.roots();
        if roots.len() != 1 {
            return false;
        }
        let mut seen = BTreeSet::new();
        let mut stack = vec![roots[0]];
        while let Some(v) = stack.pop() {
            if !seen.insert(v) {
                return false;
            }
            if let Some((_, l)) = self.above(v) {
                stack.extend(l.premises());
            }
        }
        seen.len() == self.vertices.len()
    }

    /// Vertices reachable upward from `v` through tensor premises and
    /// par premises, in pre-order. Withdrawn hypotheses are leaves.
    pub fn subtree(&self, v: VertexId) -> Vec<VertexId> {
        let mut out = Vec::new();
        let mut seen = BTreeSet::new();
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            if !seen.insert(u) {
                continue;
            }
            out.push(u);
            match self.above(u) {
                Some((_, Link::Tensor { left, right, .. })) => {
                    stack.push(*right);
                    stack.push(*left);
                }
                Some((_, Link::Par { premise, arrow, .. })) if *arrow == u => stack.push(*premise),
                _ => {}
            }
        }
        out
    }

    /// Clears atoms, polarities and the goal mark and turns every tag
    /// into its linear counterpart with mode 0, keeping premise order.
    pub fn skeleton(&self) -> ProofNet {
        let mut out = self.clone();
        for v in out.vertices.values_mut() {
            v.kind = VertexKind::Internal;
            if v.origin == Some(Origin::Goal) {
                v.origin = None;
            }
        }
        for l in out.links.values_mut() {
            match l {
                Link::Tensor { mode, tag, .. } | Link::Par { mode, tag, .. } => {
                    *mode = Mode(0);
                    *tag = Some(Direction::Linear);
                }
            }
        }
        out
    }

    /// Renumbers vertices to `0..n` in the given order.
    pub fn renumbered(&self, order: &[VertexId]) -> ProofNet {
        let map: BTreeMap<VertexId, VertexId> = order.iter().enumerate().map(|(i, v)| (*v, VertexId(i))).collect();
        let mut out = ProofNet::new();
        for v in order {
            out.insert_vertex(map[v], self.vertices[v].clone()).expect("fresh id");
        }
        let mut links: Vec<Link> = self.links.values().map(|l| l.mapped(|v| map[&v])).collect();
        links.sort_by_key(|l| l.vertices());
        for l in links {
            out.add_link(l).expect("renumbering preserves validity");
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct NetJson {
    vertices: Vec<VertexJson>,
    links: Vec<LinkJson>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum OriginJson {
    Word(usize),
    Goal(String),
}

#[derive(Serialize, Deserialize)]
struct VertexJson {
    id: usize,
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    atom: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    polarity: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    word: Option<OriginJson>,
}

#[derive(Serialize, Deserialize)]
struct LinkJson {
    kind: String,
    mode: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    tag: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    left: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    right: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    conclusion: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    premise: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    arrow: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    withdrawn: Option<usize>,
}

fn json_err(msg: impl Into<String>) -> NetError {
    NetError::Json(msg.into())
}

impl ProofNet {
    /// Serialises to a JSON value in the exchange format.
    pub fn to_json_value(&self) -> serde_json::Value {
        let vertices = self
            .vertices
            .iter()
            .map(|(id, v)| {
                let (kind, atom, polarity) = match &v.kind {
                    VertexKind::Atom { atom, polarity } => (
                        "atom",
                        Some(atom.name().to_string()),
                        polarity.map(|p| match p {
                            Polarity::Negative => "neg".to_string(),
                            Polarity::Positive => "pos".to_string(),
                        }),
                    ),
                    VertexKind::Internal => ("internal", None, None),
                };
                VertexJson {
                    id: id.0,
                    kind: kind.to_string(),
                    atom,
                    polarity,
                    word: v.origin.map(|o| match o {
                        Origin::Word(i) => OriginJson::Word(i),
                        Origin::Goal => OriginJson::Goal("goal".to_string()),
                    }),
                }
            })
            .collect();
        let links = self
            .links
            .values()
            .map(|l| {
                let mut j = LinkJson {
                    kind: String::new(),
                    mode: l.mode().0,
                    tag: None,
                    left: None,
                    right: None,
                    conclusion: None,
                    premise: None,
                    arrow: None,
                    withdrawn: None,
                };
                match *l {
                    Link::Tensor { tag, left, right, conclusion, .. } => {
                        j.kind = "tensor".into();
                        j.tag = tag.map(|t| t.tag(true).to_string());
                        j.left = Some(left.0);
                        j.right = Some(right.0);
                        j.conclusion = Some(conclusion.0);
                    }
                    Link::Par { tag, premise, arrow, withdrawn, .. } => {
                        j.kind = "par".into();
                        j.tag = tag.map(|t| t.tag(false).to_string());
                        j.premise = Some(premise.0);
                        j.arrow = Some(arrow.0);
                        j.withdrawn = Some(withdrawn.0);
                    }
                }
                j
            })
            .collect();
        serde_json::to_value(NetJson { vertices, links }).expect("net serialises")
    }

    /// Serialises to pretty JSON text.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_json_value()).expect("net serialises")
    }

    /// Reads the JSON exchange format.
    pub fn from_json(text: &str) -> Result<Self, NetError> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| json_err(e.to_string()))?;
        Self::from_json_value(&value)
    }

    /// Reads the JSON exchange format from a parsed value.
    pub fn from_json_value(value: &serde_json::Value) -> Result<Self, NetError> {
        let raw: NetJson = serde_json::from_value(value.clone()).map_err(|e| json_err(e.to_string()))?;
        let mut net = ProofNet::new();
        for v in raw.vertices {
            let kind = match v.kind.as_str() {
                "internal" => VertexKind::Internal,
                "atom" => {
                    let name = v.atom.ok_or_else(|| json_err(format!("atom vertex {} has no atom", v.id)))?;
                    let atom = Atom::new(name).map_err(|e| json_err(e.to_string()))?;
                    let polarity = match v.polarity.as_deref() {
                        None => None,
                        Some("neg") => Some(Polarity::Negative),
                        Some("pos") => Some(Polarity::Positive),
                        Some(p) => return Err(json_err(format!("unknown polarity `{p}`"))),
                    };
                    VertexKind::Atom { atom, polarity }
                }
                k => return Err(json_err(format!("unknown vertex kind `{k}`"))),
            };
            let origin = match v.word {
                None => None,
                Some(OriginJson::Word(i)) => Some(Origin::Word(i)),
                Some(OriginJson::Goal(s)) if s == "goal" => Some(Origin::Goal),
                Some(OriginJson::Goal(s)) => return Err(json_err(format!("unknown origin `{s}`"))),
            };
            net.insert_vertex(VertexId(v.id), Vertex { kind, origin })?;
        }
        for l in raw.links {
            let tag = match l.tag.as_deref() {
                None => None,
                Some(t) => Some(Direction::from_tag(t).ok_or_else(|| json_err(format!("unknown tag `{t}`")))?),
            };
            let field = |f: Option<usize>, name: &str| {
                f.map(VertexId).ok_or_else(|| json_err(format!("{} link without `{name}`", l.kind)))
            };
            let link = match l.kind.as_str() {
                "tensor" => Link::Tensor {
                    mode: Mode(l.mode),
                    tag,
                    left: field(l.left, "left")?,
                    right: field(l.right, "right")?,
                    conclusion: field(l.conclusion, "conclusion")?,
                },
                "par" => Link::Par {
                    mode: Mode(l.mode),
                    tag,
                    premise: field(l.premise, "premise")?,
                    arrow: field(l.arrow, "arrow")?,
                    withdrawn: field(l.withdrawn, "withdrawn")?,
                },
                k => return Err(json_err(format!("unknown link kind `{k}`"))),
            };
            net.add_link(link)?;
        }
        Ok(net)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tensor(l: usize, r: usize, c: usize) -> Link {
        Link::Tensor {
            mode: Mode(0),
            tag: Some(Direction::Linear),
            left: VertexId(l),
            right: VertexId(r),
            conclusion: VertexId(c),
        }
    }

    fn three() -> ProofNet {
        let mut n = ProofNet::new();
        n.add_vertex(Vertex::word(0));
        n.add_vertex(Vertex::word(1));
        n.add_vertex(Vertex::internal());
        n
    }

    #[test]
    fn link_discipline() {
        let mut n = three();
        n.add_link(tensor(0, 1, 2)).unwrap();
        assert_eq!(n.roots(), vec![VertexId(2)]);
        assert!(n.is_tree());
        let extra = n.add_vertex(Vertex::internal());
        assert_eq!(n.add_link(tensor(0, extra.0, 1)), Err(NetError::BelowTaken(VertexId(0))));
        assert_eq!(n.add_link(tensor(2, 2, extra.0)), Err(NetError::RepeatedVertex(VertexId(2))));
        assert_eq!(n.remove_vertex(VertexId(0)), Err(NetError::VertexInUse(VertexId(0))));
    }

    #[test]
    fn merge_moves_links() {
        let mut n = three();
        let l = n.add_link(tensor(0, 1, 2)).unwrap();
        let top = n.add_vertex(Vertex::internal());
        n.merge(top, VertexId(2)).unwrap();
        assert_eq!(n.link(l).unwrap().vertices(), [VertexId(0), VertexId(1), top]);
        assert_eq!(n.vertex_count(), 3);
        assert_eq!(n.merge(VertexId(0), VertexId(1)), Err(NetError::BelowTaken(VertexId(0))));
    }

    #[test]
    fn components_and_subtree() {
        let mut n = three();
        n.add_vertex(Vertex::word(2));
        n.add_link(tensor(0, 1, 2)).unwrap();
        assert_eq!(n.components().len(), 2);
        assert_eq!(n.subtree(VertexId(2)), vec![VertexId(2), VertexId(0), VertexId(1)]);
    }

    #[test]
    fn json_round_trip() {
        let mut n = three();
        n.add_link(tensor(0, 1, 2)).unwrap();
        n.vertex_mut(VertexId(2)).unwrap().origin = Some(Origin::Goal);
        let back = ProofNet::from_json(&n.to_json()).unwrap();
        assert_eq!(back.to_json(), n.to_json());
        assert!(ProofNet::from_json(r#"{"vertices":[{"id":0,"kind":"odd"}],"links":[]}"#).is_err());
    }

    #[test]
    fn renumbering_keeps_shape() {
        let mut n = three();
        n.add_link(tensor(0, 1, 2)).unwrap();
        let r = n.renumbered(&[VertexId(2), VertexId(1), VertexId(0)]);
        assert_eq!(r.link(LinkId(0)).unwrap().vertices(), [VertexId(2), VertexId(1), VertexId(0)]);
        assert_eq!(r.vertex(VertexId(2)).unwrap().origin, Some(Origin::Word(0)));
    }
}
