use std::collections::{BTreeSet, VecDeque};
use std::fmt::Write as _;

use super::net::{Link, Origin, ProofNet, VertexId, VertexKind};
use crate::formula::Polarity;

/// A canonical encoding of a net: equal exactly when the nets are
/// isomorphic by a renaming that fixes word and goal vertices.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalForm(String);

impl CanonicalForm {
    /// The encoded text.
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

/// The canonical vertex order of a net.
///
/// Traversal starts from the word vertices in sentence order, then the
/// goal, then any remaining vertex in id order. Each visited vertex
/// looks at its link above, then its link below, and numbers the
/// vertices of a newly seen link in role order.
pub fn canonical_numbering(net: &ProofNet) -> Vec<VertexId> {
    let mut starts: Vec<VertexId> = net.word_vertices().into_iter().map(|(_, v)| v).collect();
    starts.extend(net.goal_vertex());
    starts.extend(net.vertex_ids());

    let mut order = Vec::with_capacity(net.vertex_count());
    let mut numbered = BTreeSet::new();
    let mut seen_links = BTreeSet::new();
    let mut queue = VecDeque::new();
    for s in starts {
        if !numbered.insert(s) {
            continue;
        }
        order.push(s);
        queue.push_back(s);
        while let Some(v) = queue.pop_front() {
            for (lid, link) in [net.above(v), net.below(v)].into_iter().flatten() {
                if !seen_links.insert(lid) {
                    continue;
                }
                for u in link.vertices() {
                    if numbered.insert(u) {
                        order.push(u);
                        queue.push_back(u);
                    }
                }
            }
        }
    }
    order
}

/// The canonical form of a net, including atoms, polarities, modes
/// and tags.
pub fn canonical_form(net: &ProofNet) -> CanonicalForm {
    let order = canonical_numbering(net);
    let mut index = std::collections::BTreeMap::new();
    for (i, v) in order.iter().enumerate() {
        index.insert(*v, i);
    }
    let mut out = String::new();
    for v in &order {
        let vx = net.vertex(*v).expect("numbered vertex");
        match &vx.kind {
            VertexKind::Internal => out.push('i'),
            VertexKind::Atom { atom, polarity } => {
                let p = match polarity {
                    None => "",
                    Some(Polarity::Negative) => "-",
                    Some(Polarity::Positive) => "+",
                };
                let _ = write!(out, "a{p}{atom}");
            }
        }
        match vx.origin {
            Some(Origin::Word(i)) => {
                let _ = write!(out, "w{i}");
            }
            Some(Origin::Goal) => out.push('g'),
            None => {}
        }
        out.push(';');
    }
    let mut links: Vec<String> = net
        .links()
        .map(|(_, l)| {
            let [a, b, c] = l.vertices().map(|v| index[&v]);
            let (kind, tensor) = match l {
                Link::Tensor { .. } => ('T', true),
                Link::Par { .. } => ('P', false),
            };
            let tag = l.tag().map_or("", |t| t.tag(tensor));
            format!("{kind}{}{tag}:{a},{b},{c}", l.mode().0)
        })
        .collect();
    links.sort();
    out.push('|');
    out.push_str(&links.join(";"));
    CanonicalForm(out)
}

/// The net renumbered to its canonical order.
pub fn canonical_net(net: &ProofNet) -> ProofNet {
    net.renumbered(&canonical_numbering(net))
}

/// True when two nets have the same canonical form.
pub fn isomorphic(a: &ProofNet, b: &ProofNet) -> bool {
    canonical_form(a) == canonical_form(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::Mode;
    use crate::frame::net::{Direction, Vertex};

    fn app(net: &mut ProofNet, f: VertexId, a: VertexId) -> VertexId {
        let c = net.add_vertex(Vertex::internal());
        net.add_link(Link::Tensor { mode: Mode(0), tag: Some(Direction::Linear), left: f, right: a, conclusion: c })
            .unwrap();
        c
    }

    #[test]
    fn id_independent() {
        let mut a = ProofNet::new();
        let w0 = a.add_vertex(Vertex::word(0));
        let w1 = a.add_vertex(Vertex::word(1));
        app(&mut a, w0, w1);

        let mut b = ProofNet::new();
        let c = b.add_vertex(Vertex::internal());
        let w1 = b.add_vertex(Vertex::word(1));
        let w0 = b.add_vertex(Vertex::word(0));
        b.add_link(Link::Tensor { mode: Mode(0), tag: Some(Direction::Linear), left: w0, right: w1, conclusion: c })
            .unwrap();
        assert_eq!(canonical_form(&a), canonical_form(&b));
        assert_eq!(canonical_net(&b).to_json(), canonical_net(&a).to_json());
    }

    #[test]
    fn distinguishes_argument_order() {
        let mut a = ProofNet::new();
        let w0 = a.add_vertex(Vertex::word(0));
        let w1 = a.add_vertex(Vertex::word(1));
        let mut b = a.clone();
        app(&mut a, w0, w1);
        app(&mut b, w1, w0);
        assert!(!isomorphic(&a, &b));
    }
}
