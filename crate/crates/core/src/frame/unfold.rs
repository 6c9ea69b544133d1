use crate::formula::{Formula, Lexicon, Mode, Polarity};

use super::net::{Direction, Link, Origin, ProofNet, Vertex, VertexId, VertexKind};

/// Unfolds a lexicon into its proof frame: one component per word and
/// one for the goal.
///
/// Words unfold as producers and the goal as a consumer. Complex goals
/// are accepted and unfold like any consumer occurrence.
pub fn unfold(lexicon: &Lexicon) -> ProofNet {
    let mut net = ProofNet::new();
    for (i, entry) in lexicon.entries.iter().enumerate() {
        let v = net.add_vertex(Vertex { kind: VertexKind::Internal, origin: Some(Origin::Word(i)) });
        unfold_at(&mut net, &entry.formula, v, Polarity::Negative);
    }
    let g = net.add_vertex(Vertex { kind: VertexKind::Internal, origin: Some(Origin::Goal) });
    unfold_at(&mut net, &lexicon.goal, g, Polarity::Positive);
    net
}

fn fresh(net: &mut ProofNet) -> VertexId {
    net.add_vertex(Vertex::internal())
}

fn tensor(net: &mut ProofNet, mode: Mode, tag: Direction, left: VertexId, right: VertexId, conclusion: VertexId) {
    net.add_link(Link::Tensor { mode, tag: Some(tag), left, right, conclusion })
        .expect("unfolding creates fresh vertices");
}

fn par(net: &mut ProofNet, mode: Mode, tag: Direction, premise: VertexId, arrow: VertexId, withdrawn: VertexId) {
    net.add_link(Link::Par { mode, tag: Some(tag), premise, arrow, withdrawn })
        .expect("unfolding creates fresh vertices");
}

/// Unfolds the occurrence of `f` at vertex `v` with the given polarity.
fn unfold_at(net: &mut ProofNet, f: &Formula, v: VertexId, polarity: Polarity) {
    match (f, polarity) {
        (Formula::Atomic(a), p) => {
            net.vertex_mut(v).expect("fresh vertex").kind = VertexKind::Atom { atom: a.clone(), polarity: Some(p) };
        }
        (Formula::Over(c, m, b), Polarity::Negative) => {
            let (bv, cv) = (fresh(net), fresh(net));
            tensor(net, *m, Direction::Over, v, bv, cv);
            unfold_at(net, b, bv, Polarity::Positive);
            unfold_at(net, c, cv, Polarity::Negative);
        }
        (Formula::Under(a, m, c), Polarity::Negative) => {
            let (av, cv) = (fresh(net), fresh(net));
            tensor(net, *m, Direction::Under, av, v, cv);
            unfold_at(net, a, av, Polarity::Positive);
            unfold_at(net, c, cv, Polarity::Negative);
        }
        (Formula::Lolli(a, b), Polarity::Negative) => {
            let (av, bv) = (fresh(net), fresh(net));
            tensor(net, Mode(0), Direction::Linear, v, av, bv);
            unfold_at(net, a, av, Polarity::Positive);
            unfold_at(net, b, bv, Polarity::Negative);
        }
        (Formula::Over(c, m, b), Polarity::Positive) => {
            let (cv, bv) = (fresh(net), fresh(net));
            par(net, *m, Direction::Over, cv, v, bv);
            unfold_at(net, c, cv, Polarity::Positive);
            unfold_at(net, b, bv, Polarity::Negative);
        }
        (Formula::Under(a, m, c), Polarity::Positive) => {
            let (cv, av) = (fresh(net), fresh(net));
            par(net, *m, Direction::Under, cv, v, av);
            unfold_at(net, c, cv, Polarity::Positive);
            unfold_at(net, a, av, Polarity::Negative);
        }
        (Formula::Lolli(a, b), Polarity::Positive) => {
            let (bv, av) = (fresh(net), fresh(net));
            par(net, Mode(0), Direction::Linear, bv, v, av);
            unfold_at(net, b, bv, Polarity::Positive);
            unfold_at(net, a, av, Polarity::Negative);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slots(net: &ProofNet, p: Polarity) -> Vec<String> {
        let mut out: Vec<String> = net
            .vertices()
            .filter(|(_, v)| v.polarity() == Some(p))
            .map(|(_, v)| v.atom().unwrap().to_string())
            .collect();
        out.sort();
        out
    }

    #[test]
    fn isolated_slots() {
        let lex = Lexicon::parse(&[("w", "np")], "s").unwrap();
        let net = unfold(&lex);
        assert_eq!(net.vertex_count(), 2);
        assert_eq!(net.link_count(), 0);
        assert_eq!(slots(&net, Polarity::Negative), vec!["np"]);
        assert_eq!(slots(&net, Polarity::Positive), vec!["s"]);
    }

    #[test]
    fn under_elimination_shape() {
        let lex = Lexicon::parse(&[("w", "np\\s")], "s").unwrap();
        let net = unfold(&lex);
        let (_, link) = net.links().next().unwrap();
        let Link::Tensor { left, right, conclusion, tag, .. } = *link else { panic!("tensor expected") };
        assert_eq!(tag, Some(Direction::Under));
        assert_eq!(net.vertex(right).unwrap().origin, Some(Origin::Word(0)));
        assert_eq!(net.vertex(left).unwrap().polarity(), Some(Polarity::Positive));
        assert_eq!(net.vertex(left).unwrap().atom().unwrap().name(), "np");
        assert_eq!(net.vertex(conclusion).unwrap().polarity(), Some(Polarity::Negative));
        assert_eq!(net.vertex(conclusion).unwrap().atom().unwrap().name(), "s");
    }

    #[test]
    fn complex_goal_unfolds_as_par() {
        let lex = Lexicon::parse(&[("x", "a/b"), ("y", "b/c")], "a/c").unwrap();
        let net = unfold(&lex);
        assert_eq!(net.par_count(), 1);
        assert_eq!(net.tensor_count(), 2);
        let g = net.goal_vertex().unwrap();
        assert!(matches!(net.above(g), Some((_, Link::Par { .. }))));
    }
}
