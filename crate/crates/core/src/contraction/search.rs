use std::collections::{BTreeSet, HashSet};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use thiserror::Error;

use super::regime::{par_accepts, PathClass, PathWord, Regime, Side, StructuralRule};
use super::structural::{repair_yield, YieldRepair};
use crate::formula::Mode;
use crate::frame::{canonical_form, CanonicalForm, Direction, Link, LinkId, NetError, ProofNet, VertexId};

/// Errors raised by [`contract`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContractionError {
    /// The redex no longer matches the net.
    #[error("stale redex: {0}")]
    Stale(String),
    /// A structural error while rewriting.
    #[error(transparent)]
    Net(#[from] NetError),
}

/// A par link together with the tensor path from its premise to its
/// withdrawn hypothesis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Redex {
    /// The par link.
    pub par: LinkId,
    /// Tensor links from the premise upward, with the side taken.
    pub path: Vec<(LinkId, Side)>,
    /// The class that licensed the contraction.
    pub class: PathClass,
}

impl Redex {
    /// The path word.
    pub fn word(&self) -> PathWord {
        PathWord(self.path.iter().map(|(_, s)| *s).collect())
    }
}

/// The tensor-only path from `from` upward to `to`.
fn tensor_path(net: &ProofNet, from: VertexId, to: VertexId) -> Option<Vec<(LinkId, Side)>> {
    fn go(
        net: &ProofNet,
        u: VertexId,
        to: VertexId,
        seen: &mut BTreeSet<VertexId>,
        acc: &mut Vec<(LinkId, Side)>,
    ) -> bool {
        if u == to && !acc.is_empty() {
            return true;
        }
        if !seen.insert(u) {
            return false;
        }
        if let Some((lid, Link::Tensor { left, right, .. })) = net.above(u) {
            for (next, side) in [(*left, Side::Left), (*right, Side::Right)] {
                acc.push((lid, side));
                if go(net, next, to, seen, acc) {
                    return true;
                }
                acc.pop();
            }
        }
        false
    }
    let mut acc = Vec::new();
    go(net, from, to, &mut BTreeSet::new(), &mut acc).then_some(acc)
}

/// Every par link whose tensor path satisfies the regime.
pub fn find_redexes(net: &ProofNet, regime: &Regime) -> Vec<Redex> {
    let mut out = Vec::new();
    for (lid, link) in net.links() {
        let Link::Par { mode, tag, premise, withdrawn, .. } = *link else { continue };
        let Some(path) = tensor_path(net, premise, withdrawn) else { continue };
        let class = regime.class_for(mode, tag);
        let word = PathWord(path.iter().map(|(_, s)| *s).collect());
        if par_accepts(class, tag, &word) {
            out.push(Redex { par: lid, path, class });
        }
    }
    out
}

/// Contracts a redex: the par link, the tensor holding the withdrawn
/// hypothesis and that hypothesis disappear, the sibling premise of the
/// tensor takes the tensor's place and the par premise takes the place
/// of the arrow conclusion.
pub fn contract(net: &ProofNet, redex: &Redex) -> Result<ProofNet, ContractionError> {
    let Some(Link::Par { premise, withdrawn, .. }) = net.link(redex.par).cloned() else {
        return Err(ContractionError::Stale(format!("no par link {:?}", redex.par)));
    };
    if tensor_path(net, premise, withdrawn).as_ref() != Some(&redex.path) {
        return Err(ContractionError::Stale("path changed".into()));
    }
    let (last, _) = *redex.path.last().ok_or_else(|| ContractionError::Stale("empty path".into()))?;
    contract_pair(net, redex.par, last)
}

/// Contracts a par link against the tensor link using its withdrawn
/// hypothesis as a premise, without checking the path between them.
pub(crate) fn contract_pair(net: &ProofNet, par: LinkId, tensor: LinkId) -> Result<ProofNet, ContractionError> {
    let Some(Link::Par { premise, arrow, withdrawn, .. }) = net.link(par).cloned() else {
        return Err(ContractionError::Stale(format!("no par link {par:?}")));
    };
    let Some(Link::Tensor { left, right, conclusion, .. }) = net.link(tensor).cloned() else {
        return Err(ContractionError::Stale("path link is not a tensor".into()));
    };
    let sibling = match (left == withdrawn, right == withdrawn) {
        (true, false) => right,
        (false, true) => left,
        _ => return Err(ContractionError::Stale("tensor does not hold the hypothesis".into())),
    };
    let mut out = net.clone();
    out.remove_link(par)?;
    out.remove_link(tensor)?;
    out.remove_vertex(withdrawn)?;
    out.merge(sibling, conclusion)?;
    let bottom = if conclusion == premise { sibling } else { premise };
    out.merge(bottom, arrow)?;
    Ok(out)
}

/// One contraction in a witness sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContractionStep {
    /// Mode of the contracted par.
    pub mode: Mode,
    /// Direction of the contracted par.
    pub direction: Option<Direction>,
    /// The licensing class.
    pub class: PathClass,
    /// The path word.
    pub word: PathWord,
}

/// Evidence that a structure is a proof net.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Witness {
    /// Contractions in the order applied.
    pub steps: Vec<ContractionStep>,
    /// The tree reached.
    pub tree: ProofNet,
    /// Word-order repair by structural rules, when the sentence order
    /// is reachable. Empty when the tree is already in order.
    pub repair: Option<YieldRepair>,
}

/// Search order for contraction candidates.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum SearchOrder {
    /// Redexes in link order.
    #[default]
    InOrder,
    /// Redexes shuffled with a seeded generator.
    Shuffled(u64),
}

/// Searches for a contraction sequence reaching a tree.
///
/// The search backtracks over all redexes and remembers failed states
/// by canonical form.
pub fn contract_to_tree(
    net: &ProofNet,
    regime: &Regime,
    order: SearchOrder,
) -> Option<(Vec<ContractionStep>, ProofNet)> {
    let mut failed = HashSet::new();
    let mut rng = match order {
        SearchOrder::InOrder => None,
        SearchOrder::Shuffled(seed) => Some(StdRng::seed_from_u64(seed)),
    };
    search(net, regime, &mut failed, &mut rng)
}

fn search(
    net: &ProofNet,
    regime: &Regime,
    failed: &mut HashSet<CanonicalForm>,
    rng: &mut Option<StdRng>,
) -> Option<(Vec<ContractionStep>, ProofNet)> {
    if net.is_tree() {
        return Some((Vec::new(), net.clone()));
    }
    if net.par_count() == 0 {
        return None;
    }
    let key = canonical_form(net);
    if failed.contains(&key) {
        return None;
    }
    let mut redexes = find_redexes(net, regime);
    if let Some(rng) = rng.as_mut() {
        redexes.shuffle(rng);
    }
    for r in redexes {
        let Ok(next) = contract(net, &r) else { continue };
        if let Some((mut steps, tree)) = search(&next, regime, failed, rng) {
            let Some(Link::Par { mode, tag, .. }) = net.link(r.par) else { unreachable!("redex par exists") };
            steps.insert(0, ContractionStep { mode: *mode, direction: *tag, class: r.class, word: r.word() });
            return Some((steps, tree));
        }
    }
    failed.insert(key);
    None
}

/// Decides whether a structure contracts to a tree under the regime.
///
/// The answer depends on contraction alone. When it holds, the witness
/// also records whether the structural rules can bring the tree's yield
/// into sentence order.
pub fn is_proof_net(net: &ProofNet, regime: &Regime, structural: &[StructuralRule]) -> Option<Witness> {
    is_proof_net_with(net, regime, structural, SearchOrder::InOrder)
}

/// [`is_proof_net`] with an explicit redex order.
pub fn is_proof_net_with(
    net: &ProofNet,
    regime: &Regime,
    structural: &[StructuralRule],
    order: SearchOrder,
) -> Option<Witness> {
    let (steps, tree) = contract_to_tree(net, regime, order)?;
    let n = net.word_vertices().len();
    let target: Vec<usize> = (0..n).collect();
    let repair = repair_yield(&tree, structural, &target);
    Some(Witness { steps, tree, repair })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::Vertex;

    /// One `/` tensor under a `/` par whose withdrawn hypothesis is the
    /// tensor's right premise.
    fn minimal() -> ProofNet {
        let mut n = ProofNet::new();
        let g = n.add_vertex(Vertex::word(0));
        let w = n.add_vertex(Vertex::internal());
        let c = n.add_vertex(Vertex::internal());
        let a = n.add_vertex(Vertex::internal());
        n.add_link(Link::Tensor { mode: Mode(0), tag: Some(Direction::Over), left: g, right: w, conclusion: c })
            .unwrap();
        n.add_link(Link::Par { mode: Mode(0), tag: Some(Direction::Over), premise: c, arrow: a, withdrawn: w })
            .unwrap();
        n
    }

    #[test]
    fn minimal_contraction() {
        let net = minimal();
        let rs = find_redexes(&net, &Regime::uniform(PathClass::NL));
        assert_eq!(rs.len(), 1);
        assert_eq!(rs[0].word().to_string(), "r");
        let out = contract(&net, &rs[0]).unwrap();
        assert_eq!(out.vertex_count(), net.vertex_count() - 3);
        assert_eq!(out.link_count(), net.link_count() - 2);
        assert!(out.is_tree());
        assert_eq!(out.word_vertices().len(), 1);
    }

    #[test]
    fn stale_redex_is_rejected() {
        let net = minimal();
        let r = find_redexes(&net, &Regime::uniform(PathClass::NL)).remove(0);
        let out = contract(&net, &r).unwrap();
        assert!(matches!(contract(&out, &r), Err(ContractionError::Stale(_))));
    }

    #[test]
    fn wrong_side_is_not_a_redex() {
        let mut net = minimal();
        let (lid, _) = net.links().find(|(_, l)| l.is_par()).unwrap();
        if let Some(Link::Par { tag, .. }) = net.link_mut(lid) {
            *tag = Some(Direction::Under);
        }
        assert!(find_redexes(&net, &Regime::uniform(PathClass::NL)).is_empty());
        assert_eq!(find_redexes(&net, &Regime::uniform(PathClass::LP)).len(), 1);
        assert!(is_proof_net(&net, &Regime::uniform(PathClass::L), &[]).is_none());
    }

    #[test]
    fn no_par_means_no_redex() {
        let mut n = ProofNet::new();
        let a = n.add_vertex(Vertex::word(0));
        let b = n.add_vertex(Vertex::word(1));
        let c = n.add_vertex(Vertex::internal());
        n.add_link(Link::Tensor { mode: Mode(0), tag: None, left: a, right: b, conclusion: c }).unwrap();
        assert!(find_redexes(&n, &Regime::uniform(PathClass::LP)).is_empty());
        let w = is_proof_net(&n, &Regime::uniform(PathClass::NL), &[]).unwrap();
        assert!(w.steps.is_empty());
        assert_eq!(w.repair.map(|r| r.steps.len()), Some(0));
    }
}
