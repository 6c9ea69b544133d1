use std::collections::{HashSet, VecDeque};

use super::regime::StructuralRule;
use crate::frame::{canonical_form, Link, ProofNet, Vertex, VertexId};

/// Left-to-right order of the word leaves of a tensor tree.
pub fn tree_yield(tree: &ProofNet) -> Vec<usize> {
    let mut out = Vec::new();
    for root in tree.roots() {
        let mut stack = vec![root];
        let mut guard = 0usize;
        while let Some(v) = stack.pop() {
            guard += 1;
            if guard > tree.vertex_count() {
                break;
            }
            match tree.above(v) {
                Some((_, Link::Tensor { left, right, .. })) => {
                    stack.push(*right);
                    stack.push(*left);
                }
                Some((_, Link::Par { premise, .. })) => stack.push(*premise),
                None => out.extend(tree.vertex(v).and_then(Vertex::word_index)),
            }
        }
    }
    out
}

/// Upward tensor subtree of `v` in pre-order.
fn tensor_subtree(tree: &ProofNet, v: VertexId) -> Vec<VertexId> {
    let mut out = Vec::new();
    let mut stack = vec![v];
    while let Some(u) = stack.pop() {
        if out.contains(&u) {
            continue;
        }
        out.push(u);
        if let Some((_, Link::Tensor { left, right, .. })) = tree.above(u) {
            stack.push(*right);
            stack.push(*left);
        }
    }
    out
}

/// One structural rewrite, described by the words it moves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StructuralStep {
    /// The rule applied.
    pub rule: StructuralRule,
    /// Words of the detached right daughter.
    pub moved: Vec<usize>,
    /// Words below the re-attachment point.
    pub anchor: Vec<usize>,
}

/// A sequence of structural rewrites and the tree it produces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YieldRepair {
    /// Rewrites in order; empty when no rewriting was needed.
    pub steps: Vec<StructuralStep>,
    /// The rewritten tree.
    pub tree: ProofNet,
}

/// All trees obtained by one application of the rule: the right
/// daughter of a tensor of the rule's mode is detached and re-attached
/// by a new tensor of the same mode at some vertex of the former left
/// daughter, the left daughter's root included.
pub fn apply_structural(tree: &ProofNet, rule: StructuralRule) -> Vec<ProofNet> {
    rewrites(tree, rule).into_iter().map(|(t, _)| t).collect()
}

fn rewrites(tree: &ProofNet, rule: StructuralRule) -> Vec<(ProofNet, StructuralStep)> {
    if tree.par_count() > 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (lid, link) in tree.links() {
        let Link::Tensor { mode, tag, left, right, conclusion } = *link else { continue };
        if mode != rule.mode {
            continue;
        }
        let moved = {
            let sub = tree.subnet(&tensor_subtree(tree, right).into_iter().collect());
            sub_yield(&sub, right)
        };
        for v in tensor_subtree(tree, left) {
            let mut t = tree.clone();
            t.remove_link(lid).expect("link exists");
            t.merge(left, conclusion).expect("root slot is free");
            let anchor = {
                let sub = t.subnet(&tensor_subtree(&t, v).into_iter().collect());
                sub_yield(&sub, v)
            };
            let fresh = t.add_vertex(Vertex::internal());
            t.move_below(v, fresh).expect("fresh vertex");
            t.add_link(Link::Tensor { mode, tag, left: v, right, conclusion: fresh }).expect("slots are free");
            out.push((t, StructuralStep { rule, moved: moved.clone(), anchor }));
        }
    }
    out
}

fn sub_yield(sub: &ProofNet, root: VertexId) -> Vec<usize> {
    let mut out = Vec::new();
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        match sub.above(v) {
            Some((_, Link::Tensor { left, right, .. })) => {
                stack.push(*right);
                stack.push(*left);
            }
            _ => out.extend(sub.vertex(v).and_then(Vertex::word_index)),
        }
    }
    out
}

/// Most rewrites tried before giving up.
const REPAIR_DEPTH: usize = 4;
/// Most distinct trees visited before giving up.
const REPAIR_STATES: usize = 20_000;

/// Breadth-first search for a sequence of structural rewrites giving
/// the tree the target yield.
pub fn repair_yield(tree: &ProofNet, rules: &[StructuralRule], target: &[usize]) -> Option<YieldRepair> {
    if tree_yield(tree) == target {
        return Some(YieldRepair { steps: Vec::new(), tree: tree.clone() });
    }
    if rules.is_empty() {
        return None;
    }
    let mut seen = HashSet::from([canonical_form(tree)]);
    let mut queue = VecDeque::from([(tree.clone(), Vec::<StructuralStep>::new())]);
    while let Some((t, steps)) = queue.pop_front() {
        if steps.len() >= REPAIR_DEPTH {
            continue;
        }
        for rule in rules {
            for (next, step) in rewrites(&t, *rule) {
                if !seen.insert(canonical_form(&next)) {
                    continue;
                }
                let mut path = steps.clone();
                path.push(step);
                if tree_yield(&next) == target {
                    return Some(YieldRepair { steps: path, tree: next });
                }
                if seen.len() > REPAIR_STATES {
                    return None;
                }
                queue.push_back((next, path));
            }
        }
    }
    None
}
