use std::collections::{BTreeMap, BTreeSet};

use super::lambda::{LambdaTerm, TermError};
use crate::formula::Mode;
use crate::frame::{Direction, Link, LinkId, ProofNet, Vertex, VertexId};

/// Converts a directional net to its semantic counterpart: premises of
/// `\` tensors are swapped so the functor is always on the left, every
/// tag becomes linear and modes are erased.
pub fn to_semantic(net: &ProofNet) -> ProofNet {
    let mut out = net.clone();
    let ids: Vec<LinkId> = net.links().map(|(id, _)| id).collect();
    for id in ids {
        if matches!(out.link(id), Some(Link::Tensor { tag: Some(Direction::Under), .. })) {
            out.swap_premises(id).expect("link exists");
        }
        if let Some(Link::Tensor { mode, tag, .. } | Link::Par { mode, tag, .. }) = out.link_mut(id) {
            *mode = Mode(0);
            *tag = Some(Direction::Linear);
        }
    }
    out
}

fn is_semantic(net: &ProofNet) -> bool {
    net.links().all(|(_, l)| matches!(l.tag(), None | Some(Direction::Linear)))
}

/// Reads the lambda term of a connected net at its unique root.
///
/// Directional nets are converted with [`to_semantic`] first. Word
/// hypotheses become `x1..xn`, bound variables `y1, y2, ...` in
/// printing order.
pub fn extract_term(net: &ProofNet) -> Result<LambdaTerm, TermError> {
    let roots = net.roots();
    match roots.as_slice() {
        [root] => extract_component(net, *root),
        [] => Err(TermError::NotANet("no root".into())),
        _ => Err(TermError::NotANet(format!("{} roots", roots.len()))),
    }
}

/// Reads the lambda term of the component rooted at `root`.
pub fn extract_component(net: &ProofNet, root: VertexId) -> Result<LambdaTerm, TermError> {
    let converted;
    let net = if is_semantic(net) {
        net
    } else {
        converted = to_semantic(net);
        &converted
    };
    if net.below(root).is_some() {
        return Err(TermError::NotANet(format!("vertex {root} is not a root")));
    }
    let mut visited = BTreeSet::new();
    let raw = term_at(net, root, &mut visited)?;
    let component = net.component_of(root);
    if visited.len() != component.len() {
        return Err(TermError::NotANet(format!(
            "{} of {} vertices unreachable from the root",
            component.len() - visited.len(),
            component.len()
        )));
    }
    let t = raw.canonical_bound();
    t.validate().map_err(|e| TermError::NotANet(e.to_string()))?;
    Ok(t)
}

fn term_at(net: &ProofNet, v: VertexId, visited: &mut BTreeSet<VertexId>) -> Result<LambdaTerm, TermError> {
    let reached_twice = || TermError::NotANet(format!("vertex {v} reached twice"));
    match net.above(v) {
        Some((_, Link::Par { arrow, withdrawn, .. })) if *arrow != v => {
            let scope = format!("#{}", withdrawn.0);
            if !visited.contains(arrow) {
                return Err(TermError::NotANet(format!("hypothesis {v} used outside its abstraction")));
            }
            if !visited.insert(v) {
                return Err(reached_twice());
            }
            Ok(LambdaTerm::Var(scope))
        }
        _ if !visited.insert(v) => Err(reached_twice()),
        None => match net.vertex(v).and_then(Vertex::word_index) {
            Some(i) => Ok(LambdaTerm::Var(format!("x{}", i + 1))),
            None => Err(TermError::NotANet(format!("leaf {v} is not a word"))),
        },
        Some((_, Link::Tensor { left, right, .. })) => {
            let (left, right) = (*left, *right);
            let f = term_at(net, left, visited)?;
            let a = term_at(net, right, visited)?;
            Ok(LambdaTerm::app(f, a))
        }
        Some((_, Link::Par { premise, withdrawn, .. })) => {
            let (premise, withdrawn) = (*premise, *withdrawn);
            let body = term_at(net, premise, visited)?;
            if !visited.contains(&withdrawn) {
                return Err(TermError::NotANet(format!("hypothesis {withdrawn} is never used")));
            }
            Ok(LambdaTerm::abs(&format!("#{}", withdrawn.0), body))
        }
    }
}

/// Builds the semantic net of a valid term whose free variables are
/// word variables `x1, x2, ...`; `xk` becomes the hypothesis of word
/// `k - 1`.
pub fn term_to_net(t: &LambdaTerm) -> Result<ProofNet, TermError> {
    t.validate()?;
    let mut net = ProofNet::new();
    let mut env = BTreeMap::new();
    build(&mut net, t, &mut env)?;
    Ok(net)
}

fn word_index(name: &str) -> Option<usize> {
    let k: usize = name.strip_prefix('x')?.parse().ok()?;
    (k >= 1 && name[1..] == k.to_string()).then(|| k - 1)
}

fn build(net: &mut ProofNet, t: &LambdaTerm, env: &mut BTreeMap<String, VertexId>) -> Result<VertexId, TermError> {
    match t {
        LambdaTerm::Var(x) => match env.get(x) {
            Some(v) => Ok(*v),
            None => {
                let i = word_index(x).ok_or_else(|| TermError::NotAWordVariable(x.clone()))?;
                if net.word_vertex(i).is_some() {
                    return Err(TermError::NotLinear(x.clone()));
                }
                Ok(net.add_vertex(Vertex::word(i)))
            }
        },
        LambdaTerm::App(f, a) => {
            let fv = build(net, f, env)?;
            let av = build(net, a, env)?;
            let c = net.add_vertex(Vertex::internal());
            net.add_link(Link::Tensor {
                mode: Mode(0),
                tag: Some(Direction::Linear),
                left: fv,
                right: av,
                conclusion: c,
            })
            .map_err(|e| TermError::NotANet(e.to_string()))?;
            Ok(c)
        }
        LambdaTerm::Abs(x, body) => {
            let w = net.add_vertex(Vertex::internal());
            let shadowed = env.insert(x.clone(), w);
            let p = build(net, body, env)?;
            match shadowed {
                Some(old) => env.insert(x.clone(), old),
                None => env.remove(x),
            };
            let arrow = net.add_vertex(Vertex::internal());
            net.add_link(Link::Par { mode: Mode(0), tag: Some(Direction::Linear), premise: p, arrow, withdrawn: w })
                .map_err(|e| TermError::NotANet(e.to_string()))?;
            Ok(arrow)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::isomorphic;
    use crate::term::parse_term;

    fn t(s: &str) -> LambdaTerm {
        parse_term(s).unwrap()
    }

    #[test]
    fn single_vertex() {
        let net = term_to_net(&t("x1")).unwrap();
        assert_eq!(net.vertex_count(), 1);
        assert_eq!(extract_term(&net).unwrap(), t("x1"));
    }

    #[test]
    fn round_trip_with_abstraction() {
        let term = t("(x3 x4) ((x1 x2) \\y1.(((x6 x7) y1) x5))");
        let net = term_to_net(&term).unwrap();
        assert_eq!(net.par_count(), 1);
        assert_eq!(net.tensor_count(), 7);
        assert_eq!(extract_term(&net).unwrap(), term);
    }

    #[test]
    fn semantic_swap() {
        let mut n = ProofNet::new();
        let a = n.add_vertex(Vertex::word(0));
        let f = n.add_vertex(Vertex::word(1));
        let c = n.add_vertex(Vertex::internal());
        n.add_link(Link::Tensor { mode: Mode(1), tag: Some(Direction::Under), left: a, right: f, conclusion: c })
            .unwrap();
        let s = to_semantic(&n);
        assert_eq!(extract_term(&s).unwrap(), t("x2 x1"));
        assert_eq!(extract_term(&n).unwrap(), t("x2 x1"));
        assert!(isomorphic(&to_semantic(&s), &s));
        assert!(isomorphic(&s, &term_to_net(&t("x2 x1")).unwrap()));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(term_to_net(&t("x1 x1")), Err(TermError::NotLinear(_))));
        assert!(matches!(term_to_net(&t("x1 w")), Err(TermError::NotAWordVariable(_))));
        assert!(matches!(term_to_net(&t("x01")), Err(TermError::NotAWordVariable(_))));
        let mut two = ProofNet::new();
        two.add_vertex(Vertex::word(0));
        two.add_vertex(Vertex::word(1));
        assert!(matches!(extract_term(&two), Err(TermError::NotANet(_))));
    }

    #[test]
    fn hypothesis_outside_scope_is_not_a_net() {
        // x1 applied to the arrow of a par whose hypothesis sits in x2's argument.
        let mut n = ProofNet::new();
        let x1 = n.add_vertex(Vertex::word(0));
        let x2 = n.add_vertex(Vertex::word(1));
        let w = n.add_vertex(Vertex::internal());
        let body = n.add_vertex(Vertex::internal());
        let arrow = n.add_vertex(Vertex::internal());
        let c = n.add_vertex(Vertex::internal());
        let lin = Some(Direction::Linear);
        n.add_link(Link::Par { mode: Mode(0), tag: lin, premise: x1, arrow, withdrawn: w }).unwrap();
        n.add_link(Link::Tensor { mode: Mode(0), tag: lin, left: x2, right: w, conclusion: body }).unwrap();
        n.add_link(Link::Tensor { mode: Mode(0), tag: lin, left: body, right: arrow, conclusion: c }).unwrap();
        assert!(extract_term(&n).is_err());
    }
}
