use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::LabelError;
use crate::formula::{Formula, Lexicon};
use crate::frame::{apply_matching, atom_slots, unfold, Link, Matching, ProofNet, VertexId};
use crate::generate::semantic_target;
use crate::term::extract_term;

/// A linear implication type over numbered variables.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Type {
    /// A type variable.
    Var(usize),
    /// `arg -o res`, labelled at `slot`.
    Arrow {
        /// The vertex carrying this connective's label.
        slot: VertexId,
        /// Argument type.
        arg: Box<Type>,
        /// Result type.
        res: Box<Type>,
    },
}

/// Name of type variable `i`: `A` to `Z`, then `A1`, `B1`, ...
pub fn var_name(i: usize) -> String {
    let letter = char::from(b'A' + (i % 26) as u8);
    match i / 26 {
        0 => letter.to_string(),
        k => format!("{letter}{k}"),
    }
}

impl Type {
    fn vars(&self, out: &mut Vec<usize>) {
        match self {
            Type::Var(i) => out.push(*i),
            Type::Arrow { arg, res, .. } => {
                arg.vars(out);
                res.vars(out);
            }
        }
    }

    fn slots(&self, out: &mut Vec<VertexId>) {
        if let Type::Arrow { slot, arg, res } = self {
            out.push(*slot);
            arg.slots(out);
            res.slots(out);
        }
    }

    fn renamed(&self, map: &BTreeMap<usize, usize>) -> Type {
        match self {
            Type::Var(i) => Type::Var(map[i]),
            Type::Arrow { slot, arg, res } => {
                Type::Arrow { slot: *slot, arg: Box::new(arg.renamed(map)), res: Box::new(res.renamed(map)) }
            }
        }
    }

    fn shape(&self, out: &mut String) {
        match self {
            Type::Var(i) => out.push_str(&var_name(*i)),
            Type::Arrow { arg, res, .. } => {
                out.push('(');
                arg.shape(out);
                out.push('>');
                res.shape(out);
                out.push(')');
            }
        }
    }

    /// The linear formula with variable `i` read as atom `v<i>`.
    pub fn to_linear_formula(&self) -> Formula {
        match self {
            Type::Var(i) => Formula::atom(&format!("v{i}")),
            Type::Arrow { arg, res, .. } => Formula::lolli(arg.to_linear_formula(), res.to_linear_formula()),
        }
    }
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Type::Var(i) => f.write_str(&var_name(*i)),
            Type::Arrow { arg, res, .. } => {
                if matches!(**arg, Type::Arrow { .. }) {
                    write!(f, "({arg}) -o {res}")
                } else {
                    write!(f, "{arg} -o {res}")
                }
            }
        }
    }
}

/// Most general types of the words and the goal of a semantic net.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypeVarTyping {
    /// Word types in sentence order.
    pub words: Vec<Type>,
    /// The type at the root.
    pub goal: Type,
    /// For each variable, the vertex it types.
    pub var_slots: Vec<VertexId>,
}

impl TypeVarTyping {
    /// Number of type variables.
    pub fn var_count(&self) -> usize {
        self.var_slots.len()
    }

    /// Every variable occurrence, words first, then the goal.
    pub fn occurrences(&self) -> Vec<usize> {
        let mut out = Vec::new();
        for t in self.words.iter().chain([&self.goal]) {
            t.vars(&mut out);
        }
        out
    }

    /// Slots of every connective, words first.
    pub fn connective_slots(&self) -> Vec<VertexId> {
        let mut out = Vec::new();
        for t in self.words.iter().chain([&self.goal]) {
            t.slots(&mut out);
        }
        out
    }

    /// The typing with variables renumbered by first occurrence.
    pub fn normalized(&self) -> TypeVarTyping {
        let mut map = BTreeMap::new();
        for v in self.occurrences() {
            let next = map.len();
            map.entry(v).or_insert(next);
        }
        let mut var_slots = vec![VertexId(0); map.len()];
        for (old, new) in &map {
            var_slots[*new] = self.var_slots[*old];
        }
        TypeVarTyping {
            words: self.words.iter().map(|t| t.renamed(&map)).collect(),
            goal: self.goal.renamed(&map),
            var_slots,
        }
    }

    /// Equality up to renaming of variables, ignoring slots.
    pub fn alpha_eq(&self, other: &TypeVarTyping) -> bool {
        let shape = |t: &TypeVarTyping| {
            let n = t.normalized();
            let mut s = String::new();
            for ty in n.words.iter().chain([&n.goal]) {
                ty.shape(&mut s);
                s.push(';');
            }
            s
        };
        shape(self) == shape(other)
    }

    /// The linear lexicon with variables as atoms `v0`, `v1`, ...
    pub fn to_linear_lexicon(&self) -> Result<Lexicon, LabelError> {
        let entries: Vec<(String, String)> = self
            .words
            .iter()
            .enumerate()
            .map(|(i, t)| (format!("x{}", i + 1), t.to_linear_formula().to_string()))
            .collect();
        let pairs: Vec<(&str, &str)> = entries.iter().map(|(w, f)| (w.as_str(), f.as_str())).collect();
        Lexicon::parse(&pairs, &self.goal.to_linear_formula().to_string())
            .map_err(|e| LabelError::NotANet(e.to_string()))
    }
}

impl fmt::Display for TypeVarTyping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.words.iter().enumerate() {
            writeln!(f, "x{}: {t}", i + 1)?;
        }
        write!(f, "goal: {}", self.goal)
    }
}

fn functor_of(net: &ProofNet, v: VertexId) -> Option<(VertexId, VertexId)> {
    match net.below(v) {
        Some((_, Link::Tensor { left, right, conclusion, .. })) if *left == v => Some((*right, *conclusion)),
        _ => None,
    }
}

fn abstraction_of(net: &ProofNet, v: VertexId) -> Option<(VertexId, VertexId)> {
    match net.above(v) {
        Some((_, Link::Par { arrow, premise, withdrawn, .. })) if *arrow == v => Some((*withdrawn, *premise)),
        _ => None,
    }
}

/// Computes the principal typing of a semantic proof net.
///
/// A functor vertex gets `arg -o conclusion`, an abstraction gets
/// `hypothesis -o body`, every other vertex a fresh variable. Variables
/// at word vertices come first in sentence order, the others from the
/// top of the net down and left to right.
pub fn principal_typing(net: &ProofNet) -> Result<TypeVarTyping, LabelError> {
    extract_term(net).map_err(|e| LabelError::NotANet(e.to_string()))?;
    let root = net.roots()[0];
    let mut order = Vec::new();
    let mut depth = BTreeMap::new();
    let mut stack = vec![(root, 0usize)];
    while let Some((v, d)) = stack.pop() {
        order.push(v);
        depth.insert(v, d);
        match net.above(v) {
            Some((_, Link::Tensor { left, right, .. })) => {
                stack.push((*right, d + 1));
                stack.push((*left, d + 1));
            }
            Some((_, Link::Par { arrow, premise, .. })) if *arrow == v => stack.push((*premise, d + 1)),
            _ => {}
        }
    }
    let plain: BTreeSet<VertexId> =
        order.iter().copied().filter(|v| functor_of(net, *v).is_none() && abstraction_of(net, *v).is_none()).collect();
    let words: Vec<VertexId> = net.word_vertices().into_iter().map(|(_, v)| v).collect();
    let mut var_slots: Vec<VertexId> = words.iter().copied().filter(|v| plain.contains(v)).collect();
    let mut rest: Vec<(usize, usize, VertexId)> = order
        .iter()
        .enumerate()
        .filter(|(_, v)| plain.contains(v) && !var_slots.contains(v))
        .map(|(pos, v)| (usize::MAX - depth[v], pos, *v))
        .collect();
    rest.sort();
    var_slots.extend(rest.into_iter().map(|(_, _, v)| v));
    let var_of: BTreeMap<VertexId, usize> = var_slots.iter().enumerate().map(|(i, v)| (*v, i)).collect();

    fn type_at(net: &ProofNet, v: VertexId, var_of: &BTreeMap<VertexId, usize>) -> Type {
        if let Some((arg, conclusion)) = functor_of(net, v) {
            Type::Arrow {
                slot: conclusion,
                arg: Box::new(type_at(net, arg, var_of)),
                res: Box::new(type_at(net, conclusion, var_of)),
            }
        } else if let Some((hyp, body)) = abstraction_of(net, v) {
            Type::Arrow { slot: v, arg: Box::new(type_at(net, hyp, var_of)), res: Box::new(type_at(net, body, var_of)) }
        } else {
            Type::Var(var_of[&v])
        }
    }
    Ok(TypeVarTyping {
        words: words.iter().map(|v| type_at(net, *v, &var_of)).collect(),
        goal: type_at(net, root, &var_of),
        var_slots,
    })
}

/// Vertices needing an atom label and vertices needing a connective
/// label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSlots {
    /// Vertices typed by a variable.
    pub atom_slots: BTreeSet<VertexId>,
    /// Conclusions of application links and abstraction vertices.
    pub connective_slots: BTreeSet<VertexId>,
}

/// The label slots of a semantic net.
pub fn label_slots(net: &ProofNet) -> LabelSlots {
    let atom_slots =
        net.vertex_ids().filter(|v| functor_of(net, *v).is_none() && abstraction_of(net, *v).is_none()).collect();
    let connective_slots = net
        .links()
        .map(|(_, l)| match *l {
            Link::Tensor { conclusion, .. } => conclusion,
            Link::Par { arrow, .. } => arrow,
        })
        .collect();
    LabelSlots { atom_slots, connective_slots }
}

/// Rebuilds the semantic net of a typing: every variable links its two
/// occurrences.
pub fn recover_net(typing: &TypeVarTyping) -> Result<ProofNet, LabelError> {
    let lexicon = typing.to_linear_lexicon()?;
    let frame = unfold(&lexicon);
    let slots = atom_slots(&frame);
    let mut matching = Matching::new();
    for (atom, sides) in &slots {
        match (sides.negatives.as_slice(), sides.positives.as_slice()) {
            ([n], [p]) => {
                matching.insert(*n, *p);
            }
            _ => return Err(LabelError::NotPrincipal(format!("variable {atom} does not occur exactly twice"))),
        }
    }
    let structure = apply_matching(&frame, &matching).map_err(|e| LabelError::NotANet(e.to_string()))?;
    Ok(semantic_target(&structure))
}
