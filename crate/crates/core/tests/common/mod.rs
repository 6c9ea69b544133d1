#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};

use proofnet::contraction::{is_proof_net, PathClass, Regime};
use proofnet::frame::ProofNet;
use proofnet::generate::{GenState, ParserAction};
use proofnet::term::LambdaTerm;
use proofnet::Formula;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn gen_term(
    vars: Vec<String>,
    rng: &mut StdRng,
    abs_left: &mut usize,
    fresh: &mut usize,
    allow_abs: bool,
) -> LambdaTerm {
    let can_abs = allow_abs && *abs_left > 0;
    if vars.len() == 1 && (!can_abs || rng.gen_bool(0.5)) {
        return LambdaTerm::Var(vars[0].clone());
    }
    if can_abs && (vars.len() == 1 || rng.gen_bool(0.3)) {
        *abs_left -= 1;
        *fresh += 1;
        let y = format!("y{fresh}");
        let mut inner = vars;
        inner.push(y.clone());
        let body = gen_term(inner, rng, abs_left, fresh, true);
        return LambdaTerm::Abs(y, Box::new(body));
    }
    let mut vars = vars;
    vars.shuffle(rng);
    let cut = rng.gen_range(1..vars.len());
    let arg = vars.split_off(cut);
    let f = gen_term(vars, rng, abs_left, fresh, false);
    let a = gen_term(arg, rng, abs_left, fresh, true);
    LambdaTerm::App(Box::new(f), Box::new(a))
}

/// A random linear term over `x1..xn` with at most `abstractions`
/// binders, without closed subterms or beta redexes.
pub fn random_term(rng: &mut StdRng, words: usize, abstractions: usize) -> LambdaTerm {
    let vars = (1..=words).map(|i| format!("x{i}")).collect();
    let mut left = abstractions;
    gen_term(vars, rng, &mut left, &mut 0, true)
}

/// A random term of size at most `max_size`.
pub fn random_small_term(rng: &mut StdRng, max_size: usize) -> LambdaTerm {
    loop {
        let words = rng.gen_range(1..=5);
        let abs = rng.gen_range(0..=3);
        let t = random_term(rng, words, abs);
        if term_size(&t) <= max_size {
            return t;
        }
    }
}

pub fn term_size(t: &LambdaTerm) -> usize {
    match t {
        LambdaTerm::Var(_) => 1,
        LambdaTerm::App(f, a) => 1 + term_size(f) + term_size(a),
        LambdaTerm::Abs(_, b) => 1 + term_size(b),
    }
}

fn occurrences(t: &LambdaTerm, out: &mut BTreeMap<String, usize>) {
    match t {
        LambdaTerm::Var(x) => *out.entry(x.clone()).or_default() += 1,
        LambdaTerm::App(f, a) => {
            occurrences(f, out);
            occurrences(a, out);
        }
        LambdaTerm::Abs(_, b) => occurrences(b, out),
    }
}

fn free(t: &LambdaTerm) -> BTreeSet<String> {
    match t {
        LambdaTerm::Var(x) => [x.clone()].into(),
        LambdaTerm::App(f, a) => free(f).union(&free(a)).cloned().collect(),
        LambdaTerm::Abs(x, b) => {
            let mut s = free(b);
            s.remove(x);
            s
        }
    }
}

/// Independent well-formedness check: every variable occurs once,
/// every binder binds exactly one occurrence, no subterm is closed and
/// no functor is an abstraction. Returns the free variables.
pub fn check_term(t: &LambdaTerm) -> Result<BTreeSet<String>, String> {
    let mut occ = BTreeMap::new();
    occurrences(t, &mut occ);
    if let Some((x, k)) = occ.iter().find(|(_, k)| **k != 1) {
        return Err(format!("{x} occurs {k} times in {t}"));
    }
    fn walk(t: &LambdaTerm) -> Result<(), String> {
        if free(t).is_empty() {
            return Err(format!("closed subterm {t}"));
        }
        match t {
            LambdaTerm::Var(_) => Ok(()),
            LambdaTerm::App(f, a) => {
                if matches!(**f, LambdaTerm::Abs(..)) {
                    return Err(format!("beta redex {t}"));
                }
                walk(f)?;
                walk(a)
            }
            LambdaTerm::Abs(x, b) => {
                if !free(b).contains(x) {
                    return Err(format!("vacuous binder {x} in {t}"));
                }
                walk(b)
            }
        }
    }
    walk(t)?;
    Ok(free(t))
}

/// Every state of a random generation run, ending with `Stop` or at a
/// state without legal actions; expansions are only offered while
/// fewer than `budget` were used.
pub fn random_run(rng: &mut StdRng, words: usize, budget: usize) -> Vec<GenState> {
    let mut state = GenState::init(words).unwrap();
    let mut out = vec![state.clone()];
    while !state.is_stopped() {
        let actions: Vec<ParserAction> =
            state.legal_actions().into_iter().filter(|a| !a.is_expansion() || state.expansions() < budget).collect();
        let Some(a) = actions.choose(rng).copied() else { break };
        state = state.apply(a).unwrap();
        out.push(state.clone());
    }
    out
}

/// Checks every component of a generation state.
pub fn check_state(state: &GenState) -> Result<(), String> {
    let net = state.net();
    let lp = Regime::uniform(PathClass::LP);
    let terms = state.terms().map_err(|e| e.to_string())?;
    let mut seen = BTreeSet::new();
    for (root, t) in state.roots().into_iter().zip(&terms) {
        for x in check_term(t)? {
            if !x.starts_with('x') || !seen.insert(x.clone()) {
                return Err(format!("free variable {x} shared or not a word"));
            }
        }
        let component = net.subnet(&net.component_of(root));
        if is_proof_net(&component, &lp, &[]).is_none() {
            return Err(format!("component {t} is not an LP proof net"));
        }
    }
    if seen.len() != state.words() {
        return Err(format!("{} of {} words occur", seen.len(), state.words()));
    }
    Ok(())
}

/// The semantic net of a random generation run that reached `Stop`.
pub fn random_generated(rng: &mut StdRng, words: usize, budget: usize) -> ProofNet {
    loop {
        let last = random_run(rng, words, budget).pop().unwrap();
        if last.is_stopped() {
            return last.net().clone();
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Tree {
    Leaf(Formula),
    Node(Box<Tree>, Box<Tree>),
}

/// Cut-free sequent search for the product-free non-associative
/// Lambek calculus, trying every bracketing of the antecedent.
pub struct NlProver {
    memo: HashMap<(Tree, Formula), bool>,
}

impl NlProver {
    pub fn new() -> Self {
        NlProver { memo: HashMap::new() }
    }

    pub fn derivable(&mut self, ctx: &[Formula], goal: &Formula) -> bool {
        bracketings(ctx).into_iter().any(|t| self.prove(&t, goal))
    }

    fn prove(&mut self, ctx: &Tree, goal: &Formula) -> bool {
        let key = (ctx.clone(), goal.clone());
        if let Some(r) = self.memo.get(&key) {
            return *r;
        }
        let r = match goal {
            Formula::Over(c, _, b) => {
                self.prove(&Tree::Node(Box::new(ctx.clone()), Box::new(Tree::Leaf((**b).clone()))), c)
            }
            Formula::Under(b, _, c) => {
                self.prove(&Tree::Node(Box::new(Tree::Leaf((**b).clone())), Box::new(ctx.clone())), c)
            }
            Formula::Lolli(..) => false,
            Formula::Atomic(_) => *ctx == Tree::Leaf(goal.clone()) || self.left_rules(ctx, goal),
        };
        self.memo.insert(key, r);
        r
    }

    fn left_rules(&mut self, ctx: &Tree, goal: &Formula) -> bool {
        for (sub, plug) in contexts(ctx) {
            let Tree::Node(l, r) = &sub else { continue };
            if let Tree::Leaf(Formula::Over(a, _, b)) = &**l {
                if self.prove(r, b) && self.prove(&plug(Tree::Leaf((**a).clone())), goal) {
                    return true;
                }
            }
            if let Tree::Leaf(Formula::Under(b, _, a)) = &**r {
                if self.prove(l, b) && self.prove(&plug(Tree::Leaf((**a).clone())), goal) {
                    return true;
                }
            }
        }
        false
    }
}

fn bracketings(ctx: &[Formula]) -> Vec<Tree> {
    if ctx.len() == 1 {
        return vec![Tree::Leaf(ctx[0].clone())];
    }
    let mut out = Vec::new();
    for cut in 1..ctx.len() {
        for l in bracketings(&ctx[..cut]) {
            for r in bracketings(&ctx[cut..]) {
                out.push(Tree::Node(Box::new(l.clone()), Box::new(r)));
            }
        }
    }
    out
}

type Plug = Box<dyn Fn(Tree) -> Tree>;

fn contexts(t: &Tree) -> Vec<(Tree, Plug)> {
    let mut out: Vec<(Tree, Plug)> = vec![(t.clone(), Box::new(|x| x))];
    if let Tree::Node(l, r) = t {
        for (sub, plug) in contexts(l) {
            let r = r.clone();
            out.push((sub, Box::new(move |x| Tree::Node(Box::new(plug(x)), r.clone()))));
        }
        for (sub, plug) in contexts(r) {
            let l = l.clone();
            out.push((sub, Box::new(move |x| Tree::Node(l.clone(), Box::new(plug(x))))));
        }
    }
    out
}

/// Cut-free sequent search for the product-free associative Lambek
/// calculus with non-empty antecedents.
pub fn derivable_l(ctx: &[Formula], goal: &Formula) -> bool {
    match goal {
        Formula::Over(c, _, b) => return derivable_l(&[ctx, &[(**b).clone()]].concat(), c),
        Formula::Under(b, _, c) => return derivable_l(&[&[(**b).clone()], ctx].concat(), c),
        Formula::Lolli(..) => return false,
        Formula::Atomic(_) => {}
    }
    if ctx.len() == 1 && ctx[0] == *goal {
        return true;
    }
    for (i, f) in ctx.iter().enumerate() {
        match f {
            Formula::Over(a, _, b) => {
                for j in i + 2..=ctx.len() {
                    let rest = [&ctx[..i], &[(**a).clone()], &ctx[j..]].concat();
                    if derivable_l(&ctx[i + 1..j], b) && derivable_l(&rest, goal) {
                        return true;
                    }
                }
            }
            Formula::Under(b, _, a) => {
                for k in 0..i {
                    let rest = [&ctx[..k], &[(**a).clone()], &ctx[i + 1..]].concat();
                    if derivable_l(&ctx[k..i], b) && derivable_l(&rest, goal) {
                        return true;
                    }
                }
            }
            _ => {}
        }
    }
    false
}

fn implication(f: &Formula) -> Option<(&Formula, &Formula)> {
    match f {
        Formula::Over(res, _, arg) | Formula::Under(arg, _, res) | Formula::Lolli(arg, res) => Some((arg, res)),
        Formula::Atomic(_) => None,
    }
}

/// Cut-free sequent search for the implicational fragment of linear
/// logic with every slash read as a linear implication.
pub fn derivable_lp(ctx: &[Formula], goal: &Formula) -> bool {
    if let Some((arg, res)) = implication(goal) {
        return derivable_lp(&[ctx, std::slice::from_ref(arg)].concat(), res);
    }
    if ctx.len() == 1 && ctx[0] == *goal {
        return true;
    }
    for (i, f) in ctx.iter().enumerate() {
        let Some((arg, res)) = implication(f) else { continue };
        let others: Vec<&Formula> = ctx.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, g)| g).collect();
        for mask in 1u32..(1 << others.len()) {
            let (mut given, mut kept) = (Vec::new(), vec![res.clone()]);
            for (k, g) in others.iter().enumerate() {
                if mask >> k & 1 == 1 {
                    given.push((*g).clone());
                } else {
                    kept.push((*g).clone());
                }
            }
            if derivable_lp(&given, arg) && derivable_lp(&kept, goal) {
                return true;
            }
        }
    }
    false
}
