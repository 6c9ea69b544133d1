use std::collections::{BTreeMap, HashSet, VecDeque};

use rayon::prelude::*;
use thiserror::Error;

use super::scorer::{Scorer, ScorerError};
use super::state::{GenError, GenState, ParserAction};
use crate::frame::{CanonicalForm, ProofNet};

/// Errors of [`beam_search`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum BeamError {
    /// The scorer failed.
    #[error(transparent)]
    Scorer(#[from] ScorerError),
    /// The engine rejected a state or action.
    #[error(transparent)]
    Gen(#[from] GenError),
    /// Beam width 0.
    #[error("beam width must be at least 1")]
    ZeroBeam,
}

/// Beam search settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamOptions {
    /// Number of hypotheses kept.
    pub beam: usize,
    /// Actions need a weight strictly above this.
    pub threshold: f64,
    /// Most expansions per hypothesis.
    pub max_expansions: usize,
}

impl BeamOptions {
    /// Width `beam`, threshold 0.5 and one expansion per word.
    pub fn new(beam: usize, words: usize) -> Self {
        BeamOptions { beam, threshold: 0.5, max_expansions: words }
    }
}

/// A finished hypothesis.
#[derive(Debug, Clone)]
pub struct Generated {
    /// The stopped net.
    pub net: ProofNet,
    /// Product of the action weights.
    pub score: f64,
    /// Actions from the initial state.
    pub actions: Vec<ParserAction>,
    /// Weight of each action.
    pub weights: Vec<f64>,
}

#[derive(Clone)]
struct Hypothesis {
    state: GenState,
    score: f64,
    actions: Vec<ParserAction>,
    weights: Vec<f64>,
}

/// Beam search from the initial state of `words` words.
///
/// Each round weighs the legal actions of every live hypothesis, keeps
/// those above the threshold and applies them best-first until `beam`
/// distinct nets are collected. Stopped hypotheses leave the beam; a
/// hypothesis with no action above the threshold is dropped.
pub fn beam_search(words: usize, scorer: &dyn Scorer, options: BeamOptions) -> Result<Vec<Generated>, BeamError> {
    if options.beam == 0 {
        return Err(BeamError::ZeroBeam);
    }
    let start = Hypothesis { state: GenState::init(words)?, score: 1.0, actions: Vec::new(), weights: Vec::new() };
    let mut beam = vec![start];
    let mut finished: Vec<Hypothesis> = Vec::new();
    let mut done: HashSet<CanonicalForm> = HashSet::new();
    while !beam.is_empty() {
        if finished.len() >= options.beam {
            let worst = finished[options.beam - 1].score;
            if beam.iter().all(|h| h.score <= worst) {
                break;
            }
        }
        let actions: Vec<Vec<ParserAction>> = beam
            .iter()
            .map(|h| {
                let mut acts = h.state.legal_actions();
                if h.state.expansions() >= options.max_expansions {
                    acts.retain(|a| !a.is_expansion());
                }
                acts
            })
            .collect();
        let weigh = |(h, acts): (&Hypothesis, &Vec<ParserAction>)| scorer.score(&h.state, acts);
        let weights: Vec<Vec<f64>> = if scorer.concurrent() {
            beam.par_iter().zip(actions.par_iter()).map(weigh).collect::<Result<_, _>>()?
        } else {
            beam.iter().zip(actions.iter()).map(weigh).collect::<Result<_, _>>()?
        };

        let mut candidates = Vec::new();
        for (hi, (acts, ws)) in actions.iter().zip(&weights).enumerate() {
            if ws.len() != acts.len() {
                return Err(ScorerError::Protocol {
                    message: format!("{} weights for {} actions", ws.len(), acts.len()),
                    transcript: Vec::new(),
                }
                .into());
            }
            for (ai, w) in ws.iter().enumerate() {
                if *w > options.threshold {
                    candidates.push((beam[hi].score * w, hi, ai));
                }
            }
        }
        candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then((a.1, a.2).cmp(&(b.1, b.2))));

        let mut next = Vec::new();
        let mut seen = HashSet::new();
        for (score, hi, ai) in candidates {
            if next.len() == options.beam {
                break;
            }
            let h = &beam[hi];
            let action = actions[hi][ai];
            let state = h.state.apply(action)?;
            let key = (state.canonical(), state.is_stopped());
            if !seen.insert(key) {
                continue;
            }
            let mut acts = h.actions.clone();
            acts.push(action);
            let mut ws = h.weights.clone();
            ws.push(weights[hi][ai]);
            next.push(Hypothesis { state, score, actions: acts, weights: ws });
        }
        beam = Vec::new();
        for h in next {
            if !h.state.is_stopped() {
                beam.push(h);
            } else if done.insert(h.state.canonical()) {
                finished.push(h);
            }
        }
        finished.sort_by(|a, b| b.score.total_cmp(&a.score));
    }
    finished.truncate(options.beam);
    Ok(finished
        .into_iter()
        .map(|h| Generated { net: h.state.net().clone(), score: h.score, actions: h.actions, weights: h.weights })
        .collect())
}

/// Every connected net reachable from the initial state of `words`
/// words with at most `max_expansions` expansions, in canonical order.
pub fn enumerate_nets(words: usize, max_expansions: usize) -> Result<Vec<ProofNet>, GenError> {
    let start = GenState::init(words)?;
    let mut seen = HashSet::from([start.canonical()]);
    let mut queue = VecDeque::from([start]);
    let mut out = BTreeMap::new();
    while let Some(s) = queue.pop_front() {
        for a in s.legal_actions() {
            match a {
                ParserAction::Stop => {
                    out.insert(s.canonical(), s.net().clone());
                    continue;
                }
                _ if a.is_expansion() && s.expansions() >= max_expansions => continue,
                _ => {}
            }
            let next = s.apply(a)?;
            if seen.insert(next.canonical()) {
                queue.push_back(next);
            }
        }
    }
    Ok(out.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frame::isomorphic;
    use crate::generate::{GoldOracle, UniformScorer};
    use crate::term::{extract_term, parse_term, term_to_net};

    #[test]
    fn zero_beam_is_rejected() {
        assert!(matches!(beam_search(1, &UniformScorer, BeamOptions::new(0, 1)), Err(BeamError::ZeroBeam)));
    }

    #[test]
    fn uniform_single_word() {
        let out = beam_search(1, &UniformScorer, BeamOptions::new(1, 1)).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(extract_term(&out[0].net).unwrap().to_string(), "x1");
        assert_eq!(out[0].actions, vec![ParserAction::Stop]);
    }

    #[test]
    fn wider_beam_gives_distinct_nets() {
        let out = beam_search(2, &UniformScorer, BeamOptions::new(3, 2)).unwrap();
        assert!(!out.is_empty() && out.len() <= 3);
        for (i, a) in out.iter().enumerate() {
            for b in &out[i + 1..] {
                assert!(!isomorphic(&a.net, &b.net));
            }
        }
    }

    #[test]
    fn oracle_recovers_gold() {
        let gold = term_to_net(&parse_term("x2 \\y1.(x1 (y1 x3))").unwrap()).unwrap();
        let oracle = GoldOracle::new(&gold).unwrap();
        let out = beam_search(3, &oracle, BeamOptions::new(1, 3)).unwrap();
        assert_eq!(out.len(), 1);
        assert!(isomorphic(&out[0].net, &gold));
        assert_eq!(out[0].score, 1.0);
    }

    #[test]
    fn enumeration_small_cases() {
        assert_eq!(enumerate_nets(1, 0).unwrap().len(), 1);
        let two: Vec<String> =
            enumerate_nets(2, 0).unwrap().iter().map(|n| extract_term(n).unwrap().to_string()).collect();
        assert_eq!(two.len(), 2);
        assert!(two.contains(&"x1 x2".to_string()) && two.contains(&"x2 x1".to_string()));
        // x1, \y.(y x1), \y.(x1 y)
        assert_eq!(enumerate_nets(1, 1).unwrap().len(), 3);
    }
}
