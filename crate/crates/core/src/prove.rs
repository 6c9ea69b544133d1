//! The theorem-proving pipeline: unfold, match, contract, check yield,
//! extract terms.

use rayon::prelude::*;
use thiserror::Error;

use crate::contraction::{is_proof_net_with, RegimeConfig, SearchOrder, Witness};
use crate::formula::{count_check, CountReport, Lexicon};
use crate::frame::{apply_matching, count_matchings, enumerate_matchings, unfold, FrameError, Matching, ProofNet};
use crate::term::{extract_term, LambdaTerm, TermError};

/// Errors of the proving pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProveError {
    /// Some atom has different producer and consumer counts.
    #[error("count check failed: {0}")]
    Unbalanced(CountReport),
    /// Matching or merging failed.
    #[error(transparent)]
    Frame(#[from] FrameError),
    /// An accepted net did not read as a term.
    #[error(transparent)]
    Term(#[from] TermError),
}

/// Options of [`prove`].
#[derive(Debug, Clone)]
pub struct ProveOptions {
    /// Contraction classes and structural rules.
    pub config: RegimeConfig,
    /// Pairs every matching must contain.
    pub fixed: Matching,
    /// Redex order of the contraction search.
    pub order: SearchOrder,
    /// Whether the tree yield must reach sentence order. Defaults to
    /// true unless every class of the regime is commutative.
    pub require_yield: Option<bool>,
}

impl ProveOptions {
    /// Default options for a regime configuration.
    pub fn new(config: RegimeConfig) -> Self {
        ProveOptions { config, fixed: Matching::new(), order: SearchOrder::InOrder, require_yield: None }
    }
}

/// One accepted proof.
#[derive(Debug, Clone)]
pub struct Proof {
    /// Position of the matching in the enumeration order.
    pub index: usize,
    /// The matching.
    pub matching: Matching,
    /// The proof structure.
    pub structure: ProofNet,
    /// Contraction and word-order evidence.
    pub witness: Witness,
    /// The extracted term.
    pub term: LambdaTerm,
}

/// Everything the pipeline found.
#[derive(Debug, Clone)]
pub struct ProveReport {
    /// Per-atom counts.
    pub counts: CountReport,
    /// The proof frame.
    pub frame: ProofNet,
    /// Number of total matchings.
    pub matchings: u128,
    /// Matchings whose structure contracts to a tree.
    pub contractible: usize,
    /// Accepted proofs in matching order.
    pub proofs: Vec<Proof>,
}

const CHUNK: usize = 1024;

type Checked = Option<(usize, Matching, ProofNet, Witness)>;

/// Runs the pipeline on a lexicon.
pub fn prove(lexicon: &Lexicon, options: &ProveOptions) -> Result<ProveReport, ProveError> {
    let counts = count_check(lexicon);
    if !counts.is_balanced() {
        return Err(ProveError::Unbalanced(counts));
    }
    let frame = unfold(lexicon);
    let matchings = count_matchings(&frame, &options.fixed)?;
    let require_yield = options.require_yield.unwrap_or(!options.config.regime.is_commutative());
    let mut stream = enumerate_matchings(&frame, &options.fixed)?.enumerate();
    let mut contractible = 0;
    let mut proofs = Vec::new();
    loop {
        let chunk: Vec<(usize, Matching)> = stream.by_ref().take(CHUNK).collect();
        if chunk.is_empty() {
            break;
        }
        let checked: Vec<Result<Checked, FrameError>> = chunk
            .into_par_iter()
            .map(|(i, m)| {
                let structure = apply_matching(&frame, &m)?;
                let w =
                    is_proof_net_with(&structure, &options.config.regime, &options.config.structural, options.order);
                Ok(w.map(|w| (i, m, structure, w)))
            })
            .collect();
        for item in checked {
            let Some((index, matching, structure, witness)) = item? else { continue };
            contractible += 1;
            if require_yield && witness.repair.is_none() {
                continue;
            }
            let term = extract_term(&structure)?;
            proofs.push(Proof { index, matching, structure, witness, term });
        }
    }
    Ok(ProveReport { counts, frame, matchings, contractible, proofs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contraction::{PathClass, Regime};

    fn run(words: &[(&str, &str)], goal: &str, class: PathClass) -> ProveReport {
        let lex = Lexicon::parse(words, goal).unwrap();
        prove(&lex, &ProveOptions::new(RegimeConfig::new(Regime::uniform(class)))).unwrap()
    }

    #[test]
    fn single_word() {
        let r = run(&[("w", "np")], "np", PathClass::NL);
        assert_eq!(r.proofs.len(), 1);
        assert_eq!(r.proofs[0].term.to_string(), "x1");
    }

    #[test]
    fn application() {
        let r = run(&[("john", "np"), ("sleeps", "np\\s")], "s", PathClass::NL);
        assert_eq!(r.proofs.len(), 1);
        assert_eq!(r.proofs[0].term.to_string(), "x2 x1");
    }

    #[test]
    fn unbalanced_is_an_error() {
        let lex = Lexicon::parse(&[("w", "np")], "s").unwrap();
        let err = prove(&lex, &ProveOptions::new(RegimeConfig::new(Regime::uniform(PathClass::NL))));
        assert!(matches!(err, Err(ProveError::Unbalanced(_))));
    }
}
