//! Proof nets for type-logical grammars.
//!
//! Lexical formulas unfold into proof frames ([`frame`]); atom matchings
//! turn frames into proof structures which are checked by contraction
//! ([`contraction`]); proofs read off as linear lambda terms ([`term`]).
//! The [`generate`] module builds semantic proof nets directly by
//! composition and expansion actions, [`label`] recovers formulas for
//! such nets, and [`backward`] enumerates nets sequent-style.

#![warn(missing_docs)]

pub mod backward;
pub mod contraction;
pub mod formula;
pub mod frame;
pub mod generate;
pub mod label;
pub mod prove;
pub mod term;

pub use formula::{count_check, parse_formula, Atom, Formula, Lexicon, Mode, Polarity};
pub use frame::{Link, ProofNet, VertexId};
pub use prove::{prove, Proof, ProveError, ProveOptions, ProveReport};
