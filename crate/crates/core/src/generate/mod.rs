//! Forward generation of semantic proof nets.
//!
//! Generation starts from one isolated vertex per word. Compositions
//! join two component roots with an application link; expansions insert
//! an abstraction together with a fresh hypothesis and are the inverses
//! of LP contractions; `Stop` ends a connected graph. Every component
//! of every state reads as a linear lambda term without closed
//! subterms or beta redexes.

mod beam;
mod keys;
mod oracle;
mod scorer;
mod state;

pub use beam::{beam_search, enumerate_nets, BeamError, BeamOptions, Generated};
pub use keys::{action_fscore, action_key, sequence_keys, ActionKey, FScore};
pub use oracle::{replay, semantic_target, GoldOracle};
pub use scorer::{parse_response, scorer_request, ExternalScorer, Scorer, ScorerError, UniformScorer};
pub use state::{expansion_bound, expansion_count, GenError, GenState, ParserAction};
