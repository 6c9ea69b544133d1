//! Linear lambda terms, the semantic translation of directional nets,
//! term extraction and net reconstruction from terms.

mod lambda;
mod semantic;

pub use lambda::{parse_term, LambdaTerm, TermError};
pub use semantic::{extract_component, extract_term, term_to_net, to_semantic};
