//! Proof frames and the shared hypergraph representation.

mod canonical;
mod dot;
mod matching;
mod net;
mod unfold;

pub use canonical::{canonical_form, canonical_net, canonical_numbering, isomorphic, CanonicalForm};
pub use dot::to_dot;
pub use matching::{
    apply_matching, atom_slots, count_matchings, enumerate_matchings, AtomSlots, FrameError, Imbalance, Matching,
    MatchingStream,
};
pub use net::{Direction, Link, LinkId, NetError, Origin, ProofNet, Vertex, VertexId, VertexKind};
pub use unfold::unfold;
