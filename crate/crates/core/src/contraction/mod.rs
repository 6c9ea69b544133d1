//! Correctness checking by contraction, structural rewrites and yields.
//!
//! A par link contracts when the tensor-only path from its premise up
//! to its withdrawn hypothesis belongs to the path language of the
//! regime's class for the par's mode and direction:
//!
//! | class       | `/` par  | `\` par  |
//! |-------------|----------|----------|
//! | `NL`        | `r`      | `l`      |
//! | `L`         | `r+`     | `l+`     |
//! | `BranchExt` | `(l|r)*r`| `(l|r)*l`|
//! | `LP`        | `(l|r)+` | `(l|r)+` |

mod regime;
mod search;
mod structural;

pub use regime::{
    par_accepts, path_accepts, PathClass, PathWord, Regime, RegimeConfig, RegimeError, Side, StructuralRule,
};
pub(crate) use search::contract_pair;
pub use search::{
    contract, contract_to_tree, find_redexes, is_proof_net, is_proof_net_with, ContractionError, ContractionStep,
    Redex, SearchOrder, Witness,
};
pub use structural::{apply_structural, repair_yield, tree_yield, StructuralStep, YieldRepair};
