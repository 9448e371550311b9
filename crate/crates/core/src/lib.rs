//! Workbench for free groups and nested free constructions: HNN
//! extensions, amalgamated products and stars of HNN parts over a shared
//! subgroup, with normal forms, subgroup membership, witness builders for
//! benign subgroups, and randomized verification suites backed by
//! brute-force oracles.

pub mod dsl;
pub mod error;
pub mod gadgets;
pub mod rewrite;
pub mod scheme;
pub mod stallings;
pub mod stream;
pub mod subgroup;
pub mod verify;
pub mod words;

pub use error::{Error, Result};
pub use rewrite::{
    amalgam_reduce, britton_reduce, equal, is_trivial, normal_form, AmalgamNormalForm,
    HnnNormalForm, Verdict, Witness,
};
pub use scheme::{Diagnostic, Pairing, Presentation, SchemeId, SchemeNode, Workspace};
pub use stallings::{BasisWord, Morphism, SubgroupAutomaton};
pub use stream::{GeneratorStream, IndexDomain};
pub use subgroup::{Generators, Saturation, Strategy, SubgroupHandle};
pub use words::{FinSupportSeq, Symbol, SymbolTable, Word};
