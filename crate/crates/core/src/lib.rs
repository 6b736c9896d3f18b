//! λ-graph systems of subshifts: construction from finite presentations,
//! synchronization certificates and matrix-system invariants.

pub mod builtins;
pub mod certificate;
pub mod error;
pub mod lambda_graph;
pub mod language;
pub mod matrix;
pub mod pipeline;
pub mod presentations;
pub mod synchronization;
pub mod word;

pub use error::{Error, Result};
pub use language::{Compat, Exactness, Language, OmegaExactness, Oracle};
pub use word::{Alphabet, Sym, Word, WordSet};
