//! Concrete subshift families and recodings.

pub mod bitset;
pub mod sft;
pub mod sofic;
pub mod semigroup;
pub mod coded;
pub mod beta;
pub mod substitution;
pub mod recode;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::language::Oracle;

/// A presentation file: one document tagged by `kind`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PresentationDocument {
    Sft(sft::SftPresentation),
    Sofic(sofic::LabeledGraphPresentation),
    Dyck { n: usize },
    Motzkin { n: usize },
    MarkovDyck(semigroup::MarkovDyckPresentation),
    SemigroupLabeled(semigroup::SemigroupLabeledPresentation),
    Substitution(substitution::SubstitutionPresentation),
    Beta(beta::BetaShiftPresentation),
    CodedExample,
}

impl PresentationDocument {
    pub fn oracle(&self) -> Result<Oracle> {
        match self {
            PresentationDocument::Sft(p) => p.oracle(),
            PresentationDocument::Sofic(p) => Ok(Arc::new(sofic::SoficOracle::new(p.to_graph()?, "sofic"))),
            PresentationDocument::Dyck { n } => semigroup::dyck_oracle(*n),
            PresentationDocument::Motzkin { n } => semigroup::motzkin_oracle(*n),
            PresentationDocument::MarkovDyck(p) => semigroup::markov_dyck_oracle(p),
            PresentationDocument::SemigroupLabeled(p) => semigroup::semigroup_labeled_oracle(p),
            PresentationDocument::Substitution(p) => p.oracle(),
            PresentationDocument::Beta(p) => p.oracle(),
            PresentationDocument::CodedExample => Ok(Arc::new(coded::CodedExampleOracle::new())),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| crate::Error::InvalidPresentation(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn documents_round_trip() {
        let docs = [
            PresentationDocument::Sft(sft::SftPresentation::golden_mean()),
            PresentationDocument::Dyck { n: 2 },
            PresentationDocument::Substitution(substitution::SubstitutionPresentation::fibonacci()),
            PresentationDocument::CodedExample,
        ];
        for d in docs {
            let text = serde_json::to_string(&d).unwrap();
            assert_eq!(PresentationDocument::from_json(&text).unwrap(), d);
            assert!(d.oracle().is_ok());
        }
        let dyck = PresentationDocument::from_json(r#"{"kind": "dyck", "n": 3}"#).unwrap();
        assert_eq!(dyck.oracle().unwrap().alphabet().len(), 6);
        assert!(PresentationDocument::from_json(r#"{"kind": "nope"}"#).is_err());
    }
}
