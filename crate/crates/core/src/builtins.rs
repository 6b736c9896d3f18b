//! Named example presentations.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::language::{reverse_oracle, Oracle};
use crate::presentations::beta::BetaShiftPresentation;
use crate::presentations::coded::CodedExampleOracle;
use crate::presentations::recode::higher_block_recode;
use crate::presentations::semigroup::{
    dyck_oracle, motzkin_oracle, InnerGraphSpec, MarkovDyckOracle, MarkovDyckPresentation,
};
use crate::presentations::sft::SftPresentation;
use crate::presentations::sofic::{LabeledGraph, SoficOracle};
use crate::presentations::substitution::{SubstitutionOracle, SubstitutionPresentation};
use crate::presentations::PresentationDocument;
use crate::word::Alphabet;

/// The default example corpus.
pub const CORPUS: [&str; 13] = [
    "full-2",
    "full-3",
    "golden-mean",
    "even-shift",
    "dyck-2",
    "motzkin-2",
    "markov-dyck",
    "fibonacci",
    "thue-morse",
    "beta-golden",
    "beta-21",
    "coded-example",
    "reversed-even-shift",
];

pub const REVERSED_PREFIX: &str = "reversed-";

/// `block-N-NAME` is the N-block recoding of `NAME`.
pub const BLOCK_PREFIX: &str = "block-";

pub fn even_shift_graph() -> LabeledGraph {
    LabeledGraph::from_edges(Alphabet::numeric(2), 2, vec![(0, 0, 0), (0, 1, 1), (1, 1, 0)])
        .expect("even shift graph")
}

pub fn markov_dyck_sample() -> MarkovDyckPresentation {
    MarkovDyckPresentation {
        graph: InnerGraphSpec {
            vertices: vec!["u".into(), "w".into()],
            edges: vec![
                ("a".into(), "u".into(), "u".into()),
                ("b".into(), "u".into(), "w".into()),
                ("c".into(), "w".into(), "u".into()),
            ],
        },
        idempotents: false,
    }
}

pub fn beta_21() -> BetaShiftPresentation {
    BetaShiftPresentation {
        preperiod: vec![],
        period: vec![2, 1],
    }
}

fn suffix_number(name: &str, prefix: &str) -> Option<usize> {
    name.strip_prefix(prefix)?.parse().ok().filter(|&n| n >= 1)
}

/// The serializable document behind a builtin, when it has one.
pub fn builtin_document(name: &str) -> Option<PresentationDocument> {
    if let Some(n) = suffix_number(name, "full-") {
        return Some(PresentationDocument::Sft(SftPresentation::full(n)));
    }
    if let Some(n) = suffix_number(name, "dyck-") {
        return Some(PresentationDocument::Dyck { n });
    }
    if let Some(n) = suffix_number(name, "motzkin-") {
        return Some(PresentationDocument::Motzkin { n });
    }
    Some(match name {
        "golden-mean" => PresentationDocument::Sft(SftPresentation::golden_mean()),
        "even-shift" => PresentationDocument::Sofic(
            crate::presentations::sofic::LabeledGraphPresentation::from_graph(&even_shift_graph()),
        ),
        "markov-dyck" => PresentationDocument::MarkovDyck(markov_dyck_sample()),
        "fibonacci" => PresentationDocument::Substitution(SubstitutionPresentation::fibonacci()),
        "thue-morse" => PresentationDocument::Substitution(SubstitutionPresentation::thue_morse()),
        "beta-golden" => PresentationDocument::Beta(BetaShiftPresentation::golden()),
        "beta-21" => PresentationDocument::Beta(beta_21()),
        "coded-example" => PresentationDocument::CodedExample,
        _ => return None,
    })
}

/// Resolves a builtin name, including `reversed-` variants.
pub fn builtin(name: &str) -> Result<Oracle> {
    if let Some(inner) = name.strip_prefix(REVERSED_PREFIX) {
        return Ok(reverse_oracle(&builtin(inner)?));
    }
    if let Some((n, inner)) = name
        .strip_prefix(BLOCK_PREFIX)
        .and_then(|rest| rest.split_once('-'))
        .and_then(|(n, inner)| Some((n.parse::<usize>().ok().filter(|&n| n >= 1)?, inner)))
    {
        return Ok(higher_block_recode(&builtin(inner)?, n)?.0);
    }
    let doc = builtin_document(name).ok_or_else(|| Error::UnknownBuiltin(name.to_string()))?;
    Ok(match doc {
        PresentationDocument::Sft(p) => Arc::new(SoficOracle::new(p.graph()?, name)),
        PresentationDocument::Sofic(p) => Arc::new(SoficOracle::new(p.to_graph()?, name)),
        PresentationDocument::Beta(p) => Arc::new(SoficOracle::new(p.graph()?, name)),
        PresentationDocument::MarkovDyck(p) => Arc::new(MarkovDyckOracle::new(
            p.graph.to_graph()?,
            p.idempotents,
            name,
        )?),
        PresentationDocument::Substitution(p) => Arc::new(SubstitutionOracle::new(&p)?.with_name(name)),
        PresentationDocument::Dyck { n } => dyck_oracle(n)?,
        PresentationDocument::Motzkin { n } => motzkin_oracle(n)?,
        PresentationDocument::CodedExample => Arc::new(CodedExampleOracle::new()),
        PresentationDocument::SemigroupLabeled(_) => unreachable!("no labeled builtin"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::enumerate_language;

    #[test]
    fn corpus_resolves() {
        for name in CORPUS {
            let o = builtin(name).unwrap();
            assert!(!enumerate_language(o.as_ref(), 3).unwrap().is_empty(), "{name}");
        }
        assert!(matches!(builtin("nope"), Err(Error::UnknownBuiltin(_))));
        assert!(builtin("full-0").is_err());
        let b = builtin("block-2-golden-mean").unwrap();
        assert_eq!(enumerate_language(b.as_ref(), 3).unwrap().len(), 8);
    }

    #[test]
    fn even_shift_blocks_of_ones_are_even() {
        let o = builtin("even-shift").unwrap();
        assert!(o.admits(&[0, 1, 1, 0]));
        assert!(!o.admits(&[0, 1, 0]));
        let r = builtin("reversed-even-shift").unwrap();
        assert_eq!(
            enumerate_language(r.as_ref(), 5).unwrap(),
            enumerate_language(o.as_ref(), 5).unwrap().reversed()
        );
    }
}
