//! Shifts of finite type given by forbidden words.

use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::sofic::{LabeledGraph, SoficOracle};
use crate::error::{Error, Result};
use crate::language::Oracle;
use crate::word::{Alphabet, Sym, Word};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SftPresentation {
    pub alphabet: Vec<String>,
    pub forbidden: Vec<String>,
}

impl SftPresentation {
    pub fn full(n: usize) -> Self {
        SftPresentation {
            alphabet: (0..n).map(|i| i.to_string()).collect(),
            forbidden: Vec::new(),
        }
    }

    pub fn golden_mean() -> Self {
        SftPresentation {
            alphabet: vec!["0".into(), "1".into()],
            forbidden: vec!["11".into()],
        }
    }

    fn parsed(&self) -> Result<(Alphabet, Vec<Word>)> {
        let alphabet = Alphabet::new(self.alphabet.clone())?;
        let forbidden = self
            .forbidden
            .iter()
            .map(|f| alphabet.parse(f))
            .collect::<Result<Vec<_>>>()?;
        if forbidden.iter().any(|f| f.is_empty()) {
            return Err(Error::InvalidPresentation("empty forbidden word".into()));
        }
        Ok((alphabet, forbidden))
    }

    /// The de Bruijn-style graph on allowed words of length `m - 1`, where
    /// `m` is the longest forbidden word, trimmed to its essential part.
    pub fn graph(&self) -> Result<LabeledGraph> {
        let (alphabet, forbidden) = self.parsed()?;
        let m = forbidden.iter().map(|f| f.len()).max().unwrap_or(1);
        let avoids = |w: &[Sym]| {
            forbidden
                .iter()
                .all(|f| f.len() > w.len() || !w.windows(f.len()).any(|x| x == f.as_slice()))
        };
        let mut states: Vec<Vec<Sym>> = vec![Vec::new()];
        for _ in 1..m {
            let mut next = Vec::new();
            for s in &states {
                for a in alphabet.symbols() {
                    let mut t = s.clone();
                    t.push(a);
                    if avoids(&t) {
                        next.push(t);
                    }
                }
            }
            states = next;
        }
        let index: HashMap<&[Sym], usize> = states.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
        let mut edges = Vec::new();
        for (i, s) in states.iter().enumerate() {
            for a in alphabet.symbols() {
                let mut t = s.clone();
                t.push(a);
                if avoids(&t) {
                    edges.push((i, a, index[&t[1..]]));
                }
            }
        }
        let names = states.iter().map(|s| alphabet.render(s)).collect();
        Ok(LabeledGraph::new(alphabet, names, edges)?.essential())
    }

    pub fn oracle(&self) -> Result<Oracle> {
        Ok(Arc::new(SoficOracle::new(self.graph()?, "sft")))
    }
}

/// Oracle of an SFT presentation.
pub fn sft_oracle(p: &SftPresentation) -> Result<Oracle> {
    p.oracle()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_mean_words() {
        let o = SftPresentation::golden_mean().oracle().unwrap();
        let a = o.alphabet().clone();
        assert!(!o.admits(&a.parse("0110").unwrap()));
        assert!(o.admits(&a.parse("0100").unwrap()));
        assert!(!o.admits(&a.parse("011").unwrap()));
    }

    #[test]
    fn unextendable_words_are_dropped() {
        // 01 is allowed but cannot be continued: 10, 11 are forbidden.
        let p = SftPresentation {
            alphabet: vec!["0".into(), "1".into()],
            forbidden: vec!["10".into(), "11".into()],
        };
        let o = p.oracle().unwrap();
        assert!(o.admits(&[0, 0, 0]));
        assert!(!o.admits(&[0, 1]));
    }

    #[test]
    fn full_shift_single_state() {
        let g = SftPresentation::full(3).graph().unwrap();
        assert_eq!(g.num_states(), 1);
        assert_eq!(g.edges().len(), 3);
    }
}
