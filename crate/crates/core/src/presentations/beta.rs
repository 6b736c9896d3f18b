//! β-shifts given by the quasi-greedy expansion of 1.

use std::cmp::Ordering;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::sofic::{LabeledGraph, SoficOracle};
use crate::error::{Error, Result};
use crate::language::Oracle;
use crate::word::{Alphabet, Sym};

/// `d = preperiod · period^∞`, digits as integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BetaShiftPresentation {
    #[serde(default)]
    pub preperiod: Vec<u16>,
    pub period: Vec<u16>,
}

impl BetaShiftPresentation {
    /// `(10)^∞`, the golden ratio.
    pub fn golden() -> Self {
        BetaShiftPresentation {
            preperiod: vec![],
            period: vec![1, 0],
        }
    }

    pub fn digit(&self, i: usize) -> u16 {
        if i < self.preperiod.len() {
            self.preperiod[i]
        } else {
            self.period[(i - self.preperiod.len()) % self.period.len()]
        }
    }

    fn cycle_len(&self) -> usize {
        self.preperiod.len() + self.period.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.period.is_empty() {
            return Err(Error::InvalidExpansion("period is empty".into()));
        }
        if self.period.iter().all(|&x| x == 0) {
            return Err(Error::InvalidExpansion("a quasi-greedy expansion never ends in 0^∞".into()));
        }
        if self.digit(0) == 0 {
            return Err(Error::InvalidExpansion("leading digit must be positive".into()));
        }
        // Both sequences are periodic past the preperiod, so a window of
        // preperiod + 2·period digits settles the comparison.
        let window = self.preperiod.len() + 2 * self.period.len();
        for n in 1..self.cycle_len() {
            let shifted = (0..window).map(|i| self.digit(n + i));
            let d = (0..window).map(|i| self.digit(i));
            if shifted.cmp(d) == Ordering::Greater {
                return Err(Error::InvalidExpansion(format!("shift by {n} exceeds the expansion")));
            }
        }
        Ok(())
    }

    /// Direct criterion: every suffix of `w` is `≤_lex` the prefix of `d` of
    /// the same length.
    pub fn admits_by_suffixes(&self, w: &[Sym]) -> bool {
        (0..w.len()).all(|p| {
            let suffix = &w[p..];
            let d = (0..suffix.len()).map(|i| self.digit(i));
            suffix.iter().copied().cmp(d) != Ordering::Greater
        })
    }

    /// The standard right-resolving presentation: state `i` tracks a suffix
    /// equal to `d₀⋯d_{i-1}`.
    pub fn graph(&self) -> Result<LabeledGraph> {
        self.validate()?;
        let top = self.digit(0) as usize;
        let alphabet = Alphabet::numeric(top + 1);
        let n = self.cycle_len();
        let mut edges = Vec::new();
        for i in 0..n {
            let di = self.digit(i);
            for x in 0..di {
                edges.push((i, x, 0));
            }
            let next = if i + 1 < n { i + 1 } else { self.preperiod.len() };
            edges.push((i, di, next));
        }
        LabeledGraph::from_edges(alphabet, n, edges)
    }

    pub fn oracle(&self) -> Result<Oracle> {
        Ok(Arc::new(SoficOracle::new(self.graph()?, "beta")))
    }
}

pub fn beta_oracle(p: &BetaShiftPresentation) -> Result<Oracle> {
    p.oracle()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::enumerate_language;
    use crate::presentations::sft::SftPresentation;

    #[test]
    fn golden_beta_is_golden_mean() {
        let b = BetaShiftPresentation::golden().oracle().unwrap();
        let g = SftPresentation::golden_mean().oracle().unwrap();
        for n in 0..=10 {
            assert_eq!(enumerate_language(b.as_ref(), n).unwrap(), enumerate_language(g.as_ref(), n).unwrap());
        }
    }

    #[test]
    fn twenty_one_forbids_twenty_two() {
        let p = BetaShiftPresentation {
            preperiod: vec![],
            period: vec![2, 1],
        };
        let o = p.oracle().unwrap();
        assert!(!o.admits(&[2, 2]));
        assert!(o.admits(&[2, 1, 2, 0]));
        assert!(o.admits(&[0; 9]));
    }

    #[test]
    fn graph_matches_suffix_criterion() {
        let p = BetaShiftPresentation {
            preperiod: vec![2],
            period: vec![0, 1],
        };
        let o = p.oracle().unwrap();
        for n in 0..=7 {
            let from_graph = enumerate_language(o.as_ref(), n).unwrap();
            let mut count = 0;
            let total = 3usize.pow(n as u32);
            for code in 0..total {
                let w: Vec<Sym> = (0..n).map(|i| ((code / 3usize.pow(i as u32)) % 3) as Sym).collect();
                if p.admits_by_suffixes(&w) {
                    count += 1;
                    assert!(o.admits(&w), "{w:?}");
                }
            }
            assert_eq!(count, from_graph.len());
        }
    }

    #[test]
    fn rejects_bad_expansions() {
        let bad = BetaShiftPresentation {
            preperiod: vec![1],
            period: vec![2],
        };
        assert!(matches!(bad.validate(), Err(Error::InvalidExpansion(_))));
        let zeros = BetaShiftPresentation {
            preperiod: vec![1],
            period: vec![0],
        };
        assert!(zeros.validate().is_err());
    }
}
