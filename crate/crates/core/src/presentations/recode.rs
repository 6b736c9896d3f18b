//! Higher block recodings.

use std::collections::HashMap;
use std::sync::Arc;

use super::sofic::SoficOracle;
use crate::error::Result;
use crate::language::{enumerate_language, Compat, Exactness, Language, Oracle};
use crate::word::{Alphabet, Sym, Word};

/// Translation between words of `X` and words of `X^[n]`.
#[derive(Clone, Debug)]
pub struct BlockMap {
    pub n: usize,
    pub blocks: Vec<Word>,
    index: HashMap<Word, Sym>,
}

impl BlockMap {
    /// Sliding-window code of a word of length at least `n`.
    pub fn encode(&self, w: &[Sym]) -> Option<Word> {
        if w.len() < self.n {
            return Some(Word::empty()).filter(|_| w.is_empty());
        }
        w.windows(self.n)
            .map(|x| self.index.get(&Word::from_slice(x)).copied())
            .collect::<Option<Vec<_>>>()
            .map(Word)
    }

    /// Unrolls overlapping blocks; `None` when neighbours do not overlap.
    pub fn decode(&self, w: &[Sym]) -> Option<Word> {
        let Some(&first) = w.first() else {
            return Some(Word::empty());
        };
        let mut out = self.blocks[first as usize].0.clone();
        for pair in w.windows(2) {
            let (x, y) = (&self.blocks[pair[0] as usize], &self.blocks[pair[1] as usize]);
            if x[1..] != y[..self.n - 1] {
                return None;
            }
            out.push(y[self.n - 1]);
        }
        Some(Word(out))
    }

    pub fn block(&self, s: Sym) -> &Word {
        &self.blocks[s as usize]
    }
}

struct BlockOracle {
    inner: Oracle,
    map: BlockMap,
    alphabet: Alphabet,
}

impl BlockOracle {
    fn first_symbols(&self, w: &[Sym]) -> Vec<Sym> {
        w.iter().map(|&s| self.map.block(s)[0]).collect()
    }

    fn last_symbols(&self, w: &[Sym]) -> Vec<Sym> {
        w.iter().map(|&s| self.map.block(s)[self.map.n - 1]).collect()
    }

    // A block that cannot follow (or precede) `x` because of overlap.
    fn overlap_breaker(&self, x: Sym, after: bool) -> Option<Sym> {
        let n = self.map.n;
        let bx = self.map.block(x);
        (0..self.map.blocks.len() as Sym).find(|&y| {
            let by = self.map.block(y);
            if after {
                bx[1..] != by[..n - 1]
            } else {
                by[1..] != bx[..n - 1]
            }
        })
    }
}

impl Language for BlockOracle {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn exactness(&self) -> Exactness {
        match self.inner.exactness() {
            Exactness::Exact => Exactness::Exact,
            Exactness::HorizonBounded(m) => Exactness::HorizonBounded(m + 1 - self.map.n),
        }
    }

    fn admits(&self, w: &[Sym]) -> bool {
        self.map.decode(w).is_some_and(|u| self.inner.admits(&u))
    }

    fn name(&self) -> String {
        format!("{}^[{}]", self.inner.name(), self.map.n)
    }

    fn omega_minus_exact(&self, b: &[Sym], a: &[Sym]) -> Option<Compat> {
        if a.is_empty() {
            let last = *b.last()?;
            return self.overlap_breaker(last, true).map(|y| Compat::No(Word(vec![y])));
        }
        let ua = self.map.decode(a)?;
        let lead = self.first_symbols(b);
        Some(match self.inner.omega_minus_exact(&lead, &ua)? {
            Compat::No(c) => {
                let tail = ua.concat(&c);
                let coded = self.map.encode(&tail)?;
                Compat::No(Word(coded[coded.len() - c.len()..].to_vec()))
            }
            other => other,
        })
    }

    fn omega_plus_exact(&self, a: &[Sym], b: &[Sym]) -> Option<Compat> {
        if a.is_empty() {
            let first = *b.first()?;
            return self.overlap_breaker(first, false).map(|y| Compat::No(Word(vec![y])));
        }
        let ua = self.map.decode(a)?;
        let trail = self.last_symbols(b);
        Some(match self.inner.omega_plus_exact(&ua, &trail)? {
            Compat::No(c) => {
                let head = Word(c.0.clone()).concat(&ua);
                let coded = self.map.encode(&head)?;
                Compat::No(Word(coded[..c.len()].to_vec()))
            }
            other => other,
        })
    }

    fn exact_followers(&self) -> bool {
        self.inner.exact_followers()
    }

    fn syntactic_key(&self, w: &[Sym]) -> Option<Vec<u32>> {
        if w.is_empty() {
            return self.inner.syntactic_key(&[]).map(|_| vec![u32::MAX]);
        }
        // Neighbours overlap only in the first and last n - 1 decoded symbols.
        let decoded = self.map.decode(w)?;
        let k = self.map.n - 1;
        let mut key: Vec<u32> = decoded[..k].iter().chain(&decoded[decoded.len() - k..]).map(|&s| s as u32).collect();
        key.extend(self.inner.syntactic_key(&decoded)?);
        Some(key)
    }
}

fn block_name(alphabet: &Alphabet, w: &[Sym]) -> String {
    if alphabet.names().iter().all(|s| s.chars().count() == 1) {
        alphabet.render(w)
    } else {
        w.iter().map(|&s| alphabet.name(s)).collect::<Vec<_>>().join(".")
    }
}

/// The `n`-th higher block shift `X^[n]` over the alphabet `𝓛_n(X)`.
pub fn higher_block_recode(oracle: &Oracle, n: usize) -> Result<(Oracle, BlockMap)> {
    assert!(n >= 1, "block length must be positive");
    let blocks: Vec<Word> = enumerate_language(oracle.as_ref(), n)?.into_iter().collect();
    let index = blocks.iter().enumerate().map(|(i, b)| (b.clone(), i as Sym)).collect();
    let map = BlockMap { n, blocks, index };
    if n == 1 {
        return Ok((oracle.clone(), map));
    }
    let alphabet = Alphabet::new(map.blocks.iter().map(|b| block_name(oracle.alphabet(), b)))?;
    let name = format!("{}^[{n}]", oracle.name());
    if let (Some(g), 2) = (oracle.sofic(), n) {
        let pairs = map
            .blocks
            .iter()
            .enumerate()
            .map(|(i, b)| ((b[0], b[1]), i as Sym))
            .collect();
        let graph = g.two_block(alphabet, &pairs);
        return Ok((Arc::new(SoficOracle::new(graph, name)), map));
    }
    let recoded = BlockOracle {
        inner: oracle.clone(),
        map: map.clone(),
        alphabet,
    };
    Ok((Arc::new(recoded), map))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::left_compat;
    use crate::presentations::semigroup::dyck_oracle;
    use crate::presentations::sft::SftPresentation;
    use crate::presentations::substitution::SubstitutionPresentation;

    #[test]
    fn word_counts_shift_by_block_length() {
        let sources = [
            SftPresentation::golden_mean().oracle().unwrap(),
            dyck_oracle(2).unwrap(),
            SubstitutionPresentation::fibonacci().oracle().unwrap(),
        ];
        for o in &sources {
            for n in 1..=3 {
                let (r, _) = higher_block_recode(o, n).unwrap();
                for k in 1..=5 {
                    assert_eq!(
                        enumerate_language(r.as_ref(), k).unwrap().len(),
                        enumerate_language(o.as_ref(), k + n - 1).unwrap().len(),
                        "{} n={n} k={k}",
                        o.name()
                    );
                }
            }
        }
    }

    #[test]
    fn golden_two_block() {
        let o = SftPresentation::golden_mean().oracle().unwrap();
        let (r, map) = higher_block_recode(&o, 2).unwrap();
        assert_eq!(r.alphabet().names(), ["00", "01", "10"]);
        assert_eq!(map.decode(&[0, 1, 2]).unwrap().0, vec![0, 0, 1, 0]);
        assert!(map.decode(&[1, 1]).is_none());
        let full = SftPresentation::full(2).oracle().unwrap();
        let (r2, _) = higher_block_recode(&full, 2).unwrap();
        for s in r2.alphabet().symbols() {
            let followers = r2.alphabet().symbols().filter(|&t| r2.admits(&[s, t])).count();
            assert_eq!(followers, 2);
        }
        assert_eq!(r.alphabet().len(), 3);
    }

    #[test]
    fn dyck_block_hooks_have_valid_witnesses() {
        let o = dyck_oracle(2).unwrap();
        let (r, _) = higher_block_recode(&o, 2).unwrap();
        let words: Vec<Word> = (1..=2).flat_map(|k| enumerate_language(r.as_ref(), k).unwrap()).collect();
        for a in &words {
            for b in &words {
                if let Compat::No(c) = left_compat(r.as_ref(), b, a, 0) {
                    let ac = a.concat(&c);
                    let bac = b.concat(&ac);
                    assert!(r.admits(&ac) && !r.admits(&bac));
                }
            }
        }
    }
}
