//! Languages of primitive substitutions.

use std::collections::{BTreeMap, HashSet};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::language::{Exactness, Language, Oracle};
use crate::word::{Alphabet, Sym};

pub const DEFAULT_MAX_LEN: usize = 64;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubstitutionPresentation {
    pub alphabet: Vec<String>,
    /// Symbol name to image word.
    pub rules: BTreeMap<String, String>,
    #[serde(default = "default_max_len")]
    pub max_len: usize,
}

fn default_max_len() -> usize {
    DEFAULT_MAX_LEN
}

impl SubstitutionPresentation {
    pub fn fibonacci() -> Self {
        Self::from_rules(&[("a", "ab"), ("b", "a")])
    }

    pub fn thue_morse() -> Self {
        Self::from_rules(&[("a", "ab"), ("b", "ba")])
    }

    fn from_rules(rules: &[(&str, &str)]) -> Self {
        SubstitutionPresentation {
            alphabet: rules.iter().map(|(a, _)| a.to_string()).collect(),
            rules: rules.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
            max_len: DEFAULT_MAX_LEN,
        }
    }

    pub fn oracle(&self) -> Result<Oracle> {
        Ok(Arc::new(SubstitutionOracle::new(self)?))
    }
}

/// Smallest `p ≤ n²` with a positive `p`-th power of the incidence matrix.
pub fn primitivity_power(images: &[Vec<Sym>]) -> Option<usize> {
    let n = images.len();
    let base: Vec<Vec<bool>> = (0..n)
        .map(|a| (0..n).map(|b| images[a].contains(&(b as Sym))).collect())
        .collect();
    let mut power = base.clone();
    for p in 1..=n * n {
        if power.iter().flatten().all(|&x| x) {
            return Some(p);
        }
        power = (0..n)
            .map(|i| (0..n).map(|j| (0..n).any(|k| power[i][k] && base[k][j])).collect())
            .collect();
    }
    None
}

pub struct SubstitutionOracle {
    alphabet: Alphabet,
    images: Vec<Vec<Sym>>,
    primitivity_power: usize,
    two_factors: Vec<[Sym; 2]>,
    max_len: usize,
    factors: Mutex<Vec<Arc<HashSet<Vec<Sym>>>>>,
    name: String,
}

impl SubstitutionOracle {
    pub fn new(p: &SubstitutionPresentation) -> Result<Self> {
        let alphabet = Alphabet::new(p.alphabet.clone())?;
        let mut images = Vec::new();
        for a in alphabet.names() {
            let img = p
                .rules
                .get(a)
                .ok_or_else(|| Error::InvalidPresentation(format!("no image for `{a}`")))?;
            let w = alphabet.parse(img)?;
            if w.is_empty() {
                return Err(Error::InvalidPresentation(format!("empty image for `{a}`")));
            }
            images.push(w.0);
        }
        if p.rules.len() != alphabet.len() {
            return Err(Error::InvalidPresentation("rule for a symbol outside the alphabet".into()));
        }
        let power = primitivity_power(&images).ok_or(Error::NotPrimitive)?;
        let mut o = SubstitutionOracle {
            alphabet,
            images,
            primitivity_power: power,
            two_factors: Vec::new(),
            max_len: p.max_len,
            factors: Mutex::new(Vec::new()),
            name: "substitution".into(),
        };
        o.two_factors = o.close_two_factors();
        Ok(o)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn primitivity_power(&self) -> usize {
        self.primitivity_power
    }

    pub fn apply(&self, w: &[Sym]) -> Vec<Sym> {
        w.iter().flat_map(|&a| self.images[a as usize].iter().copied()).collect()
    }

    // 2-factors: start from an iterate long enough to have one, then close
    // under taking 2-factors of σ(uv).
    fn close_two_factors(&self) -> Vec<[Sym; 2]> {
        let mut w = vec![0 as Sym];
        while w.len() < 2 {
            w = self.apply(&w);
        }
        let mut seen: HashSet<[Sym; 2]> = w.windows(2).map(|x| [x[0], x[1]]).collect();
        let mut todo: Vec<[Sym; 2]> = seen.iter().copied().collect();
        while let Some(uv) = todo.pop() {
            for x in self.apply(&uv).windows(2) {
                let f = [x[0], x[1]];
                if seen.insert(f) {
                    todo.push(f);
                }
            }
        }
        let mut out: Vec<[Sym; 2]> = seen.into_iter().collect();
        out.sort_unstable();
        out
    }

    fn iterate_to(&self, uv: &[Sym], m: usize) -> Vec<Sym> {
        let mut w = uv.to_vec();
        let mut images: Vec<Vec<Sym>> = (0..self.alphabet.len()).map(|a| vec![a as Sym]).collect();
        while images.iter().any(|x| x.len() + 1 < m) {
            w = self.apply(&w);
            images = images.iter().map(|x| self.apply(x)).collect();
        }
        w
    }

    /// The length-`m` factors: those of `σⁿ(uv)` over all 2-factors `uv`,
    /// with `n` large enough that every `σⁿ(a)` has length at least `m-1`.
    pub fn factors(&self, m: usize) -> Arc<HashSet<Vec<Sym>>> {
        {
            let cache = self.factors.lock().expect("factor cache");
            if let Some(f) = cache.get(m) {
                return f.clone();
            }
        }
        let set = self.compute_factors(m);
        let mut cache = self.factors.lock().expect("factor cache");
        while cache.len() <= m {
            let len = cache.len();
            let s = if len == m { set.clone() } else { self.compute_factors(len) };
            cache.push(Arc::new(s));
        }
        cache[m].clone()
    }

    fn compute_factors(&self, m: usize) -> HashSet<Vec<Sym>> {
        let mut out = HashSet::new();
        if m == 0 {
            out.insert(Vec::new());
            return out;
        }
        for uv in &self.two_factors {
            for x in self.iterate_to(uv, m).windows(m) {
                out.insert(x.to_vec());
            }
        }
        out
    }

    /// Whether one more round of substitution produces no new factor of
    /// length up to `max_len`.
    pub fn saturated(&self, max_len: usize) -> bool {
        (1..=max_len).all(|m| {
            let known = self.factors(m);
            self.two_factors.iter().all(|uv| {
                let w = self.apply(&self.iterate_to(uv, m));
                w.windows(m).all(|x| known.contains(x))
            })
        })
    }
}

impl Language for SubstitutionOracle {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn exactness(&self) -> Exactness {
        Exactness::HorizonBounded(self.max_len)
    }

    fn admits(&self, w: &[Sym]) -> bool {
        self.factors(w.len()).contains(w)
    }

    fn name(&self) -> String {
        self.name.clone()
    }
}

pub fn substitution_language(p: &SubstitutionPresentation) -> Result<Oracle> {
    p.oracle()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::enumerate_language;

    // Brute-force oracle: factors of a long iterate from `a`.
    fn iterate_factors(p: &SubstitutionPresentation, m: usize, rounds: usize) -> HashSet<Vec<Sym>> {
        let o = SubstitutionOracle::new(p).unwrap();
        let mut w = vec![0];
        for _ in 0..rounds {
            w = o.apply(&w);
        }
        w.windows(m).map(|x| x.to_vec()).collect()
    }

    #[test]
    fn fibonacci_two_factors() {
        let o = SubstitutionPresentation::fibonacci().oracle().unwrap();
        let l2 = enumerate_language(o.as_ref(), 2).unwrap();
        assert_eq!(l2.render(o.alphabet()), ["aa", "ab", "ba"]);
        assert_eq!(iterate_factors(&SubstitutionPresentation::fibonacci(), 2, 6).len(), 3);
    }

    #[test]
    fn factor_sets_match_long_iterates() {
        for p in [SubstitutionPresentation::fibonacci(), SubstitutionPresentation::thue_morse()] {
            let o = SubstitutionOracle::new(&p).unwrap();
            for m in 1..=12 {
                assert_eq!(*o.factors(m), iterate_factors(&p, m, 16), "m={m}");
            }
        }
    }

    #[test]
    fn thue_morse_is_cube_free() {
        let o = SubstitutionPresentation::thue_morse().oracle().unwrap();
        assert!(!o.admits(&[0, 0, 0]));
        assert!(!o.admits(&[0, 1, 0, 1, 0, 1]));
        assert_eq!(enumerate_language(o.as_ref(), 1).unwrap().len(), 2);
    }

    #[test]
    fn saturation_and_primitivity() {
        let o = SubstitutionOracle::new(&SubstitutionPresentation::fibonacci()).unwrap();
        assert!(o.saturated(16));
        assert_eq!(o.primitivity_power(), 2);
        let not_primitive = SubstitutionPresentation {
            alphabet: vec!["a".into(), "b".into()],
            rules: BTreeMap::from([("a".into(), "aa".into()), ("b".into(), "ab".into())]),
            max_len: 8,
        };
        assert!(matches!(not_primitive.oracle(), Err(Error::NotPrimitive)));
    }

    #[test]
    fn horizon_is_enforced() {
        let mut p = SubstitutionPresentation::fibonacci();
        p.max_len = 5;
        let o = p.oracle().unwrap();
        assert!(enumerate_language(o.as_ref(), 6).is_err());
    }
}
