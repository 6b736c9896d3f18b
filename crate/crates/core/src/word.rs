//! Alphabets, words and canonically ordered word sets.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Index of a symbol in its [`Alphabet`].
pub type Sym = u16;

/// Ordered finite list of distinct symbol names.
///
/// The order is the one used for every canonical ordering downstream
/// (word sets, vertex numbering, matrix rows).
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct Alphabet {
    symbols: Vec<String>,
    #[serde(skip)]
    index: HashMap<String, Sym>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::InvalidAlphabet("alphabet is empty".into()));
        }
        if symbols.len() > Sym::MAX as usize {
            return Err(Error::InvalidAlphabet("too many symbols".into()));
        }
        let mut index = HashMap::with_capacity(symbols.len());
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() {
                return Err(Error::InvalidAlphabet("empty symbol name".into()));
            }
            if index.insert(s.clone(), i as Sym).is_some() {
                return Err(Error::InvalidAlphabet(format!("duplicate symbol `{s}`")));
            }
        }
        Ok(Alphabet { symbols, index })
    }

    /// Alphabet `{0, 1, ..., n-1}` with decimal names.
    pub fn numeric(n: usize) -> Self {
        Alphabet::new((0..n).map(|i| i.to_string())).expect("nonempty numeric alphabet")
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Sym> {
        0..self.symbols.len() as Sym
    }

    pub fn name(&self, s: Sym) -> &str {
        &self.symbols[s as usize]
    }

    pub fn names(&self) -> &[String] {
        &self.symbols
    }

    pub fn sym(&self, name: &str) -> Result<Sym> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownSymbol(name.to_string()))
    }

    /// Parses a word. Symbols may be separated by whitespace or commas;
    /// without separators the text is split greedily into the longest
    /// matching symbol names.
    pub fn parse(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text.contains(|c: char| c.is_whitespace() || c == ',') {
            return text
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|t| !t.is_empty())
                .map(|t| self.sym(t))
                .collect::<Result<Vec<_>>>()
                .map(Word);
        }
        let mut out = Vec::new();
        let mut rest = text;
        while !rest.is_empty() {
            let best = self
                .symbols
                .iter()
                .enumerate()
                .filter(|(_, s)| rest.starts_with(s.as_str()))
                .max_by_key(|(_, s)| s.len());
            match best {
                Some((i, s)) => {
                    out.push(i as Sym);
                    rest = &rest[s.len()..];
                }
                None => return Err(Error::UnknownSymbol(rest.to_string())),
            }
        }
        Ok(Word(out))
    }

    /// Renders a word; symbol names are concatenated when all of them are a
    /// single character, otherwise separated by spaces.
    pub fn render(&self, w: &[Sym]) -> String {
        let single = self.symbols.iter().all(|s| s.chars().count() == 1);
        let sep = if single { "" } else { " " };
        w.iter()
            .map(|&s| self.name(s))
            .collect::<Vec<_>>()
            .join(sep)
    }
}

impl fmt::Debug for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(&self.symbols).finish()
    }
}

impl TryFrom<Vec<String>> for Alphabet {
    type Error = Error;
    fn try_from(v: Vec<String>) -> Result<Self> {
        Alphabet::new(v)
    }
}

impl From<Alphabet> for Vec<String> {
    fn from(a: Alphabet) -> Self {
        a.symbols
    }
}

/// Finite word over an alphabet, stored as symbol indices.
///
/// Ordered canonically: shorter words first, then lexicographically in
/// alphabet order.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<Sym>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_slice(s: &[Sym]) -> Self {
        Word(s.to_vec())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Sym] {
        &self.0
    }

    pub fn concat(&self, other: &[Sym]) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(other);
        Word(v)
    }

    pub fn prepend(&self, s: Sym) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(s);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }

    pub fn suffix(&self, n: usize) -> Word {
        Word(self.0[self.0.len() - n..].to_vec())
    }

    pub fn prefix(&self, n: usize) -> Word {
        Word(self.0[..n].to_vec())
    }
}

impl std::ops::Deref for Word {
    type Target = [Sym];
    fn deref(&self) -> &[Sym] {
        &self.0
    }
}

impl From<Vec<Sym>> for Word {
    fn from(v: Vec<Sym>) -> Self {
        Word(v)
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Canonical comparison of symbol slices: length first, then lexicographic.
pub fn canonical_cmp(a: &[Sym], b: &[Sym]) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        canonical_cmp(&self.0, &other.0)
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonically sorted duplicate-free set of words.
#[derive(Clone, PartialEq, Eq, Hash, Default, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct WordSet(BTreeSet<Word>);

impl WordSet {
    pub fn new() -> Self {
        WordSet(BTreeSet::new())
    }

    pub fn insert(&mut self, w: Word) -> bool {
        self.0.insert(w)
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.0.contains(w)
    }

    pub fn contains_slice(&self, w: &[Sym]) -> bool {
        // BTreeSet lookup needs an owned key of the same type.
        self.0.contains(&Word::from_slice(w))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Word> {
        self.0.iter()
    }

    pub fn is_subset(&self, other: &WordSet) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn first(&self) -> Option<&Word> {
        self.0.iter().next()
    }

    pub fn render(&self, alphabet: &Alphabet) -> Vec<String> {
        self.0.iter().map(|w| alphabet.render(w)).collect()
    }

    /// Reverses every member.
    pub fn reversed(&self) -> WordSet {
        self.0.iter().map(Word::reversed).collect()
    }
}

impl FromIterator<Word> for WordSet {
    fn from_iter<I: IntoIterator<Item = Word>>(iter: I) -> Self {
        WordSet(iter.into_iter().collect())
    }
}

impl IntoIterator for WordSet {
    type Item = Word;
    type IntoIter = std::collections::btree_set::IntoIter<Word>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a> IntoIterator for &'a WordSet {
    type Item = &'a Word;
    type IntoIter = std::collections::btree_set::Iter<'a, Word>;
    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

impl fmt::Debug for WordSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alphabet_rejects_duplicates_and_empty() {
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
        assert!(Alphabet::new(["a", "b", "a"]).is_err());
    }

    #[test]
    fn parse_greedy_and_separated() {
        let a = Alphabet::new(["e1-", "e1+", "1"]).unwrap();
        let w = a.parse("e1-1e1+").unwrap();
        assert_eq!(w.0, vec![0, 2, 1]);
        let w2 = a.parse("e1- 1 e1+").unwrap();
        assert_eq!(w, w2);
        assert_eq!(a.render(&w), "e1- 1 e1+");
        assert!(a.parse("x").is_err());
    }

    #[test]
    fn canonical_order_is_length_then_lex() {
        let mut s = WordSet::new();
        for w in [vec![1, 0], vec![1], vec![0, 1], vec![]] {
            s.insert(Word(w));
        }
        let order: Vec<Vec<Sym>> = s.iter().map(|w| w.0.clone()).collect();
        assert_eq!(order, vec![vec![], vec![1], vec![0, 1], vec![1, 0]]);
    }
}
