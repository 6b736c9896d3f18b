//! The admissibility-oracle abstraction and the predecessor/follower
//! operators built on top of it.
//!
//! Every operator works on finite words only. Follower quantification
//! (the `ω` operators) ranges over an infinite set in general; oracles that
//! can decide it exactly expose that through [`Language::omega_minus_exact`]
//! and [`Language::omega_plus_exact`], everything else is checked up to an
//! explicit follower horizon.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::presentations::sofic::LabeledGraph;
use crate::word::{Alphabet, Sym, Word, WordSet};

/// How far an oracle's answers can be trusted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exactness {
    Exact,
    HorizonBounded(usize),
}

impl Exactness {
    pub fn check(&self, requested: usize) -> Result<()> {
        match *self {
            Exactness::Exact => Ok(()),
            Exactness::HorizonBounded(max_len) if requested <= max_len => Ok(()),
            Exactness::HorizonBounded(max_len) => Err(Error::HorizonExceeded {
                requested,
                max_len,
            }),
        }
    }
}

/// Result of asking whether a left word is compatible with every follower
/// of a context word (or the time mirror of that question).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Compat {
    /// Decided exactly.
    Yes,
    /// No counterexample among followers up to the horizon.
    YesAtHorizon,
    /// A follower (resp. predecessor) that breaks admissibility.
    No(Word),
}

impl Compat {
    pub fn holds(&self) -> bool {
        !matches!(self, Compat::No(_))
    }
}

/// Exactness flag attached to computed `ω` sets.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OmegaExactness {
    Exact,
    UpperBound,
}

/// A subshift given through its language of admissible words.
///
/// Implementations must be factorial, extendable and admit the empty word.
/// They must behave as pure functions.
pub trait Language: Send + Sync {
    fn alphabet(&self) -> &Alphabet;

    fn exactness(&self) -> Exactness;

    fn admits(&self, w: &[Sym]) -> bool;

    fn name(&self) -> String;

    /// Exact decision of `b ∈ ω⁻(a)`, assuming `ba` is admissible.
    fn omega_minus_exact(&self, _b: &[Sym], _a: &[Sym]) -> Option<Compat> {
        None
    }

    /// Exact decision of `b ∈ ω⁺(a)`, assuming `ab` is admissible.
    fn omega_plus_exact(&self, _a: &[Sym], _b: &[Sym]) -> Option<Compat> {
        None
    }

    /// Whether the two hooks above are implemented.
    fn exact_followers(&self) -> bool {
        false
    }

    /// A labeled graph presenting the same language, when one is known.
    fn sofic(&self) -> Option<&LabeledGraph> {
        None
    }

    /// A key such that words with equal keys have identical two-sided
    /// contexts (same syntactic class). Used only to share work.
    fn syntactic_key(&self, _w: &[Sym]) -> Option<Vec<u32>> {
        None
    }
}

pub type Oracle = Arc<dyn Language>;

impl fmt::Debug for dyn Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Language({})", self.name())
    }
}

/// The admissible words of length `n`, by depth-first extension pruned by
/// factoriality.
pub fn enumerate_language(oracle: &dyn Language, n: usize) -> Result<WordSet> {
    oracle.exactness().check(n)?;
    let mut out = WordSet::new();
    let mut buf = Vec::with_capacity(n);
    extend_right(oracle, &mut buf, n, &mut |w| {
        out.insert(Word::from_slice(w));
    });
    Ok(out)
}

/// Admissible words of every length `0..=n`, in canonical order.
pub fn enumerate_up_to(oracle: &dyn Language, n: usize) -> Result<Vec<Word>> {
    oracle.exactness().check(n)?;
    let mut out = Vec::new();
    for len in 0..=n {
        out.extend(enumerate_language(oracle, len)?);
    }
    Ok(out)
}

fn extend_right(oracle: &dyn Language, buf: &mut Vec<Sym>, n: usize, f: &mut dyn FnMut(&[Sym])) {
    if buf.len() == n {
        f(buf);
        return;
    }
    for s in oracle.alphabet().symbols() {
        buf.push(s);
        if oracle.admits(buf) {
            extend_right(oracle, buf, n, f);
        }
        buf.pop();
    }
}

/// `Γ⁻_l(w)`: the words `u` of length `l` with `uw` admissible.
pub fn gamma_minus(oracle: &dyn Language, w: &[Sym], l: usize) -> Result<WordSet> {
    oracle.exactness().check(l + w.len())?;
    let mut out = WordSet::new();
    for_each_left_extension(oracle, w, l, &mut |u| {
        out.insert(Word::from_slice(u));
        true
    });
    Ok(out)
}

/// `Γ⁺_l(w)`: the words `u` of length `l` with `wu` admissible.
pub fn gamma_plus(oracle: &dyn Language, w: &[Sym], l: usize) -> Result<WordSet> {
    oracle.exactness().check(l + w.len())?;
    let mut out = WordSet::new();
    let mut buf = w.to_vec();
    if !oracle.admits(&buf) {
        return Ok(out);
    }
    let base = w.len();
    extend_right(oracle, &mut buf, base + l, &mut |x| {
        out.insert(Word::from_slice(&x[base..]));
    });
    Ok(out)
}

/// Calls `f` on each length-`l` left extension of `w` (canonical order is
/// not guaranteed). Stops early when `f` returns false; returns whether the
/// enumeration completed.
pub fn for_each_left_extension(
    oracle: &dyn Language,
    w: &[Sym],
    l: usize,
    f: &mut dyn FnMut(&[Sym]) -> bool,
) -> bool {
    if !oracle.admits(w) {
        return true;
    }
    // Build u right-to-left inside a buffer holding `u w`.
    let mut buf = vec![0 as Sym; l + w.len()];
    buf[l..].copy_from_slice(w);
    left_rec(oracle, &mut buf, l, &mut |uw: &[Sym]| f(&uw[..l]))
}

fn left_rec(
    oracle: &dyn Language,
    buf: &mut [Sym],
    remaining: usize,
    f: &mut dyn FnMut(&[Sym]) -> bool,
) -> bool {
    if remaining == 0 {
        return f(buf);
    }
    let pos = remaining - 1;
    for s in oracle.alphabet().symbols() {
        buf[pos] = s;
        if oracle.admits(&buf[pos..]) && !left_rec(oracle, buf, pos, f) {
            return false;
        }
    }
    true
}

/// Decides `b ∈ ω⁻(a)`: is `bac` admissible for every follower `c` of `a`?
/// Exact when the oracle supports it, else followers up to
/// `follower_horizon` symbols are tried.
pub fn left_compat(oracle: &dyn Language, b: &[Sym], a: &[Sym], follower_horizon: usize) -> Compat {
    let mut ba = b.to_vec();
    ba.extend_from_slice(a);
    if !oracle.admits(&ba) {
        // b ∉ Γ⁻(a); the empty follower is the witness.
        return Compat::No(Word::empty());
    }
    if let Some(c) = oracle.omega_minus_exact(b, a) {
        return c;
    }
    let mut ac = a.to_vec();
    let mut bac = ba;
    match search_follower(oracle, &mut ac, &mut bac, a.len(), follower_horizon) {
        Some(c) => Compat::No(c),
        None => Compat::YesAtHorizon,
    }
}

fn search_follower(
    oracle: &dyn Language,
    ac: &mut Vec<Sym>,
    bac: &mut Vec<Sym>,
    base: usize,
    remaining: usize,
) -> Option<Word> {
    if remaining == 0 {
        return None;
    }
    for s in oracle.alphabet().symbols() {
        ac.push(s);
        if oracle.admits(ac) {
            bac.push(s);
            if !oracle.admits(bac) {
                let c = Word::from_slice(&ac[base..]);
                bac.pop();
                ac.pop();
                return Some(c);
            }
            let found = search_follower(oracle, ac, bac, base, remaining - 1);
            bac.pop();
            if found.is_some() {
                ac.pop();
                return found;
            }
        }
        ac.pop();
    }
    None
}

/// Decides `b ∈ ω⁺(a)`: is `cab` admissible for every predecessor `c` of
/// `a`? Mirror of [`left_compat`]; a `No` carries the offending predecessor.
pub fn right_compat(oracle: &dyn Language, a: &[Sym], b: &[Sym], horizon: usize) -> Compat {
    let mut ab = a.to_vec();
    ab.extend_from_slice(b);
    if !oracle.admits(&ab) {
        return Compat::No(Word::empty());
    }
    if let Some(c) = oracle.omega_plus_exact(a, b) {
        return c;
    }
    // c is built right-to-left in front of `a` and `ab`.
    let mut ca: Vec<Sym> = a.to_vec();
    let mut cab: Vec<Sym> = ab;
    match search_predecessor(oracle, &mut ca, &mut cab, a.len(), horizon) {
        Some(c) => Compat::No(c),
        None => Compat::YesAtHorizon,
    }
}

fn search_predecessor(
    oracle: &dyn Language,
    ca: &mut Vec<Sym>,
    cab: &mut Vec<Sym>,
    base: usize,
    remaining: usize,
) -> Option<Word> {
    if remaining == 0 {
        return None;
    }
    for s in oracle.alphabet().symbols() {
        ca.insert(0, s);
        if oracle.admits(ca) {
            cab.insert(0, s);
            if !oracle.admits(cab) {
                let c = Word::from_slice(&ca[..ca.len() - base]);
                cab.remove(0);
                ca.remove(0);
                return Some(c);
            }
            let found = search_predecessor(oracle, ca, cab, base, remaining - 1);
            cab.remove(0);
            if found.is_some() {
                ca.remove(0);
                return found;
            }
        }
        ca.remove(0);
    }
    None
}

fn omega_flag(oracle: &dyn Language) -> OmegaExactness {
    if oracle.exact_followers() {
        OmegaExactness::Exact
    } else {
        OmegaExactness::UpperBound
    }
}

/// `ω⁻_l(a) = ⋂_{c ∈ Γ⁺(a)} { b ∈ 𝓛_l : bac ∈ 𝓛 }`, with followers of
/// length `0..=follower_horizon` unless the oracle decides exactly. The
/// result only shrinks as the horizon grows.
pub fn omega_minus(
    oracle: &dyn Language,
    a: &[Sym],
    l: usize,
    follower_horizon: usize,
) -> Result<(WordSet, OmegaExactness)> {
    let flag = omega_flag(oracle);
    if flag == OmegaExactness::UpperBound {
        oracle.exactness().check(l + a.len() + follower_horizon)?;
    }
    let gamma = gamma_minus(oracle, a, l)?;
    let out = gamma
        .into_iter()
        .filter(|b| left_compat(oracle, b, a, follower_horizon).holds())
        .collect();
    Ok((out, flag))
}

/// `ω⁺_n(a) = ⋂_{c ∈ Γ⁻(a)} { b ∈ 𝓛_n : cab ∈ 𝓛 }`; mirror of
/// [`omega_minus`].
pub fn omega_plus(
    oracle: &dyn Language,
    a: &[Sym],
    n: usize,
    horizon: usize,
) -> Result<(WordSet, OmegaExactness)> {
    let flag = omega_flag(oracle);
    if flag == OmegaExactness::UpperBound {
        oracle.exactness().check(n + a.len() + horizon)?;
    }
    let gamma = gamma_plus(oracle, a, n)?;
    let out = gamma
        .into_iter()
        .filter(|b| right_compat(oracle, a, b, horizon).holds())
        .collect();
    Ok((out, flag))
}

/// Oracle of the time-reversed subshift.
pub struct Reversed {
    inner: Oracle,
}

impl Language for Reversed {
    fn alphabet(&self) -> &Alphabet {
        self.inner.alphabet()
    }

    fn exactness(&self) -> Exactness {
        self.inner.exactness()
    }

    fn admits(&self, w: &[Sym]) -> bool {
        let r: Vec<Sym> = w.iter().rev().copied().collect();
        self.inner.admits(&r)
    }

    fn name(&self) -> String {
        format!("reversed({})", self.inner.name())
    }

    fn omega_minus_exact(&self, b: &[Sym], a: &[Sym]) -> Option<Compat> {
        let (ra, rb) = (rev(a), rev(b));
        self.inner.omega_plus_exact(&ra, &rb).map(reverse_witness)
    }

    fn omega_plus_exact(&self, a: &[Sym], b: &[Sym]) -> Option<Compat> {
        let (ra, rb) = (rev(a), rev(b));
        self.inner.omega_minus_exact(&rb, &ra).map(reverse_witness)
    }

    fn exact_followers(&self) -> bool {
        self.inner.exact_followers()
    }

    fn syntactic_key(&self, w: &[Sym]) -> Option<Vec<u32>> {
        self.inner.syntactic_key(&rev(w))
    }
}

fn rev(w: &[Sym]) -> Vec<Sym> {
    w.iter().rev().copied().collect()
}

fn reverse_witness(c: Compat) -> Compat {
    match c {
        Compat::No(w) => Compat::No(w.reversed()),
        other => other,
    }
}

/// Oracle for the inverse subshift: `w` is admissible iff its reversal is.
/// Sofic oracles are reversed on the graph so they keep their exact
/// machinery; reversing twice gives back an equivalent oracle.
pub fn reverse_oracle(oracle: &Oracle) -> Oracle {
    if let Some(g) = oracle.sofic() {
        let name = format!("reversed({})", oracle.name());
        return Arc::new(crate::presentations::sofic::SoficOracle::new(g.reversed(), name));
    }
    Arc::new(Reversed {
        inner: oracle.clone(),
    })
}
