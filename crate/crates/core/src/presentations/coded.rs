//! A coded system over `{0, 1, α, β, γ}` with property (D) whose inverse
//! lacks it.
//!
//! The shift is the closure of an increasing union of SFTs `Y_n`, so its
//! language is the union of their languages. A word of length `L` lies in
//! `Y_n` for `n ≥ L` unless it contains one of the forbidden families below;
//! the `0^m, m > n` constraint disappears in the union.

use crate::language::{Compat, Exactness, Language};
use crate::word::{Alphabet, Sym, Word};

pub const ZERO: Sym = 0;
pub const ONE: Sym = 1;
pub const ALPHA: Sym = 2;
pub const BETA: Sym = 3;
pub const GAMMA: Sym = 4;

pub struct CodedExampleOracle {
    alphabet: Alphabet,
}

impl Default for CodedExampleOracle {
    fn default() -> Self {
        CodedExampleOracle {
            alphabet: Alphabet::new(["0", "1", "α", "β", "γ"]).expect("fixed alphabet"),
        }
    }
}

/// Pattern symbol of `βα c γ 0^k γ`; `None` is a free position of `c`.
fn pattern_at(k: usize, i: usize) -> Option<Sym> {
    match i {
        0 => Some(BETA),
        1 => Some(ALPHA),
        i if i < k + 2 => None,
        i if i == k + 2 || i == 2 * k + 3 => Some(GAMMA),
        _ => Some(ZERO),
    }
}

fn pattern_len(k: usize) -> usize {
    2 * k + 4
}

// The pattern for `k` with free positions filled harmlessly.
fn fill(k: usize, from: usize, to: usize, prev: Option<Sym>) -> Vec<Sym> {
    let mut out = Vec::with_capacity(to - from);
    let mut last = prev;
    for i in from..to {
        let s = pattern_at(k, i).unwrap_or(if last == Some(BETA) { ALPHA } else { ONE });
        out.push(s);
        last = Some(s);
    }
    out
}

impl CodedExampleOracle {
    pub fn new() -> Self {
        Self::default()
    }

    fn has_pattern_at(w: &[Sym], p: usize) -> bool {
        if w[p] != BETA || w.get(p + 1) != Some(&ALPHA) {
            return false;
        }
        let mut k = 1;
        while p + pattern_len(k) <= w.len() {
            let hit = (2..pattern_len(k)).all(|i| pattern_at(k, i).is_none_or(|s| w[p + i] == s));
            if hit {
                return true;
            }
            k += 1;
        }
        false
    }
}

impl Language for CodedExampleOracle {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn exactness(&self) -> Exactness {
        Exactness::Exact
    }

    fn admits(&self, w: &[Sym]) -> bool {
        let local = w.windows(2).all(|x| x[0] != BETA || x[1] == ALPHA);
        local && (0..w.len()).all(|p| !Self::has_pattern_at(w, p))
    }

    fn name(&self) -> String {
        "coded-example".into()
    }

    /// `b ∈ ω⁻(a)` iff `b` has no `β`; otherwise a pattern started at the
    /// last `β` of `b` and completed inside the follower refutes it.
    fn omega_minus_exact(&self, b: &[Sym], a: &[Sym]) -> Option<Compat> {
        let Some(p) = b.iter().rposition(|&s| s == BETA) else {
            return Some(Compat::Yes);
        };
        let ba: Vec<Sym> = b.iter().chain(a).copied().collect();
        let s = ba.len() - p;
        let k = s.saturating_sub(2).max(1) + 1;
        let c = fill(k, s, pattern_len(k), ba.last().copied());
        let ac: Vec<Sym> = a.iter().chain(&c).copied().collect();
        let bac: Vec<Sym> = ba.iter().chain(&c).copied().collect();
        if self.admits(&ac) && !self.admits(&bac) {
            Some(Compat::No(Word(c)))
        } else {
            None
        }
    }

    /// `b ∈ ω⁺(a)` fails only through a `β` in front of `a` whose pattern
    /// ends on a `γ` of `b`, or, for empty `a`, through `β b`.
    fn omega_plus_exact(&self, a: &[Sym], b: &[Sym]) -> Option<Compat> {
        if a.is_empty() && b.first().is_some_and(|&s| s != ALPHA) {
            return Some(Compat::No(Word(vec![BETA])));
        }
        let ab: Vec<Sym> = a.iter().chain(b).copied().collect();
        for j in (0..b.len()).filter(|&j| b[j] == GAMMA) {
            let e = a.len() + j;
            for k in 1..=e + 1 {
                let len = pattern_len(k);
                if len <= e + 1 {
                    continue;
                }
                // The pattern occupies [e + 1 - len, e]; its head lies in c.
                let head = len - (e + 1);
                let fits = (0..=e).all(|t| pattern_at(k, head + t).is_none_or(|s| ab[t] == s));
                if !fits {
                    continue;
                }
                let c = fill(k, 0, head, None);
                let ca: Vec<Sym> = c.iter().chain(a).copied().collect();
                if self.admits(&ca) {
                    return Some(Compat::No(Word(c)));
                }
            }
        }
        Some(Compat::Yes)
    }

    fn exact_followers(&self) -> bool {
        true
    }
}
