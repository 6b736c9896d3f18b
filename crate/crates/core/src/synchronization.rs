//! `l`-synchronizing words, their tables, and certificates for property
//! (D) and λ-synchronization (through condition (iii)).
//!
//! Sofic oracles are decided exactly by searches over pairs of state
//! subsets. Every other class is searched up to a word-length bound, and a
//! failure at the bound is reported as inconclusive.

use std::collections::{HashMap, HashSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::certificate::{evidence, Certificate, Failure, Horizon, Property, Status};
use crate::error::{Error, Result};
use crate::language::{
    enumerate_language, enumerate_up_to, for_each_left_extension, gamma_minus, left_compat, right_compat, Compat,
    Language,
};
use crate::presentations::bitset::StateSet;
use crate::presentations::sofic::LabeledGraph;
use crate::word::{Sym, Word, WordSet};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SyncAnswer {
    YesExact,
    YesAtHorizon,
    /// `b ∈ Γ⁻_l(v)`, `c ∈ Γ⁺(v)` with `bvc` inadmissible.
    No { b: Word, c: Word },
}

impl SyncAnswer {
    pub fn is_yes(&self) -> bool {
        !matches!(self, SyncAnswer::No { .. })
    }
}

fn follower_budget(oracle: &dyn Language, follower_horizon: usize) -> usize {
    if oracle.exact_followers() {
        0
    } else {
        follower_horizon
    }
}

/// Decides `Γ⁻_l(v) ⊆ ω⁻_l(v)`.
pub fn is_l_synchronizing(
    oracle: &dyn Language,
    v: &[Sym],
    l: usize,
    follower_horizon: usize,
) -> Result<SyncAnswer> {
    oracle
        .exactness()
        .check(l + v.len() + follower_budget(oracle, follower_horizon))?;
    if !oracle.admits(v) {
        return Err(Error::NotAdmissible(oracle.alphabet().render(v)));
    }
    if let Some(g) = oracle.sofic() {
        return Ok(sofic_is_synchronizing(g, v, l));
    }
    let layer = ClassLayer::new(oracle, l)?;
    Ok(sync_against(oracle, v, l, follower_horizon, layer.as_ref().map(|c| &c.reps[..])))
}

/// Admissible words of length `l` grouped by syntactic class.
struct ClassLayer {
    /// Least word of each class, in lexicographic order.
    reps: Vec<Word>,
    members: Vec<Vec<Word>>,
}

impl ClassLayer {
    /// `None` without syntactic keys.
    fn new(oracle: &dyn Language, l: usize) -> Result<Option<Self>> {
        let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
        let mut members: Vec<Vec<Word>> = Vec::new();
        for w in enumerate_language(oracle, l)?.iter() {
            let Some(k) = oracle.syntactic_key(w) else {
                return Ok(None);
            };
            let i = *index.entry(k).or_insert_with(|| {
                members.push(Vec::new());
                members.len() - 1
            });
            members[i].push(w.clone());
        }
        let reps = members.iter().map(|m| m[0].clone()).collect();
        Ok(Some(ClassLayer { reps, members }))
    }

    fn gamma_minus(&self, oracle: &dyn Language, v: &[Sym]) -> WordSet {
        let mut words: Vec<Word> = self
            .reps
            .iter()
            .zip(&self.members)
            .filter(|(r, _)| oracle.admits(&r.concat(v)))
            .flat_map(|(_, m)| m.iter().cloned())
            .collect();
        words.sort_unstable();
        words.into_iter().collect()
    }
}

// Compatibility of `v` with its length-`l` left extensions; with a class
// layer only one word per class is tried.
fn sync_against(oracle: &dyn Language, v: &[Sym], l: usize, follower_horizon: usize, layer: Option<&[Word]>) -> SyncAnswer {
    let mut answer = SyncAnswer::YesExact;
    let mut visit = |b: &[Sym]| match left_compat(oracle, b, v, follower_horizon) {
        Compat::Yes => true,
        Compat::YesAtHorizon => {
            answer = SyncAnswer::YesAtHorizon;
            true
        }
        Compat::No(c) => {
            answer = SyncAnswer::No {
                b: Word::from_slice(b),
                c,
            };
            false
        }
    };
    match layer {
        Some(reps) => {
            for b in reps {
                if oracle.admits(&b.concat(v)) && !visit(b) {
                    break;
                }
            }
        }
        None => {
            for_each_left_extension(oracle, v, l, &mut visit);
        }
    }
    answer
}

/// Distinct terminal-state sets of the words of length `l`, each with its
/// least word.
fn forward_layer(g: &LabeledGraph, l: usize) -> Vec<(StateSet, Word)> {
    let mut layer = vec![(g.all_states(), Word::empty())];
    for _ in 0..l {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for (s, w) in &layer {
            for a in g.alphabet().symbols() {
                let t = g.step_forward(s, a);
                if !t.is_empty() && seen.insert(t.clone()) {
                    next.push((t, w.concat(&[a])));
                }
            }
        }
        layer = next;
    }
    layer
}

fn sofic_is_synchronizing(g: &LabeledGraph, v: &[Sym], l: usize) -> SyncAnswer {
    let target = g.forward_set(v);
    for (start, b) in forward_layer(g, l) {
        let after = g.forward_from(&start, v);
        if after.is_empty() {
            continue;
        }
        if let Some(c) = g.follower_witness(&target, &after) {
            return SyncAnswer::No { b, c };
        }
    }
    SyncAnswer::YesExact
}

/// Least representatives of the syntactic classes met by words of length
/// at most `max_len`, in canonical order. Without a syntactic key every
/// word is its own class.
#[derive(Clone, Debug)]
pub struct WordClasses {
    pub max_len: usize,
    pub grouped: bool,
    pub reps: Vec<Word>,
}

pub fn word_classes(oracle: &dyn Language, max_len: usize) -> Result<WordClasses> {
    oracle.exactness().check(max_len)?;
    let Some(first_key) = oracle.syntactic_key(&[]) else {
        return Ok(WordClasses {
            max_len,
            grouped: false,
            reps: enumerate_up_to(oracle, max_len)?,
        });
    };
    // A least word of a class extends a least word of a class, so the
    // search only grows representatives.
    let mut seen: HashSet<Vec<u32>> = HashSet::from([first_key]);
    let mut reps = vec![Word::empty()];
    let mut frontier = 0..1;
    for _ in 0..max_len {
        let start = reps.len();
        for i in frontier.clone() {
            for a in oracle.alphabet().symbols() {
                let w = reps[i].concat(&[a]);
                if !oracle.admits(&w) {
                    continue;
                }
                let key = oracle.syntactic_key(&w).expect("keys are total");
                if seen.insert(key) {
                    reps.push(w);
                }
            }
        }
        frontier = start..reps.len();
    }
    Ok(WordClasses {
        max_len,
        grouped: true,
        reps,
    })
}

/// Sync status and signature of each representative, signatures interned in
/// order of first appearance.
struct Classified {
    sig: Vec<Option<usize>>,
    signatures: Vec<WordSet>,
    exact: bool,
}

fn yes(answer: SyncAnswer) -> Option<bool> {
    match answer {
        SyncAnswer::No { .. } => None,
        ans => Some(ans == SyncAnswer::YesExact),
    }
}

fn classify(oracle: &dyn Language, reps: &[Word], l: usize, follower_horizon: usize) -> Result<Classified> {
    oracle
        .exactness()
        .check(l + reps.iter().map(Word::len).max().unwrap_or(0) + follower_budget(oracle, follower_horizon))?;
    let layer = match oracle.sofic() {
        Some(_) => None,
        None => ClassLayer::new(oracle, l)?,
    };
    let gamma = |v: &Word| match &layer {
        Some(c) => Ok(c.gamma_minus(oracle, v)),
        None => gamma_minus(oracle, v, l),
    };
    // Right extensions of l-synchronizing words are l-synchronizing, so a
    // word whose prefix is a synchronizing representative inherits.
    let mut decided: HashMap<&[Sym], bool> = HashMap::new();
    let mut answers: Vec<Option<(bool, WordSet)>> = vec![None; reps.len()];
    let mut order: Vec<usize> = (0..reps.len()).collect();
    order.sort_by_key(|&i| reps[i].len());
    for chunk in order.chunk_by(|&a, &b| reps[a].len() == reps[b].len()) {
        let found: Vec<(usize, Option<(bool, WordSet)>)> = chunk
            .par_iter()
            .map(|&i| {
                let v = &reps[i];
                let inherited = (!v.is_empty()).then(|| decided.get(&v[..v.len() - 1])).flatten();
                let answer = match (inherited, oracle.sofic(), &layer) {
                    (Some(&exact), _, _) => Some(exact),
                    (None, Some(g), _) => yes(sofic_is_synchronizing(g, v, l)),
                    (None, None, layer) => yes(sync_against(
                        oracle,
                        v,
                        l,
                        follower_horizon,
                        layer.as_ref().map(|c| &c.reps[..]),
                    )),
                };
                Ok((i, answer.map(|ex| gamma(v).map(|g| (ex, g))).transpose()?))
            })
            .collect::<Result<_>>()?;
        for (i, a) in found {
            if let Some((ex, _)) = &a {
                decided.insert(&reps[i], *ex);
            }
            answers[i] = a;
        }
    }
    let mut index: HashMap<WordSet, usize> = HashMap::new();
    let mut signatures = Vec::new();
    let mut exact = true;
    let sig = answers
        .into_iter()
        .map(|a| {
            a.map(|(ex, s)| {
                exact &= ex;
                *index.entry(s.clone()).or_insert_with(|| {
                    signatures.push(s);
                    signatures.len() - 1
                })
            })
        })
        .collect();
    Ok(Classified {
        sig,
        signatures,
        exact,
    })
}

/// The `l`-synchronizing words of length at most `max_word_len` with their
/// `Γ⁻_l` signatures.
#[derive(Clone, Debug, Serialize)]
pub struct SyncWordTable {
    pub level: usize,
    pub max_word_len: usize,
    pub follower_horizon: usize,
    /// Every membership was decided exactly.
    pub exact: bool,
    /// Members in canonical order.
    pub members: Vec<Word>,
    /// Index into `signatures` for each member.
    pub member_signature: Vec<usize>,
    pub signatures: Vec<WordSet>,
}

impl SyncWordTable {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn signature(&self, i: usize) -> &WordSet {
        &self.signatures[self.member_signature[i]]
    }

    pub fn position(&self, w: &Word) -> Option<usize> {
        self.members.binary_search(w).ok()
    }

    pub fn contains(&self, w: &Word) -> bool {
        self.position(w).is_some()
    }
}

pub fn sync_word_table(
    oracle: &dyn Language,
    l: usize,
    max_word_len: usize,
    follower_horizon: usize,
) -> Result<SyncWordTable> {
    oracle
        .exactness()
        .check(l + max_word_len + follower_budget(oracle, follower_horizon))?;
    let words = enumerate_up_to(oracle, max_word_len)?;
    // Class of each word, represented by its first (least) member.
    let (reps, class_of): (Vec<Word>, Vec<usize>) = if oracle.syntactic_key(&[]).is_some() {
        let mut index: HashMap<Vec<u32>, usize> = HashMap::new();
        let mut reps = Vec::new();
        let class_of = words
            .iter()
            .map(|w| {
                let key = oracle.syntactic_key(w).expect("keys are total");
                *index.entry(key).or_insert_with(|| {
                    reps.push(w.clone());
                    reps.len() - 1
                })
            })
            .collect();
        (reps, class_of)
    } else {
        (words.clone(), (0..words.len()).collect())
    };
    let c = classify(oracle, &reps, l, follower_horizon)?;
    let mut members = Vec::new();
    let mut member_signature = Vec::new();
    for (w, &k) in words.into_iter().zip(&class_of) {
        if let Some(s) = c.sig[k] {
            members.push(w);
            member_signature.push(s);
        }
    }
    Ok(SyncWordTable {
        level: l,
        max_word_len,
        follower_horizon,
        exact: c.exact,
        members,
        member_signature,
        signatures: c.signatures,
    })
}

/// One level of [`SyncTables`]: class representatives only.
#[derive(Clone, Debug)]
pub struct LevelTable {
    pub level: usize,
    /// Sync representatives in canonical order, with signature index.
    pub entries: Vec<(Word, usize)>,
    pub signatures: Vec<WordSet>,
    pub exact: bool,
}

impl LevelTable {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Least representative of each distinct signature.
    pub fn classes(&self) -> Vec<(Word, &WordSet)> {
        let mut seen = vec![false; self.signatures.len()];
        let mut out = Vec::new();
        for (w, s) in &self.entries {
            if !std::mem::replace(&mut seen[*s], true) {
                out.push((w.clone(), &self.signatures[*s]));
            }
        }
        out
    }
}

/// Sync tables for levels `0..=max_level` over one family of word classes.
#[derive(Clone, Debug)]
pub struct SyncTables {
    pub max_word_len: usize,
    pub follower_horizon: usize,
    pub grouped: bool,
    pub levels: Vec<LevelTable>,
}

impl SyncTables {
    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn exact(&self) -> bool {
        self.levels.iter().all(|t| t.exact)
    }
}

pub fn sync_tables(
    oracle: &dyn Language,
    max_level: usize,
    max_word_len: usize,
    follower_horizon: usize,
) -> Result<SyncTables> {
    oracle
        .exactness()
        .check(max_level + max_word_len + follower_budget(oracle, follower_horizon))?;
    let classes = word_classes(oracle, max_word_len)?;
    let mut levels = Vec::with_capacity(max_level + 1);
    let mut candidates = classes.reps.clone();
    for l in 0..=max_level {
        let c = classify(oracle, &candidates, l, follower_horizon)?;
        let entries: Vec<(Word, usize)> = candidates
            .into_iter()
            .zip(c.sig)
            .filter_map(|(w, s)| s.map(|s| (w, s)))
            .collect();
        // S_{l+1} ⊆ S_l: only survivors are tested at the next level.
        candidates = entries.iter().map(|(w, _)| w.clone()).collect();
        levels.push(LevelTable {
            level: l,
            entries,
            signatures: c.signatures,
            exact: c.exact,
        });
    }
    Ok(SyncTables {
        max_word_len,
        follower_horizon,
        grouped: classes.grouped,
        levels,
    })
}

// ---------------------------------------------------------------------------
// Condition (iii) and property (D)

/// Outcome of the condition (iii) search, with every failing `b`.
#[derive(Clone, Debug)]
pub struct ConditionIiiSearch {
    pub certificate: Certificate,
    /// Failing words in canonical order (roots and inherited).
    pub failing: Vec<Word>,
}

/// λ-synchronization through condition (iii): every `b` has some `a` with
/// `b ∈ ω⁻(a)`.
pub fn check_lambda_synchronizing(oracle: &dyn Language, horizon: Horizon) -> Certificate {
    condition_iii_search(oracle, horizon).certificate
}

pub fn condition_iii_search(oracle: &dyn Language, horizon: Horizon) -> ConditionIiiSearch {
    let mut cert = Certificate::new(Property::CondIii, horizon);
    cert.notes.push("lambda-synchronization decided through condition (iii)".into());
    if let Some(g) = oracle.sofic() {
        cert.exact = true;
        let failing = sofic_condition_iii(oracle, g, &mut cert);
        return ConditionIiiSearch {
            certificate: cert,
            failing,
        };
    }
    let bound = horizon.word_length_bound;
    cert.notes.push(format!(
        "a ranges over extensions of b up to length {}, at most {} per b",
        a_bound(bound),
        CANDIDATE_CAP
    ));
    let budget = bound + a_bound(bound) + follower_budget(oracle, horizon.follower_horizon);
    if let Err(e) = oracle.exactness().check(budget) {
        cert.status = Status::Inconclusive;
        cert.notes.push(e.to_string());
        return ConditionIiiSearch {
            certificate: cert,
            failing: Vec::new(),
        };
    }
    let fh = horizon.follower_horizon;
    let search = |b: &Word| {
        extension_search(oracle, b, false, a_bound(bound), |a| left_compat(oracle, b, a, fh).holds())
    };
    let outcome = ideal_search(oracle, bound, |b| vec![b.prefix(b.len() - 1), b.suffix(b.len() - 1)], search);
    cert.checked = outcome.checked;
    let failing = finish_ideal(oracle, &mut cert, outcome, |b| {
        let mut ev = condition_iii_evidence(oracle, b, horizon);
        ev.truncate(3);
        ev.into_iter()
            .enumerate()
            .flat_map(|(i, (a, c))| {
                let r = |w: &Word| oracle.alphabet().render(w);
                [(format!("a{i}"), r(&a)), (format!("c{i}"), c.as_ref().map_or("-".into(), r))]
            })
            .collect()
    });
    ConditionIiiSearch {
        certificate: cert,
        failing,
    }
}

/// For each searched `a` (with `ba` admissible, `|a| ≤` the bound), the
/// follower `c` of `a` refuting `b ∈ ω⁻(a)`, or `None` where `b ∈ ω⁻(a)`.
pub fn condition_iii_evidence(oracle: &dyn Language, b: &Word, horizon: Horizon) -> Vec<(Word, Option<Word>)> {
    let mut out = Vec::new();
    for a in enumerate_up_to(oracle, horizon.word_length_bound).unwrap_or_default() {
        if !oracle.admits(&b.concat(&a)) {
            continue;
        }
        let c = match left_compat(oracle, b, &a, horizon.follower_horizon) {
            Compat::No(c) => Some(c),
            _ => None,
        };
        out.push((a, c));
    }
    out
}

/// Cap on the number of `a` tried for one `b`.
pub const CANDIDATE_CAP: usize = 1 << 14;

/// Length bound on searched `a` for a word-length bound on `b`.
pub fn a_bound(word_length_bound: usize) -> usize {
    2 * word_length_bound
}

// Breadth-first over words `a` with `ba` (or `ab` when `prepend`)
// admissible, one per syntactic class of `a`, until `test` accepts one.
fn extension_search(
    oracle: &dyn Language,
    b: &[Sym],
    prepend: bool,
    max_len: usize,
    test: impl Fn(&Word) -> bool,
) -> bool {
    let join = |a: &Word| if prepend { a.concat(b) } else { Word::from_slice(b).concat(a) };
    let mut keys = HashSet::new();
    let mut layer = vec![Word::empty()];
    let mut tried = 0;
    for len in 0..=max_len {
        for a in &layer {
            if test(a) {
                return true;
            }
            tried += 1;
        }
        if len == max_len || tried >= CANDIDATE_CAP {
            return false;
        }
        let mut next = Vec::new();
        'grow: for a in &layer {
            for s in oracle.alphabet().symbols() {
                let x = if prepend { a.prepend(s) } else { a.concat(&[s]) };
                if !oracle.admits(&join(&x)) {
                    continue;
                }
                if let Some(k) = oracle.syntactic_key(&x) {
                    if !keys.insert(k) {
                        continue;
                    }
                }
                next.push(x);
                if tried + next.len() >= CANDIDATE_CAP {
                    break 'grow;
                }
            }
        }
        if prepend {
            next.sort();
        }
        layer = next;
    }
    false
}

struct IdealOutcome {
    /// Failing words mapped to the root failure they inherit from.
    failing: HashMap<Word, Word>,
    checked: usize,
}

// Failures are closed under the `parents` relation: a word fails as soon as
// one of its parents does. Lengths are processed in order, each in parallel.
fn ideal_search(
    oracle: &dyn Language,
    bound: usize,
    parents: impl Fn(&Word) -> Vec<Word> + Sync,
    search: impl Fn(&Word) -> bool + Sync,
) -> IdealOutcome {
    let mut failing: HashMap<Word, Word> = HashMap::new();
    // Search outcomes are class functions, so one run per syntactic key.
    let mut by_key: HashMap<Vec<u32>, bool> = HashMap::new();
    let mut checked = 0;
    for n in 1..=bound {
        let words: Vec<Word> = crate::language::enumerate_language(oracle, n)
            .map(|s| s.into_iter().collect())
            .unwrap_or_default();
        checked += words.len();
        let open: Vec<(&Word, Option<Vec<u32>>)> = words
            .iter()
            .filter(|b| !parents(b).iter().any(|p| failing.contains_key(p)))
            .map(|b| (b, oracle.syntactic_key(b)))
            .collect();
        let mut fresh: Vec<(&Word, &Vec<u32>)> = Vec::new();
        let mut queued = HashSet::new();
        for (b, k) in &open {
            if let Some(k) = k {
                if !by_key.contains_key(k) && queued.insert(k) {
                    fresh.push((b, k));
                }
            }
        }
        let fresh: Vec<(Vec<u32>, bool)> = fresh.par_iter().map(|(b, k)| ((*k).clone(), search(b))).collect();
        by_key.extend(fresh);
        let results: Vec<Option<(Word, Word)>> = words
            .par_iter()
            .map(|b| {
                if let Some(root) = parents(b).iter().find_map(|p| failing.get(p)) {
                    return Some((b.clone(), root.clone()));
                }
                let ok = match oracle.syntactic_key(b) {
                    Some(k) => by_key[&k],
                    None => search(b),
                };
                (!ok).then(|| (b.clone(), b.clone()))
            })
            .collect();
        failing.extend(results.into_iter().flatten());
    }
    IdealOutcome { failing, checked }
}

fn finish_ideal(
    oracle: &dyn Language,
    cert: &mut Certificate,
    outcome: IdealOutcome,
    root_evidence: impl Fn(&Word) -> crate::certificate::Evidence,
) -> Vec<Word> {
    let mut failing: Vec<Word> = outcome.failing.keys().cloned().collect();
    failing.sort();
    let r = |w: &Word| oracle.alphabet().render(w);
    for b in &failing {
        let root = &outcome.failing[b];
        if root == b {
            cert.failures.push(Failure {
                subject: r(b),
                evidence: root_evidence(b),
                inherited_from: None,
            });
        } else {
            cert.inherited_failures += 1;
        }
    }
    if !failing.is_empty() {
        cert.status = Status::Inconclusive;
    }
    failing
}

fn sofic_condition_iii(oracle: &dyn Language, g: &LabeledGraph, cert: &mut Certificate) -> Vec<Word> {
    // Distinct terminal sets T(b) over all words b.
    let mut seen: HashSet<StateSet> = HashSet::from([g.all_states()]);
    let mut classes = vec![(g.all_states(), Word::empty())];
    let mut i = 0;
    while i < classes.len() {
        let (s, w) = classes[i].clone();
        for a in g.alphabet().symbols() {
            let t = g.step_forward(&s, a);
            if !t.is_empty() && seen.insert(t.clone()) {
                classes.push((t, w.concat(&[a])));
            }
        }
        i += 1;
    }
    cert.checked = classes.len();
    let mut failing = Vec::new();
    for (set, b) in classes {
        // Pairs (T(a), T(ba)); b ∈ ω⁻(a) iff F(T(a)) ⊆ F(T(ba)).
        let found = pair_reach(g, (g.all_states(), set), false, |x, y| g.follower_witness(x, y).is_none());
        if found.is_none() {
            if cert.witness.is_none() {
                cert.refute(evidence([("b", oracle.alphabet().render(&b))]));
            }
            failing.push(b);
        }
    }
    failing
}

// Breadth-first search over pairs of state sets, stepping forward (appending)
// or backward (prepending). Returns the word reaching an accepted pair whose
// second set is nonempty.
fn pair_reach(
    g: &LabeledGraph,
    start: (StateSet, StateSet),
    backward: bool,
    accept: impl Fn(&StateSet, &StateSet) -> bool,
) -> Option<Word> {
    let step = |s: &StateSet, a: Sym| {
        if backward {
            g.step_backward(s, a)
        } else {
            g.step_forward(s, a)
        }
    };
    let mut seen: HashMap<(StateSet, StateSet), Word> = HashMap::new();
    let mut queue = VecDeque::new();
    seen.insert(start.clone(), Word::empty());
    queue.push_back(start);
    while let Some((x, y)) = queue.pop_front() {
        let w = seen[&(x.clone(), y.clone())].clone();
        if accept(&x, &y) {
            return Some(w);
        }
        for a in g.alphabet().symbols() {
            let ny = step(&y, a);
            if ny.is_empty() {
                continue;
            }
            let key = (step(&x, a), ny);
            if !seen.contains_key(&key) {
                let next = if backward { w.prepend(a) } else { w.concat(&[a]) };
                seen.insert(key.clone(), next);
                queue.push_back(key);
            }
        }
    }
    None
}

/// Property (D): for every symbol `σ` and `b ∈ Γ⁻(σ)` there is
/// `a ∈ Γ⁻(b)` with `σ ∈ ω₁⁺(ab)`.
pub fn check_property_d(oracle: &dyn Language, horizon: Horizon) -> Certificate {
    let mut cert = Certificate::new(Property::PropertyD, horizon);
    if let Some(g) = oracle.sofic() {
        cert.exact = true;
        sofic_property_d(oracle, g, &mut cert);
        return cert;
    }
    let bound = horizon.word_length_bound;
    if let Err(e) = oracle
        .exactness()
        .check(bound + a_bound(bound) + 1 + follower_budget(oracle, horizon.follower_horizon))
    {
        cert.status = Status::Inconclusive;
        cert.notes.push(e.to_string());
        return cert;
    }
    let fh = horizon.follower_horizon;
    let r = |w: &[Sym]| oracle.alphabet().render(w);
    for sigma in oracle.alphabet().symbols() {
        if !oracle.admits(&[sigma]) {
            continue;
        }
        let search = |b: &Word| {
            let b_sigma = b.concat(&[sigma]);
            extension_search(oracle, &b_sigma, true, a_bound(bound), |a| {
                right_compat(oracle, &a.concat(b), &[sigma], fh).holds()
            })
        };
        // If a works for xb then ax works for b, so failures pass to left
        // extensions; b ranges over Γ⁻(σ) including the empty word.
        let empty_ok = search(&Word::empty());
        cert.checked += 1;
        let sub = ideal_search_filtered(oracle, bound, sigma, &search);
        cert.checked += sub.checked;
        let mut local = Certificate::new(Property::PropertyD, horizon);
        let failing = finish_ideal(oracle, &mut local, sub, |_| Default::default());
        let sname = r(&[sigma]);
        if !empty_ok {
            cert.failures.push(Failure {
                subject: format!("σ={sname}, b=ε"),
                evidence: Default::default(),
                inherited_from: None,
            });
        }
        for f in local.failures {
            cert.failures.push(Failure {
                subject: format!("σ={sname}, b={}", f.subject),
                ..f
            });
        }
        cert.inherited_failures += local.inherited_failures;
        if !empty_ok || !failing.is_empty() {
            cert.status = Status::Inconclusive;
        }
    }
    cert
}

// `ideal_search` restricted to b with bσ admissible; parents are suffixes.
fn ideal_search_filtered(
    oracle: &dyn Language,
    bound: usize,
    sigma: Sym,
    search: &(impl Fn(&Word) -> bool + Sync),
) -> IdealOutcome {
    ideal_search(
        oracle,
        bound,
        |b| vec![b.suffix(b.len() - 1)],
        |b| !oracle.admits(&b.concat(&[sigma])) || search(b),
    )
}

fn sofic_property_d(oracle: &dyn Language, g: &LabeledGraph, cert: &mut Certificate) {
    let r = |w: &[Sym]| oracle.alphabet().render(w);
    for sigma in g.alphabet().symbols() {
        let ps = g.backward_set(&[sigma]);
        if ps.is_empty() {
            continue;
        }
        // Classes of b ∈ Γ⁻(σ) by (P(b), P(bσ)).
        let mut seen = HashSet::from([(g.all_states(), ps.clone())]);
        let mut classes = vec![(g.all_states(), ps, Word::empty())];
        let mut i = 0;
        while i < classes.len() {
            let (x, y, w) = classes[i].clone();
            for a in g.alphabet().symbols() {
                let ny = g.step_backward(&y, a);
                if ny.is_empty() {
                    continue;
                }
                let nx = g.step_backward(&x, a);
                if seen.insert((nx.clone(), ny.clone())) {
                    classes.push((nx, ny, w.prepend(a)));
                }
            }
            i += 1;
        }
        cert.checked += classes.len();
        for (x, y, b) in classes {
            // σ ∈ ω⁺(ab) iff every predecessor of P(ab) also precedes P(abσ).
            let found = pair_reach(g, (x, y), true, |x, y| g.predecessor_witness(x, y).is_none());
            if found.is_none() && cert.witness.is_none() {
                cert.refute(evidence([("sigma", r(&[sigma])), ("b", r(&b))]));
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Extension witnesses for table entries

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionWitness {
    pub mu: String,
    /// `μ′ ∈ 𝒮_{l+1}` with `μ′ ∼_l μ`.
    pub mu_prime: Option<String>,
    /// `(β, ν)` with `ν ∈ 𝒮_{l+1}` and `βν ∼_l μ`.
    pub beta_nu: Option<(String, String)>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExtensionWitnessReport {
    pub level: usize,
    /// Length bound on searched witnesses.
    pub extension_budget: usize,
    pub entries: Vec<ExtensionWitness>,
    pub missing_mu_prime: usize,
    pub missing_beta_nu: usize,
}

impl ExtensionWitnessReport {
    pub fn complete(&self) -> bool {
        self.missing_mu_prime == 0 && self.missing_beta_nu == 0
    }
}

/// For each member `μ` of a level-`l` table, the least `μ′ ∈ 𝒮_{l+1}` with
/// `μ′ ∼_l μ` and the least `(β, ν)` with `ν ∈ 𝒮_{l+1}`, `βν ∼_l μ`,
/// searched over words of length at most `l + max|μ| + 1`.
pub fn extension_witnesses(oracle: &dyn Language, table: &SyncWordTable) -> Result<ExtensionWitnessReport> {
    let l = table.level;
    let fh = table.follower_horizon;
    let longest = table.members.iter().map(Word::len).max().unwrap_or(0);
    let search_len = l + longest + 1;
    oracle
        .exactness()
        .check(l + 1 + search_len + follower_budget(oracle, fh))?;
    let classes = word_classes(oracle, search_len)?;
    let next = classify(oracle, &classes.reps, l + 1, fh)?;
    // Representatives come in canonical order, so the first hit is least.
    let mut prime: HashMap<WordSet, &Word> = HashMap::new();
    let mut beta_nu: HashMap<WordSet, (Sym, &Word)> = HashMap::new();
    for (v, s) in classes.reps.iter().zip(&next.sig).filter_map(|(v, i)| Some((v, &next.signatures[(*i)?]))) {
        prime.entry(restrict_signature(s)).or_insert(v);
        for beta in oracle.alphabet().symbols() {
            let src = source_signature(beta, s);
            if !src.is_empty() {
                beta_nu.entry(src).or_insert((beta, v));
            }
        }
    }
    let r = |w: &[Sym]| oracle.alphabet().render(w);
    let mut report = ExtensionWitnessReport {
        level: l,
        extension_budget: search_len,
        entries: Vec::with_capacity(table.len()),
        missing_mu_prime: 0,
        missing_beta_nu: 0,
    };
    for (i, mu) in table.members.iter().enumerate() {
        let sig = table.signature(i);
        let p = prime.get(sig);
        let bn = beta_nu.get(sig);
        report.missing_mu_prime += usize::from(p.is_none());
        report.missing_beta_nu += usize::from(bn.is_none());
        report.entries.push(ExtensionWitness {
            mu: r(mu),
            mu_prime: p.map(|w| r(w)),
            beta_nu: bn.map(|(b, nu)| (r(&[*b]), r(nu))),
        });
    }
    Ok(report)
}

// ---------------------------------------------------------------------------
// Word-level conditions over tables

/// `src_l(α, S) = { b : bα ∈ S }` for a signature `S` of level `l + 1`.
pub fn source_signature(alpha: Sym, s: &WordSet) -> WordSet {
    s.iter()
        .filter(|w| w.last() == Some(&alpha))
        .map(|w| w.prefix(w.len() - 1))
        .collect()
}

/// `{ b : bξ ∈ S }` for a word `ξ` of length at most the level of `S`.
pub fn source_signature_word(xi: &[Sym], s: &WordSet) -> WordSet {
    s.iter()
        .filter(|w| w.ends_with(xi))
        .map(|w| w.prefix(w.len() - xi.len()))
        .collect()
}

/// `ι(S)`: the suffixes dropping the first symbol.
pub fn restrict_signature(s: &WordSet) -> WordSet {
    s.iter().map(|w| w.suffix(w.len() - 1)).collect()
}

/// The levels at which two-level conditions are checked: a level needs
/// depth at least its own index above it.
pub fn checked_levels(max_level: usize) -> std::ops::RangeInclusive<usize> {
    0..=max_level / 2
}

/// Synchronizing condition (I): every class `[μ]_l` equals `[γ₁ν]_l =
/// [γ₂ν]_l` for some `ν ∈ 𝒮_{l+K}` and distinct `γ₁, γ₂ ∈ Γ⁻_K(ν)`.
/// Checked on [`checked_levels`].
pub fn check_sync_condition_i(oracle: &dyn Language, tables: &SyncTables) -> Certificate {
    let horizon = Horizon::new(tables.max_word_len, tables.follower_horizon);
    let mut cert = Certificate::new(Property::SyncConditionI, horizon);
    let lmax = tables.max_level();
    let r = |w: &[Sym]| oracle.alphabet().render(w);
    for l in checked_levels(lmax).filter(|&l| l < lmax) {
        // Signatures at level l witnessed by some ν, K.
        let mut witnessed: HashMap<&WordSet, (usize, Word, Word, Word)> = HashMap::new();
        let level_sigs: HashSet<&WordSet> = tables.levels[l].signatures.iter().collect();
        for k in 1..=lmax - l {
            for (nu, s) in tables.levels[l + k].classes() {
                let mut by_sig: HashMap<WordSet, Word> = HashMap::new();
                let gammas: WordSet = s.iter().map(|w| w.suffix(k)).collect();
                for g in gammas.iter() {
                    let sig = source_signature_word(g, s);
                    if let Some(first) = by_sig.get(&sig) {
                        if let Some(key) = level_sigs.get(&sig) {
                            witnessed.entry(key).or_insert((k, nu.clone(), first.clone(), g.clone()));
                        }
                    } else {
                        by_sig.insert(sig, g.clone());
                    }
                }
            }
        }
        for (mu, sig) in tables.levels[l].classes() {
            cert.checked += 1;
            if !witnessed.contains_key(sig) {
                cert.status = Status::Inconclusive;
                cert.failures.push(Failure {
                    subject: format!("level {l}: [{}]", r(&mu)),
                    evidence: Default::default(),
                    inherited_from: None,
                });
            }
        }
    }
    cert
}

/// Synchronized irreducibility: for classes `μ, ν` at level `l` there is
/// `k` such that every `η ∈ 𝒮_{l+k}` with `η ∼_l ν` has some `ξ ∈ 𝓛_k`
/// with `ξη ∼_l μ`. Checked on [`checked_levels`].
pub fn check_synchronized_irreducible(oracle: &dyn Language, tables: &SyncTables) -> Certificate {
    let horizon = Horizon::new(tables.max_word_len, tables.follower_horizon);
    let mut cert = Certificate::new(Property::SynchronizedIrreducible, horizon);
    let lmax = tables.max_level();
    let r = |w: &[Sym]| oracle.alphabet().render(w);
    for l in checked_levels(lmax) {
        let classes = tables.levels[l].classes();
        // For each k: the level-(l+k) classes, their restriction to level l,
        // and the level-l classes reachable by prepending ξ of length k.
        let mut per_k = Vec::new();
        for k in 1..=lmax - l {
            let rows: Vec<(WordSet, HashSet<WordSet>)> = tables.levels[l + k]
                .classes()
                .into_iter()
                .map(|(_, s)| {
                    let mut restricted = s.clone();
                    for _ in 0..k {
                        restricted = restrict_signature(&restricted);
                    }
                    let xis: WordSet = s.iter().map(|w| w.suffix(k)).collect();
                    let reach = xis.iter().map(|xi| source_signature_word(xi, s)).collect();
                    (restricted, reach)
                })
                .collect();
            per_k.push(rows);
        }
        for (mu, smu) in &classes {
            for (nu, snu) in &classes {
                cert.checked += 1;
                let ok = per_k.iter().any(|rows| {
                    let mut etas = rows.iter().filter(|(res, _)| res == *snu).peekable();
                    etas.peek().is_some() && etas.all(|(_, reach)| reach.contains(*smu))
                });
                if !ok {
                    cert.status = Status::Inconclusive;
                    cert.failures.push(Failure {
                        subject: format!("level {l}: [{}] from [{}]", r(mu), r(nu)),
                        evidence: Default::default(),
                        inherited_from: None,
                    });
                }
            }
        }
    }
    cert
}
