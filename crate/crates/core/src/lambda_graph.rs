//! Leveled λ-graph systems built from `Γ⁻_l` signatures.
//!
//! A vertex at level `l` is a signature `Γ⁻_l(μ)` together with a
//! representative `μ`. Edges follow `[αν]_l --α--> [ν]_{l+1}`; the
//! signature of the source is computed from the target alone, and so is
//! `ι`, which drops the first symbol of every word of a signature.
//!
//! Word tables are truncated, so the seeded levels need not be closed under
//! taking sources, `ι`-images and `ι`-preimages. The builder closes them,
//! inserting the missing classes and counting the insertions.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt::Write as _;

use itertools::Itertools;
use serde::Serialize;

use crate::certificate::{evidence, Certificate, Failure, Horizon, Property, Status};
use crate::error::{Error, Result};
use crate::language::{enumerate_language, gamma_minus, Language};
use crate::presentations::sofic::LabeledGraph;
use crate::synchronization::{
    checked_levels, is_l_synchronizing, restrict_signature, source_signature, sync_tables, SyncTables,
};
use crate::word::{Alphabet, Sym, Word, WordSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Origin {
    /// Seeded from a word table.
    Table,
    /// Inserted as the source `[αν]_l` of an edge.
    Source,
    /// Inserted as an `ι`-image.
    Restriction,
    /// Inserted as an `ι`-preimage.
    Lift,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vertex {
    pub representative: Word,
    pub signature: WordSet,
    pub origin: Origin,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VertexLevel {
    pub vertices: Vec<Vertex>,
}

impl VertexLevel {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Edge {
    pub source: usize,
    pub label: Sym,
    pub target: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    LambdaSynchronizing,
    Canonical,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub kind: SystemKind,
    pub oracle: String,
    pub max_level: usize,
    pub max_word_len: usize,
    pub follower_horizon: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_len: Option<usize>,
    /// Table memberships were decided exactly.
    pub exact_tables: bool,
    /// Signatures are not known to have stabilized.
    pub approximate: bool,
    /// Vertices per level seeded from tables.
    pub seeded: Vec<usize>,
    /// Vertices per level inserted by the closure.
    pub inserted: Vec<usize>,
    /// Vertices left without an `ι`-preimage, as `(level, index)`.
    pub unlifted: Vec<(usize, usize)>,
    /// Set after a rebuild at larger horizons.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stable: Option<bool>,
}

/// Levels `0..=L`, edges `E_{l,l+1}` and `ι_{l,l+1}: V_{l+1} → V_l`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LambdaGraphSystem {
    pub alphabet: Alphabet,
    pub levels: Vec<VertexLevel>,
    /// `edges[l]` runs from level `l` to level `l + 1`, sorted.
    pub edges: Vec<Vec<Edge>>,
    /// `iota[l][j]` is the index in level `l` of `ι(v_j^{l+1})`.
    pub iota: Vec<Vec<usize>>,
    pub provenance: Provenance,
}

impl LambdaGraphSystem {
    pub fn max_level(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn vertex_counts(&self) -> Vec<usize> {
        self.levels.iter().map(VertexLevel::len).collect()
    }

    pub fn out_edges(&self, l: usize, i: usize) -> impl Iterator<Item = &Edge> {
        self.edges[l].iter().filter(move |e| e.source == i)
    }

    /// Index of the vertex with signature `s` at level `l`.
    pub fn find(&self, l: usize, s: &WordSet) -> Option<usize> {
        self.levels[l].vertices.iter().position(|v| v.signature == *s)
    }

    /// Structure keyed by signatures, independent of numbering.
    fn shape(&self) -> Shape {
        let sig = |l: usize, i: usize| self.levels[l].vertices[i].signature.clone();
        Shape {
            levels: self
                .levels
                .iter()
                .map(|lv| lv.vertices.iter().map(|v| v.signature.clone()).collect())
                .collect(),
            edges: (0..self.edges.len())
                .map(|l| {
                    self.edges[l]
                        .iter()
                        .map(|e| (sig(l, e.source), e.label, sig(l + 1, e.target)))
                        .collect()
                })
                .collect(),
        }
    }

    /// Whether two systems agree up to renumbering of vertices.
    pub fn isomorphic(&self, other: &LambdaGraphSystem) -> bool {
        self.shape() == other.shape()
    }
}

#[derive(PartialEq, Eq)]
struct Shape {
    levels: Vec<BTreeSet<WordSet>>,
    edges: Vec<BTreeSet<(WordSet, Sym, WordSet)>>,
}

// ---------------------------------------------------------------------------
// Construction

enum Mode {
    Sync { follower_horizon: usize, lift_budget: usize },
    Canonical,
}

struct Builder<'a> {
    oracle: &'a dyn Language,
    mode: Mode,
    levels: Vec<Vec<Vertex>>,
    index: Vec<HashMap<WordSet, usize>>,
    unliftable: Vec<HashSet<usize>>,
}

impl<'a> Builder<'a> {
    fn new(oracle: &'a dyn Language, mode: Mode, max_level: usize) -> Self {
        Builder {
            oracle,
            mode,
            levels: vec![Vec::new(); max_level + 1],
            index: vec![HashMap::new(); max_level + 1],
            unliftable: vec![HashSet::new(); max_level + 1],
        }
    }

    fn insert(&mut self, l: usize, representative: Word, signature: WordSet, origin: Origin) -> bool {
        if self.index[l].contains_key(&signature) {
            return false;
        }
        self.index[l].insert(signature.clone(), self.levels[l].len());
        self.levels[l].push(Vertex {
            representative,
            signature,
            origin,
        });
        true
    }

    // An `ι`-preimage of `(μ, Γ⁻_l(μ))` at level `l + 1`.
    fn lift(&self, l: usize, mu: &Word) -> Result<Option<(Word, WordSet)>> {
        let o = self.oracle;
        match self.mode {
            Mode::Canonical => Ok(Some((mu.clone(), gamma_minus(o, mu, l + 1)?))),
            Mode::Sync {
                follower_horizon,
                lift_budget,
            } => {
                // Right extensions keep Γ⁻_l of an l-synchronizing word.
                let mut keys = HashSet::new();
                let mut layer = vec![mu.clone()];
                for depth in 0..=lift_budget {
                    for w in &layer {
                        o.exactness().check(w.len() + l + 1)?;
                        if is_l_synchronizing(o, w, l + 1, follower_horizon)?.is_yes() {
                            return Ok(Some((w.clone(), gamma_minus(o, w, l + 1)?)));
                        }
                    }
                    if depth == lift_budget {
                        break;
                    }
                    let mut next = Vec::new();
                    for w in &layer {
                        for s in o.alphabet().symbols() {
                            let x = w.concat(&[s]);
                            if !o.admits(&x) {
                                continue;
                            }
                            if let Some(k) = o.syntactic_key(&x) {
                                if !keys.insert(k) {
                                    continue;
                                }
                            }
                            next.push(x);
                        }
                    }
                    next.truncate(LIFT_CAP);
                    layer = next;
                }
                Ok(None)
            }
        }
    }

    fn close(&mut self) -> Result<()> {
        let top = self.levels.len() - 1;
        loop {
            let mut changed = false;
            for l in (0..top).rev() {
                let mut j = 0;
                while j < self.levels[l + 1].len() {
                    let v = self.levels[l + 1][j].clone();
                    changed |= self.insert(
                        l,
                        v.representative.clone(),
                        restrict_signature(&v.signature),
                        Origin::Restriction,
                    );
                    for a in self.oracle.alphabet().symbols() {
                        let src = source_signature(a, &v.signature);
                        if !src.is_empty() {
                            changed |= self.insert(l, v.representative.prepend(a), src, Origin::Source);
                        }
                    }
                    j += 1;
                }
            }
            for l in 0..top {
                let images: HashSet<WordSet> = self.levels[l + 1]
                    .iter()
                    .map(|v| restrict_signature(&v.signature))
                    .collect();
                for i in 0..self.levels[l].len() {
                    if images.contains(&self.levels[l][i].signature) || self.unliftable[l].contains(&i) {
                        continue;
                    }
                    let mu = self.levels[l][i].representative.clone();
                    match self.lift(l, &mu)? {
                        Some((w, s)) => {
                            debug_assert_eq!(restrict_signature(&s), self.levels[l][i].signature);
                            changed |= self.insert(l + 1, w, s, Origin::Lift);
                        }
                        None => {
                            self.unliftable[l].insert(i);
                        }
                    }
                }
            }
            if !changed {
                return Ok(());
            }
        }
    }

    fn finish(self, alphabet: Alphabet, mut provenance: Provenance) -> LambdaGraphSystem {
        // Number vertices by representative.
        let mut levels = Vec::new();
        let mut renumber = Vec::new();
        for lv in &self.levels {
            let mut order: Vec<usize> = (0..lv.len()).collect();
            order.sort_by(|&a, &b| lv[a].representative.cmp(&lv[b].representative));
            let mut map = vec![0; lv.len()];
            for (new, &old) in order.iter().enumerate() {
                map[old] = new;
            }
            levels.push(VertexLevel {
                vertices: order.iter().map(|&i| lv[i].clone()).collect(),
            });
            renumber.push(map);
        }
        let top = levels.len() - 1;
        let mut edges = Vec::with_capacity(top);
        let mut iota = Vec::with_capacity(top);
        for l in 0..top {
            let mut el = Vec::new();
            let mut il = Vec::new();
            for (j, v) in levels[l + 1].vertices.iter().enumerate() {
                for a in alphabet.symbols() {
                    let src = source_signature(a, &v.signature);
                    if let Some(&i) = self.index[l].get(&src) {
                        el.push(Edge {
                            source: renumber[l][i],
                            label: a,
                            target: j,
                        });
                    }
                }
                let image = restrict_signature(&v.signature);
                il.push(self.index[l].get(&image).map_or(usize::MAX, |&i| renumber[l][i]));
            }
            el.sort();
            edges.push(el);
            iota.push(il);
        }
        provenance.seeded = levels
            .iter()
            .map(|lv| lv.vertices.iter().filter(|v| v.origin == Origin::Table).count())
            .collect();
        provenance.inserted = levels
            .iter()
            .map(|lv| lv.vertices.iter().filter(|v| v.origin != Origin::Table).count())
            .collect();
        provenance.unlifted = self
            .unliftable
            .iter()
            .enumerate()
            .flat_map(|(l, s)| { let r = &renumber; s.iter().map(move |&i| (l, r[l][i])) })
            .sorted()
            .collect();
        LambdaGraphSystem {
            alphabet,
            levels,
            edges,
            iota,
            provenance,
        }
    }
}

const LIFT_CAP: usize = 1 << 12;

/// `ℒ^{λ(X)}` over the sync tables of words of length at most
/// `max_word_len`.
pub fn build_lambda_sync_system(
    oracle: &dyn Language,
    max_level: usize,
    max_word_len: usize,
    follower_horizon: usize,
) -> Result<LambdaGraphSystem> {
    let tables = sync_tables(oracle, max_level, max_word_len, follower_horizon)?;
    build_from_tables(oracle, &tables)
}

pub fn build_from_tables(oracle: &dyn Language, tables: &SyncTables) -> Result<LambdaGraphSystem> {
    let max_level = tables.max_level();
    if max_level < 1 {
        return Err(Error::InsufficientLevels {
            needed: 1,
            got: max_level,
        });
    }
    if let Some(t) = tables.levels.iter().find(|t| t.is_empty()) {
        return Err(Error::EmptySyncLevel(t.level));
    }
    let mode = Mode::Sync {
        follower_horizon: tables.follower_horizon,
        lift_budget: tables.max_word_len,
    };
    let mut b = Builder::new(oracle, mode, max_level);
    for t in &tables.levels {
        for (w, s) in t.classes() {
            b.insert(t.level, w, s.clone(), Origin::Table);
        }
    }
    b.close()?;
    let provenance = Provenance {
        kind: SystemKind::LambdaSynchronizing,
        oracle: oracle.name(),
        max_level,
        max_word_len: tables.max_word_len,
        follower_horizon: tables.follower_horizon,
        tail_len: None,
        exact_tables: tables.exact(),
        approximate: !tables.exact(),
        seeded: Vec::new(),
        inserted: Vec::new(),
        unlifted: Vec::new(),
        stable: None,
    };
    Ok(b.finish(oracle.alphabet().clone(), provenance))
}

/// Builds, then rebuilds with both horizons raised by 2 and records
/// whether the two systems are isomorphic.
pub fn build_with_stability_recheck(
    oracle: &dyn Language,
    max_level: usize,
    max_word_len: usize,
    follower_horizon: usize,
) -> Result<LambdaGraphSystem> {
    let mut g = build_lambda_sync_system(oracle, max_level, max_word_len, follower_horizon)?;
    let stable = match build_lambda_sync_system(oracle, max_level, max_word_len + 2, follower_horizon + 2) {
        Ok(h) => g.isomorphic(&h),
        Err(Error::HorizonExceeded { .. }) => false,
        Err(e) => return Err(e),
    };
    g.provenance.stable = Some(stable);
    Ok(g)
}

/// Truncated `ℒ^X`: signatures of the admissible words of length
/// `tail_len`, closed like the λ-synchronizing system.
pub fn build_canonical_system(oracle: &dyn Language, max_level: usize, tail_len: usize) -> Result<LambdaGraphSystem> {
    if tail_len < max_level {
        return Err(Error::InvalidPresentation(format!(
            "tail length {tail_len} is below the level count {max_level}"
        )));
    }
    if max_level < 1 {
        return Err(Error::InsufficientLevels {
            needed: 1,
            got: max_level,
        });
    }
    oracle.exactness().check(2 * max_level + tail_len + 1)?;
    let mut seen = HashSet::new();
    let tails: Vec<Word> = enumerate_language(oracle, tail_len)?
        .into_iter()
        .filter(|w| oracle.syntactic_key(w).is_none_or(|k| seen.insert(k)))
        .collect();
    let mut b = Builder::new(oracle, Mode::Canonical, max_level);
    for l in 0..=max_level {
        for x in &tails {
            b.insert(l, x.clone(), gamma_minus(oracle, x, l)?, Origin::Table);
        }
    }
    b.close()?;
    let provenance = Provenance {
        kind: SystemKind::Canonical,
        oracle: oracle.name(),
        max_level,
        max_word_len: tail_len,
        follower_horizon: 0,
        tail_len: Some(tail_len),
        exact_tables: true,
        approximate: oracle.sofic().is_none(),
        seeded: Vec::new(),
        inserted: Vec::new(),
        unlifted: Vec::new(),
        stable: None,
    };
    Ok(b.finish(oracle.alphabet().clone(), provenance))
}

// ---------------------------------------------------------------------------
// Axioms and structure

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomFailure {
    pub check: &'static str,
    pub level: usize,
    /// Vertex at level `level - 1` (or the offending vertex).
    pub u: usize,
    /// Vertex at level `level + 1`, when the check involves a pair.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub v: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub checked_levels: usize,
    pub failures: Vec<AxiomFailure>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// `ι` surjectivity, label-`ι` compatibility, and the local property.
pub fn verify_axioms(g: &LambdaGraphSystem) -> AxiomReport {
    let mut report = AxiomReport {
        checked_levels: g.levels.len(),
        failures: Vec::new(),
    };
    let name = |a: Sym| Some(g.alphabet.name(a).to_string());
    let top = g.max_level();
    for l in 0..top {
        let mut hit = vec![false; g.levels[l].len()];
        for (j, &i) in g.iota[l].iter().enumerate() {
            match hit.get_mut(i) {
                Some(h) => *h = true,
                None => report.failures.push(AxiomFailure {
                    check: "iota-defined",
                    level: l + 1,
                    u: j,
                    v: None,
                    label: None,
                }),
            }
        }
        for (i, h) in hit.into_iter().enumerate() {
            if !h {
                report.failures.push(AxiomFailure {
                    check: "iota-surjective",
                    level: l,
                    u: i,
                    v: None,
                    label: None,
                });
            }
        }
    }
    for l in 1..top {
        // Labels entering each vertex.
        let incoming = |k: usize| {
            let mut m: HashMap<usize, BTreeSet<Sym>> = HashMap::new();
            for e in &g.edges[k] {
                m.entry(e.target).or_default().insert(e.label);
            }
            m
        };
        let (upper, lower) = (incoming(l), incoming(l - 1));
        let empty = BTreeSet::new();
        for j in 0..g.levels[l + 1].len() {
            let Some(&i) = g.iota[l].get(j).filter(|&&i| i < g.levels[l].len()) else {
                continue;
            };
            let a = upper.get(&j).unwrap_or(&empty);
            let b = lower.get(&i).unwrap_or(&empty);
            for &s in a.symmetric_difference(b) {
                report.failures.push(AxiomFailure {
                    check: "label-iota",
                    level: l + 1,
                    u: j,
                    v: None,
                    label: name(s),
                });
            }
        }
        // E^ι(u, v): edges e ∈ E_{l,l+1} into v with ι(s(e)) = u.
        // E_ι(u, v): edges e ∈ E_{l-1,l} out of u into ι(v).
        let mut up: HashMap<(usize, usize), Vec<Sym>> = HashMap::new();
        for e in &g.edges[l] {
            if let Some(&u) = g.iota[l - 1].get(e.source) {
                up.entry((u, e.target)).or_default().push(e.label);
            }
        }
        let mut down: HashMap<(usize, usize), Vec<Sym>> = HashMap::new();
        let mut by_target: HashMap<usize, Vec<usize>> = HashMap::new();
        for (j, &i) in g.iota[l].iter().enumerate() {
            by_target.entry(i).or_default().push(j);
        }
        for e in &g.edges[l - 1] {
            for &v in by_target.get(&e.target).into_iter().flatten() {
                down.entry((e.source, v)).or_default().push(e.label);
            }
        }
        let keys: BTreeSet<(usize, usize)> = up.keys().chain(down.keys()).copied().collect();
        for key in keys {
            let mut a = up.get(&key).cloned().unwrap_or_default();
            let mut b = down.get(&key).cloned().unwrap_or_default();
            a.sort_unstable();
            b.sort_unstable();
            if a != b {
                let diff: Vec<Sym> = a.iter().chain(&b).copied().filter(|s| a.contains(s) != b.contains(s)).collect();
                report.failures.push(AxiomFailure {
                    check: "local-property",
                    level: l,
                    u: key.0,
                    v: Some(key.1),
                    label: diff.first().and_then(|&s| name(s)).or_else(|| Some("multiplicity".into())),
                });
            }
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PresentsReport {
    pub n: usize,
    pub language_size: usize,
    pub path_labels: usize,
    /// Admissible words no path carries.
    pub missing: Vec<String>,
    /// Path labels that are not admissible.
    pub extra: Vec<String>,
}

impl PresentsReport {
    pub fn passed(&self) -> bool {
        self.missing.is_empty() && self.extra.is_empty()
    }
}

/// Labels of length-`n` paths ending at the top level, as a set.
pub fn path_labels(g: &LambdaGraphSystem, n: usize) -> Result<BTreeSet<Word>> {
    let top = g.max_level();
    if n > top {
        return Err(Error::InsufficientLevels { needed: n, got: top });
    }
    // words[i]: labels of paths from vertex i of the current level to the top.
    let mut words: Vec<BTreeSet<Word>> = vec![BTreeSet::from([Word::empty()]); g.levels[top].len()];
    for l in (top - n..top).rev() {
        let mut next = vec![BTreeSet::new(); g.levels[l].len()];
        for e in &g.edges[l] {
            for w in &words[e.target] {
                next[e.source].insert(w.prepend(e.label));
            }
        }
        words = next;
    }
    Ok(words.into_iter().flatten().collect())
}

pub fn verify_presents(g: &LambdaGraphSystem, oracle: &dyn Language, n: usize) -> Result<PresentsReport> {
    let labels = path_labels(g, n)?;
    let lang: BTreeSet<Word> = enumerate_language(oracle, n)?.into_iter().collect();
    let r = |w: &Word| oracle.alphabet().render(w);
    Ok(PresentsReport {
        n,
        language_size: lang.len(),
        path_labels: labels.len(),
        missing: lang.difference(&labels).map(r).collect(),
        extra: labels.difference(&lang).map(r).collect(),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructuralReport {
    pub left_resolving: bool,
    pub predecessor_separated: bool,
    /// `None` when no canonical system was supplied.
    pub embeds_in_canonical: Option<bool>,
    pub failures: Vec<String>,
}

impl StructuralReport {
    pub fn passed(&self) -> bool {
        self.left_resolving && self.predecessor_separated && self.embeds_in_canonical != Some(false)
    }
}

pub fn structural_checks(g: &LambdaGraphSystem, canonical: Option<&LambdaGraphSystem>) -> StructuralReport {
    let mut failures = Vec::new();
    let mut left_resolving = true;
    for (l, el) in g.edges.iter().enumerate() {
        let mut seen = HashSet::new();
        for e in el {
            if !seen.insert((e.target, e.label)) {
                left_resolving = false;
                failures.push(format!(
                    "level {}: vertex {} has two incoming `{}` edges",
                    l + 1,
                    e.target,
                    g.alphabet.name(e.label)
                ));
            }
        }
    }
    let mut predecessor_separated = true;
    for (l, lv) in g.levels.iter().enumerate() {
        let mut seen = HashMap::new();
        for (i, v) in lv.vertices.iter().enumerate() {
            if let Some(j) = seen.insert(&v.signature, i) {
                predecessor_separated = false;
                failures.push(format!("level {l}: vertices {j} and {i} share a signature"));
            }
        }
    }
    let embeds_in_canonical = canonical.map(|c| {
        let mut ok = true;
        for (l, lv) in g.levels.iter().enumerate().take(c.levels.len()) {
            let sigs: HashSet<&WordSet> = c.levels[l].vertices.iter().map(|v| &v.signature).collect();
            for (i, v) in lv.vertices.iter().enumerate() {
                if !sigs.contains(&v.signature) {
                    ok = false;
                    failures.push(format!("level {l}: vertex {i} has no canonical counterpart"));
                }
            }
        }
        ok
    });
    StructuralReport {
        left_resolving,
        predecessor_separated,
        embeds_in_canonical,
        failures,
    }
}

// ---------------------------------------------------------------------------
// Conditions of the simplicity theorem

fn graph_horizon(g: &LambdaGraphSystem) -> Horizon {
    Horizon::new(g.provenance.max_word_len, g.provenance.follower_horizon)
}

/// λ-condition (I): from every vertex two paths with distinct labels reach a
/// common vertex. Checked on [`checked_levels`] with all remaining depth.
pub fn check_lambda_condition_i(g: &LambdaGraphSystem) -> Certificate {
    let mut cert = Certificate::new(Property::LambdaConditionI, graph_horizon(g));
    let top = g.max_level();
    for l in checked_levels(top).filter(|&l| l < top) {
        for v in 0..g.levels[l].len() {
            cert.checked += 1;
            // Up to two distinct label words per reached vertex.
            let mut reach: HashMap<usize, Vec<Word>> = HashMap::from([(v, vec![Word::empty()])]);
            let mut found = None;
            for d in 1..=top - l {
                let mut next: HashMap<usize, Vec<Word>> = HashMap::new();
                for (&u, ws) in &reach {
                    for e in g.out_edges(l + d - 1, u) {
                        for w in ws {
                            let slot = next.entry(e.target).or_default();
                            let x = w.concat(&[e.label]);
                            if slot.len() < 2 && !slot.contains(&x) {
                                slot.push(x);
                            }
                        }
                    }
                }
                if let Some((t, ws)) = next.iter().filter(|(_, ws)| ws.len() == 2).min_by_key(|(t, _)| **t) {
                    found = Some((d, *t, ws.clone()));
                    break;
                }
                reach = next;
            }
            if found.is_none() {
                cert.status = Status::Inconclusive;
                cert.failures.push(Failure {
                    subject: format!("level {l}: vertex {v}"),
                    evidence: evidence([("depth", (top - l).to_string())]),
                    inherited_from: None,
                });
            }
        }
    }
    cert.notes.push(format!("levels 0..={} checked", top / 2));
    cert
}

/// λ-irreducibility: for vertices `v_i, v_j` at level `l` some depth `d`
/// makes every `ι^d`-preimage of `v_i` reachable from `v_j` in `d` steps.
/// The least such `d` per pair is recorded in the notes.
pub fn check_lambda_irreducible(g: &LambdaGraphSystem) -> Certificate {
    let mut cert = Certificate::new(Property::LambdaIrreducible, graph_horizon(g));
    let top = g.max_level();
    for l in checked_levels(top) {
        let n = g.levels[l].len();
        // preimages[d][i]: vertices at level l+d mapping onto i.
        let mut owner: Vec<usize> = (0..n).collect();
        let mut owners = Vec::new();
        for d in 1..=top - l {
            owner = g.iota[l + d - 1].iter().map(|&k| owner.get(k).copied().unwrap_or(usize::MAX)).collect();
            owners.push(owner.clone());
        }
        let mut table = Vec::new();
        for j in 0..n {
            let mut reach = vec![false; n];
            reach[j] = true;
            let mut depth_of = vec![None; n];
            for d in 1..=top - l {
                let mut next = vec![false; g.levels[l + d].len()];
                for e in &g.edges[l + d - 1] {
                    if reach[e.source] {
                        next[e.target] = true;
                    }
                }
                reach = next;
                let own = &owners[d - 1];
                for (i, slot) in depth_of.iter_mut().enumerate() {
                    if slot.is_none() {
                        let mut pre = (0..own.len()).filter(|&h| own[h] == i).peekable();
                        if pre.peek().is_some() && pre.all(|h| reach[h]) {
                            *slot = Some(d);
                        }
                    }
                }
            }
            for (i, d) in depth_of.iter().enumerate() {
                cert.checked += 1;
                match d {
                    Some(d) => table.push(format!("({i},{j})={d}")),
                    None => {
                        cert.status = Status::Inconclusive;
                        cert.failures.push(Failure {
                            subject: format!("level {l}: v{i} from v{j}"),
                            evidence: Default::default(),
                            inherited_from: None,
                        });
                    }
                }
            }
        }
        cert.notes.push(format!("level {l}: {}", table.join(" ")));
    }
    cert
}

/// Whether levels `l → l + 1` carry the transition structure of `cover`,
/// with `ι_{l,l+1}` a bijection.
pub fn matches_cover(g: &LambdaGraphSystem, cover: &LabeledGraph, l: usize) -> bool {
    let n = cover.num_states();
    if l >= g.max_level() || g.levels[l].len() != n || g.levels[l + 1].len() != n {
        return false;
    }
    let iota = &g.iota[l];
    if iota.iter().copied().collect::<HashSet<_>>().len() != n {
        return false;
    }
    let want: BTreeSet<(usize, Sym, usize)> = cover.edges().iter().copied().collect();
    // φ: vertex at level l -> cover state; level l+1 goes through ι.
    (0..n).permutations(n).any(|phi| {
        let got: BTreeSet<(usize, Sym, usize)> = g.edges[l]
            .iter()
            .map(|e| (phi[e.source], e.label, phi[iota[e.target]]))
            .collect();
        got == want
    })
}

// ---------------------------------------------------------------------------
// Export

#[derive(Serialize)]
struct VertexDoc {
    representative: String,
    signature: Vec<String>,
    origin: Origin,
}

#[derive(Serialize)]
struct SystemDoc<'a> {
    alphabet: &'a [String],
    vertex_counts: Vec<usize>,
    levels: Vec<Vec<VertexDoc>>,
    edges: Vec<Vec<(usize, &'a str, usize)>>,
    iota: &'a [Vec<usize>],
    provenance: &'a Provenance,
}

pub fn to_json(g: &LambdaGraphSystem) -> serde_json::Value {
    let doc = SystemDoc {
        alphabet: g.alphabet.names(),
        vertex_counts: g.vertex_counts(),
        levels: g
            .levels
            .iter()
            .map(|lv| {
                lv.vertices
                    .iter()
                    .map(|v| VertexDoc {
                        representative: g.alphabet.render(&v.representative),
                        signature: v.signature.render(&g.alphabet),
                        origin: v.origin,
                    })
                    .collect()
            })
            .collect(),
        edges: g
            .edges
            .iter()
            .map(|el| el.iter().map(|e| (e.source, g.alphabet.name(e.label), e.target)).collect())
            .collect(),
        iota: &g.iota,
        provenance: &g.provenance,
    };
    serde_json::to_value(doc).expect("serializable")
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// One cluster per level; `ι` as dashed arcs.
pub fn to_dot(g: &LambdaGraphSystem) -> String {
    let mut out = String::from("digraph lambda {\n  rankdir=LR;\n  node [shape=circle];\n");
    for (l, lv) in g.levels.iter().enumerate() {
        let _ = writeln!(out, "  subgraph cluster_{l} {{\n    label=\"V{l}\";");
        for (i, v) in lv.vertices.iter().enumerate() {
            let rep = g.alphabet.render(&v.representative);
            let shown = if rep.is_empty() { "ε".to_string() } else { rep };
            let _ = writeln!(out, "    v{l}_{i} [label=\"{}\"];", dot_escape(&shown));
        }
        out.push_str("  }\n");
    }
    for (l, el) in g.edges.iter().enumerate() {
        for e in el {
            let _ = writeln!(
                out,
                "  v{l}_{} -> v{}_{} [label=\"{}\"];",
                e.source,
                l + 1,
                e.target,
                dot_escape(g.alphabet.name(e.label))
            );
        }
    }
    for (l, il) in g.iota.iter().enumerate() {
        for (j, &i) in il.iter().enumerate() {
            let _ = writeln!(
                out,
                "  v{}_{j} -> v{l}_{i} [style=dashed, arrowhead=empty, constraint=false];",
                l + 1
            );
        }
    }
    out.push_str("}\n");
    out
}

/// Short human-readable summary.
pub fn to_text(g: &LambdaGraphSystem) -> String {
    let mut out = String::new();
    let p = &g.provenance;
    let _ = writeln!(out, "system: {:?} for {}", p.kind, p.oracle);
    let _ = writeln!(
        out,
        "horizons: max_word_len={} follower_horizon={}{}",
        p.max_word_len,
        p.follower_horizon,
        p.tail_len.map(|t| format!(" tail_len={t}")).unwrap_or_default()
    );
    for (l, lv) in g.levels.iter().enumerate() {
        let edges = if l < g.edges.len() { g.edges[l].len() } else { 0 };
        let _ = writeln!(
            out,
            "level {l}: {} vertices ({} inserted), {} edges to next level",
            lv.len(),
            p.inserted.get(l).copied().unwrap_or(0),
            edges
        );
    }
    if let Some(s) = p.stable {
        let _ = writeln!(out, "stable: {s}");
    }
    out
}
