//! Graph inverse semigroups and the shifts defined by non-vanishing
//! products: Dyck, Motzkin, Markov-Dyck, Markov-Motzkin, and shifts of
//! paths labeled in a graph inverse semigroup.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::language::{Compat, Exactness, Language, Oracle};
use crate::word::{Alphabet, Sym, Word};

/// Generator of a graph inverse semigroup.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Gen {
    Minus(usize),
    Idem(usize),
    Plus(usize),
}

impl Gen {
    pub fn star(self) -> Gen {
        match self {
            Gen::Minus(e) => Gen::Plus(e),
            Gen::Plus(e) => Gen::Minus(e),
            Gen::Idem(v) => Gen::Idem(v),
        }
    }
}

/// Nonzero non-unit element `g₁⁺⋯g_k⁺ · P_v · f₁⁻⋯f_m⁻`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NormalForm {
    pub plus: Vec<usize>,
    pub vertex: usize,
    pub minus: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Element {
    Zero,
    One,
    Nf(NormalForm),
}

impl Element {
    pub fn is_zero(&self) -> bool {
        matches!(self, Element::Zero)
    }
}

/// The directed graph `(𝒱, ℰ)` underlying a graph inverse semigroup.
/// Edge `f` runs from `source[f]` to `target[f]`; `f⁻` is read from
/// `s(f)` to `t(f)`, `f⁺` from `t(f)` to `s(f)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InverseGraph {
    pub vertices: Vec<String>,
    pub edge_names: Vec<String>,
    pub source: Vec<usize>,
    pub target: Vec<usize>,
}

impl InverseGraph {
    pub fn new(vertices: Vec<String>, edges: Vec<(String, usize, usize)>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidPresentation("no vertices".into()));
        }
        let mut g = InverseGraph {
            vertices,
            edge_names: Vec::new(),
            source: Vec::new(),
            target: Vec::new(),
        };
        for (name, s, t) in edges {
            if s >= g.vertices.len() || t >= g.vertices.len() {
                return Err(Error::InvalidPresentation(format!("edge `{name}` out of range")));
            }
            g.edge_names.push(name);
            g.source.push(s);
            g.target.push(t);
        }
        if g.edge_names.is_empty() {
            return Err(Error::InvalidPresentation("no edges".into()));
        }
        Ok(g)
    }

    /// One vertex with `n` loops `e1, …, en`.
    pub fn bouquet(n: usize) -> Self {
        let edges = (1..=n).map(|i| (format!("e{i}"), 0, 0)).collect();
        InverseGraph::new(vec!["v".into()], edges).expect("bouquet is valid")
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edge_names.len()
    }

    pub fn is_irreducible(&self) -> bool {
        let succ: Vec<Vec<usize>> = (0..self.num_vertices())
            .map(|v| (0..self.num_edges()).filter(|&e| self.source[e] == v).map(|e| self.target[e]).collect())
            .collect();
        super::sofic::tarjan(&succ).len() == 1
    }

    pub fn gen_name(&self, g: Gen) -> String {
        match g {
            Gen::Minus(e) => format!("{}-", self.edge_names[e]),
            Gen::Plus(e) => format!("{}+", self.edge_names[e]),
            Gen::Idem(_) if self.num_vertices() == 1 => "1".into(),
            Gen::Idem(v) => format!("P_{}", self.vertices[v]),
        }
    }

    pub fn parse_gen(&self, name: &str) -> Result<Gen> {
        let all = (0..self.num_edges())
            .flat_map(|e| [Gen::Minus(e), Gen::Plus(e)])
            .chain((0..self.num_vertices()).map(Gen::Idem));
        for g in all {
            if self.gen_name(g) == name {
                return Ok(g);
            }
        }
        Err(Error::UnknownSymbol(name.into()))
    }

    pub fn element(&self, g: Gen) -> Element {
        Element::Nf(match g {
            Gen::Minus(e) => NormalForm {
                plus: vec![],
                vertex: self.source[e],
                minus: vec![e],
            },
            Gen::Plus(e) => NormalForm {
                plus: vec![e],
                vertex: self.source[e],
                minus: vec![],
            },
            Gen::Idem(v) => NormalForm {
                plus: vec![],
                vertex: v,
                minus: vec![],
            },
        })
    }

    pub fn start(&self, x: &NormalForm) -> usize {
        x.plus.first().map_or(x.vertex, |&g| self.target[g])
    }

    pub fn end(&self, x: &NormalForm) -> usize {
        x.minus.last().map_or(x.vertex, |&f| self.target[f])
    }

    pub fn multiply(&self, x: &Element, y: &Element) -> Element {
        let (x, y) = match (x, y) {
            (Element::Zero, _) | (_, Element::Zero) => return Element::Zero,
            (Element::One, y) => return y.clone(),
            (x, Element::One) => return x.clone(),
            (Element::Nf(x), Element::Nf(y)) => (x, y),
        };
        if self.end(x) != self.start(y) {
            return Element::Zero;
        }
        let mut m = x.minus.len();
        let mut p = 0;
        while m > 0 && p < y.plus.len() {
            if x.minus[m - 1] != y.plus[p] {
                return Element::Zero;
            }
            m -= 1;
            p += 1;
        }
        Element::Nf(if p < y.plus.len() {
            let mut plus = x.plus.clone();
            plus.extend_from_slice(&y.plus[p..]);
            NormalForm {
                plus,
                vertex: y.vertex,
                minus: y.minus.clone(),
            }
        } else {
            let mut minus = x.minus[..m].to_vec();
            minus.extend_from_slice(&y.minus);
            NormalForm {
                plus: x.plus.clone(),
                vertex: x.vertex,
                minus,
            }
        })
    }

    /// Product of a generator word, folded from the left.
    pub fn evaluate(&self, w: &[Gen]) -> Element {
        let mut acc = Element::One;
        for &g in w {
            acc = self.multiply(&acc, &self.element(g));
            if acc.is_zero() {
                break;
            }
        }
        acc
    }

    /// The involution `x ↦ x*`.
    pub fn star(&self, x: &Element) -> Element {
        match x {
            Element::Nf(nf) => Element::Nf(NormalForm {
                plus: nf.minus.iter().rev().copied().collect(),
                vertex: nf.vertex,
                minus: nf.plus.iter().rev().copied().collect(),
            }),
            other => other.clone(),
        }
    }

    pub fn render(&self, x: &Element) -> String {
        match x {
            Element::Zero => "0".into(),
            Element::One => "1".into(),
            Element::Nf(nf) => {
                let mut parts: Vec<String> = nf.plus.iter().map(|&e| self.gen_name(Gen::Plus(e))).collect();
                if nf.plus.is_empty() && nf.minus.is_empty() {
                    parts.push(self.gen_name(Gen::Idem(nf.vertex)));
                }
                parts.extend(nf.minus.iter().map(|&e| self.gen_name(Gen::Minus(e))));
                parts.join(" ")
            }
        }
    }
}

/// Evaluates a word of generator names.
pub fn semigroup_evaluate(g: &InverseGraph, w: &[Gen]) -> Element {
    g.evaluate(w)
}

fn element_key(x: &Element) -> Vec<u32> {
    match x {
        Element::Zero => vec![0],
        Element::One => vec![1],
        Element::Nf(nf) => {
            let mut k = vec![2, nf.vertex as u32, nf.plus.len() as u32];
            k.extend(nf.plus.iter().map(|&e| e as u32));
            k.extend(nf.minus.iter().map(|&e| e as u32));
            k
        }
    }
}

/// Oracle of a Markov-Dyck (or, with idempotent symbols, Markov-Motzkin)
/// shift: a word is admissible iff its product is nonzero.
pub struct MarkovDyckOracle {
    graph: InverseGraph,
    alphabet: Alphabet,
    gens: Vec<Gen>,
    star_sym: Vec<Sym>,
    name: String,
}

impl MarkovDyckOracle {
    pub fn new(graph: InverseGraph, idempotents: bool, name: impl Into<String>) -> Result<Self> {
        if !graph.is_irreducible() {
            return Err(Error::NotIrreducible);
        }
        let mut gens: Vec<Gen> = (0..graph.num_edges()).map(Gen::Minus).collect();
        if idempotents {
            gens.extend((0..graph.num_vertices()).map(Gen::Idem));
        }
        gens.extend((0..graph.num_edges()).map(Gen::Plus));
        let alphabet = Alphabet::new(gens.iter().map(|&g| graph.gen_name(g)))?;
        let pos: HashMap<Gen, Sym> = gens.iter().enumerate().map(|(i, &g)| (g, i as Sym)).collect();
        let star_sym = gens.iter().map(|g| pos[&g.star()]).collect();
        Ok(MarkovDyckOracle {
            graph,
            alphabet,
            gens,
            star_sym,
            name: name.into(),
        })
    }

    pub fn graph(&self) -> &InverseGraph {
        &self.graph
    }

    pub fn gens_of(&self, w: &[Sym]) -> Vec<Gen> {
        w.iter().map(|&s| self.gens[s as usize]).collect()
    }

    pub fn evaluate(&self, w: &[Sym]) -> Element {
        self.graph.evaluate(&self.gens_of(w))
    }

    fn sym(&self, g: Gen) -> Sym {
        self.gens.iter().position(|&h| h == g).expect("generator in alphabet") as Sym
    }

    fn star_word(&self, w: &[Sym]) -> Vec<Sym> {
        w.iter().rev().map(|&s| self.star_sym[s as usize]).collect()
    }

    // Walks plus edges back along `lft`, after cancelling `my`, looking for
    // a branch that `y` accepts and `x` does not.
    fn divergence(&self, lft: &[usize], my: &[usize]) -> Compat {
        let mut c: Vec<Sym> = my.iter().rev().map(|&e| self.sym(Gen::Plus(e))).collect();
        for &expected in lft.iter().rev() {
            let junction = self.graph.target[expected];
            let branch = (0..self.graph.num_edges()).find(|&g| g != expected && self.graph.target[g] == junction);
            if let Some(g) = branch {
                c.push(self.sym(Gen::Plus(g)));
                return Compat::No(Word(c));
            }
            c.push(self.sym(Gen::Plus(expected)));
        }
        Compat::Yes
    }
}

impl Language for MarkovDyckOracle {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn exactness(&self) -> Exactness {
        Exactness::Exact
    }

    fn admits(&self, w: &[Sym]) -> bool {
        !self.evaluate(w).is_zero()
    }

    fn name(&self) -> String {
        self.name.clone()
    }

    fn omega_minus_exact(&self, b: &[Sym], a: &[Sym]) -> Option<Compat> {
        let mut ba = b.to_vec();
        ba.extend_from_slice(a);
        let x = match self.evaluate(&ba) {
            Element::Zero => return Some(Compat::No(Word::empty())),
            Element::One => return Some(Compat::Yes),
            Element::Nf(nf) => nf,
        };
        match self.evaluate(a) {
            Element::Zero => Some(Compat::No(Word::empty())),
            Element::One => {
                let end = self.graph.end(&x);
                for (s, &g) in self.gens.iter().enumerate() {
                    let start = match self.graph.element(g) {
                        Element::Nf(nf) => self.graph.start(&nf),
                        _ => unreachable!("generators are normal forms"),
                    };
                    if start != end {
                        return Some(Compat::No(Word(vec![s as Sym])));
                    }
                }
                Some(self.divergence(&x.minus, &[]))
            }
            Element::Nf(y) => {
                if !x.minus.ends_with(&y.minus) {
                    return None;
                }
                let lft = &x.minus[..x.minus.len() - y.minus.len()];
                Some(self.divergence(lft, &y.minus))
            }
        }
    }

    fn omega_plus_exact(&self, a: &[Sym], b: &[Sym]) -> Option<Compat> {
        let (sa, sb) = (self.star_word(a), self.star_word(b));
        self.omega_minus_exact(&sb, &sa).map(|c| match c {
            Compat::No(w) => Compat::No(Word(self.star_word(&w))),
            other => other,
        })
    }

    fn exact_followers(&self) -> bool {
        true
    }

    fn syntactic_key(&self, w: &[Sym]) -> Option<Vec<u32>> {
        Some(element_key(&self.evaluate(w)))
    }
}

/// Serializable inner graph: vertex names and `(edge name, source, target)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InnerGraphSpec {
    pub vertices: Vec<String>,
    pub edges: Vec<(String, String, String)>,
}

impl InnerGraphSpec {
    pub fn to_graph(&self) -> Result<InverseGraph> {
        let idx = |v: &str| {
            self.vertices
                .iter()
                .position(|x| x == v)
                .ok_or_else(|| Error::InvalidPresentation(format!("unknown vertex `{v}`")))
        };
        let edges = self
            .edges
            .iter()
            .map(|(n, s, t)| Ok((n.clone(), idx(s)?, idx(t)?)))
            .collect::<Result<Vec<_>>>()?;
        InverseGraph::new(self.vertices.clone(), edges)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkovDyckPresentation {
    pub graph: InnerGraphSpec,
    /// Include the idempotents `P_v` as symbols (Markov-Motzkin).
    #[serde(default)]
    pub idempotents: bool,
}

pub fn markov_dyck_oracle(p: &MarkovDyckPresentation) -> Result<Oracle> {
    let name = if p.idempotents { "markov-motzkin" } else { "markov-dyck" };
    Ok(Arc::new(MarkovDyckOracle::new(p.graph.to_graph()?, p.idempotents, name)?))
}

pub fn dyck_oracle(n: usize) -> Result<Oracle> {
    Ok(Arc::new(MarkovDyckOracle::new(InverseGraph::bouquet(n), false, format!("dyck-{n}"))?))
}

pub fn motzkin_oracle(n: usize) -> Result<Oracle> {
    Ok(Arc::new(MarkovDyckOracle::new(InverseGraph::bouquet(n), true, format!("motzkin-{n}"))?))
}

/// An outer edge and its label, a word of inner generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OuterEdge {
    pub name: String,
    pub source: String,
    pub target: String,
    pub label: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemigroupLabeledPresentation {
    pub inner: InnerGraphSpec,
    pub outer_vertices: Vec<String>,
    pub outer_edges: Vec<OuterEdge>,
    /// Inner vertex name to the outer vertices of its block.
    pub partition: BTreeMap<String, Vec<String>>,
}

/// Oracle of the shift of outer paths whose label product is nonzero.
pub struct SemigroupLabeledOracle {
    inner: InverseGraph,
    alphabet: Alphabet,
    source: Vec<usize>,
    target: Vec<usize>,
    labels: Vec<Element>,
}

impl SemigroupLabeledOracle {
    pub fn new(p: &SemigroupLabeledPresentation) -> Result<Self> {
        let inner = p.inner.to_graph()?;
        let nout = p.outer_vertices.len();
        let oidx = |v: &str| {
            p.outer_vertices
                .iter()
                .position(|x| x == v)
                .ok_or_else(|| Error::InvalidPresentation(format!("unknown outer vertex `{v}`")))
        };
        let mut block = vec![usize::MAX; nout];
        for (v, members) in &p.partition {
            let iv = inner
                .vertices
                .iter()
                .position(|x| x == v)
                .ok_or_else(|| Error::InvalidPresentation(format!("unknown inner vertex `{v}`")))?;
            if members.is_empty() {
                return Err(Error::InvalidPresentation(format!("block of `{v}` is empty")));
            }
            for m in members {
                let o = oidx(m)?;
                if block[o] != usize::MAX {
                    return Err(Error::InvalidPresentation(format!("`{m}` lies in two blocks")));
                }
                block[o] = iv;
            }
        }
        if p.partition.len() != inner.num_vertices() || block.contains(&usize::MAX) {
            return Err(Error::InvalidPresentation("blocks do not partition the outer vertices".into()));
        }
        let mut source = Vec::new();
        let mut target = Vec::new();
        let mut labels = Vec::new();
        for e in &p.outer_edges {
            let gens = e.label.iter().map(|g| inner.parse_gen(g)).collect::<Result<Vec<_>>>()?;
            let kind_ok = match gens.as_slice() {
                [Gen::Idem(_)] => true,
                [] => false,
                gs => gs.iter().all(|g| matches!(g, Gen::Minus(_))) || gs.iter().all(|g| matches!(g, Gen::Plus(_))),
            };
            let value = inner.evaluate(&gens);
            if !kind_ok || value.is_zero() {
                return Err(Error::InvalidPresentation(format!("bad label on `{}`", e.name)));
            }
            let (s, t) = (oidx(&e.source)?, oidx(&e.target)?);
            let enter = inner.multiply(&value, &inner.element(Gen::Idem(block[t])));
            let leave = inner.multiply(&inner.element(Gen::Idem(block[s])), &value);
            if enter.is_zero() || leave.is_zero() {
                return Err(Error::InvalidPresentation(format!(
                    "label of `{}` is incompatible with its endpoint blocks",
                    e.name
                )));
            }
            source.push(s);
            target.push(t);
            labels.push(value);
        }
        let alphabet = Alphabet::new(p.outer_edges.iter().map(|e| e.name.clone()))?;
        Ok(SemigroupLabeledOracle {
            inner,
            alphabet,
            source,
            target,
            labels,
        })
    }

    fn value(&self, w: &[Sym]) -> Option<Element> {
        let mut acc = Element::One;
        for (i, &s) in w.iter().enumerate() {
            if i > 0 && self.target[w[i - 1] as usize] != self.source[s as usize] {
                return None;
            }
            acc = self.inner.multiply(&acc, &self.labels[s as usize]);
            if acc.is_zero() {
                return None;
            }
        }
        Some(acc)
    }
}

impl Language for SemigroupLabeledOracle {
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    fn exactness(&self) -> Exactness {
        Exactness::Exact
    }

    fn admits(&self, w: &[Sym]) -> bool {
        self.value(w).is_some()
    }

    fn name(&self) -> String {
        "semigroup-labeled".into()
    }

    fn syntactic_key(&self, w: &[Sym]) -> Option<Vec<u32>> {
        let (Some(&first), Some(&last)) = (w.first(), w.last()) else {
            return Some(vec![u32::MAX]);
        };
        let mut k = vec![self.source[first as usize] as u32, self.target[last as usize] as u32];
        k.extend(element_key(&self.value(w).unwrap_or(Element::Zero)));
        Some(k)
    }
}

pub fn semigroup_labeled_oracle(p: &SemigroupLabeledPresentation) -> Result<Oracle> {
    Ok(Arc::new(SemigroupLabeledOracle::new(p)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::language::{enumerate_language, gamma_minus, left_compat, right_compat};

    fn d2() -> MarkovDyckOracle {
        MarkovDyckOracle::new(InverseGraph::bouquet(2), false, "dyck-2").unwrap()
    }

    #[test]
    fn dyck_relations() {
        let g = InverseGraph::bouquet(2);
        let one = g.evaluate(&[Gen::Minus(0), Gen::Plus(0)]);
        assert_eq!(g.render(&one), "1");
        assert!(g.evaluate(&[Gen::Minus(0), Gen::Plus(1)]).is_zero());
        assert!(!g.evaluate(&[Gen::Plus(0), Gen::Plus(1), Gen::Minus(1), Gen::Minus(0)]).is_zero());
        let m = MarkovDyckOracle::new(InverseGraph::bouquet(2), true, "m2").unwrap();
        let w = m.alphabet().parse("e1- 1 e1+").unwrap();
        assert_eq!(m.evaluate(&w), g.element(Gen::Idem(0)));
    }

    #[test]
    fn dyck_alphabet_order() {
        let m = MarkovDyckOracle::new(InverseGraph::bouquet(2), true, "m2").unwrap();
        assert_eq!(m.alphabet().names(), ["e1-", "e2-", "1", "e1+", "e2+"]);
    }

    #[test]
    fn dyck_gamma_minus_of_plus() {
        let o = d2();
        let a = o.alphabet().clone();
        let got = gamma_minus(&o, &a.parse("e1+").unwrap(), 1).unwrap();
        let names: Vec<String> = got.iter().map(|w| a.render(w)).collect();
        assert_eq!(names, ["e1-", "e1+", "e2+"]);
    }

    #[test]
    fn two_vertex_idempotents_are_orthogonal() {
        let g = InverseGraph::new(
            vec!["u".into(), "w".into()],
            vec![("a".into(), 0, 1), ("b".into(), 1, 0)],
        )
        .unwrap();
        assert!(g.evaluate(&[Gen::Idem(0), Gen::Idem(1)]).is_zero());
        assert!(!g.evaluate(&[Gen::Idem(0), Gen::Minus(0), Gen::Idem(1)]).is_zero());
        assert!(g.evaluate(&[Gen::Idem(1), Gen::Minus(0)]).is_zero());
        assert!(!g.evaluate(&[Gen::Plus(0), Gen::Idem(0)]).is_zero());
    }

    struct NoHook<'a>(&'a MarkovDyckOracle);

    impl Language for NoHook<'_> {
        fn alphabet(&self) -> &Alphabet {
            self.0.alphabet()
        }
        fn exactness(&self) -> Exactness {
            Exactness::Exact
        }
        fn admits(&self, w: &[Sym]) -> bool {
            self.0.admits(w)
        }
        fn name(&self) -> String {
            "no-hook".into()
        }
    }

    #[test]
    fn exact_omega_agrees_with_horizon_search() {
        for o in [d2(), MarkovDyckOracle::new(InverseGraph::bouquet(2), true, "m2").unwrap()] {
            let plain = NoHook(&o);
            let words = [enumerate_language(&o, 1).unwrap(), enumerate_language(&o, 2).unwrap()];
            for a in words.iter().flatten() {
                for b in words.iter().flatten() {
                    let ba = [b.0.clone(), a.0.clone()].concat();
                    if !o.admits(&ba) {
                        continue;
                    }
                    let exact = o.omega_minus_exact(b, a).unwrap();
                    assert_eq!(exact.holds(), left_compat(&plain, b, a, 4).holds(), "b={b:?} a={a:?}");
                    if let Compat::No(c) = exact {
                        let ac = [a.0.clone(), c.0.clone()].concat();
                        let bac = [b.0.clone(), ac.clone()].concat();
                        assert!(o.admits(&ac) && !o.admits(&bac));
                    }
                    let exact_plus = o.omega_plus_exact(b, a).unwrap();
                    assert_eq!(exact_plus.holds(), right_compat(&plain, b, a, 4).holds());
                }
            }
        }
    }

    #[test]
    fn semigroup_labeled_validation() {
        let inner = InnerGraphSpec {
            vertices: vec!["v".into()],
            edges: vec![("e1".into(), "v".into(), "v".into()), ("e2".into(), "v".into(), "v".into())],
        };
        let edge = |n: &str, l: &str| OuterEdge {
            name: n.into(),
            source: "o".into(),
            target: "o".into(),
            label: vec![l.into()],
        };
        let p = SemigroupLabeledPresentation {
            inner,
            outer_vertices: vec!["o".into()],
            outer_edges: vec![edge("a", "e1-"), edge("b", "e2-"), edge("c", "e1+"), edge("d", "e2+")],
            partition: BTreeMap::from([("v".to_string(), vec!["o".to_string()])]),
        };
        let o = semigroup_labeled_oracle(&p).unwrap();
        let d = dyck_oracle(2).unwrap();
        for n in 0..=6 {
            assert_eq!(enumerate_language(o.as_ref(), n).unwrap().len(), enumerate_language(d.as_ref(), n).unwrap().len());
        }
        let mut bad = p.clone();
        bad.partition.clear();
        assert!(semigroup_labeled_oracle(&bad).is_err());
    }
}
