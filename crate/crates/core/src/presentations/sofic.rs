//! Labeled-graph (sofic) presentations and the subset machinery over them.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::bitset::StateSet;
use crate::error::{Error, Result};
use crate::language::{Compat, Exactness, Language};
use crate::word::{Alphabet, Sym, Word};

/// A finite directed graph with edges labeled by alphabet symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    alphabet: Alphabet,
    states: Vec<String>,
    edges: Vec<(usize, Sym, usize)>,
    out: Vec<Vec<(Sym, usize)>>,
    inn: Vec<Vec<(Sym, usize)>>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Dir {
    Forward,
    Backward,
}

impl LabeledGraph {
    pub fn new(alphabet: Alphabet, states: Vec<String>, edges: Vec<(usize, Sym, usize)>) -> Result<Self> {
        let n = states.len();
        for &(p, a, q) in &edges {
            if p >= n || q >= n || a as usize >= alphabet.len() {
                return Err(Error::InvalidPresentation(format!(
                    "edge ({p}, {a}, {q}) out of range"
                )));
            }
        }
        let mut edges = edges;
        edges.sort_unstable();
        edges.dedup();
        let mut out = vec![Vec::new(); n];
        let mut inn = vec![Vec::new(); n];
        for &(p, a, q) in &edges {
            out[p].push((a, q));
            inn[q].push((a, p));
        }
        Ok(LabeledGraph {
            alphabet,
            states,
            edges,
            out,
            inn,
        })
    }

    /// Graph with states named `0..n`.
    pub fn from_edges(alphabet: Alphabet, n: usize, edges: Vec<(usize, Sym, usize)>) -> Result<Self> {
        LabeledGraph::new(alphabet, (0..n).map(|i| i.to_string()).collect(), edges)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.states
    }

    pub fn edges(&self) -> &[(usize, Sym, usize)] {
        &self.edges
    }

    pub fn out_edges(&self, p: usize) -> &[(Sym, usize)] {
        &self.out[p]
    }

    pub fn in_edges(&self, q: usize) -> &[(Sym, usize)] {
        &self.inn[q]
    }

    pub fn is_essential(&self) -> bool {
        (0..self.num_states()).all(|p| !self.out[p].is_empty() && !self.inn[p].is_empty())
    }

    /// Removes stranded states until every state has an incoming and an
    /// outgoing edge. The language of bi-infinite paths is unchanged.
    pub fn essential(&self) -> LabeledGraph {
        let n = self.num_states();
        let mut alive = vec![true; n];
        loop {
            let mut changed = false;
            for p in 0..n {
                if !alive[p] {
                    continue;
                }
                let has_out = self.out[p].iter().any(|&(_, q)| alive[q]);
                let has_in = self.inn[p].iter().any(|&(_, q)| alive[q]);
                if !has_out || !has_in {
                    alive[p] = false;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        self.restrict(&alive)
    }

    fn restrict(&self, keep: &[bool]) -> LabeledGraph {
        let mut map = vec![usize::MAX; self.num_states()];
        let mut names = Vec::new();
        for (p, &k) in keep.iter().enumerate() {
            if k {
                map[p] = names.len();
                names.push(self.states[p].clone());
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(p, _, q)| keep[p] && keep[q])
            .map(|&(p, a, q)| (map[p], a, map[q]))
            .collect();
        LabeledGraph::new(self.alphabet.clone(), names, edges).expect("restriction stays in range")
    }

    pub fn is_right_resolving(&self) -> bool {
        self.out.iter().all(|es| distinct_labels(es))
    }

    pub fn is_left_resolving(&self) -> bool {
        self.inn.iter().all(|es| distinct_labels(es))
    }

    /// Same states, every edge reversed.
    pub fn reversed(&self) -> LabeledGraph {
        let edges = self.edges.iter().map(|&(p, a, q)| (q, a, p)).collect();
        LabeledGraph::new(self.alphabet.clone(), self.states.clone(), edges).expect("same ranges")
    }

    pub fn all_states(&self) -> StateSet {
        StateSet::full(self.num_states())
    }

    /// States reached from `s` along an edge labeled `a`.
    pub fn step_forward(&self, s: &StateSet, a: Sym) -> StateSet {
        let mut t = StateSet::empty(self.num_states());
        for p in s.iter() {
            for &(b, q) in &self.out[p] {
                if b == a {
                    t.insert(q);
                }
            }
        }
        t
    }

    /// States from which an edge labeled `a` leads into `s`.
    pub fn step_backward(&self, s: &StateSet, a: Sym) -> StateSet {
        let mut t = StateSet::empty(self.num_states());
        for q in s.iter() {
            for &(b, p) in &self.inn[q] {
                if b == a {
                    t.insert(p);
                }
            }
        }
        t
    }

    fn step(&self, dir: Dir, s: &StateSet, a: Sym) -> StateSet {
        match dir {
            Dir::Forward => self.step_forward(s, a),
            Dir::Backward => self.step_backward(s, a),
        }
    }

    pub fn forward_from(&self, s: &StateSet, w: &[Sym]) -> StateSet {
        w.iter().fold(s.clone(), |acc, &a| self.step_forward(&acc, a))
    }

    pub fn backward_from(&self, s: &StateSet, w: &[Sym]) -> StateSet {
        w.iter().rev().fold(s.clone(), |acc, &a| self.step_backward(&acc, a))
    }

    /// Terminal states of paths labeled `w`.
    pub fn forward_set(&self, w: &[Sym]) -> StateSet {
        self.forward_from(&self.all_states(), w)
    }

    /// Initial states of paths labeled `w`.
    pub fn backward_set(&self, w: &[Sym]) -> StateSet {
        self.backward_from(&self.all_states(), w)
    }

    /// A shortest word in F(x) \ F(y), where F(s) is the set of labels of
    /// paths starting in `s`. `None` means F(x) ⊆ F(y).
    pub fn follower_witness(&self, x: &StateSet, y: &StateSet) -> Option<Word> {
        self.pair_search(Dir::Forward, x, y)
    }

    /// A shortest word in P(x) \ P(y), where P(s) is the set of labels of
    /// paths ending in `s`. `None` means P(x) ⊆ P(y).
    pub fn predecessor_witness(&self, x: &StateSet, y: &StateSet) -> Option<Word> {
        self.pair_search(Dir::Backward, x, y).map(|w| w.reversed())
    }

    // Breadth-first search over pairs of subsets for one still alive on the
    // left and dead on the right. Backward witnesses come out reversed.
    fn pair_search(&self, dir: Dir, x: &StateSet, y: &StateSet) -> Option<Word> {
        if x.is_empty() {
            return None;
        }
        if y.is_empty() {
            return Some(Word::empty());
        }
        let mut seen: HashMap<(StateSet, StateSet), (usize, Sym)> = HashMap::new();
        let mut nodes: Vec<(StateSet, StateSet)> = vec![(x.clone(), y.clone())];
        seen.insert((x.clone(), y.clone()), (usize::MAX, 0));
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            let (sx, sy) = nodes[i].clone();
            for a in self.alphabet.symbols() {
                let nx = self.step(dir, &sx, a);
                if nx.is_empty() {
                    continue;
                }
                let ny = self.step(dir, &sy, a);
                if ny.is_empty() {
                    let mut word = vec![a];
                    let mut j = i;
                    while j != 0 {
                        let (parent, b) = seen[&nodes[j]];
                        word.push(b);
                        j = parent;
                    }
                    word.reverse();
                    return Some(Word(word));
                }
                let key = (nx, ny);
                if !seen.contains_key(&key) {
                    seen.insert(key.clone(), (i, a));
                    nodes.push(key);
                    queue.push_back(nodes.len() - 1);
                }
            }
        }
        None
    }

    /// Strongly connected components (Tarjan), as lists of states.
    pub fn sccs(&self) -> Vec<Vec<usize>> {
        let succ: Vec<Vec<usize>> = self.out.iter().map(|es| es.iter().map(|&(_, q)| q).collect()).collect();
        tarjan(&succ)
    }

    pub fn is_strongly_connected(&self) -> bool {
        self.num_states() > 0 && self.sccs().len() == 1
    }

    /// The left Fischer cover: the minimal left-resolving presentation of
    /// the irreducible sofic shift presented by this graph.
    pub fn left_fischer_cover(&self) -> Result<LabeledGraph> {
        let g = self.essential();
        if !g.is_strongly_connected() {
            return Err(Error::NotIrreducible);
        }
        Ok(g.reversed().right_fischer_cover_irreducible()?.reversed())
    }

    /// The right Fischer cover (minimal right-resolving presentation).
    pub fn right_fischer_cover(&self) -> Result<LabeledGraph> {
        let g = self.essential();
        if !g.is_strongly_connected() {
            return Err(Error::NotIrreducible);
        }
        g.right_fischer_cover_irreducible()
    }

    fn right_fischer_cover_irreducible(&self) -> Result<LabeledGraph> {
        // Subset construction from the full state set, canonical BFS order.
        let k = self.alphabet.len();
        let start = self.all_states();
        let mut index: HashMap<StateSet, usize> = HashMap::new();
        let mut sets = vec![start.clone()];
        index.insert(start, 0);
        let mut trans: Vec<Vec<Option<usize>>> = Vec::new();
        let mut i = 0;
        while i < sets.len() {
            let mut row = vec![None; k];
            for a in self.alphabet.symbols() {
                let t = self.step_forward(&sets[i], a);
                if t.is_empty() {
                    continue;
                }
                let j = *index.entry(t.clone()).or_insert_with(|| {
                    sets.push(t);
                    sets.len() - 1
                });
                row[a as usize] = Some(j);
            }
            trans.push(row);
            i += 1;
        }
        let class = moore_partition(&trans, k);
        let nclass = class.iter().max().map_or(0, |m| m + 1);
        let mut qtrans: Vec<Vec<Option<usize>>> = vec![vec![None; k]; nclass];
        for (s, row) in trans.iter().enumerate() {
            for (a, t) in row.iter().enumerate() {
                qtrans[class[s]][a] = t.map(|t| class[t]);
            }
        }
        let succ: Vec<Vec<usize>> = qtrans.iter().map(|r| r.iter().flatten().copied().collect()).collect();
        let comps = tarjan(&succ);
        let sinks: Vec<&Vec<usize>> = comps
            .iter()
            .filter(|c| {
                c.iter()
                    .all(|&p| succ[p].iter().all(|q| c.contains(q)))
            })
            .collect();
        if sinks.len() != 1 {
            return Err(Error::NotIrreducible);
        }
        let mut members = sinks[0].clone();
        members.sort_unstable();
        let pos: HashMap<usize, usize> = members.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut edges = Vec::new();
        for &c in &members {
            for (a, t) in qtrans[c].iter().enumerate() {
                if let Some(t) = t {
                    edges.push((pos[&c], a as Sym, pos[t]));
                }
            }
        }
        let names = (0..members.len()).map(|i| format!("q{i}")).collect();
        LabeledGraph::new(self.alphabet.clone(), names, edges)
    }

    /// The 2-block presentation: states are edges, and consecutive edges
    /// `e, f` give an edge labeled by the 2-block `λ(e)λ(f)` of `alphabet2`,
    /// looked up through `block_index`.
    pub fn two_block(&self, alphabet2: Alphabet, block_index: &HashMap<(Sym, Sym), Sym>) -> LabeledGraph {
        let g = self.essential();
        let names = g
            .edges
            .iter()
            .map(|&(p, a, q)| format!("{}-{}-{}", g.states[p], g.alphabet.name(a), g.states[q]))
            .collect();
        let mut edges = Vec::new();
        for (i, &(_, a, q)) in g.edges.iter().enumerate() {
            for (j, &(p2, b, _)) in g.edges.iter().enumerate() {
                if p2 == q {
                    if let Some(&s) = block_index.get(&(a, b)) {
                        edges.push((i, s, j));
                    }
                }
            }
        }
        LabeledGraph::new(alphabet2, names, edges).expect("edge indices in range")
    }
}

fn distinct_labels(es: &[(Sym, usize)]) -> bool {
    let mut labels: Vec<Sym> = es.iter().map(|&(a, _)| a).collect();
    labels.sort_unstable();
    labels.windows(2).all(|w| w[0] != w[1])
}

/// Moore refinement of a partial DFA (missing transitions go to a dead
/// state). Returns class indices numbered by first occurrence.
pub(crate) fn moore_partition(trans: &[Vec<Option<usize>>], k: usize) -> Vec<usize> {
    let n = trans.len();
    let mut class = vec![0usize; n];
    let mut count = 1;
    loop {
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut next = vec![0; n];
        for s in 0..n {
            let mut key = Vec::with_capacity(k + 1);
            key.push(class[s]);
            for a in 0..k {
                key.push(trans[s][a].map_or(usize::MAX, |t| class[t]));
            }
            let len = index.len();
            next[s] = *index.entry(key).or_insert(len);
        }
        let new_count = index.len();
        class = next;
        if new_count == count {
            return class;
        }
        count = new_count;
    }
}

/// Tarjan's strongly connected components, iterative.
pub(crate) fn tarjan(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = succ.len();
    let mut index = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut comps = Vec::new();
    let mut counter = 0;
    for root in 0..n {
        if index[root] != usize::MAX {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = counter;
        low[root] = counter;
        counter += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&mut (v, ref mut i)) = call.last_mut() {
            if *i < succ[v].len() {
                let w = succ[v][*i];
                *i += 1;
                if index[w] == usize::MAX {
                    index[w] = counter;
                    low[w] = counter;
                    counter += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
            } else {
                call.pop();
                if let Some(&(u, _)) = call.last() {
                    low[u] = low[u].min(low[v]);
                }
                if low[v] == index[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("nonempty stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    comps.push(comp);
                }
            }
        }
    }
    comps
}

/// Serializable sofic presentation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledGraphPresentation {
    pub alphabet: Vec<String>,
    pub states: Vec<String>,
    /// `(source, label, target)`.
    pub edges: Vec<(String, String, String)>,
    #[serde(default)]
    pub right_resolving: bool,
}

impl LabeledGraphPresentation {
    pub fn to_graph(&self) -> Result<LabeledGraph> {
        let alphabet = Alphabet::new(self.alphabet.clone())?;
        let mut state_index = HashMap::new();
        for (i, s) in self.states.iter().enumerate() {
            if state_index.insert(s.as_str(), i).is_some() {
                return Err(Error::InvalidPresentation(format!("duplicate state `{s}`")));
            }
        }
        let lookup = |s: &str| {
            state_index
                .get(s)
                .copied()
                .ok_or_else(|| Error::InvalidPresentation(format!("unknown state `{s}`")))
        };
        let mut edges = Vec::new();
        for (p, a, q) in &self.edges {
            edges.push((lookup(p)?, alphabet.sym(a)?, lookup(q)?));
        }
        let g = LabeledGraph::new(alphabet, self.states.clone(), edges)?;
        if !g.is_essential() {
            return Err(Error::InvalidPresentation(
                "every state needs an incoming and an outgoing edge".into(),
            ));
        }
        if self.right_resolving && !g.is_right_resolving() {
            return Err(Error::InvalidPresentation(
                "flagged right-resolving but two outgoing edges share a label".into(),
            ));
        }
        Ok(g)
    }

    pub fn from_graph(g: &LabeledGraph) -> Self {
        LabeledGraphPresentation {
            alphabet: g.alphabet.names().to_vec(),
            states: g.states.clone(),
            edges: g
                .edges
                .iter()
                .map(|&(p, a, q)| {
                    (
                        g.states[p].clone(),
                        g.alphabet.name(a).to_string(),
                        g.states[q].clone(),
                    )
                })
                .collect(),
            right_resolving: g.is_right_resolving(),
        }
    }
}

/// The left Fischer cover of an irreducible sofic presentation.
pub fn fischer_cover(p: &LabeledGraphPresentation) -> Result<LabeledGraphPresentation> {
    let g = p.to_graph()?;
    Ok(LabeledGraphPresentation::from_graph(&g.left_fischer_cover()?))
}

/// Exact oracle of the sofic shift presented by a labeled graph.
pub struct SoficOracle {
    graph: LabeledGraph,
    name: String,
}

impl SoficOracle {
    /// The graph is trimmed to its essential part first.
    pub fn new(graph: LabeledGraph, name: impl Into<String>) -> Self {
        SoficOracle {
            graph: graph.essential(),
            name: name.into(),
        }
    }

    pub fn graph(&self) -> &LabeledGraph {
        &self.graph
    }
}

impl Language for SoficOracle {
    fn alphabet(&self) -> &Alphabet {
        self.graph.alphabet()
    }

    fn exactness(&self) -> Exactness {
        Exactness::Exact
    }

    fn admits(&self, w: &[Sym]) -> bool {
        w.is_empty() || !self.graph.forward_set(w).is_empty()
    }

    fn name(&self) -> String {
        self.name.clone()
    }

    fn omega_minus_exact(&self, b: &[Sym], a: &[Sym]) -> Option<Compat> {
        let x = self.graph.forward_set(a);
        let mut ba = b.to_vec();
        ba.extend_from_slice(a);
        let y = self.graph.forward_set(&ba);
        Some(match self.graph.follower_witness(&x, &y) {
            Some(c) => Compat::No(c),
            None => Compat::Yes,
        })
    }

    fn omega_plus_exact(&self, a: &[Sym], b: &[Sym]) -> Option<Compat> {
        let x = self.graph.backward_set(a);
        let mut ab = a.to_vec();
        ab.extend_from_slice(b);
        let y = self.graph.backward_set(&ab);
        Some(match self.graph.predecessor_witness(&x, &y) {
            Some(c) => Compat::No(c),
            None => Compat::Yes,
        })
    }

    fn exact_followers(&self) -> bool {
        true
    }

    fn sofic(&self) -> Option<&LabeledGraph> {
        Some(&self.graph)
    }

    fn syntactic_key(&self, w: &[Sym]) -> Option<Vec<u32>> {
        // The path relation of w determines all of its two-sided contexts.
        let n = self.graph.num_states();
        let mut key = Vec::with_capacity(n * n.div_ceil(32));
        for p in 0..n {
            let t = self.graph.forward_from(&StateSet::singleton(n, p), w);
            let mut chunk = vec![0u32; n.div_ceil(32).max(1)];
            for q in t.iter() {
                chunk[q / 32] |= 1 << (q % 32);
            }
            key.extend(chunk);
        }
        Some(key)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn even_shift() -> LabeledGraph {
        // 0: free state, 1: inside a run of 1s of odd length.
        LabeledGraph::from_edges(Alphabet::numeric(2), 2, vec![(0, 0, 0), (0, 1, 1), (1, 1, 0)]).unwrap()
    }

    fn golden_vertex_shift() -> LabeledGraph {
        LabeledGraph::from_edges(Alphabet::numeric(2), 2, vec![(0, 0, 0), (0, 1, 1), (1, 0, 0)]).unwrap()
    }

    #[test]
    fn essential_trims_stranded_states() {
        let g = LabeledGraph::from_edges(Alphabet::numeric(2), 3, vec![(0, 0, 0), (0, 1, 1), (2, 0, 0)]).unwrap();
        let e = g.essential();
        assert_eq!(e.num_states(), 1);
        assert!(e.is_essential());
    }

    #[test]
    fn even_shift_admissibility() {
        let o = SoficOracle::new(even_shift(), "even");
        let a = o.alphabet().clone();
        assert!(o.admits(&a.parse("0110").unwrap()));
        assert!(o.admits(&a.parse("111").unwrap()));
        assert!(!o.admits(&a.parse("010").unwrap()));
        assert!(!o.admits(&a.parse("01110").unwrap()));
    }

    #[test]
    fn follower_witness_is_a_separating_word() {
        let g = even_shift();
        let x = StateSet::full(2);
        let y = StateSet::singleton(2, 1);
        let c = g.follower_witness(&x, &y).unwrap();
        assert!(!g.forward_from(&x, &c).is_empty());
        assert!(g.forward_from(&y, &c).is_empty());
        assert_eq!(g.follower_witness(&y, &x), None);
    }

    #[test]
    fn fischer_covers() {
        for g in [even_shift(), golden_vertex_shift()] {
            let c = g.left_fischer_cover().unwrap();
            assert_eq!(c.num_states(), 2);
            assert!(c.is_left_resolving());
        }
        let full = LabeledGraph::from_edges(Alphabet::numeric(2), 2, vec![(0, 0, 0), (0, 1, 1), (1, 0, 0), (1, 1, 1)]).unwrap();
        assert_eq!(full.left_fischer_cover().unwrap().num_states(), 1);
    }

    #[test]
    fn reducible_graph_has_no_cover() {
        let g = LabeledGraph::from_edges(Alphabet::numeric(2), 2, vec![(0, 0, 0), (1, 1, 1)]).unwrap();
        assert_eq!(g.left_fischer_cover(), Err(Error::NotIrreducible));
    }

    #[test]
    fn presentation_round_trip_and_validation() {
        let p = LabeledGraphPresentation::from_graph(&even_shift());
        assert_eq!(p.to_graph().unwrap(), even_shift());
        let mut bad = p.clone();
        bad.right_resolving = true;
        bad.edges.push(("0".into(), "0".into(), "1".into()));
        assert!(bad.to_graph().is_err());
    }
}
