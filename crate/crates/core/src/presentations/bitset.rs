/// Fixed-capacity set of graph states.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateSet {
    blocks: Vec<u64>,
}

impl StateSet {
    pub fn empty(n: usize) -> Self {
        StateSet {
            blocks: vec![0; n.div_ceil(64).max(1)],
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = StateSet::empty(n);
        for i in 0..n {
            s.insert(i);
        }
        s
    }

    pub fn singleton(n: usize, i: usize) -> Self {
        let mut s = StateSet::empty(n);
        s.insert(i);
        s
    }

    pub fn insert(&mut self, i: usize) {
        self.blocks[i / 64] |= 1 << (i % 64);
    }

    pub fn contains(&self, i: usize) -> bool {
        self.blocks[i / 64] & (1 << (i % 64)) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.iter().all(|&b| b == 0)
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_subset(&self, other: &StateSet) -> bool {
        self.blocks
            .iter()
            .zip(&other.blocks)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().enumerate().flat_map(|(k, &b)| {
            (0..64).filter(move |i| b & (1u64 << i) != 0).map(move |i| k * 64 + i)
        })
    }
}

impl std::fmt::Debug for StateSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
