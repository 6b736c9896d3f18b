//! Matrix systems of a λ-graph system and their invariants.
//!
//! All group computations are exact over arbitrary-precision integers.
//! Limits are reported as finite stage sequences with a stabilization flag.

use std::collections::BTreeMap;
use std::fmt;

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::certificate::{Certificate, Status};
use crate::error::{Error, Result};
use crate::lambda_graph::LambdaGraphSystem;
use crate::word::Sym;

// ---------------------------------------------------------------------------
// Integer matrices

#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged matrix");
        IntMatrix {
            rows: r,
            cols: c,
            data: rows.iter().flat_map(|row| row.iter().cloned().map(Into::into)).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut p = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other[(k, j)];
                    if !b.is_zero() {
                        p[(i, j)] += a * b;
                    }
                }
            }
        }
        p
    }

    pub fn sub(&self, other: &IntMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "dimension mismatch");
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }

    /// `[self | other]`.
    pub fn hconcat(&self, other: &IntMatrix) -> Self {
        assert_eq!(self.rows, other.rows, "dimension mismatch");
        let mut m = Self::zeros(self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m[(i, j)] = self[(i, j)].clone();
            }
            for j in 0..other.cols {
                m[(i, self.cols + j)] = other[(i, j)].clone();
            }
        }
        m
    }

    pub fn columns(&self, range: std::ops::Range<usize>) -> Self {
        let mut m = Self::zeros(self.rows, range.len());
        for i in 0..self.rows {
            for (k, j) in range.clone().enumerate() {
                m[(i, k)] = self[(i, j)].clone();
            }
        }
        m
    }

    pub fn first_rows(&self, n: usize) -> Self {
        IntMatrix {
            rows: n,
            cols: self.cols,
            data: self.data[..n * self.cols].to_vec(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    // row[dst] += q * row[src]
    fn add_row(&mut self, dst: usize, src: usize, q: &BigInt) {
        for j in 0..self.cols {
            let v = &self[(src, j)] * q;
            self[(dst, j)] += v;
        }
    }

    fn add_col(&mut self, dst: usize, src: usize, q: &BigInt) {
        for i in 0..self.rows {
            let v = &self[(i, src)] * q;
            self[(i, dst)] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -&self[(i, j)];
            self[(i, j)] = v;
        }
    }
}

impl std::ops::Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries((0..self.rows).map(|i| self.row(i).iter().map(ToString::to_string).collect::<Vec<_>>()))
            .finish()
    }
}

impl Serialize for IntMatrix {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.rows)
            .map(|i| self.row(i).iter().map(ToString::to_string).collect())
            .collect();
        rows.serialize(s)
    }
}

// ---------------------------------------------------------------------------
// Smith normal form

/// `U · A · V = D` with `U`, `V` unimodular and `D` diagonal, its nonzero
/// entries positive and each dividing the next.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
    /// Nonzero diagonal entries of `D`.
    pub invariant_factors: Vec<BigInt>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }
}

pub fn smith_normal_form(a: &IntMatrix) -> SmithForm {
    let (m, n) = (a.rows, a.cols);
    let mut d = a.clone();
    let mut u = IntMatrix::identity(m);
    let mut v = IntMatrix::identity(n);
    let mut t = 0;
    while t < m.min(n) {
        // Smallest nonzero entry of the remaining block as pivot.
        let pivot = (t..m)
            .flat_map(|i| (t..n).map(move |j| (i, j)))
            .filter(|&p| !d[p].is_zero())
            .min_by(|&p, &q| d[p].abs().cmp(&d[q].abs()));
        let Some((pi, pj)) = pivot else {
            break;
        };
        d.swap_rows(t, pi);
        u.swap_rows(t, pi);
        d.swap_cols(t, pj);
        v.swap_cols(t, pj);
        let mut clean = true;
        for i in t + 1..m {
            if !d[(i, t)].is_zero() {
                let q = -d[(i, t)].div_floor(&d[(t, t)]);
                d.add_row(i, t, &q);
                u.add_row(i, t, &q);
                clean &= d[(i, t)].is_zero();
            }
        }
        for j in t + 1..n {
            if !d[(t, j)].is_zero() {
                let q = -d[(t, j)].div_floor(&d[(t, t)]);
                d.add_col(j, t, &q);
                v.add_col(j, t, &q);
                clean &= d[(t, j)].is_zero();
            }
        }
        if !clean {
            continue;
        }
        // Divisibility: fold an offending row into the pivot row.
        let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !d[(i, j)].is_multiple_of(&d[(t, t)])));
        if let Some(i) = bad {
            let one = BigInt::one();
            d.add_row(t, i, &one);
            u.add_row(t, i, &one);
            continue;
        }
        if d[(t, t)].is_negative() {
            d.negate_row(t);
            u.negate_row(t);
        }
        t += 1;
    }
    let invariant_factors = (0..m.min(n)).map(|i| d[(i, i)].clone()).filter(|x| !x.is_zero()).collect();
    SmithForm {
        d,
        u,
        v,
        invariant_factors,
    }
}

/// Determinant by fraction-free elimination.
pub fn determinant(a: &IntMatrix) -> BigInt {
    assert_eq!(a.rows, a.cols, "square matrix required");
    let n = a.rows;
    if n == 0 {
        return BigInt::one();
    }
    let mut m = a.clone();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[(k, k)].is_zero() {
            let Some(p) = (k + 1..n).find(|&i| !m[(i, k)].is_zero()) else {
                return BigInt::zero();
            };
            m.swap_rows(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let x = &m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)];
                m[(i, j)] = x / &prev;
            }
        }
        prev = m[(k, k)].clone();
    }
    sign * &m[(n - 1, n - 1)]
}

// ---------------------------------------------------------------------------
// Finitely generated abelian groups

/// `Z^r ⊕ Z/d₁ ⊕ … ⊕ Z/d_k` with `d₁ | d₂ | …` and every `dᵢ ≥ 2`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AbelianGroup {
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup {
            free_rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn free(rank: usize) -> Self {
        AbelianGroup {
            free_rank: rank,
            torsion: Vec::new(),
        }
    }

    pub fn cyclic(d: impl Into<BigInt>) -> Self {
        let d = d.into().abs();
        if d.is_zero() {
            return Self::free(1);
        }
        AbelianGroup {
            free_rank: 0,
            torsion: if d.is_one() { Vec::new() } else { vec![d] },
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    /// `Z^m / im A` for an `m × n` matrix `A`.
    pub fn cokernel(a: &IntMatrix) -> Self {
        let s = smith_normal_form(a);
        AbelianGroup {
            free_rank: a.rows - s.rank(),
            torsion: s.invariant_factors.into_iter().filter(|d| !d.is_one()).collect(),
        }
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_trivial() {
            return f.write_str("0");
        }
        let mut parts = Vec::new();
        match self.free_rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        parts.extend(self.torsion.iter().map(|d| format!("Z/{d}")));
        f.write_str(&parts.join(" ⊕ "))
    }
}

impl Serialize for AbelianGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Doc {
            free_rank: usize,
            torsion: Vec<String>,
            rendered: String,
        }
        Doc {
            free_rank: self.free_rank,
            torsion: self.torsion.iter().map(ToString::to_string).collect(),
            rendered: self.to_string(),
        }
        .serialize(s)
    }
}

/// Basis of `ker A` as the columns of a saturated matrix.
pub fn kernel_basis(a: &IntMatrix) -> IntMatrix {
    let s = smith_normal_form(a);
    s.v.columns(s.rank()..a.cols)
}

// The map `Z^m / im A → Z^k / im B` induced by `φ` is onto.
fn induced_onto(phi: &IntMatrix, b: &IntMatrix) -> bool {
    let s = smith_normal_form(&phi.hconcat(b));
    s.rank() == phi.rows && s.invariant_factors.iter().all(One::is_one)
}

// `φ` maps the lattice spanned by `k_from` onto the one spanned by `k_to`
// (both saturated, `φ k_from ⊆ span k_to`).
fn lattice_onto(phi: &IntMatrix, k_from: &IntMatrix, k_to: &IntMatrix) -> bool {
    if k_from.cols != k_to.cols {
        return false;
    }
    if k_to.cols == 0 {
        return true;
    }
    let y = phi.mul(k_from);
    let s = smith_normal_form(k_to);
    let t = s.v.mul(&s.u.mul(&y).first_rows(k_to.cols));
    if k_to.mul(&t) != y {
        return false;
    }
    let s = smith_normal_form(&t);
    s.rank() == t.rows && s.invariant_factors.iter().all(One::is_one)
}

// ---------------------------------------------------------------------------
// Matrix systems

/// A formal sum of symbols, as sorted symbols with repetition.
pub type SymbolSum = Vec<Sym>;

#[derive(Clone, Debug)]
pub struct SymbolicMatrixSystem {
    /// `m[l]` is `𝓜_{l,l+1}`, of size `m(l) × m(l+1)`.
    pub m: Vec<Vec<Vec<SymbolSum>>>,
    /// `i[l]` is `I_{l,l+1}`.
    pub i: Vec<IntMatrix>,
}

#[derive(Clone, Debug, Serialize)]
pub struct NonnegativeMatrixSystem {
    pub m: Vec<IntMatrix>,
    pub i: Vec<IntMatrix>,
}

impl NonnegativeMatrixSystem {
    /// Level sizes `m(0), …, m(L)`.
    pub fn sizes(&self) -> Vec<usize> {
        let mut s: Vec<usize> = self.m.iter().map(IntMatrix::rows).collect();
        s.extend(self.m.last().map(IntMatrix::cols));
        s
    }

    pub fn levels(&self) -> usize {
        self.m.len()
    }

    /// A system with the same matrices at every level.
    pub fn constant(m: IntMatrix, i: IntMatrix, levels: usize) -> Self {
        NonnegativeMatrixSystem {
            m: vec![m; levels],
            i: vec![i; levels],
        }
    }
}

fn iota_matrix(g: &LambdaGraphSystem, l: usize) -> IntMatrix {
    let mut i = IntMatrix::zeros(g.levels[l].len(), g.levels[l + 1].len());
    for (j, &k) in g.iota[l].iter().enumerate() {
        if k < i.rows {
            i[(k, j)] = BigInt::one();
        }
    }
    i
}

/// `𝓜` from edge labels and `I` from `ι`; both commutation relations are
/// checked before returning.
pub fn extract_matrix_systems(g: &LambdaGraphSystem) -> Result<(SymbolicMatrixSystem, NonnegativeMatrixSystem)> {
    let top = g.max_level();
    let mut sym = SymbolicMatrixSystem {
        m: Vec::with_capacity(top),
        i: Vec::with_capacity(top),
    };
    let mut num = NonnegativeMatrixSystem {
        m: Vec::with_capacity(top),
        i: Vec::with_capacity(top),
    };
    for l in 0..top {
        let (r, c) = (g.levels[l].len(), g.levels[l + 1].len());
        let mut ms = vec![vec![SymbolSum::new(); c]; r];
        let mut mn = IntMatrix::zeros(r, c);
        for e in &g.edges[l] {
            ms[e.source][e.target].push(e.label);
            mn[(e.source, e.target)] += 1;
        }
        for row in &mut ms {
            for cell in row {
                cell.sort_unstable();
            }
        }
        let i = iota_matrix(g, l);
        for j in 0..c {
            if (0..r).filter(|&k| i[(k, j)].is_one()).count() != 1 {
                return Err(Error::CommutationFailure {
                    level: l,
                    row: 0,
                    col: j,
                    relation: "I column",
                });
            }
        }
        sym.m.push(ms);
        sym.i.push(i.clone());
        num.m.push(mn);
        num.i.push(i);
    }
    check_symbolic_commutation(&sym)?;
    check_commutation(&num)?;
    Ok((sym, num))
}

/// `I_{l,l+1} 𝓜_{l+1,l+2} = 𝓜_{l,l+1} I_{l+1,l+2}` entrywise as multisets.
pub fn check_symbolic_commutation(s: &SymbolicMatrixSystem) -> Result<()> {
    for l in 0..s.m.len().saturating_sub(1) {
        let (i0, i1) = (&s.i[l], &s.i[l + 1]);
        let (m0, m1) = (&s.m[l], &s.m[l + 1]);
        for a in 0..i0.rows {
            for c in 0..i1.cols {
                let mut left: SymbolSum = (0..i0.cols)
                    .filter(|&b| i0[(a, b)].is_one())
                    .flat_map(|b| m1[b][c].iter().copied())
                    .collect();
                let mut right: SymbolSum = (0..i0.cols)
                    .filter(|&b| i1[(b, c)].is_one())
                    .flat_map(|b| m0[a][b].iter().copied())
                    .collect();
                left.sort_unstable();
                right.sort_unstable();
                if left != right {
                    return Err(Error::CommutationFailure {
                        level: l,
                        row: a,
                        col: c,
                        relation: "I M = M I (symbolic)",
                    });
                }
            }
        }
    }
    Ok(())
}

/// `I_{l,l+1} M_{l+1,l+2} = M_{l,l+1} I_{l+1,l+2}`.
pub fn check_commutation(s: &NonnegativeMatrixSystem) -> Result<()> {
    for l in 0..s.m.len().saturating_sub(1) {
        let left = s.i[l].mul(&s.m[l + 1]);
        let right = s.m[l].mul(&s.i[l + 1]);
        if left != right {
            let (row, col) = (0..left.rows)
                .flat_map(|a| (0..left.cols).map(move |c| (a, c)))
                .find(|&p| left[p] != right[p])
                .unwrap_or((0, 0));
            return Err(Error::CommutationFailure {
                level: l,
                row,
                col,
                relation: "I M = M I",
            });
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// K-groups and Bowen-Franks groups

/// Stages of an inductive or projective system of groups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupSequence {
    pub stages: Vec<AbelianGroup>,
    /// `connecting_iso[k]`: the map between stages `k` and `k + 1` is an
    /// isomorphism.
    pub connecting_iso: Vec<bool>,
    /// The last connecting map is an isomorphism.
    pub stabilized: bool,
    /// First stage from which every connecting map is an isomorphism.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stable_from: Option<usize>,
}

impl GroupSequence {
    fn new(stages: Vec<AbelianGroup>, connecting_iso: Vec<bool>) -> Self {
        let stabilized = connecting_iso.last().copied().unwrap_or(false);
        let stable_from = stabilized.then(|| connecting_iso.iter().rposition(|&x| !x).map_or(0, |k| k + 1));
        GroupSequence {
            stages,
            connecting_iso,
            stabilized,
            stable_from,
        }
    }

    /// The limit group, when the sequence has stabilized.
    pub fn stable(&self) -> Option<&AbelianGroup> {
        self.stabilized.then(|| self.stages.last()).flatten()
    }

    pub fn render(&self) -> String {
        match self.stable() {
            Some(g) => g.to_string(),
            None => format!("unstable [{}]", self.stages.iter().join(", ")),
        }
    }
}

fn require_levels(ms: &NonnegativeMatrixSystem) -> Result<()> {
    if ms.levels() < 2 {
        return Err(Error::InsufficientLevels {
            needed: 3,
            got: ms.levels() + 1,
        });
    }
    Ok(())
}

/// `K₀` and `K₁` stages: cokernel and kernel of `Iᵗ − Mᵗ : Z^{m(l)} → Z^{m(l+1)}`
/// with connecting maps `Iᵗ`.
pub fn k_groups(ms: &NonnegativeMatrixSystem) -> Result<(GroupSequence, GroupSequence)> {
    require_levels(ms)?;
    let maps: Vec<IntMatrix> = (0..ms.levels())
        .map(|l| ms.i[l].transpose().sub(&ms.m[l].transpose()))
        .collect();
    let kernels: Vec<IntMatrix> = maps.iter().map(kernel_basis).collect();
    let k0 = maps.iter().map(AbelianGroup::cokernel).collect();
    let k1 = kernels.iter().map(|k| AbelianGroup::free(k.cols)).collect();
    let mut iso0 = Vec::new();
    let mut iso1 = Vec::new();
    for l in 0..maps.len() - 1 {
        let target = ms.i[l + 1].transpose();
        iso0.push(
            AbelianGroup::cokernel(&maps[l]) == AbelianGroup::cokernel(&maps[l + 1]) && induced_onto(&target, &maps[l + 1]),
        );
        iso1.push(lattice_onto(&ms.i[l].transpose(), &kernels[l], &kernels[l + 1]));
    }
    Ok((GroupSequence::new(k0, iso0), GroupSequence::new(k1, iso1)))
}

/// `BF⁰` and `BF¹` stages: cokernel and kernel of `I − M : Z^{m(l+1)} → Z^{m(l)}`
/// with restriction maps `I`.
pub fn bowen_franks(ms: &NonnegativeMatrixSystem) -> Result<(GroupSequence, GroupSequence)> {
    require_levels(ms)?;
    let maps: Vec<IntMatrix> = (0..ms.levels()).map(|l| ms.i[l].sub(&ms.m[l])).collect();
    let kernels: Vec<IntMatrix> = maps.iter().map(kernel_basis).collect();
    let bf0 = maps.iter().map(AbelianGroup::cokernel).collect();
    let bf1 = kernels.iter().map(|k| AbelianGroup::free(k.cols)).collect();
    let mut iso0 = Vec::new();
    let mut iso1 = Vec::new();
    for l in 0..maps.len() - 1 {
        // Stage l+1 restricts to stage l.
        iso0.push(
            AbelianGroup::cokernel(&maps[l]) == AbelianGroup::cokernel(&maps[l + 1]) && induced_onto(&ms.i[l], &maps[l]),
        );
        iso1.push(lattice_onto(&ms.i[l + 1], &kernels[l + 1], &kernels[l]));
    }
    Ok((GroupSequence::new(bf0, iso0), GroupSequence::new(bf1, iso1)))
}

// ---------------------------------------------------------------------------
// Dimension data

#[derive(Clone, Debug, Serialize)]
pub struct DimensionStage {
    pub level: usize,
    /// `m(level)`.
    pub rank: usize,
    /// `Mᵗ_{l,l+1}`, acting `Z^{m(l)} → Z^{m(l+1)}`.
    pub connecting_map: IntMatrix,
    /// Invariant factors of `Mᵗ_{l,l+1} ⋯ Mᵗ_{0,1}`.
    pub accumulated_factors: Vec<String>,
    /// Images of the positive generators `e_v`, `v ∈ V_0`, at this stage.
    pub positive_images: Vec<Vec<String>>,
    /// `δ` coincides with the connecting map here (`M = I`).
    pub delta_is_identity: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DimensionLevelData {
    pub stages: Vec<DimensionStage>,
    /// `Iᵗ_{l+1,l+2} Mᵗ_{l,l+1} = Mᵗ_{l+1,l+2} Iᵗ_{l,l+1}` on recorded levels.
    pub commutes: bool,
}

pub fn dimension_data(ms: &NonnegativeMatrixSystem, k_max: usize) -> Result<DimensionLevelData> {
    if ms.levels() < k_max {
        return Err(Error::InsufficientLevels {
            needed: k_max,
            got: ms.levels(),
        });
    }
    let mut acc = IntMatrix::identity(ms.m[0].rows);
    let mut stages = Vec::with_capacity(k_max);
    for l in 0..k_max {
        let mt = ms.m[l].transpose();
        acc = mt.mul(&acc);
        stages.push(DimensionStage {
            level: l,
            rank: ms.m[l].rows,
            connecting_map: mt,
            accumulated_factors: smith_normal_form(&acc)
                .invariant_factors
                .iter()
                .map(ToString::to_string)
                .collect(),
            positive_images: (0..acc.cols)
                .map(|c| (0..acc.rows).map(|r| acc[(r, c)].to_string()).collect())
                .collect(),
            delta_is_identity: ms.m[l] == ms.i[l],
        });
    }
    let commutes = check_commutation(ms).is_ok();
    Ok(DimensionLevelData { stages, commutes })
}

// ---------------------------------------------------------------------------
// Entropy

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum EntropyKind {
    Lambda,
    Volume,
}

#[derive(Clone, Debug, Serialize)]
pub struct EntropyRow {
    pub level: usize,
    #[serde(serialize_with = "ser_display")]
    pub count: BigInt,
    /// `(1/l) log count`.
    pub mean: f64,
    /// `log(count_l / count_{l-1})`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
}

fn ser_display<S: Serializer, T: fmt::Display>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Clone, Debug, Serialize)]
pub struct EntropyEstimate {
    pub kind: EntropyKind,
    pub rows: Vec<EntropyRow>,
    /// Bound on the floating-point error of each logarithm.
    pub float_error: f64,
    /// Log of the Perron root of the stationary transition matrix, when
    /// the top levels repeat.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub limit: Option<f64>,
}

impl EntropyEstimate {
    fn new(kind: EntropyKind, counts: Vec<BigInt>) -> Self {
        let mut rows = Vec::with_capacity(counts.len());
        for (l, c) in counts.iter().enumerate() {
            let log = ln_big(c);
            rows.push(EntropyRow {
                level: l,
                count: c.clone(),
                mean: if l == 0 { 0.0 } else { log / l as f64 },
                ratio: (l > 0).then(|| log - ln_big(&counts[l - 1])),
            });
        }
        EntropyEstimate {
            kind,
            rows,
            float_error: 1e-12,
            limit: None,
        }
    }

    /// The stationary limit when known, else the ratio estimate at the
    /// deepest level.
    pub fn estimate(&self) -> f64 {
        self.limit
            .or_else(|| self.rows.last().and_then(|r| r.ratio))
            .unwrap_or(0.0)
    }

    pub fn estimate_at(&self, l: usize) -> Option<f64> {
        self.rows.get(l).and_then(|r| r.ratio)
    }
}

/// Natural logarithm of a positive integer of any size.
pub fn ln_big(n: &BigInt) -> f64 {
    if !n.is_positive() {
        return f64::NEG_INFINITY;
    }
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().map_or(f64::NAN, f64::ln);
    }
    let shift = bits - 64;
    let top: BigInt = n >> shift;
    top.to_f64().map_or(f64::NAN, f64::ln) + shift as f64 * std::f64::consts::LN_2
}

/// `|V_l|` and `|P_l|`, the number of paths from `V_0` to `V_l`.
pub fn entropy_estimates(g: &LambdaGraphSystem) -> (EntropyEstimate, EntropyEstimate) {
    let lambda: Vec<BigInt> = g.levels.iter().map(|lv| BigInt::from(lv.len())).collect();
    let mut lambda = EntropyEstimate::new(EntropyKind::Lambda, lambda);
    let mut volume = EntropyEstimate::new(EntropyKind::Volume, path_counts(g));
    if let Some(a) = stationary_matrix(g) {
        lambda.limit = Some(0.0);
        volume.limit = Some(perron_root(&a).ln());
    }
    (lambda, volume)
}

/// The transition matrix on `V_{L-1}` when the last two level steps are
/// the same up to the bijections `ι`.
pub fn stationary_matrix(g: &LambdaGraphSystem) -> Option<Vec<Vec<u64>>> {
    let top = g.max_level();
    if top < 2 {
        return None;
    }
    let n = g.levels[top].len();
    if g.levels[top - 1].len() != n || g.levels[top - 2].len() != n {
        return None;
    }
    let bijective = |l: usize| {
        let mut seen = vec![false; n];
        g.iota[l].iter().all(|&i| i < n && !std::mem::replace(&mut seen[i], true))
    };
    if !bijective(top - 1) || !bijective(top - 2) {
        return None;
    }
    // Edges of step l, with targets moved down to level l by ι.
    let step = |l: usize| {
        let mut a = vec![vec![0u64; n]; n];
        for e in &g.edges[l] {
            a[e.source][g.iota[l][e.target]] += 1;
        }
        a
    };
    let a = step(top - 1);
    // Identify level top-2 with level top-1 through ι as well.
    let mut lifted = vec![vec![0u64; n]; n];
    let down = &g.iota[top - 2];
    let mut up = vec![0; n];
    for (j, &i) in down.iter().enumerate() {
        up[i] = j;
    }
    for e in &g.edges[top - 2] {
        lifted[up[e.source]][e.target] += 1;
    }
    (lifted == a).then_some(a)
}

/// Perron root of a nonnegative matrix by power iteration on `A + I`.
pub fn perron_root(a: &[Vec<u64>]) -> f64 {
    let n = a.len();
    if n == 0 {
        return 0.0;
    }
    let mut x = vec![1.0 / n as f64; n];
    let mut rho = 0.0;
    for _ in 0..100_000 {
        let mut y: Vec<f64> = x.clone();
        for (i, row) in a.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                y[j] += c as f64 * x[i];
            }
        }
        let norm: f64 = y.iter().sum();
        for v in &mut y {
            *v /= norm;
        }
        let done = (norm - 1.0 - rho).abs() <= 1e-15 * norm && x.iter().zip(&y).all(|(p, q)| (p - q).abs() <= 1e-15);
        rho = norm - 1.0;
        x = y;
        if done {
            break;
        }
    }
    rho
}

/// `|P_l|` for `l = 0..=L` by propagating path counts level by level.
pub fn path_counts(g: &LambdaGraphSystem) -> Vec<BigInt> {
    let mut counts = vec![BigInt::one(); g.levels[0].len()];
    let mut out = vec![counts.iter().sum()];
    for (l, el) in g.edges.iter().enumerate() {
        let mut next = vec![BigInt::zero(); g.levels[l + 1].len()];
        for e in el {
            next[e.target] += &counts[e.source];
        }
        counts = next;
        out.push(counts.iter().sum());
    }
    out
}

// ---------------------------------------------------------------------------
// Reports

#[derive(Clone, Debug, Serialize)]
pub struct GroupInvariants {
    pub k0: GroupSequence,
    pub k1: GroupSequence,
    pub bf0: GroupSequence,
    pub bf1: GroupSequence,
}

pub fn group_invariants(ms: &NonnegativeMatrixSystem) -> Result<GroupInvariants> {
    let (k0, k1) = k_groups(ms)?;
    let (bf0, bf1) = bowen_franks(ms)?;
    Ok(GroupInvariants { k0, k1, bf0, bf1 })
}

impl GroupInvariants {
    /// `(name, sequence)` pairs in report order.
    pub fn named(&self) -> [(&'static str, &GroupSequence); 4] {
        [("K0", &self.k0), ("K1", &self.k1), ("BF0", &self.bf0), ("BF1", &self.bf1)]
    }
}

/// Hypotheses of the simplicity theorem and what they imply.
#[derive(Clone, Debug, Serialize)]
pub struct SimplicitySummary {
    pub lambda_synchronizing: Status,
    pub lambda_condition_i: Status,
    pub lambda_irreducible: Status,
    pub hypotheses: Status,
    pub conclusion: String,
}

pub fn simplicity_summary(lambda_sync: &Certificate, condition_i: &Certificate, irreducible: &Certificate) -> SimplicitySummary {
    let parts = [lambda_sync.status, condition_i.status, irreducible.status];
    let hypotheses = if parts.contains(&Status::Refuted) {
        Status::Refuted
    } else if parts.contains(&Status::Inconclusive) {
        Status::Inconclusive
    } else {
        Status::Verified
    };
    let conclusion = match hypotheses {
        Status::Verified => "hypotheses verified at horizon: if they hold in the limit, the associated C*-algebra is simple and purely infinite, with K-groups K0 and K1 as reported",
        Status::Inconclusive => "hypotheses inconclusive at horizon: no conclusion about simplicity",
        Status::Refuted => "a hypothesis is refuted: the simplicity criterion does not apply",
    };
    SimplicitySummary {
        lambda_synchronizing: lambda_sync.status,
        lambda_condition_i: condition_i.status,
        lambda_irreducible: irreducible.status,
        hypotheses,
        conclusion: conclusion.to_string(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct InvariantReport {
    pub oracle: String,
    pub vertex_counts: Vec<usize>,
    pub groups: GroupInvariants,
    pub ext: BTreeMap<String, String>,
    pub dimension: DimensionLevelData,
    pub lambda_entropy: EntropyEstimate,
    pub volume_entropy: EntropyEstimate,
    pub certificates: Vec<Certificate>,
    pub simplicity: SimplicitySummary,
}

/// Bundles the group, dimension and entropy data of `g` with the given
/// condition certificates. `certificates` must hold the λ-synchronization,
/// λ-condition (I) and λ-irreducibility certificates in that order, and may
/// carry more.
pub fn invariant_report(
    label: &str,
    g: &LambdaGraphSystem,
    ms: &NonnegativeMatrixSystem,
    certificates: Vec<Certificate>,
) -> Result<InvariantReport> {
    assert!(certificates.len() >= 3, "three hypothesis certificates required");
    let groups = group_invariants(ms)?;
    let ext = BTreeMap::from([
        ("Ext0 = BF1".to_string(), groups.bf1.render()),
        ("Ext1 = BF0".to_string(), groups.bf0.render()),
    ]);
    let (lambda_entropy, volume_entropy) = entropy_estimates(g);
    let simplicity = simplicity_summary(&certificates[0], &certificates[1], &certificates[2]);
    Ok(InvariantReport {
        oracle: label.to_string(),
        vertex_counts: g.vertex_counts(),
        groups,
        ext,
        dimension: dimension_data(ms, ms.levels())?,
        lambda_entropy,
        volume_entropy,
        certificates,
        simplicity,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn smith_examples() {
        let s = smith_normal_form(&m(&[&[2, 0], &[0, 3]]));
        assert_eq!(s.invariant_factors, vec![BigInt::from(1), BigInt::from(6)]);
        let s = smith_normal_form(&m(&[&[0, -1], &[-1, 1]]));
        assert_eq!(s.invariant_factors, vec![BigInt::from(1), BigInt::from(1)]);
        let s = smith_normal_form(&IntMatrix::identity(3));
        assert_eq!(s.d, IntMatrix::identity(3));
    }

    #[test]
    fn group_rendering() {
        assert_eq!(AbelianGroup::trivial().to_string(), "0");
        assert_eq!(AbelianGroup::cyclic(2).to_string(), "Z/2");
        let g = AbelianGroup {
            free_rank: 2,
            torsion: vec![BigInt::from(2), BigInt::from(4)],
        };
        assert_eq!(g.to_string(), "Z^2 ⊕ Z/2 ⊕ Z/4");
        assert_eq!(AbelianGroup::cokernel(&m(&[&[-2, 0], &[0, -2]])).to_string(), "Z/2 ⊕ Z/2");
    }

    #[test]
    fn determinants() {
        assert_eq!(determinant(&m(&[&[1, 1], &[1, 0]])), BigInt::from(-1));
        assert_eq!(determinant(&m(&[&[0, 1, 2], &[1, 0, 3], &[4, -3, 8]])), BigInt::from(-2));
        assert_eq!(determinant(&m(&[&[1, 2], &[2, 4]])), BigInt::zero());
    }

    #[test]
    fn large_logarithm() {
        let n = BigInt::from(3).pow(2000);
        assert!((ln_big(&n) - 2000.0 * 3f64.ln()).abs() < 1e-6);
    }
}
