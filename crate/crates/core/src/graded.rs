//! Graded spaces in the shifted presentation, Koszul signs and symmetric powers.
//!
//! Every degree stored here is the degree in `W = V[1]`: Taylor coefficients of
//! an L∞ structure have degree `+1` and Maurer-Cartan elements have degree `0`.

use std::collections::HashMap;
use std::fmt::Debug;
use std::hash::Hash;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::vector::Vector;

/// A (possibly infinite) graded space with a weight filtration, described
/// through its basis keys. `F^p` is spanned by keys of weight `>= p`, and
/// `F^N = 0` for the nilpotency bound `N`.
pub trait GradedBasis {
    type Key: Ord + Clone + Debug + Hash + Send + Sync;

    fn degree(&self, key: &Self::Key) -> i32;
    fn weight(&self, key: &Self::Key) -> u32;
    fn nilpotency(&self) -> u32;

    /// Largest arity `i` for which an `i`-ary continuous map can be non-zero:
    /// `i` inputs of weight `>= 1` land in `F^i`, which vanishes once `i >= N`.
    fn arity_bound(&self) -> usize {
        self.nilpotency().saturating_sub(1) as usize
    }
}

pub type Key<B> = <B as GradedBasis>::Key;

/// An element of a symmetric power, stored as a sparse combination of
/// canonical (sorted) monomials.
pub type SymTensor<K, S> = Vector<Vec<K>, S>;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisElement {
    pub name: String,
    pub degree: i32,
    pub weight: u32,
}

impl BasisElement {
    pub fn new(name: impl Into<String>, degree: i32, weight: u32) -> Self {
        Self { name: name.into(), degree, weight }
    }
}

/// Finite-dimensional graded space with a nilpotent weight filtration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedSpace {
    basis: Vec<BasisElement>,
    nilpotency: u32,
    index: HashMap<String, usize>,
}

impl GradedSpace {
    pub fn new(basis: Vec<BasisElement>, nilpotency: u32) -> Result<Self> {
        if nilpotency == 0 {
            return Err(Error::invalid("nilpotency bound must be positive"));
        }
        let mut index = HashMap::new();
        for (i, b) in basis.iter().enumerate() {
            if b.weight == 0 {
                return Err(Error::invalid(format!("basis element {} has weight 0", b.name)));
            }
            if b.weight >= nilpotency {
                return Err(Error::invalid(format!(
                    "basis element {} has weight {} >= nilpotency bound {}",
                    b.name, b.weight, nilpotency
                )));
            }
            if index.insert(b.name.clone(), i).is_some() {
                return Err(Error::invalid(format!("duplicate basis name {}", b.name)));
            }
        }
        Ok(Self { basis, nilpotency, index })
    }

    pub fn zero() -> Self {
        Self { basis: Vec::new(), nilpotency: 1, index: HashMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[BasisElement] {
        &self.basis
    }

    pub fn element(&self, i: usize) -> &BasisElement {
        &self.basis[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn name(&self, i: usize) -> &str {
        &self.basis[i].name
    }

    /// Indices of basis elements of the given shifted degree.
    pub fn indices_of_degree(&self, degree: i32) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.basis[i].degree == degree).collect()
    }

    pub fn degrees(&self) -> Vec<i32> {
        let mut d: Vec<i32> = self.basis.iter().map(|b| b.degree).collect();
        d.sort_unstable();
        d.dedup();
        d
    }

    /// Degree of a homogeneous element, `None` for zero or inhomogeneous input.
    pub fn degree_of<S: Scalar>(&self, x: &Vector<usize, S>) -> Option<i32> {
        let mut degs = x.keys().map(|&k| self.basis[k].degree);
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    /// Minimal weight over the support; `None` for zero.
    pub fn weight_of<S: Scalar>(&self, x: &Vector<usize, S>) -> Option<u32> {
        x.keys().map(|&k| self.basis[k].weight).min()
    }

    /// Canonical basis of the `i`-th symmetric power, restricted to monomials of
    /// total weight below the nilpotency bound (the others vanish under any
    /// continuous map).
    pub fn symmetric_basis(&self, i: usize) -> Vec<Vec<usize>> {
        symmetric_basis_with(self, i, |m| {
            m.iter().map(|&k| self.basis[k].weight).sum::<u32>() < self.nilpotency
        })
    }

    /// Canonical basis of the `i`-th symmetric power with no weight cut-off.
    pub fn full_symmetric_basis(&self, i: usize) -> Vec<Vec<usize>> {
        symmetric_basis_with(self, i, |_| true)
    }

    pub fn format_vector<S: Scalar>(&self, x: &Vector<usize, S>) -> String {
        if x.is_zero() {
            return "0".into();
        }
        x.iter().map(|(&k, c)| format!("{}*{}", c, self.basis[k].name)).collect::<Vec<_>>().join(" + ")
    }
}

impl GradedBasis for GradedSpace {
    type Key = usize;

    fn degree(&self, key: &usize) -> i32 {
        self.basis[*key].degree
    }

    fn weight(&self, key: &usize) -> u32 {
        self.basis[*key].weight
    }

    fn nilpotency(&self) -> u32 {
        self.nilpotency
    }

    fn arity_bound(&self) -> usize {
        match self.basis.iter().map(|b| b.weight).min() {
            None => 0,
            Some(w) => ((self.nilpotency - 1) / w) as usize,
        }
    }
}

fn symmetric_basis_with<F: Fn(&[usize]) -> bool>(space: &GradedSpace, i: usize, keep: F) -> Vec<Vec<usize>> {
    let n = space.dim();
    let mut out = Vec::new();
    if i == 0 || n == 0 {
        return out;
    }
    let mut cur = Vec::with_capacity(i);
    fn rec<F: Fn(&[usize]) -> bool>(
        space: &GradedSpace,
        start: usize,
        left: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        keep: &F,
    ) {
        if left == 0 {
            if keep(cur) {
                out.push(cur.clone());
            }
            return;
        }
        for k in start..space.dim() {
            let odd = space.basis[k].degree.rem_euclid(2) == 1;
            if odd && cur.last() == Some(&k) {
                continue;
            }
            cur.push(k);
            rec(space, k, left - 1, cur, out, keep);
            cur.pop();
        }
    }
    rec(space, 0, i, &mut cur, &mut out, &keep);
    out
}

#[inline]
pub(crate) fn odd(d: i32) -> bool {
    d.rem_euclid(2) == 1
}

/// Koszul sign `ε(σ)` of reordering homogeneous elements of the given degrees
/// into the sequence `v_{σ(0)}, …, v_{σ(n-1)}`.
pub fn koszul_sign(degrees: &[i32], permutation: &[usize]) -> Result<i32> {
    if degrees.len() != permutation.len() {
        return Err(Error::invalid(format!(
            "permutation of length {} for {} degrees",
            permutation.len(),
            degrees.len()
        )));
    }
    let n = permutation.len();
    let mut seen = vec![false; n];
    for &p in permutation {
        if p >= n || seen[p] {
            return Err(Error::invalid("not a permutation"));
        }
        seen[p] = true;
    }
    Ok(if koszul_parity(degrees, permutation) { -1 } else { 1 })
}

/// Parity of the Koszul sign; `true` means `-1`. Assumes a valid permutation.
pub(crate) fn koszul_parity(degrees: &[i32], permutation: &[usize]) -> bool {
    let mut parity = false;
    for a in 0..permutation.len() {
        for b in a + 1..permutation.len() {
            let (x, y) = (permutation[a], permutation[b]);
            if x > y && odd(degrees[x]) && odd(degrees[y]) {
                parity = !parity;
            }
        }
    }
    parity
}

/// All `(i, j)`-unshuffles of `{0, …, i+j-1}` as output sequences
/// `σ(0), …, σ(i+j-1)` with both blocks increasing.
pub fn unshuffles(i: usize, j: usize) -> Vec<Vec<usize>> {
    let n = i + j;
    let mut out = Vec::new();
    let mut first = Vec::with_capacity(i);
    fn rec(n: usize, i: usize, start: usize, first: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if first.len() == i {
            let mut perm = first.clone();
            perm.extend((0..n).filter(|k| !first.contains(k)));
            out.push(perm);
            return;
        }
        for k in start..n {
            first.push(k);
            rec(n, i, k + 1, first, out);
            first.pop();
        }
    }
    rec(n, i, 0, &mut first, &mut out);
    out
}

/// All permutations of `{0, …, n-1}` in lexicographic order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (1..n).rev().find(|&i| cur[i - 1] < cur[i]) else { break };
        let j = (i..n).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
        cur.swap(i - 1, j);
        cur[i..].reverse();
    }
    out
}

/// Set partitions of `{0, …, n-1}` into exactly `k` non-empty blocks, blocks
/// ordered by their minimal element and each block increasing.
pub fn set_partitions(n: usize, k: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    if k == 0 || k > n {
        return out;
    }
    let mut labels = vec![0usize; n];
    fn rec(pos: usize, used: usize, n: usize, k: usize, labels: &mut Vec<usize>, out: &mut Vec<Vec<Vec<usize>>>) {
        if n - pos < k - used {
            return;
        }
        if pos == n {
            if used == k {
                let mut blocks = vec![Vec::new(); k];
                for (i, &l) in labels.iter().enumerate() {
                    blocks[l].push(i);
                }
                out.push(blocks);
            }
            return;
        }
        for l in 0..used.min(k) {
            labels[pos] = l;
            rec(pos + 1, used, n, k, labels, out);
        }
        if used < k {
            labels[pos] = used;
            rec(pos + 1, used + 1, n, k, labels, out);
        }
    }
    rec(0, 0, n, k, &mut labels, &mut out);
    out
}

/// Sorts a monomial into canonical order, tracking the Koszul sign.
/// Returns `None` when an odd key repeats (the product vanishes).
pub fn canonicalize<B: GradedBasis>(space: &B, mut keys: Vec<B::Key>) -> Option<(Vec<B::Key>, bool)> {
    let mut parity = false;
    for i in 1..keys.len() {
        let mut j = i;
        while j > 0 && keys[j - 1] > keys[j] {
            if odd(space.degree(&keys[j - 1])) && odd(space.degree(&keys[j])) {
                parity = !parity;
            }
            keys.swap(j - 1, j);
            j -= 1;
        }
    }
    for w in keys.windows(2) {
        if w[0] == w[1] && odd(space.degree(&w[0])) {
            return None;
        }
    }
    Some((keys, parity))
}

/// Graded-symmetric product of two canonical monomials.
pub fn merge_monomials<B: GradedBasis>(space: &B, a: &[B::Key], b: &[B::Key]) -> Option<(Vec<B::Key>, bool)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut parity = false;
    // parity of the total odd degree still waiting in `a`
    let mut odd_left = a.iter().filter(|k| odd(space.degree(k))).count() % 2 == 1;
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j == b.len() || (i < a.len() && a[i] <= b[j]);
        if take_a {
            if odd(space.degree(&a[i])) {
                odd_left = !odd_left;
            }
            out.push(a[i].clone());
            i += 1;
        } else {
            if odd_left && odd(space.degree(&b[j])) {
                parity = !parity;
            }
            out.push(b[j].clone());
            j += 1;
        }
    }
    for w in out.windows(2) {
        if w[0] == w[1] && odd(space.degree(&w[0])) {
            return None;
        }
    }
    Some((out, parity))
}

/// `a ⊙ b` for symmetric tensors.
pub fn sym_mul<B: GradedBasis, S: Scalar>(
    space: &B,
    a: &SymTensor<B::Key, S>,
    b: &SymTensor<B::Key, S>,
) -> SymTensor<B::Key, S> {
    let mut out = SymTensor::zero();
    for (ma, ca) in a.iter() {
        for (mb, cb) in b.iter() {
            if let Some((m, parity)) = merge_monomials(space, ma, mb) {
                let c = ca.clone() * cb.clone();
                out.add_term(m, if parity { -c } else { c });
            }
        }
    }
    out
}

/// Embeds a vector as a symmetric tensor of arity one.
pub fn as_sym<K: Ord + Clone, S: Scalar>(x: &Vector<K, S>) -> SymTensor<K, S> {
    x.map_keys(|k| vec![k.clone()])
}

/// `x_1 ⊙ ⋯ ⊙ x_k`.
pub fn sym_product<B: GradedBasis, S: Scalar>(space: &B, xs: &[Vector<B::Key, S>]) -> SymTensor<B::Key, S> {
    let mut acc = SymTensor::term(Vec::new(), S::one());
    for x in xs {
        acc = sym_mul(space, &acc, &as_sym(x));
        if acc.is_zero() {
            break;
        }
    }
    acc
}

/// `x^{⊙i}`.
pub fn sym_power<B: GradedBasis, S: Scalar>(space: &B, x: &Vector<B::Key, S>, i: usize) -> SymTensor<B::Key, S> {
    let xs = as_sym(x);
    let mut acc = SymTensor::term(Vec::new(), S::one());
    for _ in 0..i {
        acc = sym_mul(space, &acc, &xs);
        if acc.is_zero() {
            break;
        }
    }
    acc
}
