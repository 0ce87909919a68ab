//! Exact sparse linear algebra: reduced row echelon forms, ranks, kernels and
//! linear solves over an exact field.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::vector::Vector;

pub type SparseVec<S> = Vector<usize, S>;

/// Incrementally maintained reduced echelon basis of a subspace. Each row
/// carries a tag: the combination of inserted vectors that produced it.
#[derive(Clone, Debug)]
pub struct Echelon<S: Scalar> {
    rows: Vec<(usize, SparseVec<S>, SparseVec<S>)>,
    inserted: usize,
}

impl<S: Scalar> Default for Echelon<S> {
    fn default() -> Self {
        Self { rows: Vec::new(), inserted: 0 }
    }
}

impl<S: Scalar> Echelon<S> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn pivots(&self) -> Vec<usize> {
        self.rows.iter().map(|r| r.0).collect()
    }

    /// Reduces `v` against the rows, returning the residual together with the
    /// tag combination that was subtracted.
    pub fn reduce_tracked(&self, v: &SparseVec<S>) -> (SparseVec<S>, SparseVec<S>) {
        let mut r = v.clone();
        let mut used = SparseVec::zero();
        for (p, row, tag) in &self.rows {
            let c = r.coeff(p);
            if !c.is_zero() {
                r.axpy(&-c.clone(), row);
                used.axpy(&c, tag);
            }
        }
        (r, used)
    }

    pub fn reduce(&self, v: &SparseVec<S>) -> SparseVec<S> {
        self.reduce_tracked(v).0
    }

    pub fn contains(&self, v: &SparseVec<S>) -> bool {
        self.reduce(v).is_zero()
    }

    /// Inserts `v` with tag `e_k`, where `k` counts insertions. Returns
    /// `Err(kernel_vector)` when `v` is dependent on earlier insertions; the
    /// kernel vector expresses the linear relation among inserted vectors.
    pub fn insert(&mut self, v: &SparseVec<S>) -> std::result::Result<(), SparseVec<S>> {
        let k = self.inserted;
        self.inserted += 1;
        let (r, used) = self.reduce_tracked(v);
        let mut tag = SparseVec::basis(k);
        tag.sub_assign(&used);
        let Some((&p, c)) = r.iter().next() else {
            return Err(tag);
        };
        let inv = S::one() / c.clone();
        let row = r.scaled(&inv);
        let tag = tag.scaled(&inv);
        for (_, other, otag) in self.rows.iter_mut() {
            let c = other.coeff(&p);
            if !c.is_zero() {
                other.axpy(&-c.clone(), &row);
                otag.axpy(&-c, &tag);
            }
        }
        let pos = self.rows.partition_point(|r| r.0 < p);
        self.rows.insert(pos, (p, row, tag));
        Ok(())
    }

    /// Expresses `v` as a combination of inserted vectors, if possible.
    pub fn solve(&self, v: &SparseVec<S>) -> Option<SparseVec<S>> {
        let (r, used) = self.reduce_tracked(v);
        r.is_zero().then_some(used)
    }

    pub fn rows(&self) -> impl Iterator<Item = &SparseVec<S>> {
        self.rows.iter().map(|r| &r.1)
    }
}

/// A linear map between finite-dimensional spaces, stored by the images of the
/// source basis vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearMap<S: Scalar> {
    pub source_dim: usize,
    pub target_dim: usize,
    pub columns: Vec<SparseVec<S>>,
}

impl<S: Scalar> LinearMap<S> {
    pub fn new(source_dim: usize, target_dim: usize, columns: Vec<SparseVec<S>>) -> Result<Self> {
        if columns.len() != source_dim {
            return Err(Error::mismatch(format!("{} columns for source dimension {}", columns.len(), source_dim)));
        }
        if columns.iter().any(|c| c.keys().any(|&k| k >= target_dim)) {
            return Err(Error::mismatch("column entry outside target"));
        }
        Ok(Self { source_dim, target_dim, columns })
    }

    pub fn identity(n: usize) -> Self {
        Self { source_dim: n, target_dim: n, columns: (0..n).map(SparseVec::basis).collect() }
    }

    pub fn zero(source_dim: usize, target_dim: usize) -> Self {
        Self { source_dim, target_dim, columns: vec![SparseVec::zero(); source_dim] }
    }

    pub fn from_fn<F: FnMut(usize) -> SparseVec<S>>(source_dim: usize, target_dim: usize, f: F) -> Self {
        Self { source_dim, target_dim, columns: (0..source_dim).map(f).collect() }
    }

    pub fn apply(&self, x: &SparseVec<S>) -> SparseVec<S> {
        x.map_linear(|&k| self.columns[k].clone())
    }

    /// `self ∘ other`
    pub fn compose(&self, other: &LinearMap<S>) -> LinearMap<S> {
        LinearMap {
            source_dim: other.source_dim,
            target_dim: self.target_dim,
            columns: other.columns.iter().map(|c| self.apply(c)).collect(),
        }
    }

    pub fn minus(&self, other: &LinearMap<S>) -> LinearMap<S> {
        LinearMap {
            source_dim: self.source_dim,
            target_dim: self.target_dim,
            columns: self.columns.iter().zip(&other.columns).map(|(a, b)| a.minus(b)).collect(),
        }
    }

    pub fn restrict(&self, indices: &[usize]) -> LinearMap<S> {
        LinearMap {
            source_dim: indices.len(),
            target_dim: self.target_dim,
            columns: indices.iter().map(|&i| self.columns[i].clone()).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.columns.iter().all(|c| c.is_zero())
    }

    pub fn echelon(&self) -> (Echelon<S>, Vec<SparseVec<S>>) {
        image_and_kernel(&self.columns)
    }

    pub fn rank(&self) -> usize {
        self.echelon().0.rank()
    }

    pub fn kernel(&self) -> Vec<SparseVec<S>> {
        self.echelon().1
    }

    /// Some `z` with `self(z) = b`.
    pub fn solve(&self, b: &SparseVec<S>) -> Option<SparseVec<S>> {
        self.echelon().0.solve(b)
    }

    pub fn is_injective(&self) -> bool {
        self.rank() == self.source_dim
    }

    pub fn is_surjective(&self) -> bool {
        self.rank() == self.target_dim
    }
}

/// Reduced echelon basis of the span of `columns` (tags index the columns) and a
/// basis of the relations among them.
pub fn image_and_kernel<S: Scalar>(columns: &[SparseVec<S>]) -> (Echelon<S>, Vec<SparseVec<S>>) {
    let mut e = Echelon::new();
    let mut kernel = Vec::new();
    for c in columns {
        if let Err(rel) = e.insert(c) {
            kernel.push(rel);
        }
    }
    (e, kernel)
}

pub fn rank<S: Scalar>(vectors: &[SparseVec<S>]) -> usize {
    image_and_kernel(vectors).0.rank()
}
