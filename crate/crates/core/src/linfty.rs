//! L∞ algebras and morphisms through their Taylor coefficients on the reduced
//! symmetric coalgebra, with the associated curvature, push-forward and
//! Maurer-Cartan calculus.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::graded::{
    as_sym, koszul_parity, set_partitions, sym_mul, sym_power, unshuffles, BasisElement, GradedBasis,
    GradedSpace, Key, SymTensor,
};
use crate::linalg::{Echelon, LinearMap};
use crate::multilinear::MultilinearMap;
use crate::scalar::Scalar;
use crate::vector::Vector;

/// An L∞[1] structure on a graded space, given by its Taylor coefficients on
/// canonical monomials. Implemented both by finite tables and by lazily
/// computed structures such as forms tensored with an algebra.
pub trait LInftyStructure<S: Scalar>: GradedBasis {
    /// `q_{m.len()}(m)` for a canonical monomial `m`.
    fn bracket(&self, m: &[Self::Key]) -> Vector<Self::Key, S>;
}

/// An L∞ morphism given by its Taylor coefficients `f_i`.
pub trait TaylorMap<S: Scalar> {
    type Source: LInftyStructure<S>;
    type Target: LInftyStructure<S>;

    fn source(&self) -> &Self::Source;
    fn target(&self) -> &Self::Target;
    /// `f_{m.len()}(m)` for a canonical monomial `m` of the source.
    fn coefficient(&self, m: &[Key<Self::Source>]) -> Vector<Key<Self::Target>, S>;
}

/// Outcome of an exhaustive identity check, one item per arity or identity.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CheckReport {
    pub items: Vec<CheckItem>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckItem {
    pub label: String,
    pub checked: usize,
    pub failure: Option<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.failure.is_none())
    }

    pub fn first_failure(&self) -> Option<&CheckItem> {
        self.items.iter().find(|i| i.failure.is_some())
    }

    pub fn push(&mut self, label: impl Into<String>, checked: usize, failure: Option<String>) {
        self.items.push(CheckItem { label: label.into(), checked, failure });
    }

    pub fn merge(&mut self, other: CheckReport) {
        self.items.extend(other.items);
    }

    pub fn into_result(self) -> Result<CheckReport> {
        match self.first_failure() {
            Some(item) => Err(Error::check(format!("{}: {}", item.label, item.failure.clone().unwrap_or_default()))),
            None => Ok(self),
        }
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for item in &self.items {
            match &item.failure {
                None => writeln!(f, "{}: ok ({} cases)", item.label, item.checked)?,
                Some(msg) => writeln!(f, "{}: FAILED {}", item.label, msg)?,
            }
        }
        Ok(())
    }
}

fn monomial_degrees<B: GradedBasis>(space: &B, m: &[B::Key]) -> Vec<i32> {
    m.iter().map(|k| space.degree(k)).collect()
}

/// `Σ q_{|m|}(m)` over the monomials of `t`.
pub fn bracket_sym<S: Scalar, L: LInftyStructure<S>>(l: &L, t: &SymTensor<L::Key, S>) -> Vector<L::Key, S> {
    let mut out = Vector::zero();
    for (m, c) in t.iter() {
        if !m.is_empty() && m.len() <= l.arity_bound() {
            out.axpy(c, &l.bracket(m));
        }
    }
    out
}

/// `q_k(x_1, …, x_k)`.
pub fn bracket_args<S: Scalar, L: LInftyStructure<S>>(l: &L, args: &[Vector<L::Key, S>]) -> Vector<L::Key, S> {
    if args.len() > l.arity_bound() {
        return Vector::zero();
    }
    let mut acc = SymTensor::term(Vec::new(), S::one());
    for x in args {
        acc = sym_mul(l, &acc, &as_sym(x));
    }
    bracket_sym(l, &acc)
}

/// `Q^k_i(m)`: the component of the coderivation from `W^{⊙i}` to `W^{⊙k}`.
pub fn coderivation_component<S: Scalar, L: LInftyStructure<S>>(l: &L, m: &[L::Key], k: usize) -> SymTensor<L::Key, S> {
    let i = m.len();
    let mut out = SymTensor::zero();
    if k == 0 || k > i {
        return out;
    }
    let j = i - k + 1;
    if j > l.arity_bound() {
        return out;
    }
    let degs = monomial_degrees(l, m);
    for sigma in unshuffles(j, i - j) {
        let block: Vec<L::Key> = sigma[..j].iter().map(|&p| m[p].clone()).collect();
        let q = l.bracket(&block);
        if q.is_zero() {
            continue;
        }
        let rest: Vec<L::Key> = sigma[j..].iter().map(|&p| m[p].clone()).collect();
        let sign = if koszul_parity(&degs, &sigma) { -S::one() } else { S::one() };
        let term = sym_mul(l, &as_sym(&q), &SymTensor::term(rest, sign));
        out.add_assign(&term);
    }
    out
}

/// The coderivation `Q` applied to an element of the reduced symmetric coalgebra.
pub fn apply_coderivation<S: Scalar, L: LInftyStructure<S>>(l: &L, t: &SymTensor<L::Key, S>) -> SymTensor<L::Key, S> {
    let mut out = SymTensor::zero();
    for (m, c) in t.iter() {
        for k in 1..=m.len() {
            out.axpy(c, &coderivation_component(l, m, k));
        }
    }
    out
}

fn check_degree_zero<B: GradedBasis, S: Scalar>(space: &B, x: &Vector<B::Key, S>) -> Result<()> {
    for k in x.keys() {
        let d = space.degree(k);
        if d != 0 {
            return Err(Error::Degree { expected: 0, found: d });
        }
    }
    Ok(())
}

/// `R(x) = Σ_{i≥1} q_i(x^{⊙i}) / i!` for `x` of degree zero.
pub fn curvature<S: Scalar, L: LInftyStructure<S>>(l: &L, x: &Vector<L::Key, S>) -> Result<Vector<L::Key, S>> {
    check_degree_zero(l, x)?;
    let mut out = Vector::zero();
    for i in 1..=l.arity_bound() {
        let p = sym_power(l, x, i);
        if p.is_zero() {
            break;
        }
        out.axpy(&S::inv_factorial(i), &bracket_sym(l, &p));
    }
    Ok(out)
}

pub fn is_mc<S: Scalar, L: LInftyStructure<S>>(l: &L, x: &Vector<L::Key, S>) -> bool {
    matches!(curvature(l, x), Ok(r) if r.is_zero())
}

/// Checks that the corestriction of `Q∘Q` vanishes on the given monomials.
pub fn check_linfty_on<S: Scalar, L: LInftyStructure<S>>(l: &L, monomials: &[Vec<L::Key>]) -> CheckReport {
    let mut by_arity: BTreeMap<usize, (usize, Option<String>)> = BTreeMap::new();
    for m in monomials {
        let n = m.len();
        let entry = by_arity.entry(n).or_insert((0, None));
        entry.0 += 1;
        if entry.1.is_some() {
            continue;
        }
        let mut total = Vector::zero();
        for k in 1..=n {
            total.add_assign(&bracket_sym(l, &coderivation_component(l, m, k)));
        }
        if !total.is_zero() {
            entry.1 = Some(format!("on {:?}: {:?}", m, total));
        }
    }
    let mut report = CheckReport::default();
    for (n, (checked, failure)) in by_arity {
        report.push(format!("arity {n}"), checked, failure);
    }
    report
}

/// Sum over set partitions of `m` into `k` blocks of the graded-symmetric
/// products of `coeff` applied to the blocks, with Koszul signs. This is the
/// component `F^k_i` of a coalgebra morphism with Taylor coefficients `coeff`.
pub(crate) fn partition_component<S, A, B, F>(source: &A, target: &B, m: &[A::Key], k: usize, mut coeff: F) -> SymTensor<B::Key, S>
where
    S: Scalar,
    A: GradedBasis,
    B: GradedBasis,
    F: FnMut(&[A::Key]) -> Vector<B::Key, S>,
{
    let degs: Vec<i32> = m.iter().map(|x| source.degree(x)).collect();
    let mut out = SymTensor::zero();
    for blocks in set_partitions(m.len(), k) {
        let perm: Vec<usize> = blocks.iter().flatten().copied().collect();
        let mut acc = SymTensor::term(Vec::new(), S::sign(koszul_parity(&degs, &perm)));
        for b in &blocks {
            let keys: Vec<A::Key> = b.iter().map(|&p| m[p].clone()).collect();
            acc = sym_mul(target, &acc, &as_sym(&coeff(&keys)));
            if acc.is_zero() {
                break;
            }
        }
        out.add_assign(&acc);
    }
    out
}

/// `F^k_i(m)`: the component of the coalgebra morphism from `W^{⊙i}` to `V^{⊙k}`.
pub fn morphism_component<S: Scalar, F: TaylorMap<S>>(
    f: &F,
    m: &[Key<F::Source>],
    k: usize,
) -> SymTensor<Key<F::Target>, S> {
    partition_component(f.source(), f.target(), m, k, |b| f.coefficient(b))
}

/// The coalgebra morphism `F` applied to an element of the reduced symmetric coalgebra.
pub fn apply_morphism<S: Scalar, F: TaylorMap<S>>(
    f: &F,
    t: &SymTensor<Key<F::Source>, S>,
) -> SymTensor<Key<F::Target>, S> {
    let mut out = SymTensor::zero();
    for (m, c) in t.iter() {
        for k in 1..=m.len() {
            out.axpy(c, &morphism_component(f, m, k));
        }
    }
    out
}

/// `Σ f_{|m|}(m)` over the monomials of `t`.
pub fn taylor_sym<S: Scalar, F: TaylorMap<S>>(f: &F, t: &SymTensor<Key<F::Source>, S>) -> Vector<Key<F::Target>, S> {
    let mut out = Vector::zero();
    for (m, c) in t.iter() {
        if !m.is_empty() {
            out.axpy(c, &f.coefficient(m));
        }
    }
    out
}

/// `F_*(x) = Σ_{i≥1} f_i(x^{⊙i}) / i!`.
pub fn pushforward<S: Scalar, F: TaylorMap<S>>(f: &F, x: &Vector<Key<F::Source>, S>) -> Vector<Key<F::Target>, S> {
    let mut out = Vector::zero();
    for i in 1..=f.source().arity_bound().max(1) {
        let p = sym_power(f.source(), x, i);
        if p.is_zero() {
            break;
        }
        out.axpy(&S::inv_factorial(i), &taylor_sym(f, &p));
    }
    out
}

/// Checks that the corestriction of `F∘R − Q∘F` vanishes on the given monomials.
pub fn check_morphism_on<S: Scalar, F: TaylorMap<S>>(f: &F, monomials: &[Vec<Key<F::Source>>]) -> CheckReport {
    let mut by_arity: BTreeMap<usize, (usize, Option<String>)> = BTreeMap::new();
    for m in monomials {
        let n = m.len();
        let entry = by_arity.entry(n).or_insert((0, None));
        entry.0 += 1;
        if entry.1.is_some() {
            continue;
        }
        let mut total = Vector::zero();
        for k in 1..=n {
            total.add_assign(&taylor_sym(f, &coderivation_component(f.source(), m, k)));
            total.sub_assign(&bracket_sym(f.target(), &morphism_component(f, m, k)));
        }
        if !total.is_zero() {
            entry.1 = Some(format!("on {:?}: {:?}", m, total));
        }
    }
    let mut report = CheckReport::default();
    for (n, (checked, failure)) in by_arity {
        report.push(format!("arity {n}"), checked, failure);
    }
    report
}

/// Finite-dimensional L∞ algebra in the shifted presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LInftyAlgebra<S: Scalar> {
    space: GradedSpace,
    taylor: Vec<MultilinearMap<S>>,
}

impl<S: Scalar> LInftyAlgebra<S> {
    /// `taylor[i]` is `q_{i+1}`. Coefficients beyond the arity bound must vanish.
    pub fn new(space: GradedSpace, taylor: Vec<MultilinearMap<S>>) -> Result<Self> {
        let bound = space.arity_bound();
        for (i, q) in taylor.iter().enumerate() {
            if q.arity != i + 1 {
                return Err(Error::mismatch(format!("coefficient {} has arity {}", i + 1, q.arity)));
            }
            if q.degree != 1 {
                return Err(Error::Degree { expected: 1, found: q.degree });
            }
            if i + 1 > bound && !q.is_zero() {
                return Err(Error::invalid(format!("q_{} is forced to vanish by weights", i + 1)));
            }
        }
        let mut taylor = taylor;
        taylor.truncate(bound);
        while taylor.len() < bound {
            taylor.push(MultilinearMap::zero(taylor.len() + 1, 1));
        }
        Ok(Self { space, taylor })
    }

    pub fn abelian(space: GradedSpace, differential: &LinearMap<S>) -> Result<Self> {
        let q1 = MultilinearMap::new(
            &space,
            &space,
            1,
            1,
            (0..space.dim()).map(|i| (vec![i], differential.columns[i].clone())),
        )?;
        Self::new(space, vec![q1])
    }

    pub fn zero_algebra() -> Self {
        Self { space: GradedSpace::zero(), taylor: Vec::new() }
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// `q_i`; the zero map beyond the arity bound.
    pub fn q(&self, i: usize) -> MultilinearMap<S> {
        self.taylor.get(i.wrapping_sub(1)).cloned().unwrap_or_else(|| MultilinearMap::zero(i, 1))
    }

    pub fn taylor(&self) -> &[MultilinearMap<S>] {
        &self.taylor
    }

    pub fn differential(&self) -> LinearMap<S> {
        let q1 = self.q(1);
        LinearMap::from_fn(self.dim(), self.dim(), |i| q1.on_monomial(&[i]))
    }

    pub fn is_abelian(&self) -> bool {
        self.taylor.iter().skip(1).all(|q| q.is_zero())
    }

    /// All canonical monomials that can carry a non-zero value, up to the arity bound.
    pub fn monomials(&self) -> Vec<Vec<usize>> {
        (1..=self.arity_bound()).flat_map(|i| self.space.symmetric_basis(i)).collect()
    }

    pub fn element(&self, terms: &[(&str, S)]) -> Result<Vector<usize, S>> {
        let mut v = Vector::zero();
        for (name, c) in terms {
            let i = self.space.index_of(name).ok_or_else(|| Error::invalid(format!("unknown basis element {name}")))?;
            v.add_term(i, c.clone());
        }
        Ok(v)
    }
}

impl<S: Scalar> GradedBasis for LInftyAlgebra<S> {
    type Key = usize;

    fn degree(&self, key: &usize) -> i32 {
        self.space.degree(key)
    }

    fn weight(&self, key: &usize) -> u32 {
        self.space.weight(key)
    }

    fn nilpotency(&self) -> u32 {
        self.space.nilpotency()
    }

    fn arity_bound(&self) -> usize {
        self.space.arity_bound()
    }
}

impl<S: Scalar> LInftyStructure<S> for LInftyAlgebra<S> {
    fn bracket(&self, m: &[usize]) -> Vector<usize, S> {
        match self.taylor.get(m.len().wrapping_sub(1)) {
            Some(q) => q.on_monomial(m),
            None => Vector::zero(),
        }
    }
}

impl<S: Scalar, L: LInftyStructure<S>> LInftyStructure<S> for Arc<L> {
    fn bracket(&self, m: &[Self::Key]) -> Vector<Self::Key, S> {
        (**self).bracket(m)
    }
}

impl<B: GradedBasis> GradedBasis for Arc<B> {
    type Key = B::Key;

    fn degree(&self, key: &Self::Key) -> i32 {
        (**self).degree(key)
    }

    fn weight(&self, key: &Self::Key) -> u32 {
        (**self).weight(key)
    }

    fn nilpotency(&self) -> u32 {
        (**self).nilpotency()
    }

    fn arity_bound(&self) -> usize {
        (**self).arity_bound()
    }
}

/// Exhaustive check of `Q∘Q = 0` on every monomial up to the arity bound.
pub fn check_linfty<S: Scalar>(l: &LInftyAlgebra<S>) -> CheckReport {
    check_linfty_on(l, &l.monomials())
}

/// Finite L∞ morphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LInftyMorphism<S: Scalar> {
    source: Arc<LInftyAlgebra<S>>,
    target: Arc<LInftyAlgebra<S>>,
    taylor: Vec<MultilinearMap<S>>,
}

impl<S: Scalar> LInftyMorphism<S> {
    /// `taylor[i]` is `f_{i+1}`.
    pub fn new(source: Arc<LInftyAlgebra<S>>, target: Arc<LInftyAlgebra<S>>, taylor: Vec<MultilinearMap<S>>) -> Result<Self> {
        for (i, f) in taylor.iter().enumerate() {
            if f.arity != i + 1 {
                return Err(Error::mismatch(format!("coefficient {} has arity {}", i + 1, f.arity)));
            }
            if f.degree != 0 {
                return Err(Error::Degree { expected: 0, found: f.degree });
            }
            for (m, v) in f.entries() {
                if m.iter().any(|&k| k >= source.dim()) || v.keys().any(|&k| k >= target.dim()) {
                    return Err(Error::invalid("index outside the basis"));
                }
            }
        }
        let bound = source.arity_bound().max(1);
        let mut taylor = taylor;
        taylor.truncate(bound);
        while taylor.len() < bound {
            taylor.push(MultilinearMap::zero(taylor.len() + 1, 0));
        }
        Ok(Self { source, target, taylor })
    }

    pub fn strict(source: Arc<LInftyAlgebra<S>>, target: Arc<LInftyAlgebra<S>>, linear: &LinearMap<S>) -> Result<Self> {
        if linear.source_dim != source.dim() || linear.target_dim != target.dim() {
            return Err(Error::mismatch("linear part does not match the algebras"));
        }
        let f1 = MultilinearMap::new(
            source.space(),
            target.space(),
            1,
            0,
            (0..source.dim()).map(|i| (vec![i], linear.columns[i].clone())),
        )?;
        Self::new(source, target, vec![f1])
    }

    pub fn identity(l: Arc<LInftyAlgebra<S>>) -> Self {
        let id = LinearMap::identity(l.dim());
        Self::strict(l.clone(), l, &id).expect("identity is well formed")
    }

    pub fn source_algebra(&self) -> &Arc<LInftyAlgebra<S>> {
        &self.source
    }

    pub fn target_algebra(&self) -> &Arc<LInftyAlgebra<S>> {
        &self.target
    }

    pub fn f(&self, i: usize) -> MultilinearMap<S> {
        self.taylor.get(i.wrapping_sub(1)).cloned().unwrap_or_else(|| MultilinearMap::zero(i, 0))
    }

    pub fn taylor(&self) -> &[MultilinearMap<S>] {
        &self.taylor
    }

    pub fn linear_part(&self) -> LinearMap<S> {
        let f1 = self.f(1);
        LinearMap::from_fn(self.source.dim(), self.target.dim(), |i| f1.on_monomial(&[i]))
    }

    pub fn is_strict(&self) -> bool {
        self.taylor.iter().skip(1).all(|f| f.is_zero())
    }
}

impl<S: Scalar> TaylorMap<S> for LInftyMorphism<S> {
    type Source = LInftyAlgebra<S>;
    type Target = LInftyAlgebra<S>;

    fn source(&self) -> &LInftyAlgebra<S> {
        &self.source
    }

    fn target(&self) -> &LInftyAlgebra<S> {
        &self.target
    }

    fn coefficient(&self, m: &[usize]) -> Vector<usize, S> {
        match self.taylor.get(m.len().wrapping_sub(1)) {
            Some(f) => f.on_monomial(m),
            None => Vector::zero(),
        }
    }
}

pub fn check_morphism<S: Scalar>(f: &LInftyMorphism<S>) -> CheckReport {
    check_morphism_on(f, &f.source.monomials())
}

/// Tabulates the Taylor coefficients of any morphism between finite algebras.
pub fn tabulate<S: Scalar, F>(f: &F, source: Arc<LInftyAlgebra<S>>, target: Arc<LInftyAlgebra<S>>) -> Result<LInftyMorphism<S>>
where
    F: TaylorMap<S, Source = LInftyAlgebra<S>, Target = LInftyAlgebra<S>>,
{
    let bound = source.arity_bound().max(1);
    let taylor = (1..=bound)
        .map(|i| {
            let table = source.space().symmetric_basis(i).into_iter().map(|m| {
                let v = f.coefficient(&m);
                (m, v)
            });
            MultilinearMap::from_table(i, 0, table.collect())
        })
        .collect();
    LInftyMorphism::new(source, target, taylor)
}

struct Composite<'a, S: Scalar> {
    outer: &'a LInftyMorphism<S>,
    inner: &'a LInftyMorphism<S>,
}

impl<S: Scalar> TaylorMap<S> for Composite<'_, S> {
    type Source = LInftyAlgebra<S>;
    type Target = LInftyAlgebra<S>;

    fn source(&self) -> &LInftyAlgebra<S> {
        &self.inner.source
    }

    fn target(&self) -> &LInftyAlgebra<S> {
        &self.outer.target
    }

    fn coefficient(&self, m: &[usize]) -> Vector<usize, S> {
        let mut out = Vector::zero();
        for k in 1..=m.len() {
            out.add_assign(&taylor_sym(self.outer, &morphism_component(self.inner, m, k)));
        }
        out
    }
}

/// `outer ∘ inner`.
pub fn compose_morphisms<S: Scalar>(outer: &LInftyMorphism<S>, inner: &LInftyMorphism<S>) -> Result<LInftyMorphism<S>> {
    if inner.target.space() != outer.source.space() || inner.target.taylor() != outer.source.taylor() {
        return Err(Error::mismatch("target of the inner morphism is not the source of the outer one"));
    }
    let c = Composite { outer, inner };
    tabulate(&c, inner.source.clone(), outer.target.clone())
}

/// Imports a differential graded Lie algebra given in its classical (unshifted)
/// grading. `bracket` lists values `[b_i, b_j]`; the remaining ones follow by
/// graded antisymmetry.
pub fn dgla_import<S: Scalar>(
    unshifted: &GradedSpace,
    d: &LinearMap<S>,
    bracket: &[(usize, usize, Vector<usize, S>)],
) -> Result<LInftyAlgebra<S>> {
    let n = unshifted.dim();
    if d.source_dim != n || d.target_dim != n {
        return Err(Error::mismatch("differential does not match the space"));
    }
    let shifted = GradedSpace::new(
        unshifted.basis().iter().map(|b| BasisElement::new(b.name.clone(), b.degree - 1, b.weight)).collect(),
        unshifted.nilpotency(),
    )?;
    let deg = |i: usize| unshifted.degree(&i);
    let mut table: BTreeMap<Vec<usize>, Vector<usize, S>> = BTreeMap::new();
    for (i, j, value) in bracket {
        let (i, j) = (*i, *j);
        if i >= n || j >= n || value.keys().any(|&k| k >= n) {
            return Err(Error::invalid("bracket index outside the basis"));
        }
        let value = if i <= j {
            value.clone()
        } else if (deg(i) * deg(j)).rem_euclid(2) == 0 {
            value.neg()
        } else {
            value.clone()
        };
        let (a, b) = (i.min(j), i.max(j));
        if a == b && deg(a).rem_euclid(2) == 0 {
            if value.is_zero() {
                continue;
            }
            return Err(Error::check(format!("[{0}, {0}] must vanish for an even element", unshifted.name(a))));
        }
        let q2 = if deg(a).rem_euclid(2) == 1 { value.neg() } else { value };
        match table.get(&vec![a, b]) {
            Some(existing) if *existing != q2 => {
                return Err(Error::check(format!(
                    "inconsistent values for [{}, {}]",
                    unshifted.name(a),
                    unshifted.name(b)
                )))
            }
            _ => {
                table.insert(vec![a, b], q2);
            }
        }
    }
    let q1 = MultilinearMap::new(&shifted, &shifted, 1, 1, (0..n).map(|i| (vec![i], d.columns[i].neg())))?;
    let q2 = MultilinearMap::new(&shifted, &shifted, 2, 1, table)?;
    let l = LInftyAlgebra::new(shifted, vec![q1, q2])?;
    check_linfty(&l).into_result()?;
    Ok(l)
}

/// A graded Lie algebra concentrated in classical degree zero.
pub fn lie_algebra<S: Scalar>(
    names: &[(&str, u32)],
    nilpotency: u32,
    bracket: &[(usize, usize, Vector<usize, S>)],
) -> Result<LInftyAlgebra<S>> {
    let space = GradedSpace::new(names.iter().map(|&(n, w)| BasisElement::new(n, 0, w)).collect(), nilpotency)?;
    dgla_import(&space, &LinearMap::zero(names.len(), names.len()), bracket)
}

/// Product algebra with its strict projections.
pub fn product<S: Scalar>(factors: &[Arc<LInftyAlgebra<S>>]) -> Result<(Arc<LInftyAlgebra<S>>, Vec<LInftyMorphism<S>>)> {
    let mut basis = Vec::new();
    let mut offsets = Vec::new();
    let mut nilpotency = 1;
    for (f, l) in factors.iter().enumerate() {
        offsets.push(basis.len());
        nilpotency = nilpotency.max(l.nilpotency());
        for b in l.space().basis() {
            let name = if factors.len() == 1 { b.name.clone() } else { format!("{}:{}", f, b.name) };
            basis.push(BasisElement::new(name, b.degree, b.weight));
        }
    }
    let space = GradedSpace::new(basis, nilpotency)?;
    let bound = space.arity_bound();
    let mut taylor: Vec<MultilinearMap<S>> = (1..=bound).map(|i| MultilinearMap::zero(i, 1)).collect();
    for (f, l) in factors.iter().enumerate() {
        let off = offsets[f];
        for (i, q) in l.taylor().iter().enumerate() {
            for (m, v) in q.entries() {
                let m: Vec<usize> = m.iter().map(|k| k + off).collect();
                taylor[i].add(m, &v.map_keys(|k| k + off));
            }
        }
    }
    let total = Arc::new(LInftyAlgebra::new(space, taylor)?);
    let projections = factors
        .iter()
        .enumerate()
        .map(|(f, l)| {
            let off = offsets[f];
            let lin = LinearMap::from_fn(total.dim(), l.dim(), |i| {
                if i >= off && i < off + l.dim() {
                    Vector::basis(i - off)
                } else {
                    Vector::zero()
                }
            });
            LInftyMorphism::strict(total.clone(), l.clone(), &lin)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((total, projections))
}

/// Dimensions of the cohomology of the tangent complex `(W, q_1)`, indexed by
/// shifted degree. The classical `H^k` sits in shifted degree `k - 1`.
pub fn tangent_cohomology<S: Scalar>(l: &LInftyAlgebra<S>) -> BTreeMap<i32, usize> {
    let d = l.differential();
    let mut ranks = BTreeMap::new();
    for deg in l.space().degrees() {
        let idx = l.space().indices_of_degree(deg);
        ranks.insert(deg, d.restrict(&idx).rank());
    }
    let mut out = BTreeMap::new();
    for deg in l.space().degrees() {
        let dim = l.space().indices_of_degree(deg).len();
        let h = dim - ranks[&deg] - ranks.get(&(deg - 1)).copied().unwrap_or(0);
        out.insert(deg, h);
    }
    out
}

/// `dim H^k` in the classical grading.
pub fn cohomology_dim<S: Scalar>(l: &LInftyAlgebra<S>, classical_degree: i32) -> usize {
    tangent_cohomology(l).get(&(classical_degree - 1)).copied().unwrap_or(0)
}

/// Cocycles of the tangent complex in the given shifted degree.
pub fn cocycles<S: Scalar>(l: &LInftyAlgebra<S>, degree: i32) -> Vec<Vector<usize, S>> {
    let idx = l.space().indices_of_degree(degree);
    l.differential().restrict(&idx).kernel().into_iter().map(|k| k.map_keys(|&j| idx[j])).collect()
}

/// Strict surjection `L → M` whose kernel is spanned by basis elements of `L`
/// and is central: every `q_n`, `n ≥ 2`, vanishes as soon as one argument lies
/// in the kernel.
#[derive(Clone, Debug)]
pub struct CentralExtension<S: Scalar> {
    projection: LInftyMorphism<S>,
    kernel: Vec<usize>,
}

/// Result of [`obstruction_mc`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Obstruction<S: Scalar> {
    /// The chosen set-level lift `y` of `x`.
    pub section: Vector<usize, S>,
    /// `R_L(y)`, an element of the kernel of degree one.
    pub curvature: Vector<usize, S>,
    /// Canonical representative of the class of `R_L(y)` modulo `q_1` of the kernel.
    pub class: Vector<usize, S>,
    /// An MC lift, present exactly when the class vanishes.
    pub lift: Option<Vector<usize, S>>,
}

impl<S: Scalar> Obstruction<S> {
    pub fn vanishes(&self) -> bool {
        self.class.is_zero()
    }
}

impl<S: Scalar> CentralExtension<S> {
    pub fn new(projection: LInftyMorphism<S>, kernel: Vec<usize>) -> Result<Self> {
        if !projection.is_strict() {
            return Err(Error::invalid("projection must be strict"));
        }
        check_morphism(&projection).into_result()?;
        let p = projection.linear_part();
        if !p.is_surjective() {
            return Err(Error::invalid("projection is not surjective"));
        }
        let total = projection.source_algebra().clone();
        let mut sorted = kernel.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != kernel.len() || sorted.iter().any(|&k| k >= total.dim()) {
            return Err(Error::invalid("kernel must list distinct basis elements"));
        }
        if sorted.iter().any(|&k| !p.columns[k].is_zero()) || sorted.len() != total.dim() - p.rank() {
            return Err(Error::invalid("listed elements do not span the kernel"));
        }
        for (i, q) in total.taylor().iter().enumerate().skip(1) {
            for (m, v) in q.entries() {
                if !v.is_zero() && m.iter().any(|k| sorted.binary_search(k).is_ok()) {
                    return Err(Error::invalid(format!("q_{} does not vanish on the kernel at {:?}", i + 1, m)));
                }
            }
        }
        for &k in &sorted {
            if total.bracket(&[k]).keys().any(|o| sorted.binary_search(o).is_err()) {
                return Err(Error::invalid("kernel is not closed under q_1"));
            }
        }
        Ok(Self { projection, kernel: sorted })
    }

    pub fn total(&self) -> &Arc<LInftyAlgebra<S>> {
        self.projection.source_algebra()
    }

    pub fn base(&self) -> &Arc<LInftyAlgebra<S>> {
        self.projection.target_algebra()
    }

    pub fn projection(&self) -> &LInftyMorphism<S> {
        &self.projection
    }

    pub fn kernel(&self) -> &[usize] {
        &self.kernel
    }

    fn kernel_of_degree(&self, degree: i32) -> Vec<usize> {
        self.kernel.iter().copied().filter(|&k| self.total().degree(&k) == degree).collect()
    }

    /// Echelon form of `q_1(K)` in the given target degree; tags index the
    /// kernel elements of degree `degree - 1`.
    fn coboundaries(&self, degree: i32) -> (Vec<usize>, Echelon<S>) {
        let src = self.kernel_of_degree(degree - 1);
        let mut e = Echelon::new();
        for &k in &src {
            let _ = e.insert(&self.total().bracket(&[k]));
        }
        (src, e)
    }

    /// Kernel cocycles of the given shifted degree (`Z¹(K)` in the classical
    /// grading corresponds to shifted degree zero).
    pub fn kernel_cocycles(&self, degree: i32) -> Vec<Vector<usize, S>> {
        let idx = self.kernel_of_degree(degree);
        let d = LinearMap::from_fn(idx.len(), self.total().dim(), |j| self.total().bracket(&[idx[j]]));
        d.kernel().into_iter().map(|k| k.map_keys(|&j| idx[j])).collect()
    }

    /// Set-level section of the projection in degree zero.
    pub fn section(&self, x: &Vector<usize, S>) -> Result<Vector<usize, S>> {
        let idx = self.total().space().indices_of_degree(0);
        let p = self.projection.linear_part().restrict(&idx);
        let z = p.solve(x).ok_or_else(|| Error::invalid("element is not in the image of the projection"))?;
        Ok(z.map_keys(|&j| idx[j]))
    }
}

/// The obstruction class `o(x) ∈ H²(K)` of an MC element of the base.
pub fn obstruction_mc<S: Scalar>(e: &CentralExtension<S>, x: &Vector<usize, S>) -> Result<Obstruction<S>> {
    let r = curvature(e.base().as_ref(), x)?;
    if !r.is_zero() {
        return Err(Error::NotMaurerCartan(e.base().space().format_vector(&r)));
    }
    let y = e.section(x)?;
    let ry = curvature(e.total().as_ref(), &y)?;
    let (src, ech) = e.coboundaries(1);
    let (class, used) = ech.reduce_tracked(&ry);
    let lift = class.is_zero().then(|| {
        let z = used.map_keys(|&j| src[j]);
        y.minus(&z)
    });
    Ok(Obstruction { section: y, curvature: ry, class, lift })
}
