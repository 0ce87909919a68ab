//! Semicosimplicial and cosimplicial L∞ algebras, matching spaces, partial
//! totalizations `Tot_k` as equalizer subalgebras, the cartesian squares of
//! the totalization tower, Čech diagrams, cosimplicial replacements of
//! diagrams over finite categories and abelian descent checks.

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::cochains::{standard_cochains, FinComplex};
use crate::deligne::abelian_homotopy_groups;
use crate::error::{Error, Result};
use crate::forms::standard_simplices;
use crate::graded::{BasisElement, GradedBasis, GradedSpace};
use crate::linalg::{image_and_kernel, Echelon, LinearMap};
use crate::linfty::{
    bracket_args, check_morphism, is_mc, product, tangent_cohomology, CheckReport, LInftyAlgebra, LInftyMorphism,
};
use crate::multilinear::MultilinearMap;
use crate::scalar::Scalar;
use crate::vector::Vector;

/// A sub-L∞ algebra spanned by homogeneous vectors of an ambient algebra.
#[derive(Clone, Debug)]
pub struct Subalgebra<S: Scalar> {
    algebra: Arc<LInftyAlgebra<S>>,
    ambient: Arc<LInftyAlgebra<S>>,
    inclusion: LinearMap<S>,
    echelon: Echelon<S>,
}

impl<S: Scalar> Subalgebra<S> {
    /// Spans `basis` (each vector homogeneous in degree and weight) and
    /// restricts the brackets; fails if the span is not closed.
    pub fn new(ambient: Arc<LInftyAlgebra<S>>, basis: Vec<Vector<usize, S>>, prefix: &str) -> Result<Self> {
        let mut elements = Vec::with_capacity(basis.len());
        let mut echelon = Echelon::new();
        for (i, v) in basis.iter().enumerate() {
            let mut keys = v.keys();
            let first = keys.next().ok_or_else(|| Error::invalid("zero vector in a subalgebra basis"))?;
            let (deg, wt) = (ambient.degree(first), ambient.weight(first));
            if keys.any(|k| ambient.degree(k) != deg || ambient.weight(k) != wt) {
                return Err(Error::invalid("subalgebra basis vector is not homogeneous"));
            }
            if echelon.insert(v).is_err() {
                return Err(Error::invalid("subalgebra basis is linearly dependent"));
            }
            elements.push(BasisElement::new(format!("{prefix}{i}"), deg, wt));
        }
        let space = GradedSpace::new(elements, ambient.nilpotency())?;
        let inclusion = LinearMap::new(basis.len(), ambient.dim(), basis)?;
        let mut taylor = Vec::new();
        for i in 1..=space.arity_bound() {
            let mut entries = Vec::new();
            for m in space.symmetric_basis(i) {
                let args: Vec<_> = m.iter().map(|&k| inclusion.columns[k].clone()).collect();
                let value = bracket_args(ambient.as_ref(), &args);
                let coords = echelon.solve(&value).ok_or_else(|| Error::check(format!("the span is not closed under q_{i}")))?;
                entries.push((m, coords));
            }
            taylor.push(MultilinearMap::new(&space, &space, i, 1, entries)?);
        }
        let algebra = Arc::new(LInftyAlgebra::new(space, taylor)?);
        Ok(Self { algebra, ambient, inclusion, echelon })
    }

    /// The kernel of a degree- and weight-preserving linear map on the ambient
    /// algebra, computed block by block.
    pub fn kernel(ambient: Arc<LInftyAlgebra<S>>, constraint: &LinearMap<S>, prefix: &str) -> Result<Self> {
        let basis = graded_kernel(ambient.space(), constraint);
        Self::new(ambient, basis, prefix)
    }

    pub fn algebra(&self) -> &Arc<LInftyAlgebra<S>> {
        &self.algebra
    }

    pub fn ambient(&self) -> &Arc<LInftyAlgebra<S>> {
        &self.ambient
    }

    pub fn inclusion(&self) -> &LinearMap<S> {
        &self.inclusion
    }

    pub fn dim(&self) -> usize {
        self.algebra.dim()
    }

    pub fn embed(&self, x: &Vector<usize, S>) -> Vector<usize, S> {
        self.inclusion.apply(x)
    }

    /// Coordinates of an ambient vector lying in the subalgebra.
    pub fn coordinates(&self, v: &Vector<usize, S>) -> Option<Vector<usize, S>> {
        self.echelon.solve(v)
    }

    pub fn inclusion_morphism(&self) -> Result<LInftyMorphism<S>> {
        LInftyMorphism::strict(self.algebra.clone(), self.ambient.clone(), &self.inclusion)
    }
}

fn blocks(space: &GradedSpace) -> BTreeMap<(i32, u32), Vec<usize>> {
    let mut out: BTreeMap<(i32, u32), Vec<usize>> = BTreeMap::new();
    for i in 0..space.dim() {
        out.entry((space.degree(&i), space.weight(&i))).or_default().push(i);
    }
    out
}

/// Kernel of `map` restricted to each (degree, weight) block of `space`.
pub fn graded_kernel<S: Scalar>(space: &GradedSpace, map: &LinearMap<S>) -> Vec<Vector<usize, S>> {
    let mut out = Vec::new();
    for idx in blocks(space).values() {
        let cols: Vec<_> = idx.iter().map(|&i| map.columns[i].clone()).collect();
        for k in image_and_kernel(&cols).1 {
            out.push(k.map_keys(|&j| idx[j]));
        }
    }
    out
}

/// Dimension of the kernel per (degree, weight) block.
pub fn graded_kernel_dims<S: Scalar>(space: &GradedSpace, map: &LinearMap<S>) -> BTreeMap<(i32, u32), usize> {
    let mut out = BTreeMap::new();
    for (block, idx) in blocks(space) {
        let cols: Vec<_> = idx.iter().map(|&i| map.columns[i].clone()).collect();
        let k = idx.len() - image_and_kernel(&cols).0.rank();
        if k > 0 {
            out.insert(block, k);
        }
    }
    out
}

fn space_dims(space: &GradedSpace) -> BTreeMap<(i32, u32), usize> {
    blocks(space).into_iter().map(|(b, v)| (b, v.len())).collect()
}

/// Column-wise builder for maps into a direct sum.
struct Stack<S: Scalar> {
    columns: Vec<Vector<usize, S>>,
    rows: usize,
}

impl<S: Scalar> Stack<S> {
    fn new(source_dim: usize) -> Self {
        Self { columns: vec![Vector::zero(); source_dim], rows: 0 }
    }

    /// Appends a new summand receiving `map` from the source columns starting at `col_offset`.
    fn push(&mut self, col_offset: usize, map: &LinearMap<S>, sign: S) -> usize {
        let row = self.rows;
        for (c, v) in map.columns.iter().enumerate() {
            self.columns[col_offset + c].axpy(&sign, &v.map_keys(|k| k + row));
        }
        self.rows += map.target_dim;
        row
    }

    /// Adds `map` into the existing summand at `row`.
    fn add(&mut self, col_offset: usize, row: usize, map: &LinearMap<S>, sign: S) {
        for (c, v) in map.columns.iter().enumerate() {
            self.columns[col_offset + c].axpy(&sign, &v.map_keys(|k| k + row));
        }
    }

    fn finish(self) -> LinearMap<S> {
        LinearMap { source_dim: self.columns.len(), target_dim: self.rows, columns: self.columns }
    }
}

/// Pull-back of cochains with `d`-dimensional coefficients from the simplices
/// `from` to the simplices `to` along the vertex map `theta`; simplices with a
/// degenerate image go to zero.
pub fn pull_map<S: Scalar>(from: &[Vec<usize>], to: &[Vec<usize>], theta: &[usize], d: usize) -> LinearMap<S> {
    let index: BTreeMap<&[usize], usize> = from.iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
    let mut columns = vec![Vector::zero(); from.len() * d];
    for (t, tau) in to.iter().enumerate() {
        let image: Vec<usize> = tau.iter().map(|&v| theta[v]).collect();
        if image.windows(2).any(|w| w[0] >= w[1]) {
            continue;
        }
        if let Some(&s) = index.get(image.as_slice()) {
            for b in 0..d {
                columns[s * d + b].add_term(t * d + b, S::one());
            }
        }
    }
    LinearMap { source_dim: from.len() * d, target_dim: to.len() * d, columns }
}

/// Push-forward `e_σ ⊗ b ↦ e_σ ⊗ φ(b)` on cochains over `count` simplices.
pub fn push_map<S: Scalar>(count: usize, phi: &LinearMap<S>) -> LinearMap<S> {
    let (m, n) = (phi.source_dim, phi.target_dim);
    LinearMap::from_fn(count * m, count * n, |i| phi.columns[i % m].map_keys(|b| (i / m) * n + b))
}

fn coface_vertices(n: usize, j: usize) -> Vec<usize> {
    (0..n).map(|v| if v < j { v } else { v + 1 }).collect()
}

fn codegeneracy_vertices(n: usize, j: usize) -> Vec<usize> {
    (0..=n + 1).map(|v| if v <= j { v } else { v - 1 }).collect()
}

fn strict_checked<S: Scalar>(source: &Arc<LInftyAlgebra<S>>, target: &Arc<LInftyAlgebra<S>>, map: &LinearMap<S>, what: &str) -> Result<()> {
    for (i, col) in map.columns.iter().enumerate() {
        if col.keys().any(|k| target.weight(k) != source.weight(&i)) {
            return Err(Error::invalid(format!("{what} does not preserve weights")));
        }
    }
    let m = LInftyMorphism::strict(source.clone(), target.clone(), map)?;
    let report = check_morphism(&m);
    if let Some(f) = report.first_failure() {
        return Err(Error::check(format!("{what} is not an L∞ morphism: {}", f.failure.clone().unwrap_or_default())));
    }
    Ok(())
}

/// A semicosimplicial L∞ algebra `L_0, …, L_{n_max}` (zero above `n_max`) with
/// strict cofaces.
#[derive(Clone, Debug)]
pub struct SemicosimplicialLInfty<S: Scalar> {
    levels: Vec<Arc<LInftyAlgebra<S>>>,
    cofaces: Vec<Vec<LinearMap<S>>>,
}

impl<S: Scalar> SemicosimplicialLInfty<S> {
    /// `cofaces[n][j]` is `∂^j: L_n → L_{n+1}`, `j = 0..=n+1`.
    pub fn new(levels: Vec<Arc<LInftyAlgebra<S>>>, cofaces: Vec<Vec<LinearMap<S>>>) -> Result<Self> {
        let d = Self::from_parts_unchecked(levels, cofaces)?;
        for n in 0..d.cofaces.len() {
            for (j, c) in d.cofaces[n].iter().enumerate() {
                strict_checked(&d.levels[n], &d.levels[n + 1], c, &format!("coface ∂^{j} into level {}", n + 1))?;
            }
        }
        d.check_identities().into_result()?;
        Ok(d)
    }

    /// Shape checks only; the cosimplicial identities and strictness are not verified.
    pub fn from_parts_unchecked(levels: Vec<Arc<LInftyAlgebra<S>>>, cofaces: Vec<Vec<LinearMap<S>>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::invalid("a diagram needs at least one level"));
        }
        if cofaces.len() != levels.len() - 1 {
            return Err(Error::mismatch(format!("{} coface families for {} levels", cofaces.len(), levels.len())));
        }
        for (n, fam) in cofaces.iter().enumerate() {
            if fam.len() != n + 2 {
                return Err(Error::mismatch(format!("{} cofaces into level {}", fam.len(), n + 1)));
            }
            for c in fam {
                if c.source_dim != levels[n].dim() || c.target_dim != levels[n + 1].dim() {
                    return Err(Error::mismatch(format!("coface into level {} has the wrong shape", n + 1)));
                }
            }
        }
        Ok(Self { levels, cofaces })
    }

    pub fn n_max(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, n: usize) -> Option<&Arc<LInftyAlgebra<S>>> {
        self.levels.get(n)
    }

    pub fn levels(&self) -> &[Arc<LInftyAlgebra<S>>] {
        &self.levels
    }

    /// `∂^j: L_{n−1} → L_n`.
    pub fn coface(&self, n: usize, j: usize) -> &LinearMap<S> {
        &self.cofaces[n - 1][j]
    }

    /// `∂^j ∂^i = ∂^i ∂^{j−1}` for `i < j`.
    pub fn check_identities(&self) -> CheckReport {
        let mut report = CheckReport::default();
        let mut checked = 0;
        let mut failure = None;
        for n in 2..=self.n_max() {
            for j in 0..=n {
                for i in 0..j {
                    checked += 1;
                    let lhs = self.coface(n, j).compose(self.coface(n - 1, i));
                    let rhs = self.coface(n, i).compose(self.coface(n - 1, j - 1));
                    if failure.is_none() && lhs != rhs {
                        failure = Some(format!("∂^{j}∂^{i} ≠ ∂^{i}∂^{} from level {}", j - 1, n - 2));
                    }
                }
            }
        }
        report.push("coface identities", checked, failure);
        report
    }

    pub fn tot_k(&self, k: usize) -> Result<Totalization<S>> {
        totalize(&self.levels, &self.cofaces, None, k)
    }

    /// `Tot(L•) = Tot_{n_max}(L•)`.
    pub fn tot(&self) -> Result<Totalization<S>> {
        self.tot_k(self.n_max())
    }

    /// The square `Tot_k → C*(Δ_k; L_k)` over `Tot_{k−1} → C*(∂Δ_k; L_k)`.
    pub fn cartesian_check(&self, k: usize) -> Result<CheckReport> {
        cartesian(&self.levels, &self.cofaces, None, k)
    }
}

/// A cosimplicial L∞ algebra truncated at the cutoff level `k_max`.
#[derive(Clone, Debug)]
pub struct CosimplicialLInfty<S: Scalar> {
    base: SemicosimplicialLInfty<S>,
    codegeneracies: Vec<Vec<LinearMap<S>>>,
}

impl<S: Scalar> CosimplicialLInfty<S> {
    /// `codegeneracies[n][j]` is `s^j: L_{n+1} → L_n`, `j = 0..=n`.
    pub fn new(levels: Vec<Arc<LInftyAlgebra<S>>>, cofaces: Vec<Vec<LinearMap<S>>>, codegeneracies: Vec<Vec<LinearMap<S>>>) -> Result<Self> {
        let c = Self::from_parts_unchecked(levels, cofaces, codegeneracies)?;
        let base = SemicosimplicialLInfty::new(c.base.levels.clone(), c.base.cofaces.clone())?;
        for n in 0..c.codegeneracies.len() {
            for (j, s) in c.codegeneracies[n].iter().enumerate() {
                strict_checked(&base.levels[n + 1], &base.levels[n], s, &format!("codegeneracy s^{j} from level {}", n + 1))?;
            }
        }
        c.check_identities().into_result()?;
        Ok(c)
    }

    pub fn from_parts_unchecked(levels: Vec<Arc<LInftyAlgebra<S>>>, cofaces: Vec<Vec<LinearMap<S>>>, codegeneracies: Vec<Vec<LinearMap<S>>>) -> Result<Self> {
        let base = SemicosimplicialLInfty::from_parts_unchecked(levels, cofaces)?;
        if codegeneracies.len() != base.levels.len() - 1 {
            return Err(Error::mismatch("codegeneracy families do not match the levels"));
        }
        for (n, fam) in codegeneracies.iter().enumerate() {
            if fam.len() != n + 1 {
                return Err(Error::mismatch(format!("{} codegeneracies out of level {}", fam.len(), n + 1)));
            }
            for s in fam {
                if s.source_dim != base.levels[n + 1].dim() || s.target_dim != base.levels[n].dim() {
                    return Err(Error::mismatch(format!("codegeneracy out of level {} has the wrong shape", n + 1)));
                }
            }
        }
        Ok(Self { base, codegeneracies })
    }

    pub fn k_max(&self) -> usize {
        self.base.n_max()
    }

    pub fn level(&self, n: usize) -> Option<&Arc<LInftyAlgebra<S>>> {
        self.base.level(n)
    }

    pub fn coface(&self, n: usize, j: usize) -> &LinearMap<S> {
        self.base.coface(n, j)
    }

    /// `s^j: L_{n+1} → L_n`.
    pub fn codegeneracy(&self, n: usize, j: usize) -> &LinearMap<S> {
        &self.codegeneracies[n][j]
    }

    /// The underlying semicosimplicial data up to the cutoff.
    pub fn semicosimplicial(&self) -> &SemicosimplicialLInfty<S> {
        &self.base
    }

    pub fn check_identities(&self) -> CheckReport {
        let mut report = self.base.check_identities();
        let k = self.k_max();
        let mut checked = 0;
        let mut failure: Option<String> = None;
        let mut note = |ok: bool, msg: String, checked: &mut usize| {
            *checked += 1;
            if !ok && failure.is_none() {
                failure = Some(msg);
            }
        };
        for n in 1..=k {
            for j in 0..n {
                for i in 0..=n {
                    let lhs = self.codegeneracy(n - 1, j).compose(self.coface(n, i));
                    let (ok, msg) = if i < j {
                        (lhs == self.coface(n - 1, i).compose(self.codegeneracy(n - 2, j - 1)), format!("s^{j}∂^{i} ≠ ∂^{i}s^{} at level {n}", j - 1))
                    } else if i == j || i == j + 1 {
                        (lhs == LinearMap::identity(self.level(n - 1).unwrap().dim()), format!("s^{j}∂^{i} ≠ id at level {n}"))
                    } else {
                        (lhs == self.coface(n - 1, i - 1).compose(self.codegeneracy(n - 2, j)), format!("s^{j}∂^{i} ≠ ∂^{}s^{j} at level {n}", i - 1))
                    };
                    note(ok, msg, &mut checked);
                }
            }
        }
        for n in 2..=k {
            for j in 0..n - 1 {
                for i in 0..=j {
                    let lhs = self.codegeneracy(n - 2, j).compose(self.codegeneracy(n - 1, i));
                    let rhs = self.codegeneracy(n - 2, i).compose(self.codegeneracy(n - 1, j + 1));
                    note(lhs == rhs, format!("s^{j}s^{i} ≠ s^{i}s^{} from level {n}", j + 1), &mut checked);
                }
            }
        }
        report.push("codegeneracy identities", checked, failure);
        report
    }

    /// `Tot_k`, for `k` up to the cutoff.
    pub fn tot_k(&self, k: usize) -> Result<Totalization<S>> {
        if k > self.k_max() {
            return Err(Error::invalid(format!("Tot_{k} needs levels beyond the cutoff {}", self.k_max())));
        }
        totalize(&self.base.levels[..=k], &self.base.cofaces[..k], Some(&self.codegeneracies[..k]), k)
    }

    /// `M_n(L•) ⊂ L_n^{n+1}` and the matching map `L_{n+1} → M_n`.
    pub fn matching_space(&self, n: usize) -> Result<MatchingSpace<S>> {
        if n > self.k_max() {
            return Err(Error::invalid(format!("level {n} is beyond the cutoff")));
        }
        let ln = self.level(n).unwrap().clone();
        let (ambient, _) = product(&vec![ln.clone(); n + 1])?;
        let d = ln.dim();
        let mut stack = Stack::new(ambient.dim());
        if n >= 1 {
            for j in 1..=n {
                for i in 0..j {
                    let row = stack.push(j * d, self.codegeneracy(n - 1, i), S::one());
                    stack.add(i * d, row, self.codegeneracy(n - 1, j - 1), -S::one());
                }
            }
        }
        let sub = Subalgebra::kernel(ambient, &stack.finish(), "m")?;
        Ok(MatchingSpace { n, sub, factor_dim: d })
    }

    /// The tuple `(s^0 y, …, s^n y)` of `y ∈ L_{n+1}`.
    pub fn matching_tuple(&self, n: usize, y: &Vector<usize, S>) -> Vec<Vector<usize, S>> {
        (0..=n).map(|i| self.codegeneracy(n, i).apply(y)).collect()
    }

    /// The Reedy lift: `y_n = ∂^n x_n`, `y_r = ∂^r(x_r − s^r y_{r+1}) + y_{r+1}`;
    /// returns `y_0 ∈ L_{n+1}` with `s^i y_0 = x_i`.
    pub fn matching_lift(&self, n: usize, xs: &[Vector<usize, S>]) -> Result<Vector<usize, S>> {
        if n + 1 > self.k_max() {
            return Err(Error::invalid(format!("level {} is beyond the cutoff", n + 1)));
        }
        if xs.len() != n + 1 {
            return Err(Error::mismatch(format!("{} components for M_{n}", xs.len())));
        }
        for j in 1..=n {
            for i in 0..j {
                if self.codegeneracy(n - 1, i).apply(&xs[j]) != self.codegeneracy(n - 1, j - 1).apply(&xs[i]) {
                    return Err(Error::invalid(format!("the tuple violates s^{i}(x_{j}) = s^{}(x_{i})", j - 1)));
                }
            }
        }
        let mut y = self.coface(n + 1, n).apply(&xs[n]);
        for r in (0..n).rev() {
            let inner = xs[r].minus(&self.codegeneracy(n, r).apply(&y));
            y = self.coface(n + 1, r).apply(&inner).plus(&y);
        }
        if self.matching_tuple(n, &y) != xs {
            return Err(Error::check("the matching lift does not reproduce the tuple"));
        }
        Ok(y)
    }

    /// The square `Tot_k → C*(Δ_k; L_k)` over `Tot_{k−1} → N_{k−1}`, plus
    /// surjectivity of `C*(Δ_k; L_k) → N_{k−1}`.
    pub fn cartesian_check(&self, k: usize) -> Result<CheckReport> {
        if k > self.k_max() {
            return Err(Error::invalid(format!("Tot_{k} needs levels beyond the cutoff {}", self.k_max())));
        }
        cartesian(&self.base.levels[..=k], &self.base.cofaces[..k], Some(&self.codegeneracies[..k]), k)
    }
}

/// `M_n(L•)` as a subalgebra of `L_n^{n+1}`.
#[derive(Clone, Debug)]
pub struct MatchingSpace<S: Scalar> {
    pub n: usize,
    sub: Subalgebra<S>,
    factor_dim: usize,
}

impl<S: Scalar> MatchingSpace<S> {
    pub fn algebra(&self) -> &Arc<LInftyAlgebra<S>> {
        self.sub.algebra()
    }

    pub fn subalgebra(&self) -> &Subalgebra<S> {
        &self.sub
    }

    /// Components `(x_0, …, x_n)` of an element.
    pub fn components(&self, x: &Vector<usize, S>) -> Vec<Vector<usize, S>> {
        let v = self.sub.embed(x);
        let d = self.factor_dim;
        (0..=self.n).map(|i| v.iter().filter(|(k, _)| *k / d == i).map(|(k, c)| (k % d, c.clone())).collect()).collect()
    }

    /// Coordinates of a tuple lying in `M_n`.
    pub fn element(&self, xs: &[Vector<usize, S>]) -> Option<Vector<usize, S>> {
        let d = self.factor_dim;
        let mut v = Vector::zero();
        for (i, x) in xs.iter().enumerate() {
            v.add_assign(&x.map_keys(|k| i * d + k));
        }
        self.sub.coordinates(&v)
    }
}

/// `Tot_k(L•)` inside `∏_{n≤k} C*(Δ_n; L_n)`.
#[derive(Clone, Debug)]
pub struct Totalization<S: Scalar> {
    pub k: usize,
    factors: Vec<Arc<LInftyAlgebra<S>>>,
    offsets: Vec<usize>,
    sub: Subalgebra<S>,
}

struct TotAmbient<S: Scalar> {
    factors: Vec<Arc<LInftyAlgebra<S>>>,
    offsets: Vec<usize>,
    ambient: Arc<LInftyAlgebra<S>>,
}

fn tot_ambient<S: Scalar>(levels: &[Arc<LInftyAlgebra<S>>], k: usize) -> Result<TotAmbient<S>> {
    let top = k.min(levels.len() - 1);
    let mut factors = Vec::with_capacity(top + 1);
    let mut offsets = Vec::with_capacity(top + 1);
    let mut off = 0;
    for (n, l) in levels.iter().enumerate().take(top + 1) {
        let c = standard_cochains(n, l.clone())?;
        offsets.push(off);
        off += c.dim();
        factors.push(c);
    }
    let (ambient, _) = product(&factors)?;
    Ok(TotAmbient { factors, offsets, ambient })
}

/// The compatibility map whose kernel is `Tot_k`: for each coface,
/// `∂^j_* α_{n−1} − δ_j^* α_n`, and for each codegeneracy `s^j_* α_{n+1} − σ_j^* α_n`.
fn tot_constraint<S: Scalar>(
    levels: &[Arc<LInftyAlgebra<S>>],
    cofaces: &[Vec<LinearMap<S>>],
    codegeneracies: Option<&[Vec<LinearMap<S>>]>,
    amb: &TotAmbient<S>,
) -> LinearMap<S> {
    let top = amb.factors.len() - 1;
    let mut stack = Stack::new(amb.ambient.dim());
    for n in 1..=top {
        let simplices_lo = standard_simplices(n - 1);
        let simplices_hi = standard_simplices(n);
        let d = levels[n].dim();
        for j in 0..=n {
            let push = push_map(simplices_lo.len(), &cofaces[n - 1][j]);
            let row = stack.push(amb.offsets[n - 1], &push, S::one());
            let pull = pull_map(&simplices_hi, &simplices_lo, &coface_vertices(n, j), d);
            stack.add(amb.offsets[n], row, &pull, -S::one());
        }
    }
    if let Some(codeg) = codegeneracies {
        for n in 0..top {
            let simplices_lo = standard_simplices(n);
            let simplices_hi = standard_simplices(n + 1);
            let d = levels[n].dim();
            for j in 0..=n {
                let push = push_map(simplices_hi.len(), &codeg[n][j]);
                let row = stack.push(amb.offsets[n + 1], &push, S::one());
                let pull = pull_map(&simplices_lo, &simplices_hi, &codegeneracy_vertices(n, j), d);
                stack.add(amb.offsets[n], row, &pull, -S::one());
            }
        }
    }
    stack.finish()
}

fn totalize<S: Scalar>(
    levels: &[Arc<LInftyAlgebra<S>>],
    cofaces: &[Vec<LinearMap<S>>],
    codegeneracies: Option<&[Vec<LinearMap<S>>]>,
    k: usize,
) -> Result<Totalization<S>> {
    let amb = tot_ambient(levels, k)?;
    let constraint = tot_constraint(levels, cofaces, codegeneracies, &amb);
    let sub = Subalgebra::kernel(amb.ambient.clone(), &constraint, "t")?;
    Ok(Totalization { k, factors: amb.factors, offsets: amb.offsets, sub })
}

impl<S: Scalar> Totalization<S> {
    pub fn algebra(&self) -> &Arc<LInftyAlgebra<S>> {
        self.sub.algebra()
    }

    pub fn subalgebra(&self) -> &Subalgebra<S> {
        &self.sub
    }

    pub fn dim(&self) -> usize {
        self.sub.dim()
    }

    /// `C*(Δ_n; L_n)`.
    pub fn factor(&self, n: usize) -> Option<&Arc<LInftyAlgebra<S>>> {
        self.factors.get(n)
    }

    pub fn levels(&self) -> usize {
        self.factors.len()
    }

    /// `α_n` of an element given in `Tot_k` coordinates.
    pub fn component(&self, x: &Vector<usize, S>, n: usize) -> Vector<usize, S> {
        let v = self.sub.embed(x);
        let (lo, hi) = (self.offsets[n], self.offsets[n] + self.factors[n].dim());
        v.iter().filter(|(k, _)| **k >= lo && **k < hi).map(|(k, c)| (k - lo, c.clone())).collect()
    }

    /// Coordinates of the tuple `(α_0, …)`, if it is compatible.
    pub fn from_components(&self, alphas: &[Vector<usize, S>]) -> Option<Vector<usize, S>> {
        if alphas.len() != self.factors.len() {
            return None;
        }
        let mut v = Vector::zero();
        for (n, a) in alphas.iter().enumerate() {
            v.add_assign(&a.map_keys(|k| k + self.offsets[n]));
        }
        self.sub.coordinates(&v)
    }

    /// The strict projection `Tot_k → C*(Δ_n; L_n)`.
    pub fn projection(&self, n: usize) -> Result<LInftyMorphism<S>> {
        let lin = LinearMap::from_fn(self.dim(), self.factors[n].dim(), |i| self.component(&Vector::basis(i), n));
        LInftyMorphism::strict(self.algebra().clone(), self.factors[n].clone(), &lin)
    }

    /// `MC(Tot(L•)) → Tot(Del∞(L•))_0`: the family of simplices `α_n ∈ Del∞(L_n)_n`.
    pub fn to_family(&self, x: &Vector<usize, S>) -> Result<Vec<Vector<usize, S>>> {
        if !is_mc(self.algebra().as_ref(), x) {
            return Err(Error::NotMaurerCartan("element of the totalization".into()));
        }
        Ok((0..self.factors.len()).map(|n| self.component(x, n)).collect())
    }

    /// Inverse of [`Self::to_family`]: checks each `α_n` and the compatibilities.
    pub fn from_family(&self, family: &[Vector<usize, S>]) -> Result<Vector<usize, S>> {
        if family.len() != self.factors.len() {
            return Err(Error::mismatch(format!("{} simplices for {} levels", family.len(), self.factors.len())));
        }
        for (n, a) in family.iter().enumerate() {
            if !is_mc(self.factors[n].as_ref(), a) {
                return Err(Error::NotMaurerCartan(format!("simplex at level {n}")));
            }
        }
        let x = self.from_components(family).ok_or_else(|| Error::invalid("the family is not compatible with the cofaces"))?;
        if !is_mc(self.algebra().as_ref(), &x) {
            return Err(Error::check("a compatible family of Maurer-Cartan simplices glued to a non Maurer-Cartan element"));
        }
        Ok(x)
    }
}

fn cartesian<S: Scalar>(
    levels: &[Arc<LInftyAlgebra<S>>],
    cofaces: &[Vec<LinearMap<S>>],
    codegeneracies: Option<&[Vec<LinearMap<S>>]>,
    k: usize,
) -> Result<CheckReport> {
    let mut report = CheckReport::default();
    if k == 0 || k >= levels.len() {
        return Err(Error::invalid(format!("the square at level {k} needs 1 ≤ k ≤ {}", levels.len() - 1)));
    }
    let upper = totalize(levels, cofaces, codegeneracies, k)?;
    let lower = totalize(levels, cofaces, codegeneracies, k - 1)?;
    let ck = upper.factors[k].clone();
    let lk = levels[k].dim();
    let full = standard_simplices(k);
    let boundary = FinComplex::boundary(k).simplices().to_vec();
    let restrict = pull_map::<S>(&full, &boundary, &(0..=k).collect::<Vec<_>>(), lk);

    // φ: Tot_{k−1} → C*(∂Δ_k; L_k), glued from the faces ∂^j_* α_{k−1}
    let lower_simplices = standard_simplices(k - 1);
    let mut gluing = None;
    let phi = LinearMap::from_fn(lower.dim(), boundary.len() * lk, |i| {
        let a = lower.component(&Vector::basis(i), k - 1);
        let mut out = Vector::zero();
        for (t, tau) in boundary.iter().enumerate() {
            let mut value: Option<Vector<usize, S>> = None;
            for j in (0..=k).filter(|j| !tau.contains(j)) {
                let theta = coface_vertices(k, j);
                let local: Vec<usize> = tau.iter().map(|v| theta.iter().position(|w| w == v).unwrap()).collect();
                let s = lower_simplices.iter().position(|x| *x == local).unwrap();
                let pushed = cofaces[k - 1][j].apply(&a.iter().filter(|(key, _)| *key / levels[k - 1].dim() == s).map(|(key, c)| (key % levels[k - 1].dim(), c.clone())).collect());
                match &value {
                    None => value = Some(pushed),
                    Some(v) if *v != pushed && gluing.is_none() => gluing = Some(format!("faces disagree on {tau:?}")),
                    _ => {}
                }
            }
            for (b, c) in value.unwrap_or_default().iter() {
                out.add_term(t * lk + b, c.clone());
            }
        }
        out
    });
    report.push("boundary gluing", lower.dim(), gluing);

    // the fiber product of Tot_{k−1} → Y ← C*(Δ_k; L_k), where Y is C*(∂Δ_k; L_k)
    // or, with codegeneracies, C*(∂Δ_k; L_k) ⊕ C*(Δ_k; L_{k−1})^k
    let mut from_lower = Stack::new(lower.dim());
    let mut from_top = Stack::new(ck.dim());
    from_lower.push(0, &phi, S::one());
    from_top.push(0, &restrict, S::one());
    if let Some(codeg) = codegeneracies {
        let proj = LinearMap::from_fn(lower.dim(), lower.factors[k - 1].dim(), |i| lower.component(&Vector::basis(i), k - 1));
        for i in 0..k {
            let pull = pull_map::<S>(&lower_simplices, &full, &codegeneracy_vertices(k - 1, i), levels[k - 1].dim());
            from_lower.push(0, &pull.compose(&proj), S::one());
            from_top.push(0, &push_map(full.len(), &codeg[k - 1][i]), S::one());
        }
    }
    let (fl, ft) = (from_lower.finish(), from_top.finish());
    let mut pair_basis = Vec::new();
    for i in 0..lower.dim() {
        let e = lower.algebra().space().element(i);
        pair_basis.push(BasisElement::new(format!("a{i}"), e.degree, e.weight));
    }
    for i in 0..ck.dim() {
        let e = ck.space().element(i);
        pair_basis.push(BasisElement::new(format!("b{i}"), e.degree, e.weight));
    }
    let pair_space = GradedSpace::new(pair_basis, ck.nilpotency().max(lower.algebra().nilpotency()))?;
    let diff = LinearMap::from_fn(pair_space.dim(), fl.target_dim, |i| {
        if i < lower.dim() {
            fl.columns[i].clone()
        } else {
            ft.columns[i - lower.dim()].neg()
        }
    });
    let fiber_dims = graded_kernel_dims(&pair_space, &diff);
    let tot_dims = space_dims(upper.algebra().space());
    let iso = (fiber_dims != tot_dims).then(|| format!("Tot_{k} has block dimensions {tot_dims:?}, the fiber product {fiber_dims:?}"));
    report.push("Tot_k ≅ fiber product", upper.dim(), iso);

    let mut lands = None;
    for i in 0..upper.dim() {
        let x = Vector::basis(i);
        let alphas: Vec<_> = (0..k).map(|n| upper.component(&x, n)).collect();
        let Some(a) = lower.from_components(&alphas) else {
            lands = Some(format!("basis element {i} does not restrict into Tot_{}", k - 1));
            break;
        };
        let b = upper.component(&x, k);
        if fl.apply(&a) != ft.apply(&b) {
            lands = Some(format!("basis element {i} does not land in the fiber product"));
            break;
        }
    }
    report.push("Tot_k → fiber product", upper.dim(), lands);

    let down = LinearMap::from_fn(upper.dim(), lower.dim(), |i| {
        let x = Vector::basis(i);
        let alphas: Vec<_> = (0..k).map(|n| upper.component(&x, n)).collect();
        lower.from_components(&alphas).unwrap_or_default()
    });
    match LInftyMorphism::strict(upper.algebra().clone(), lower.algebra().clone(), &down) {
        Ok(m) => report.merge(relabel(check_morphism(&m), "Tot_k → Tot_{k−1} strict")),
        Err(e) => report.push("Tot_k → Tot_{k−1} strict", 0, Some(e.to_string())),
    }
    match upper.projection(k) {
        Ok(m) => report.merge(relabel(check_morphism(&m), "Tot_k → C*(Δ_k; L_k) strict")),
        Err(e) => report.push("Tot_k → C*(Δ_k; L_k) strict", 0, Some(e.to_string())),
    }

    if let Some(codeg) = codegeneracies {
        // N_{k−1} inside Y: matching relations on the C*(Δ_k; L_{k−1})^k part and
        // compatibility with the boundary part
        let y_dim = ft.target_dim;
        let b_dim = boundary.len() * lk;
        let m_dim = full.len() * levels[k - 1].dim();
        let mut n_constraint = Stack::new(y_dim);
        if k >= 2 {
            for j in 1..k {
                for i in 0..j {
                    let si = push_map(full.len(), &codeg[k - 2][i]);
                    let sj = push_map(full.len(), &codeg[k - 2][j - 1]);
                    let row = n_constraint.push(b_dim + j * m_dim, &si, S::one());
                    n_constraint.add(b_dim + i * m_dim, row, &sj, -S::one());
                }
            }
        }
        let restrict_lo = pull_map::<S>(&full, &boundary, &(0..=k).collect::<Vec<_>>(), levels[k - 1].dim());
        for i in 0..k {
            let s_on_boundary = push_map(boundary.len(), &codeg[k - 1][i]);
            let row = n_constraint.push(0, &s_on_boundary, S::one());
            n_constraint.add(b_dim + i * m_dim, row, &restrict_lo, -S::one());
        }
        let nc = n_constraint.finish();
        let n_dim = y_dim - nc.rank();
        let surj = ft.rank();
        let vertical = (surj != n_dim).then(|| format!("C*(Δ_k; L_k) → N_{} has rank {surj}, N has dimension {n_dim}", k - 1));
        report.push("C*(Δ_k; L_k) → N_{k−1} surjective", ck.dim(), vertical);
        let mut inside = None;
        for i in 0..lower.dim() {
            if !nc.apply(&fl.columns[i]).is_zero() {
                inside = Some(format!("Tot_{} basis element {i} does not map into N_{}", k - 1, k - 1));
                break;
            }
        }
        report.push("Tot_{k−1} → N_{k−1}", lower.dim(), inside);
    }
    Ok(report)
}

fn relabel(report: CheckReport, label: &str) -> CheckReport {
    let mut out = CheckReport::default();
    for item in report.items {
        out.push(format!("{label}, {}", item.label), item.checked, item.failure);
    }
    out
}

/// Finite nerve data for a cover: local algebras on the non-empty
/// intersections and restriction maps along codimension-one inclusions.
#[derive(Clone, Debug)]
pub struct CechNerve<S: Scalar> {
    pub opens: usize,
    pub simplices: Vec<(Vec<usize>, Arc<LInftyAlgebra<S>>)>,
    pub restrictions: BTreeMap<(Vec<usize>, Vec<usize>), LinearMap<S>>,
}

impl<S: Scalar> CechNerve<S> {
    /// The same algebra on every simplex of the nerve, with identity restrictions.
    pub fn constant(opens: usize, nerve: &[Vec<usize>], l: Arc<LInftyAlgebra<S>>) -> Result<Self> {
        let complex = FinComplex::generated(opens, nerve)?;
        let simplices: Vec<_> = complex.simplices().iter().map(|s| (s.clone(), l.clone())).collect();
        let mut restrictions = BTreeMap::new();
        for (s, _) in &simplices {
            if s.len() < 2 {
                continue;
            }
            for j in 0..s.len() {
                let mut face = s.clone();
                face.remove(j);
                restrictions.insert((face, s.clone()), LinearMap::identity(l.dim()));
            }
        }
        Ok(Self { opens, simplices, restrictions })
    }
}

/// `L_n = ∏_{|I| = n+1} g_I` with cofaces given by restriction.
pub fn cech_diagram<S: Scalar>(nerve: &CechNerve<S>) -> Result<SemicosimplicialLInfty<S>> {
    let gens: Vec<Vec<usize>> = nerve.simplices.iter().map(|(s, _)| s.clone()).collect();
    let complex = FinComplex::generated(nerve.opens, &gens)?;
    if complex.len() != gens.len() {
        return Err(Error::invalid("the nerve is not closed under faces"));
    }
    let local: BTreeMap<&[usize], &Arc<LInftyAlgebra<S>>> = nerve.simplices.iter().map(|(s, l)| (s.as_slice(), l)).collect();
    let top = complex.dim().unwrap_or(0);
    let by_level: Vec<Vec<Vec<usize>>> = (0..=top).map(|n| complex.simplices().iter().filter(|s| s.len() == n + 1).cloned().collect()).collect();
    let mut levels = Vec::with_capacity(top + 1);
    let mut offsets: Vec<BTreeMap<Vec<usize>, usize>> = Vec::new();
    for sims in &by_level {
        let factors: Vec<_> = sims.iter().map(|s| local[s.as_slice()].clone()).collect();
        let mut offs = BTreeMap::new();
        let mut o = 0;
        for (s, f) in sims.iter().zip(&factors) {
            offs.insert(s.clone(), o);
            o += f.dim();
        }
        offsets.push(offs);
        levels.push(product(&factors)?.0);
    }
    let mut cofaces = Vec::with_capacity(top);
    for n in 1..=top {
        let mut fam = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let mut columns = vec![Vector::zero(); levels[n - 1].dim()];
            for s in &by_level[n] {
                let mut face = s.clone();
                face.remove(j);
                let r = nerve
                    .restrictions
                    .get(&(face.clone(), s.clone()))
                    .ok_or_else(|| Error::invalid(format!("no restriction from {face:?} to {s:?}")))?;
                let (src, tgt) = (offsets[n - 1][&face], offsets[n][s]);
                for (b, col) in r.columns.iter().enumerate() {
                    columns[src + b].add_assign(&col.map_keys(|k| k + tgt));
                }
            }
            fam.push(LinearMap::new(levels[n - 1].dim(), levels[n].dim(), columns)?);
        }
        cofaces.push(fam);
    }
    SemicosimplicialLInfty::new(levels, cofaces)
}

/// A finite category: arrows with source and target, identities and the
/// composition table `compose[(g, f)] = g ∘ f`.
#[derive(Clone, Debug)]
pub struct FiniteCategory {
    objects: usize,
    arrows: Vec<(usize, usize)>,
    identities: Vec<usize>,
    compose: BTreeMap<(usize, usize), usize>,
}

impl FiniteCategory {
    pub fn new(objects: usize, arrows: Vec<(usize, usize)>, identities: Vec<usize>, compose: BTreeMap<(usize, usize), usize>) -> Result<Self> {
        let c = Self { objects, arrows, identities, compose };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        if self.identities.len() != self.objects {
            return Err(Error::invalid("one identity per object is required"));
        }
        for (o, &id) in self.identities.iter().enumerate() {
            if self.arrows.get(id) != Some(&(o, o)) {
                return Err(Error::invalid(format!("arrow {id} is not an endomorphism of object {o}")));
            }
        }
        for (f, &(a, b)) in self.arrows.iter().enumerate() {
            if a >= self.objects || b >= self.objects {
                return Err(Error::invalid(format!("arrow {f} has an unknown endpoint")));
            }
            for (g, &(c, _)) in self.arrows.iter().enumerate() {
                if c == b {
                    let h = self.compose.get(&(g, f)).ok_or_else(|| Error::invalid(format!("missing composite of {g} after {f}")))?;
                    if self.arrows.get(*h) != Some(&(a, self.arrows[g].1)) {
                        return Err(Error::invalid(format!("composite of {g} after {f} has the wrong endpoints")));
                    }
                }
            }
            if self.compose[&(self.identities[b], f)] != f || self.compose[&(f, self.identities[a])] != f {
                return Err(Error::invalid(format!("identities do not act trivially on arrow {f}")));
            }
        }
        for (&(g, f), &gf) in &self.compose {
            for (h, &(c, _)) in self.arrows.iter().enumerate() {
                if c == self.arrows[g].1 && self.compose[&(h, gf)] != self.compose[&(self.compose[&(h, g)], f)] {
                    return Err(Error::invalid("composition is not associative"));
                }
            }
        }
        Ok(())
    }

    /// The poset on `objects` generated by `relations` (`a ≤ b` gives an arrow `a → b`).
    pub fn poset(objects: usize, relations: &[(usize, usize)]) -> Result<Self> {
        let mut le = vec![vec![false; objects]; objects];
        for (o, row) in le.iter_mut().enumerate() {
            row[o] = true;
        }
        for &(a, b) in relations {
            if a >= objects || b >= objects {
                return Err(Error::invalid("relation on an unknown object"));
            }
            le[a][b] = true;
        }
        for m in 0..objects {
            for a in 0..objects {
                for b in 0..objects {
                    if le[a][m] && le[m][b] {
                        le[a][b] = true;
                    }
                }
            }
        }
        for a in 0..objects {
            for b in 0..objects {
                if a != b && le[a][b] && le[b][a] {
                    return Err(Error::invalid("the relations contain a cycle"));
                }
            }
        }
        let mut arrows = Vec::new();
        let mut index = BTreeMap::new();
        for a in 0..objects {
            for b in 0..objects {
                if le[a][b] {
                    index.insert((a, b), arrows.len());
                    arrows.push((a, b));
                }
            }
        }
        let identities = (0..objects).map(|o| index[&(o, o)]).collect();
        let mut compose = BTreeMap::new();
        for (f, &(a, b)) in arrows.iter().enumerate() {
            for (g, &(c, d)) in arrows.iter().enumerate() {
                if c == b {
                    compose.insert((g, f), index[&(a, d)]);
                }
            }
        }
        Self::new(objects, arrows, identities, compose)
    }

    pub fn discrete(objects: usize) -> Result<Self> {
        Self::poset(objects, &[])
    }

    pub fn objects(&self) -> usize {
        self.objects
    }

    pub fn arrows(&self) -> &[(usize, usize)] {
        &self.arrows
    }

    pub fn identity(&self, object: usize) -> usize {
        self.identities[object]
    }

    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        self.compose.get(&(g, f)).copied()
    }

    /// Strings `i_0 → ⋯ → i_n` of `n` composable arrows, as (start, arrows).
    pub fn strings(&self, n: usize) -> Vec<(usize, Vec<usize>)> {
        let mut out: Vec<(usize, Vec<usize>)> = (0..self.objects).map(|o| (o, Vec::new())).collect();
        for _ in 0..n {
            let mut next = Vec::new();
            for (start, arrows) in &out {
                let end = arrows.last().map(|&a| self.arrows[a].1).unwrap_or(*start);
                for (g, &(src, _)) in self.arrows.iter().enumerate() {
                    if src == end {
                        let mut s = arrows.clone();
                        s.push(g);
                        next.push((*start, s));
                    }
                }
            }
            out = next;
        }
        out.sort();
        out
    }

    fn end(&self, string: &(usize, Vec<usize>)) -> usize {
        string.1.last().map(|&a| self.arrows[a].1).unwrap_or(string.0)
    }
}

/// A functor from a finite category to L∞ algebras and strict morphisms.
#[derive(Clone, Debug)]
pub struct DiagramOverS<S: Scalar> {
    category: FiniteCategory,
    algebras: Vec<Arc<LInftyAlgebra<S>>>,
    maps: Vec<LinearMap<S>>,
}

impl<S: Scalar> DiagramOverS<S> {
    pub fn new(category: FiniteCategory, algebras: Vec<Arc<LInftyAlgebra<S>>>, maps: Vec<LinearMap<S>>) -> Result<Self> {
        if algebras.len() != category.objects || maps.len() != category.arrows.len() {
            return Err(Error::mismatch("the functor does not match the category"));
        }
        for (f, &(a, b)) in category.arrows.iter().enumerate() {
            if maps[f].source_dim != algebras[a].dim() || maps[f].target_dim != algebras[b].dim() {
                return Err(Error::mismatch(format!("F of arrow {f} has the wrong shape")));
            }
            strict_checked(&algebras[a], &algebras[b], &maps[f], &format!("F of arrow {f}"))?;
        }
        for (o, &id) in category.identities.iter().enumerate() {
            if maps[id] != LinearMap::identity(algebras[o].dim()) {
                return Err(Error::check(format!("F does not preserve the identity of object {o}")));
            }
        }
        for (&(g, f), &gf) in &category.compose {
            if maps[gf] != maps[g].compose(&maps[f]) {
                return Err(Error::check(format!("F({g} ∘ {f}) ≠ F({g}) ∘ F({f})")));
            }
        }
        Ok(Self { category, algebras, maps })
    }

    pub fn category(&self) -> &FiniteCategory {
        &self.category
    }

    pub fn algebra(&self, object: usize) -> &Arc<LInftyAlgebra<S>> {
        &self.algebras[object]
    }
}

/// `Π(F)_n = ∏_{i_0 → ⋯ → i_n} F(i_n)` for `n ≤ k_max`, with the cofaces
/// (drop the first arrow, compose two arrows, drop the last arrow and apply
/// `F`) and codegeneracies (insert an identity).
pub fn cosimplicial_replacement<S: Scalar>(d: &DiagramOverS<S>, k_max: usize) -> Result<CosimplicialLInfty<S>> {
    let cat = &d.category;
    let strings: Vec<Vec<(usize, Vec<usize>)>> = (0..=k_max).map(|n| cat.strings(n)).collect();
    let mut levels = Vec::with_capacity(k_max + 1);
    let mut offsets: Vec<BTreeMap<(usize, Vec<usize>), usize>> = Vec::new();
    for strs in &strings {
        let factors: Vec<_> = strs.iter().map(|s| d.algebras[cat.end(s)].clone()).collect();
        let mut offs = BTreeMap::new();
        let mut o = 0;
        for (s, f) in strs.iter().zip(&factors) {
            offs.insert(s.clone(), o);
            o += f.dim();
        }
        offsets.push(offs);
        levels.push(product(&factors)?.0);
    }
    let mut cofaces = Vec::with_capacity(k_max);
    for n in 1..=k_max {
        let mut fam = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let mut columns = vec![Vector::zero(); levels[n - 1].dim()];
            for t in &strings[n] {
                let (start, arrows) = t;
                let (source, map): ((usize, Vec<usize>), Option<usize>) = if j == 0 {
                    ((cat.arrows[arrows[0]].1, arrows[1..].to_vec()), None)
                } else if j == n {
                    ((*start, arrows[..n - 1].to_vec()), Some(arrows[n - 1]))
                } else {
                    let mut a = arrows[..j - 1].to_vec();
                    a.push(cat.compose(arrows[j], arrows[j - 1]).expect("composable string"));
                    a.extend_from_slice(&arrows[j + 1..]);
                    ((*start, a), None)
                };
                let (src, tgt) = (offsets[n - 1][&source], offsets[n][t]);
                let dim = d.algebras[cat.end(&source)].dim();
                for b in 0..dim {
                    let v = match map {
                        Some(f) => d.maps[f].columns[b].clone(),
                        None => Vector::basis(b),
                    };
                    columns[src + b].add_assign(&v.map_keys(|k| k + tgt));
                }
            }
            fam.push(LinearMap::new(levels[n - 1].dim(), levels[n].dim(), columns)?);
        }
        cofaces.push(fam);
    }
    let mut codegeneracies = Vec::with_capacity(k_max);
    for n in 0..k_max {
        let mut fam = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let mut columns = vec![Vector::zero(); levels[n + 1].dim()];
            for t in &strings[n] {
                let (start, arrows) = t;
                let object = if j == 0 { *start } else { cat.arrows[arrows[j - 1]].1 };
                let mut a = arrows[..j].to_vec();
                a.push(cat.identity(object));
                a.extend_from_slice(&arrows[j..]);
                let source = (*start, a);
                let (src, tgt) = (offsets[n + 1][&source], offsets[n][t]);
                for b in 0..d.algebras[cat.end(t)].dim() {
                    columns[src + b].add_term(tgt + b, S::one());
                }
            }
            fam.push(LinearMap::new(levels[n + 1].dim(), levels[n].dim(), columns)?);
        }
        codegeneracies.push(fam);
    }
    CosimplicialLInfty::new(levels, cofaces, codegeneracies)
}

/// `holim_k(F) = Tot_k(Π(F))`.
pub fn holim_k<S: Scalar>(d: &DiagramOverS<S>, k: usize) -> Result<Totalization<S>> {
    cosimplicial_replacement(d, k)?.tot_k(k)
}

/// Cohomology of `holim_k` and `holim_{k+1}` (indexed by classical degree);
/// `None` when they differ, i.e. the tower has not visibly stabilized.
pub fn holim_stable_cohomology<S: Scalar>(d: &DiagramOverS<S>, k: usize) -> Result<Option<BTreeMap<i32, usize>>> {
    let a = classical_cohomology(holim_k(d, k)?.algebra());
    let b = classical_cohomology(holim_k(d, k + 1)?.algebra());
    Ok((a == b).then_some(a))
}

/// Non-zero cohomology dimensions of the tangent complex, by classical degree.
pub fn classical_cohomology<S: Scalar>(l: &LInftyAlgebra<S>) -> BTreeMap<i32, usize> {
    tangent_cohomology(l).into_iter().filter(|&(_, d)| d > 0).map(|(k, d)| (k + 1, d)).collect()
}

/// One row of [`abelian_descent_check`] for `π_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DescentRow {
    pub i: usize,
    /// `dim H^{1−i}(Tot(L•))`.
    pub tot_cohomology: usize,
    /// `dim π_i` of `Del∞(Tot(L•))` through the Moore complex.
    pub moore: usize,
    /// `dim H^{1−i}` of the total complex `⊕_n L_n[−n]` with `δ + (−1)^n q₁`.
    pub double_complex: usize,
}

impl DescentRow {
    pub fn agrees(&self) -> bool {
        self.tot_cohomology == self.moore && self.moore == self.double_complex
    }
}

/// Compares `π_i` and `H^{1−i}` of the totalization with the cohomology of
/// the associated double complex, for `0 ≤ i ≤ max_i`.
pub fn abelian_descent_check<S: Scalar>(d: &SemicosimplicialLInfty<S>, max_i: usize) -> Result<Vec<DescentRow>> {
    if d.levels.iter().any(|l| !l.is_abelian()) {
        return Err(Error::invalid("descent check needs abelian levels"));
    }
    let tot = d.tot()?;
    let h = tangent_cohomology(tot.algebra());
    let double = double_complex_cohomology(d);
    let mut rows = Vec::with_capacity(max_i + 1);
    for i in 0..=max_i {
        let moore = abelian_homotopy_groups(tot.algebra().clone(), i)?;
        rows.push(DescentRow {
            i,
            tot_cohomology: h.get(&-(i as i32)).copied().unwrap_or(0),
            moore: moore.moore,
            double_complex: double.get(&-(i as i32)).copied().unwrap_or(0),
        });
    }
    Ok(rows)
}

/// Cohomology of `⊕_n L_n` (with `L_n` shifted up by `n`) under `Σ_j (−1)^j ∂^j + (−1)^n q₁`,
/// by shifted total degree.
pub fn double_complex_cohomology<S: Scalar>(d: &SemicosimplicialLInfty<S>) -> BTreeMap<i32, usize> {
    let mut offsets = Vec::new();
    let mut degrees = Vec::new();
    for (n, l) in d.levels.iter().enumerate() {
        offsets.push(degrees.len());
        for k in 0..l.dim() {
            degrees.push(l.degree(&k) + n as i32);
        }
    }
    let total = degrees.len();
    let mut columns = vec![Vector::zero(); total];
    for (n, l) in d.levels.iter().enumerate() {
        let q1 = l.differential();
        let sign = S::sign(n % 2 == 1);
        for k in 0..l.dim() {
            columns[offsets[n] + k].axpy(&sign, &q1.columns[k].map_keys(|x| x + offsets[n]));
            if n < d.n_max() {
                for j in 0..=n + 1 {
                    let c = &d.coface(n + 1, j).columns[k];
                    columns[offsets[n] + k].axpy(&S::sign(j % 2 == 1), &c.map_keys(|x| x + offsets[n + 1]));
                }
            }
        }
    }
    let map = LinearMap { source_dim: total, target_dim: total, columns };
    let mut by_degree: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (i, &g) in degrees.iter().enumerate() {
        by_degree.entry(g).or_default().push(i);
    }
    let ranks: BTreeMap<i32, usize> = by_degree.iter().map(|(&g, idx)| (g, map.restrict(idx).rank())).collect();
    by_degree
        .iter()
        .map(|(&g, idx)| (g, idx.len() - ranks[&g] - ranks.get(&(g - 1)).copied().unwrap_or(0)))
        .collect()
}
