//! Non-degenerate simplicial cochains `C*(X; L)` on finite ordered simplicial
//! complexes, with the L∞ structure transferred from `Ω(Δ_n) ⊗ L` along
//! Dupont's contraction and glued simplex by simplex.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::forms::{standard_simplices, DupontForms, FormMonomial, PolyForm};
use crate::graded::{canonicalize, odd, BasisElement, GradedBasis, GradedSpace};
use crate::linalg::LinearMap;
use crate::linfty::{is_mc, LInftyAlgebra, LInftyMorphism, LInftyStructure};
use crate::multilinear::MultilinearMap;
use crate::scalar::Scalar;
use crate::transfer::{Contraction, Transfer};
use crate::vector::Vector;

/// A finite simplicial complex on the ordered vertex set `0..vertices`, given
/// by its non-degenerate simplices (sorted vertex lists, closed under faces).
#[derive(Clone, PartialEq, Eq)]
pub struct FinComplex {
    vertices: usize,
    simplices: Vec<Vec<usize>>,
    index: BTreeMap<Vec<usize>, usize>,
}

impl fmt::Debug for FinComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FinComplex").field("vertices", &self.vertices).field("simplices", &self.simplices).finish()
    }
}

fn simplex_order(a: &Vec<usize>, b: &Vec<usize>) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

impl FinComplex {
    /// The complex generated by `generators` and all their faces.
    pub fn generated(vertices: usize, generators: &[Vec<usize>]) -> Result<Self> {
        let mut set = BTreeSet::new();
        for g in generators {
            if g.is_empty() || g.windows(2).any(|w| w[0] >= w[1]) || g.iter().any(|&v| v >= vertices) {
                return Err(Error::invalid(format!("{g:?} is not an increasing list of vertices below {vertices}")));
            }
            let k = g.len();
            for mask in 1u64..(1u64 << k) {
                set.insert((0..k).filter(|&j| mask >> j & 1 == 1).map(|j| g[j]).collect::<Vec<_>>());
            }
        }
        Ok(Self::from_set(vertices, set))
    }

    fn from_set(vertices: usize, set: BTreeSet<Vec<usize>>) -> Self {
        let mut simplices: Vec<Vec<usize>> = set.into_iter().collect();
        simplices.sort_by(simplex_order);
        let index = simplices.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        Self { vertices, simplices, index }
    }

    /// `Δ_n`.
    pub fn simplex(n: usize) -> Self {
        Self::from_set(n + 1, standard_simplices(n).into_iter().collect())
    }

    /// `∂Δ_n`.
    pub fn boundary(n: usize) -> Self {
        let all = (0..=n).collect::<Vec<_>>();
        Self::from_set(n + 1, standard_simplices(n).into_iter().filter(|s| *s != all).collect())
    }

    /// The horn `Λ^n_k`: `∂Δ_n` without the face opposite to `k`.
    pub fn horn(n: usize, k: usize) -> Result<Self> {
        if k > n || n == 0 {
            return Err(Error::invalid(format!("no horn Λ^{n}_{k}")));
        }
        let gens: Vec<Vec<usize>> = (0..=n).filter(|&j| j != k).map(|j| (0..=n).filter(|&v| v != j).collect()).collect();
        Self::generated(n + 1, &gens)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices
    }

    /// Simplices ordered by dimension, then lexicographically.
    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn index_of(&self, simplex: &[usize]) -> Option<usize> {
        self.index.get(simplex).copied()
    }

    pub fn contains(&self, simplex: &[usize]) -> bool {
        self.index.contains_key(simplex)
    }

    pub fn dim(&self) -> Option<usize> {
        self.simplices.last().map(|s| s.len() - 1)
    }

    pub fn is_subcomplex_of(&self, other: &FinComplex) -> bool {
        self.vertices <= other.vertices && self.simplices.iter().all(|s| other.contains(s))
    }

    /// Simplices that are not faces of larger simplices.
    pub fn facets(&self) -> Vec<Vec<usize>> {
        self.simplices
            .iter()
            .filter(|s| !self.simplices.iter().any(|t| t.len() > s.len() && s.iter().all(|v| t.contains(v))))
            .cloned()
            .collect()
    }
}

fn simplex_label(vertices: usize, s: &[usize]) -> String {
    let sep = if vertices > 10 { "." } else { "" };
    format!("e{}", s.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(sep))
}

/// Graded space of cochains: basis `e_σ ⊗ b` in degree `dim σ + deg b`.
pub fn cochain_space(x: &FinComplex, coefficients: &GradedSpace) -> Result<GradedSpace> {
    let mut basis = Vec::with_capacity(x.len() * coefficients.dim());
    for s in x.simplices() {
        for b in coefficients.basis() {
            let name = format!("{}⊗{}", simplex_label(x.vertex_count(), s), b.name);
            basis.push(BasisElement::new(name, b.degree + s.len() as i32 - 1, b.weight));
        }
    }
    GradedSpace::new(basis, coefficients.nilpotency())
}

/// `Ω(Δ_n) ⊗ L` with `q₁(ω⊗x) = dω⊗x + (−1)^{|ω|} ω⊗q₁x` and
/// `q_k(ω₁⊗x₁, …) = ±(ω₁∧⋯∧ω_k) ⊗ q_k(x₁, …, x_k)` for `k ≥ 2`.
#[derive(Clone, Debug)]
pub struct FormAlgebra<S: Scalar> {
    n: usize,
    coefficients: Arc<LInftyAlgebra<S>>,
}

impl<S: Scalar> FormAlgebra<S> {
    pub fn new(n: usize, coefficients: Arc<LInftyAlgebra<S>>) -> Self {
        Self { n, coefficients }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn coefficients(&self) -> &Arc<LInftyAlgebra<S>> {
        &self.coefficients
    }

    /// `a ⊗ x` as a vector of keys.
    pub fn tensor(&self, a: &PolyForm<S>, x: &Vector<usize, S>) -> Vector<(FormMonomial, usize), S> {
        let mut out = Vector::zero();
        for (m, c) in a.terms().iter() {
            for (b, d) in x.iter() {
                out.add_term((m.clone(), *b), c.clone() * d.clone());
            }
        }
        out
    }
}

impl<S: Scalar> GradedBasis for FormAlgebra<S> {
    type Key = (FormMonomial, usize);

    fn degree(&self, key: &Self::Key) -> i32 {
        key.0.degree() as i32 + self.coefficients.degree(&key.1)
    }

    fn weight(&self, key: &Self::Key) -> u32 {
        self.coefficients.weight(&key.1)
    }

    fn nilpotency(&self) -> u32 {
        self.coefficients.nilpotency()
    }
}

impl<S: Scalar> LInftyStructure<S> for FormAlgebra<S> {
    fn bracket(&self, m: &[Self::Key]) -> Vector<Self::Key, S> {
        let l = &self.coefficients;
        if m.len() == 1 {
            let (w, x) = &m[0];
            let form = PolyForm::monomial(self.n, w.clone());
            let mut out = self.tensor(&form.d(), &Vector::basis(*x));
            let q1 = l.bracket(std::slice::from_ref(x));
            let sign = S::sign(odd(w.degree() as i32));
            out.add_assign(&self.tensor(&form, &q1).scaled(&sign));
            return out;
        }
        let mut form = PolyForm::constant(self.n, S::one());
        let mut parity = false;
        let mut seen = 0i32;
        for (w, x) in m {
            let wd = w.degree() as i32;
            parity ^= odd(wd) && odd(seen);
            parity ^= odd(wd);
            seen += l.degree(x);
            form = form.wedge(&PolyForm::monomial(self.n, w.clone()));
            if form.is_zero() {
                return Vector::zero();
            }
        }
        let Some((canon, p)) = canonicalize(l.as_ref(), m.iter().map(|k| k.1).collect()) else {
            return Vector::zero();
        };
        let value = l.bracket(&canon);
        self.tensor(&form, &value).scaled(&S::sign(parity ^ p))
    }
}

/// Dupont's contraction tensored with the identity of `L`:
/// `(E ⊗ 1, I ⊗ 1, K ⊗ 1)` from `Ω(Δ_n) ⊗ L` onto `C*(Δ_n; L)`.
pub struct DupontContraction<S: Scalar> {
    forms: DupontForms<S>,
    big: FormAlgebra<S>,
    small: GradedSpace,
}

impl<S: Scalar> DupontContraction<S> {
    pub fn new(n: usize, coefficients: Arc<LInftyAlgebra<S>>) -> Result<Self> {
        let small = cochain_space(&FinComplex::simplex(n), coefficients.space())?;
        Ok(Self { forms: DupontForms::new(n), big: FormAlgebra::new(n, coefficients), small })
    }

    pub fn forms(&self) -> &DupontForms<S> {
        &self.forms
    }

    fn coefficient_dim(&self) -> usize {
        self.big.coefficients.dim()
    }
}

impl<S: Scalar> Contraction<S> for DupontContraction<S> {
    type Big = FormAlgebra<S>;

    fn big(&self) -> &FormAlgebra<S> {
        &self.big
    }

    fn small(&self) -> &GradedSpace {
        &self.small
    }

    fn include(&self, w: usize) -> Vector<(FormMonomial, usize), S> {
        let d = self.coefficient_dim();
        self.big.tensor(self.forms.extend(w / d), &Vector::basis(w % d))
    }

    fn project(&self, v: &(FormMonomial, usize)) -> Vector<usize, S> {
        let d = self.coefficient_dim();
        self.forms.integrate_monomial(&v.0).map_keys(|s| s * d + v.1)
    }

    fn homotopy(&self, v: &(FormMonomial, usize)) -> Vector<(FormMonomial, usize), S> {
        self.big.tensor(&self.forms.homotopy_monomial(&v.0), &Vector::basis(v.1))
    }
}

pub type DupontTransfer<S> = Transfer<S, DupontContraction<S>>;

/// The transfer data for `C*(Δ_n; L)`.
pub fn dupont_transfer<S: Scalar>(n: usize, coefficients: Arc<LInftyAlgebra<S>>) -> Result<DupontTransfer<S>> {
    Transfer::new(DupontContraction::new(n, coefficients)?)
}

/// The algebra `C*(Δ_n; L)` alone.
pub fn standard_cochains<S: Scalar>(n: usize, coefficients: Arc<LInftyAlgebra<S>>) -> Result<Arc<LInftyAlgebra<S>>> {
    Ok(dupont_transfer(n, coefficients)?.small_algebra().clone())
}

/// `C*(X; L)` together with the structures on the standard simplices used to
/// assemble it.
#[derive(Clone, Debug)]
pub struct CochainAlgebra<S: Scalar> {
    complex: FinComplex,
    coefficients: Arc<LInftyAlgebra<S>>,
    algebra: Arc<LInftyAlgebra<S>>,
    standard: Vec<Arc<LInftyAlgebra<S>>>,
}

/// `C*(Δ_n; L)` by transfer along Dupont's contraction.
pub fn cochain_structure<S: Scalar>(n: usize, coefficients: Arc<LInftyAlgebra<S>>) -> Result<CochainAlgebra<S>> {
    let mut standard = Vec::with_capacity(n + 1);
    for d in 0..=n {
        standard.push(dupont_transfer(d, coefficients.clone())?.small_algebra().clone());
    }
    let algebra = standard[n].clone();
    Ok(CochainAlgebra { complex: FinComplex::simplex(n), coefficients, algebra, standard })
}

/// `C*(X; L)` for a subcomplex `X` of a standard simplex, glued from the
/// structures on its simplices: the `σ`-component of `q_k(β₁, …, β_k)` is the
/// top component of `q_k` on `Δ_{dim σ}` evaluated on the restrictions `β_i|_σ`.
pub fn subcomplex_structure<S: Scalar>(x: &FinComplex, coefficients: Arc<LInftyAlgebra<S>>) -> Result<CochainAlgebra<S>> {
    let top = x.dim().ok_or_else(|| Error::invalid("empty complex"))?;
    let mut standard = Vec::with_capacity(top + 1);
    for d in 0..=top {
        standard.push(dupont_transfer(d, coefficients.clone())?.small_algebra().clone());
    }
    glue(x, coefficients, standard)
}

fn glue<S: Scalar>(x: &FinComplex, coefficients: Arc<LInftyAlgebra<S>>, standard: Vec<Arc<LInftyAlgebra<S>>>) -> Result<CochainAlgebra<S>> {
    let space = cochain_space(x, coefficients.space())?;
    let d = coefficients.dim();
    let bound = space.arity_bound();
    let mut taylor: Vec<MultilinearMap<S>> = (1..=bound).map(|i| MultilinearMap::zero(i, 1)).collect();
    for (sidx, sigma) in x.simplices().iter().enumerate() {
        let local = &standard[sigma.len() - 1];
        let local_simplices = standard_simplices(sigma.len() - 1);
        let top = local_simplices.len() - 1;
        let relabel: Vec<usize> = local_simplices
            .iter()
            .map(|t| x.index_of(&t.iter().map(|&v| sigma[v]).collect::<Vec<_>>()).expect("faces of a simplex of X"))
            .collect();
        for (i, q) in taylor.iter_mut().enumerate() {
            for (mono, value) in local.q(i + 1).entries() {
                let out: Vector<usize, S> = value
                    .iter()
                    .filter(|(k, _)| *k / d == top)
                    .map(|(k, c)| (sidx * d + k % d, c.clone()))
                    .collect();
                if out.is_zero() {
                    continue;
                }
                let keys = mono.iter().map(|&k| relabel[k / d] * d + k % d).collect();
                let (canon, p) = canonicalize(&space, keys).expect("relabelling preserves non-vanishing");
                q.add(canon, &if p { out.neg() } else { out });
            }
        }
    }
    let algebra = Arc::new(LInftyAlgebra::new(space, taylor)?);
    Ok(CochainAlgebra { complex: x.clone(), coefficients, algebra, standard })
}

impl<S: Scalar> CochainAlgebra<S> {
    pub fn complex(&self) -> &FinComplex {
        &self.complex
    }

    pub fn coefficients(&self) -> &Arc<LInftyAlgebra<S>> {
        &self.coefficients
    }

    pub fn algebra(&self) -> &Arc<LInftyAlgebra<S>> {
        &self.algebra
    }

    /// `C*(Δ_k; L)` for `k ≤ dim X`.
    pub fn standard(&self, k: usize) -> Option<&Arc<LInftyAlgebra<S>>> {
        self.standard.get(k)
    }

    /// The same coefficients on another subcomplex, reusing the simplex structures.
    pub fn on_subcomplex(&self, y: &FinComplex) -> Result<CochainAlgebra<S>> {
        match y.dim() {
            Some(k) if k < self.standard.len() => glue(y, self.coefficients.clone(), self.standard[..=k].to_vec()),
            Some(_) => subcomplex_structure(y, self.coefficients.clone()),
            None => Err(Error::invalid("empty complex")),
        }
    }

    /// Index of `e_σ ⊗ b`.
    pub fn index(&self, simplex: &[usize], b: usize) -> Option<usize> {
        self.complex.index_of(simplex).map(|s| s * self.coefficients.dim() + b)
    }

    /// `(σ, b)` for a basis index.
    pub fn split(&self, i: usize) -> (&[usize], usize) {
        let d = self.coefficients.dim();
        (&self.complex.simplices()[i / d], i % d)
    }

    /// The cochain `Σ e_σ ⊗ x_σ`.
    pub fn cochain(&self, values: &[(Vec<usize>, Vector<usize, S>)]) -> Result<Vector<usize, S>> {
        let mut out = Vector::zero();
        for (s, x) in values {
            let base = self.index(s, 0).ok_or_else(|| Error::invalid(format!("{s:?} is not a simplex")))?;
            for (b, c) in x.iter() {
                out.add_term(base + b, c.clone());
            }
        }
        Ok(out)
    }

    /// The coefficient `x_σ` of a cochain.
    pub fn value(&self, x: &Vector<usize, S>, simplex: &[usize]) -> Result<Vector<usize, S>> {
        let s = self.complex.index_of(simplex).ok_or_else(|| Error::invalid(format!("{simplex:?} is not a simplex")))?;
        let d = self.coefficients.dim();
        Ok(x.iter().filter(|(k, _)| *k / d == s).map(|(k, c)| (k % d, c.clone())).collect())
    }

    /// Restriction along the face `σ ↪ X`, as a cochain on `Δ_{dim σ}`.
    pub fn restrict(&self, x: &Vector<usize, S>, simplex: &[usize]) -> Result<Vector<usize, S>> {
        if !self.complex.contains(simplex) {
            return Err(Error::invalid(format!("{simplex:?} is not a simplex")));
        }
        let d = self.coefficients.dim();
        let mut out = Vector::zero();
        for (j, t) in standard_simplices(simplex.len() - 1).iter().enumerate() {
            let face: Vec<usize> = t.iter().map(|&v| simplex[v]).collect();
            for (b, c) in self.value(x, &face)?.iter() {
                out.add_term(j * d + b, c.clone());
            }
        }
        Ok(out)
    }
}

/// The strict morphism `C*(Y; L) → C*(X; L)` induced by a simplicial map
/// `X → Y` given on vertices; simplices with degenerate image pull back to zero.
pub fn pullback<S: Scalar>(y: &CochainAlgebra<S>, x: &CochainAlgebra<S>, vertex_map: &[usize]) -> Result<LInftyMorphism<S>> {
    if y.coefficients.space() != x.coefficients.space() {
        return Err(Error::mismatch("different coefficient algebras"));
    }
    if vertex_map.len() != x.complex.vertex_count() {
        return Err(Error::mismatch(format!("vertex map of length {} on {} vertices", vertex_map.len(), x.complex.vertex_count())));
    }
    let d = x.coefficients.dim();
    let mut columns = vec![Vector::zero(); y.algebra.dim()];
    for (sidx, sigma) in x.complex.simplices().iter().enumerate() {
        let image: Vec<usize> = sigma.iter().map(|&v| vertex_map[v]).collect();
        if image.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::invalid(format!("the vertex map reverses the order on {sigma:?}")));
        }
        let mut face = image.clone();
        face.dedup();
        let t = y.complex.index_of(&face).ok_or_else(|| Error::invalid(format!("image {face:?} of {sigma:?} is not a simplex")))?;
        if face.len() == image.len() {
            for b in 0..d {
                columns[t * d + b].add_term(sidx * d + b, S::one());
            }
        }
    }
    let linear = LinearMap::new(y.algebra.dim(), x.algebra.dim(), columns)?;
    LInftyMorphism::strict(y.algebra.clone(), x.algebra.clone(), &linear)
}

/// `C*(X; φ)` for a strict morphism `φ: L → M`.
pub fn pushforward_strict<S: Scalar>(phi: &LInftyMorphism<S>, source: &CochainAlgebra<S>, target: &CochainAlgebra<S>) -> Result<LInftyMorphism<S>> {
    if !phi.is_strict() {
        return Err(Error::invalid("the coefficient morphism is not strict"));
    }
    if source.complex != target.complex {
        return Err(Error::mismatch("different complexes"));
    }
    if phi.source_algebra().space() != source.coefficients.space() || phi.target_algebra().space() != target.coefficients.space() {
        return Err(Error::mismatch("coefficients do not match the morphism"));
    }
    let lin = phi.linear_part();
    let (dl, dm) = (source.coefficients.dim(), target.coefficients.dim());
    let linear = LinearMap::from_fn(source.algebra.dim(), target.algebra.dim(), |i| lin.columns[i % dl].map_keys(|b| (i / dl) * dm + b));
    LInftyMorphism::strict(source.algebra.clone(), target.algebra.clone(), &linear)
}

/// The restrictions `α|_σ ∈ MC(C*(Δ_{dim σ}; L))` of a Maurer-Cartan cochain,
/// one per simplex of `X`.
pub fn mc_to_simplicial_map<S: Scalar>(c: &CochainAlgebra<S>, alpha: &Vector<usize, S>) -> Result<Vec<(Vec<usize>, Vector<usize, S>)>> {
    if !is_mc(c.algebra.as_ref(), alpha) {
        return Err(Error::NotMaurerCartan("the cochain does not satisfy the Maurer-Cartan equation".into()));
    }
    c.complex.simplices().iter().map(|s| Ok((s.clone(), c.restrict(alpha, s)?))).collect()
}

/// Inverse of [`mc_to_simplicial_map`]: glues a compatible family of
/// Maurer-Cartan elements on the simplices of `X`.
pub fn mc_from_family<S: Scalar>(c: &CochainAlgebra<S>, family: &[(Vec<usize>, Vector<usize, S>)]) -> Result<Vector<usize, S>> {
    let d = c.coefficients.dim();
    let given: BTreeMap<&[usize], &Vector<usize, S>> = family.iter().map(|(s, x)| (s.as_slice(), x)).collect();
    let mut out = Vector::zero();
    for (sidx, s) in c.complex.simplices().iter().enumerate() {
        let x = given.get(s.as_slice()).ok_or_else(|| Error::invalid(format!("no value on {s:?}")))?;
        let local = &c.standard[s.len() - 1];
        if !is_mc(local.as_ref(), x) {
            return Err(Error::NotMaurerCartan(format!("value on {s:?}")));
        }
        let top = standard_simplices(s.len() - 1).len() - 1;
        for (k, coef) in x.iter() {
            if k / d == top {
                out.add_term(sidx * d + k % d, coef.clone());
            }
        }
    }
    for (s, x) in family {
        if c.restrict(&out, s)? != *x {
            return Err(Error::invalid(format!("the family is not compatible on the faces of {s:?}")));
        }
    }
    Ok(out)
}
