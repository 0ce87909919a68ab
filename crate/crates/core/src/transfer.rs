//! Complete contractions, homotopy transfer of L∞ structures and the formal
//! Kuranishi correspondence.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::graded::{
    as_sym, koszul_parity, permutations, sym_mul, sym_power, GradedBasis, GradedSpace, Key, SymTensor,
};
use crate::linalg::LinearMap;
use crate::linfty::{
    bracket_sym, coderivation_component, curvature, partition_component, CheckReport, LInftyAlgebra, LInftyStructure,
    TaylorMap,
};
use crate::multilinear::MultilinearMap;
use crate::scalar::Scalar;
use crate::vector::Vector;

/// A complete contraction `(f₁, g₁, K)` from the tangent complex of an L∞
/// algebra onto a finite graded space `W`:
/// `g₁f₁ = id`, `Kq₁ + q₁K = f₁g₁ − id`, `Kf₁ = K² = g₁K = 0`.
pub trait Contraction<S: Scalar> {
    type Big: LInftyStructure<S>;

    fn big(&self) -> &Self::Big;
    fn small(&self) -> &GradedSpace;
    fn include(&self, w: usize) -> Vector<Key<Self::Big>, S>;
    fn project(&self, v: &Key<Self::Big>) -> Vector<usize, S>;
    fn homotopy(&self, v: &Key<Self::Big>) -> Vector<Key<Self::Big>, S>;

    fn include_vec(&self, w: &Vector<usize, S>) -> Vector<Key<Self::Big>, S> {
        w.map_linear(|&k| self.include(k))
    }

    fn project_vec(&self, v: &Vector<Key<Self::Big>, S>) -> Vector<usize, S> {
        v.map_linear(|k| self.project(k))
    }

    fn homotopy_vec(&self, v: &Vector<Key<Self::Big>, S>) -> Vector<Key<Self::Big>, S> {
        v.map_linear(|k| self.homotopy(k))
    }

    /// `q₁` on the big side.
    fn big_differential(&self, v: &Vector<Key<Self::Big>, S>) -> Vector<Key<Self::Big>, S> {
        v.map_linear(|k| self.big().bracket(std::slice::from_ref(k)))
    }

    /// `r₁ = g₁ q₁ f₁`.
    fn small_differential(&self, w: usize) -> Vector<usize, S> {
        self.project_vec(&self.big_differential(&self.include(w)))
    }
}

/// Checks the contraction identities on every basis element of `W` and on the
/// given sample of big-side keys.
pub fn check_contraction<S: Scalar, C: Contraction<S>>(c: &C, big_samples: &[Key<C::Big>]) -> CheckReport {
    let mut report = CheckReport::default();
    let small = c.small();
    let mut fail = |label: &str, checked: usize, f: Option<String>| report.push(label, checked, f);

    let mut gf = None;
    let mut kf = None;
    let mut fchain = None;
    let mut fweight = None;
    for w in 0..small.dim() {
        let fw = c.include(w);
        if gf.is_none() && c.project_vec(&fw) != Vector::basis(w) {
            gf = Some(format!("g f({}) = {:?}", small.name(w), c.project_vec(&fw)));
        }
        if kf.is_none() && !c.homotopy_vec(&fw).is_zero() {
            kf = Some(format!("K f({}) ≠ 0", small.name(w)));
        }
        let lhs = c.big_differential(&fw);
        let rhs = c.include_vec(&c.small_differential(w));
        if fchain.is_none() && lhs != rhs {
            fchain = Some(format!("q f ≠ f r on {}", small.name(w)));
        }
        if fweight.is_none() && fw.keys().any(|k| c.big().weight(k) != small.weight(&w)) {
            fweight = Some(format!("f does not preserve the weight of {}", small.name(w)));
        }
    }
    fail("g f = id", small.dim(), gf);
    fail("K f = 0", small.dim(), kf);
    fail("f chain map", small.dim(), fchain);
    fail("f weight", small.dim(), fweight);

    let mut homotopy = None;
    let mut kk = None;
    let mut gk = None;
    let mut gchain = None;
    let mut weights = None;
    for v in big_samples {
        let x = Vector::basis(v.clone());
        let kx = c.homotopy(v);
        let dx = c.big_differential(&x);
        let mut lhs = c.homotopy_vec(&dx);
        lhs.add_assign(&c.big_differential(&kx));
        let mut rhs = c.include_vec(&c.project(v));
        rhs.sub_assign(&x);
        if homotopy.is_none() && lhs != rhs {
            homotopy = Some(format!("Kq + qK ≠ fg − id on {:?}: {:?} vs {:?}", v, lhs, rhs));
        }
        if kk.is_none() && !c.homotopy_vec(&kx).is_zero() {
            kk = Some(format!("K² ≠ 0 on {:?}", v));
        }
        if gk.is_none() && !c.project_vec(&kx).is_zero() {
            gk = Some(format!("g K ≠ 0 on {:?}", v));
        }
        let gdx = c.project_vec(&dx);
        let rgx = c.project(v).map_linear(|&w| c.small_differential(w));
        if gchain.is_none() && gdx != rgx {
            gchain = Some(format!("g q ≠ r g on {:?}", v));
        }
        let w = c.big().weight(v);
        if weights.is_none()
            && (kx.keys().any(|k| c.big().weight(k) != w) || c.project(v).keys().any(|k| small.weight(k) != w))
        {
            weights = Some(format!("K or g does not preserve the weight of {:?}", v));
        }
    }
    let n = big_samples.len();
    fail("Kq + qK = fg − id", n, homotopy);
    fail("K² = 0", n, kk);
    fail("g K = 0", n, gk);
    fail("g chain map", n, gchain);
    fail("K, g weight", n, weights);
    report
}

/// Contraction between finite-dimensional algebras, given by matrices.
#[derive(Clone, Debug)]
pub struct FiniteContraction<S: Scalar> {
    big: Arc<LInftyAlgebra<S>>,
    small: GradedSpace,
    f: LinearMap<S>,
    g: LinearMap<S>,
    k: LinearMap<S>,
}

impl<S: Scalar> FiniteContraction<S> {
    pub fn new(big: Arc<LInftyAlgebra<S>>, small: GradedSpace, f: LinearMap<S>, g: LinearMap<S>, k: LinearMap<S>) -> Result<Self> {
        let (n, m) = (big.dim(), small.dim());
        if f.source_dim != m || f.target_dim != n || g.source_dim != n || g.target_dim != m || k.source_dim != n || k.target_dim != n {
            return Err(Error::mismatch("contraction maps do not match the spaces"));
        }
        Ok(Self { big, small, f, g, k })
    }

    /// `V = W`, `f = g = id`, `K = 0`.
    pub fn identity(l: Arc<LInftyAlgebra<S>>) -> Self {
        let n = l.dim();
        let small = l.space().clone();
        Self { big: l, small, f: LinearMap::identity(n), g: LinearMap::identity(n), k: LinearMap::zero(n, n) }
    }

    pub fn big_algebra(&self) -> &Arc<LInftyAlgebra<S>> {
        &self.big
    }

    pub fn check(&self) -> CheckReport {
        check_contraction(self, &(0..self.big.dim()).collect::<Vec<_>>())
    }
}

impl<S: Scalar> Contraction<S> for FiniteContraction<S> {
    type Big = LInftyAlgebra<S>;

    fn big(&self) -> &LInftyAlgebra<S> {
        &self.big
    }

    fn small(&self) -> &GradedSpace {
        &self.small
    }

    fn include(&self, w: usize) -> Vector<usize, S> {
        self.f.columns[w].clone()
    }

    fn project(&self, v: &usize) -> Vector<usize, S> {
        self.g.columns[*v].clone()
    }

    fn homotopy(&self, v: &usize) -> Vector<usize, S> {
        self.k.columns[*v].clone()
    }
}

type Memo<K, V> = Mutex<HashMap<K, V>>;

/// Homotopy transfer along a contraction: the transferred structure `R` on
/// `W` and the morphisms `F: (W, R) → (V, Q)` and `G: (V, Q) → (W, R)`.
/// Taylor coefficients of `F` and `G` are computed on demand and memoized.
pub struct Transfer<S: Scalar, C: Contraction<S>> {
    contraction: C,
    small: Arc<LInftyAlgebra<S>>,
    f_memo: Memo<Vec<usize>, Vector<Key<C::Big>, S>>,
    g_memo: Memo<Vec<Key<C::Big>>, Vector<usize, S>>,
}

impl<S: Scalar, C: Contraction<S>> Transfer<S, C> {
    /// Computes the transferred structure on every monomial up to the arity bound.
    pub fn new(contraction: C) -> Result<Self> {
        let space = contraction.small().clone();
        if space.nilpotency() > contraction.big().nilpotency() {
            return Err(Error::mismatch("small side has a larger nilpotency bound than the big side"));
        }
        let f_memo = Mutex::new(HashMap::new());
        let mut t = Self { contraction, small: Arc::new(LInftyAlgebra::zero_algebra()), f_memo, g_memo: Mutex::new(HashMap::new()) };
        let bound = space.arity_bound();
        let mut taylor = Vec::with_capacity(bound);
        if bound >= 1 {
            let r1 = MultilinearMap::new(&space, &space, 1, 1, (0..space.dim()).map(|w| (vec![w], t.contraction.small_differential(w))))?;
            taylor.push(r1);
        }
        for i in 2..=bound {
            let mut entries = Vec::new();
            for m in space.symmetric_basis(i) {
                let (f, r) = t.compute_f(&space, &m);
                t.f_memo.lock().unwrap().insert(m.clone(), f);
                entries.push((m, r));
            }
            taylor.push(MultilinearMap::new(&space, &space, i, 1, entries)?);
        }
        t.small = Arc::new(LInftyAlgebra::new(space, taylor)?);
        Ok(t)
    }

    pub fn contraction(&self) -> &C {
        &self.contraction
    }

    /// The transferred algebra `(W, R)`.
    pub fn small_algebra(&self) -> &Arc<LInftyAlgebra<S>> {
        &self.small
    }

    /// `Σ_{k=2}^{i} q_k F^k_i (m)`; returns `(K z, g₁ z)`.
    fn compute_f(&self, space: &GradedSpace, m: &[usize]) -> (Vector<Key<C::Big>, S>, Vector<usize, S>) {
        let c = &self.contraction;
        let mut z = Vector::zero();
        for k in 2..=m.len() {
            let comp = partition_component(space, c.big(), m, k, |b| self.f_coefficient(space, b));
            z.add_assign(&bracket_sym(c.big(), &comp));
        }
        (c.homotopy_vec(&z), c.project_vec(&z))
    }

    fn f_coefficient(&self, space: &GradedSpace, m: &[usize]) -> Vector<Key<C::Big>, S> {
        match m.len() {
            0 => Vector::zero(),
            1 => self.contraction.include(m[0]),
            _ => {
                if m.iter().map(|k| space.weight(k)).sum::<u32>() >= space.nilpotency() {
                    return Vector::zero();
                }
                if let Some(v) = self.f_memo.lock().unwrap().get(m) {
                    return v.clone();
                }
                let (f, _) = self.compute_f(space, m);
                self.f_memo.lock().unwrap().insert(m.to_vec(), f.clone());
                f
            }
        }
    }

    /// `f_i(m)` of the transfer inclusion `F`.
    pub fn f(&self, m: &[usize]) -> Vector<Key<C::Big>, S> {
        self.f_coefficient(self.small.space(), m)
    }

    /// `K^Σ_i(m)`.
    pub fn k_sigma(&self, m: &[Key<C::Big>]) -> SymTensor<Key<C::Big>, S> {
        k_sigma(&self.contraction, m)
    }

    /// `g_i(m)` of the transfer projection `G`.
    pub fn g(&self, m: &[Key<C::Big>]) -> Vector<usize, S> {
        let c = &self.contraction;
        match m.len() {
            0 => Vector::zero(),
            1 => c.project(&m[0]),
            i => {
                if m.iter().map(|k| c.big().weight(k)).sum::<u32>() >= c.small().nilpotency() {
                    return Vector::zero();
                }
                if let Some(v) = self.g_memo.lock().unwrap().get(m) {
                    return v.clone();
                }
                let ks = k_sigma(c, m);
                let mut out = Vector::zero();
                for (u, coef) in ks.iter() {
                    for k in 1..i {
                        let q = coderivation_component(c.big(), u, k);
                        for (mono, c2) in q.iter() {
                            let g = self.g(mono);
                            out.axpy(&(coef.clone() * c2.clone()), &g);
                        }
                    }
                }
                self.g_memo.lock().unwrap().insert(m.to_vec(), out.clone());
                out
            }
        }
    }

    pub fn inclusion(&self) -> TransferInclusion<'_, S, C> {
        TransferInclusion(self)
    }

    pub fn projection(&self) -> TransferProjection<'_, S, C> {
        TransferProjection(self)
    }

    /// `ρ(x) = (MC(G)(x), K(x))`.
    pub fn kuranishi_forward(&self, x: &Vector<Key<C::Big>, S>) -> Result<(Vector<usize, S>, Vector<Key<C::Big>, S>)> {
        let r = curvature(self.contraction.big(), x)?;
        if !r.is_zero() {
            return Err(Error::NotMaurerCartan(format!("{:?}", r)));
        }
        let y = crate::linfty::pushforward(&self.projection(), x);
        Ok((y, self.contraction.homotopy_vec(x)))
    }

    /// `ρ⁻¹(y, K(v))` by the fixed-point iteration
    /// `x ↦ f₁(y) − q₁K(v) + Σ_{i≥2} (K q_i − f₁ g_i)(x^{⊙i}) / i!`.
    pub fn kuranishi_solve(&self, y: &Vector<usize, S>, kv: &Vector<Key<C::Big>, S>) -> Result<Vector<Key<C::Big>, S>> {
        let c = &self.contraction;
        let r = curvature(self.small.as_ref(), y)?;
        if !r.is_zero() {
            return Err(Error::NotMaurerCartan(self.small.space().format_vector(&r)));
        }
        for k in kv.keys() {
            let d = c.big().degree(k);
            if d != -1 {
                return Err(Error::Degree { expected: -1, found: d });
            }
        }
        let dkv = c.big_differential(kv);
        if c.homotopy_vec(&dkv).neg() != *kv {
            return Err(Error::NotInImage);
        }
        let mut base = c.include_vec(y);
        base.sub_assign(&dkv);
        let bound = c.big().arity_bound();
        let mut x = Vector::zero();
        let max_steps = c.big().nilpotency() as usize + 2;
        for _ in 0..max_steps {
            let mut next = base.clone();
            for i in 2..=bound {
                let p = sym_power(c.big(), &x, i);
                if p.is_zero() {
                    break;
                }
                let w = S::inv_factorial(i);
                next.axpy(&w, &c.homotopy_vec(&bracket_sym(c.big(), &p)));
                let mut gi = Vector::zero();
                for (m, coef) in p.iter() {
                    gi.axpy(coef, &self.g(m));
                }
                next.axpy(&-w, &c.include_vec(&gi));
            }
            if next == x {
                return Ok(x);
            }
            x = next;
        }
        Err(Error::check("Kuranishi iteration did not stabilize within the nilpotency bound"))
    }
}

/// `K^Σ_i(v_1 ⊙ ⋯ ⊙ v_i)`: average over `S_i` of `f₁g₁ ⊗ ⋯ ⊗ f₁g₁ ⊗ K ⊗ id ⊗ ⋯ ⊗ id`.
pub fn k_sigma<S: Scalar, C: Contraction<S>>(c: &C, m: &[Key<C::Big>]) -> SymTensor<Key<C::Big>, S> {
    let i = m.len();
    let big = c.big();
    let degs: Vec<i32> = m.iter().map(|k| big.degree(k)).collect();
    let fg: Vec<Vector<Key<C::Big>, S>> = m.iter().map(|k| c.include_vec(&c.project(k))).collect();
    let kv: Vec<Vector<Key<C::Big>, S>> = m.iter().map(|k| c.homotopy(k)).collect();
    let mut out = SymTensor::zero();
    for sigma in permutations(i) {
        let base_sign = koszul_parity(&degs, &sigma);
        let mut passed = 0i32;
        for j in 0..i {
            let mut acc = SymTensor::term(Vec::new(), S::sign(base_sign ^ (passed.rem_euclid(2) == 1)));
            for (pos, &s) in sigma.iter().enumerate() {
                let factor = if pos < j {
                    &fg[s]
                } else if pos == j {
                    &kv[s]
                } else {
                    acc = sym_mul(big, &acc, &SymTensor::term(vec![m[s].clone()], S::one()));
                    continue;
                };
                acc = sym_mul(big, &acc, &as_sym(factor));
                if acc.is_zero() {
                    break;
                }
            }
            out.add_assign(&acc);
            passed += degs[sigma[j]];
        }
    }
    out.scaled(&S::inv_factorial(i))
}

/// The transfer inclusion `F: (W, R) → (V, Q)`.
pub struct TransferInclusion<'a, S: Scalar, C: Contraction<S>>(&'a Transfer<S, C>);

impl<S: Scalar, C: Contraction<S>> TaylorMap<S> for TransferInclusion<'_, S, C> {
    type Source = LInftyAlgebra<S>;
    type Target = C::Big;

    fn source(&self) -> &LInftyAlgebra<S> {
        &self.0.small
    }

    fn target(&self) -> &C::Big {
        self.0.contraction.big()
    }

    fn coefficient(&self, m: &[usize]) -> Vector<Key<C::Big>, S> {
        self.0.f(m)
    }
}

/// The transfer projection `G: (V, Q) → (W, R)`.
pub struct TransferProjection<'a, S: Scalar, C: Contraction<S>>(&'a Transfer<S, C>);

impl<S: Scalar, C: Contraction<S>> TaylorMap<S> for TransferProjection<'_, S, C> {
    type Source = C::Big;
    type Target = LInftyAlgebra<S>;

    fn source(&self) -> &C::Big {
        self.0.contraction.big()
    }

    fn target(&self) -> &LInftyAlgebra<S> {
        &self.0.small
    }

    fn coefficient(&self, m: &[Key<C::Big>]) -> Vector<usize, S> {
        self.0.g(m)
    }
}

/// Transferred structure on `W`.
pub fn transfer_structure<S: Scalar, C: Contraction<S>>(c: C) -> Result<Arc<LInftyAlgebra<S>>> {
    Ok(Transfer::new(c)?.small_algebra().clone())
}

/// A map of contractions `φ: V → V'` on the big sides, with the induced
/// small-side map `ψ = g′ φ f`.
pub struct ContractionMorphism<'a, S: Scalar, C: Contraction<S>, D: Contraction<S>, P>
where
    P: Fn(&Key<C::Big>) -> Vector<Key<D::Big>, S>,
{
    pub source: &'a C,
    pub target: &'a D,
    pub phi: P,
    _scalar: std::marker::PhantomData<S>,
}

impl<'a, S: Scalar, C: Contraction<S>, D: Contraction<S>, P> ContractionMorphism<'a, S, C, D, P>
where
    P: Fn(&Key<C::Big>) -> Vector<Key<D::Big>, S>,
{
    pub fn new(source: &'a C, target: &'a D, phi: P) -> Self {
        Self { source, target, phi, _scalar: std::marker::PhantomData }
    }

    pub fn phi_vec(&self, v: &Vector<Key<C::Big>, S>) -> Vector<Key<D::Big>, S> {
        v.map_linear(|k| (self.phi)(k))
    }

    /// `ψ = g′ φ f`.
    pub fn small_map(&self) -> LinearMap<S> {
        let (m, n) = (self.source.small().dim(), self.target.small().dim());
        LinearMap::from_fn(m, n, |w| self.target.project_vec(&self.phi_vec(&self.source.include(w))))
    }

    /// Chain-map and intertwining identities on the given big-side sample.
    pub fn check(&self, big_samples: &[Key<C::Big>]) -> CheckReport {
        let mut report = CheckReport::default();
        let psi = self.small_map();
        let mut chain = None;
        let mut homotopy = None;
        let mut proj = None;
        let mut weight = None;
        for v in big_samples {
            let x = Vector::basis(v.clone());
            let a = self.phi_vec(&self.source.big_differential(&x));
            let b = self.target.big_differential(&self.phi_vec(&x));
            if chain.is_none() && a != b {
                chain = Some(format!("φ q ≠ q′ φ on {:?}", v));
            }
            if homotopy.is_none() && self.phi_vec(&self.source.homotopy(v)) != self.target.homotopy_vec(&self.phi_vec(&x)) {
                homotopy = Some(format!("φ K ≠ K′ φ on {:?}", v));
            }
            if proj.is_none() && psi.apply(&self.source.project(v)) != self.target.project_vec(&self.phi_vec(&x)) {
                proj = Some(format!("ψ g ≠ g′ φ on {:?}", v));
            }
            let w = self.source.big().weight(v);
            if weight.is_none() && (self.phi)(v).keys().any(|k| self.target.big().weight(k) != w) {
                weight = Some(format!("φ does not preserve the weight of {:?}", v));
            }
        }
        let n = big_samples.len();
        report.push("φ chain map", n, chain);
        report.push("φ K = K′ φ", n, homotopy);
        report.push("ψ g = g′ φ", n, proj);
        report.push("φ weight", n, weight);
        let mut incl = None;
        for w in 0..self.source.small().dim() {
            if self.phi_vec(&self.source.include(w)) != self.target.include_vec(&psi.columns[w]) {
                incl = Some(format!("φ f ≠ f′ ψ on {}", self.source.small().name(w)));
                break;
            }
        }
        report.push("φ f = f′ ψ", self.source.small().dim(), incl);
        report
    }
}

/// Verifies both commutative squares `φ F = F′ ψ` and `ψ G = G′ φ` for a
/// morphism of contractions whose big-side map is strict, on all monomials
/// of `W` up to the arity bound and on the given big-side monomials.
pub fn check_transfer_naturality<S, C, D, P>(
    m: &ContractionMorphism<'_, S, C, D, P>,
    source: &Transfer<S, C>,
    target: &Transfer<S, D>,
    big_monomials: &[Vec<Key<C::Big>>],
) -> CheckReport
where
    S: Scalar,
    C: Contraction<S>,
    D: Contraction<S>,
    P: Fn(&Key<C::Big>) -> Vector<Key<D::Big>, S>,
{
    let mut report = CheckReport::default();
    let psi = m.small_map();
    let small = source.small_algebra();
    let tsmall = target.small_algebra();
    let strict = crate::linfty::LInftyMorphism::strict(small.clone(), tsmall.clone(), &psi);
    match strict {
        Ok(s) => report.merge(crate::linfty::check_morphism(&s)),
        Err(e) => report.push("ψ strict", 0, Some(e.to_string())),
    }
    let mut fsq = None;
    let monos = small.monomials();
    for mono in &monos {
        let lhs = m.phi_vec(&source.f(mono));
        let mut images = SymTensor::term(Vec::new(), S::one());
        for &w in mono {
            images = sym_mul(tsmall.as_ref(), &images, &as_sym(&psi.columns[w]));
        }
        let mut rhs = Vector::zero();
        for (u, c) in images.iter() {
            rhs.axpy(c, &target.f(u));
        }
        if lhs != rhs {
            fsq = Some(format!("φ F ≠ F′ ψ on {:?}", mono));
            break;
        }
    }
    report.push("φ F = F′ ψ", monos.len(), fsq);
    let mut gsq = None;
    for mono in big_monomials {
        let lhs = psi.apply(&source.g(mono));
        let mut images = SymTensor::term(Vec::new(), S::one());
        for v in mono {
            images = sym_mul(target.contraction().big(), &images, &as_sym(&(m.phi)(v)));
        }
        let mut rhs = Vector::zero();
        for (u, c) in images.iter() {
            rhs.axpy(c, &target.g(u));
        }
        if lhs != rhs {
            gsq = Some(format!("ψ G ≠ G′ φ on {:?}", mono));
            break;
        }
    }
    report.push("ψ G = G′ φ", big_monomials.len(), gsq);
    report
}
