//! Simplices of the Deligne-Getzler ∞-groupoid `Del∞(L)_n = MC(C*(Δ_n; L))`:
//! the vertex contractions `(π*, e_i*, h^i)`, the star correspondence `ρ^i`,
//! higher BCH products, horn filling and the abelian Dold-Kan comparison.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use crate::cochains::{cochain_structure, dupont_transfer, CochainAlgebra, FinComplex};
use crate::error::{Error, Result};
use crate::forms::{standard_simplices, FormMonomial};
use crate::graded::GradedBasis;
use crate::linalg::{image_and_kernel, LinearMap};
use crate::linfty::{cocycles, curvature, is_mc, pushforward, tangent_cohomology, CentralExtension, LInftyAlgebra, LInftyMorphism};
use crate::scalar::Scalar;
use crate::transfer::{Contraction, FiniteContraction, Transfer};
use crate::vector::Vector;

/// An `n`-simplex of `Del∞(L)`: a Maurer-Cartan cochain on `Δ_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeligneSimplex<S: Scalar> {
    pub n: usize,
    pub cochain: Vector<usize, S>,
}

/// A Maurer-Cartan element at vertex `i` and values on the simplices of
/// `Δ_n` of positive dimension containing `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StarData<S: Scalar> {
    pub vertex: usize,
    pub x: Vector<usize, S>,
    pub values: BTreeMap<Vec<usize>, Vector<usize, S>>,
}

impl<S: Scalar> StarData<S> {
    /// Star data with every simplex value zero.
    pub fn constant(vertex: usize, x: Vector<usize, S>) -> Self {
        Self { vertex, x, values: BTreeMap::new() }
    }

    pub fn with(mut self, simplex: Vec<usize>, value: Vector<usize, S>) -> Self {
        self.values.insert(simplex, value);
        self
    }
}

type VertexTransfer<S> = Transfer<S, FiniteContraction<S>>;

/// `Del∞(L)` up to a fixed simplex dimension, with the cochain algebras and the
/// vertex transfers cached.
pub struct DeligneGroupoid<S: Scalar> {
    cochains: CochainAlgebra<S>,
    transfers: Mutex<BTreeMap<(usize, usize), Arc<VertexTransfer<S>>>>,
}

impl<S: Scalar> DeligneGroupoid<S> {
    pub fn new(coefficients: Arc<LInftyAlgebra<S>>, max_dim: usize) -> Result<Self> {
        Ok(Self { cochains: cochain_structure(max_dim, coefficients)?, transfers: Mutex::new(BTreeMap::new()) })
    }

    pub fn coefficients(&self) -> &Arc<LInftyAlgebra<S>> {
        self.cochains.coefficients()
    }

    pub fn max_dim(&self) -> usize {
        self.cochains.complex().dim().unwrap_or(0)
    }

    /// `C*(Δ_n; L)`.
    pub fn algebra(&self, n: usize) -> Result<&Arc<LInftyAlgebra<S>>> {
        self.cochains.standard(n).ok_or_else(|| Error::invalid(format!("simplices of dimension {n} exceed the configured maximum {}", self.max_dim())))
    }

    fn coefficient_dim(&self) -> usize {
        self.coefficients().dim()
    }

    /// Index of `e_σ ⊗ b` in `C*(Δ_n; L)`.
    pub fn index(&self, n: usize, simplex: &[usize], b: usize) -> Option<usize> {
        standard_simplices(n).iter().position(|s| s == simplex).map(|s| s * self.coefficient_dim() + b)
    }

    /// `Σ e_σ ⊗ x_σ` on `Δ_n`.
    pub fn cochain(&self, n: usize, values: &[(Vec<usize>, Vector<usize, S>)]) -> Result<Vector<usize, S>> {
        let mut out = Vector::zero();
        for (s, x) in values {
            let base = self.index(n, s, 0).ok_or_else(|| Error::invalid(format!("{s:?} is not a simplex of Δ_{n}")))?;
            for (b, c) in x.iter() {
                out.add_term(base + b, c.clone());
            }
        }
        Ok(out)
    }

    /// The value `α_σ`.
    pub fn value(&self, n: usize, alpha: &Vector<usize, S>, simplex: &[usize]) -> Result<Vector<usize, S>> {
        let s = standard_simplices(n).iter().position(|t| t == simplex).ok_or_else(|| Error::invalid(format!("{simplex:?} is not a simplex of Δ_{n}")))?;
        let d = self.coefficient_dim();
        Ok(alpha.iter().filter(|(k, _)| *k / d == s).map(|(k, c)| (k % d, c.clone())).collect())
    }

    pub fn simplex(&self, n: usize, cochain: Vector<usize, S>) -> Result<DeligneSimplex<S>> {
        let r = curvature(self.algebra(n)?.as_ref(), &cochain)?;
        if !r.is_zero() {
            return Err(Error::NotMaurerCartan(self.algebra(n)?.space().format_vector(&r)));
        }
        Ok(DeligneSimplex { n, cochain })
    }

    /// Pull-back along the face `θ: Δ_k → Δ_n` given by its increasing vertex list.
    pub fn restrict(&self, n: usize, alpha: &Vector<usize, S>, face: &[usize]) -> Result<Vector<usize, S>> {
        let d = self.coefficient_dim();
        let mut out = Vector::zero();
        for (j, t) in standard_simplices(face.len() - 1).iter().enumerate() {
            let image: Vec<usize> = t.iter().map(|&v| face[v]).collect();
            for (b, c) in self.value(n, alpha, &image)?.iter() {
                out.add_term(j * d + b, c.clone());
            }
        }
        Ok(out)
    }

    /// The `j`-th face `∂_j* α`.
    pub fn face(&self, simplex: &DeligneSimplex<S>, j: usize) -> Result<DeligneSimplex<S>> {
        if j > simplex.n || simplex.n == 0 {
            return Err(Error::invalid(format!("no face {j} of a {}-simplex", simplex.n)));
        }
        let face: Vec<usize> = (0..=simplex.n).filter(|&v| v != j).collect();
        Ok(DeligneSimplex { n: simplex.n - 1, cochain: self.restrict(simplex.n, &simplex.cochain, &face)? })
    }

    /// `h^i` on `C*(Δ_n; L)`:
    /// `(h^i α)_{i₀…i_k} = (−1)^j α_{i₀…i_{j−1} i i_j…i_k}` when `i` is not a vertex.
    pub fn h(&self, n: usize, i: usize, alpha: &Vector<usize, S>) -> Result<Vector<usize, S>> {
        Ok(self.h_map(n, i)?.apply(alpha))
    }

    fn h_map(&self, n: usize, i: usize) -> Result<LinearMap<S>> {
        if i > n {
            return Err(Error::invalid(format!("vertex {i} of Δ_{n}")));
        }
        let d = self.coefficient_dim();
        let simplices = standard_simplices(n);
        let position: BTreeMap<&[usize], usize> = simplices.iter().enumerate().map(|(k, s)| (s.as_slice(), k)).collect();
        Ok(LinearMap::from_fn(simplices.len() * d, simplices.len() * d, |col| {
            let tau = &simplices[col / d];
            match tau.iter().position(|&v| v == i) {
                Some(j) if tau.len() > 1 => {
                    let rest: Vec<usize> = tau.iter().copied().filter(|&v| v != i).collect();
                    Vector::term(position[rest.as_slice()] * d + col % d, S::sign(j % 2 == 1))
                }
                _ => Vector::zero(),
            }
        }))
    }

    /// The complete contraction `(π*, e_i*, −h^i)` of `C*(Δ_n; L)` onto `L`.
    pub fn vertex_contraction(&self, n: usize, i: usize) -> Result<FiniteContraction<S>> {
        let big = self.algebra(n)?.clone();
        let d = self.coefficient_dim();
        let simplices = standard_simplices(n);
        let f = LinearMap::from_fn(d, big.dim(), |b| (0..=n).map(|v| (v * d + b, S::one())).collect());
        let g = LinearMap::from_fn(big.dim(), d, |col| {
            if simplices[col / d] == [i] {
                Vector::basis(col % d)
            } else {
                Vector::zero()
            }
        });
        let h = self.h_map(n, i)?;
        let k = LinearMap::from_fn(big.dim(), big.dim(), |col| h.columns[col].neg());
        FiniteContraction::new(big, self.coefficients().space().clone(), f, g, k)
    }

    fn vertex_transfer(&self, n: usize, i: usize) -> Result<Arc<VertexTransfer<S>>> {
        if let Some(t) = self.transfers.lock().unwrap().get(&(n, i)) {
            return Ok(t.clone());
        }
        let t = Arc::new(Transfer::new(self.vertex_contraction(n, i)?)?);
        self.transfers.lock().unwrap().insert((n, i), t.clone());
        Ok(t)
    }

    /// The structure transferred onto `L` along the vertex contraction.
    pub fn vertex_transferred(&self, n: usize, i: usize) -> Result<Arc<LInftyAlgebra<S>>> {
        Ok(self.vertex_transfer(n, i)?.small_algebra().clone())
    }

    /// `ρ^i(α) = (e_i* α, ∂_i* h^i α)`, the second component as a cochain on `Δ_{n−1}`.
    pub fn rho(&self, simplex: &DeligneSimplex<S>, i: usize) -> Result<(Vector<usize, S>, Vector<usize, S>)> {
        let n = simplex.n;
        if n == 0 {
            return Err(Error::invalid("ρ needs a simplex of positive dimension"));
        }
        let x = self.value(n, &simplex.cochain, &[i])?;
        let face: Vec<usize> = (0..=n).filter(|&v| v != i).collect();
        let h = self.h(n, i, &simplex.cochain)?;
        Ok((x, self.restrict(n, &h, &face)?))
    }

    /// The star data of `α` at vertex `i`.
    pub fn star(&self, simplex: &DeligneSimplex<S>, i: usize) -> Result<StarData<S>> {
        let n = simplex.n;
        let mut star = StarData::constant(i, self.value(n, &simplex.cochain, &[i])?);
        for s in standard_simplices(n) {
            if s.len() > 1 && s.contains(&i) {
                let v = self.value(n, &simplex.cochain, &s)?;
                if !v.is_zero() {
                    star.values.insert(s, v);
                }
            }
        }
        Ok(star)
    }

    /// The unique simplex with the given star data, by the Kuranishi inverse
    /// along the vertex contraction at `star.vertex`.
    pub fn simplex_from_star(&self, n: usize, star: &StarData<S>) -> Result<DeligneSimplex<S>> {
        let i = star.vertex;
        if i > n {
            return Err(Error::invalid(format!("vertex {i} of Δ_{n}")));
        }
        if !is_mc(self.coefficients().as_ref(), &star.x) {
            return Err(Error::NotMaurerCartan(self.coefficients().space().format_vector(&star.x)));
        }
        let mut values = Vec::with_capacity(star.values.len());
        for (s, v) in &star.values {
            if s.len() < 2 || !s.contains(&i) {
                return Err(Error::invalid(format!("{s:?} is not in the open star of vertex {i}")));
            }
            values.push((s.clone(), v.clone()));
        }
        let v = self.cochain(n, &values)?;
        let big = self.algebra(n)?;
        if let Some(k) = v.keys().find(|k| big.degree(k) != 0) {
            return Err(Error::Degree { expected: 0, found: big.degree(k) });
        }
        if n == 0 {
            return Ok(DeligneSimplex { n, cochain: star.x.clone() });
        }
        let t = self.vertex_transfer(n, i)?;
        let kv = t.contraction().homotopy_vec(&v);
        let alpha = t.kuranishi_solve(&star.x, &kv)?;
        self.simplex(n, alpha)
    }

    /// `ρ^x_n`: the value of [`Self::simplex_from_star`] on the face opposite to the star vertex.
    pub fn higher_bch(&self, n: usize, star: &StarData<S>) -> Result<Vector<usize, S>> {
        let s = self.simplex_from_star(n, star)?;
        let face: Vec<usize> = (0..=n).filter(|&v| v != star.vertex).collect();
        self.restrict(n, &s.cochain, &face)
    }

    fn check_lie(&self) -> Result<()> {
        let l = self.coefficients();
        if (0..l.dim()).any(|k| l.degree(&k) != -1) {
            return Err(Error::invalid("the BCH product needs a Lie algebra concentrated in degree 0"));
        }
        Ok(())
    }

    /// `bch(a, b)`: the edge `02` of the 2-simplex with star vertex `1`, vertex
    /// value `0` and edges `a` on `12` and `b` on `01`.
    pub fn bch(&self, a: &Vector<usize, S>, b: &Vector<usize, S>) -> Result<Vector<usize, S>> {
        self.check_lie()?;
        let star = StarData::constant(1, Vector::zero()).with(vec![0, 1], b.clone()).with(vec![1, 2], a.clone());
        let s = self.simplex_from_star(2, &star)?;
        self.value(2, &s.cochain, &[0, 2])
    }

    /// `ρ^x_1(a)`: the endpoint of the 1-simplex starting at `x` with edge value `a`.
    pub fn gauge(&self, x: &Vector<usize, S>, a: &Vector<usize, S>) -> Result<Vector<usize, S>> {
        let star = StarData::constant(0, x.clone()).with(vec![0, 1], a.clone());
        let s = self.simplex_from_star(1, &star)?;
        self.value(1, &s.cochain, &[1])
    }

    /// Fills a horn `Λ^n_k → Del∞(L)` given as a cochain on `Λ^n_k` (indexed as
    /// in `C*(Δ_n; L)`): the star at `k` is completed by the value `0` on the
    /// top simplex.
    pub fn horn_fill(&self, n: usize, k: usize, horn: &Vector<usize, S>) -> Result<DeligneSimplex<S>> {
        let h = FinComplex::horn(n, k)?;
        let d = self.coefficient_dim();
        let simplices = standard_simplices(n);
        if let Some(bad) = horn.keys().find(|&&key| !h.contains(&simplices[key / d])) {
            return Err(Error::invalid(format!("horn data on {:?}, outside Λ^{n}_{k}", simplices[bad / d])));
        }
        for facet in h.facets() {
            let r = self.restrict(n, horn, &facet)?;
            if !is_mc(self.algebra(facet.len() - 1)?.as_ref(), &r) {
                return Err(Error::NotMaurerCartan(format!("horn data on the face {facet:?}")));
            }
        }
        let mut star = StarData::constant(k, self.value(n, horn, &[k])?);
        for s in &simplices {
            if s.len() > 1 && s.len() <= n && s.contains(&k) {
                star.values.insert(s.clone(), self.value(n, horn, s)?);
            }
        }
        let filled = self.simplex_from_star(n, &star)?;
        for facet in h.facets() {
            if self.restrict(n, &filled.cochain, &facet)? != self.restrict(n, horn, &facet)? {
                return Err(Error::check(format!("the filler disagrees with the horn on {facet:?}")));
            }
        }
        Ok(filled)
    }

    /// The form-level Maurer-Cartan element `F(α)` in `Ω(Δ_n) ⊗ L` of Getzler's model.
    pub fn getzler_form(&self, simplex: &DeligneSimplex<S>) -> Result<Vector<(FormMonomial, usize), S>> {
        let t = dupont_transfer(simplex.n, self.coefficients().clone())?;
        Ok(pushforward(&t.inclusion(), &simplex.cochain))
    }
}

/// Lifting problem for a strict morphism `p: L → M` against the inclusion
/// `Λ^n_k ⊂ Δ_n`: a horn in `Del∞(L)` and an `n`-simplex of `Del∞(M)` restricting
/// to its image. Returns `None` when no lift exists.
pub fn relative_horn_fill<S: Scalar>(
    p: &LInftyMorphism<S>,
    source: &DeligneGroupoid<S>,
    target: &DeligneGroupoid<S>,
    k: usize,
    horn: &Vector<usize, S>,
    simplex: &DeligneSimplex<S>,
) -> Result<Option<DeligneSimplex<S>>> {
    if !p.is_strict() {
        return Err(Error::invalid("relative horn filling needs a strict morphism"));
    }
    let n = simplex.n;
    let lin = p.linear_part();
    let (dl, dm) = (source.coefficients().dim(), target.coefficients().dim());
    let push = LinearMap::from_fn(source.algebra(n)?.dim(), target.algebra(n)?.dim(), |i| {
        lin.columns[i % dl].map_keys(|b| (i / dl) * dm + b)
    });
    let h = FinComplex::horn(n, k)?;
    for facet in h.facets() {
        if target.restrict(n, &push.apply(horn), &facet)? != target.restrict(n, &simplex.cochain, &facet)? {
            return Err(Error::invalid(format!("the horn does not map to the simplex on {facet:?}")));
        }
    }
    let top: Vec<usize> = (0..=n).collect();
    let wanted = target.value(n, &simplex.cochain, &top)?;
    let Some(t) = lin.solve(&wanted) else {
        return Ok(None);
    };
    let mut star = StarData::constant(k, source.value(n, horn, &[k])?);
    for s in standard_simplices(n) {
        if s.len() > 1 && s.contains(&k) {
            let v = if s == top { t.clone() } else { source.value(n, horn, &s)? };
            star.values.insert(s, v);
        }
    }
    let lift = source.simplex_from_star(n, &star)?;
    if push.apply(&lift.cochain) != simplex.cochain {
        return Err(Error::check("the lift does not project to the given simplex"));
    }
    Ok(Some(lift))
}

/// `π_i(Del∞(L))` for abelian `L`, computed directly as `dim H^{1−i}(L)` and
/// as the homology of the normalized Moore complex of `n ↦ Z¹(C*(Δ_n; L))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HomotopyGroup {
    pub direct: usize,
    pub moore: usize,
}

pub fn abelian_homotopy_groups<S: Scalar>(l: Arc<LInftyAlgebra<S>>, i: usize) -> Result<HomotopyGroup> {
    if !l.is_abelian() {
        return Err(Error::invalid("Dold-Kan comparison needs an abelian algebra"));
    }
    let direct = tangent_cohomology(&l).get(&-(i as i32)).copied().unwrap_or(0);
    let g = DeligneGroupoid::new(l.clone(), i + 1)?;
    let d = l.dim();
    // normalized chains N_m = ∩_{j ≥ 1} ker ∂_j on Z¹(C*(Δ_m; L)), with d₀ = ∂_0
    let normalized = |m: usize| -> Result<Vec<Vector<usize, S>>> {
        let z = cocycles(g.algebra(m)?, 0);
        if m == 0 {
            return Ok(z);
        }
        let mut rows = Vec::with_capacity(z.len());
        for v in &z {
            let mut faces = Vector::zero();
            for j in 1..=m {
                let face: Vec<usize> = (0..=m).filter(|&v| v != j).collect();
                let r = g.restrict(m, v, &face)?;
                faces.add_assign(&r.map_keys(|k| (j - 1) * standard_simplices(m - 1).len() * d + k));
            }
            rows.push(faces);
        }
        let (_, kernel) = image_and_kernel(&rows);
        Ok(kernel.iter().map(|c| c.map_linear(|&k| z[k].clone())).collect())
    };
    let d0_rank = |m: usize, basis: &[Vector<usize, S>]| -> Result<usize> {
        if m == 0 {
            return Ok(0);
        }
        let face: Vec<usize> = (1..=m).collect();
        let images = basis.iter().map(|v| g.restrict(m, v, &face)).collect::<Result<Vec<_>>>()?;
        Ok(image_and_kernel(&images).0.rank())
    };
    let ni = normalized(i)?;
    let nj = normalized(i + 1)?;
    let moore = ni.len() - d0_rank(i, &ni)? - d0_rank(i + 1, &nj)?;
    Ok(HomotopyGroup { direct, moore })
}

/// Right action of `Z¹(C*(Δ_n; K))` on lifts of simplices along a central
/// extension: `β · z = β + z`, with `z` given in `C*(Δ_n; L)` supported on kernel
/// coefficients.
pub fn principal_action<S: Scalar>(
    e: &CentralExtension<S>,
    total: &DeligneGroupoid<S>,
    beta: &DeligneSimplex<S>,
    z: &Vector<usize, S>,
) -> Result<DeligneSimplex<S>> {
    let d = e.total().dim();
    if total.coefficients().space() != e.total().space() {
        return Err(Error::mismatch("the groupoid is not built on the total algebra"));
    }
    if z.keys().any(|k| !e.kernel().contains(&(k % d))) {
        return Err(Error::invalid("the acting cochain has coefficients outside the kernel"));
    }
    let alg = total.algebra(beta.n)?;
    if !alg.differential().apply(z).is_zero() {
        return Err(Error::invalid("the acting cochain is not a cocycle"));
    }
    if !is_mc(alg.as_ref(), &beta.cochain) {
        return Err(Error::NotMaurerCartan("the simplex being acted on".into()));
    }
    total.simplex(beta.n, beta.cochain.plus(z))
}

/// The kernel cocycle `z` with `β₂ = β₁ · z`, for two lifts of one simplex.
pub fn lift_difference<S: Scalar>(e: &CentralExtension<S>, beta1: &DeligneSimplex<S>, beta2: &DeligneSimplex<S>) -> Result<Vector<usize, S>> {
    if beta1.n != beta2.n {
        return Err(Error::mismatch("simplices of different dimensions"));
    }
    let d = e.total().dim();
    let z = beta2.cochain.minus(&beta1.cochain);
    if z.keys().any(|k| !e.kernel().contains(&(k % d))) {
        return Err(Error::invalid("the simplices do not lie over the same base simplex"));
    }
    Ok(z)
}
