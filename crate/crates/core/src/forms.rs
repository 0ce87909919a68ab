//! Polynomial differential forms on the standard simplex `Δ_n` in the
//! coordinates `t_1, …, t_n` (with `t_0 = 1 − Σ t_i` eliminated), Whitney
//! forms, integration over faces and Dupont's contraction onto simplicial
//! cochains.

use std::collections::HashMap;
use std::fmt;
use std::sync::Mutex;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::vector::Vector;

/// `t^a dt_J`: exponents of `t_1..t_n` and the wedge set `J` as a bit mask
/// (bit `j - 1` stands for `dt_j`).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormMonomial {
    pub exps: Vec<u32>,
    pub wedge: u32,
}

impl FormMonomial {
    pub fn one(n: usize) -> Self {
        Self { exps: vec![0; n], wedge: 0 }
    }

    pub fn degree(&self) -> u32 {
        self.wedge.count_ones()
    }

    pub fn poly_degree(&self) -> u32 {
        self.exps.iter().sum()
    }
}

impl fmt::Debug for FormMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (i, &e) in self.exps.iter().enumerate() {
            match e {
                0 => {}
                1 => parts.push(format!("t{}", i + 1)),
                _ => parts.push(format!("t{}^{}", i + 1, e)),
            }
        }
        let dts: Vec<String> = (0..32).filter(|b| self.wedge >> b & 1 == 1).map(|b| format!("dt{}", b + 1)).collect();
        if !dts.is_empty() {
            parts.push(dts.join("∧"));
        }
        if parts.is_empty() {
            write!(f, "1")
        } else {
            write!(f, "{}", parts.join(" "))
        }
    }
}

/// A polynomial differential form on `Δ_n`.
#[derive(Clone, PartialEq, Eq)]
pub struct PolyForm<S: Scalar> {
    n: usize,
    terms: Vector<FormMonomial, S>,
}

impl<S: Scalar> fmt::Debug for PolyForm<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.terms)
    }
}

fn wedge_sign(a: u32, b: u32) -> bool {
    // parity of pairs (x in a, y in b) with x > y
    let mut parity = 0u32;
    for y in 0..32 {
        if b >> y & 1 == 1 {
            parity += (a >> (y + 1)).count_ones();
        }
    }
    parity % 2 == 1
}

impl<S: Scalar> PolyForm<S> {
    pub fn zero(n: usize) -> Self {
        Self { n, terms: Vector::zero() }
    }

    pub fn from_terms(n: usize, terms: Vector<FormMonomial, S>) -> Self {
        debug_assert!(terms.keys().all(|m| m.exps.len() == n && m.wedge >> n == 0));
        Self { n, terms }
    }

    pub fn monomial(n: usize, m: FormMonomial) -> Self {
        Self::from_terms(n, Vector::basis(m))
    }

    pub fn constant(n: usize, c: S) -> Self {
        Self { n, terms: Vector::term(FormMonomial::one(n), c) }
    }

    /// Barycentric coordinate `t_i`, `0 ≤ i ≤ n`.
    pub fn coord(n: usize, i: usize) -> Self {
        assert!(i <= n);
        if i == 0 {
            let mut f = Self::constant(n, S::one());
            for j in 1..=n {
                f = f.minus(&Self::coord(n, j));
            }
            f
        } else {
            let mut m = FormMonomial::one(n);
            m.exps[i - 1] = 1;
            Self::monomial(n, m)
        }
    }

    /// `dt_i`, `0 ≤ i ≤ n`.
    pub fn dcoord(n: usize, i: usize) -> Self {
        assert!(i <= n);
        if i == 0 {
            let mut f = Self::zero(n);
            for j in 1..=n {
                f = f.minus(&Self::dcoord(n, j));
            }
            f
        } else {
            let mut m = FormMonomial::one(n);
            m.wedge = 1 << (i - 1);
            Self::monomial(n, m)
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &Vector<FormMonomial, S> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_zero()
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self { n: self.n, terms: self.terms.plus(&other.terms) }
    }

    pub fn minus(&self, other: &Self) -> Self {
        Self { n: self.n, terms: self.terms.minus(&other.terms) }
    }

    pub fn scaled(&self, c: &S) -> Self {
        Self { n: self.n, terms: self.terms.scaled(c) }
    }

    /// Form degree of a homogeneous form; `None` for zero or mixed forms.
    pub fn degree(&self) -> Option<u32> {
        let mut d = self.terms.keys().map(|m| m.degree());
        let first = d.next()?;
        d.all(|x| x == first).then_some(first)
    }

    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = Vector::zero();
        for (a, ca) in self.terms.iter() {
            for (b, cb) in other.terms.iter() {
                if let Some((m, neg)) = wedge_monomials(a, b) {
                    let c = ca.clone() * cb.clone();
                    out.add_term(m, if neg { -c } else { c });
                }
            }
        }
        Self { n: self.n, terms: out }
    }

    /// Exterior differential.
    pub fn d(&self) -> Self {
        Self { n: self.n, terms: self.terms.map_linear(|m| d_monomial::<S>(m)) }
    }

    /// Evaluation at vertex `i` on the degree-zero part.
    pub fn eval_vertex(&self, i: usize) -> S {
        let mut out = S::zero();
        for (m, c) in self.terms.iter() {
            if m.wedge != 0 {
                continue;
            }
            let hit = if i == 0 { m.poly_degree() == 0 } else { m.exps.iter().enumerate().all(|(j, &e)| e == 0 || j + 1 == i) };
            if hit {
                out = out + c.clone();
            }
        }
        out
    }

    /// Pull-back along the affine map `Δ_m → Δ_n` induced by `θ: [m] → [n]`
    /// (`theta[j]` is the image of vertex `j`): `t_i ↦ Σ_{θ(j)=i} t_j`.
    pub fn pullback(&self, theta: &[usize]) -> Self {
        let m = theta.len() - 1;
        let images: Vec<(PolyForm<S>, PolyForm<S>)> = (1..=self.n)
            .map(|i| {
                let mut t = PolyForm::zero(m);
                let mut dt = PolyForm::zero(m);
                for (j, &tj) in theta.iter().enumerate() {
                    if tj == i {
                        t = t.plus(&PolyForm::coord(m, j));
                        dt = dt.plus(&PolyForm::dcoord(m, j));
                    }
                }
                (t, dt)
            })
            .collect();
        let mut out = PolyForm::zero(m);
        for (mono, c) in self.terms.iter() {
            let mut acc = PolyForm::constant(m, c.clone());
            for (i, &e) in mono.exps.iter().enumerate() {
                for _ in 0..e {
                    acc = acc.wedge(&images[i].0);
                }
            }
            for b in 0..self.n {
                if mono.wedge >> b & 1 == 1 {
                    acc = acc.wedge(&images[b].1);
                }
                if acc.is_zero() {
                    break;
                }
            }
            out = out.plus(&acc);
        }
        out
    }

    /// `∫_{Δ_n}` of the top-degree part.
    pub fn integrate(&self) -> S {
        let full = if self.n == 0 { 0 } else { (1u32 << self.n) - 1 };
        let mut out = S::zero();
        for (m, c) in self.terms.iter() {
            if m.wedge != full {
                continue;
            }
            let mut num = S::one();
            for &e in &m.exps {
                num = num * S::factorial(e as usize);
            }
            out = out + c.clone() * num / S::factorial(self.n + m.poly_degree() as usize);
        }
        out
    }

    /// `∫_σ` over the face spanned by the increasing vertex list `sigma`;
    /// forms of other degrees integrate to zero.
    pub fn integrate_face(&self, sigma: &[usize]) -> Result<S> {
        check_face(sigma, self.n)?;
        Ok(self.pullback(sigma).integrate())
    }
}

fn check_face(sigma: &[usize], n: usize) -> Result<()> {
    if sigma.is_empty() || sigma.windows(2).any(|w| w[0] >= w[1]) || sigma.iter().any(|&v| v > n) {
        return Err(Error::invalid(format!("{:?} is not a face of Δ_{}", sigma, n)));
    }
    Ok(())
}

fn wedge_monomials(a: &FormMonomial, b: &FormMonomial) -> Option<(FormMonomial, bool)> {
    if a.wedge & b.wedge != 0 {
        return None;
    }
    let exps = a.exps.iter().zip(&b.exps).map(|(x, y)| x + y).collect();
    Some((FormMonomial { exps, wedge: a.wedge | b.wedge }, wedge_sign(a.wedge, b.wedge)))
}

fn d_monomial<S: Scalar>(m: &FormMonomial) -> Vector<FormMonomial, S> {
    let mut out = Vector::zero();
    for (j, &e) in m.exps.iter().enumerate() {
        if e == 0 || m.wedge >> j & 1 == 1 {
            continue;
        }
        let mut exps = m.exps.clone();
        exps[j] -= 1;
        let neg = (m.wedge & ((1u32 << j) - 1)).count_ones() % 2 == 1;
        let c = S::from_int(e as i64);
        out.add_term(FormMonomial { exps, wedge: m.wedge | 1 << j }, if neg { -c } else { c });
    }
    out
}

/// Non-degenerate simplices of `Δ_n` ordered by dimension, then lexicographically.
pub fn standard_simplices(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for k in 0..=n {
        let mut cur = Vec::new();
        subsets(n + 1, k + 1, 0, &mut cur, &mut out);
    }
    out
}

fn subsets(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for v in start..n {
        cur.push(v);
        subsets(n, k, v + 1, cur, out);
        cur.pop();
    }
}

/// Whitney's elementary form `ω_σ = k! Σ_j (−1)^j t_{i_j} dt_{i_0} ∧ ⋯ (omit j) ⋯ ∧ dt_{i_k}`.
pub fn whitney<S: Scalar>(sigma: &[usize], n: usize) -> Result<PolyForm<S>> {
    check_face(sigma, n)?;
    let k = sigma.len() - 1;
    let mut out = PolyForm::zero(n);
    for j in 0..=k {
        let mut term = PolyForm::coord(n, sigma[j]);
        for (l, &v) in sigma.iter().enumerate() {
            if l != j {
                term = term.wedge(&PolyForm::dcoord(n, v));
            }
        }
        out = if j % 2 == 0 { out.plus(&term) } else { out.minus(&term) };
    }
    Ok(out.scaled(&S::factorial(k)))
}

/// Whitney extension `E`: cochain coordinates (indexed by [`standard_simplices`]) to forms.
pub fn whitney_extension<S: Scalar>(n: usize, cochain: &Vector<usize, S>) -> PolyForm<S> {
    let simplices = standard_simplices(n);
    let mut out = PolyForm::zero(n);
    for (&s, c) in cochain.iter() {
        out = out.plus(&whitney(&simplices[s], n).expect("standard simplex").scaled(c));
    }
    out
}

/// Integration map `I`: forms to cochains, indexed by [`standard_simplices`].
pub fn integration_map<S: Scalar>(a: &PolyForm<S>) -> Vector<usize, S> {
    let simplices = standard_simplices(a.dim());
    let mut out = Vector::zero();
    for (idx, s) in simplices.iter().enumerate() {
        if a.terms.keys().any(|m| m.degree() as usize == s.len() - 1) {
            out.add_term(idx, a.integrate_face(s).expect("standard simplex"));
        }
    }
    out
}

fn binomial(n: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

/// Poincaré homotopy contracting `Δ_n` onto vertex `i`:
/// `d h_i + h_i d = id − ε_i` with `ε_i` the evaluation at the vertex.
pub fn vertex_homotopy<S: Scalar>(a: &PolyForm<S>, i: usize) -> PolyForm<S> {
    let n = a.dim();
    let mut out = Vector::zero();
    for (m, c) in a.terms.iter() {
        let r = m.degree();
        if r == 0 {
            continue;
        }
        // ∫_0^1 u^{r-1} (t^a)(e_i + u (t - e_i)) du
        let mut poly: Vec<(Vec<u32>, S)> = Vec::new();
        if i == 0 {
            poly.push((m.exps.clone(), S::one() / S::from_int((r + m.poly_degree()) as i64)));
        } else {
            let ai = m.exps[i - 1];
            let rest: u32 = m.poly_degree() - ai;
            for cexp in 0..=ai {
                let mut exps = m.exps.clone();
                exps[i - 1] = cexp;
                let num = S::factorial((r - 1 + rest + cexp) as usize) * S::factorial((ai - cexp) as usize);
                let beta = num / S::factorial((r + rest + ai) as usize);
                poly.push((exps, beta * S::from_int(binomial(ai, cexp))));
            }
        }
        let js: Vec<u32> = (0..n as u32).filter(|b| m.wedge >> b & 1 == 1).collect();
        for (pos, &b) in js.iter().enumerate() {
            let wedge = m.wedge & !(1 << b);
            let sign = if pos % 2 == 1 { -c.clone() } else { c.clone() };
            for (exps, coef) in &poly {
                let mut e = exps.clone();
                e[b as usize] += 1;
                out.add_term(FormMonomial { exps: e, wedge }, sign.clone() * coef.clone());
                if b as usize + 1 == i {
                    out.add_term(FormMonomial { exps: exps.clone(), wedge }, -(sign.clone() * coef.clone()));
                }
            }
        }
    }
    PolyForm::from_terms(n, out)
}

/// Dupont's operator `s = Σ_{k<n} Σ_{i_0<⋯<i_k} (−1)^k ω_{i_0…i_k} h_{i_k} ⋯ h_{i_0}`,
/// satisfying `d s + s d = id − E I`.
pub fn dupont_operator<S: Scalar>(a: &PolyForm<S>) -> PolyForm<S> {
    let n = a.dim();
    let mut out = PolyForm::zero(n);
    for sigma in standard_simplices(n) {
        if sigma.len() > n {
            continue;
        }
        let mut h = a.clone();
        for &v in &sigma {
            h = vertex_homotopy(&h, v);
            if h.is_zero() {
                break;
            }
        }
        if !h.is_zero() {
            let w = whitney::<S>(&sigma, n).expect("standard simplex");
            out = out.plus(&w.wedge(&h).scaled(&S::sign(sigma.len() % 2 == 0)));
        }
    }
    out
}

/// Dupont's contraction `(E, I, K)` on `Δ_n` in the sign convention
/// `K d + d K = E I − id`, i.e. `K = −s`. Values of `K` on monomials are memoized.
pub struct DupontForms<S: Scalar> {
    n: usize,
    simplices: Vec<Vec<usize>>,
    whitney: Vec<PolyForm<S>>,
    memo: Mutex<HashMap<FormMonomial, PolyForm<S>>>,
}

impl<S: Scalar> DupontForms<S> {
    pub fn new(n: usize) -> Self {
        let simplices = standard_simplices(n);
        let whitney = simplices.iter().map(|s| whitney(s, n).expect("standard simplex")).collect();
        Self { n, simplices, whitney, memo: Mutex::new(HashMap::new()) }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn simplices(&self) -> &[Vec<usize>] {
        &self.simplices
    }

    /// `E(e_σ) = ω_σ`.
    pub fn extend(&self, simplex: usize) -> &PolyForm<S> {
        &self.whitney[simplex]
    }

    /// `I`.
    pub fn integrate(&self, a: &PolyForm<S>) -> Vector<usize, S> {
        integration_map(a)
    }

    /// `I` on a single monomial.
    pub fn integrate_monomial(&self, m: &FormMonomial) -> Vector<usize, S> {
        integration_map(&PolyForm::monomial(self.n, m.clone()))
    }

    /// `K = −s` on a single monomial.
    pub fn homotopy_monomial(&self, m: &FormMonomial) -> PolyForm<S> {
        if let Some(v) = self.memo.lock().unwrap().get(m) {
            return v.clone();
        }
        let v = dupont_operator(&PolyForm::monomial(self.n, m.clone())).scaled(&-S::one());
        self.memo.lock().unwrap().insert(m.clone(), v.clone());
        v
    }

    pub fn homotopy(&self, a: &PolyForm<S>) -> PolyForm<S> {
        PolyForm::from_terms(self.n, a.terms.map_linear(|m| self.homotopy_monomial(m).terms))
    }
}
