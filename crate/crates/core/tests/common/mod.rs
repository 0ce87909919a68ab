#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use linfty::graded::{koszul_sign, permutations, sym_product, SymTensor};
use linfty::linfty::{LInftyAlgebra, LInftyMorphism};
use linfty::multilinear::MultilinearMap;
use linfty::{GradedBasis, GradedSpace, LinearMap, Rational, Scalar, Vector};
use num_traits::{One, Zero};

pub type Mat = Vec<Vec<Rational>>;

pub fn q(p: i64, d: i64) -> Rational {
    Rational::ratio(p, d)
}

pub fn r(n: i64) -> Rational {
    Rational::from_int(n)
}

pub fn mat_zero(n: usize) -> Mat {
    vec![vec![Rational::zero(); n]; n]
}

pub fn mat_id(n: usize) -> Mat {
    let mut m = mat_zero(n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Rational::one();
    }
    m
}

pub fn mat_mul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut c = mat_zero(n);
    for i in 0..n {
        for k in 0..n {
            if a[i][k].is_zero() {
                continue;
            }
            for j in 0..n {
                c[i][j] += &a[i][k] * &b[k][j];
            }
        }
    }
    c
}

pub fn mat_add(a: &Mat, b: &Mat, s: &Rational) -> Mat {
    a.iter().zip(b).map(|(x, y)| x.iter().zip(y).map(|(u, v)| u + s * v).collect()).collect()
}

fn is_zero_mat(a: &Mat) -> bool {
    a.iter().all(|row| row.iter().all(|x| x.is_zero()))
}

/// `exp` of a nilpotent matrix.
pub fn mat_exp(a: &Mat) -> Mat {
    let n = a.len();
    let mut out = mat_id(n);
    let mut power = mat_id(n);
    for k in 1..=n {
        power = mat_mul(&power, a);
        if is_zero_mat(&power) {
            break;
        }
        out = mat_add(&out, &power, &Rational::inv_factorial(k));
    }
    out
}

/// `log` of a unipotent matrix.
pub fn mat_log(u: &Mat) -> Mat {
    let n = u.len();
    let x = mat_add(u, &mat_id(n), &r(-1));
    let mut out = mat_zero(n);
    let mut power = mat_id(n);
    for k in 1..=n {
        power = mat_mul(&power, &x);
        if is_zero_mat(&power) {
            break;
        }
        let c = Rational::sign(k % 2 == 0) / r(k as i64);
        out = mat_add(&out, &power, &c);
    }
    out
}

fn ut_pairs(n: usize) -> Vec<(usize, usize)> {
    let mut pairs = Vec::new();
    for d in 1..n {
        for i in 0..n - d {
            pairs.push((i, i + d));
        }
    }
    pairs
}

/// `Σ x_b E_{ij}` in the basis of the upper triangular samples (heis is `n = 3`).
pub fn to_matrix(n: usize, x: &Vector<usize, Rational>) -> Mat {
    let mut m = mat_zero(n);
    for (b, (i, j)) in ut_pairs(n).into_iter().enumerate() {
        m[i][j] = x.coeff(&b);
    }
    m
}

pub fn from_matrix(n: usize, m: &Mat) -> Vector<usize, Rational> {
    let mut v = Vector::zero();
    for (b, (i, j)) in ut_pairs(n).into_iter().enumerate() {
        v.add_term(b, m[i][j].clone());
    }
    for i in 0..n {
        for j in 0..=i {
            assert!(m[i][j].is_zero(), "not strictly upper triangular");
        }
    }
    v
}

/// `log(exp(a) exp(b))` computed with matrices.
pub fn matrix_bch(n: usize, a: &Vector<usize, Rational>, b: &Vector<usize, Rational>) -> Vector<usize, Rational> {
    from_matrix(n, &mat_log(&mat_mul(&mat_exp(&to_matrix(n, a)), &mat_exp(&to_matrix(n, b)))))
}

/// Rank by dense Gaussian elimination.
pub fn rank(mut rows: Mat) -> usize {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank][c].clone();
        for i in 0..rows.len() {
            if i != rank && !rows[i][c].is_zero() {
                let f = &rows[i][c] / &pivot;
                for j in c..cols {
                    let v = &f * &rows[rank][j];
                    rows[i][j] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Dense matrix (`rows × cols`, entry `[target][source]`) of a linear map.
pub fn dense(map: &LinearMap<Rational>) -> Mat {
    let mut m = vec![vec![Rational::zero(); map.source_dim]; map.target_dim];
    for (c, col) in map.columns.iter().enumerate() {
        for (r, v) in col.iter() {
            m[*r][c] = v.clone();
        }
    }
    m
}

/// Rank of the columns `cols` of `m`.
pub fn column_rank(m: &Mat, cols: &[usize]) -> usize {
    rank(m.iter().map(|row| cols.iter().map(|&c| row[c].clone()).collect()).collect())
}

/// Cohomology dimensions of a degree +1 differential, keyed by degree.
pub fn cohomology(degrees: &[i32], d: &Mat) -> BTreeMap<i32, usize> {
    let mut by_degree: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
    for (i, &g) in degrees.iter().enumerate() {
        by_degree.entry(g).or_default().push(i);
    }
    let ranks: BTreeMap<i32, usize> = by_degree.iter().map(|(&g, idx)| (g, column_rank(d, idx))).collect();
    by_degree
        .iter()
        .map(|(&g, idx)| (g, idx.len() - ranks[&g] - ranks.get(&(g - 1)).copied().unwrap_or(0)))
        .filter(|&(_, h)| h > 0)
        .collect()
}

/// Sorts `keys`, returning the Koszul sign of the sorting permutation, or
/// `None` when an odd key repeats.
fn sort_with_sign(space: &GradedSpace, keys: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut perm: Vec<usize> = (0..keys.len()).collect();
    perm.sort_by_key(|&i| (keys[i], i));
    let sorted: Vec<usize> = perm.iter().map(|&i| keys[i]).collect();
    if sorted.windows(2).any(|w| w[0] == w[1] && space.degree(&w[0]).rem_euclid(2) == 1) {
        return None;
    }
    let degrees: Vec<i32> = keys.iter().map(|k| space.degree(k)).collect();
    Some((sorted, koszul_sign(&degrees, &perm).unwrap()))
}

/// Graded-symmetric evaluation by expanding every argument into basis terms.
pub fn dense_evaluate(space: &GradedSpace, map: &MultilinearMap<Rational>, args: &[Vector<usize, Rational>]) -> Vector<usize, Rational> {
    let mut out = Vector::zero();
    let mut stack: Vec<(Vec<usize>, Rational)> = vec![(Vec::new(), Rational::one())];
    for a in args {
        let mut next = Vec::new();
        for (keys, c) in &stack {
            for (k, v) in a.iter() {
                let mut ks = keys.clone();
                ks.push(*k);
                next.push((ks, c * v));
            }
        }
        stack = next;
    }
    for (keys, c) in stack {
        if let Some((sorted, sign)) = sort_with_sign(space, &keys) {
            out.axpy(&(c * r(sign as i64)), &map.on_monomial(&sorted));
        }
    }
    out
}

fn evaluate_block(l: &LInftyAlgebra<Rational>, keys: &[usize]) -> Vector<usize, Rational> {
    if keys.len() > l.arity_bound() {
        return Vector::zero();
    }
    let args: Vec<_> = keys.iter().map(|&k| Vector::basis(k)).collect();
    dense_evaluate(l.space(), &l.q(keys.len()), &args)
}

/// `Q(m)` summed over all permutations: `Σ_σ Σ_j ε(σ)/(j!(n−j)!) q_j(m_σ…) ⊙ m_σ…`.
pub fn coderivation_oracle(l: &LInftyAlgebra<Rational>, m: &[usize]) -> SymTensor<usize, Rational> {
    let n = m.len();
    let degrees: Vec<i32> = m.iter().map(|k| l.degree(k)).collect();
    let mut out = SymTensor::zero();
    for sigma in permutations(n) {
        let sign = r(koszul_sign(&degrees, &sigma).unwrap() as i64);
        for j in 1..=n {
            let keys: Vec<usize> = sigma[..j].iter().map(|&p| m[p]).collect();
            let head = evaluate_block(l, &keys);
            if head.is_zero() {
                continue;
            }
            let mut factors = vec![head];
            factors.extend(sigma[j..].iter().map(|&p| Vector::basis(m[p])));
            let weight = &sign / (Rational::factorial(j) * Rational::factorial(n - j));
            out.axpy(&weight, &sym_product(l.space(), &factors));
        }
    }
    out
}

fn compositions(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in 1..=n {
        for mut rest in compositions(n - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// `F(m)` summed over permutations and ordered compositions:
/// `Σ_σ Σ_{i₁+⋯+i_k=n} ε(σ)/(k! i₁!⋯i_k!) f_{i₁}(…) ⊙ ⋯ ⊙ f_{i_k}(…)`.
pub fn morphism_oracle(f: &LInftyMorphism<Rational>, m: &[usize]) -> SymTensor<usize, Rational> {
    let source = f.source_algebra();
    let target = f.target_algebra();
    let n = m.len();
    let degrees: Vec<i32> = m.iter().map(|k| source.degree(k)).collect();
    let mut out = SymTensor::zero();
    for sigma in permutations(n) {
        let sign = r(koszul_sign(&degrees, &sigma).unwrap() as i64);
        for comp in compositions(n) {
            let mut factors = Vec::new();
            let mut start = 0;
            let mut denom = Rational::factorial(comp.len());
            for &len in &comp {
                let keys: Vec<usize> = sigma[start..start + len].iter().map(|&p| m[p]).collect();
                start += len;
                denom *= Rational::factorial(len);
                let value = if len > f.taylor().len() {
                    Vector::zero()
                } else {
                    let args: Vec<_> = keys.iter().map(|&k| Vector::basis(k)).collect();
                    dense_evaluate(source.space(), &f.f(len), &args)
                };
                factors.push(value);
            }
            if factors.iter().any(|v| v.is_zero()) {
                continue;
            }
            out.axpy(&(&sign / denom), &sym_product(target.space(), &factors));
        }
    }
    out
}

/// Simplices of `Δ_n` (all non-empty subsets of `{0..n}`).
pub fn simplices(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for mask in 1u32..(1 << (n + 1)) {
        out.push((0..=n).filter(|&v| mask & (1 << v) != 0).collect());
    }
    out
}

/// A diagram given by dense data: degrees of each level, `coface[n][j]:
/// L_n → L_{n+1}` and optionally `codegeneracy[n][j]: L_{n+1} → L_n`.
pub struct DenseDiagram {
    pub degrees: Vec<Vec<i32>>,
    pub coface: Vec<Vec<Mat>>,
    pub codegeneracy: Option<Vec<Vec<Mat>>>,
}

fn mat_apply_chain(maps: &[&Mat], dim: usize) -> Mat {
    let mut acc = mat_id(dim);
    for m in maps {
        let rows = m.len();
        let mut next = vec![vec![Rational::zero(); acc[0].len()]; rows];
        for i in 0..rows {
            for (k, mk) in m[i].iter().enumerate() {
                if mk.is_zero() {
                    continue;
                }
                for j in 0..acc[0].len() {
                    next[i][j] += mk * &acc[k][j];
                }
            }
        }
        acc = next;
    }
    acc
}

impl DenseDiagram {
    fn dim(&self, n: usize) -> usize {
        self.degrees[n].len()
    }

    /// `L(θ): L_m → L_n` for a monotone `θ`, factored as a surjection followed
    /// by an injection.
    fn functor(&self, theta: &[usize], n: usize) -> Mat {
        let m = theta.len() - 1;
        let mut chain: Vec<&Mat> = Vec::new();
        let repeats: Vec<usize> = (0..m).filter(|&i| theta[i] == theta[i + 1]).collect();
        let mut level = m;
        for &i in repeats.iter().rev() {
            level -= 1;
            chain.push(&self.codegeneracy.as_ref().expect("surjections need codegeneracies")[level][i]);
        }
        let image: BTreeSet<usize> = theta.iter().copied().collect();
        let missing: Vec<usize> = (0..=n).filter(|v| !image.contains(v)).collect();
        for &j in &missing {
            chain.push(&self.coface[level][j]);
            level += 1;
        }
        mat_apply_chain(&chain, self.dim(m))
    }

    /// Dimensions by degree of the limit of `C*(Δ_n; L_n)`, `n ≤ k`, over all
    /// injective (or, with codegeneracies, all) monotone maps.
    pub fn limit_dims(&self, k: usize) -> BTreeMap<i32, usize> {
        let sims: Vec<Vec<Vec<usize>>> = (0..=k).map(simplices).collect();
        let mut offsets = Vec::new();
        let mut degrees = Vec::new();
        for n in 0..=k {
            offsets.push(degrees.len());
            for s in &sims[n] {
                for &g in &self.degrees[n] {
                    degrees.push(g + s.len() as i32 - 1);
                }
            }
        }
        let total = degrees.len();
        let var = |n: usize, s: &[usize], b: usize| offsets[n] + sims[n].iter().position(|t| t == s).unwrap() * self.dim(n) + b;
        let mut rows: Mat = Vec::new();
        for m in 0..=k {
            for n in 0..=k {
                for theta in monotone_maps(m, n, self.codegeneracy.is_some()) {
                    let f = self.functor(&theta, n);
                    for tau in &sims[m] {
                        let image: Vec<usize> = tau.iter().map(|&v| theta[v]).collect();
                        let injective = image.windows(2).all(|w| w[0] < w[1]);
                        for b in 0..self.dim(n) {
                            // (L(θ)_* α_m)(τ)_b − (θ^* α_n)(τ)_b = 0
                            let mut row = vec![Rational::zero(); total];
                            for a in 0..self.dim(m) {
                                if !f[b][a].is_zero() {
                                    row[var(m, tau, a)] += &f[b][a];
                                }
                            }
                            if injective {
                                row[var(n, &image, b)] -= Rational::one();
                            }
                            if row.iter().any(|x| !x.is_zero()) {
                                rows.push(row);
                            }
                        }
                    }
                }
            }
        }
        let mut by_degree: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        for (i, &g) in degrees.iter().enumerate() {
            by_degree.entry(g).or_default().push(i);
        }
        by_degree
            .into_iter()
            .map(|(g, idx)| (g, idx.len() - if rows.is_empty() { 0 } else { column_rank(&rows, &idx) }))
            .filter(|&(_, d)| d > 0)
            .collect()
    }
}

/// Monotone maps `[m] → [n]`, optionally only the injective ones.
pub fn monotone_maps(m: usize, n: usize, all: bool) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..=m {
        let mut next = Vec::new();
        for prefix in &out {
            let lo = match prefix.last() {
                None => 0,
                Some(&p) if all => p,
                Some(&p) => p + 1,
            };
            for v in lo..=n {
                let mut t: Vec<usize> = prefix.clone();
                t.push(v);
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// Rational Betti numbers of the simplicial complex generated by `facets`.
pub fn betti(facets: &[Vec<usize>]) -> Vec<usize> {
    let mut all: BTreeSet<Vec<usize>> = BTreeSet::new();
    for f in facets {
        let n = f.len();
        for mask in 1u32..(1 << n) {
            all.insert((0..n).filter(|&i| mask & (1 << i) != 0).map(|i| f[i]).collect());
        }
    }
    let top = all.iter().map(|s| s.len()).max().unwrap_or(0);
    let by_dim: Vec<Vec<Vec<usize>>> = (1..=top).map(|l| all.iter().filter(|s| s.len() == l).cloned().collect()).collect();
    let boundary_rank = |p: usize| -> usize {
        if p + 1 >= by_dim.len() {
            return 0;
        }
        let rows: Mat = by_dim[p + 1]
            .iter()
            .map(|s| {
                by_dim[p]
                    .iter()
                    .map(|t| match (0..s.len()).find(|&j| {
                        let mut f = s.clone();
                        f.remove(j);
                        f == *t
                    }) {
                        Some(j) => Rational::sign(j % 2 == 1),
                        None => Rational::zero(),
                    })
                    .collect()
            })
            .collect();
        rank(rows)
    };
    (0..by_dim.len())
        .map(|p| by_dim[p].len() - boundary_rank(p) - if p == 0 { 0 } else { boundary_rank(p - 1) })
        .collect()
}

/// Small random graded space: degrees in `-2..=2`, weights in `1..nilpotency`.
pub fn random_space(rng: &mut rand_chacha::ChaCha8Rng, dim: usize, nilpotency: u32) -> GradedSpace {
    use rand::Rng;
    let basis = (0..dim)
        .map(|i| linfty::BasisElement::new(format!("b{i}"), rng.gen_range(-2..=2), rng.gen_range(1..nilpotency)))
        .collect();
    GradedSpace::new(basis, nilpotency).unwrap()
}

/// Random sparse map of the given arity and degree respecting the degree and weight rules.
pub fn random_map(rng: &mut rand_chacha::ChaCha8Rng, space: &GradedSpace, arity: usize, degree: i32) -> MultilinearMap<Rational> {
    use rand::Rng;
    let mut entries = Vec::new();
    for m in space.symmetric_basis(arity) {
        let d: i32 = m.iter().map(|k| space.degree(k)).sum::<i32>() + degree;
        let w: u32 = m.iter().map(|k| space.weight(k)).sum();
        let mut v = Vector::zero();
        for o in 0..space.dim() {
            if space.degree(&o) == d && space.weight(&o) >= w && rng.gen_bool(0.6) {
                v.add_term(o, linfty::bundled::random_rational(rng));
            }
        }
        if !v.is_zero() {
            entries.push((m, v));
        }
    }
    MultilinearMap::new(space, space, arity, degree, entries).unwrap()
}

/// Koszul sign by bubble sort: each adjacent swap of two odd elements flips the sign.
pub fn bubble_sign(degrees: &[i32], permutation: &[usize]) -> i32 {
    let mut seq: Vec<usize> = permutation.to_vec();
    let mut sign = 1;
    for i in 0..seq.len() {
        for j in 0..seq.len() - 1 - i {
            if seq[j] > seq[j + 1] {
                if degrees[seq[j]].rem_euclid(2) == 1 && degrees[seq[j + 1]].rem_euclid(2) == 1 {
                    sign = -sign;
                }
                seq.swap(j, j + 1);
            }
        }
    }
    sign
}

/// `heis ⊗ Λ(θ₁, θ₂)` as a dgla with zero differential; `a ⊗ θ` sits at `3p + a`
/// for `θ = 1, θ₁, θ₂, θ₁θ₂` (`p = 0..4`). Degree-0 elements (shifted) do not
/// square to zero under the bracket.
pub fn heis_theta() -> std::sync::Arc<LInftyAlgebra<Rational>> {
    let heis_bracket = |a: usize, b: usize| -> Rational {
        match (a, b) {
            (0, 1) => r(1),
            (1, 0) => r(-1),
            _ => Rational::zero(),
        }
    };
    // θ_p θ_s = sign · θ_t
    let product = |p: usize, s: usize| -> Option<(usize, i64)> {
        match (p, s) {
            (0, t) | (t, 0) => Some((t, 1)),
            (1, 2) => Some((3, 1)),
            (2, 1) => Some((3, -1)),
            _ => None,
        }
    };
    let degree = [0, 1, 1, 2];
    let names = ["", "1", "2", "12"];
    let mut basis = Vec::new();
    for p in 0..4 {
        for (a, w) in [("X", 1), ("Y", 1), ("Z", 2)] {
            basis.push(linfty::BasisElement::new(format!("{a}{}", names[p]), degree[p], w));
        }
    }
    let space = GradedSpace::new(basis, 3).unwrap();
    let mut bracket = Vec::new();
    for i in 0..12 {
        for j in 0..12 {
            let (p, a, s, b) = (i / 3, i % 3, j / 3, j % 3);
            let c = heis_bracket(a, b);
            if let (false, Some((t, sign))) = (c.is_zero(), product(p, s)) {
                bracket.push((i, j, Vector::term(3 * t + 2, c * r(sign))));
            }
        }
    }
    std::sync::Arc::new(linfty::linfty::dgla_import(&space, &LinearMap::zero(12, 12), &bracket).unwrap())
}
