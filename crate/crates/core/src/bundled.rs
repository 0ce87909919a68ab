//! Sample algebras, extensions and diagrams used by the tests, the acceptance
//! suite and the command-line front-end.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::graded::{BasisElement, GradedSpace};
use crate::linalg::LinearMap;
use crate::linfty::{dgla_import, lie_algebra, CentralExtension, LInftyAlgebra, LInftyMorphism};
use crate::multilinear::MultilinearMap;
use crate::scalar::Scalar;
use crate::tot::{cech_diagram, CechNerve, CosimplicialLInfty, SemicosimplicialLInfty};
use crate::vector::Vector;

/// Deterministic generator for sampled inputs.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The Heisenberg algebra `[X, Y] = Z` with `X, Y` of weight 1 and `Z` of weight 2.
pub fn heis<S: Scalar>() -> Arc<LInftyAlgebra<S>> {
    Arc::new(lie_algebra(&[("X", 1), ("Y", 1), ("Z", 2)], 3, &[(0, 1, Vector::basis(2))]).expect("heis is a Lie algebra"))
}

/// Index of `E_{ij}` (`i < j`, zero-based) in [`ut`].
pub fn ut_index(n: usize, i: usize, j: usize) -> usize {
    ut_pairs(n).iter().position(|&p| p == (i, j)).expect("strictly upper entry")
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

/// Strictly upper triangular `n × n` matrices, `E_{ij}` of weight `j − i`;
/// nilpotent of class `n − 1`.
pub fn ut<S: Scalar>(n: usize) -> Arc<LInftyAlgebra<S>> {
    let pairs = ut_pairs(n);
    let names: Vec<String> = pairs.iter().map(|(i, j)| format!("E{}{}", i + 1, j + 1)).collect();
    let spec: Vec<(&str, u32)> = names.iter().zip(&pairs).map(|(s, (i, j))| (s.as_str(), (j - i) as u32)).collect();
    let mut bracket = Vec::new();
    for (a, &(i, j)) in pairs.iter().enumerate() {
        for (b, &(k, l)) in pairs.iter().enumerate().skip(a + 1) {
            let mut v = Vector::zero();
            if j == k {
                v.add_term(ut_index(n, i, l), S::one());
            }
            if l == i {
                v.add_term(ut_index(n, k, j), -S::one());
            }
            if !v.is_zero() {
                bracket.push((a, b, v));
            }
        }
    }
    Arc::new(lie_algebra(&spec, n as u32, &bracket).expect("ut(n) is a Lie algebra"))
}

/// Abelian algebra on the given shifted degrees (all of weight 1) with `q_1 = d`.
pub fn abelian<S: Scalar>(degrees: &[i32], d: LinearMap<S>) -> Result<Arc<LInftyAlgebra<S>>> {
    let space = GradedSpace::new(degrees.iter().enumerate().map(|(i, &g)| BasisElement::new(format!("a{i}"), g, 1)).collect(), 2)?;
    Ok(Arc::new(LInftyAlgebra::abelian(space, &d)?))
}

/// One generator of shifted degree 0 and nothing else.
pub fn line<S: Scalar>() -> Arc<LInftyAlgebra<S>> {
    abelian(&[0], LinearMap::zero(1, 1)).expect("valid")
}

/// `a0 → a1` with `q_1(a0) = a1`, acyclic.
pub fn acyclic_pair<S: Scalar>(degree: i32) -> Arc<LInftyAlgebra<S>> {
    let d = LinearMap::new(2, 2, vec![Vector::basis(1), Vector::zero()]).expect("valid");
    abelian(&[degree, degree + 1], d).expect("valid")
}

fn random_coeff<S: Scalar>(rng: &mut ChaCha8Rng, range: i64) -> S {
    S::from_int(rng.gen_range(-range..=range))
}

/// Random non-zero small rational.
pub fn random_rational<S: Scalar>(rng: &mut ChaCha8Rng) -> S {
    loop {
        let p = rng.gen_range(-5i64..=5);
        let q = rng.gen_range(1i64..=4);
        if p != 0 {
            return S::ratio(p, q);
        }
    }
}

/// Random vector supported on `indices`, with small rational coefficients.
pub fn random_vector<S: Scalar>(rng: &mut ChaCha8Rng, indices: &[usize]) -> Vector<usize, S> {
    let mut v = Vector::zero();
    for &i in indices {
        if rng.gen_bool(0.7) {
            v.add_term(i, random_rational(rng));
        }
    }
    v
}

/// A random cochain complex of dimension `1..=max_dim` with shifted degrees in
/// `-2..=1`, presented in a scrambled basis.
pub fn random_complex<S: Scalar>(rng: &mut ChaCha8Rng, max_dim: usize) -> Arc<LInftyAlgebra<S>> {
    let dim = rng.gen_range(1..=max_dim.max(1));
    let mut degrees = Vec::new();
    let mut pairs = Vec::new();
    while degrees.len() < dim {
        let g = rng.gen_range(-2..=1);
        if degrees.len() + 2 <= dim && g < 1 && rng.gen_bool(0.5) {
            pairs.push((degrees.len(), degrees.len() + 1));
            degrees.push(g);
            degrees.push(g + 1);
        } else {
            degrees.push(g);
        }
    }
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by_key(|&i| (degrees[i], i));
    let pos: Vec<usize> = (0..dim).map(|i| order.iter().position(|&o| o == i).unwrap()).collect();
    let sorted: Vec<i32> = order.iter().map(|&i| degrees[i]).collect();
    let mut d = vec![vec![S::zero(); dim]; dim];
    for &(u, v) in &pairs {
        d[pos[v]][pos[u]] = S::one();
    }
    for _ in 0..2 * dim {
        let (i, j) = (rng.gen_range(0..dim), rng.gen_range(0..dim));
        if i == j || sorted[i] != sorted[j] {
            continue;
        }
        let c: S = random_coeff(rng, 3);
        // conjugate by I + c·E_ij
        for col in 0..dim {
            let add = c.clone() * d[j][col].clone();
            d[i][col] = d[i][col].clone() + add;
        }
        for row in d.iter_mut() {
            let sub = c.clone() * row[i].clone();
            row[j] = row[j].clone() - sub;
        }
    }
    let columns = (0..dim).map(|c| Vector::from_terms((0..dim).map(|r| (r, d[r][c].clone())))).collect();
    abelian(&sorted, LinearMap::new(dim, dim, columns).expect("square")).expect("d² = 0 by construction")
}

/// `heis ⊗ A` for the square-zero algebra `A = 𝕂 ⊕ 𝕂ε ⊕ 𝕂η`, `dε = η`,
/// imported as a dgla (classical degrees 0 and 1).
pub fn heis_eps<S: Scalar>() -> Arc<LInftyAlgebra<S>> {
    let names = ["X", "Y", "Z", "Xe", "Ye", "Ze", "Xh", "Yh", "Zh"];
    let weights = [1, 1, 2, 1, 1, 2, 1, 1, 2];
    let space = GradedSpace::new(
        names.iter().zip(weights).enumerate().map(|(i, (n, w))| BasisElement::new(*n, (i / 6) as i32, w)).collect(),
        3,
    )
    .expect("valid");
    let d = LinearMap::from_fn(9, 9, |i| if (3..6).contains(&i) { Vector::basis(i + 3) } else { Vector::zero() });
    let bracket = vec![
        (0, 1, Vector::basis(2)),
        (0, 4, Vector::basis(5)),
        (3, 1, Vector::basis(5)),
        (0, 7, Vector::basis(8)),
        (6, 1, Vector::basis(8)),
    ];
    Arc::new(dgla_import(&space, &d, &bracket).expect("heis ⊗ A is a dgla"))
}

fn extension<S: Scalar>(with_killer: bool) -> CentralExtension<S> {
    let mut basis = vec![BasisElement::new("w", 0, 1), BasisElement::new("u", 1, 2)];
    if with_killer {
        basis.push(BasisElement::new("v", 0, 2));
    }
    let total_space = GradedSpace::new(basis, 3).expect("valid");
    let dim = total_space.dim();
    let q1 = MultilinearMap::new(
        &total_space,
        &total_space,
        1,
        1,
        if with_killer { vec![(vec![2], Vector::basis(1))] } else { Vec::new() },
    )
    .expect("valid");
    let q2 = MultilinearMap::new(&total_space, &total_space, 2, 1, vec![(vec![0, 0], Vector::basis(1))]).expect("valid");
    let total = Arc::new(LInftyAlgebra::new(total_space, vec![q1, q2]).expect("valid"));
    let base_space = GradedSpace::new(vec![BasisElement::new("w", 0, 1)], 3).expect("valid");
    let base = Arc::new(LInftyAlgebra::new(base_space, Vec::new()).expect("valid"));
    let p = LinearMap::from_fn(dim, 1, |i| if i == 0 { Vector::basis(0) } else { Vector::zero() });
    let projection = LInftyMorphism::strict(total, base, &p).expect("valid");
    let kernel = (1..dim).collect();
    CentralExtension::new(projection, kernel).expect("central")
}

/// `q_2(w, w) = u` over the abelian line spanned by `w`; every non-zero `x = a·w`
/// is obstructed.
pub fn obstructed_extension<S: Scalar>() -> CentralExtension<S> {
    extension(false)
}

/// As [`obstructed_extension`] with an extra `v`, `q_1(v) = u`, so every
/// obstruction vanishes.
pub fn unobstructed_extension<S: Scalar>() -> CentralExtension<S> {
    extension(true)
}

/// Čech diagram of a cover by two opens with one overlap, constant coefficients.
pub fn cech2<S: Scalar>(l: Arc<LInftyAlgebra<S>>) -> SemicosimplicialLInfty<S> {
    cech_diagram(&CechNerve::constant(2, &[vec![0, 1]], l).expect("valid nerve")).expect("valid diagram")
}

/// Three opens with pairwise overlaps and empty triple overlap (a circle).
pub fn cech3_circle<S: Scalar>(l: Arc<LInftyAlgebra<S>>) -> SemicosimplicialLInfty<S> {
    cech_diagram(&CechNerve::constant(3, &[vec![0, 1], vec![1, 2], vec![0, 2]], l).expect("valid nerve")).expect("valid diagram")
}

/// Three opens with a non-empty triple overlap.
pub fn cech3_full<S: Scalar>(l: Arc<LInftyAlgebra<S>>) -> SemicosimplicialLInfty<S> {
    cech_diagram(&CechNerve::constant(3, &[vec![0, 1, 2]], l).expect("valid nerve")).expect("valid diagram")
}

/// `L` at every level `0..=levels`, all cofaces the identity.
pub fn constant_semicosimplicial<S: Scalar>(l: Arc<LInftyAlgebra<S>>, levels: usize) -> SemicosimplicialLInfty<S> {
    let d = l.dim();
    let cofaces = (0..levels).map(|n| vec![LinearMap::identity(d); n + 2]).collect();
    SemicosimplicialLInfty::new(vec![l; levels + 1], cofaces).expect("constant diagram")
}

/// `L` at every level up to `k_max`, all cofaces and codegeneracies the identity.
pub fn constant_cosimplicial<S: Scalar>(l: Arc<LInftyAlgebra<S>>, k_max: usize) -> CosimplicialLInfty<S> {
    let d = l.dim();
    let cofaces = (0..k_max).map(|n| vec![LinearMap::identity(d); n + 2]).collect();
    let codegeneracies = (0..k_max).map(|n| vec![LinearMap::identity(d); n + 1]).collect();
    CosimplicialLInfty::new(vec![l; k_max + 1], cofaces, codegeneracies).expect("constant diagram")
}

/// A random two-level abelian diagram `L_0 ⇉ L_1` with `L_1 = L_0 ⊕ C` and
/// cofaces `ι + [q_1, h_j]` for random homotopies `h_j`.
pub fn random_two_level<S: Scalar>(rng: &mut ChaCha8Rng) -> SemicosimplicialLInfty<S> {
    let l0 = random_complex::<S>(rng, 3);
    let c = random_complex::<S>(rng, 3);
    let mut degrees: Vec<i32> = (0..l0.dim()).map(|i| l0.space().element(i).degree).collect();
    degrees.extend((0..c.dim()).map(|i| c.space().element(i).degree));
    let (n0, n1) = (l0.dim(), degrees.len());
    let d0 = l0.differential();
    let dc = c.differential();
    let d1 = LinearMap::from_fn(n1, n1, |i| if i < n0 { d0.columns[i].clone() } else { dc.columns[i - n0].map_keys(|k| k + n0) });
    let l1 = abelian(&degrees, d1.clone()).expect("direct sum");
    let coface = |rng: &mut ChaCha8Rng| {
        let h = LinearMap::from_fn(n0, n1, |i| {
            let targets: Vec<usize> = (0..n1).filter(|&t| degrees[t] == degrees[i] - 1).collect();
            random_vector(rng, &targets)
        });
        let incl = LinearMap::from_fn(n0, n1, Vector::basis);
        let dh = d1.compose(&h);
        let hd = h.compose(&d0);
        LinearMap::from_fn(n0, n1, |i| incl.columns[i].plus(&dh.columns[i]).plus(&hd.columns[i]))
    };
    let f0 = coface(rng);
    let f1 = coface(rng);
    SemicosimplicialLInfty::new(vec![l0, l1], vec![vec![f0, f1]]).expect("chain maps")
}
