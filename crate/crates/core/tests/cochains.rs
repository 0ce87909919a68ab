mod common;

use std::sync::Arc;

use common::{matrix_bch, monotone_maps, q, r};
use linfty::bundled::*;
use linfty::cochains::*;
use linfty::deligne::DeligneGroupoid;
use linfty::forms::{FormMonomial, PolyForm};
use linfty::linfty::*;
use linfty::transfer::{check_transfer_naturality, ContractionMorphism, Transfer};
use linfty::{BasisElement, GradedBasis, GradedSpace, LInftyStructure, LinearMap, Rational, Vector};
use rand_chacha::ChaCha8Rng;

type Q = Rational;
type V = Vector<usize, Q>;

/// Structure maps as comparable entry lists, ignoring basis names.
fn entries(l: &LInftyAlgebra<Q>) -> Vec<Vec<(Vec<usize>, V)>> {
    l.taylor().iter().map(|m| m.entries().map(|(k, v)| (k.clone(), v.clone())).filter(|(_, v)| !v.is_zero()).collect()).collect()
}

fn same_structure(a: &LInftyAlgebra<Q>, b: &LInftyAlgebra<Q>) -> bool {
    let degrees = |l: &LInftyAlgebra<Q>| (0..l.dim()).map(|i| (l.degree(&i), l.weight(&i))).collect::<Vec<_>>();
    let (mut ea, mut eb) = (entries(a), entries(b));
    let n = ea.len().max(eb.len());
    ea.resize(n, Vec::new());
    eb.resize(n, Vec::new());
    degrees(a) == degrees(b) && ea == eb
}

/// An MC element of `C*(Δ₁; L)` with prescribed MC value at vertex 0.
fn mc_edge(g: &mut ChaCha8Rng, l: &Arc<LInftyAlgebra<Q>>, y: &V) -> V {
    let groupoid = DeligneGroupoid::new(l.clone(), 1).unwrap();
    let t = Transfer::new(groupoid.vertex_contraction(1, 0).unwrap()).unwrap();
    let c = t.contraction();
    let v = random_vector(g, &c.big_algebra().space().indices_of_degree(0));
    t.kuranishi_solve(y, &linfty::transfer::Contraction::homotopy_vec(c, &v)).unwrap()
}

#[test]
fn finite_complexes() {
    assert_eq!(FinComplex::simplex(2).len(), 7);
    assert_eq!(FinComplex::simplex(3).facets(), vec![vec![0, 1, 2, 3]]);
    assert_eq!(FinComplex::boundary(2).len(), 6);
    assert_eq!(FinComplex::boundary(2).dim(), Some(1));
    let h = FinComplex::horn(2, 1).unwrap();
    assert_eq!(h.facets(), vec![vec![0, 1], vec![1, 2]]);
    assert!(h.is_subcomplex_of(&FinComplex::boundary(2)));
    assert!(!FinComplex::simplex(2).is_subcomplex_of(&h));
    assert_eq!(FinComplex::horn(3, 0).unwrap().len(), 13);
    assert!(FinComplex::horn(2, 3).is_err());
    assert!(FinComplex::generated(3, &[vec![1, 0]]).is_err());
    assert!(FinComplex::generated(2, &[vec![0, 2]]).is_err());
    let e = FinComplex::generated(3, &[vec![0, 2]]).unwrap();
    assert_eq!(e.simplices(), &[vec![0], vec![2], vec![0, 2]]);
}

#[test]
fn cochain_degrees_and_weights() {
    let c = cochain_structure(2, heis::<Q>()).unwrap();
    let a = c.algebra();
    for i in 0..a.dim() {
        let (sigma, b) = c.split(i);
        assert_eq!(a.degree(&i), sigma.len() as i32 - 1 + heis::<Q>().degree(&b));
        assert_eq!(a.weight(&i), heis::<Q>().weight(&b));
    }
}

#[test]
fn point_cochains_are_the_coefficients() {
    for l in [heis::<Q>(), heis_eps(), ut(4), obstructed_extension().total().clone()] {
        let c = cochain_structure(0, l.clone()).unwrap();
        assert!(same_structure(c.algebra(), &l));
    }
}

#[test]
fn abelian_coefficients_give_abelian_cochains() {
    let mut g = rng(1);
    for _ in 0..4 {
        let l = random_complex::<Q>(&mut g, 4);
        for n in 0..=2 {
            assert!(cochain_structure(n, l.clone()).unwrap().algebra().is_abelian());
        }
    }
}

#[test]
fn heisenberg_interval_brackets() {
    let c = cochain_structure(1, heis::<Q>()).unwrap();
    let a = c.algebra();
    let x0 = c.index(&[0], 0).unwrap();
    let x01 = c.index(&[0, 1], 0).unwrap();
    let y01 = c.index(&[0, 1], 1).unwrap();
    let z01 = c.index(&[0, 1], 2).unwrap();
    let v = a.bracket(&[x0, y01]);
    assert_eq!(v.len(), 1);
    assert!(v == Vector::term(z01, q(1, 2)) || v == Vector::term(z01, q(-1, 2)));
    // dt₁ ∧ dt₁ = 0
    assert!(a.bracket(&[x01, y01]).is_zero());
    // e₀ + e₁ is the constant cochain 1
    let x1 = c.index(&[1], 0).unwrap();
    let both = a.bracket(&[x0, y01]).plus(&a.bracket(&[x1, y01]));
    assert!(both == Vector::basis(z01) || both == Vector::term(z01, r(-1)));
}

#[test]
fn cochain_structures_are_linfty() {
    let small = Arc::new(
        LInftyAlgebra::new(
            GradedSpace::new(vec![BasisElement::new("w", 0, 1), BasisElement::new("u", 1, 2)], 3).unwrap(),
            obstructed_extension::<Q>().total().taylor().to_vec(),
        )
        .unwrap(),
    );
    for (l, max_n) in [(heis::<Q>(), 2), (ut(3), 2), (heis_eps(), 2), (small, 3), (line(), 3), (acyclic_pair(-1), 3)] {
        for n in 0..=max_n {
            let c = cochain_structure(n, l.clone()).unwrap();
            let report = check_linfty(c.algebra());
            assert!(report.passed(), "n = {n}: {:?}", report.first_failure());
        }
    }
}

#[test]
fn subcomplexes_restrict_the_simplex_structure() {
    let l = heis_eps::<Q>();
    let full = cochain_structure(2, l.clone()).unwrap();
    let glued = subcomplex_structure(&FinComplex::simplex(2), l.clone()).unwrap();
    assert_eq!(glued.algebra().as_ref(), full.algebra().as_ref());

    let boundary = subcomplex_structure(&FinComplex::boundary(2), l.clone()).unwrap();
    let d = l.dim();
    let cut = 6 * d;
    for m in boundary.algebra().monomials() {
        let restricted: V = full.algebra().bracket(&m).iter().filter(|(k, _)| **k < cut).map(|(k, c)| (*k, c.clone())).collect();
        assert_eq!(boundary.algebra().bracket(&m), restricted, "{m:?}");
    }
    assert!(check_linfty(boundary.algebra()).passed());

    let edge = subcomplex_structure(&FinComplex::generated(3, &[vec![0, 2]]).unwrap(), l.clone()).unwrap();
    assert!(same_structure(edge.algebra(), cochain_structure(1, l).unwrap().algebra()));

    let horn = full.on_subcomplex(&FinComplex::horn(2, 0).unwrap()).unwrap();
    assert_eq!(horn.algebra().as_ref(), subcomplex_structure(horn.complex(), heis_eps()).unwrap().algebra().as_ref());
}

#[test]
fn pullbacks_are_strict_morphisms() {
    let l = heis::<Q>();
    let c2 = cochain_structure(2, l.clone()).unwrap();
    let c1 = cochain_structure(1, l.clone()).unwrap();
    let id = pullback(&c2, &c2, &[0, 1, 2]).unwrap();
    assert_eq!(id, LInftyMorphism::identity(c2.algebra().clone()));

    let face = pullback(&c2, &c1, &[0, 2]).unwrap();
    assert!(face.is_strict() && check_morphism(&face).passed());
    let lin = face.linear_part();
    for j in 0..c1.algebra().dim() {
        if c1.algebra().degree(&j) <= 0 {
            assert!(lin.columns.iter().any(|col| col.coeff(&j) != r(0)), "{j} not hit");
        }
    }

    for theta in [vec![0, 0, 1], vec![0, 1, 1]] {
        let degeneracy = pullback(&c1, &c2, &theta).unwrap();
        assert!(check_morphism(&degeneracy).passed(), "{theta:?}");
    }
    assert!(pullback(&c2, &c1, &[2, 0]).is_err());
    assert!(pullback(&c2, &c1, &[0, 1, 2]).is_err());
}

#[test]
fn pushforward_to_the_abelianization() {
    let h = heis::<Q>();
    let base = Arc::new(lie_algebra::<Q>(&[("X", 1), ("Y", 1)], 3, &[]).unwrap());
    let p = LinearMap::from_fn(3, 2, |i| if i < 2 { Vector::basis(i) } else { V::zero() });
    let phi = LInftyMorphism::strict(h.clone(), base.clone(), &p).unwrap();
    for n in 0..=2 {
        let (src, tgt) = (cochain_structure(n, h.clone()).unwrap(), cochain_structure(n, base.clone()).unwrap());
        let push = pushforward_strict(&phi, &src, &tgt).unwrap();
        assert!(check_morphism(&push).passed(), "n = {n}");
    }
    let src = cochain_structure(1, h).unwrap();
    assert!(pushforward_strict(&phi, &src, &cochain_structure(2, base).unwrap()).is_err());
}

#[test]
fn transfer_commutes_with_simplicial_pullbacks() {
    let l = heis::<Q>();
    for n in 1..=2 {
        for m in 1..=2 {
            let source = dupont_transfer(n, l.clone()).unwrap();
            let target = dupont_transfer(m, l.clone()).unwrap();
            for theta in monotone_maps(m, n, true) {
                let forms = linfty::cochains::FormAlgebra::new(m, l.clone());
                let phi = |k: &(FormMonomial, usize)| forms.tensor(&PolyForm::<Q>::monomial(n, k.0.clone()).pullback(&theta), &Vector::basis(k.1));
                let morphism = ContractionMorphism::new(source.contraction(), target.contraction(), phi);
                let cn = cochain_structure(n, l.clone()).unwrap();
                let cm = cochain_structure(m, l.clone()).unwrap();
                assert_eq!(morphism.small_map(), pullback(&cn, &cm, &theta).unwrap().linear_part(), "{theta:?}");
                let keys: Vec<(FormMonomial, usize)> = (0..(1u32 << n))
                    .flat_map(|wedge| (0..3).map(move |b| (FormMonomial { exps: vec![if wedge == 0 { 1 } else { 0 }; n], wedge }, b)))
                    .collect();
                let monos: Vec<Vec<_>> = keys.iter().flat_map(|a| keys.iter().map(move |b| if a <= b { vec![a.clone(), b.clone()] } else { vec![b.clone(), a.clone()] })).collect();
                let report = check_transfer_naturality(&morphism, &source, &target, &monos);
                assert!(report.passed(), "{theta:?}: {:?}", report.first_failure());
            }
        }
    }
}

#[test]
fn mc_cochains_on_the_simplex_are_their_own_restrictions() {
    let mut g = rng(2);
    let c = cochain_structure(2, ut::<Q>(3)).unwrap();
    let keys: Vec<usize> = (0..3).collect();
    for _ in 0..10 {
        let (a, b) = (random_vector::<Q>(&mut g, &keys), random_vector(&mut g, &keys));
        let alpha = c.cochain(&[(vec![0, 1], b.clone()), (vec![1, 2], a.clone()), (vec![0, 2], matrix_bch(3, &a, &b))]).unwrap();
        let family = mc_to_simplicial_map(&c, &alpha).unwrap();
        assert_eq!(family.len(), 7);
        let top = family.iter().find(|(s, _)| *s == vec![0, 1, 2]).unwrap();
        assert_eq!(top.1, alpha);
        assert_eq!(mc_from_family(&c, &family).unwrap(), alpha);
    }
    let not_mc = c.cochain(&[(vec![0, 1], Vector::basis(0)), (vec![1, 2], Vector::basis(1))]).unwrap();
    assert!(mc_to_simplicial_map(&c, &not_mc).is_err());
}

#[test]
fn boundary_families_are_compatible_edges() {
    let mut g = rng(3);
    let c = subcomplex_structure(&FinComplex::boundary(2), heis::<Q>()).unwrap();
    let keys: Vec<usize> = (0..3).collect();
    for _ in 0..5 {
        let edges: Vec<V> = (0..3).map(|_| random_vector(&mut g, &keys)).collect();
        let alpha = c.cochain(&[(vec![0, 1], edges[0].clone()), (vec![0, 2], edges[1].clone()), (vec![1, 2], edges[2].clone())]).unwrap();
        assert!(is_mc(c.algebra().as_ref(), &alpha));
        let family = mc_to_simplicial_map(&c, &alpha).unwrap();
        let edge_values: Vec<&V> = family.iter().filter(|(s, _)| s.len() == 2).map(|(_, x)| x).collect();
        assert_eq!(edge_values.len(), 3);
        for (x, e) in edge_values.iter().zip(&edges) {
            assert_eq!(**x, Vector::from_terms(e.iter().map(|(k, c)| (2 * 3 + k, c.clone()))));
        }
        assert_eq!(mc_from_family(&c, &family).unwrap(), alpha);
    }
}

#[test]
fn gluing_two_edges_is_a_fibre_product() {
    let mut g = rng(4);
    let l = heis_eps::<Q>();
    let horn = subcomplex_structure(&FinComplex::horn(2, 1).unwrap(), l.clone()).unwrap();
    let interval = cochain_structure(1, l.clone()).unwrap();
    let mc_points = l.space().indices_of_degree(0);
    for _ in 0..5 {
        let y0 = random_vector(&mut g, &mc_points);
        let first = mc_edge(&mut g, &l, &y0);
        let y1 = interval.value(&first, &[1]).unwrap();
        let second = mc_edge(&mut g, &l, &y1);
        let family = vec![
            (vec![0], y0.clone()),
            (vec![1], y1.clone()),
            (vec![2], interval.value(&second, &[1]).unwrap()),
            (vec![0, 1], first.clone()),
            (vec![1, 2], second.clone()),
        ];
        let glued = mc_from_family(&horn, &family).unwrap();
        assert!(is_mc(horn.algebra().as_ref(), &glued));
        assert_eq!(horn.restrict(&glued, &[0, 1]).unwrap(), first);
        assert_eq!(horn.restrict(&glued, &[1, 2]).unwrap(), second);

        // an edge starting elsewhere does not glue
        let shifted = y1.plus(&Vector::basis(mc_points[0]));
        let stray = mc_edge(&mut g, &l, &shifted);
        let mut bad = family.clone();
        bad[4] = (vec![1, 2], stray.clone());
        bad[2] = (vec![2], interval.value(&stray, &[1]).unwrap());
        assert!(mc_from_family(&horn, &bad).is_err());
    }
}

#[test]
fn cochain_lookups_reject_missing_simplices() {
    let c = subcomplex_structure(&FinComplex::horn(2, 1).unwrap(), heis::<Q>()).unwrap();
    assert!(c.index(&[0, 2], 0).is_none());
    assert!(c.cochain(&[(vec![0, 2], Vector::basis(0))]).is_err());
    assert!(c.value(&V::zero(), &[0, 1, 2]).is_err());
    assert!(c.restrict(&V::zero(), &[0, 2]).is_err());
    assert!(mc_from_family(&c, &[(vec![0], V::zero())]).is_err());
}
