//! One function per subcommand.

use std::path::Path;
use std::sync::Arc;

use linfty::bundled::{line, random_vector, rng};
use linfty::cochains::DupontContraction;
use linfty::deligne::{abelian_homotopy_groups, DeligneGroupoid, StarData};
use linfty::forms::FormMonomial;
use linfty::linfty::*;
use linfty::tot::*;
use linfty::transfer::{check_contraction, Contraction, FiniteContraction, Transfer};
use linfty::{CheckReport, GradedBasis, LinearMap};
use rand::Rng;
use serde_json::{json, Value};

use crate::doc::*;
use crate::error::CliError;
use crate::report::Outcome;

type Algebra = Arc<LInftyAlgebra<Q>>;

fn report_json(r: &CheckReport) -> Value {
    let items: Vec<Value> = r.items.iter().map(|i| json!({ "label": i.label, "checked": i.checked, "failure": i.failure })).collect();
    json!({
        "passed": r.passed(),
        "first_failure": r.first_failure().map(|i| i.label.clone()),
        "items": items,
    })
}

/// Loads an algebra that must satisfy the L∞ relations.
pub fn algebra(ld: &mut Loader, label: &str, path: &Path) -> Result<Algebra, CliError> {
    let doc: AlgebraDoc = ld.file(label, path)?;
    validated(&doc)
}

fn validated(doc: &AlgebraDoc) -> Result<Algebra, CliError> {
    let l = build_algebra(doc)?;
    check_linfty(&l).into_result()?;
    Ok(Arc::new(l))
}

fn referenced(ld: &mut Loader, label: &str, r: &AlgebraRef, dir: &Path) -> Result<Algebra, CliError> {
    let doc = ld.algebra_ref(label, r, dir)?;
    validated(&doc)
}

fn element(ld: &mut Loader, label: &str, arg: &str, l: &LInftyAlgebra<Q>) -> Result<V, CliError> {
    let doc: ElementDoc = ld.argument(label, arg)?;
    parse_element(l.space(), &doc)
}

pub fn check_structure(ld: &mut Loader, path: &Path) -> Result<Outcome, CliError> {
    let doc: AlgebraDoc = ld.file("algebra", path)?;
    let l = build_algebra(&doc)?;
    let r = check_linfty(&l);
    Ok(Outcome::checked(
        r.passed(),
        json!({
            "kind": "structure",
            "dimension": l.dim(),
            "arity_bound": l.arity_bound(),
            "dimensions": dims_by_degree(&l),
            "report": report_json(&r),
        }),
    ))
}

pub fn check_morphism_doc(ld: &mut Loader, path: &Path) -> Result<Outcome, CliError> {
    let doc: MorphismDoc = ld.file("morphism", path)?;
    let dir = parent_dir(path);
    let source = referenced(ld, "source", &doc.source, &dir)?;
    let target = referenced(ld, "target", &doc.target, &dir)?;
    let f = build_morphism(&doc, source, target)?;
    let r = check_morphism(&f);
    Ok(Outcome::checked(r.passed(), json!({ "kind": "morphism", "strict": f.is_strict(), "report": report_json(&r) })))
}

pub fn check_contraction_doc(ld: &mut Loader, path: &Path) -> Result<Outcome, CliError> {
    let c = contraction(ld, path)?;
    let r = c.check();
    Ok(Outcome::checked(
        r.passed(),
        json!({ "kind": "contraction", "big_dimension": c.big().dim(), "small_dimension": c.small().dim(), "report": report_json(&r) }),
    ))
}

fn contraction(ld: &mut Loader, path: &Path) -> Result<FiniteContraction<Q>, CliError> {
    let doc: ContractionDoc = ld.file("contraction", path)?;
    check_version(doc.version)?;
    let big = referenced(ld, "big", &doc.big, &parent_dir(path))?;
    let small = build_space(&doc.small.basis, doc.small.nilpotency)?;
    let f = parse_map(&small, big.space(), &doc.f)?;
    let g = parse_map(big.space(), &small, &doc.g)?;
    let k = parse_map(big.space(), big.space(), &doc.k)?;
    Ok(FiniteContraction::new(big, small, f, g, k)?)
}

pub enum Diagram {
    Semi(SemicosimplicialLInfty<Q>),
    Cos(CosimplicialLInfty<Q>),
    Poset(DiagramOverS<Q>),
}

fn maps(levels: &[Algebra], docs: &[Vec<MapDoc>], up: bool) -> Result<Vec<Vec<LinearMap<Q>>>, CliError> {
    docs.iter()
        .enumerate()
        .map(|(n, row)| {
            let (s, t) = if up { (n, n + 1) } else { (n + 1, n) };
            let (Some(ls), Some(lt)) = (levels.get(s), levels.get(t)) else {
                return Err(CliError::Parse(format!("maps given for level {} beyond the last level", n + 1)));
            };
            row.iter().map(|m| parse_map(ls.space(), lt.space(), m)).collect()
        })
        .collect()
}

/// Loads a diagram without validating the (co)simplicial identities.
pub fn diagram(ld: &mut Loader, path: &Path) -> Result<Diagram, CliError> {
    let doc: DiagramDoc = ld.file("diagram", path)?;
    let dir = parent_dir(path);
    let load_levels = |ld: &mut Loader, levels: &[AlgebraRef]| -> Result<Vec<Algebra>, CliError> {
        levels.iter().enumerate().map(|(i, r)| referenced(ld, &format!("level{i}"), r, &dir)).collect()
    };
    match &doc {
        DiagramDoc::Semicosimplicial { version, levels, cofaces } => {
            check_version(*version)?;
            let levels = load_levels(ld, levels)?;
            let cofaces = maps(&levels, cofaces, true)?;
            Ok(Diagram::Semi(SemicosimplicialLInfty::from_parts_unchecked(levels, cofaces)?))
        }
        DiagramDoc::Cosimplicial { version, levels, cofaces, codegeneracies } => {
            check_version(*version)?;
            let levels = load_levels(ld, levels)?;
            let cofaces = maps(&levels, cofaces, true)?;
            let codegeneracies = maps(&levels, codegeneracies, false)?;
            Ok(Diagram::Cos(CosimplicialLInfty::from_parts_unchecked(levels, cofaces, codegeneracies)?))
        }
        DiagramDoc::Cech { version, coefficients, opens, nerve } => {
            check_version(*version)?;
            let l = referenced(ld, "coefficients", coefficients, &dir)?;
            Ok(Diagram::Semi(cech_diagram(&CechNerve::constant(*opens, nerve, l)?)?))
        }
        DiagramDoc::Poset { version, objects, relations, algebras, maps } => {
            check_version(*version)?;
            let algebras = load_levels(ld, algebras)?;
            if algebras.len() != *objects {
                return Err(CliError::Parse(format!("{objects} objects but {} algebras", algebras.len())));
            }
            let cat = FiniteCategory::poset(*objects, relations)?;
            let mut linear = Vec::with_capacity(cat.arrows().len());
            for &(a, b) in cat.arrows() {
                if a == b {
                    linear.push(LinearMap::identity(algebras[a].dim()));
                    continue;
                }
                let given = maps.iter().find(|m| m.from == a && m.to == b).ok_or_else(|| CliError::Parse(format!("no map given for the arrow {a} → {b}")))?;
                linear.push(parse_map(algebras[a].space(), algebras[b].space(), &given.map)?);
            }
            Ok(Diagram::Poset(DiagramOverS::new(cat, algebras, linear)?))
        }
    }
}

pub fn check_diagram(ld: &mut Loader, path: &Path) -> Result<Outcome, CliError> {
    Ok(match diagram(ld, path)? {
        Diagram::Semi(d) => {
            let r = d.check_identities();
            Outcome::checked(r.passed(), json!({ "kind": "semicosimplicial", "levels": d.n_max() + 1, "report": report_json(&r) }))
        }
        Diagram::Cos(c) => {
            let r = c.check_identities();
            Outcome::checked(r.passed(), json!({ "kind": "cosimplicial", "levels": c.k_max() + 1, "report": report_json(&r) }))
        }
        Diagram::Poset(d) => Outcome::pass(json!({ "kind": "poset", "objects": d.category().objects(), "arrows": d.category().arrows().len() })),
    })
}

pub fn bch(ld: &mut Loader, path: &Path, a: &str, b: &str) -> Result<Outcome, CliError> {
    let l = algebra(ld, "algebra", path)?;
    let (a, b) = (element(ld, "a", a, &l)?, element(ld, "b", b, &l)?);
    let g = DeligneGroupoid::new(l.clone(), 2)?;
    let value = g.bch(&a, &b)?;
    Ok(Outcome::pass(json!({ "value": element_doc(l.space(), &value) })))
}

pub fn gauge(ld: &mut Loader, path: &Path, x: &str, a: &str) -> Result<Outcome, CliError> {
    let l = algebra(ld, "algebra", path)?;
    let (x, a) = (element(ld, "x", x, &l)?, element(ld, "a", a, &l)?);
    let g = DeligneGroupoid::new(l.clone(), 1)?;
    let value = g.gauge(&x, &a)?;
    Ok(Outcome::pass(json!({ "value": element_doc(l.space(), &value) })))
}

pub fn fill_horn(ld: &mut Loader, path: &Path, n: usize, k: usize, horn: &str) -> Result<Outcome, CliError> {
    let l = algebra(ld, "algebra", path)?;
    let doc: CochainDoc = ld.argument("horn", horn)?;
    let horn = parse_cochain(n, l.space(), &doc)?;
    let g = DeligneGroupoid::new(l.clone(), n)?;
    let filled = g.horn_fill(n, k, &horn)?;
    Ok(Outcome::pass(json!({ "n": n, "k": k, "simplex": cochain_doc(n, l.space(), &filled.cochain) })))
}

pub fn simplex_from_star(ld: &mut Loader, path: &Path, n: usize, star: &str) -> Result<Outcome, CliError> {
    let l = algebra(ld, "algebra", path)?;
    let doc: StarDoc = ld.argument("star", star)?;
    let mut data = StarData::constant(doc.vertex, parse_element(l.space(), &doc.x)?);
    for (label, el) in &doc.values {
        data.values.insert(parse_simplex(n, label)?, parse_element(l.space(), el)?);
    }
    let g = DeligneGroupoid::new(l.clone(), n)?;
    let s = g.simplex_from_star(n, &data)?;
    Ok(Outcome::pass(json!({ "n": n, "vertex": doc.vertex, "simplex": cochain_doc(n, l.space(), &s.cochain) })))
}

pub fn mc_solve(ld: &mut Loader, path: &Path, n: usize, vertex: usize, y: &str, v: Option<&str>, seed: u64) -> Result<Outcome, CliError> {
    let l = algebra(ld, "algebra", path)?;
    let y = element(ld, "y", y, &l)?;
    let g = DeligneGroupoid::new(l.clone(), n)?;
    let t = Transfer::new(g.vertex_contraction(n, vertex)?)?;
    let c = t.contraction();
    let (v, sampled) = match v {
        Some(arg) => {
            let doc: CochainDoc = ld.argument("v", arg)?;
            (parse_cochain(n, l.space(), &doc)?, false)
        }
        None => (random_vector(&mut rng(seed), &c.big().space().indices_of_degree(0)), true),
    };
    let kv = c.homotopy_vec(&v);
    let x = t.kuranishi_solve(&y, &kv)?;
    let back = t.kuranishi_forward(&x)?;
    let round_trip = is_mc(c.big(), &x) && back == (y.clone(), kv.clone());
    Ok(Outcome::checked(
        round_trip,
        json!({
            "n": n,
            "vertex": vertex,
            "sampled_v": sampled,
            "kv": cochain_doc(n, l.space(), &kv),
            "solution": cochain_doc(n, l.space(), &x),
            "round_trip": round_trip,
        }),
    ))
}

pub fn transfer(ld: &mut Loader, path: &Path, n: usize) -> Result<Outcome, CliError> {
    let l = algebra(ld, "algebra", path)?;
    let t = linfty::cochains::dupont_transfer(n, l)?;
    let small = t.small_algebra();
    let r = check_linfty(small);
    Ok(Outcome::checked(
        r.passed(),
        json!({
            "n": n,
            "dimensions": dims_by_degree(small),
            "algebra": algebra_doc(small),
            "report": report_json(&r),
        }),
    ))
}

fn tot_row(k: usize, t: &Totalization<Q>) -> Value {
    json!({ "k": k, "dimension": t.dim(), "dimensions": dims_by_degree(t.algebra()) })
}

pub fn tot(ld: &mut Loader, path: &Path, k: Option<usize>) -> Result<Outcome, CliError> {
    let (kind, rows, cutoff) = match diagram(ld, path)? {
        Diagram::Semi(d) => {
            d.check_identities().into_result()?;
            let ks: Vec<usize> = k.map_or_else(|| (0..=d.n_max()).collect(), |k| vec![k]);
            let rows = ks.iter().map(|&k| Ok(tot_row(k, &d.tot_k(k)?))).collect::<Result<Vec<_>, CliError>>()?;
            ("semicosimplicial", rows, Value::Null)
        }
        Diagram::Cos(c) => {
            c.check_identities().into_result()?;
            let ks: Vec<usize> = k.map_or_else(|| (0..=c.k_max()).collect(), |k| vec![k]);
            let rows = ks.iter().map(|&k| Ok(tot_row(k, &c.tot_k(k)?))).collect::<Result<Vec<_>, CliError>>()?;
            ("cosimplicial", rows, json!(c.k_max()))
        }
        Diagram::Poset(d) => {
            let top = k.unwrap_or(2);
            let c = cosimplicial_replacement(&d, top)?;
            let rows = (0..=top).map(|k| Ok(tot_row(k, &c.tot_k(k)?))).collect::<Result<Vec<_>, CliError>>()?;
            ("replacement", rows, json!(top))
        }
    };
    Ok(Outcome::pass(json!({ "kind": kind, "cutoff": cutoff, "totalizations": rows })))
}

pub fn holim(ld: &mut Loader, path: &Path, k: usize) -> Result<Outcome, CliError> {
    let Diagram::Poset(d) = diagram(ld, path)? else {
        return Err(CliError::Usage("holim-k needs a poset diagram".into()));
    };
    let t = holim_k(&d, k)?;
    let stable = holim_stable_cohomology(&d, k)?.map(|h| h.into_iter().map(|(degree, dimension)| DegreeDimension { degree, dimension }).collect::<Vec<_>>());
    Ok(Outcome::pass(json!({
        "k": k,
        "dimension": t.dim(),
        "dimensions": dims_by_degree(t.algebra()),
        "stable_classical_cohomology": stable,
    })))
}

pub fn obstruction(ld: &mut Loader, path: &Path, x: &str) -> Result<Outcome, CliError> {
    let doc: ExtensionDoc = ld.file("extension", path)?;
    check_version(doc.version)?;
    let dir = parent_dir(path);
    let total = referenced(ld, "total", &doc.total, &dir)?;
    let base = referenced(ld, "base", &doc.base, &dir)?;
    let p = parse_map(total.space(), base.space(), &doc.projection)?;
    let kernel = doc
        .kernel
        .iter()
        .map(|n| total.space().index_of(n).ok_or_else(|| CliError::Parse(format!("unknown kernel element {n:?}"))))
        .collect::<Result<Vec<_>, _>>()?;
    let e = CentralExtension::new(LInftyMorphism::strict(total.clone(), base.clone(), &p)?, kernel)?;
    let x = element(ld, "x", x, &base)?;
    let o = obstruction_mc(&e, &x)?;
    let ts = total.space();
    Ok(Outcome::pass(json!({
        "section": element_doc(ts, &o.section),
        "curvature": element_doc(ts, &o.curvature),
        "class": element_doc(ts, &o.class),
        "vanishes": o.vanishes(),
        "lift": o.lift.as_ref().map(|y| element_doc(ts, y)),
    })))
}

pub fn abelian_homotopy(ld: &mut Loader, path: &Path, i: usize) -> Result<Outcome, CliError> {
    let l = algebra(ld, "algebra", path)?;
    let g = abelian_homotopy_groups(l, i)?;
    Ok(Outcome::checked(g.direct == g.moore, json!({ "i": i, "cohomology": g.direct, "moore": g.moore })))
}

/// Monomials of polynomial degree at most two in every form degree, plus a few
/// seeded monomials of higher polynomial degree.
fn form_samples(n: usize, coefficients: usize, seed: u64) -> Vec<(FormMonomial, usize)> {
    let mut exps = vec![vec![0u32; n]];
    for i in 0..n {
        let mut e = vec![0; n];
        e[i] = 1;
        exps.push(e.clone());
        for j in i..n {
            let mut f = e.clone();
            f[j] += 1;
            exps.push(f);
        }
    }
    let mut g = rng(seed);
    if n > 0 {
        for _ in 0..8 {
            exps.push((0..n).map(|_| g.gen_range(0..=4)).collect());
        }
    }
    let mut out = Vec::new();
    for e in &exps {
        for wedge in 0..(1u32 << n) {
            for b in 0..coefficients {
                let key = (FormMonomial { exps: e.clone(), wedge }, b);
                if !out.contains(&key) {
                    out.push(key);
                }
            }
        }
    }
    out
}

pub fn dupont_verify(ld: &mut Loader, path: Option<&Path>, n: usize, seed: u64) -> Result<Outcome, CliError> {
    let l = match path {
        Some(p) => algebra(ld, "algebra", p)?,
        None => line(),
    };
    let c = DupontContraction::new(n, l.clone())?;
    let samples = form_samples(n, l.dim(), seed);
    let r = check_contraction(&c, &samples);
    Ok(Outcome::checked(r.passed(), json!({ "n": n, "samples": samples.len(), "report": report_json(&r) })))
}
