//! JSON documents: algebras, elements, maps, morphisms, contractions,
//! central extensions and diagrams.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use linfty::forms::standard_simplices;
use linfty::linfty::{dgla_import, LInftyAlgebra, LInftyMorphism};
use linfty::{BasisElement, GradedBasis, GradedSpace, LinearMap, MultilinearMap, Rational, Vector};
use num_traits::Zero;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

pub type Q = Rational;
pub type V = Vector<usize, Q>;
/// Basis name to `"p/q"` coefficient.
pub type ElementDoc = BTreeMap<String, String>;
/// Source basis name to the image element.
pub type MapDoc = BTreeMap<String, ElementDoc>;
/// Simplex label such as `"0,1"` to the coefficient element on it.
pub type CochainDoc = BTreeMap<String, ElementDoc>;

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisDoc {
    pub name: String,
    pub degree: i32,
    pub weight: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermDoc {
    pub inputs: Vec<String>,
    pub output: String,
    pub coefficient: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperationDoc {
    pub arity: usize,
    pub terms: Vec<TermDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraDoc {
    #[serde(default = "schema_version")]
    pub version: u32,
    /// Degrees are classical and the operations are `d` (arity 1) and the bracket (arity 2).
    #[serde(default)]
    pub dgla: bool,
    pub nilpotency: u32,
    pub basis: Vec<BasisDoc>,
    #[serde(default)]
    pub operations: Vec<OperationDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceDoc {
    pub nilpotency: u32,
    pub basis: Vec<BasisDoc>,
}

/// An algebra given inline or as a path relative to the referring document.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AlgebraRef {
    Path(String),
    Inline(Box<AlgebraDoc>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorphismDoc {
    #[serde(default = "schema_version")]
    pub version: u32,
    pub source: AlgebraRef,
    pub target: AlgebraRef,
    /// Taylor components `f_i` in the shifted grading.
    pub components: Vec<OperationDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContractionDoc {
    #[serde(default = "schema_version")]
    pub version: u32,
    pub big: AlgebraRef,
    pub small: SpaceDoc,
    pub f: MapDoc,
    pub g: MapDoc,
    pub k: MapDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionDoc {
    #[serde(default = "schema_version")]
    pub version: u32,
    pub total: AlgebraRef,
    pub base: AlgebraRef,
    pub projection: MapDoc,
    pub kernel: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrowDoc {
    pub from: usize,
    pub to: usize,
    pub map: MapDoc,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DiagramDoc {
    /// `cofaces[n - 1][j]` is `∂^j: L_{n-1} → L_n`.
    Semicosimplicial {
        #[serde(default = "schema_version")]
        version: u32,
        levels: Vec<AlgebraRef>,
        cofaces: Vec<Vec<MapDoc>>,
    },
    /// `codegeneracies[n][j]` is `s^j: L_{n+1} → L_n`.
    Cosimplicial {
        #[serde(default = "schema_version")]
        version: u32,
        levels: Vec<AlgebraRef>,
        cofaces: Vec<Vec<MapDoc>>,
        codegeneracies: Vec<Vec<MapDoc>>,
    },
    /// One algebra on every simplex of the nerve of a cover, identity restrictions.
    Cech {
        #[serde(default = "schema_version")]
        version: u32,
        coefficients: AlgebraRef,
        opens: usize,
        nerve: Vec<Vec<usize>>,
    },
    /// A functor on the poset generated by `relations`; every non-identity arrow needs a map.
    Poset {
        #[serde(default = "schema_version")]
        version: u32,
        objects: usize,
        relations: Vec<(usize, usize)>,
        algebras: Vec<AlgebraRef>,
        maps: Vec<ArrowDoc>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StarDoc {
    pub vertex: usize,
    pub x: ElementDoc,
    #[serde(default)]
    pub values: CochainDoc,
}

/// Reads inputs and records their SHA-256 digests.
#[derive(Default)]
pub struct Loader {
    pub hashes: BTreeMap<String, String>,
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

impl Loader {
    fn read(&mut self, label: &str, path: &Path) -> Result<Vec<u8>, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        self.hashes.insert(label.to_string(), digest(&bytes));
        Ok(bytes)
    }

    pub fn file<T: DeserializeOwned>(&mut self, label: &str, path: &Path) -> Result<T, CliError> {
        let bytes = self.read(label, path)?;
        serde_json::from_slice(&bytes).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
    }

    /// Inline JSON, or `@path` to read a file.
    pub fn argument<T: DeserializeOwned>(&mut self, label: &str, arg: &str) -> Result<T, CliError> {
        if let Some(path) = arg.strip_prefix('@') {
            return self.file(label, Path::new(path));
        }
        self.hashes.insert(label.to_string(), digest(arg.as_bytes()));
        serde_json::from_str(arg).map_err(|e| CliError::Parse(format!("--{label}: {e}")))
    }

    pub fn algebra_ref(&mut self, label: &str, r: &AlgebraRef, dir: &Path) -> Result<AlgebraDoc, CliError> {
        match r {
            AlgebraRef::Inline(doc) => Ok((**doc).clone()),
            AlgebraRef::Path(p) => {
                let path: PathBuf = dir.join(p);
                self.file(&format!("{label}:{p}"), &path)
            }
        }
    }
}

pub fn parent_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

pub fn parse_rational(s: &str) -> Result<Q, CliError> {
    let t = s.trim();
    if t.is_empty() || t.contains(['.', 'e', 'E']) {
        return Err(CliError::Parse(format!("coefficient {s:?} is not of the form \"p/q\"")));
    }
    Q::from_str(t).map_err(|e| CliError::Parse(format!("coefficient {s:?}: {e}")))
}

pub fn format_rational(q: &Q) -> String {
    q.to_string()
}

fn index(space: &GradedSpace, name: &str) -> Result<usize, CliError> {
    space.index_of(name).ok_or_else(|| CliError::Parse(format!("unknown basis element {name:?}")))
}

pub fn parse_element(space: &GradedSpace, doc: &ElementDoc) -> Result<V, CliError> {
    let mut v = V::zero();
    for (name, c) in doc {
        v.add_term(index(space, name)?, parse_rational(c)?);
    }
    Ok(v)
}

pub fn element_doc(space: &GradedSpace, v: &V) -> ElementDoc {
    v.iter().map(|(k, c)| (space.name(*k).to_string(), format_rational(c))).collect()
}

pub fn simplex_label(s: &[usize]) -> String {
    s.iter().map(usize::to_string).collect::<Vec<_>>().join(",")
}

/// Parses `"0,1"` into a simplex of `Δ_n`.
pub fn parse_simplex(n: usize, label: &str) -> Result<Vec<usize>, CliError> {
    let s: Vec<usize> = label
        .split(',')
        .map(|p| p.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| CliError::Parse(format!("simplex label {label:?} is not a comma-separated vertex list")))?;
    if standard_simplices(n).contains(&s) {
        Ok(s)
    } else {
        Err(CliError::Parse(format!("{label:?} is not a simplex of Δ{n}")))
    }
}

/// Cochains on `Δ_n` with coefficients in `space`, indexed by simplex then basis element.
pub fn parse_cochain(n: usize, space: &GradedSpace, doc: &CochainDoc) -> Result<V, CliError> {
    let d = space.dim();
    let mut out = V::zero();
    for (label, el) in doc {
        let simplex = parse_simplex(n, label)?;
        let s = standard_simplices(n).iter().position(|t| *t == simplex).expect("checked above");
        out.add_assign(&parse_element(space, el)?.map_keys(|k| s * d + k));
    }
    Ok(out)
}

pub fn cochain_doc(n: usize, space: &GradedSpace, v: &V) -> CochainDoc {
    let d = space.dim();
    let simplices = standard_simplices(n);
    let mut out = CochainDoc::new();
    for (k, c) in v.iter() {
        out.entry(simplex_label(&simplices[k / d])).or_default().insert(space.name(k % d).to_string(), format_rational(c));
    }
    out
}

pub fn parse_map(source: &GradedSpace, target: &GradedSpace, doc: &MapDoc) -> Result<LinearMap<Q>, CliError> {
    let mut columns = vec![V::zero(); source.dim()];
    for (name, el) in doc {
        columns[index(source, name)?] = parse_element(target, el)?;
    }
    Ok(LinearMap::from_fn(source.dim(), target.dim(), |i| columns[i].clone()))
}

fn basis_elements(basis: &[BasisDoc]) -> Vec<BasisElement> {
    basis.iter().map(|b| BasisElement::new(b.name.clone(), b.degree, b.weight)).collect()
}

pub fn build_space(basis: &[BasisDoc], nilpotency: u32) -> Result<GradedSpace, CliError> {
    Ok(GradedSpace::new(basis_elements(basis), nilpotency)?)
}

/// Term tables keyed by input indices, as written.
fn term_table(space: &GradedSpace, target: &GradedSpace, op: &OperationDoc) -> Result<BTreeMap<Vec<usize>, V>, CliError> {
    let mut table: BTreeMap<Vec<usize>, V> = BTreeMap::new();
    for t in &op.terms {
        if t.inputs.len() != op.arity {
            return Err(CliError::Parse(format!("term with {} inputs in an operation of arity {}", t.inputs.len(), op.arity)));
        }
        let inputs = t.inputs.iter().map(|n| index(space, n)).collect::<Result<Vec<_>, _>>()?;
        let out = index(target, &t.output)?;
        table.entry(inputs).or_default().add_term(out, parse_rational(&t.coefficient)?);
    }
    Ok(table)
}

fn multilinear(source: &GradedSpace, target: &GradedSpace, ops: &[OperationDoc], degree: i32) -> Result<Vec<MultilinearMap<Q>>, CliError> {
    let top = ops.iter().map(|o| o.arity).max().unwrap_or(0);
    if ops.iter().any(|o| o.arity == 0) {
        return Err(CliError::Parse("operations must have positive arity".into()));
    }
    let mut out = Vec::with_capacity(top);
    for arity in 1..=top {
        let mut table: BTreeMap<Vec<usize>, V> = BTreeMap::new();
        for op in ops.iter().filter(|o| o.arity == arity) {
            for (k, v) in term_table(source, target, op)? {
                table.entry(k).or_default().add_assign(&v);
            }
        }
        out.push(MultilinearMap::new(source, target, arity, degree, table)?);
    }
    Ok(out)
}

pub fn build_algebra(doc: &AlgebraDoc) -> Result<LInftyAlgebra<Q>, CliError> {
    check_version(doc.version)?;
    let space = build_space(&doc.basis, doc.nilpotency)?;
    if !doc.dgla {
        let taylor = multilinear(&space, &space, &doc.operations, 1)?;
        return Ok(LInftyAlgebra::new(space, taylor)?);
    }
    let n = space.dim();
    let mut d = vec![V::zero(); n];
    let mut bracket = Vec::new();
    for op in &doc.operations {
        let table = term_table(&space, &space, op)?;
        match op.arity {
            1 => {
                for (k, v) in table {
                    d[k[0]].add_assign(&v);
                }
            }
            2 => bracket.extend(table.into_iter().map(|(k, v)| (k[0], k[1], v))),
            a => return Err(CliError::Parse(format!("a dgla has operations of arity 1 and 2, not {a}"))),
        }
    }
    Ok(dgla_import(&space, &LinearMap::from_fn(n, n, |i| d[i].clone()), &bracket)?)
}

pub fn build_morphism(doc: &MorphismDoc, source: Arc<LInftyAlgebra<Q>>, target: Arc<LInftyAlgebra<Q>>) -> Result<LInftyMorphism<Q>, CliError> {
    check_version(doc.version)?;
    let taylor = multilinear(source.space(), target.space(), &doc.components, 0)?;
    Ok(LInftyMorphism::new(source, target, taylor)?)
}

pub fn check_version(v: u32) -> Result<(), CliError> {
    if v == SCHEMA_VERSION {
        Ok(())
    } else {
        Err(CliError::Parse(format!("unsupported schema version {v}")))
    }
}

/// Merges duplicate terms, drops zero coefficients, and orders operations by
/// arity and terms by input and output positions in the basis.
pub fn canonical(doc: &AlgebraDoc) -> Result<AlgebraDoc, CliError> {
    check_version(doc.version)?;
    let space = build_space(&doc.basis, doc.nilpotency)?;
    let mut by_arity: BTreeMap<usize, BTreeMap<(Vec<usize>, usize), Q>> = BTreeMap::new();
    for op in &doc.operations {
        let table = term_table(&space, &space, op)?;
        let slot = by_arity.entry(op.arity).or_default();
        for (inputs, v) in table {
            for (o, c) in v.iter() {
                let e = slot.entry((inputs.clone(), *o)).or_insert_with(Q::zero);
                *e += c.clone();
            }
        }
    }
    let operations = by_arity
        .into_iter()
        .map(|(arity, terms)| OperationDoc {
            arity,
            terms: terms
                .into_iter()
                .filter(|(_, c)| !c.is_zero())
                .map(|((inputs, o), c)| TermDoc {
                    inputs: inputs.iter().map(|&i| space.name(i).to_string()).collect(),
                    output: space.name(o).to_string(),
                    coefficient: format_rational(&c),
                })
                .collect(),
        })
        .filter(|op: &OperationDoc| !op.terms.is_empty())
        .collect();
    Ok(AlgebraDoc { version: SCHEMA_VERSION, dgla: doc.dgla, nilpotency: doc.nilpotency, basis: doc.basis.clone(), operations })
}

/// The algebra in the shifted grading, with every structure map written out.
pub fn algebra_doc(l: &LInftyAlgebra<Q>) -> AlgebraDoc {
    let space = l.space();
    let basis = space.basis().iter().map(|b| BasisDoc { name: b.name.clone(), degree: b.degree, weight: b.weight }).collect();
    let mut operations = Vec::new();
    for q in l.taylor() {
        let mut terms = Vec::new();
        for (m, v) in q.entries() {
            for (o, c) in v.iter() {
                terms.push(TermDoc {
                    inputs: m.iter().map(|&i| space.name(i).to_string()).collect(),
                    output: space.name(*o).to_string(),
                    coefficient: format_rational(c),
                });
            }
        }
        if !terms.is_empty() {
            operations.push(OperationDoc { arity: q.arity, terms });
        }
    }
    AlgebraDoc { version: SCHEMA_VERSION, dgla: false, nilpotency: space.nilpotency(), basis, operations }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DegreeDimension {
    pub degree: i32,
    pub dimension: usize,
}

pub fn dims_by_degree(l: &LInftyAlgebra<Q>) -> Vec<DegreeDimension> {
    let mut out = BTreeMap::new();
    for i in 0..l.dim() {
        *out.entry(l.degree(&i)).or_insert(0) += 1;
    }
    out.into_iter().map(|(degree, dimension)| DegreeDimension { degree, dimension }).collect()
}
