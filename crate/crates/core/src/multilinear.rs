use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graded::{canonicalize, sym_product, GradedBasis, GradedSpace, SymTensor};
use crate::scalar::Scalar;
use crate::vector::Vector;

/// Sparse graded-symmetric multilinear map `W^{⊙i} → W'`, given on canonical
/// monomials of the source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultilinearMap<S: Scalar> {
    pub arity: usize,
    pub degree: i32,
    table: BTreeMap<Vec<usize>, Vector<usize, S>>,
}

impl<S: Scalar> MultilinearMap<S> {
    pub fn zero(arity: usize, degree: i32) -> Self {
        Self { arity, degree, table: BTreeMap::new() }
    }

    /// Builds a map from values on (not necessarily sorted) monomials. Values
    /// given on a permuted monomial are transported by the Koszul sign.
    pub fn new<I>(source: &GradedSpace, target: &GradedSpace, arity: usize, degree: i32, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, Vector<usize, S>)>,
    {
        let mut map = Self::zero(arity, degree);
        for (keys, value) in entries {
            if keys.len() != arity {
                return Err(Error::mismatch(format!("monomial of length {} for arity {}", keys.len(), arity)));
            }
            if keys.iter().any(|&k| k >= source.dim()) || value.keys().any(|&k| k >= target.dim()) {
                return Err(Error::invalid("index outside the basis"));
            }
            let Some((canon, parity)) = canonicalize(source, keys.clone()) else {
                if value.is_zero() {
                    continue;
                }
                return Err(Error::invalid(format!("value on a vanishing monomial {keys:?}")));
            };
            let value = if parity { value.neg() } else { value };
            let in_deg: i32 = canon.iter().map(|&k| source.degree(&k)).sum();
            let in_wt: u32 = canon.iter().map(|&k| source.weight(&k)).sum();
            for &o in value.keys() {
                if target.degree(&o) != in_deg + degree {
                    return Err(Error::Degree { expected: in_deg + degree, found: target.degree(&o) });
                }
                if target.weight(&o) < in_wt {
                    return Err(Error::invalid(format!(
                        "weight of {} is below the total input weight {} of {:?}",
                        target.name(o),
                        in_wt,
                        canon
                    )));
                }
            }
            map.add(canon, &value);
        }
        Ok(map)
    }

    /// Accumulates `value` on a canonical monomial without validation.
    pub(crate) fn add(&mut self, canon: Vec<usize>, value: &Vector<usize, S>) {
        let slot = self.table.entry(canon.clone()).or_default();
        slot.add_assign(value);
        if slot.is_zero() {
            self.table.remove(&canon);
        }
    }

    pub(crate) fn from_table(arity: usize, degree: i32, table: BTreeMap<Vec<usize>, Vector<usize, S>>) -> Self {
        let table = table.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Self { arity, degree, table }
    }

    pub fn is_zero(&self) -> bool {
        self.table.is_empty()
    }

    /// Value on a canonical monomial.
    pub fn on_monomial(&self, canon: &[usize]) -> Vector<usize, S> {
        self.table.get(canon).cloned().unwrap_or_default()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&Vec<usize>, &Vector<usize, S>)> {
        self.table.iter()
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    /// Linear extension to symmetric tensors of the right arity; other
    /// arities are ignored.
    pub fn apply_sym(&self, t: &SymTensor<usize, S>) -> Vector<usize, S> {
        let mut out = Vector::zero();
        for (m, c) in t.iter() {
            if m.len() == self.arity {
                if let Some(v) = self.table.get(m) {
                    out.axpy(c, v);
                }
            }
        }
        out
    }

    pub fn map_values<F: FnMut(&Vector<usize, S>) -> Vector<usize, S>>(&self, mut f: F) -> Self {
        Self::from_table(self.arity, self.degree, self.table.iter().map(|(k, v)| (k.clone(), f(v))).collect())
    }
}

/// `map(args[0], …, args[n-1])` with Koszul signs.
pub fn evaluate<S: Scalar>(space: &GradedSpace, map: &MultilinearMap<S>, args: &[Vector<usize, S>]) -> Result<Vector<usize, S>> {
    if args.len() != map.arity {
        return Err(Error::mismatch(format!("{} arguments for arity {}", args.len(), map.arity)));
    }
    Ok(map.apply_sym(&sym_product(space, args)))
}
