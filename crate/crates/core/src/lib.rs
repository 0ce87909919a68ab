//! Exact computations with complete L∞ algebras: homotopy transfer, the formal
//! Kuranishi correspondence, Dupont's contraction on polynomial forms,
//! simplices of the Deligne-Getzler ∞-groupoid and totalizations of
//! (semi)cosimplicial diagrams.
//!
//! Everything is generic over an exact [`Scalar`] field; [`Rational`] is the
//! intended instance and the aliases below fix it.

pub mod bundled;
pub mod cochains;
pub mod deligne;
pub mod error;
pub mod forms;
pub mod graded;
pub mod linalg;
pub mod linfty;
pub mod tot;
pub mod transfer;
pub mod multilinear;
pub mod scalar;
pub mod vector;

pub use error::{Error, Result};
pub use graded::{BasisElement, GradedBasis, GradedSpace, SymTensor};
pub use linalg::{Echelon, LinearMap};
pub use linfty::{CheckReport, LInftyStructure, TaylorMap};
pub use multilinear::MultilinearMap;
pub use scalar::Scalar;
pub use vector::Vector;

/// Arbitrary-precision rationals.
pub type Rational = num_rational::BigRational;
pub type Element = Vector<usize, Rational>;
pub type LInftyAlgebraQ = linfty::LInftyAlgebra<Rational>;
pub type LInftyMorphismQ = linfty::LInftyMorphism<Rational>;
pub type LinearMapQ = LinearMap<Rational>;
