//! Boolean Max CSP toolkit: truth-table constraints, characteristic
//! polynomials, implementations, decision-preserving transformations and
//! polynomial kernels for weighted instances, plus an exhaustive oracle.

pub mod catalog;
pub mod certificate;
pub mod classify;
pub mod constraint;
pub mod error;
pub mod express;
pub mod formula;
pub mod implementation;
pub mod io;
pub mod language;
pub mod oracle;
pub mod poly;
pub mod random;
pub mod transform;

pub use constraint::{Constraint, PatternMode, Slot, SubstitutionPattern};
pub use error::{Error, Result};
pub use formula::{Formula, WeightRange};
pub use language::{ClosureMode, ConstraintLanguage};
pub use poly::{Monomial, MultilinearPolynomial};
