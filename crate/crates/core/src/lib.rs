//! Exact computations with monic orthogonal polynomial sequences (MOPS),
//! moment linear functionals and 2-3 type linear structure relations
//!
//! ```text
//! Q_n + r_n Q_{n-1} = P_n + s_n P_{n-1} + t_n P_{n-2}
//! ```
//!
//! Every quantity on the primary path is an exact rational number, so all
//! identities are checked by equality rather than within a tolerance.
//!
//! Module map:
//! - [`poly`]: dense univariate polynomials over the rationals.
//! - [`functional`]: truncated moment functionals, recurrence coefficients,
//!   Christoffel/Geronimus-style modifications and the moments to recurrence
//!   conversion used as orthogonality oracle.
//! - [`relation23`]: classification of 2-3 relations, the two inverse-problem
//!   checkers and the constants of `lambda (x - c) u = (x^2 + a x + b) v`.
//! - [`families`]: Jacobi and Chebyshev (kinds 2, 3, 4) recurrence data.
//! - [`casebook`]: end-to-end reproductions of the two worked examples.

pub mod casebook;
pub mod error;
pub mod families;
pub mod functional;
pub mod poly;
pub mod relation23;
pub mod scalar;
pub mod seq;

pub use error::{Error, Result};
pub use functional::{MomentFunctional, PolySeq, RecurrencePair, RegularityReport};
pub use poly::Polynomial;
pub use relation23::{FunctionalRelation, InverseVerdict, Relation23, RelationCase};
pub use scalar::Scalar;
pub use seq::IndexedSeq;
