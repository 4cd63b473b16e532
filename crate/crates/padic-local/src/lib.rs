//! Local arithmetic over F = Q_p: quadratic etale algebras and torus
//! embeddings, Tate local factors with a truncated-integral oracle,
//! Weil--Deligne bookkeeping for refined GL(2) data, finite-level
//! principal-series models with Hecke and twisting operators, toric period
//! functionals and their interpolation factors, exact symmetric-power
//! representations, ordinary projectors and group-algebra dualities, and
//! exact Pfaffian regulators.

pub mod padic;
pub mod quadratic;
pub mod characters;

pub use padic::{CosetSpaceP1, Mat2, PAdicElement, PAdicError, DEFAULT_PRECISION};
pub use quadratic::{embed_torus, AlgebraKind, QuadraticAlgebra, TorusElement};
