//! Computational tools for finitely presented groups: free-group words, coset
//! enumeration, Reidemeister–Schreier rewriting, exact integer linear algebra,
//! low-dimensional homology of fiber products, and nilpotent quotients.

pub mod budget;
pub mod coset_enum;
pub mod error;
pub mod homology;
pub mod nilpotent;
pub mod pipeline;
pub mod presentations;
pub mod schreier;
pub mod words;
pub mod zlinalg;

pub use error::{Error, Result};
pub use presentations::FinitePresentation;
pub use words::{Letter, Word};
pub use zlinalg::{AbelianGroupInvariants, Int, IntMatrix};
