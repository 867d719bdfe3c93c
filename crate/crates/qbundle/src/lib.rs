//! Symbolic verification of quantum principal bundles.
//!
//! The crate computes with finitely presented noncommutative algebras over
//! Laurent polynomials in `q` and `l`: normal forms, Hopf structure maps,
//! comodule algebras, differential calculi and the vertical and horizontal
//! form machinery of a principal comodule algebra.

#![allow(clippy::type_complexity, clippy::len_without_is_empty)]

pub mod bundle;
pub mod calculus;
pub mod catalog;
pub mod coeff;
pub mod comodule;
pub mod freealg;
pub mod hopf;
pub mod linalg;
pub mod report;
pub mod rewrite;
pub mod text;

#[cfg(test)]
mod fixtures;

pub use bundle::{
    Bundle, BundleError, CompletenessData, Expectation, InvariantForms, VerticalForms,
};
pub use calculus::{Calculus, CalculusError, WoronowiczCalculus};
pub use catalog::{export, load_example, parse_example, CatalogError, Example};
pub use coeff::{CoeffError, Scalar};
pub use comodule::{Cleaving, Coaction, ComoduleError, CrossedData, CrossedProduct, Side};
pub use freealg::{Alphabet, FreeAlgError, Generator, Letter, LetterKind, Poly, Tensor, Word};
pub use hopf::{HopfAlgebra, HopfError, LinearMap, Morphism};
pub use linalg::LinalgError;
pub use report::{Check, Report, Status};
pub use rewrite::{Presentation, PresentationBuilder, RewriteError, Rule};
pub use text::{parse_form, parse_poly, parse_scalar, parse_tensor, ParseError};
