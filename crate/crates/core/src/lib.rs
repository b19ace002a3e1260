//! Difference-Nevanlinna toolkit.
//!
//! Exact degree calculus for Clunie-type difference equations
//! (`diffpoly`, `eqparse`, `clunie`, `poleprop`) and a numerical engine
//! for Nevanlinna characteristics of concrete meromorphic models
//! (`quad`, `model`, `charfn`, `growth`).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod charfn;
pub mod clunie;
pub mod diffpoly;
pub mod eqparse;
pub mod exact;
pub mod growth;
pub mod model;
pub mod poleprop;
pub mod quad;

pub use diffpoly::{Coefficient, DiffPolyError, DiffPolynomial, MultiIndex, Shift, Symbol, Term};
pub use eqparse::{parse_equation, validate_no_common_factors, ClunieEquation, Coprimality, ParseError};
