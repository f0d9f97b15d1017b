//! Exact rings of differential operators over polynomial rings and monomial Artinian
//! algebras, in characteristic zero and `p`, with their transpositions.

pub mod artinian;
pub mod coeffield;
pub mod diffop;
pub mod error;
pub mod expr;
pub mod invariants;
pub mod levelmat;
pub mod linalg;
pub mod polyring;
pub mod transpose;

pub use coeffield::{FieldElem, FieldSpec, MultiExp};
pub use diffop::DiffOp;
pub use error::{Error, Result};
pub use polyring::{PolyRing, Polynomial, RingMap};
pub use transpose::{standard_transpose, AntiAutomorphism};
