//! Exact machinery for matrices of Barvinok rank two and the integral
//! homology of the space `B(d,n)` they form.
//!
//! The crate is organized bottom-up:
//!
//! * [`trop`] - min-plus projective points, tropical segments and the
//!   rank-at-most-two decision.
//! * [`canonical`] - primitive integer representatives of matrix classes.
//! * [`tree`] - balanced compositions, the matrix-to-tree map and the
//!   simplicial model of `B(d,n)` as a quotient of an order complex.
//! * [`matrix`], [`smith`], [`homology`] - sparse integer matrices, Smith
//!   normal form and homology over `Z`, `Q` and `Z/p`.
//! * [`equivariant`] - chain complexes with an involution, the hemispherical
//!   complex, tensor products and plus/minus quotients.
//! * [`morse`] - algebraic discrete Morse reduction, generic and in the
//!   closed form available for hemispherical tensor products.
//! * [`formulas`] - closed-form homology used as an oracle.
//! * [`report`] - the multi-method homology run behind the CLI.

pub mod canonical;
pub mod equivariant;
pub mod error;
pub mod formulas;
pub mod homology;
pub mod matrix;
pub mod morse;
pub mod report;
pub mod smith;
pub mod trop;
pub mod tree;

mod bigjson;

pub use error::{Error, Result};
