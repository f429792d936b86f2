//! Conversion of q-series into product representations.
//!
//! - [`prodmake`]: Andrews' algorithm, series to infinite product.
//! - [`expand_qproduct`]: the inverse direction, for verification.
//! - [`qfactor`]: finite q-product factorisation of rational functions,
//!   verified by exact polynomial arithmetic.
//! - [`etamake`]: greedy recognition of eta-product structure.
//! - [`jacprodmake`] / [`jac2prod`] / [`jac2series`]: recognition of
//!   Jacobi-type theta products via periodicity of product exponents.

mod etamake;
mod jac;
mod prodmake;
mod qfactor;

pub use etamake::{etamake, EtaProduct};
pub use jac::{jac2prod, jac2series, jacprodmake, JacProduct, QPochhammerTerm};
pub use prodmake::{expand_qproduct, prodmake, prodmake_normalized, QProduct};
pub use qfactor::qfactor;
