//! Exact-arithmetic q-series toolkit.
//!
//! Everything here works with truncated formal power series in `q` whose
//! coefficients are arbitrary-precision rationals; there is no floating
//! point anywhere. The crate is organized around four layers:
//!
//! - [`series`]: the [`QSeries`] substrate (truncated series with an
//!   optional rational `q`-power prefactor) and its ring operations,
//!   plus [`poly`] for exact polynomials and rational functions.
//! - [`builders`]: the classical objects — rising q-factorials, Gaussian
//!   polynomials, eta products, theta functions, Jacobi-type products and
//!   the triple/quintuple/Winquist identity series.
//! - [`prodconv`]: conversion of series back into product form —
//!   [`prodmake`](prodconv::prodmake) (series to infinite product),
//!   [`qfactor`](prodconv::qfactor) (rational functions to finite
//!   q-products), [`etamake`](prodconv::etamake) (eta-product recognition)
//!   and [`jacprodmake`](prodconv::jacprodmake) (theta-product recognition).
//! - [`relations`]: discovery of polynomial relations among q-series by
//!   exact nullspace computation.
//!
//! With the default `parallel` feature, batch work (monomial evaluation,
//! long convolutions) runs on rayon; disabling the feature yields a fully
//! sequential build with identical results.

pub mod builders;
mod error;
pub mod monomial;
mod par;
pub mod poly;
pub mod prodconv;
pub mod rat;
pub mod relations;
pub mod series;
pub mod text;

pub use error::{Error, Result};
pub use monomial::QMonomial;
pub use poly::{QPoly, RationalFunction};
pub use prodconv::{EtaProduct, JacProduct, QProduct};
pub use rat::Rat;
pub use relations::{BasisMode, ComboResult, MonomialBasis, Relation};
pub use series::QSeries;
