//! Exact arithmetic for the Carlitz module, its prolongations and their
//! `t`-adic Galois images over `F_q(theta)`.
//!
//! The layers build on each other: finite fields, binomials modulo `p`,
//! truncated power series in `t`, hyperderivatives and the jet map
//! `rho_[k]`, a finite model of `C_inf` carrying the Anderson-Thakur function,
//! and finally image orders, densities and rank certificates.

pub mod binomials;
pub mod cinfty_model;
pub mod config;
pub mod error;
pub mod finite_field;
pub mod galois_density;
pub mod hyperderivatives;
pub mod power_series;

pub use error::{Error, Result};
pub use finite_field::{FqElem, FqSpec};
pub use hyperderivatives::{jet, jet_at, HyperDeriv, JetMatrix};
pub use power_series::{TruncSeries, UnitClass};
