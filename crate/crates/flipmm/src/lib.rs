//! Discovery, transformation, verification and lifting of fast matrix
//! multiplication schemes.
//!
//! The crate is organized around [`scheme::Scheme`], a rank-`r`
//! decomposition of the `(m, n, p)` matrix multiplication tensor over one
//! of three coefficient rings (binary, modular ternary, integer ternary).
//! On top of it sit:
//!
//! * [`flip`] -- rank-preserving and rank-changing local transformations,
//! * [`meta`] -- dimension-changing operations (merge, product, extend,
//!   project),
//! * [`search`] -- seeded parallel random walks over the flip graph,
//! * [`lift`] -- Hensel lifting of modular schemes to exact rational or
//!   integer coefficients,
//! * [`compose`] -- block-multiplication constructions from a scheme
//!   library,
//! * [`optimize`] / [`alternatives`] -- flip-only metric optimization and
//!   same-rank scheme generation.

pub mod alternatives;
pub mod compose;
pub mod flip;
pub mod io;
pub mod lift;
pub mod meta;
pub mod modmat;
pub mod optimize;
pub mod ring;
pub mod scheme;
pub mod search;

pub use ring::{CoeffVec, Ring};
pub use scheme::{Axis, Component, Dims, Scheme, SchemeMetrics};
