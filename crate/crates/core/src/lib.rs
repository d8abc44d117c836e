//! Exact truncated arithmetic for Anderson t-motives of small rank.
//!
//! The scalar type is [`PuiseuxNumber`], a truncated Puiseux series in
//! `t = θ^{-1}` over a finite field, with explicit precision. On top of it the
//! crate builds twisted polynomials, t-motive exponentials, periods of the
//! Carlitz modules, kernel lattices and their Siegel matrices, and the
//! elimination of the τ-system of rank-3 dimension-2 motives.

pub mod analytic;
pub mod elim;
pub mod error;
pub mod experiments;
pub mod field;
pub mod lattice;
pub mod matrix;
pub mod motive;
pub mod ore;
pub mod puiseux;
pub mod report;
pub mod sample;

pub use error::{Error, Result};
pub use field::{Fe, FieldTower};
pub use matrix::Mat;
pub use puiseux::{Ctx, PuiseuxNumber, ZeroState};
