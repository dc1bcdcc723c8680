//! Spin–pseudospin entanglement dynamics of Dirac electrons in graphene with
//! Rashba spin-orbit coupling.
//!
//! The model is a single k-point continuum Hamiltonian on the four-level
//! space {A↑, B↑, A↓, B↓}. Energies are in µeV and ħ = 1, so times are in
//! ħ/µeV (≈ 0.658 ns).

// NaN-rejecting `!(x > y)` checks and index loops over 4×4 arrays are deliberate
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod basis;
pub mod dynamics;
pub mod entanglement;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod model;
pub mod state;
pub mod units;

pub use error::{Error, Result};
