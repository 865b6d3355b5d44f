//! 4×4 complex matrices written as 2×2 blocks `K, N, L, M`, each block
//! `c0·1 + c·σ` in the Pauli basis.
//!
//! [`algebra`] has the parameterization and the multiplication law,
//! [`families`] the 39 constrained families and their constants,
//! [`rank3`] the 16 variants with one zero row and column.
//! [`classify`] tells which of those a matrix belongs to and [`verify`]
//! checks all of it numerically.

pub mod algebra;
pub mod error;
pub mod families;
pub mod sampling;
pub mod types;
pub mod rank3;
pub mod classify;
pub mod document;
pub mod verify;
pub mod cli;
