//! Explicit Bellman function for the BMO → BLO action of the dyadic maximal
//! operators on α-trees.
//!
//! The crate evaluates the Bellman candidate `B` on the parabolic strip
//! `Ω = {x₁² ≤ x₂ ≤ x₁² + 1}`, its family `A(x; L) = L + B(T_L x)`, the sharp
//! decay function `F_α(t) = b(−t)`, and provides numerical verification of
//! α-concavity, Bellman induction on finite α-trees, and the norm-optimizing
//! sequence that pins the operator norm to 1.

pub mod bellman;
pub mod cli;
pub mod concavity;
pub mod error;
pub mod geometry;
pub mod interval;
pub mod optimizers;
pub mod output;
pub mod trees;

pub use error::{Error, Result};
pub use geometry::{AlphaContext, OmegaPoint, RegionId};
