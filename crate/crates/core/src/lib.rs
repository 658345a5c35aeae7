//! Exact and approximate correctability of operator algebras under quantum
//! channels.
//!
//! The crate decides whether an algebra of observables survives a noise
//! channel exactly (commutation with the products `E_i† E_j`), computes the
//! correctability estimate `δ = ‖N̂ − N̂∘P_{A'}‖⋄` from the complementary
//! channel, computes the optimal reconstruction error
//! `E = min_R ‖R∘N − P_A‖⋄` with a semidefinite program, and checks the
//! two-sided relation `δ²/4 ≤ E ≤ 2√δ`.

pub mod algebras;
pub mod channels;
pub mod cli;
pub mod correctability;
pub mod diamond;
pub mod error;
pub mod io;
pub mod matcore;
pub mod random;
pub mod sdp;

pub use algebras::{AlgebraStructure, Block, OperatorBasis};
pub use channels::{compose, encoding_channel, make_channel, standard_channel, Channel, Isometry};
pub use correctability::{CorrectabilityReport, SubspaceCode};
pub use diamond::diamond_distance;
pub use error::{Error, Result};
pub use matcore::{CMatrix, C64};
