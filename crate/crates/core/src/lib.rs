//! Executable models for separability questions about Hilbert spaces.
//!
//! * [`hilbert`]: exact rational labels and finitely supported vectors in
//!   `ℓ²(ℝ)` and `ℓ²(ℝ) ⊗ ℓ²(ℝ)`.
//! * [`weyl`]: Halvorson-type representations of the Weyl canonical
//!   commutation relations acting on those vectors.
//! * [`epr`]: the EPR eigenvalue conditions, a witness finder that falsifies
//!   them in any tensor-product representation with a Halvorson-type factor,
//!   and the sum/difference representation where they do hold.
//! * [`games`]: the prepare-and-measure guessing game, both over an
//!   uncountable alphabet and in finite dimension.
//!
//! With the default `parallel` feature, trial sweeps run on rayon; without it
//! every sweep falls back to a plain sequential loop. Results never depend on
//! which path ran.

pub mod epr;
pub mod error;
pub mod exec;
pub mod games;
pub mod hilbert;
pub mod sample;
pub mod weyl;

pub use error::{Error, Result};
pub use exec::Execution;
pub use hilbert::{characteristic_state, inner_product, tensor_product, BiKet, Ket, Label};
