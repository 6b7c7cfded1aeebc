//! Numerical toolkit for two-party Bell correlation experiments.
//!
//! The crate covers the full pipeline from inequality coefficients to
//! explicit local hidden-variable constructions:
//!
//! * exact local (classical) bounds and see-saw quantum vector bounds for
//!   correlation inequalities ([`bell`]),
//! * dichotomic quantum observables, Bell-diagonal two-qubit states and
//!   their correlation functions ([`quantum`]),
//! * samplable local hidden-variable models with deterministic,
//!   stream-indexed Monte Carlo estimation ([`lhv`]),
//! * sign-rounding embeddings built from Taylor, spherical-harmonic and
//!   circular-harmonic expansions, together with the root equations that
//!   fix their scale constants ([`krivine`]),
//! * the correspondence between unit vectors and anticommuting observables
//!   on a maximally entangled state ([`correspondence`]),
//! * the `I_nn22` inequality family and its decomposition into CHSH-type
//!   subinequalities ([`inn22`]).
//!
//! The crate is `no_std` (with `alloc`); all floating point special
//! functions go through [`libm`] so results are identical across targets.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bell;
pub mod correspondence;
pub mod error;
pub mod inn22;
pub mod krivine;
pub mod lhv;
pub mod linalg;
pub mod quantum;
pub mod rng;
pub mod tolerances;

pub use error::{Error, Result};
