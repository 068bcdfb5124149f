//! Decides whether `Pol{ρ,σ}` is a maximal subclone of `Pol ρ` for central relations `ρ`, `σ`
//! on a small finite set, and backs each answer with a checkable witness.

pub mod certify;
pub mod classifier;
pub mod closure;
pub mod derived;
pub mod error;
pub mod interp;
pub mod polycheck;
pub mod relcore;
pub mod survey;

pub use error::{Error, Result, ValidationError};
