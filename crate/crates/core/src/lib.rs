//! Exact PCTL model checking over finite Markov chains, compilers from
//! counter machines to PCTL formulae, and builders for the finite witness
//! chains that satisfy them.

pub mod geometry;
pub mod minsky;
pub mod par;
pub mod pctl;
pub mod rational;
pub mod reduction;
pub mod verify;
pub mod witness;

pub use geometry::{default_constants, GeometryConstants, Vec2};
pub use par::ExecMode;
pub use rational::Rat;
