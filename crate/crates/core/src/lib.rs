//! Singular points, Baum–Bott indices and the moduli map of polynomial foliations of the
//! complex projective plane.
//!
//! A degree-`n` planar vector field `(P, Q)` extends to a foliation of `CP^2` with, generically,
//! `n^2` finite singular points and `n + 1` on the invariant line at infinity. The crate
//! enumerates them, attaches characteristic ratios `λ/μ` and Baum–Bott indices
//! `ν = λ/μ + μ/λ`, realizes the moduli map for quadratic fields on the regular-representative
//! chart, and integrates holonomy germs of the infinity leaf.

pub mod error;
pub mod foliation;
pub mod holonomy;
pub mod io;
pub mod moduli;
pub mod numkernel;
pub mod sampling;

pub use error::{Error, Result};
pub use numkernel::C64;
