//! Twistor invariants of JNR hyperbolic monopoles.
//!
//! Starting from JNR data (positive weights and distinct complex poles) the
//! crate builds the spectral curve on `P^1 x P^1`, its grid, the rational map
//! (by a closed form and by scattering), the holomorphic sphere in `P^N`, the
//! rotation action, and the energy density on the sphere at infinity. Each
//! construction comes with the identities that tie it to the others, so the
//! whole chain can be checked numerically.

pub mod bipoly;
pub mod corpus;
pub mod energy;
mod error;
pub mod jnr;
pub mod ratmap;
pub mod sphere;
pub mod tolerance;

pub use bipoly::{roots, BiPoly, ProjPoint, UniPoly};
pub use error::{JnrError, Result};
pub use jnr::{spectral_curve, JnrData};
pub use tolerance::Tolerances;

pub type Complex = num_complex::Complex64;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/curve.md")]
    mod curve {}
    #[doc = include_str!("../../../book/src/grids.md")]
    mod grids {}
    #[doc = include_str!("../../../book/src/rational-maps.md")]
    mod rational_maps {}
    #[doc = include_str!("../../../book/src/sphere.md")]
    mod sphere {}
    #[doc = include_str!("../../../book/src/energy.md")]
    mod energy {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
