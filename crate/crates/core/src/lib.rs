//! Recovery maps and entropy-inequality verification for small quantum
//! systems.
//!
//! The crate is organized bottom-up:
//! - [`numerics`]: dense complex linear algebra on top of nalgebra
//!   (Hermitian eigensystems, operator functions on the support, Schatten
//!   norms, partial traces, subsystem permutations),
//! - [`quantum`]: validated states, channels, dilations, ensembles,
//!   measurements and seeded samplers,
//! - [`entropy`]: von Neumann / relative / max-relative entropies, fidelity,
//!   and the Renyi-type difference and conditional-information quantities,
//! - [`recovery`]: Petz and rotated Petz maps, conditional-information
//!   recovery, sequential recovery, entanglement-breaking maps and the
//!   pretty-good measurement,
//! - [`verify`]: witness searches over the rotation parameter, lower/upper
//!   bound checks, corollary instance builders, limit and functoriality
//!   checks,
//! - [`io`]: JSON interchange for matrices, channels, and reports.

pub mod entropy;
pub mod error;
pub mod io;
pub mod numerics;
pub mod quantum;
pub mod recovery;
pub mod verify;

pub use error::{Error, Result};
pub use numerics::{CMat, Complex64};
