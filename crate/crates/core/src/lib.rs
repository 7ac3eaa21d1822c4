//! Numerical laboratory for divergence-based analysis of cyclic self-maps.
//!
//! The pieces, bottom to top: convex function handles and their Bregman
//! divergences ([`convex`], [`functions`]), convex set descriptors with
//! sampling and projection ([`sets`]), convexity moduli ([`moduli`]),
//! cyclic systems with sampled certificates for the hybrid and contraction
//! inequalities ([`cyclic`]), orbit / averaging / fixed-point engines
//! ([`engine`]), and a JSON scenario layer ([`scenario`]) that the CLI and
//! the C ABI both drive.
//!
//! Every sampled check is deterministic for a fixed seed, and every failed
//! check carries a witness that reproduces the violation when re-evaluated.

pub mod certificate;
pub mod convex;
pub mod cyclic;
pub mod engine;
pub mod error;
pub mod functions;
pub mod moduli;
pub(crate) mod numerics;
pub(crate) mod optimize;
pub mod point;
pub mod sampling;
pub mod scenario;
pub mod sets;

pub use certificate::{Certificate, Verdict};
pub use convex::{bregman, ConvexFunctionHandle};
pub use error::{Error, Result};
pub use point::Point;
