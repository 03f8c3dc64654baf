//! Exact geometry of Lipschitz-free spaces over finite metric spaces.
//!
//! The crate computes, in exact rational arithmetic: free-space
//! (Kantorovich-Rubinstein) norms with primal flow and dual Lipschitz
//! certificates, optimal molecule expansions, discounted shortest-path
//! metrics that detect Delta behavior of molecules at a given scale, and
//! the layered dyadic example space with its cover decomposition and
//! witness functions. A floating-point module computes the renorming
//! gauges on R^N with certified duality gaps.

#![forbid(unsafe_code)]

pub mod bruteforce;
pub mod delta;
pub mod free;
pub mod io;
pub mod metric;
pub mod rat;
pub mod renorm;
pub mod veeorg;

pub use free::{FreeVector, PointFunction};
pub use metric::{DerivedParams, MetricSpace};
pub use rat::Rat;
