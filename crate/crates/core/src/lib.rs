//! Numerical laboratory for 1D doubly-degenerate nonlinear diffusion:
//! closed-form self-similar point-source solutions, a mass-conservative
//! implicit solver for the divergence-form equation, the exact algebra
//! mapping the non-divergence form onto it, and a diagnostics suite for
//! finite speed of propagation, the maximum principle and annulus energies.

pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod params;
pub mod quadrature;
pub mod report;
pub mod selfsim;
pub mod solver1d;
pub mod special;
pub mod tridiag;

pub use error::{Error, Result};
pub use grid::{Grid, Snapshot};
pub use params::{DivParams, NonDivParams};
pub use selfsim::SelfSimilarSolution;
pub use solver1d::{Schedule, Trajectory};
