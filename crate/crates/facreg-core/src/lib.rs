//! facreg-core — regularization of 3D façade layouts.
//!
//! A façade layout is a set of oriented rectangles (windows, doors,
//! balconies) detected on a building, each carrying noisy position,
//! elevation, size and orientation values. This crate snaps those values
//! onto a small set of shared categories by:
//!
//! 1. **attrspace** – clustering the initial values of each attribute
//!    (position ℙ, elevation ℤ, width 𝕎, height ℍ, orientation 𝕆) into
//!    candidate sets with an adaptive threshold.
//! 2. **logic** – encoding boolean gates, the `same` equality operator and
//!    the `enum` category-count operator as linear 0-1 constraints.
//! 3. **regularize** – assembling the full binary integer program (data
//!    term, category-sparsity term, feasibility and regularity
//!    constraints) and decoding its solution back into a layout.
//! 4. **bip** – solving the program exactly with branch-and-bound, with an
//!    exhaustive oracle for small instances and an LP-format exporter.
//! 5. **eval** – area-based precision/recall/F scoring against ground
//!    truth, a Gaussian-noise robustness protocol, and a mean-shift
//!    clustering baseline.

pub mod attrspace;
pub mod bip;
pub mod config;
pub mod error;
pub mod eval;
pub mod io;
pub mod logic;
pub mod meanshift;
pub mod model;
pub mod regularize;
pub mod synth;

pub use config::{Config, PruningConfig, SolverConfig, WeightMode, Weights};
pub use error::{Error, Result};
pub use model::{Component, ComponentKind, GeomParams, Layout, Transform};
