//! Exact toolkit for boxes, tubes and witness orbits of hyperbolic toral automorphisms.

pub mod automorphism;
pub mod boxconstruct;
pub mod error;
pub mod fractal;
pub mod numbers;
pub mod torusgeom;
pub mod tubeverify;
pub mod witness;

pub use error::Error;
pub use numbers::{QuadExt, Rational, Sign, TowerExt};

/// The exact scalar every construction runs on.
pub type Exact = TowerExt;
