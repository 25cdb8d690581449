//! Exact K-stability analysis for weighted-homogeneous hypersurface cones
//! with a diagonal torus action.
//!
//! The pipeline: build the index character of a polarized cone, minimize its
//! leading coefficient `a_0` over the normalized Reeb slice, then evaluate
//! the Futaki invariant of each supplied equivariant degeneration at the
//! minimizer.

pub mod analysis;
pub mod cone;
pub mod error;
pub mod families;
pub mod futaki;
pub mod gauge;
pub mod index_character;
pub mod lattice;
pub mod pdivisor;
pub mod linalg;
pub mod polyhedra;
pub mod rational;
pub mod roots;
pub mod series;
pub mod volume;

pub use error::{Error, Result};
pub use rational::Rational;
