//! Exact combinatorial workbench for spin decorations on the rational
//! tesselation of the disk: states, moves, relation checking, and the
//! piecewise fractional-linear maps the moves induce on the boundary.

pub mod error;
pub mod farey;
pub mod gf2;
pub mod marking;
pub mod rational;
pub mod relations;
pub mod state;
pub mod words;

pub use error::{Error, Result};
pub use rational::Rational;
