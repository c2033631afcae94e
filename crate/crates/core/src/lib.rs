//! Exact rational tools for Banach–Mazur sandwich certificates between the
//! cube and affine images of the cross-polytope, planar asymmetry and
//! equidistance computations, and a floating-point search for good operators.

pub mod asymmetry;
pub mod certify;
pub mod equidistant;
pub mod error;
pub mod json;
pub mod lemma;
pub mod linalg;
pub mod lp;
pub mod polytope;
pub mod rational;
pub mod search;

pub use error::{Error, Result};
pub use linalg::{QMatrix, QVector};
pub use rational::Rational;
