//! Rotational surfaces through the geometric linear momentum of their
//! generatrix: curve reconstruction, curvature evaluation, Weingarten
//! relations, prescribed mean and Gauss curvature, and revolution meshes.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::type_complexity)]

pub mod cli;
pub mod curvature;
pub mod error;
pub mod generatrix;
pub mod momentum;
pub mod numerics;
mod parse;
pub mod prescribe;
pub mod surface;
pub mod weingarten;

pub use error::{Error, Result};
