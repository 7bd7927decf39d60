//! Numerical laboratory for Gaussian conjugate Rogers–Shephard type
//! inequalities: determinant and LMI checks on symmetric matrices, Gaussian
//! saturation certificates, Monte Carlo over convex bodies, self-convolution
//! dynamics on grids and the functional (sup-convolution) forms.

pub mod convolution;
pub mod error;
pub mod exec;
pub mod functional;
pub mod geometry;
pub mod grid;
pub mod lp;
pub mod matrix;
pub mod optim;
pub mod rng;
pub mod saturation;
pub mod special;

pub use error::{Error, Result};
pub use exec::Exec;
pub use grid::{Grid, GridFn, Weight};
pub use matrix::{det_id_plus, psd_check, Dense, PsdVerdict, SymMatrix};
