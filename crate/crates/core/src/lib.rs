//! Spectra of the non-Hermitian two-dimensional quartic oscillators
//! `H = H0 + i λ W`, with `H0 = -½∇² + αx x⁴ + αy y⁴` and a polynomial
//! perturbation `W ∈ {xy, x²y, xy², x²y + xy²}`.
//!
//! Two independent discretizations are provided: a tensor-product basis of
//! harmonic-oscillator functions ([`hamiltonian2d`]) and a sinc-DVR grid
//! ([`pseudospectral`]). An extended-precision shooting solver for the
//! one-dimensional quartic oscillator ([`oracle1d`]) gives the separable
//! λ = 0 reference. On top of these sit point-group labelling
//! ([`symmetry`]), dense eigensolvers ([`eigensolver`]) and λ-continuation
//! with exceptional-point bracketing ([`sweep`]).

// `!(a < b)` is used on purpose to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod assignment;
pub mod basis1d;
pub mod discretization;
pub mod eigensolver;
pub mod error;
pub mod hamiltonian2d;
pub mod operator;
pub mod oracle1d;
pub mod pseudospectral;
pub mod sweep;
pub mod symmetry;

pub use faer::c64;

pub use basis1d::Basis1D;
pub use discretization::{Discretization, Method};
pub use eigensolver::Spectrum;
pub use error::{Error, Result};
pub use hamiltonian2d::{BasisIndex, ModelParams, Perturbation, ProductBasis};
pub use operator::{OperatorMatrix, Representation};
pub use pseudospectral::Grid2D;
pub use symmetry::{Group, Irrep, IrrepLabel, SpatialOp};
