//! Reconstruction of a compactly supported 3D potential from scattering
//! amplitudes measured for a single incident direction.
//!
//! The physical model is time-independent scalar scattering: a plane wave
//! `exp(i k alpha0 . x)` hits a potential `q` supported in a cube `D`, and the
//! far field is described by the scattering amplitude `A(beta, k)`. On a
//! partition of `D` into `P` small cubes the forward problem becomes a dense
//! complex linear system for the total field, and the inverse problem — given
//! `A(beta_j, k)` for `P` scattered directions `beta_j` and a fixed incident
//! direction — becomes a single linear system for the auxiliary field
//! `h = q u`, followed by a pointwise division to recover `q`.
//!
//! The crate is organised bottom-up:
//!
//! - [`geometry`]: cube partitions, quasi-uniform sphere directions,
//!   wavenumber grids, and the elementary kernels (incident wave, outgoing
//!   Green's function).
//! - [`potential`]: real potentials sampled on a partition.
//! - [`linalg`]: dense complex matrices, LU with partial pivoting,
//!   Householder bidiagonalization, and a 1-norm condition estimator.
//! - [`forward`]: assembly and solution of the discrete forward problem and
//!   synthesis of exact scattering data.
//! - [`noise`]: multiplicative perturbation of exact amplitudes and the norm
//!   conventions used to report noise levels.
//! - [`solver`]: a direct solver and a regularized iterative solver with a
//!   discrepancy-principle stopping rule for the (possibly noisy) amplitude
//!   system.
//! - [`inversion`]: wavenumber selection, the end-to-end reconstruction
//!   pipeline, and its error metrics.
//!
//! The crate is `no_std` (with `alloc`) so the numerical pipeline can be
//! embedded anywhere; file formats and the command line interface live in the
//! companion crate `scatrec-cli`.

#![no_std]
#![warn(missing_docs)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod error;
pub mod forward;
pub mod geometry;
pub mod inversion;
pub mod linalg;
pub mod noise;
pub mod potential;
pub mod solver;

pub use error::Error;
