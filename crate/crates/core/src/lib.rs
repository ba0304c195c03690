//! Nonlinear dynamics of Bose-Einstein condensates with long-range interactions.
//!
//! A Gaussian variational ansatz turns the Gross-Pitaevskii equation with a
//! gravity-like `1/r` or a dipole-dipole interaction into a classical
//! Hamiltonian system. This crate provides
//!
//! * [`units`]: reduction of laboratory parameters to the scaled parameters
//!   every other module consumes,
//! * [`mono`]: the one-degree-of-freedom system of the isotropic `1/r` gas,
//! * [`dipolar`]: the two-degree-of-freedom system of the axisymmetric dipolar gas,
//! * [`dynamics`]: symplectic integration, Poincaré sections, Lyapunov
//!   exponents and orbit classification for both systems,
//! * [`radial`]: a grid solver for the spherically symmetric `1/r` condensate
//!   (stationary states, imaginary-time relaxation, split-operator dynamics).

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod dipolar;
pub mod dynamics;
pub mod error;
pub mod mono;
pub mod radial;
mod roots;
pub mod units;

pub use error::{Error, Result};
