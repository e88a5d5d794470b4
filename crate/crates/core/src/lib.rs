//! Numerical core for the one-dimensional semilinear damped wave equation
//!
//! ```text
//! u_tt + u_t - u_xx + u^p = 0,   u(0) = u0,   u_t(0) = u1
//! ```
//!
//! The crate is `no_std` (it needs `alloc` for grid storage) and contains no
//! IO. It provides:
//!
//! - [`special`]: exponentially scaled modified Bessel functions `I_0, I_1, I_2`
//!   and an independent integral-representation oracle,
//! - [`grid`]: uniform grids, grid functions, norms and the `<x>^{-rho}` data profile,
//! - [`kernel`]: the exact linear solution operator `S(t)` and its first two
//!   time derivatives as light-cone convolutions,
//! - [`ode`]: the explicit ODE supersolution `H = w g` and its derivatives,
//! - [`heat`]: the Gaussian semigroup, the heat supersolution and its `L^q` rates,
//! - [`solver`]: an explicit second-order finite-difference integrator,
//! - [`analysis`]: the theorem-level checks built on top of all of the above.
#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

mod error;
mod math;

pub mod analysis;
pub mod grid;
pub mod heat;
pub mod kernel;
pub mod ode;
pub mod params;
pub mod quadrature;
pub mod solver;
pub mod special;

pub use error::{Error, Result};
pub use grid::{Grid, GridFunction, LqExponent};
pub use params::{CheckReport, ModelParams};
