//! Thermodynamic Lyapunov functionals for compressible heat-conducting
//! fluids: equations of state from a free energy, the mechanical-equilibrium
//! and non-equilibrium functionals, their multipliers and second variation,
//! and a 1D Navier–Stokes–Fourier solver to watch them decay.

// `!(x > 0.0)` is used on purpose so NaN fails the guard.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calculus;
pub mod eos;
pub mod error;
pub mod fields;
pub mod functionals;
pub mod simulator;
pub mod verify;

pub use eos::{EosSpec, FreeEnergy, ThermoState};
pub use error::{Error, Result};
pub use fields::{Grid1D, StateFields};
