//! Replace a deep phase-estimation circuit by a shallow variational circuit
//! that reproduces its measurement distribution.
//!
//! The crate is organised bottom-up:
//!
//! * [`circuit`]: gate-list IR, `.qc` text format, basis lowering and depth.
//! * [`sim`]: statevector and density-matrix simulation, depolarizing and
//!   readout noise, distributions and shot sampling.
//! * [`qpe`]: phase-estimation circuits, inverse QFT and the closed-form
//!   outcome distribution.
//! * [`optimizer`]: COBYLA-style linear trust-region method and Nelder–Mead.
//! * [`ansatz`]: the RY/RZ + CX ansatz, distribution metrics and training.
//! * [`compiler`]: the end-to-end replace-by-trained-ansatz pass.

pub mod ansatz;
pub mod circuit;
pub mod compiler;
pub mod error;
pub mod optimizer;
pub mod qpe;
pub mod sim;

pub use error::{Error, Result};
