//! Bratteli-Vershik stochastic adding machines.
//!
//! The crate is organised bottom-up:
//!
//! - [`diagram`]: ordered Bratteli diagrams with consecutive ordering, simplicity
//!   and Hypothesis A checks.
//! - [`vershik`]: paths cofinal with the minimal path, the Vershik successor and
//!   the carry/reset targets used by the random Vershik map.
//! - [`numeration`]: the (F,G) numeration system of 2×2 diagrams and the general
//!   path-rank codec.
//! - [`process`]: probability schedules, exact and floating transition rows, the
//!   sparse transition operator, seeded simulation and recurrence classification.
//! - [`spectrum`]: the fibered recursion for `u_{F_n}`/`w_{F_n}`, membership tests
//!   for the spectral sets, escape radii, eigen-residuals and raster rendering.
//!
//! Everything here is pure computation over immutable values and builds without
//! `std` (an allocator is required). File formats, configuration and the CLI live
//! in the companion `bvm` crate.

#![cfg_attr(not(any(feature = "std", test)), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod diagram;
mod error;
pub mod numeration;
pub mod prob;
pub mod process;
pub mod spectrum;
pub mod vershik;

pub use diagram::{BratteliDiagram, IncidenceMatrix, OrderingMatrix, Simplicity};
pub use error::Error;
pub use numeration::{DigitString, FgNumeration, FgSequences, PathRanker};
pub use prob::Probability;
pub use process::{AddingMachine, ProbSchedule, TailRule, TransitionRow};
pub use vershik::{Edge, PathState, VershikSystem};

pub use num_bigint::BigUint;
pub use num_complex::Complex64;
pub use num_rational::BigRational;

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;
