//! Numerical toolkit for discrete-time dynamical systems on compact metric
//! spaces: orbit-averaged distances in three limiting regimes (prefix limsup,
//! sup over all horizons, sliding-window limsup), exact window densities and
//! Banach densities of index sets, pairwise proximality relations, Birkhoff
//! averages with unique-ergodicity diagnostics, and system-level property
//! scans over a catalog of concrete systems.
//!
//! Verdicts produced here are finite-horizon, finite-budget statements
//! (`CertifiedAtScale` is not a proof); every verdict records the horizons,
//! grids, and witnesses needed to reproduce it.

pub mod catalog;
pub mod checker;
pub mod config;
pub mod density;
pub mod ergodic;
pub mod error;
mod kahan;
pub mod mean;
pub mod par;
pub mod prop;
pub mod proximal;
pub mod report;
pub mod runner;
pub mod schedule;
pub mod seeding;
pub mod space;

pub use error::{Error, Result};
pub use prop::{Expectation, Outcome, PropertyKind};
