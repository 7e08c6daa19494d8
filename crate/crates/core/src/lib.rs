//! Controller synthesis for timed Golog programs.
//!
//! A problem consists of a basic action theory with clocks, a Golog program
//! over its actions, and an MTL formula describing undesired behaviour. The
//! engine decides whether a controller exists that keeps every terminating
//! run of the program away from the undesired behaviour, and extracts one.
//!
//! The pipeline is `dsl` (parse) → `ground` (finite-domain grounding) →
//! `world`/`program` (progression and transition semantics) → `mtl`/`ata`
//! (specification) → `region`/`quotient` (finite abstraction) → `game`
//! (search and extraction). `oracle` is an independent brute-force solver
//! used for cross-checking.

pub mod ata;
pub mod cli;
pub mod controller;
pub mod dsl;
pub mod error;
pub mod game;
pub mod ground;
pub mod mtl;
pub mod oracle;
pub mod problem;
pub mod program;
pub mod quotient;
pub mod region;
pub mod simulate;
pub mod world;

pub use error::{Error, Result};
pub use num_rational::Rational64;
pub use problem::Problem;
