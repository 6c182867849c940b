//! Eternal vertex cover game on regular grid graphs.

pub mod attackers;
pub mod cover;
pub mod error;
pub mod evc_solver;
pub mod game;
pub mod grid;
pub mod harness;
pub mod matching;
pub mod ratio;
pub mod strategies;

pub use error::{EvcError, Result};
pub use grid::{Coord, GridGraph, GridKind, Topology};
