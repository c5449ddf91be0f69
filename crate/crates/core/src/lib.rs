//! Exact and rigorous analysis of the sequential elimination dart game.

pub mod engine;
pub mod error;
pub mod exactmath;
pub mod lengthdist;
pub mod permcount;
pub mod stirling;
pub mod verify;
pub mod winner;

#[cfg(test)]
mod testutil;

pub use error::{Error, Result};
