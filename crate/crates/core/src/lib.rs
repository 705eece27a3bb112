//! Limit order book model with price-switching control, internalization and
//! dark-pool orders, solved by backward induction on a discrete grid.

pub mod accounting;
pub mod config;
pub mod error;
pub mod evaluator;
pub mod grid;
pub mod market;
pub mod policy_io;
pub mod reward;
pub mod solver;

pub use error::{Error, Result};
