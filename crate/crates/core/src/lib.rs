//! Fair content delivery with decentralized coded caching over a fading
//! Gaussian broadcast channel.
//!
//! The crate simulates a server that combines user requests into coded
//! multicast messages, queues the resulting bits per receiver set and schedules
//! them with superposition coding. See the `examples/` directory for a tour.

pub mod bc_capacity;
pub mod channel;
pub mod checks;
pub mod combinatorics;
pub mod config;
mod error;
pub mod policies;
pub mod queues;
pub mod report;
pub mod scenario;
pub mod sim;
pub mod system;

pub use error::{Error, Result};
