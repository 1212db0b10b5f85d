#![no_std]

//! Bell expressions as coefficient tables, no-signaling rewritings, and the
//! optimal-steering (OW) criterion.
//!
//! The crate is `no_std` and only needs `alloc`. Everything is pure: values are
//! immutable after construction and safe to share between threads.
//!
//! Layout of the crate:
//!
//! * [`scenario`]: scenarios, behaviors, coefficient tensors, deterministic
//!   enumeration and local bounds.
//! * [`table`]: the block text format for bipartite tables.
//! * [`ns`]: difference tables, the Δ stencil and no-signaling constants.
//! * [`linalg`] and [`quantum`]: small dense complex matrices, realizations,
//!   steered states and effective operators.
//! * [`ow`]: saturation reports, necessary conditions, Γ-solving and OW-game
//!   search; [`seesaw`] recovers realizations numerically.
//! * [`families`], [`cglmp`], [`mermin`]: concrete fixtures.

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod cglmp;
pub mod error;
pub mod families;
pub mod linalg;
pub mod mermin;
pub mod ns;
pub mod ow;
pub mod quantum;
pub mod scenario;
pub mod seesaw;
pub mod table;

mod odometer;

pub use error::{Error, Result};
pub use scenario::{Behavior, BellExpression, DeterministicStrategy, LocalBound, Scenario};
