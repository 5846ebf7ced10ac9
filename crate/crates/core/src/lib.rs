//! Event-driven simulator and verification toolkit for zero-temperature
//! Glauber (coarsening) dynamics on slab lattices: an `L x L` in-plane torus
//! of thickness `k` with free or periodic vertical boundary conditions.
//!
//! The crate provides:
//!
//! - the slab geometry with multiplicity-aware neighbor enumeration
//!   ([`lattice`]),
//! - spin configurations, local energies, the total Hamiltonian, and a
//!   bit-exact text snapshot format ([`config`]),
//! - the exact continuous-time majority dynamics with per-site flip
//!   counters, energy bookkeeping, absorption detection, and flip-sequence
//!   legality checking ([`dynamics`]),
//! - product-measure initial states and the pillar/table scaffold
//!   constructions with designated blinker sites ([`initial`]),
//! - strict-majority stability certificates: provably absorbing site sets
//!   ([`certify`]),
//! - the two-layer column projection for `k = 2` ([`tau`]),
//! - modified bootstrap percolation on the block torus ([`bootstrap`]),
//! - seeded, replicated experiment drivers with JSON/CSV reporting
//!   ([`experiment`]).

pub mod bootstrap;
pub mod certify;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod experiment;
pub mod initial;
pub mod lattice;
pub mod tau;

pub use config::SpinConfig;
pub use error::{Error, Result};
pub use lattice::{Site, SlabGeometry, VerticalBc};
