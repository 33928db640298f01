//! Planar maximally entangled (PME) states of qudit rings.
//!
//! A pure state of `n` sites is PME when every connected window of
//! `⌊n/2⌋` neighbouring sites on the ring is maximally mixed. The crate
//! builds such states, verifies them (and the stronger all-subsets
//! property), sorts four-qubit states into families, and runs
//! teleportation and secret-sharing protocols on them.

pub mod cli;
pub mod constructors;
pub mod error;
pub mod families4;
pub mod matrix;
pub mod planar;
pub mod protocols;
pub mod statefile;
pub mod statevec;

pub use error::{PmeError, Result};
pub use matrix::ComplexMatrix;
pub use num_complex::Complex64;
pub use planar::{verify_ame, verify_pme, Partition, SubsetPartition, VerificationReport};
pub use statevec::PureState;
