//! Desk-scale simulation lab for quantum remote memory attestation.
//!
//! The crate layers up from a dense statevector simulator ([`qsim`]) through
//! entangled channels with a timed network ([`channels`]), checksum chains
//! over attested memory ([`memory`]), two attestation protocols ([`soteria`],
//! [`attest`]), adversary models ([`adversary`]), and the reproducible
//! experiment drivers behind the `qra` binary ([`experiments`]).
//!
//! Every stochastic step flows through [`rng::SimRng`]; a run is fully
//! determined by its `u64` seed, whether trials execute on the rayon pool
//! (`parallel` feature, on by default) or sequentially.

pub mod adversary;
pub mod attest;
pub mod channels;
pub mod config;
pub mod error;
pub mod experiments;
pub mod memory;
pub mod qsim;
pub mod rng;
pub mod soteria;
pub mod stats;
pub mod trials;

pub use error::{Error, Result};
