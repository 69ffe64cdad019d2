//! Rate-disturbance regions for communication channels with side receivers.
//!
//! A channel delivers a message to one desired receiver Y while K side
//! receivers Z_1..Z_K pick up unwanted signal. This crate computes the
//! trade-off between the message rate R and the disturbance rates imposed
//! on the side receivers:
//!
//! * exact finite-alphabet probability objects and information measures
//!   ([`info`]),
//! * set partitions of the input alphabet with the refinement lattice
//!   ([`partition`]),
//! * a small text format for channel descriptions ([`channel`]),
//! * frontier sweeps for the single- and two-constraint regions, including
//!   the deterministic specializations and exactness tests ([`region`]),
//! * closed-form scalar and sampled vector Gaussian regions ([`gaussian`]),
//! * exact rational Fourier-Motzkin projection, used to re-derive the
//!   two-constraint inner bound from its pre-elimination system
//!   ([`polyhedra`]),
//! * desk-scale random-coding simulations: superposition and Marton
//!   codebooks, collision statistics, and an independence-lemma oracle
//!   ([`sim`]).
//!
//! All information quantities are in bits (logarithms base 2).

pub mod channel;
pub mod gaussian;
pub mod info;
pub mod partition;
pub mod polyhedra;
pub mod region;
pub mod sim;

pub use channel::ChannelSpec;
pub use info::JointPmf;
pub use partition::SetPartition;
pub use region::{Frontier2, Frontier3};
