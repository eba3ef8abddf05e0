//! Toric-code memory-channel Monte Carlo: superoperator-driven stabilizer
//! rounds in the four-round schedule, 3D syndrome construction, Union-Find
//! decoding, and logical-error determination.

pub mod channel;
pub mod decoder;
pub mod lattice;
pub mod schedule;

pub use channel::{run_memory_channel, ChannelNoise, ChannelOutcome, RoundNoise};
pub use decoder::{decode_union_find, edge_set_syndrome, Correction, DecodeGraph};
pub use lattice::{ErrorPattern, StabKind, ToricLattice};
pub use schedule::{four_round_schedule, StabilizerBatch};
