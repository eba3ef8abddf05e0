//! Simulation and optimization toolkit for the distributed toric surface
//! code: GHZ generation protocols under time-tracked hardware noise,
//! Pauli superoperator characterization of stabilizer measurements,
//! toric-code memory Monte Carlo with a Union-Find decoder, and
//! finite-size-scaling threshold fits.

pub mod densmat;
pub mod error;
pub mod fitstats;
pub mod noise;
pub mod protocols;
pub mod rng;
pub mod superop;
pub mod toric;
