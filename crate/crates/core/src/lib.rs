//! Distributed Clarkson-style solvers for LP-type problems on a simulated
//! synchronous gossip network.

pub mod lptype;
pub mod problems;
pub mod sim;
pub mod protocols;
pub mod experiment;
