//! XRootD cache log mining: parsing, synthetic workloads, access statistics
//! and LRU cache simulation.

pub mod event;
pub mod parser;
pub mod stats;
pub mod synth;
pub mod sim;
pub mod cli;
