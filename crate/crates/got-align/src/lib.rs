//! File formats, dataset loading, and job scheduling around the
//! `got-core` alignment library: edge-list and TU-collection graph
//! readers, line-oriented result records, and a deterministic worker
//! pool.  The `got-align` binary in this package wires these into a
//! command-line front end.

pub mod io;
pub mod pool;
pub mod records;
