//! File formats and the command-line pipeline around [`kgrec_core`].

pub mod cli;
pub mod ntriples;
pub mod profiles;
pub mod report;
pub mod results;

pub use kgrec_core;
