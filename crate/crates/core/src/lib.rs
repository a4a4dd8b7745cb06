//! In-memory RDF graphs, SWRL-style rules, a SPARQL subset and
//! constraint-based recommendation with diagnosis of inconsistent requests.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod dataset;
pub mod diagnosis;
pub mod graph;
pub(crate) mod lex;
pub mod query;
pub mod recommender;
pub mod rules;
pub mod solution;
pub mod term;
pub mod vocab;

pub use graph::{Graph, GraphBuilder, IndexOrder, Triple, TriplePattern};
pub use lex::Position;
pub use solution::Solution;
pub use term::{Datatype, Date, Float, Iri, Literal, Node, Term, Variable};
