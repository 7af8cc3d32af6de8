//! A dynamic reasoning system: a path logic whose belief set grows one
//! time-stamped step at a time, with dialectical belief revision and two
//! controllers built on it.
//!
//! * [`dma`]: a document taxonomy over plain unary predicates.
//! * [`mis`]: multiple inheritance with exceptions over kinds and properties.

pub mod belief;
pub mod controller;
pub mod dma;
pub mod graph;
pub mod logic;
pub mod mis;
pub mod revision;
pub mod semantics;
pub mod text;

pub use logic::TimeStamp;
