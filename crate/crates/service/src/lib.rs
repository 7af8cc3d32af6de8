//! Sessions over the reasoning engine, with persistence, an HTTP API and a REPL.

pub mod file;
pub mod http;
pub mod repl;
pub mod session;
pub mod wire;

pub use file::{FileStep, SessionFile};
pub use session::{Mode, Session, SessionError};
