//! Persistence, replay, live service and command line for head-pointing
//! sessions.
//!
//! A session is described by a [`SessionSpec`]. Poses flow through a
//! [`SessionRunner`], which emits the same [`Outbound`] messages whether
//! the poses come from a [`TraceFile`] or a WebSocket client; an
//! [`EventLog`] is that message stream without cursor updates.

pub mod cli;
pub mod eventlog;
pub mod pipeline;
pub mod protocol;
pub mod replay;
pub mod service;
pub mod spec;
pub mod study;
pub mod trace;

pub use eventlog::EventLog;
pub use pipeline::{Connection, SessionRunner};
pub use protocol::{Inbound, Outbound};
pub use replay::replay;
pub use spec::SessionSpec;
pub use trace::TraceFile;
