//! Live play of repeated games between a human client and an exploitation engine.

pub mod api;
pub mod session;
pub mod store;

pub use api::router;
pub use session::{CreateRequest, EngineConfig, HumanAction, PlayError, Session};
pub use store::Store;
