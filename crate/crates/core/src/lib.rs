pub mod bench;
pub mod error;
pub mod extract;
pub mod ipm;
pub mod moment;
pub mod par;
pub mod pipeline;
pub mod poly;
pub mod sdp;
pub mod structure;

pub use error::{Error, Result};
