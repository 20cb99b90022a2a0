pub mod baseline;
pub mod bounds;
pub mod encoding;
pub mod error;
pub mod exec;
pub mod field;
pub mod generators;
pub mod graph;
pub mod oracle;
pub mod protocol;
pub mod random;
pub mod report;
pub mod units;

pub use error::{Error, Result};
