pub mod format;
pub mod manifest;
pub mod meta;
pub mod stats;
