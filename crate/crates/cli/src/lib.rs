//! File formats, reports and the command-line front end for `opaque-core`.

pub mod commands;
pub mod format;
pub mod prop4;
pub mod propositions;
pub mod render;
pub mod report;
