//! Presentation file format, report rendering, and the `largo` command
//! line application.

pub mod app;
pub mod format;
pub mod report;
