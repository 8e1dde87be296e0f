//! Library side of the `ssg` command-line tool: report assembly, the
//! element-expression parser, and the selftest suite over the bundled
//! corpus.

pub mod commands;
pub mod expr;
pub mod report;
pub mod selftest;

pub use report::Report;
