//! Scenario parsing, CSV/SVG output and the verification suite backing the
//! `dwvm` command-line tool.

pub mod csvio;
pub mod scenario;
pub mod svg;
pub mod verify;
