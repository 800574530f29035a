//! Input formats, JSON reports and the bundled example manifest behind the
//! `chatelet` binary.

pub mod input;
pub mod manifest;
pub mod report;
