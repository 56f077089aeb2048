//! Command-line front end and HTTP session server for the `learnspace`
//! library.

pub mod cli;
pub mod server;
