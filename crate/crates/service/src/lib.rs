//! HTTP API and command-line front end for the ginaz rewriter.

pub mod api;
pub mod cli;
pub mod server;
