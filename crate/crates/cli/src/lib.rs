//! Manifest-tracked output for the `hyperstab` command-line tool.

pub mod output;
