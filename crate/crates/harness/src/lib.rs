//! Command-line plumbing for `detcount`: sweep configuration, the
//! JSON-lines result cache, reports and CSV export.

pub mod cache;
pub mod commands;
pub mod compute;
pub mod config;
pub mod error;
pub mod export;
pub mod record;

pub use error::{HarnessError, Result};

/// Exit status for a run that completed but failed its checks.
pub const EXIT_FAILED: u8 = 1;
/// Exit status for usage, configuration and input errors.
pub const EXIT_USAGE: u8 = 2;
