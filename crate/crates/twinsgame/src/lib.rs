//! File formats, experiment persistence and command-line plumbing on top of
//! [`twinsgame_core`].

pub mod bundle;
pub mod config;
pub mod report;
pub mod runner;

pub use bundle::{Bundle, BundleError, BundleMeta};
pub use config::{load_config, parse_config, ConfigError};
pub use runner::{run_to_dir, trial_bundle, RunError};
