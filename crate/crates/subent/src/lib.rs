//! File formats, the `subent` command line and the acceptance suite, on top
//! of `subent-core`.

pub mod cli;
pub mod io;
pub mod output;
pub mod scan;
pub mod verify;

pub use cli::run;
