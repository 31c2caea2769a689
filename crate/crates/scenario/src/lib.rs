//! Declarative scenarios for speakers and vocabulary acquisition: loading,
//! execution against an immutable speaker store, assertions, and reports.

pub mod error;
pub mod load;
pub mod model;
pub mod run;

pub use error::{Result, ScenarioError};
pub use load::Source;
pub use run::{explain, export_dot, run, Report, RunOptions, View};
