//! Executable fibrational semantics: finite categories, discrete fibrations,
//! Set-valued functors, and the vocabulary-acquisition procedures built on
//! them.

pub mod collage;
pub mod dot;
pub mod error;
pub mod fibration;
pub mod id;
pub mod json;
pub mod kernel;
pub mod pregroup;
pub mod speaker;

#[cfg(any(test, feature = "testing"))]
pub mod testing;

pub use error::{Error, Result};
pub use id::Id;
