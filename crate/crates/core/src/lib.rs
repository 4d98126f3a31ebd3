//! Presheaf relative pseudomonad over finite categories and an exact checker
//! for its coherence laws.

pub mod error;
pub mod fincat;
pub mod gen;
pub mod checker;
pub mod cli;
pub mod document;
pub mod kan;
pub mod presheaf;
pub mod relmonad;
pub mod multimap;

pub use error::{Error, Result};
