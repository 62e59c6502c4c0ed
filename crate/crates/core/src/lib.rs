//! Computing in groups given by finite relative presentations.

pub mod algos;
#[cfg(feature = "cli")]
pub mod cli;
pub mod error;
pub mod filling;
pub mod graph;
pub mod hypcheck;
pub mod paths;
pub mod presentation;
pub mod word;
pub mod zoo;

pub use error::{Error, Result};
pub use presentation::{OmegaSets, RelPresentation, SubgroupSlot};
pub use word::{Letter, Syllable, SyllableKind, Word};
pub use zoo::{build_group, ElementId, Group, GroupConfig, GroupOracle};
