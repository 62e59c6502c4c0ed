//! Concrete groups with exact oracles.

mod base;
mod config;
mod oracle;

pub use base::{BaseGroup, BaseKind, CyclicSub};
pub use config::{
    build_group, presets, Group, GroupConfig, GroupOptions, SubgroupParams, SubgroupSpec,
};
pub use oracle::{CosetKey, ElementId, GroupOracle, ZooOracle, DEFAULT_VERTEX_CAP};
