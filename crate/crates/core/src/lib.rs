//! Exact Painlevé analysis of coupled evolution systems with commuting and
//! anticommuting fields.

pub mod kernel;
pub mod ring;
pub mod model;
pub mod engine;
pub mod atlas;
pub mod cli;
