//! Slow, obviously-correct reference implementations and random input
//! generators shared by the unit, property and acceptance tests. Nothing
//! here depends on `etr-core`.

pub mod fixtures;
pub mod gen;
pub mod oracle;
