//! Mining coarse-grained refactorings: refactorings that only become
//! visible once several adjacent commits are squashed together.

pub mod analysis;
pub mod cli;
pub mod detect;
pub mod history;
pub mod model;
pub mod par;
pub mod repo;
pub mod report;
pub mod squash;
