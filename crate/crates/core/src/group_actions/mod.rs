//! Group and category actions on operads, the category `Δ↻Ω`, and the
//! Bousfield–Segal and Hall checks for groups.

pub mod bousfield;
pub mod category;
pub mod group;
pub mod operad;

pub use group::FiniteGroup;
