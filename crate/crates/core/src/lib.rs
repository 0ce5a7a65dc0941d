pub mod colored;
pub mod error;
pub mod filtration;
pub mod free;
pub mod group_actions;
pub mod kan;
pub mod omega;
pub mod presheaf;
pub mod skeleton;
pub mod tree;

pub use error::{Error, Result};
