pub mod complex;
pub mod fp;
pub mod higcn;
pub mod iso;
pub mod nullmodel;
pub mod error;
pub mod par;
pub mod sparse;
pub mod tasks;
pub mod synth;

pub use error::{Error, Result};
