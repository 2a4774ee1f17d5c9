pub mod bench;
pub mod cli;
pub mod closure;
pub mod contact;
pub mod error;
pub mod grasp;
pub mod hull;
pub mod rigid;
pub mod synthesis;

pub use error::{Error, Result};
