pub mod catalog;
pub mod classify;
pub mod deform;
pub mod error;
pub mod exact;
pub mod gradation;
pub mod par;
pub mod superalg;

pub use error::{Error, Result};
