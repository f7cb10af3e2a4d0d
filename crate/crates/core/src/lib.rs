pub mod augmentation;
pub mod cobordism;
pub mod dga;
pub mod error;
pub mod front;
pub mod gf2;
pub mod grid;
pub mod lagrangian;
pub mod lp;
pub mod report;
pub mod spin;

pub use error::{Error, Result};
