pub mod arith;
pub mod char_sums;
pub mod error;
pub mod gk_ring;
pub mod hypergeom;
pub mod padic_gamma;
pub mod point_count;
pub mod qseries;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
