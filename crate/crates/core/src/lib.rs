pub mod dielectric;
pub mod error;
pub mod lifshitz;
pub mod modes;
pub mod numerics;
pub mod planar;
pub mod polder;

pub use error::{Error, Result};
pub use num_complex::Complex64;
