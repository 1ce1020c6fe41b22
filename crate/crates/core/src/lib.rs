pub mod algebra;
pub mod chiral_time;
pub mod diffops;
pub mod error;
pub mod grid;
pub mod inhomog;
pub mod kernels;
pub mod linalg;
pub mod scattering;
pub mod suites;
pub mod vec3;
pub mod verify;

pub use algebra::Biquaternion;
pub use error::{Error, Result};
pub use num_complex::Complex64;
