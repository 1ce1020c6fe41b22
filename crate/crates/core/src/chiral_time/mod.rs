//! Time-dependent chiral Maxwell operator and its Green function.

pub mod bessel;
pub mod green;
pub mod operator;

pub use bessel::{bessel_j, bessel_j0, bessel_j1};
pub use green::{green_function, green_residual_at, GreenIntermediates, SpaceTimePoint};
pub use operator::{apply_m, apply_m_m_star, apply_m_star, maxwell_equivalence_residual, Branch, CircularMode, MaxwellData};
