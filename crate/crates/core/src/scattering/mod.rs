//! Method of fundamental solutions for chiral Maxwell problems on ellipsoids.

pub mod benchmark;
pub mod mfs;
pub mod surface;

pub use benchmark::{
    chiral_selftest, default_moment, run_benchmark, run_sweep, ConvergenceReport, ConvergenceRow, SelfTestResult,
    SelfTestSource, SweepSetup, BENCHMARK_N,
};
pub use mfs::{
    assemble_system, chiral_maxwell_residual, solve, AssembledSystem, BoundaryData, BoundaryKind, ChiralPointSource, Dipole, DomainSide,
    ExactField, FieldSample, MfsProblem, MfsSolution,
};
pub use surface::{evaluation_grid, sample_surface, Ellipsoid, SurfaceSample};
