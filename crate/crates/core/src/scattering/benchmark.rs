//! Convergence sweeps of the collocation solver against closed-form fields.

use std::sync::Arc;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::kernels::{ChiralMedium, SpacePoint};
use crate::scattering::mfs::{self, BoundaryData, BoundaryKind, ChiralPointSource, Dipole, DomainSide, ExactField, MfsProblem, MfsSolution};
use crate::scattering::surface::{evaluation_grid, Ellipsoid, SurfaceSample};
use crate::vec3::{self, Point3};

/// Geometry and sampling shared by every run of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSetup {
    pub surface: Ellipsoid,
    pub source_scale: f64,
    pub side: DomainSide,
    pub boundary_kind: BoundaryKind,
    pub oversampling: f64,
    /// Scale of the ellipsoid carrying the field-error evaluation points.
    pub eval_scale: f64,
    pub eval_grid: (usize, usize),
    /// `(η, ν)` counts of the boundary check points on the surface itself.
    pub boundary_grid: (usize, usize),
}

impl Default for SweepSetup {
    fn default() -> Self {
        Self {
            surface: Ellipsoid { a: 5.0, b: 3.0, c: 2.0 },
            source_scale: 0.15,
            side: DomainSide::Exterior,
            boundary_kind: BoundaryKind::PerfectConductor,
            oversampling: 1.0,
            eval_scale: 5.0,
            eval_grid: (24, 12),
            boundary_grid: (24, 12),
        }
    }
}

/// Default benchmark sweep.
pub const BENCHMARK_N: [usize; 6] = [10, 15, 20, 25, 30, 35];

/// One row of a convergence report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub err_e: f64,
    pub err_h: f64,
    pub cond: f64,
    /// Largest scalar-part magnitude at the collocation points.
    pub sc_leak: f64,
    /// Largest boundary-condition residual at the boundary check points.
    pub boundary_err: f64,
    pub wall_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// Largest field modulus of the exact solution on the evaluation surface.
    pub field_scale: f64,
    /// Largest field modulus of the exact solution on the boundary.
    pub boundary_scale: f64,
}

impl ConvergenceReport {
    pub fn row(&self, n: usize) -> Option<&ConvergenceRow> {
        self.rows.iter().find(|r| r.n == n)
    }

    /// Least-squares slope of `log err` against `N`.
    pub fn log_slope(&self, pick: impl Fn(&ConvergenceRow) -> f64) -> f64 {
        let pts: Vec<(f64, f64)> = self.rows.iter().map(|r| (r.n as f64, pick(r).ln())).collect();
        let m = pts.len() as f64;
        let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + p.0, b + p.1));
        let (mx, my) = (sx / m, sy / m);
        let (num, den) = pts.iter().fold((0.0, 0.0), |(a, b), p| (a + (p.0 - mx) * (p.1 - my), b + (p.0 - mx).powi(2)));
        num / den
    }

    /// Constant `K` fitted so that `max(errE, errH) ≤ K · boundary_err` over the sweep,
    /// and the spread `max/min` of the per-row ratios.
    pub fn stability_constant(&self) -> (f64, f64) {
        let ratios: Vec<f64> = self.rows.iter().map(|r| r.err_e.max(r.err_h) / r.boundary_err).collect();
        let max = ratios.iter().cloned().fold(0.0, f64::max);
        let min = ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        (max, max / min)
    }
}

/// Field errors against an exact field over a point set.
pub fn field_errors(sol: &MfsSolution, exact: &dyn ExactField, points: &[SurfaceSample]) -> Result<(f64, f64)> {
    points
        .par_iter()
        .map(|s| -> Result<(f64, f64)> {
            let got = sol.evaluate_fields(SpacePoint(s.pos))?;
            let (e, h) = exact.fields(s.pos)?;
            Ok((vec3::cmax_abs(vec3::csub(got.e, e)), vec3::cmax_abs(vec3::csub(got.h, h))))
        })
        .try_reduce(|| (0.0, 0.0), |a, b| Ok((a.0.max(b.0), a.1.max(b.1))))
}

/// Boundary functional residual `|B(E_N, H_N) - f|` over a point set.
pub fn boundary_error(sol: &MfsSolution, problem: &MfsProblem, points: &[SurfaceSample]) -> Result<f64> {
    points
        .par_iter()
        .map(|s| -> Result<f64> {
            let got = sol.evaluate_fields(SpacePoint(s.pos))?;
            let b = problem.boundary_kind.apply(got.e, got.h, s.normal);
            Ok(vec3::cmax_abs(vec3::csub(b, problem.boundary_value(s)?)))
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}

fn field_scale(exact: &dyn ExactField, points: &[SurfaceSample]) -> Result<f64> {
    points.iter().try_fold(0.0f64, |m, s| {
        let (e, h) = exact.fields(s.pos)?;
        Ok(m.max(vec3::cmax_abs(e)).max(vec3::cmax_abs(h)))
    })
}

/// Solve for each `N` and compare with the exact field.
pub fn run_sweep(setup: &SweepSetup, medium: ChiralMedium, exact: Arc<dyn ExactField>, n_list: &[usize]) -> Result<ConvergenceReport> {
    if n_list.is_empty() {
        return Err(Error::InvalidParameter("empty N list".into()));
    }
    let eval = evaluation_grid(&setup.surface, setup.eval_scale, setup.eval_grid.0, setup.eval_grid.1)?;
    let bpts = evaluation_grid(&setup.surface, 1.0, setup.boundary_grid.0, setup.boundary_grid.1)?;
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let start = Instant::now();
        let problem = MfsProblem {
            surface: setup.surface,
            medium,
            n_sources: n,
            source_scale: setup.source_scale,
            side: setup.side,
            boundary_kind: setup.boundary_kind,
            boundary_data: BoundaryData::Exact(exact.clone()),
            oversampling: setup.oversampling,
        };
        let sol = mfs::solve(&problem)?;
        let (err_e, err_h) = field_errors(&sol, exact.as_ref(), &eval)?;
        let boundary_err = boundary_error(&sol, &problem, &bpts)?;
        let sc_leak = sol.collocation_sc_leak()?;
        let wall_ms = start.elapsed().as_secs_f64() * 1e3;
        log::info!("N = {n}: errE {err_e:.3e}, errH {err_h:.3e}, cond {:.3e}", sol.condition);
        rows.push(ConvergenceRow { n, err_e, err_h, cond: sol.condition, sc_leak, boundary_err, wall_ms });
    }
    Ok(ConvergenceReport {
        rows,
        field_scale: field_scale(exact.as_ref(), &eval)?,
        boundary_scale: field_scale(exact.as_ref(), &bpts)?,
    })
}

/// Magnetic-dipole benchmark at the origin with β = 0.
pub fn run_benchmark(setup: &SweepSetup, alpha: Complex64, moment: Point3, n_list: &[usize]) -> Result<ConvergenceReport> {
    if setup.side != DomainSide::Exterior {
        return Err(Error::InvalidParameter("the dipole benchmark is an exterior problem".into()));
    }
    let medium = ChiralMedium::with_alpha(alpha, 0.0)?;
    run_sweep(setup, medium, Arc::new(Dipole { moment, center: [0.0; 3], alpha }), n_list)
}

/// Default benchmark moment `(1, 1, 1)/√3`.
pub fn default_moment() -> Point3 {
    let s = 1.0 / 3f64.sqrt();
    [s, s, s]
}

/// Manufactured chiral point source used by the self-test. The default sits
/// at the centre of the scatterer, deep inside the auxiliary source surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfTestSource {
    pub center: Point3,
    pub moment_plus: Point3,
    pub moment_minus: Point3,
}

impl Default for SelfTestSource {
    fn default() -> Self {
        Self { center: [0.0; 3], moment_plus: [1.0, 0.5, -0.3], moment_minus: [-0.2, 1.0, 0.4] }
    }
}

/// Result of one chiral self-test solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelfTestResult {
    /// `max(errE, errH)` on the evaluation surface.
    pub far_err: f64,
    pub boundary_err: f64,
    pub row: ConvergenceRow,
}

/// Exterior problem with boundary data from a chiral point source strictly
/// inside the surface.
pub fn chiral_selftest(setup: &SweepSetup, medium: ChiralMedium, source: SelfTestSource, n: usize) -> Result<SelfTestResult> {
    if medium.is_achiral() {
        log::info!("chiral self-test run with beta = 0 reduces to the achiral problem");
    }
    if !(setup.surface.level(source.center) < 1.0) {
        return Err(Error::InvalidParameter("manufactured source must lie strictly inside the surface".into()));
    }
    if !(setup.surface.scaled(setup.source_scale).level(source.center) < 1.0) {
        log::warn!("manufactured source lies outside the auxiliary surface; expect slow convergence");
    }
    let exact = ChiralPointSource { medium, center: source.center, moment_plus: source.moment_plus, moment_minus: source.moment_minus };
    let report = run_sweep(setup, medium, Arc::new(exact), &[n])?;
    let row = report.rows[0];
    Ok(SelfTestResult { far_err: row.err_e.max(row.err_h), boundary_err: row.boundary_err, row })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha() -> Complex64 {
        Complex64::new(1.0, 0.3)
    }

    #[test]
    fn benchmark_trend_is_monotone_and_stable() {
        let report = run_benchmark(&SweepSetup::default(), alpha(), default_moment(), &[10, 20, 30]).unwrap();
        assert!(report.log_slope(|r| r.err_e) < 0.0 && report.log_slope(|r| r.err_h) < 0.0);
        let (k, spread) = report.stability_constant();
        for r in &report.rows {
            assert!(r.err_e.max(r.err_h) <= k * r.boundary_err * (1.0 + 1e-12));
            assert!(r.sc_leak <= 1e-10 * report.boundary_scale, "leak {:e}", r.sc_leak);
        }
        assert!(spread < 100.0, "spread {spread}");
    }

    #[test]
    fn achiral_selftest_matches_dipole_scale() {
        let medium = ChiralMedium::with_alpha(alpha(), 0.0).unwrap();
        let st = chiral_selftest(&SweepSetup::default(), medium, SelfTestSource::default(), 15).unwrap();
        let bench = run_benchmark(&SweepSetup::default(), alpha(), default_moment(), &[15]).unwrap();
        let rel_self = st.far_err / {
            let exact = ChiralPointSource {
                medium,
                center: SelfTestSource::default().center,
                moment_plus: SelfTestSource::default().moment_plus,
                moment_minus: SelfTestSource::default().moment_minus,
            };
            let eval = evaluation_grid(&SweepSetup::default().surface, 5.0, 24, 12).unwrap();
            field_scale(&exact, &eval).unwrap()
        };
        let rel_bench = bench.rows[0].err_e.max(bench.rows[0].err_h) / bench.field_scale;
        assert!(rel_self < 100.0 * rel_bench && rel_bench < 100.0 * rel_self, "{rel_self:e} vs {rel_bench:e}");
    }

    #[test]
    fn selftest_rejects_outside_source() {
        let medium = ChiralMedium::with_alpha(alpha(), 0.1).unwrap();
        let src = SelfTestSource { center: [6.0, 0.0, 0.0], ..SelfTestSource::default() };
        assert!(chiral_selftest(&SweepSetup::default(), medium, src, 10).is_err());
    }
}
