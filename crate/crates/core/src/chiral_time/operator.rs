//! The time-dependent chiral Maxwell operator `M = βs∂_t D + s∂_t - iD`,
//! `s = √(εμ)`, its conjugate `M*`, and residuals of the Maxwell system.

use num_complex::Complex64;

use crate::algebra::Biquaternion;
use crate::diffops::apply_d;
use crate::error::{Error, Result};
use crate::grid::{Lattice, SpaceTimeGrid};
use crate::kernels::ChiralMedium;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative continuity violation above which a warning is logged.
pub const CONTINUITY_WARNING: f64 = 1e-6;

/// `D` applied slice by slice on the valid time range.
pub fn spatial_dirac(field: &SpaceTimeGrid) -> Result<SpaceTimeGrid> {
    let valid = field.valid_times();
    let slices = field
        .slices()
        .iter()
        .enumerate()
        .map(|(n, s)| if valid.contains(&n) { apply_d(s) } else { Ok(s.clone()) })
        .collect::<Result<Vec<_>>>()?;
    SpaceTimeGrid::from_slices(field.t0(), field.ht(), field.time_margin(), slices)
}

fn apply_signed(field: &SpaceTimeGrid, medium: &ChiralMedium, sign: f64) -> Result<SpaceTimeGrid> {
    let s = medium.sqrt_eps_mu();
    let d = spatial_dirac(field)?;
    let dt = field.time_derivative()?;
    let dtd = d.time_derivative()?;
    let beta_s = medium.beta * s;
    let partial = dtd.zip_with(&dt, |a, b| a * beta_s + b * s)?;
    partial.zip_with(&d, |p, dv| p - dv * (I * sign))
}

/// `M V`; for `β = 0` this is `s∂_t V - iDV`.
pub fn apply_m(field: &SpaceTimeGrid, medium: &ChiralMedium) -> Result<SpaceTimeGrid> {
    apply_signed(field, medium, 1.0)
}

/// `M* V = βs∂_t DV + s∂_t V + iDV`.
pub fn apply_m_star(field: &SpaceTimeGrid, medium: &ChiralMedium) -> Result<SpaceTimeGrid> {
    apply_signed(field, medium, -1.0)
}

/// `M M* U`.
pub fn apply_m_m_star(field: &SpaceTimeGrid, medium: &ChiralMedium) -> Result<SpaceTimeGrid> {
    apply_m(&apply_m_star(field, medium)?, medium)
}

/// Real circularly polarized plane mode along `x3` of the sourceless chiral
/// Maxwell system at frequency `omega`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularMode {
    pub medium: ChiralMedium,
    pub omega: f64,
    /// Wavenumber; `-α1` or `α2` for a real medium.
    pub kappa: f64,
    /// `H = h_scale · Ẽ`.
    pub h_scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// `κ = -α1`
    First,
    /// `κ = α2`
    Second,
}

impl CircularMode {
    pub fn new(eps: f64, mu: f64, beta: f64, omega: f64, branch: Branch) -> Result<Self> {
        let medium = ChiralMedium::new(eps, mu, beta, omega)?;
        let kappa = match branch {
            Branch::First => -medium.alpha1.re,
            Branch::Second => medium.alpha2.re,
        };
        let h_scale = kappa / (mu * omega * (1.0 + beta * kappa));
        Ok(Self { medium, omega, kappa, h_scale })
    }

    fn phase(&self, t: f64, x: [f64; 3]) -> f64 {
        self.kappa * x[2] - self.omega * t
    }

    /// `E = (cos φ, -sin φ, 0)`, `φ = κ x3 - ω t`.
    pub fn e(&self, t: f64, x: [f64; 3]) -> [f64; 3] {
        let (s, c) = self.phase(t, x).sin_cos();
        [c, -s, 0.0]
    }

    pub fn h(&self, t: f64, x: [f64; 3]) -> [f64; 3] {
        let (s, c) = self.phase(t, x).sin_cos();
        [self.h_scale * s, self.h_scale * c, 0.0]
    }

    /// `V = E - i√(μ/ε) H`.
    pub fn v(&self, t: f64, x: [f64; 3]) -> Biquaternion {
        let w = (self.medium.mu / self.medium.eps).sqrt();
        let e = self.e(t, x);
        let h = self.h(t, x);
        Biquaternion::vector([0, 1, 2].map(|k| Complex64::new(e[k], -w * h[k])))
    }
}

/// Fields and sources of a time-dependent Maxwell problem on a common grid.
/// `e`, `h`, `j` are purely vectorial; `rho` is carried in the scalar part.
#[derive(Debug, Clone, PartialEq)]
pub struct MaxwellData {
    pub e: SpaceTimeGrid,
    pub h: SpaceTimeGrid,
    pub rho: SpaceTimeGrid,
    pub j: SpaceTimeGrid,
}

impl MaxwellData {
    /// Samples of closed-form fields; `rho` and `j` vanish.
    pub fn sourceless<FE, FH>(lattice: Lattice, t0: f64, ht: f64, nt: usize, e: FE, h: FH) -> Result<Self>
    where
        FE: Fn(f64, [f64; 3]) -> [f64; 3] + Sync,
        FH: Fn(f64, [f64; 3]) -> [f64; 3] + Sync,
    {
        let e = SpaceTimeGrid::from_fn(lattice, t0, ht, nt, |t, x| Biquaternion::from_real_vector(e(t, x)))?;
        let h = SpaceTimeGrid::from_fn(lattice, t0, ht, nt, |t, x| Biquaternion::from_real_vector(h(t, x)))?;
        let zero = e.map(|_| Biquaternion::ZERO);
        Ok(Self { e, h, rho: zero.clone(), j: zero })
    }
}

fn vector_of(g: &SpaceTimeGrid) -> SpaceTimeGrid {
    g.map(|q| q.vec())
}

/// Residuals of the quaternionic equation
/// `MV = -√(μ/ε) j - β√(μ/ε) ∂_t ρ + iρ/ε`, `V = E - i√(μ/ε) H`,
/// and of the component system (both curl equations and both divergence
/// equations), as maximum interior norms.
pub fn maxwell_equivalence_residual(data: &MaxwellData, medium: &ChiralMedium) -> Result<(f64, f64)> {
    let (eps, mu, beta) = (medium.eps, medium.mu, medium.beta);
    let w = (mu / eps).sqrt();
    let grids = [&data.h, &data.rho, &data.j];
    if grids.iter().any(|g| g.lattice() != data.e.lattice() || g.nt() != data.e.nt()) {
        return Err(Error::LatticeMismatch);
    }
    check_continuity(data)?;

    let v = vector_of(&data.e).zip_with(&vector_of(&data.h), |e, h| e - h * (I * w))?;
    let mv = apply_m(&v, medium)?;
    let rho = data.rho.map(|q| Biquaternion::scalar(q.s));
    let dt_rho = rho.time_derivative()?;
    let rhs = vector_of(&data.j)
        .zip_with(&dt_rho, |j, dr| -(j * w) - dr * (beta * w))?
        .zip_with(&rho, |acc, r| acc + r * (I / eps))?;
    let quaternionic = mv.zip_with(&rhs, |a, b| a - b)?.max_norm();

    // component system: D U = -div U + rot U for purely vectorial U
    let de = spatial_dirac(&vector_of(&data.e))?;
    let dh = spatial_dirac(&vector_of(&data.h))?;
    let dt_e = vector_of(&data.e).time_derivative()?;
    let dt_h = vector_of(&data.h).time_derivative()?;
    let dt_rot_e = de.map(|q| q.vec()).time_derivative()?;
    let dt_rot_h = dh.map(|q| q.vec()).time_derivative()?;
    // rot H - ε(∂_t E + β∂_t rot E) - j
    let max1 = dh
        .map(|q| q.vec())
        .zip_with(&dt_e, |r, d| r - d * eps)?
        .zip_with(&dt_rot_e, |acc, d| acc - d * (eps * beta))?
        .zip_with(&vector_of(&data.j), |acc, j| acc - j)?;
    // rot E + μ(∂_t H + β∂_t rot H)
    let max2 = de
        .map(|q| q.vec())
        .zip_with(&dt_h, |r, d| r + d * mu)?
        .zip_with(&dt_rot_h, |acc, d| acc + d * (mu * beta))?;
    // div E - ρ/ε, div H (div = -Sc D)
    let max3 = de.zip_with(&rho, |d, r| Biquaternion::scalar(-d.s) - r / eps)?.zip_with(&dh, |a, d| {
        Biquaternion::new(a.s, [-d.s, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)])
    })?;
    let component = max1.max_norm().max(max2.max_norm()).max(max3.max_norm());
    Ok((quaternionic, component))
}

/// Logs a warning when `∂_t ρ + div j` is not small relative to the data.
fn check_continuity(data: &MaxwellData) -> Result<()> {
    let rho = data.rho.map(|q| Biquaternion::scalar(q.s));
    let j = vector_of(&data.j);
    let scale = rho.max_norm().max(j.max_norm());
    if scale == 0.0 {
        return Ok(());
    }
    let dj = spatial_dirac(&j)?;
    let violation = rho.time_derivative()?.zip_with(&dj, |dr, d| Biquaternion::scalar(dr.s - d.s))?.max_norm();
    if violation > CONTINUITY_WARNING * scale {
        log::warn!("continuity equation violated by {violation:.3e} (data scale {scale:.3e})");
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::Refinement;

    fn lattice(h: f64) -> Lattice {
        Lattice::cube([0.1, 0.2, 0.3], 8.0 * h, h).unwrap()
    }

    fn sample(mode: &CircularMode, h: f64) -> SpaceTimeGrid {
        SpaceTimeGrid::from_fn(lattice(h), 0.4, h, 7, |t, x| mode.v(t, x)).unwrap()
    }

    #[test]
    fn constant_field_is_annihilated_for_beta_zero() {
        let medium = ChiralMedium::time_domain(1.0, 1.0, 0.0).unwrap();
        let g = SpaceTimeGrid::from_fn(lattice(0.1), 0.0, 0.1, 5, |_, _| Biquaternion::I2 + Biquaternion::ONE).unwrap();
        assert_eq!(apply_m(&g, &medium).unwrap().max_norm(), 0.0);
    }

    #[test]
    fn circular_modes_solve_m() {
        for branch in [Branch::First, Branch::Second] {
            let mode = CircularMode::new(2.0, 1.5, 0.2, 1.3, branch).unwrap();
            let r = Refinement::new(
                apply_m(&sample(&mode, 0.04), &mode.medium).unwrap().max_norm(),
                apply_m(&sample(&mode, 0.02), &mode.medium).unwrap().max_norm(),
            );
            assert!(r.is_second_order(), "{branch:?} ratio {}", r.ratio());
        }
    }

    #[test]
    fn mm_star_annihilates_wave_solutions() {
        // β = 0 plane wave with εμ ω² = |k|²
        let medium = ChiralMedium::time_domain(2.0, 0.5, 0.0).unwrap();
        let k = [0.6, 0.0, 0.8];
        let wave = |h: f64| {
            SpaceTimeGrid::from_fn(lattice(h), 0.0, h, 9, move |t, x| {
                let ph = Complex64::new(0.0, 1.0) * (t - (k[0] * x[0] + k[1] * x[1] + k[2] * x[2]));
                Biquaternion::new(ph.exp(), [Complex64::new(0.5, 0.0) * ph.exp(), Complex64::new(0.0, 0.0), ph.exp()])
            })
            .unwrap()
        };
        let r = Refinement::new(
            apply_m_m_star(&wave(0.04), &medium).unwrap().max_norm(),
            apply_m_m_star(&wave(0.02), &medium).unwrap().max_norm(),
        );
        assert!(r.is_second_order(), "ratio {}", r.ratio());
        // chiral mode: E solves the homogeneous fourth-order equation
        let mode = CircularMode::new(1.0, 1.0, 0.3, 1.1, Branch::Second).unwrap();
        let e = |h: f64| {
            SpaceTimeGrid::from_fn(lattice(h), 0.0, h, 9, |t, x| Biquaternion::from_real_vector(mode.e(t, x))).unwrap()
        };
        let r = Refinement::new(
            apply_m_m_star(&e(0.04), &mode.medium).unwrap().max_norm(),
            apply_m_m_star(&e(0.02), &mode.medium).unwrap().max_norm(),
        );
        assert!(r.is_second_order(), "ratio {}", r.ratio());
    }

    fn mode_data(mode: &CircularMode, h: f64) -> MaxwellData {
        MaxwellData::sourceless(lattice(h), 0.4, h, 7, |t, x| mode.e(t, x), |t, x| mode.h(t, x)).unwrap()
    }

    #[test]
    fn circular_mode_solves_both_forms() {
        let mode = CircularMode::new(1.0, 1.0, 0.25, 1.0, Branch::First).unwrap();
        let (q1, c1) = maxwell_equivalence_residual(&mode_data(&mode, 0.04), &mode.medium).unwrap();
        let (q2, c2) = maxwell_equivalence_residual(&mode_data(&mode, 0.02), &mode.medium).unwrap();
        assert!(Refinement::new(q1, q2).is_second_order(), "{q1:e} {q2:e}");
        assert!(Refinement::new(c1, c2).is_second_order(), "{c1:e} {c2:e}");
    }

    #[test]
    fn zero_data_gives_zero_residuals() {
        let medium = ChiralMedium::time_domain(1.0, 1.0, 0.5).unwrap();
        let d = MaxwellData::sourceless(lattice(0.1), 0.0, 0.1, 5, |_, _| [0.0; 3], |_, _| [0.0; 3]).unwrap();
        assert_eq!(maxwell_equivalence_residual(&d, &medium).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn gradient_perturbation_is_detected_by_both() {
        let mode = CircularMode::new(1.0, 1.0, 0.25, 1.0, Branch::First).unwrap();
        let exact = maxwell_equivalence_residual(&mode_data(&mode, 0.04), &mode.medium).unwrap();
        let bad = MaxwellData::sourceless(
            lattice(0.04),
            0.4,
            0.04,
            7,
            |t, x| mode.e(t, x),
            // H + grad(x1² + x2 x3)
            |t, x| {
                let h = mode.h(t, x);
                [h[0] + 2.0 * x[0], h[1] + x[2], h[2] + x[1]]
            },
        )
        .unwrap();
        let (q, c) = maxwell_equivalence_residual(&bad, &mode.medium).unwrap();
        assert!(q > 10.0 * exact.0 && c > 10.0 * exact.1, "{q:e} {c:e} vs {exact:?}");
    }

    #[test]
    fn short_time_axis_is_rejected() {
        let medium = ChiralMedium::time_domain(1.0, 1.0, 0.5).unwrap();
        let g = SpaceTimeGrid::from_fn(lattice(0.1), 0.0, 0.1, 2, |_, _| Biquaternion::ONE).unwrap();
        assert!(matches!(apply_m(&g, &medium), Err(Error::GridTooSmall { .. })));
    }
}
