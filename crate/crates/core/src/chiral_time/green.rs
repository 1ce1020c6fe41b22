//! Closed-form causal Green function of the operator `M`.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::algebra::Biquaternion;
use crate::chiral_time::bessel::{bessel_j0, bessel_j1};
use crate::chiral_time::operator::apply_m;
use crate::error::{Error, Result};
use crate::grid::{Lattice, SpaceTimeGrid};
use crate::kernels::{self, ChiralMedium, Sign, SpacePoint};
use crate::vec3;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A point `(t, x)` of space-time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpaceTimePoint {
    pub t: f64,
    pub x: SpacePoint,
}

impl SpaceTimePoint {
    pub fn new(t: f64, x: [f64; 3]) -> Self {
        Self { t, x: SpacePoint(x) }
    }
}

fn check_medium(medium: &ChiralMedium) -> Result<()> {
    if medium.beta == 0.0 {
        return Err(Error::AchiralUnsupported);
    }
    Ok(())
}

/// `(i₀ - i x/|x|)` as a biquaternion.
fn one_minus_i_xhat(x: SpacePoint, r: f64) -> Biquaternion {
    Biquaternion::new(Complex64::new(1.0, 0.0), vec3::cscale(vec3::to_complex(vec3::scale(x.0, 1.0 / r)), -I))
}

/// Time-independent factors of the Green function,
/// `f = H(t) e^{iat} E(x) (-A(x) √(t/c(x)) J1(2√(c(x)t)) + i B(x) J0(2√(c(x)t)))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenIntermediates {
    /// `1/(β√(εμ))`
    pub a: f64,
    /// `|x|/(β²√(εμ))`
    pub c_of_x: f64,
    /// `e^{i|x|/β}/(4π|x|)`
    pub e_of_x: Complex64,
    /// `(i/(β³εμ)) (1 - ix/|x|)`
    pub a_of_x: Biquaternion,
    /// `(i/(β√(εμ))) ((1/β)(1 - ix/|x|) + x/|x|²)`
    pub b_of_x: Biquaternion,
}

impl GreenIntermediates {
    pub fn new(x: SpacePoint, medium: &ChiralMedium) -> Result<Self> {
        check_medium(medium)?;
        let r = x.checked_radius()?;
        let (beta, s) = (medium.beta, medium.sqrt_eps_mu());
        let q = one_minus_i_xhat(x, r);
        let x_over_r2 = Biquaternion::from_real_vector(vec3::scale(x.0, 1.0 / (r * r)));
        Ok(Self {
            a: 1.0 / (beta * s),
            c_of_x: r / (beta * beta * s),
            e_of_x: (I * r / beta).exp() / (4.0 * PI * r),
            a_of_x: q * (I / (beta.powi(3) * s * s)),
            b_of_x: (q * (1.0 / beta) + x_over_r2) * (I / (beta * s)),
        })
    }

    /// Evaluate the Green function at time `t` from the intermediates.
    pub fn evaluate(&self, t: f64) -> Result<Biquaternion> {
        if t < 0.0 {
            return Ok(Biquaternion::ZERO);
        }
        let w = 2.0 * (self.c_of_x * t).sqrt();
        let pre = (I * self.a * t).exp() * self.e_of_x;
        let j1_term = self.a_of_x * (-(t / self.c_of_x).sqrt() * bessel_j1(w)?);
        let j0_term = self.b_of_x * (I * bessel_j0(w)?);
        Ok((j1_term + j0_term) * pre)
    }
}

/// `f(t,x) = H(t) (e^{it/(βs)}/(βs)) [K_{1/β}(x) J0(w) + (iθ_{1/β}(x)/(β s^{1/2})) (1 - ix/|x|) √(t/|x|) J1(w)]`
/// with `s = √(εμ)`, `w = 2√(t|x|)/(β s^{1/2})` and `H(0) = 1`.
pub fn green_function(p: SpaceTimePoint, medium: &ChiralMedium) -> Result<Biquaternion> {
    check_medium(medium)?;
    let r = p.x.checked_radius()?;
    if p.t < 0.0 {
        return Ok(Biquaternion::ZERO);
    }
    let (beta, s) = (medium.beta, medium.sqrt_eps_mu());
    let k = 1.0 / beta;
    let kernel = kernels::fundamental_solution(Complex64::new(k, 0.0), Sign::Plus, p.x)?;
    let theta = kernels::helmholtz_kernel(Complex64::new(k, 0.0), p.x)?;
    let w = 2.0 * (p.t * r).sqrt() / (beta * s.sqrt());
    // J0 is even and J1 odd, so negative β keeps the series argument nonnegative.
    let (j0, j1) = (bessel_j0(w.abs())?, bessel_j1(w.abs())? * w.signum());
    let pre = (I * p.t / (beta * s)).exp() / (beta * s);
    let second = one_minus_i_xhat(p.x, r) * (I * theta / (beta * s.sqrt()) * (p.t / r).sqrt() * j1);
    Ok((kernel * j0 + second) * pre)
}

/// Residual of `M f = 0` at `p` from a `5³ × 5` space-time stencil with
/// spacing `h` in both space and time.
pub fn green_residual_at(p: SpaceTimePoint, medium: &ChiralMedium, h: f64) -> Result<f64> {
    let origin = vec3::sub(p.x.0, [2.0 * h; 3]);
    let lattice = Lattice::new(origin, h, [5, 5, 5])?;
    let grid = SpaceTimeGrid::from_fn(lattice, p.t - 2.0 * h, h, 5, |t, x| {
        green_function(SpaceTimePoint::new(t, x), medium).unwrap_or(Biquaternion::ZERO)
    })?;
    for n in 0..5 {
        for node in grid.slice(n).valid_nodes() {
            green_function(SpaceTimePoint::new(grid.time(n), lattice.point(node)), medium)?;
        }
    }
    let m = apply_m(&grid, medium)?;
    Ok(m.slice(2).get([2, 2, 2]).max_abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::Refinement;

    fn medium(beta: f64, eps: f64, mu: f64) -> ChiralMedium {
        ChiralMedium::time_domain(eps, mu, beta).unwrap()
    }

    #[test]
    fn causal() {
        let m = medium(1.0, 1.0, 1.0);
        for t in [-1.0, -1e-12, -50.0] {
            assert_eq!(green_function(SpaceTimePoint::new(t, [0.3, 0.4, 0.5]), &m).unwrap(), Biquaternion::ZERO);
        }
    }

    #[test]
    fn initial_value_is_kernel() {
        let m = medium(0.7, 2.0, 1.5);
        let x = SpacePoint::new(1.0, 0.2, -0.4);
        let f = green_function(SpaceTimePoint { t: 0.0, x }, &m).unwrap();
        let k = kernels::fundamental_solution(Complex64::new(1.0 / 0.7, 0.0), Sign::Plus, x).unwrap();
        let expect = k / (0.7 * m.sqrt_eps_mu());
        assert!((f - expect).max_abs() < 1e-15);
    }

    #[test]
    fn intermediates_route_agrees() {
        for (beta, eps, mu) in [(1.0, 1.0, 1.0), (0.7, 2.0, 1.5), (-0.6, 1.2, 0.8)] {
            let m = medium(beta, eps, mu);
            for (t, x) in [(0.5, [0.6, 0.5, 0.4]), (2.0, [-1.0, 0.3, 1.2]), (1.3, [0.1, -0.9, 0.2])] {
                let p = SpaceTimePoint::new(t, x);
                let a = green_function(p, &m).unwrap();
                let b = GreenIntermediates::new(p.x, &m).unwrap().evaluate(t).unwrap();
                assert!((a - b).max_abs() <= 1e-13 * a.max_abs(), "beta {beta}: {a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn scalar_part_structure() {
        let m = medium(1.0, 1.0, 1.0);
        let x = SpacePoint::new(0.6, 0.5, 0.4);
        let t = 1.2;
        let r = x.radius();
        let theta = kernels::helmholtz_kernel(Complex64::new(1.0, 0.0), x).unwrap();
        let w = 2.0 * (t * r).sqrt();
        let expect = (I * t).exp() * theta * (bessel_j0(w).unwrap() + I * (t / r).sqrt() * bessel_j1(w).unwrap());
        let f = green_function(SpaceTimePoint { t, x }, &m).unwrap();
        assert!((f.s - expect).norm() < 1e-15);
    }

    #[test]
    fn m_annihilates_green_function() {
        for (beta, eps, mu) in [(1.0, 1.0, 1.0), (0.7, 2.0, 1.5)] {
            let m = medium(beta, eps, mu);
            let p = SpaceTimePoint::new(1.0, [0.6, 0.5, 0.4]);
            let r = Refinement::new(green_residual_at(p, &m, 0.02).unwrap(), green_residual_at(p, &m, 0.01).unwrap());
            assert!(r.is_second_order(), "ratio {}", r.ratio());
        }
    }

    #[test]
    fn rejected_inputs() {
        let m = medium(0.0, 1.0, 1.0);
        assert!(matches!(green_function(SpaceTimePoint::new(1.0, [1.0, 0.0, 0.0]), &m), Err(Error::AchiralUnsupported)));
        let m = medium(1.0, 1.0, 1.0);
        assert!(matches!(green_function(SpaceTimePoint::new(1.0, [0.0; 3]), &m), Err(Error::OriginSingularity { .. })));
    }
}
