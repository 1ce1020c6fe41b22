//! Closed-form kernels: the Helmholtz fundamental solution `θ_α`, the
//! biquaternionic fundamental solutions `K_{±α}` of `D ± α`, the chiral
//! wavenumbers and the magnetic-dipole reference field.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::algebra::Biquaternion;
use crate::error::{Error, Result};
use crate::vec3::{self, CVec3, Point3};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Guard for `|1 ± αβ|` in [`chiral_wavenumbers`].
pub const RESONANCE_TOLERANCE: f64 = 1e-12;

/// A point of R³ at which a kernel centred at the origin is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpacePoint(pub Point3);

impl SpacePoint {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self([x, y, z])
    }

    /// `|x|`, summed in sorted order so that it is exactly invariant under
    /// coordinate permutations.
    pub fn radius(&self) -> f64 {
        let mut sq = self.0.map(|c| c * c);
        sq.sort_by(f64::total_cmp);
        (sq[0] + sq[1] + sq[2]).sqrt()
    }

    pub fn checked_radius(&self) -> Result<f64> {
        let r = self.radius();
        if r > 0.0 && r.is_finite() {
            Ok(r)
        } else {
            Err(Error::OriginSingularity { radius: r })
        }
    }
}

impl From<Point3> for SpacePoint {
    fn from(x: Point3) -> Self {
        Self(x)
    }
}

/// Selects `K_α` (`Plus`) or `K_{-α}` (`Minus`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Homogeneous chiral medium with Drude–Born–Fedorov constitutive relations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiralMedium {
    pub eps: f64,
    pub mu: f64,
    /// Chirality measure (length units).
    pub beta: f64,
    /// Angular frequency, absent when the wavenumber was given directly.
    pub omega: Option<f64>,
    pub alpha: Complex64,
    pub alpha1: Complex64,
    pub alpha2: Complex64,
}

impl ChiralMedium {
    /// Medium from physical constants; `alpha = omega * sqrt(eps mu)`.
    pub fn new(eps: f64, mu: f64, beta: f64, omega: f64) -> Result<Self> {
        if !(eps > 0.0 && mu > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "eps and mu must be positive (eps = {eps}, mu = {mu})"
            )));
        }
        let alpha = Complex64::new(omega * (eps * mu).sqrt(), 0.0);
        let (alpha1, alpha2) = chiral_wavenumbers(alpha, beta)?;
        Ok(Self { eps, mu, beta, omega: Some(omega), alpha, alpha1, alpha2 })
    }

    /// Medium with a prescribed (possibly complex) wavenumber, `eps = mu = 1`.
    pub fn with_alpha(alpha: Complex64, beta: f64) -> Result<Self> {
        let (alpha1, alpha2) = chiral_wavenumbers(alpha, beta)?;
        Ok(Self { eps: 1.0, mu: 1.0, beta, omega: None, alpha, alpha1, alpha2 })
    }

    /// Time-domain medium for the operator `M`; it carries no frequency and
    /// its wavenumbers are zero.
    pub fn time_domain(eps: f64, mu: f64, beta: f64) -> Result<Self> {
        if !(eps > 0.0 && mu > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "eps and mu must be positive (eps = {eps}, mu = {mu})"
            )));
        }
        if !beta.is_finite() {
            return Err(Error::InvalidParameter(format!("beta must be finite, got {beta}")));
        }
        let zero = Complex64::new(0.0, 0.0);
        Ok(Self { eps, mu, beta, omega: None, alpha: zero, alpha1: zero, alpha2: zero })
    }

    pub fn sqrt_eps_mu(&self) -> f64 {
        (self.eps * self.mu).sqrt()
    }

    pub fn is_achiral(&self) -> bool {
        self.beta == 0.0
    }

    /// Both `Im α1 >= 0` and `Im α2 >= 0`, required for decaying exterior kernels.
    pub fn check_admissible(&self) -> Result<()> {
        for alpha in [self.alpha1, self.alpha2] {
            if alpha.im < 0.0 {
                return Err(Error::InadmissibleAlpha { alpha });
            }
        }
        Ok(())
    }
}

/// `(α1, α2) = (α/(1+αβ), α/(1-αβ))`.
pub fn chiral_wavenumbers(alpha: Complex64, beta: f64) -> Result<(Complex64, Complex64)> {
    let plus = 1.0 + alpha * beta;
    let minus = 1.0 - alpha * beta;
    if plus.norm() < RESONANCE_TOLERANCE {
        return Err(Error::ChiralResonance { sign: '+', magnitude: plus.norm() });
    }
    if minus.norm() < RESONANCE_TOLERANCE {
        return Err(Error::ChiralResonance { sign: '-', magnitude: minus.norm() });
    }
    Ok((alpha / plus, alpha / minus))
}

fn check_alpha(alpha: Complex64) -> Result<()> {
    if alpha.im < 0.0 {
        Err(Error::InadmissibleAlpha { alpha })
    } else {
        Ok(())
    }
}

fn theta_at(alpha: Complex64, r: f64) -> Complex64 {
    -(I * alpha * r).exp() / (4.0 * PI * r)
}

/// `θ_α(x) = -exp(iα|x|) / (4π|x|)`.
pub fn helmholtz_kernel(alpha: Complex64, x: SpacePoint) -> Result<Complex64> {
    check_alpha(alpha)?;
    let r = x.checked_radius()?;
    Ok(theta_at(alpha, r))
}

/// `grad θ_α(x) = -(x/|x|² - iα x/|x|) θ_α(x)` as a purely vectorial biquaternion.
pub fn helmholtz_kernel_grad(alpha: Complex64, x: SpacePoint) -> Result<Biquaternion> {
    check_alpha(alpha)?;
    let r = x.checked_radius()?;
    let factor = -(1.0 / (r * r) - I * alpha / r) * theta_at(alpha, r);
    Ok(Biquaternion::vector(vec3::cscale(vec3::to_complex(x.0), factor)))
}

/// Hessian `∂_j ∂_k θ_α(x)`.
pub fn helmholtz_kernel_hessian(alpha: Complex64, x: SpacePoint) -> Result<[CVec3; 3]> {
    check_alpha(alpha)?;
    let r = x.checked_radius()?;
    let th = theta_at(alpha, r);
    let g = I * alpha - 1.0 / r;
    // radial derivatives θ' and θ''
    let d1 = th * g;
    let d2 = th * (g * g + 1.0 / (r * r));
    let xh = vec3::scale(x.0, 1.0 / r);
    let mut hess = [[Complex64::new(0.0, 0.0); 3]; 3];
    for j in 0..3 {
        for k in 0..3 {
            let delta = if j == k { 1.0 } else { 0.0 };
            hess[j][k] = d2 * xh[j] * xh[k] + d1 / r * (delta - xh[j] * xh[k]);
        }
    }
    Ok(hess)
}

/// `K_{±α}(x) = (±α + x/|x|² - iα x/|x|) θ_α(x)`, the fundamental solution of `D ± α`.
///
/// Both signs share `θ_α`; only the scalar part changes sign.
pub fn fundamental_solution(alpha: Complex64, sign: Sign, x: SpacePoint) -> Result<Biquaternion> {
    check_alpha(alpha)?;
    let r = x.checked_radius()?;
    let th = theta_at(alpha, r);
    let radial = (1.0 / (r * r) - I * alpha / r) * th;
    Ok(Biquaternion::new(
        alpha * sign.value() * th,
        vec3::cscale(vec3::to_complex(x.0), radial),
    ))
}

/// Field of a magnetic dipole with moment `c` at the origin:
/// `E = rot(c θ_α) = grad θ_α × c` and `H = -(1/(iα)) rot E`.
///
/// `H` uses the closed form `-(1/(iα)) (Hess θ_α · c + α² c θ_α)`.
pub fn dipole_field(moment: Point3, alpha: Complex64, x: SpacePoint) -> Result<(CVec3, CVec3)> {
    if alpha.norm() == 0.0 {
        return Err(Error::InvalidParameter("dipole field needs alpha != 0".into()));
    }
    let c = vec3::to_complex(moment);
    let grad = helmholtz_kernel_grad(alpha, x)?;
    let e = vec3::ccross(grad.v, c);
    let curl_curl = curl_curl_of_point_source(alpha, moment, x)?;
    let h = vec3::cscale(curl_curl, -1.0 / (I * alpha));
    Ok((e, h))
}

/// `rot rot (c θ_α) = Hess θ_α · c + α² θ_α c` away from the origin.
fn curl_curl_of_point_source(alpha: Complex64, moment: Point3, x: SpacePoint) -> Result<CVec3> {
    let hess = helmholtz_kernel_hessian(alpha, x)?;
    let th = helmholtz_kernel(alpha, x)?;
    let c = vec3::to_complex(moment);
    let mut out = vec3::cscale(c, alpha * alpha * th);
    for j in 0..3 {
        out[j] += vec3::cdot(hess[j], c);
    }
    Ok(out)
}

/// Purely vectorial point-source solution of `(D ± α) φ = 0` away from the origin:
/// `φ = rot rot(c θ_α) ∓ α rot(c θ_α)`, so that `rot φ = ∓α φ` and `div φ = 0`.
pub fn beltrami_field(alpha: Complex64, sign: Sign, moment: Point3, x: SpacePoint) -> Result<CVec3> {
    let curl_curl = curl_curl_of_point_source(alpha, moment, x)?;
    let curl = vec3::ccross(helmholtz_kernel_grad(alpha, x)?.v, vec3::to_complex(moment));
    Ok(vec3::csub(curl_curl, vec3::cscale(curl, alpha * sign.value())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Central-difference partial derivative of a biquaternion field.
    fn partial(f: &dyn Fn(Point3) -> Biquaternion, x: Point3, axis: usize, h: f64) -> Biquaternion {
        let mut xp = x;
        let mut xm = x;
        xp[axis] += h;
        xm[axis] -= h;
        (f(xp) - f(xm)) / (2.0 * h)
    }

    fn dirac_fd(f: &dyn Fn(Point3) -> Biquaternion, x: Point3, h: f64) -> Biquaternion {
        (0..3).map(|k| Biquaternion::basis(k + 1) * partial(f, x, k, h)).sum()
    }

    fn laplacian_fd(f: &dyn Fn(Point3) -> Complex64, x: Point3, h: f64) -> Complex64 {
        let mut acc = -6.0 * f(x);
        for k in 0..3 {
            let mut xp = x;
            let mut xm = x;
            xp[k] += h;
            xm[k] -= h;
            acc += f(xp) + f(xm);
        }
        acc / (h * h)
    }

    #[test]
    fn kernel_values() {
        let th = helmholtz_kernel(c(0.0, 0.0), SpacePoint::new(0.0, 1.0, 0.0)).unwrap();
        assert!((th - c(-1.0 / (4.0 * PI), 0.0)).norm() < 1e-16);
        let th = helmholtz_kernel(c(1.0, 0.0), SpacePoint::new(1.0, 0.0, 0.0)).unwrap();
        assert!((th + I.exp() / (4.0 * PI)).norm() < 1e-16);
        let g = helmholtz_kernel_grad(c(0.0, 0.0), SpacePoint::new(1.0, 0.0, 0.0)).unwrap();
        assert!((g.v[0] - 1.0 / (4.0 * PI)).norm() < 1e-16);
        assert_eq!(g.v[1], c(0.0, 0.0));
    }

    #[test]
    fn kernel_errors() {
        let origin = SpacePoint::new(0.0, 0.0, 0.0);
        assert!(matches!(helmholtz_kernel(c(1.0, 0.0), origin), Err(Error::OriginSingularity { .. })));
        assert!(matches!(
            fundamental_solution(c(1.0, -0.1), Sign::Plus, SpacePoint::new(1.0, 0.0, 0.0)),
            Err(Error::InadmissibleAlpha { .. })
        ));
    }

    #[test]
    fn kernel_depends_on_radius_only() {
        let alpha = c(1.0, 0.3);
        let a = helmholtz_kernel(alpha, SpacePoint::new(0.3, -1.2, 2.0)).unwrap();
        let b = helmholtz_kernel(alpha, SpacePoint::new(2.0, 0.3, -1.2)).unwrap();
        let d = helmholtz_kernel(alpha, SpacePoint::new(-1.2, 2.0, 0.3)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a, d);
    }

    #[test]
    fn helmholtz_residual_is_second_order() {
        let alpha = c(1.0, 0.3);
        let f = |x: Point3| helmholtz_kernel(alpha, x.into()).unwrap();
        let x = [1.0, 1.0, 1.0];
        let res = |h: f64| (laplacian_fd(&f, x, h) + alpha * alpha * f(x)).norm();
        let ratio = res(0.02) / res(0.01);
        assert!((3.6..4.4).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let alpha = c(1.0, 0.3);
        let x = [0.7, -0.4, 1.1];
        let f = |p: Point3| Biquaternion::scalar(helmholtz_kernel(alpha, p.into()).unwrap());
        let exact = helmholtz_kernel_grad(alpha, x.into()).unwrap();
        let err = |h: f64| {
            let fd = Biquaternion::vector([
                partial(&f, x, 0, h).s,
                partial(&f, x, 1, h).s,
                partial(&f, x, 2, h).s,
            ]);
            (fd - exact).max_abs()
        };
        let ratio = err(0.02) / err(0.01);
        assert!((3.8..4.2).contains(&ratio), "ratio {ratio}");
        let k = fundamental_solution(alpha, Sign::Minus, x.into()).unwrap();
        assert_eq!(k.vec(), -exact);
    }

    #[test]
    fn fundamental_solution_parts() {
        let alpha = c(1.0, 0.3);
        let x = SpacePoint::new(0.5, 0.2, -0.9);
        let th = helmholtz_kernel(alpha, x).unwrap();
        assert!((fundamental_solution(alpha, Sign::Plus, x).unwrap().s - alpha * th).norm() < 1e-16);
        assert!((fundamental_solution(alpha, Sign::Minus, x).unwrap().s + alpha * th).norm() < 1e-16);
        // alpha = 0: purely vectorial Coulomb field x/(4π|x|³)
        let k0 = fundamental_solution(c(0.0, 0.0), Sign::Plus, x).unwrap();
        assert!(k0.is_purely_vectorial());
        let r = x.radius();
        for j in 0..3 {
            assert!((k0.v[j] + x.0[j] / (4.0 * PI * r * r * r)).norm() < 1e-15);
        }
    }

    #[test]
    fn perturbed_dirac_annihilates_kernel() {
        let alpha = c(1.0, 0.3);
        let x = [2.0, 1.0, 0.0];
        for (sign, shift) in [(Sign::Plus, alpha), (Sign::Minus, -alpha)] {
            let k = |p: Point3| fundamental_solution(alpha, sign, p.into()).unwrap();
            let res = |h: f64| (dirac_fd(&k, x, h) + k(x) * shift).max_abs();
            let ratio = res(0.02) / res(0.01);
            assert!((3.8..4.2).contains(&ratio), "{sign:?}: ratio {ratio}");
        }
    }

    #[test]
    fn kernel_is_minus_shifted_dirac_of_theta() {
        // K_{±α} = -(D ∓ α) θ_α
        let alpha = c(0.8, 0.2);
        let x = [0.4, 1.3, -0.6];
        let th = |p: Point3| Biquaternion::scalar(helmholtz_kernel(alpha, p.into()).unwrap());
        for sign in [Sign::Plus, Sign::Minus] {
            let k = fundamental_solution(alpha, sign, x.into()).unwrap();
            let res = |h: f64| {
                let rhs = -(dirac_fd(&th, x, h) - th(x) * alpha * sign.value());
                (rhs - k).max_abs()
            };
            let ratio = res(0.02) / res(0.01);
            assert!((3.8..4.2).contains(&ratio), "ratio {ratio}");
        }
    }

    #[test]
    fn chiral_wavenumber_values() {
        let (a1, a2) = chiral_wavenumbers(c(1.0, 0.3), 0.0).unwrap();
        assert_eq!(a1, c(1.0, 0.3));
        assert_eq!(a2, c(1.0, 0.3));
        assert!(matches!(chiral_wavenumbers(c(2.0, 0.0), 0.5), Err(Error::ChiralResonance { sign: '-', .. })));
        let (a1, a2) = chiral_wavenumbers(c(1.0, 0.0), 0.1).unwrap();
        assert!((a1.re - 1.0 / 1.1).abs() < 1e-15 && a1.im == 0.0);
        assert!((a2.re - 1.0 / 0.9).abs() < 1e-15 && a2.im == 0.0);
    }

    fn curl_fd(f: &dyn Fn(Point3) -> CVec3, x: Point3, h: f64) -> CVec3 {
        let d = |axis: usize| {
            let mut xp = x;
            let mut xm = x;
            xp[axis] += h;
            xm[axis] -= h;
            vec3::cscale(vec3::csub(f(xp), f(xm)), c(0.5 / h, 0.0))
        };
        let (dx, dy, dz) = (d(0), d(1), d(2));
        [dy[2] - dz[1], dz[0] - dx[2], dx[1] - dy[0]]
    }

    #[test]
    fn dipole_satisfies_maxwell() {
        let alpha = c(1.0, 0.3);
        let m = [0.3, -0.5, 0.8];
        let x = [1.2, 0.7, -0.9];
        let e = |p: Point3| dipole_field(m, alpha, p.into()).unwrap().0;
        let hf = |p: Point3| dipole_field(m, alpha, p.into()).unwrap().1;
        let res = |h: f64| {
            let r1 = vec3::cmax_abs(vec3::cadd(curl_fd(&e, x, h), vec3::cscale(hf(x), I * alpha)));
            let r2 = vec3::cmax_abs(vec3::csub(curl_fd(&hf, x, h), vec3::cscale(e(x), I * alpha)));
            r1.max(r2)
        };
        let ratio = res(0.02) / res(0.01);
        assert!((3.8..4.2).contains(&ratio), "ratio {ratio}");
        // divergence of E vanishes
        let div = |h: f64| {
            (0..3)
                .map(|k| {
                    let mut xp = x;
                    let mut xm = x;
                    xp[k] += h;
                    xm[k] -= h;
                    (e(xp)[k] - e(xm)[k]) / (2.0 * h)
                })
                .sum::<Complex64>()
                .norm()
        };
        assert!(div(0.01) < 1e-5);
        let (e0, h0) = dipole_field([0.0; 3], alpha, x.into()).unwrap();
        assert_eq!(vec3::cmax_abs(e0), 0.0);
        assert_eq!(vec3::cmax_abs(h0), 0.0);
    }

    #[test]
    fn silver_muller_along_ray() {
        let alpha = c(1.0, 0.0);
        let m = [1.0 / 3f64.sqrt(); 3];
        let dir = vec3::normalize([0.3, -0.5, 0.8]);
        let mut last = f64::INFINITY;
        for r in [10.0, 100.0, 1000.0] {
            let x = vec3::scale(dir, r);
            let (e, h) = dipole_field(m, alpha, x.into()).unwrap();
            let defect = vec3::csub(e, vec3::ccross(vec3::to_complex(dir), h));
            let scaled = vec3::cmax_abs(defect) * r;
            assert!(scaled < last);
            last = scaled;
        }
        assert!(last < 1e-6);
    }

    #[test]
    fn beltrami_fields_are_eigenfields_of_curl() {
        let alpha = c(0.9, 0.25);
        let m = [1.0, 0.5, -0.3];
        let x = [0.8, -1.1, 0.6];
        for sign in [Sign::Plus, Sign::Minus] {
            let f = |p: Point3| beltrami_field(alpha, sign, m, p.into()).unwrap();
            let res = |h: f64| {
                vec3::cmax_abs(vec3::cadd(curl_fd(&f, x, h), vec3::cscale(f(x), alpha * sign.value())))
            };
            let ratio = res(0.02) / res(0.01);
            assert!((3.8..4.2).contains(&ratio), "ratio {ratio}");
        }
    }
}
