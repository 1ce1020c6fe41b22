//! Maxwell's equations in an inhomogeneous achiral medium `ε(x)`, `μ(x)` and
//! their single quaternionic form
//! `(c⁻¹∂_t + iD)V - M^{ic⃗}V - M^{iW⃗}V* = -(√μ j + iρ/√ε)`, `V = √ε E + i√μ H`.

use std::sync::Arc;

use num_complex::Complex64;

use crate::algebra::Biquaternion;
use crate::chiral_time::operator::spatial_dirac;
use crate::diffops::gradient;
use crate::error::{Error, Result};
use crate::grid::{Lattice, QuaternionGrid, ScalarGrid, SpaceTimeGrid};
use crate::vec3::Point3;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Step of the fourth-order differences used for manufactured source terms.
pub const FINE_STEP: f64 = 1e-3;

pub type SpaceFn = Arc<dyn Fn(Point3) -> f64 + Send + Sync>;
pub type ScalarFieldFn = Arc<dyn Fn(f64, Point3) -> f64 + Send + Sync>;
pub type VectorFieldFn = Arc<dyn Fn(f64, Point3) -> [f64; 3] + Send + Sync>;

/// Closed-form permittivity and permeability.
#[derive(Clone)]
pub struct AnalyticMedium {
    pub eps: SpaceFn,
    pub mu: SpaceFn,
}

impl std::fmt::Debug for AnalyticMedium {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("AnalyticMedium { .. }")
    }
}

impl AnalyticMedium {
    pub fn new(eps: impl Fn(Point3) -> f64 + Send + Sync + 'static, mu: impl Fn(Point3) -> f64 + Send + Sync + 'static) -> Self {
        Self { eps: Arc::new(eps), mu: Arc::new(mu) }
    }

    pub fn constant(eps: f64, mu: f64) -> Self {
        Self::new(move |_| eps, move |_| mu)
    }

    /// `ε = 1 + 0.3 e^{-|x|²}`, `μ = 1 + 0.1 x1²`.
    pub fn smooth_bump() -> Self {
        Self::new(|x| 1.0 + 0.3 * (-(x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp(), |x| 1.0 + 0.1 * x[0] * x[0])
    }

    pub fn sample(&self, lattice: Lattice) -> (ScalarGrid, ScalarGrid) {
        let (e, m) = (self.eps.clone(), self.mu.clone());
        (
            ScalarGrid::from_fn(lattice, move |x| Complex64::new(e(x), 0.0)),
            ScalarGrid::from_fn(lattice, move |x| Complex64::new(m(x), 0.0)),
        )
    }
}

/// Medium coefficients and their logarithmic gradients on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MediumFields {
    pub eps: ScalarGrid,
    pub mu: ScalarGrid,
    pub sqrt_eps: ScalarGrid,
    pub sqrt_mu: ScalarGrid,
    /// `1/√(εμ)`
    pub c: ScalarGrid,
    /// `√μ/√ε`
    pub w: ScalarGrid,
    /// `grad√c/√c`
    pub cvec: QuaternionGrid,
    /// `grad√W/√W`
    pub wvec: QuaternionGrid,
    /// `grad√ε/√ε`
    pub epsvec: QuaternionGrid,
    /// `grad√μ/√μ`
    pub muvec: QuaternionGrid,
}

fn log_gradient(g: &ScalarGrid) -> Result<QuaternionGrid> {
    gradient(g)?.zip_with(g, |q, v| q / v)
}

/// Positive real values at every node.
fn check_positive(g: &ScalarGrid) -> Result<()> {
    let lat = g.lattice();
    for (idx, v) in g.values().iter().enumerate() {
        if !(v.re > 0.0) || v.im != 0.0 {
            return Err(Error::NonPositiveMedium { index: lat.node(idx) });
        }
    }
    Ok(())
}

impl MediumFields {
    pub fn build(eps: ScalarGrid, mu: ScalarGrid) -> Result<Self> {
        if eps.lattice() != mu.lattice() {
            return Err(Error::LatticeMismatch);
        }
        check_positive(&eps)?;
        check_positive(&mu)?;
        let sqrt_eps = eps.map(|v| v.sqrt());
        let sqrt_mu = mu.map(|v| v.sqrt());
        let c = eps.zip_with(&mu, |e, m| 1.0 / (e * m).sqrt())?;
        let w = sqrt_mu.zip_with(&sqrt_eps, |m, e| m / e)?;
        let fields = Self {
            cvec: log_gradient(&c.map(|v| v.sqrt()))?,
            wvec: log_gradient(&w.map(|v| v.sqrt()))?,
            epsvec: log_gradient(&sqrt_eps)?,
            muvec: log_gradient(&sqrt_mu)?,
            eps,
            mu,
            sqrt_eps,
            sqrt_mu,
            c,
            w,
        };
        let (a, b) = fields.identity_residuals()?;
        log::debug!("medium identities: {a:.3e}, {b:.3e}");
        Ok(fields)
    }

    pub fn from_analytic(medium: &AnalyticMedium, lattice: Lattice) -> Result<Self> {
        let (e, m) = medium.sample(lattice);
        Self::build(e, m)
    }

    pub fn lattice(&self) -> &Lattice {
        self.eps.lattice()
    }

    /// Max residuals of `ε⃗ + μ⃗ = -grad c / c` and `ε⃗ - μ⃗ = -grad W / W`.
    pub fn identity_residuals(&self) -> Result<(f64, f64)> {
        let gc = log_gradient(&self.c)?;
        let gw = log_gradient(&self.w)?;
        let sum = self.epsvec.zip_with(&self.muvec, |a, b| a + b)?.zip_with(&gc, |s, g| s + g)?;
        let diff = self.epsvec.zip_with(&self.muvec, |a, b| a - b)?.zip_with(&gw, |s, g| s + g)?;
        Ok((sum.max_norm(), diff.max_norm()))
    }
}

/// How the source terms of a manufactured state were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Fourth-order differences of the closed-form fields with step [`FINE_STEP`].
    FineDifference,
    /// The grid's own central differences of the sampled fields.
    Grid,
}

/// Electromagnetic fields and sources sampled on a space-time grid.
/// Vector quantities are purely vectorial; `rho` is the scalar part.
#[derive(Debug, Clone, PartialEq)]
pub struct EMState {
    pub e: SpaceTimeGrid,
    pub h: SpaceTimeGrid,
    pub rho: SpaceTimeGrid,
    pub j: SpaceTimeGrid,
    /// `ℰ = √ε E`
    pub cal_e: SpaceTimeGrid,
    /// `ℋ = √μ H`
    pub cal_h: SpaceTimeGrid,
    /// `V = ℰ + iℋ`
    pub v: SpaceTimeGrid,
    pub provenance: Option<Provenance>,
    /// Some field value has a nonzero imaginary part.
    pub complexified: bool,
}

fn scale_slices(g: &SpaceTimeGrid, s: &ScalarGrid) -> Result<SpaceTimeGrid> {
    g.map_slices(|q| q.scale_by(s))
}

fn mult_slices(g: &SpaceTimeGrid, p: &QuaternionGrid) -> Result<SpaceTimeGrid> {
    g.map_slices(|q| q.zip_with(p, |a, b| a * b))
}

impl EMState {
    pub fn new(e: SpaceTimeGrid, h: SpaceTimeGrid, rho: SpaceTimeGrid, j: SpaceTimeGrid, medium: &MediumFields) -> Result<Self> {
        for g in [&e, &h, &rho, &j] {
            if g.lattice() != medium.lattice() || g.nt() != e.nt() {
                return Err(Error::LatticeMismatch);
            }
        }
        let e = e.map(|q| q.vec());
        let h = h.map(|q| q.vec());
        let rho = rho.map(|q| Biquaternion::scalar(q.s));
        let j = j.map(|q| q.vec());
        let complexified = [&e, &h]
            .iter()
            .any(|g| g.slices().iter().any(|s| s.values().iter().any(|q| q.v.iter().any(|c| c.im != 0.0))));
        if complexified {
            log::warn!("complex E or H: outside the real-field hypothesis of the equivalence");
        }
        let cal_e = scale_slices(&e, &medium.sqrt_eps)?;
        let cal_h = scale_slices(&h, &medium.sqrt_mu)?;
        let v = cal_e.zip_with(&cal_h, |a, b| a + b * I)?;
        Ok(Self { e, h, rho, j, cal_e, cal_h, v, provenance: None, complexified })
    }

    pub fn zero(lattice: Lattice, t0: f64, ht: f64, nt: usize, medium: &MediumFields) -> Result<Self> {
        let z = SpaceTimeGrid::from_fn(lattice, t0, ht, nt, |_, _| Biquaternion::ZERO)?;
        Self::new(z.clone(), z.clone(), z.clone(), z, medium)
    }
}

/// Fourth-order central difference of `f` at `x` along `axis` (axis 3 is time).
fn fine_derivative<T, F>(f: &F, t: f64, x: Point3, axis: usize, zero: T, comb: impl Fn(T, T, f64) -> T) -> T
where
    F: Fn(f64, Point3) -> T,
    T: Copy,
{
    let d = FINE_STEP;
    let at = |s: f64| {
        if axis == 3 {
            f(t + s * d, x)
        } else {
            let mut y = x;
            y[axis] += s * d;
            f(t, y)
        }
    };
    let acc = comb(zero, at(-2.0), 1.0);
    let acc = comb(acc, at(-1.0), -8.0);
    let acc = comb(acc, at(1.0), 8.0);
    let acc = comb(acc, at(2.0), -1.0);
    comb(zero, acc, 1.0 / (12.0 * d))
}

fn dvec<F: Fn(f64, Point3) -> [f64; 3]>(f: &F, t: f64, x: Point3, axis: usize) -> [f64; 3] {
    fine_derivative(f, t, x, axis, [0.0; 3], |a, b, w| [a[0] + w * b[0], a[1] + w * b[1], a[2] + w * b[2]])
}

fn dscalar<F: Fn(f64, Point3) -> f64>(f: &F, t: f64, x: Point3, axis: usize) -> f64 {
    fine_derivative(f, t, x, axis, 0.0, |a, b, w| a + w * b)
}

fn curl_of<F: Fn(f64, Point3) -> [f64; 3]>(f: &F, t: f64, x: Point3) -> [f64; 3] {
    let (d0, d1, d2) = (dvec(f, t, x, 0), dvec(f, t, x, 1), dvec(f, t, x, 2));
    [d1[2] - d2[1], d2[0] - d0[2], d0[1] - d1[0]]
}

fn div_of<F: Fn(f64, Point3) -> [f64; 3]>(f: &F, t: f64, x: Point3) -> f64 {
    dvec(f, t, x, 0)[0] + dvec(f, t, x, 1)[1] + dvec(f, t, x, 2)[2]
}

/// Exact solution built from potentials: `H = rot A / μ`, `E = -∂_t A + grad φ`,
/// `ρ = div(εE)`, `j = rot H - ε∂_t E`.
#[derive(Clone)]
pub struct ManufacturedSolution {
    pub a: VectorFieldFn,
    pub phi: ScalarFieldFn,
    pub medium: AnalyticMedium,
}

impl std::fmt::Debug for ManufacturedSolution {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("ManufacturedSolution { .. }")
    }
}

impl ManufacturedSolution {
    pub fn new(
        a: impl Fn(f64, Point3) -> [f64; 3] + Send + Sync + 'static,
        phi: impl Fn(f64, Point3) -> f64 + Send + Sync + 'static,
        medium: AnalyticMedium,
    ) -> Self {
        Self { a: Arc::new(a), phi: Arc::new(phi), medium }
    }

    /// A time-harmonic potential pair exciting every component.
    pub fn standard(medium: AnalyticMedium) -> Self {
        Self::new(
            |t, x| [0.3 * (x[1] + 0.5 * t).sin(), 0.2 * x[2] * (t - x[0]).cos(), x[0].sin() * t.cos()],
            |t, x| 0.4 * (x[0] - 0.3 * x[1]).cos() * (0.7 * t).sin() + 0.1 * x[2] * x[2],
            medium,
        )
    }

    pub fn e(&self, t: f64, x: Point3) -> [f64; 3] {
        let a = |t: f64, x: Point3| (self.a)(t, x);
        let p = |t: f64, x: Point3| (self.phi)(t, x);
        let dt = dvec(&a, t, x, 3);
        [0, 1, 2].map(|k| -dt[k] + dscalar(&p, t, x, k))
    }

    pub fn h(&self, t: f64, x: Point3) -> [f64; 3] {
        let a = |t: f64, x: Point3| (self.a)(t, x);
        let mu = (self.medium.mu)(x);
        curl_of(&a, t, x).map(|v| v / mu)
    }

    pub fn rho(&self, t: f64, x: Point3) -> f64 {
        let eps_e = |t: f64, y: Point3| {
            let ep = (self.medium.eps)(y);
            self.e(t, y).map(|v| v * ep)
        };
        div_of(&eps_e, t, x)
    }

    pub fn j(&self, t: f64, x: Point3) -> [f64; 3] {
        let h = |t: f64, y: Point3| self.h(t, y);
        let e = |t: f64, y: Point3| self.e(t, y);
        let rot_h = curl_of(&h, t, x);
        let dt_e = dvec(&e, t, x, 3);
        let eps = (self.medium.eps)(x);
        [0, 1, 2].map(|k| rot_h[k] - eps * dt_e[k])
    }

    /// Sample the state on `nt` time levels.
    pub fn sample(&self, medium: &MediumFields, t0: f64, ht: f64, nt: usize, provenance: Provenance) -> Result<EMState> {
        let lat = *medium.lattice();
        let e = SpaceTimeGrid::from_fn(lat, t0, ht, nt, |t, x| Biquaternion::from_real_vector(self.e(t, x)))?;
        let h = SpaceTimeGrid::from_fn(lat, t0, ht, nt, |t, x| Biquaternion::from_real_vector(self.h(t, x)))?;
        let (rho, j) = match provenance {
            Provenance::FineDifference => (
                SpaceTimeGrid::from_fn(lat, t0, ht, nt, |t, x| Biquaternion::scalar(Complex64::new(self.rho(t, x), 0.0)))?,
                SpaceTimeGrid::from_fn(lat, t0, ht, nt, |t, x| Biquaternion::from_real_vector(self.j(t, x)))?,
            ),
            Provenance::Grid => {
                let div = spatial_dirac(&scale_slices(&e, &medium.eps)?)?.map(|q| Biquaternion::scalar(-q.s));
                let rot_h = spatial_dirac(&h)?.map(|q| q.vec());
                let dt_e = scale_slices(&e.time_derivative()?, &medium.eps)?;
                (div, rot_h.zip_with(&dt_e, |a, b| a - b)?)
            }
        };
        let mut state = EMState::new(e, h, rho, j, medium)?;
        state.provenance = Some(provenance);
        Ok(state)
    }
}

/// Max interior residuals of `rot H = ε∂_t E + j`, `rot E = -μ∂_t H`,
/// `div(εE) = ρ`, `div(μH) = 0`.
pub fn maxwell_residuals(state: &EMState, medium: &MediumFields) -> Result<[f64; 4]> {
    let dh = spatial_dirac(&state.h)?;
    let de = spatial_dirac(&state.e)?;
    let dt_e = scale_slices(&state.e.time_derivative()?, &medium.eps)?;
    let dt_h = scale_slices(&state.h.time_derivative()?, &medium.mu)?;
    let min1 = dh.map(|q| q.vec()).zip_with(&dt_e, |r, d| r - d)?.zip_with(&state.j, |a, j| a - j)?;
    let min2 = de.map(|q| q.vec()).zip_with(&dt_h, |r, d| r + d)?;
    let div_e = spatial_dirac(&scale_slices(&state.e, &medium.eps)?)?;
    let min3 = div_e.zip_with(&state.rho, |d, r| Biquaternion::scalar(-d.s - r.s))?;
    let min4 = spatial_dirac(&scale_slices(&state.h, &medium.mu)?)?.map(|d| Biquaternion::scalar(-d.s));
    Ok([min1.max_norm(), min2.max_norm(), min3.max_norm(), min4.max_norm()])
}

/// Residual of the quaternionic equation with its intermediate forms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuaternionicResidual {
    /// Max norm of LHS - RHS as a biquaternion field.
    pub total: f64,
    /// Max modulus of its scalar part.
    pub scalar: f64,
    /// Max modulus of its vector part.
    pub vector: f64,
    /// `(D + M^{ε⃗})ℰ + c⁻¹∂_tℋ + ρ/√ε`
    pub minq1: f64,
    /// `(D + M^{μ⃗})ℋ - c⁻¹∂_tℰ - √μ j`
    pub minq2: f64,
}

/// The quaternionic residual field `(c⁻¹∂_t + iD)V - M^{ic⃗}V - M^{iW⃗}V* + √μ j + iρ/√ε`.
pub fn quaternionic_residual_field(state: &EMState, medium: &MediumFields) -> Result<SpaceTimeGrid> {
    let inv_c = medium.c.map(|c| 1.0 / c);
    let dt_v = scale_slices(&state.v.time_derivative()?, &inv_c)?;
    let dv = spatial_dirac(&state.v)?;
    let icvec = medium.cvec.map(|q| q * I);
    let iwvec = medium.wvec.map(|q| q * I);
    let mc = mult_slices(&state.v, &icvec)?;
    let mw = mult_slices(&state.v.map(|q| q.complex_conj()), &iwvec)?;
    let sources = scale_slices(&state.j, &medium.sqrt_mu)?
        .zip_with(&scale_slices(&state.rho, &medium.sqrt_eps.map(|s| I / s))?, |a, b| a + b)?;
    dt_v.zip_with(&dv, |a, b| a + b * I)?
        .zip_with(&mc, |a, b| a - b)?
        .zip_with(&mw, |a, b| a - b)?
        .zip_with(&sources, |a, b| a + b)
}

pub fn quaternionic_residual(state: &EMState, medium: &MediumFields) -> Result<QuaternionicResidual> {
    let field = quaternionic_residual_field(state, medium)?;
    let inv_c = medium.c.map(|c| 1.0 / c);
    let dcal_e = spatial_dirac(&state.cal_e)?;
    let dcal_h = spatial_dirac(&state.cal_h)?;
    let dt_cal_e = scale_slices(&state.cal_e.time_derivative()?, &inv_c)?;
    let dt_cal_h = scale_slices(&state.cal_h.time_derivative()?, &inv_c)?;
    let rho_term = scale_slices(&state.rho, &medium.sqrt_eps.map(|s| 1.0 / s))?;
    let j_term = scale_slices(&state.j, &medium.sqrt_mu)?;
    let minq1 = dcal_e
        .zip_with(&mult_slices(&state.cal_e, &medium.epsvec)?, |a, b| a + b)?
        .zip_with(&dt_cal_h, |a, b| a + b)?
        .zip_with(&rho_term, |a, b| a + b)?;
    let minq2 = dcal_h
        .zip_with(&mult_slices(&state.cal_h, &medium.muvec)?, |a, b| a + b)?
        .zip_with(&dt_cal_e, |a, b| a - b)?
        .zip_with(&j_term, |a, b| a - b)?;
    Ok(QuaternionicResidual {
        total: field.max_norm(),
        scalar: field.map(|q| Biquaternion::scalar(q.s)).max_norm(),
        vector: field.map(|q| q.vec()).max_norm(),
        minq1: minq1.max_norm(),
        minq2: minq2.max_norm(),
    })
}

/// Residuals of `(D + M^{ε⃗})ℰ = -ρ/√ε` and `(D + M^{μ⃗})ℋ = √μ j` on the
/// middle time level, time derivatives ignored.
pub fn static_residuals(state: &EMState, medium: &MediumFields) -> Result<(f64, f64)> {
    let n = state.e.nt() / 2;
    let cal_e = state.cal_e.slice(n);
    let cal_h = state.cal_h.slice(n);
    let rho = state.rho.slice(n).scalar_part().zip_with(&medium.sqrt_eps, |r, s| r / s)?;
    let j = state.j.slice(n).scale_by(&medium.sqrt_mu)?;
    let first = crate::diffops::apply_d(cal_e)?
        .zip_with(&cal_e.zip_with(&medium.epsvec, |a, b| a * b)?, |a, b| a + b)?
        .zip_with(&rho, |a, r| a + Biquaternion::scalar(r))?;
    let second = crate::diffops::apply_d(cal_h)?
        .zip_with(&cal_h.zip_with(&medium.muvec, |a, b| a * b)?, |a, b| a + b)?
        .zip_with(&j, |a, b| a - b)?;
    Ok((first.max_norm(), second.max_norm()))
}
