//! Finite-difference realizations of the Moisil–Teodorescu operator `D`,
//! multiplication operators `M^p`, the axis-path antiderivative `𝒜`, and
//! residuals of the static factorization identities.
//!
//! All derivatives are second-order central differences; each application
//! widens the grid margin by one node and margins are never filled with
//! one-sided stencils. Residual norms are the maximum componentwise modulus
//! over the valid interior.

use num_complex::Complex64;

use crate::algebra::Biquaternion;
use crate::error::{Error, Result};
use crate::grid::{GridValue, QuaternionGrid, ScalarGrid};

/// Minimum admissible `|f|` for division by a particular solution.
pub const VANISHING_F_TOLERANCE: f64 = 1e-8;

/// `grad g` as a purely vectorial field.
pub fn gradient(g: &ScalarGrid) -> Result<QuaternionGrid> {
    vector_from_components([g.partial(0)?, g.partial(1)?, g.partial(2)?])
}

/// `div f⃗` of the vector part.
pub fn divergence(f: &QuaternionGrid) -> Result<ScalarGrid> {
    let mut acc: Option<ScalarGrid> = None;
    for k in 0..3 {
        let d = f.component(k + 1).partial(k)?;
        acc = Some(match acc {
            None => d,
            Some(a) => (&a + &d)?,
        });
    }
    Ok(acc.expect("three axes"))
}

/// `rot f⃗` of the vector part.
pub fn curl(f: &QuaternionGrid) -> Result<QuaternionGrid> {
    let d = |comp: usize, axis: usize| f.component(comp).partial(axis);
    let c1 = (&d(3, 1)? - &d(2, 2)?)?;
    let c2 = (&d(1, 2)? - &d(3, 0)?)?;
    let c3 = (&d(2, 0)? - &d(1, 1)?)?;
    vector_from_components([c1, c2, c3])
}

/// `D f = Σ i_k ∂_k f`, i.e. `Sc(Df) = -div f⃗`, `Vec(Df) = grad f0 + rot f⃗`.
pub fn apply_d(f: &QuaternionGrid) -> Result<QuaternionGrid> {
    let mut acc: Option<QuaternionGrid> = None;
    for k in 0..3 {
        let unit = Biquaternion::basis(k + 1);
        let d = f.partial(k)?.map(|q| unit * q);
        acc = Some(match acc {
            None => d,
            Some(a) => (&a + &d)?,
        });
    }
    Ok(acc.expect("three axes"))
}

/// `D_α f = D f + α f`.
pub fn apply_d_alpha(f: &QuaternionGrid, alpha: Complex64) -> Result<QuaternionGrid> {
    apply_d(f)?.zip_with(f, |d, v| d + v * alpha)
}

/// Multiplier of a [`MultiplicationOperator`].
#[derive(Debug, Clone, Copy)]
pub enum Multiplier<'a> {
    Constant(Biquaternion),
    Field(&'a QuaternionGrid),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `^pM f = p f`
    Left,
    /// `M^p f = f p`
    Right,
}

/// Pointwise quaternionic multiplication by a fixed biquaternion or field.
#[derive(Debug, Clone, Copy)]
pub struct MultiplicationOperator<'a> {
    pub multiplier: Multiplier<'a>,
    pub side: Side,
}

/// `M^p`: multiplication from the right.
pub fn right_mult(p: Multiplier<'_>) -> MultiplicationOperator<'_> {
    MultiplicationOperator { multiplier: p, side: Side::Right }
}

/// `^pM`: multiplication from the left.
pub fn left_mult(p: Multiplier<'_>) -> MultiplicationOperator<'_> {
    MultiplicationOperator { multiplier: p, side: Side::Left }
}

impl MultiplicationOperator<'_> {
    pub fn apply(&self, f: &QuaternionGrid) -> Result<QuaternionGrid> {
        let side = self.side;
        let product = move |v: Biquaternion, p: Biquaternion| match side {
            Side::Left => p * v,
            Side::Right => v * p,
        };
        match self.multiplier {
            Multiplier::Constant(p) => Ok(f.map(move |v| product(v, p))),
            Multiplier::Field(p) => f.zip_with(p, product),
        }
    }
}

/// Scalar coefficients of the conductivity equation `(div p grad + q) u = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Conductivity {
    pub p: ScalarGrid,
    pub q: ScalarGrid,
    pub u0: ScalarGrid,
}

/// A nonvanishing particular solution `f` of `(-Δ + ν) f = 0` with the
/// derived potential `ν = Δf/f` and logarithmic gradient `Df/f`.
#[derive(Debug, Clone, PartialEq)]
pub struct PotentialSlot {
    f: ScalarGrid,
    nu: ScalarGrid,
    log_grad: QuaternionGrid,
    conductivity: Option<Conductivity>,
}

impl PotentialSlot {
    /// Slot for the Schrödinger case; `ν` is computed on the grid.
    pub fn from_particular_solution(f: ScalarGrid) -> Result<Self> {
        let min = f.min_norm();
        if !(min >= VANISHING_F_TOLERANCE) {
            return Err(Error::VanishingF { min });
        }
        let nu = f.laplacian()?.zip_with(&f, |l, v| l / v)?;
        let log_grad = gradient(&f)?.zip_with(&f, |g, v| g / v)?;
        Ok(Self { f, nu, log_grad, conductivity: None })
    }

    /// Slot for the conductivity case, `f = p^{1/2} u0`.
    pub fn from_conductivity(p: ScalarGrid, q: ScalarGrid, u0: ScalarGrid) -> Result<Self> {
        if p.lattice() != q.lattice() || p.lattice() != u0.lattice() {
            return Err(Error::LatticeMismatch);
        }
        let pmin = p.min_norm();
        if !(pmin >= VANISHING_F_TOLERANCE) {
            return Err(Error::VanishingF { min: pmin });
        }
        let f = p.zip_with(&u0, |pv, u| pv.sqrt() * u)?;
        let mut slot = Self::from_particular_solution(f)?;
        slot.conductivity = Some(Conductivity { p, q, u0 });
        Ok(slot)
    }

    pub fn f(&self) -> &ScalarGrid {
        &self.f
    }

    /// `ν = Δf/f`.
    pub fn nu(&self) -> &ScalarGrid {
        &self.nu
    }

    /// `Df/f = grad f / f`.
    pub fn log_gradient(&self) -> &QuaternionGrid {
        &self.log_grad
    }

    pub fn conductivity(&self) -> Option<&Conductivity> {
        self.conductivity.as_ref()
    }

    fn check_lattice<T: GridValue>(&self, g: &crate::grid::Grid<T>) -> Result<()> {
        if g.lattice() != self.f.lattice() {
            Err(Error::LatticeMismatch)
        } else {
            Ok(())
        }
    }

    /// `(D + σ M^{Df/f}) w` with `σ = ±1`.
    fn shifted_dirac(&self, w: &QuaternionGrid, sigma: f64) -> Result<QuaternionGrid> {
        let m = right_mult(Multiplier::Field(&self.log_grad)).apply(w)?;
        apply_d(w)?.zip_with(&m, |d, p| d + p * sigma)
    }
}

/// `Δg` via the compact seven-point stencil.
pub fn laplacian(g: &ScalarGrid) -> Result<ScalarGrid> {
    g.laplacian()
}

/// Max residual of `(Δ + α²) g = -D_α D_{-α} g`.
pub fn helmholtz_factorization_residual(alpha: Complex64, g: &ScalarGrid) -> Result<f64> {
    let lhs = g.laplacian()?.zip_with(g, |l, v| l + v * alpha * alpha)?;
    let gq = g.to_quaternion();
    let rhs = apply_d_alpha(&apply_d_alpha(&gq, -alpha)?, alpha)?.map(|q| -q);
    Ok(lhs.to_quaternion().zip_with(&rhs, |a, b| a - b)?.max_norm())
}

/// Max difference between the two orderings `-D_α D_{-α} g` and `-D_{-α} D_α g`.
pub fn helmholtz_ordering_residual(alpha: Complex64, g: &ScalarGrid) -> Result<f64> {
    let gq = g.to_quaternion();
    let a = apply_d_alpha(&apply_d_alpha(&gq, -alpha)?, alpha)?;
    let b = apply_d_alpha(&apply_d_alpha(&gq, alpha)?, -alpha)?;
    Ok((&a - &b)?.max_norm())
}

/// `(-Δ + ν) g`.
pub fn schrodinger_operator(slot: &PotentialSlot, g: &ScalarGrid) -> Result<ScalarGrid> {
    slot.check_lattice(g)?;
    let lap = g.laplacian()?;
    let nu_g = slot.nu.zip_with(g, |n, v| n * v)?;
    &nu_g - &lap
}

/// `(D + M^{Df/f})(D - M^{Df/f}) g`.
pub fn factorized_schrodinger(slot: &PotentialSlot, g: &ScalarGrid) -> Result<QuaternionGrid> {
    slot.check_lattice(g)?;
    let right = slot.shifted_dirac(&g.to_quaternion(), -1.0)?;
    slot.shifted_dirac(&right, 1.0)
}

/// Max residual of `(D + M^{Df/f})(D - M^{Df/f}) g = (-Δ + ν) g`.
pub fn schrodinger_factorization_residual(slot: &PotentialSlot, g: &ScalarGrid) -> Result<f64> {
    let lhs = factorized_schrodinger(slot, g)?;
    let rhs = schrodinger_operator(slot, g)?.to_quaternion();
    Ok((&lhs - &rhs)?.max_norm())
}

/// `(div p grad + q) φ` with the flux form `div(p grad φ)`.
pub fn conductivity_operator(slot: &PotentialSlot, phi: &ScalarGrid) -> Result<ScalarGrid> {
    slot.check_lattice(phi)?;
    let c = slot
        .conductivity()
        .ok_or_else(|| Error::InvalidParameter("slot has no conductivity coefficients".into()))?;
    let flux = gradient(phi)?.zip_with(&c.p, |g, p| g * p)?;
    let div = divergence(&flux)?;
    let qphi = c.q.zip_with(phi, |q, v| q * v)?;
    &div + &qphi
}

/// Max residual of `(div p grad + q) φ = -p^{1/2} (D + M^{Df/f})(D - M^{Df/f}) p^{1/2} φ`.
pub fn conductivity_factorization_residual(slot: &PotentialSlot, phi: &ScalarGrid) -> Result<f64> {
    let lhs = conductivity_operator(slot, phi)?;
    let c = slot.conductivity().expect("checked by conductivity_operator");
    let sqrt_p = c.p.map(|p| p.sqrt());
    let scaled = sqrt_p.zip_with(phi, |s, v| s * v)?;
    let inner = factorized_schrodinger(slot, &scaled)?;
    let rhs = inner.zip_with(&sqrt_p, |q, s| -(q * s))?;
    Ok((&lhs.to_quaternion() - &rhs)?.max_norm())
}

/// `F = f D(f⁻¹ g)`, a solution of `(D + M^{Df/f}) F = 0` whenever `g`
/// solves `(-Δ + ν) g = 0`.
pub fn darboux_transform(slot: &PotentialSlot, g: &ScalarGrid) -> Result<QuaternionGrid> {
    slot.check_lattice(g)?;
    let ratio = g.zip_with(&slot.f, |v, f| v / f)?;
    gradient(&ratio)?.scale_by(&slot.f)
}

/// Max residual of `(D + M^{Df/f}) F = 0`.
pub fn perturbed_dirac_residual(slot: &PotentialSlot, field: &QuaternionGrid) -> Result<f64> {
    slot.check_lattice(field)?;
    Ok(slot.shifted_dirac(field, 1.0)?.max_norm())
}

/// `(D - M^{Df/f}) g` for scalar `g`; equals `f D(f⁻¹ g)` in the continuum.
pub fn shifted_dirac_minus(slot: &PotentialSlot, g: &ScalarGrid) -> Result<QuaternionGrid> {
    slot.check_lattice(g)?;
    slot.shifted_dirac(&g.to_quaternion(), -1.0)
}

/// Antiderivative `𝒜[G]` of a purely vectorial field along the axis path
/// base → x-leg → y-leg → z-leg, with integration constant 0.
///
/// Each leg uses composite Simpson weights (a 3/8 panel absorbs an odd
/// interval count, a four-node cubic rule a single interval).
pub fn antiderivative(field: &QuaternionGrid, base: [usize; 3]) -> Result<ScalarGrid> {
    if !field.is_valid(base) {
        return Err(Error::BaseOutOfGrid { index: base });
    }
    let lat = *field.lattice();
    let m = field.margin();
    let valid_len = lat.dims.iter().map(|&d| d - 2 * m).min().unwrap_or(0);
    if valid_len < 4 {
        return Err(Error::GridTooSmall { what: format!("antiderivative needs 4 valid nodes per axis, have {valid_len}") });
    }
    let h = lat.h;
    let comp = |n: [usize; 3], k: usize| field.get(n).v[k];
    let hi = |a: usize| lat.dims[a] - 1 - m;

    // line samples over the valid range of one axis
    let line = |fixed: [usize; 3], axis: usize, k: usize| -> Vec<Complex64> {
        (m..=hi(axis))
            .map(|t| {
                let mut n = fixed;
                n[axis] = t;
                comp(n, k)
            })
            .collect()
    };
    let first: Vec<Complex64> = line(base, 0, 0);
    let values = (0..lat.len())
        .map(|idx| {
            let n = lat.node(idx);
            if !field.is_valid(n) {
                return Complex64::new(0.0, 0.0);
            }
            let leg1 = integrate_line(&first, base[0] - m, n[0] - m, h);
            let leg2 = integrate_line(&line([n[0], base[1], base[2]], 1, 1), base[1] - m, n[1] - m, h);
            let leg3 = integrate_line(&line([n[0], n[1], base[2]], 2, 2), base[2] - m, n[2] - m, h);
            leg1 + leg2 + leg3
        })
        .collect();
    ScalarGrid::from_values(lat, m, values)
}

/// Fourth-order quadrature of uniformly spaced samples between indices.
pub fn integrate_line(samples: &[Complex64], from: usize, to: usize, h: f64) -> Complex64 {
    if to < from {
        return -integrate_line(samples, to, from, h);
    }
    let n = to - from;
    let f = |i: usize| samples[i];
    match n {
        0 => Complex64::new(0.0, 0.0),
        1 => single_interval(samples, from, h),
        _ => {
            let (simpson_end, tail) = if n % 2 == 0 { (to, false) } else { (to - 3, true) };
            let mut acc = Complex64::new(0.0, 0.0);
            let mut i = from;
            while i < simpson_end {
                acc += (f(i) + f(i + 1) * 4.0 + f(i + 2)) * (h / 3.0);
                i += 2;
            }
            if tail {
                let j = simpson_end;
                acc += (f(j) + f(j + 1) * 3.0 + f(j + 2) * 3.0 + f(j + 3)) * (3.0 * h / 8.0);
            }
            acc
        }
    }
}

fn single_interval(s: &[Complex64], i: usize, h: f64) -> Complex64 {
    let w = h / 24.0;
    if i >= 1 && i + 2 < s.len() {
        (-s[i - 1] + s[i] * 13.0 + s[i + 1] * 13.0 - s[i + 2]) * w
    } else if i + 3 < s.len() {
        (s[i] * 9.0 + s[i + 1] * 19.0 - s[i + 2] * 5.0 + s[i + 3]) * w
    } else {
        (s[i - 2] - s[i - 1] * 5.0 + s[i] * 19.0 + s[i + 1] * 9.0) * w
    }
}

/// `(D - (Df/f) C_H) W`.
pub fn vekua_operator(slot: &PotentialSlot, w: &QuaternionGrid) -> Result<QuaternionGrid> {
    slot.check_lattice(w)?;
    let conj = left_mult(Multiplier::Field(&slot.log_grad)).apply(&w.quat_conj())?;
    &apply_d(w)? - &conj
}

/// Max residual of the main Vekua equation `(D - (Df/f) C_H) W = 0`.
pub fn vekua_residual(slot: &PotentialSlot, w: &QuaternionGrid) -> Result<f64> {
    Ok(vekua_operator(slot, w)?.max_norm())
}

/// The quartet `f, i1/f, i2/f, i3/f` of solutions of the main Vekua equation.
pub fn generating_quartet(slot: &PotentialSlot) -> [QuaternionGrid; 4] {
    let f0 = slot.f.to_quaternion();
    let fk = |k: usize| slot.f.map(move |v| Biquaternion::basis(k) / v);
    [f0, fk(1), fk(2), fk(3)]
}

/// Residuals of the consequences of the main Vekua equation for `W = W0 + W⃗`:
/// `(-Δ + ν) W0`, `div(f² grad(f⁻¹ W0))` and `rot(f⁻² rot(f W⃗))`.
pub fn vekua_consequences(slot: &PotentialSlot, w: &QuaternionGrid) -> Result<(f64, f64, f64)> {
    slot.check_lattice(w)?;
    let w0 = w.scalar_part();
    let schrodinger = schrodinger_operator(slot, &w0)?.max_norm();

    let u = w0.zip_with(&slot.f, |a, f| a / f)?;
    let f2 = slot.f.map(|f| f * f);
    let flux = gradient(&u)?.scale_by(&f2)?;
    let scalar = divergence(&flux)?.max_norm();

    let v = w.vector_part().scale_by(&slot.f)?;
    let inv_f2 = slot.f.map(|f| 1.0 / (f * f));
    let inner = curl(&v)?.scale_by(&inv_f2)?;
    let vector = curl(&inner)?.max_norm();
    Ok((schrodinger, scalar, vector))
}

/// For `W = Σ φ_j F_j` over the generating quartet: the residual of
/// `Σ (Dφ_j) F_j = 0` and of the equivalent form `Dw = ((1-f²)/(1+f²)) D w̄`,
/// `w = φ0 + Σ φ_k i_k`. The second form is only evaluated for real positive `f`.
pub fn vekua_coordinates_residual(slot: &PotentialSlot, phis: &[ScalarGrid; 4]) -> Result<(f64, f64)> {
    for p in phis {
        slot.check_lattice(p)?;
    }
    let quartet = generating_quartet(slot);
    let mut sum: Option<QuaternionGrid> = None;
    for (phi, fj) in phis.iter().zip(&quartet) {
        let term = gradient(phi)?.zip_with(fj, |d, q| d * q)?;
        sum = Some(match sum {
            None => term,
            Some(s) => (&s + &term)?,
        });
    }
    let first = sum.expect("four terms").max_norm();

    if slot.f.valid_nodes().any(|n| {
        let f = slot.f.get(n);
        f.im != 0.0 || f.re <= 0.0
    }) {
        return Err(Error::InvalidParameter("the w-form of the quartet condition needs real positive f".into()));
    }
    let w = phis[0].to_quaternion();
    let w = (1..4).try_fold(w, |acc, k| acc.zip_with(&phis[k], move |q, p| q + Biquaternion::basis(k) * p))?;
    let dw = apply_d(&w)?;
    let dwbar = apply_d(&w.quat_conj())?;
    let ratio = slot.f.map(|f| (1.0 - f * f) / (1.0 + f * f));
    let rhs = dwbar.scale_by(&ratio)?;
    Ok((first, (&dw - &rhs)?.max_norm()))
}

/// Purely vectorial field with the given components.
pub fn vector_from_components(c: [ScalarGrid; 3]) -> Result<QuaternionGrid> {
    let [c1, c2, c3] = c;
    let v = c1.map(|a| Biquaternion::vector([a, Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)]));
    let v = v.zip_with(&c2, |q, b| q + Biquaternion::basis(2) * b)?;
    v.zip_with(&c3, |q, c| q + Biquaternion::basis(3) * c)
}
