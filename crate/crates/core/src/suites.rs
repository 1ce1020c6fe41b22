//! Verification suites: named measurements with pass/fail thresholds.
//!
//! The measurement functions return raw numbers so callers can apply their
//! own tolerances; [`run_suite`] wraps them into [`CheckRow`]s with defaults.

use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{self, Biquaternion};
use crate::chiral_time::{bessel_j0, green_function, green_residual_at, SpaceTimePoint};
use crate::diffops::{
    antiderivative, conductivity_factorization_residual, darboux_transform, generating_quartet,
    helmholtz_factorization_residual, perturbed_dirac_residual, schrodinger_factorization_residual,
    schrodinger_operator, vekua_consequences, vekua_residual, PotentialSlot,
};
use crate::error::{Error, Result};
use crate::grid::{Lattice, ScalarGrid};
use crate::inhomog::{maxwell_residuals, quaternionic_residual, AnalyticMedium, EMState, ManufacturedSolution, MediumFields, Provenance};
use crate::kernels::{dipole_field, fundamental_solution, helmholtz_kernel, ChiralMedium, Sign};
use crate::scattering::mfs::chiral_maxwell_residual;
use crate::verify::{Refinement, RATIO_WINDOW};
use crate::vec3::{self, Point3};

/// Default seed of the randomized checks.
pub const DEFAULT_SEED: u64 = 20240917;

/// Refinement pair shared by the grid checks.
pub const GRID_STEPS: (f64, f64) = (0.05, 0.025);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Algebra,
    Kernels,
    Factorizations,
    Green,
    Inhomog,
    All,
}

impl Suite {
    pub const EACH: [Suite; 5] = [Suite::Algebra, Suite::Kernels, Suite::Factorizations, Suite::Green, Suite::Inhomog];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Algebra => "algebra",
            Suite::Kernels => "kernels",
            Suite::Factorizations => "factorizations",
            Suite::Green => "green",
            Suite::Inhomog => "inhomog",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Suite::All].into_iter().chain(Suite::EACH).find(|x| x.name() == s).ok_or_else(|| {
            Error::InvalidParameter(format!("unknown suite '{s}' (expected algebra, kernels, factorizations, green, inhomog or all)"))
        })
    }
}

/// One measured quantity and the closed interval it must fall in.
#[derive(Debug, Clone, PartialEq)]
pub struct CheckRow {
    pub suite: &'static str,
    pub check: String,
    pub measured: f64,
    pub lower: f64,
    pub upper: f64,
    pub pass: bool,
}

impl CheckRow {
    pub fn at_most(suite: Suite, check: impl Into<String>, measured: f64, upper: f64) -> Self {
        let pass = measured <= upper;
        Self { suite: suite.name(), check: check.into(), measured, lower: 0.0, upper, pass }
    }

    pub fn at_least(suite: Suite, check: impl Into<String>, measured: f64, lower: f64) -> Self {
        let pass = measured >= lower;
        Self { suite: suite.name(), check: check.into(), measured, lower, upper: f64::INFINITY, pass }
    }

    /// Ratio row; passes inside the window or when both residuals are at roundoff.
    pub fn refinement(suite: Suite, check: impl Into<String>, r: &Refinement) -> Self {
        Self {
            suite: suite.name(),
            check: check.into(),
            measured: r.ratio(),
            lower: RATIO_WINDOW.0,
            upper: RATIO_WINDOW.1,
            pass: r.is_second_order(),
        }
    }

    /// Ratio row that also accepts faster than second-order decay.
    pub fn at_least_second_order(suite: Suite, check: impl Into<String>, r: &Refinement) -> Self {
        Self {
            suite: suite.name(),
            check: check.into(),
            measured: r.ratio(),
            lower: RATIO_WINDOW.0,
            upper: f64::INFINITY,
            pass: r.is_at_least_second_order(),
        }
    }
}

/// Parameters of a suite run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Random triples drawn by the algebra suite.
    pub algebra_samples: usize,
    /// Random space-time points of the Green-function residual check.
    pub green_points: usize,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self { seed: DEFAULT_SEED, algebra_samples: 10_000, green_points: 4 }
    }
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<Vec<CheckRow>> {
    match suite {
        Suite::Algebra => algebra_rows(opts),
        Suite::Kernels => kernel_rows(),
        Suite::Factorizations => factorization_rows(),
        Suite::Green => green_rows(opts),
        Suite::Inhomog => inhomog_rows(),
        Suite::All => {
            let mut rows = Vec::new();
            for s in Suite::EACH {
                rows.extend(run_suite(s, opts)?);
            }
            Ok(rows)
        }
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn refine(f: impl Fn(f64) -> Result<f64>) -> Result<Refinement> {
    Ok(Refinement::new(f(GRID_STEPS.0)?, f(GRID_STEPS.1)?))
}

// ---------------------------------------------------------------- algebra

/// Largest componentwise errors over random triples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AlgebraErrors {
    pub associativity: f64,
    /// `C_H(ab) - C_H(b) C_H(a)`
    pub conjugation: f64,
    /// `ab` against its scalar/vector/dot/cross reconstruction
    pub reconstruction: f64,
    /// `i q - q i` for the complex unit
    pub complex_unit: f64,
}

pub fn random_biquaternion(rng: &mut impl Rng) -> Biquaternion {
    let mut z = || c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    Biquaternion::new(z(), [z(), z(), z()])
}

pub fn algebra_law_errors(seed: u64, samples: usize) -> AlgebraErrors {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = AlgebraErrors { associativity: 0.0, conjugation: 0.0, reconstruction: 0.0, complex_unit: 0.0 };
    let i = Biquaternion::scalar(c(0.0, 1.0));
    for _ in 0..samples {
        let (a, b, d) = (random_biquaternion(&mut rng), random_biquaternion(&mut rng), random_biquaternion(&mut rng));
        out.associativity = out.associativity.max(((a * b) * d - a * (b * d)).max_abs());
        out.conjugation = out.conjugation.max(((a * b).quat_conj() - b.quat_conj() * a.quat_conj()).max_abs());
        out.reconstruction = out.reconstruction.max((algebra::mul(&a, &b) - algebra::product_from_parts(&a, &b)).max_abs());
        out.complex_unit = out.complex_unit.max((i * a - a * i).max_abs());
    }
    out
}

fn algebra_rows(opts: &SuiteOptions) -> Result<Vec<CheckRow>> {
    let e = algebra_law_errors(opts.seed, opts.algebra_samples);
    let s = Suite::Algebra;
    let mut rows = vec![
        CheckRow::at_most(s, "associativity", e.associativity, 1e-12),
        CheckRow::at_most(s, "conjugation_reverses_products", e.conjugation, 1e-12),
        CheckRow::at_most(s, "product_from_parts", e.reconstruction, 1e-12),
        CheckRow::at_most(s, "complex_unit_commutes", e.complex_unit, 0.0),
    ];
    let table = basis_table_error();
    rows.push(CheckRow::at_most(s, "basis_table", table, 0.0));
    Ok(rows)
}

/// Deviation from `i_k² = -1`, `i1 i2 = i3`, `i2 i3 = i1`, `i3 i1 = i2`.
fn basis_table_error() -> f64 {
    let b = Biquaternion::basis;
    let mut err: f64 = 0.0;
    for k in 1..4 {
        err = err.max((b(k) * b(k) + Biquaternion::ONE).max_abs());
        let (n1, n2) = (k % 3 + 1, (k + 1) % 3 + 1);
        err = err.max((b(k) * b(n1) - b(n2)).max_abs());
        err = err.max((b(n1) * b(k) + b(n2)).max_abs());
    }
    err
}

// ---------------------------------------------------------------- kernels

fn point_dirac(f: &dyn Fn(Point3) -> Result<Biquaternion>, x: Point3, h: f64) -> Result<Biquaternion> {
    let mut acc = Biquaternion::ZERO;
    for k in 0..3 {
        let (mut xp, mut xm) = (x, x);
        xp[k] += h;
        xm[k] -= h;
        acc += Biquaternion::basis(k + 1) * ((f(xp)? - f(xm)?) / (2.0 * h));
    }
    Ok(acc)
}

/// Refinement of `(D ± α)K_{±α}` at `x` with steps 0.02 and 0.01.
pub fn kernel_refinement(alpha: Complex64, sign: Sign, x: Point3) -> Result<Refinement> {
    let k = |p: Point3| fundamental_solution(alpha, sign, p.into());
    let res = |h: f64| -> Result<f64> { Ok((point_dirac(&k, x, h)? + k(x)? * (alpha * sign.value())).max_abs()) };
    Ok(Refinement::new(res(0.02)?, res(0.01)?))
}

/// Refinement of `(Δ + α²)θ_α` at `x`.
pub fn helmholtz_kernel_refinement(alpha: Complex64, x: Point3) -> Result<Refinement> {
    let f = |p: Point3| helmholtz_kernel(alpha, p.into());
    let res = |h: f64| -> Result<f64> {
        let mut acc = -6.0 * f(x)?;
        for k in 0..3 {
            let (mut xp, mut xm) = (x, x);
            xp[k] += h;
            xm[k] -= h;
            acc += f(xp)? + f(xm)?;
        }
        Ok((acc / (h * h) + alpha * alpha * f(x)?).norm())
    };
    Ok(Refinement::new(res(0.02)?, res(0.01)?))
}

/// Refinement of the achiral Maxwell residuals of the dipole field.
pub fn dipole_refinement(alpha: Complex64, moment: Point3, x: Point3) -> Result<(Refinement, Refinement)> {
    let medium = ChiralMedium::with_alpha(alpha, 0.0)?;
    let field = |p: Point3| dipole_field(moment, alpha, p.into());
    let (a1, b1) = chiral_maxwell_residual(field, &medium, x, 0.02)?;
    let (a2, b2) = chiral_maxwell_residual(field, &medium, x, 0.01)?;
    Ok((Refinement::new(a1, a2), Refinement::new(b1, b2)))
}

/// `|E - x̂ × H| |x|` along a ray for a real wavenumber.
pub fn silver_muller_profile(alpha: f64, moment: Point3, direction: Point3, radii: &[f64]) -> Result<Vec<f64>> {
    let d = vec3::normalize(direction);
    radii
        .iter()
        .map(|&r| {
            let x = vec3::scale(d, r);
            let (e, h) = dipole_field(moment, c(alpha, 0.0), x.into())?;
            let diff = vec3::csub(e, vec3::ccross(vec3::to_complex(d), h));
            Ok(vec3::cmax_abs(diff) * r)
        })
        .collect()
}

fn kernel_rows() -> Result<Vec<CheckRow>> {
    let s = Suite::Kernels;
    let alpha = c(1.0, 0.3);
    let x = [1.0, 1.0, 1.0];
    let mut rows = vec![CheckRow::refinement(s, "helmholtz_kernel", &helmholtz_kernel_refinement(alpha, x)?)];
    for (sign, name) in [(Sign::Plus, "dirac_plus_kernel"), (Sign::Minus, "dirac_minus_kernel")] {
        rows.push(CheckRow::refinement(s, name, &kernel_refinement(alpha, sign, x)?));
    }
    let (r12, r13) = dipole_refinement(alpha, [0.3, -0.5, 0.8], [1.2, 0.7, -0.9])?;
    rows.push(CheckRow::refinement(s, "dipole_rot_e", &r12));
    rows.push(CheckRow::refinement(s, "dipole_rot_h", &r13));
    let prof = silver_muller_profile(1.0, [0.3, -0.5, 0.8], [1.0, 2.0, 0.5], &[10.0, 100.0, 1000.0])?;
    let worst = prof.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    rows.push(CheckRow::at_most(s, "silver_muller_decay", worst, 1.0 - 1e-3));
    Ok(rows)
}

// ---------------------------------------------------------------- factorizations

/// `e^{k·x}` on a lattice.
pub fn exp_field(lat: Lattice, k: Point3) -> ScalarGrid {
    ScalarGrid::from_fn(lat, move |x| c(vec3::dot(k, x).exp(), 0.0))
}

/// A complex plane wave used as the test function of the factorization checks.
pub fn test_wave(lat: Lattice) -> ScalarGrid {
    ScalarGrid::from_fn(lat, |x| (c(0.0, 1.3) * x[0] + c(0.4, 0.0) * x[1] - c(0.2, 0.7) * x[2]).exp())
}

/// Unit vector used for `f = e^{k·x}`.
pub const UNIT_K: Point3 = [0.6, 0.0, 0.8];

/// Exponents `(a, b)` of `p = e^{a·x}`, `u0 = e^{b·x}`, chosen so that
/// `f = √p u0 = e^{UNIT_K·x}`.
pub const CONDUCTIVITY_EXPONENTS: (Point3, Point3) = ([0.4, -0.2, 0.6], [0.4, 0.1, 0.5]);

fn factor_cube(h: f64) -> Result<Lattice> {
    Lattice::cube([1.0, 1.0, 1.0], 0.5, h)
}

pub fn helmholtz_refinement(alpha: Complex64) -> Result<Refinement> {
    refine(|h| helmholtz_factorization_residual(alpha, &test_wave(factor_cube(h)?)))
}

pub fn schrodinger_refinement(k: Point3) -> Result<Refinement> {
    refine(|h| {
        let lat = factor_cube(h)?;
        let slot = PotentialSlot::from_particular_solution(exp_field(lat, k))?;
        schrodinger_factorization_residual(&slot, &test_wave(lat))
    })
}

/// Conductivity `p = e^{a·x}` with manufactured `u0 = e^{b·x}` and matching `q`.
pub fn conductivity_refinement(a: Point3, b: Point3) -> Result<Refinement> {
    let bab = vec3::dot(b, vec3::add(a, b));
    refine(|h| {
        let lat = factor_cube(h)?;
        let p = exp_field(lat, a);
        let q = p.map(|v| v * (-bab));
        let slot = PotentialSlot::from_conductivity(p, q, exp_field(lat, b))?;
        conductivity_factorization_residual(&slot, &test_wave(lat))
    })
}

/// Errors of the round trip `g → F = f D(f⁻¹g) → g' = f 𝒜[f⁻¹F]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DarbouxRoundTrip {
    /// `(D + M^{Df/f}) F`
    pub dirac: Refinement,
    /// `g' - g` after removing its least-squares multiple of `f`
    pub recovery: Refinement,
    /// `(-Δ + ν) g'`; decays like `h³` for exponential `f` and `g`
    pub schrodinger: Refinement,
}

pub fn darboux_round_trip(k: Point3) -> Result<DarbouxRoundTrip> {
    let run = |h: f64| -> Result<(f64, f64, f64)> {
        let lat = factor_cube(h)?;
        let f = exp_field(lat, k);
        let g = exp_field(lat, vec3::scale(k, -1.0));
        let slot = PotentialSlot::from_particular_solution(f.clone())?;
        let big_f = darboux_transform(&slot, &g)?;
        let dirac = perturbed_dirac_residual(&slot, &big_f)?;
        let lg = big_f.zip_with(&f, |q, v| q / v)?;
        let base = lg.margin();
        let g2 = antiderivative(&lg, [base; 3])?.zip_with(&f, |u, v| u * v)?;
        let nodes: Vec<_> = g2.valid_nodes().collect();
        let (mut num, mut den) = (c(0.0, 0.0), 0.0);
        for &n in &nodes {
            num += (g.get(n) - g2.get(n)) * f.get(n).conj();
            den += f.get(n).norm_sqr();
        }
        let coef = num / den;
        let recovery = nodes.iter().map(|&n| (g2.get(n) + f.get(n) * coef - g.get(n)).norm()).fold(0.0, f64::max);
        let schr = schrodinger_operator(&slot, &g2)?.max_norm();
        Ok((dirac, recovery, schr))
    };
    let (a, b) = (run(GRID_STEPS.0)?, run(GRID_STEPS.1)?);
    Ok(DarbouxRoundTrip {
        dirac: Refinement::new(a.0, b.0),
        recovery: Refinement::new(a.1, b.1),
        schrodinger: Refinement::new(a.2, b.2),
    })
}

/// Positive, non-exponential particular solution `f = 1 + x1²/2` of the
/// Vekua checks; for `f = e^{k·x}` the grid residuals cancel to round-off.
pub fn vekua_f(lat: Lattice) -> ScalarGrid {
    ScalarGrid::from_fn(lat, |x| c(1.0 + 0.5 * x[0] * x[0], 0.0))
}

/// A solution of the main Vekua equation for [`vekua_f`] with nontrivial
/// scalar and vector parts: `W = f u + f⁻¹ (0, -G ∂3u, G ∂2u)` where
/// `u = e^{0.8 x2} cos(0.8 x3)` is harmonic in `(x2, x3)` and `G' = f²`.
pub fn vekua_solution(lat: Lattice) -> crate::grid::QuaternionGrid {
    crate::grid::QuaternionGrid::from_fn(lat, |x| {
        let f = 1.0 + 0.5 * x[0] * x[0];
        let g = x[0] + x[0].powi(3) / 3.0 + x[0].powi(5) / 20.0;
        let e = (0.8 * x[1]).exp();
        let (u, u2, u3) = (e * (0.8 * x[2]).cos(), 0.8 * e * (0.8 * x[2]).cos(), -0.8 * e * (0.8 * x[2]).sin());
        Biquaternion::new(c(f * u, 0.0), [c(0.0, 0.0), c(-g * u3 / f, 0.0), c(g * u2 / f, 0.0)])
    })
}

/// Residual refinements of the quartet members, of [`vekua_solution`] and of
/// its three consequences (Schrödinger, scalar, vector).
#[derive(Debug, Clone, PartialEq)]
pub struct VekuaQuartet {
    pub members: [Refinement; 4],
    pub solution: Refinement,
    pub consequences: [Refinement; 3],
}

pub fn vekua_quartet() -> Result<VekuaQuartet> {
    let run = |h: f64| -> Result<[f64; 8]> {
        let lat = factor_cube(h)?;
        let slot = PotentialSlot::from_particular_solution(vekua_f(lat))?;
        let q = generating_quartet(&slot);
        let w = vekua_solution(lat);
        let (a, b, d) = vekua_consequences(&slot, &w)?;
        Ok([
            vekua_residual(&slot, &q[0])?,
            vekua_residual(&slot, &q[1])?,
            vekua_residual(&slot, &q[2])?,
            vekua_residual(&slot, &q[3])?,
            vekua_residual(&slot, &w)?,
            a,
            b,
            d,
        ])
    };
    let (a, b) = (run(GRID_STEPS.0)?, run(GRID_STEPS.1)?);
    let r = |i: usize| Refinement::new(a[i], b[i]);
    Ok(VekuaQuartet { members: std::array::from_fn(r), solution: r(4), consequences: [r(5), r(6), r(7)] })
}

fn factorization_rows() -> Result<Vec<CheckRow>> {
    let s = Suite::Factorizations;
    let mut rows = vec![
        CheckRow::refinement(s, "helmholtz", &helmholtz_refinement(c(1.0, 0.3))?),
        CheckRow::refinement(s, "schrodinger", &schrodinger_refinement(UNIT_K)?),
        CheckRow::refinement(s, "conductivity", &conductivity_refinement(CONDUCTIVITY_EXPONENTS.0, CONDUCTIVITY_EXPONENTS.1)?),
    ];
    let d = darboux_round_trip(UNIT_K)?;
    rows.push(CheckRow::refinement(s, "darboux_dirac", &d.dirac));
    rows.push(CheckRow::refinement(s, "darboux_recovery", &d.recovery));
    rows.push(CheckRow::at_least_second_order(s, "darboux_schrodinger", &d.schrodinger));
    let v = vekua_quartet()?;
    for j in 0..4 {
        rows.push(CheckRow::refinement(s, format!("vekua_member_{j}"), &v.members[j]));
    }
    rows.push(CheckRow::refinement(s, "vekua_solution", &v.solution));
    for (name, r) in ["schrodinger", "scalar", "vector"].iter().zip(&v.consequences) {
        rows.push(CheckRow::refinement(s, format!("vekua_consequence_{name}"), r));
    }
    Ok(rows)
}

// ---------------------------------------------------------------- green

/// Largest `|f|` over negative times; exactly zero when causal.
pub fn green_causality(medium: &ChiralMedium) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for t in [-1e-12, -0.5, -1.0, -10.0] {
        for x in [[0.3, 0.4, 0.5], [1.0, 0.0, 0.0], [-0.7, 0.2, 1.1]] {
            worst = worst.max(green_function(SpaceTimePoint::new(t, x), medium)?.max_abs());
        }
    }
    Ok(worst)
}

/// Random points with `t ∈ [0.5, 2]`, `|x| ∈ [0.5, 2]`.
pub fn green_sample_points(seed: u64, count: usize) -> Vec<SpaceTimePoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let t = rng.random_range(0.5..2.0);
            let r = rng.random_range(0.5..2.0);
            let u: f64 = rng.random_range(-1.0..1.0);
            let phi = rng.random_range(0.0..std::f64::consts::TAU);
            let s = (1.0 - u * u).sqrt();
            SpaceTimePoint::new(t, [r * s * phi.cos(), r * s * phi.sin(), r * u])
        })
        .collect()
}

/// Residual refinements of `M f` under joint `(h, h_t)` halving from 0.02.
pub fn green_refinements(medium: &ChiralMedium, points: &[SpaceTimePoint]) -> Result<Vec<Refinement>> {
    points
        .iter()
        .map(|&p| Ok(Refinement::new(green_residual_at(p, medium, 0.02)?, green_residual_at(p, medium, 0.01)?)))
        .collect()
}

/// Independent oracle: plain-f64 series with a fixed number of terms.
fn j0_series_oracle(z: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..80 {
        term *= -(z * z / 4.0) / ((k * k) as f64);
        sum += term;
    }
    sum
}

fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if f(a) * f(m) <= 0.0 {
            b = m;
        } else {
            a = m;
        }
    }
    0.5 * (a + b)
}

/// Distance between the first root of `J0` from the library and from the oracle.
pub fn bessel_root_gap() -> Result<f64> {
    bessel_j0(2.0)?;
    let lib = bisect(|z| bessel_j0(z).expect("z in [2, 3]"), 2.0, 3.0);
    let oracle = bisect(j0_series_oracle, 2.0, 3.0);
    Ok((lib - oracle).abs())
}

fn green_rows(opts: &SuiteOptions) -> Result<Vec<CheckRow>> {
    let s = Suite::Green;
    let medium = ChiralMedium::time_domain(1.0, 1.0, 1.0)?;
    let mut rows = vec![CheckRow::at_most(s, "causality", green_causality(&medium)?, 0.0)];
    let pts = green_sample_points(opts.seed, opts.green_points);
    for (i, r) in green_refinements(&medium, &pts)?.iter().enumerate() {
        rows.push(CheckRow::refinement(s, format!("m_residual_point_{i}"), r));
    }
    rows.push(CheckRow::at_most(s, "bessel_first_root", bessel_root_gap()?, 1e-9));
    Ok(rows)
}

// ---------------------------------------------------------------- inhomog

fn inhomog_lattice(h: f64) -> Result<Lattice> {
    Lattice::cube([0.3, 0.2, 0.1], 0.5, h)
}

/// Manufactured state on three time levels centred at `t = 0.5`.
pub fn manufactured_state(sol: &ManufacturedSolution, h: f64) -> Result<(EMState, MediumFields)> {
    let medium = MediumFields::from_analytic(&sol.medium, inhomog_lattice(h)?)?;
    Ok((sol.sample(&medium, 0.5 - h, h, 3, Provenance::FineDifference)?, medium))
}

/// Refinements of the quaternionic residual and its two intermediate forms.
pub fn inhomog_refinements(medium: AnalyticMedium) -> Result<[Refinement; 3]> {
    let sol = ManufacturedSolution::standard(medium);
    let run = |h: f64| -> Result<[f64; 3]> {
        let (s, m) = manufactured_state(&sol, h)?;
        let q = quaternionic_residual(&s, &m)?;
        Ok([q.total, q.minq1, q.minq2])
    };
    let (a, b) = (run(GRID_STEPS.0)?, run(GRID_STEPS.1)?);
    Ok(std::array::from_fn(|i| Refinement::new(a[i], b[i])))
}

/// Response of the residuals to perturbations that each break one equation.
#[derive(Debug, Clone, PartialEq)]
pub struct ViolationReport {
    /// Quaternionic residual of the unperturbed state.
    pub solution_level: f64,
    /// Quaternionic residual of each perturbed state divided by `solution_level`.
    pub amplification: [f64; 4],
    /// Perturbation `k` raised exactly equation `k` above 10× its baseline.
    pub isolated: [bool; 4],
}

pub fn violation_report(medium: AnalyticMedium, h: f64) -> Result<ViolationReport> {
    use crate::grid::SpaceTimeGrid;
    let sol = ManufacturedSolution::standard(medium);
    let (base, m) = manufactured_state(&sol, h)?;
    let lat = *m.lattice();
    let (t0, ht) = (base.e.t0(), base.e.ht());
    let bump = |x: Point3| (-(x[0] - 0.3).powi(2) - (x[1] - 0.2).powi(2)).exp();
    let field = |f: &(dyn Fn(Point3) -> Biquaternion + Sync)| SpaceTimeGrid::from_fn(lat, t0, ht, 3, |_, x| f(x));
    let add = |a: &SpaceTimeGrid, b: SpaceTimeGrid| a.zip_with(&b, |p, q| p + q);

    let dj = field(&|x| Biquaternion::from_real_vector([0.0, 0.1 * bump(x), 0.0]))?;
    let s1 = EMState::new(base.e.clone(), base.h.clone(), base.rho.clone(), add(&base.j, dj)?, &m)?;
    // E + rot(B)/ε with static B = (0, 0, 0.1 bump)
    let eps = sol.medium.eps.clone();
    let de = field(&move |x| {
        let b = 0.1 * bump(x);
        let (bx, by) = (-2.0 * (x[0] - 0.3) * b, -2.0 * (x[1] - 0.2) * b);
        Biquaternion::from_real_vector([by / eps(x), -bx / eps(x), 0.0])
    })?;
    let s2 = EMState::new(add(&base.e, de)?, base.h.clone(), base.rho.clone(), base.j.clone(), &m)?;
    let drho = field(&|x| Biquaternion::scalar(c(0.1 * bump(x), 0.0)))?;
    let s3 = EMState::new(base.e.clone(), base.h.clone(), add(&base.rho, drho)?, base.j.clone(), &m)?;
    // H + grad χ with χ = 0.1 x1² + 0.05 x2²
    let dh = field(&|x| Biquaternion::from_real_vector([0.2 * x[0], 0.1 * x[1], 0.0]))?;
    let s4 = EMState::new(base.e.clone(), add(&base.h, dh)?, base.rho.clone(), base.j.clone(), &m)?;

    let level = quaternionic_residual(&base, &m)?.total;
    let baseline = maxwell_residuals(&base, &m)?;
    let mut amplification = [0.0; 4];
    let mut isolated = [false; 4];
    for (k, s) in [s1, s2, s3, s4].iter().enumerate() {
        amplification[k] = quaternionic_residual(s, &m)?.total / level;
        let r = maxwell_residuals(s, &m)?;
        isolated[k] = (0..4).all(|i| (r[i] > 10.0 * baseline[i].max(1e-9)) == (i == k));
    }
    Ok(ViolationReport { solution_level: level, amplification, isolated })
}

fn inhomog_rows() -> Result<Vec<CheckRow>> {
    let s = Suite::Inhomog;
    let med = AnalyticMedium::smooth_bump();
    let [total, q1, q2] = inhomog_refinements(med.clone())?;
    let mut rows = vec![
        CheckRow::refinement(s, "quaternionic_residual", &total),
        CheckRow::refinement(s, "electric_form", &q1),
        CheckRow::refinement(s, "magnetic_form", &q2),
    ];
    let ident = refine(|h| {
        let m = MediumFields::from_analytic(&med, inhomog_lattice(h)?)?;
        let (a, b) = m.identity_residuals()?;
        Ok(a.max(b))
    })?;
    rows.push(CheckRow::refinement(s, "medium_identities", &ident));
    let v = violation_report(med, GRID_STEPS.1)?;
    for k in 0..4 {
        rows.push(CheckRow::at_least(s, format!("violation_{}_amplification", k + 1), v.amplification[k], 10.0));
        rows.push(CheckRow::at_least(s, format!("violation_{}_isolated", k + 1), f64::from(u8::from(v.isolated[k])), 1.0));
    }
    Ok(rows)
}
