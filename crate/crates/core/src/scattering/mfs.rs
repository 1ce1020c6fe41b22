//! Collocation with quaternionic fundamental solutions for chiral Maxwell
//! boundary value problems on an ellipsoid.
//!
//! Fields are right linear combinations `P = Σ K_{α1}(x-y_j) a_j`,
//! `Q = Σ K_{-α2}(x-y_j) b_j` with `E = ½ Vec(P+Q)` and `H = (1/2i) Vec(P-Q)`.
//! Each collocation point contributes two tangential boundary rows and the
//! two scalar-part constraints `Sc(P+Q) = 0`, `Sc(P-Q) = 0`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::algebra::Biquaternion;
use crate::error::{Error, Result};
use crate::kernels::{self, ChiralMedium, Sign, SpacePoint};
use crate::linalg::{self, CMatrix, CVector};
use crate::scattering::surface::{sample_surface, Ellipsoid, SurfaceSample};
use crate::vec3::{self, CVec3, Point3};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Relative distance (to the largest semi-axis) below which a source is
/// considered to lie on the boundary.
pub const SOURCE_TOLERANCE: f64 = 1e-9;

/// Which side of the surface carries the field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainSide {
    /// Field inside the surface, sources on an enclosing ellipsoid.
    Interior,
    /// Field outside the surface, sources on an inner ellipsoid.
    Exterior,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryKind {
    /// `E × n = f`
    PerfectConductor,
    /// `E × n - ξ (H × n) × n = f`
    Impedance(Complex64),
}

impl BoundaryKind {
    /// Boundary functional applied to a field pair at a sample.
    pub fn apply(&self, e: CVec3, h: CVec3, normal: Point3) -> CVec3 {
        let n = vec3::to_complex(normal);
        let exn = vec3::ccross(e, n);
        match *self {
            BoundaryKind::PerfectConductor => exn,
            BoundaryKind::Impedance(xi) => {
                let hnn = vec3::ccross(vec3::ccross(h, n), n);
                vec3::csub(exn, vec3::cscale(hnn, xi))
            }
        }
    }
}

/// A closed-form electromagnetic field `(E, H)`.
pub trait ExactField: Send + Sync + fmt::Debug {
    fn fields(&self, x: Point3) -> Result<(CVec3, CVec3)>;

    /// Points where the field is singular.
    fn singular_points(&self) -> Vec<Point3> {
        Vec::new()
    }
}

/// Magnetic dipole `E = rot(c θ_α(x - x0))`, `H = -(1/(iα)) rot E` (β = 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dipole {
    pub moment: Point3,
    pub center: Point3,
    pub alpha: Complex64,
}

impl ExactField for Dipole {
    fn fields(&self, x: Point3) -> Result<(CVec3, CVec3)> {
        kernels::dipole_field(self.moment, self.alpha, SpacePoint(vec3::sub(x, self.center)))
    }

    fn singular_points(&self) -> Vec<Point3> {
        vec![self.center]
    }
}

/// Chiral field of a point source at `center`:
/// `E = ½(φ + ψ)`, `H = (1/2i)(φ - ψ)` with Beltrami fields
/// `rot φ = -α1 φ`, `rot ψ = α2 ψ` built from the two moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiralPointSource {
    pub medium: ChiralMedium,
    pub center: Point3,
    pub moment_plus: Point3,
    pub moment_minus: Point3,
}

impl ExactField for ChiralPointSource {
    fn fields(&self, x: Point3) -> Result<(CVec3, CVec3)> {
        let r = SpacePoint(vec3::sub(x, self.center));
        let phi = kernels::beltrami_field(self.medium.alpha1, Sign::Plus, self.moment_plus, r)?;
        let psi = kernels::beltrami_field(self.medium.alpha2, Sign::Minus, self.moment_minus, r)?;
        let e = vec3::cscale(vec3::cadd(phi, psi), Complex64::new(0.5, 0.0));
        let h = vec3::cscale(vec3::csub(phi, psi), 1.0 / (2.0 * I));
        Ok((e, h))
    }

    fn singular_points(&self) -> Vec<Point3> {
        vec![self.center]
    }
}

/// Tangential boundary data `f(x)` given pointwise.
pub type TangentialData = Arc<dyn Fn(&SurfaceSample) -> Result<CVec3> + Send + Sync>;

#[derive(Clone)]
pub enum BoundaryData {
    Zero,
    /// Data generated from a known field through the boundary functional.
    Exact(Arc<dyn ExactField>),
    Tangential(TangentialData),
}

impl fmt::Debug for BoundaryData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundaryData::Zero => write!(f, "Zero"),
            BoundaryData::Exact(e) => write!(f, "Exact({e:?})"),
            BoundaryData::Tangential(_) => write!(f, "Tangential(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct MfsProblem {
    pub surface: Ellipsoid,
    pub medium: ChiralMedium,
    pub n_sources: usize,
    pub source_scale: f64,
    pub side: DomainSide,
    pub boundary_kind: BoundaryKind,
    pub boundary_data: BoundaryData,
    /// Collocation count is `ceil(2N · oversampling)`; 1 gives a square system.
    pub oversampling: f64,
}

impl MfsProblem {
    /// Exterior perfect-conductor problem with the square collocation count.
    pub fn exterior(surface: Ellipsoid, medium: ChiralMedium, n_sources: usize, source_scale: f64, data: BoundaryData) -> Self {
        Self {
            surface,
            medium,
            n_sources,
            source_scale,
            side: DomainSide::Exterior,
            boundary_kind: BoundaryKind::PerfectConductor,
            boundary_data: data,
            oversampling: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sources == 0 {
            return Err(Error::InvalidParameter("at least one source is required".into()));
        }
        if !(self.oversampling >= 1.0) || !self.oversampling.is_finite() {
            return Err(Error::InvalidParameter(format!("oversampling must be >= 1, got {}", self.oversampling)));
        }
        match self.side {
            DomainSide::Exterior if !(self.source_scale > 0.0 && self.source_scale < 1.0) => {
                return Err(Error::InvalidParameter(format!(
                    "exterior problems need source_scale in (0, 1), got {}",
                    self.source_scale
                )))
            }
            DomainSide::Interior if !(self.source_scale > 1.0 && self.source_scale.is_finite()) => {
                return Err(Error::InvalidParameter(format!(
                    "interior problems need source_scale > 1, got {}",
                    self.source_scale
                )))
            }
            _ => {}
        }
        kernels::chiral_wavenumbers(self.medium.alpha, self.medium.beta)?;
        self.medium.check_admissible()
    }

    pub fn collocation_count(&self) -> usize {
        (2.0 * self.n_sources as f64 * self.oversampling).ceil() as usize
    }

    pub fn unknowns(&self) -> usize {
        8 * self.n_sources
    }

    fn size(&self) -> f64 {
        self.surface.a.max(self.surface.b).max(self.surface.c)
    }

    /// `f` at a boundary sample.
    pub fn boundary_value(&self, s: &SurfaceSample) -> Result<CVec3> {
        match &self.boundary_data {
            BoundaryData::Zero => Ok(vec3::CZERO3),
            BoundaryData::Exact(field) => {
                let (e, h) = field.fields(s.pos)?;
                Ok(self.boundary_kind.apply(e, h, s.normal))
            }
            BoundaryData::Tangential(f) => f(s),
        }
    }
}

/// Collocation system together with its geometry.
#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub matrix: CMatrix,
    pub rhs: CVector,
    pub sources: Vec<Point3>,
    pub collocation: Vec<SurfaceSample>,
}

/// Source points on the auxiliary ellipsoid.
pub fn source_points(problem: &MfsProblem) -> Result<Vec<Point3>> {
    Ok(sample_surface(&problem.surface, problem.n_sources, problem.source_scale)?.into_iter().map(|s| s.pos).collect())
}

/// Dense collocation system, rows ordered per collocation point as
/// (tangent t1, tangent t2, Sc(P+Q), Sc(P-Q)); columns are the four
/// components of `a_1..a_N` followed by those of `b_1..b_N`.
pub fn assemble_system(problem: &MfsProblem) -> Result<AssembledSystem> {
    problem.validate()?;
    let n = problem.n_sources;
    let sources = source_points(problem)?;
    let collocation = sample_surface(&problem.surface, problem.collocation_count(), 1.0)?;
    let tol = SOURCE_TOLERANCE * problem.size();
    let singular = match &problem.boundary_data {
        BoundaryData::Exact(f) => f.singular_points(),
        _ => Vec::new(),
    };
    for s in &collocation {
        for y in sources.iter().chain(&singular) {
            let d = vec3::norm(vec3::sub(s.pos, *y));
            if d < tol {
                return Err(Error::SourceOnBoundary { distance: d });
            }
        }
    }
    for y0 in &singular {
        for y in &sources {
            let d = vec3::norm(vec3::sub(*y0, *y));
            if d < tol {
                return Err(Error::SourceOnBoundary { distance: d });
            }
        }
    }

    let cols = 8 * n;
    let blocks: Vec<(Vec<Complex64>, [Complex64; 4])> = collocation
        .par_iter()
        .map(|s| -> Result<_> {
            let mut rows = vec![Complex64::new(0.0, 0.0); 4 * cols];
            for (j, y) in sources.iter().enumerate() {
                let x = SpacePoint(vec3::sub(s.pos, *y));
                let ka = kernels::fundamental_solution(problem.medium.alpha1, Sign::Plus, x)?;
                let kb = kernels::fundamental_solution(problem.medium.alpha2, Sign::Minus, x)?;
                for (blk, k) in [(0usize, ka), (1, kb)] {
                    let entries = collocation_entries(&k, blk == 1, s, problem.boundary_kind);
                    let col0 = blk * 4 * n + 4 * j;
                    for r in 0..4 {
                        rows[r * cols + col0..r * cols + col0 + 4].copy_from_slice(&entries[r]);
                    }
                }
            }
            let f = problem.boundary_value(s)?;
            let z = Complex64::new(0.0, 0.0);
            let rhs = [vec3::cdot(f, vec3::to_complex(s.t1)), vec3::cdot(f, vec3::to_complex(s.t2)), z, z];
            Ok((rows, rhs))
        })
        .collect::<Result<_>>()?;

    let nrows = 4 * collocation.len();
    let matrix = CMatrix::from_fn(nrows, cols, |r, c| blocks[r / 4].0[(r % 4) * cols + c]);
    let rhs = CVector::from_fn(nrows, |r, _| blocks[r / 4].1[r % 4]);
    Ok(AssembledSystem { matrix, rhs, sources, collocation })
}

/// The four rows contributed by one kernel at one collocation point, as
/// coefficients of the four components of the multiplied constant.
fn collocation_entries(k: &Biquaternion, minus_block: bool, s: &SurfaceSample, kind: BoundaryKind) -> [[Complex64; 4]; 4] {
    let l = k.left_matrix();
    let sign = if minus_block { -1.0 } else { 1.0 };
    let t1 = vec3::to_complex(s.t1);
    let t2 = vec3::to_complex(s.t2);
    let mut out = [[Complex64::new(0.0, 0.0); 4]; 4];
    for m in 0..4 {
        let col = [l[1][m], l[2][m], l[3][m]];
        let e = vec3::cscale(col, Complex64::new(0.5, 0.0));
        let h = vec3::cscale(col, sign / (2.0 * I));
        let b = kind.apply(e, h, s.normal);
        out[0][m] = vec3::cdot(b, t1);
        out[1][m] = vec3::cdot(b, t2);
        out[2][m] = l[0][m];
        out[3][m] = l[0][m] * sign;
    }
    out
}

/// Solved collocation coefficients.
#[derive(Debug, Clone)]
pub struct MfsSolution {
    pub sources: Vec<Point3>,
    pub coeffs_a: Vec<Biquaternion>,
    pub coeffs_b: Vec<Biquaternion>,
    pub medium: ChiralMedium,
    pub condition: f64,
    pub collocation: Vec<SurfaceSample>,
}

/// Assemble and solve.
pub fn solve(problem: &MfsProblem) -> Result<MfsSolution> {
    let sys = assemble_system(problem)?;
    let dense = linalg::solve_dense(&sys.matrix, &sys.rhs)?;
    let n = problem.n_sources;
    let coeff = |off: usize, j: usize| {
        Biquaternion::from_components([dense.x[off + 4 * j], dense.x[off + 4 * j + 1], dense.x[off + 4 * j + 2], dense.x[off + 4 * j + 3]])
    };
    Ok(MfsSolution {
        coeffs_a: (0..n).map(|j| coeff(0, j)).collect(),
        coeffs_b: (0..n).map(|j| coeff(4 * n, j)).collect(),
        sources: sys.sources,
        medium: problem.medium,
        condition: dense.condition,
        collocation: sys.collocation,
    })
}

/// Reconstructed fields at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldSample {
    pub e: CVec3,
    pub h: CVec3,
    /// `max(|Sc(E combination)|, |Sc(H combination)|)`.
    pub sc_leak: f64,
}

impl MfsSolution {
    /// The two combinations `(P, Q)` at `x`.
    pub fn combinations(&self, x: Point3) -> Result<(Biquaternion, Biquaternion)> {
        let mut p = Biquaternion::ZERO;
        let mut q = Biquaternion::ZERO;
        for (j, y) in self.sources.iter().enumerate() {
            let r = SpacePoint(vec3::sub(x, *y));
            let d = r.radius();
            if d < 1e-12 {
                return Err(Error::SourceSingularity { distance: d });
            }
            p += kernels::fundamental_solution(self.medium.alpha1, Sign::Plus, r)? * self.coeffs_a[j];
            q += kernels::fundamental_solution(self.medium.alpha2, Sign::Minus, r)? * self.coeffs_b[j];
        }
        Ok((p, q))
    }

    pub fn evaluate_fields(&self, x: SpacePoint) -> Result<FieldSample> {
        let (p, q) = self.combinations(x.0)?;
        let ecomb = (p + q) * Complex64::new(0.5, 0.0);
        let hcomb = (p - q) / (2.0 * I);
        Ok(FieldSample { e: ecomb.v, h: hcomb.v, sc_leak: ecomb.s.norm().max(hcomb.s.norm()) })
    }

    /// Largest scalar-part leak over the collocation points.
    pub fn collocation_sc_leak(&self) -> Result<f64> {
        self.collocation
            .par_iter()
            .map(|s| self.evaluate_fields(SpacePoint(s.pos)).map(|f| f.sc_leak))
            .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
    }
}

/// Central-difference residuals of the chiral Maxwell system
/// `rot E = -iα(H + β rot H)`, `rot H = iα(E + β rot E)` at `x`.
pub fn chiral_maxwell_residual<F>(field: F, medium: &ChiralMedium, x: Point3, h: f64) -> Result<(f64, f64)>
where
    F: Fn(Point3) -> Result<(CVec3, CVec3)>,
{
    let mut de = [[Complex64::new(0.0, 0.0); 3]; 3];
    let mut dh = de;
    for k in 0..3 {
        let mut xp = x;
        let mut xm = x;
        xp[k] += h;
        xm[k] -= h;
        let (ep, hp) = field(xp)?;
        let (em, hm) = field(xm)?;
        for c in 0..3 {
            de[k][c] = (ep[c] - em[c]) / (2.0 * h);
            dh[k][c] = (hp[c] - hm[c]) / (2.0 * h);
        }
    }
    let rot = |d: &[[Complex64; 3]; 3]| [d[1][2] - d[2][1], d[2][0] - d[0][2], d[0][1] - d[1][0]];
    let (rot_e, rot_h) = (rot(&de), rot(&dh));
    let (e, hf) = field(x)?;
    let a = medium.alpha;
    let b = medium.beta;
    let r12 = vec3::cadd(rot_e, vec3::cscale(vec3::cadd(hf, vec3::cscale(rot_h, b.into())), I * a));
    let r13 = vec3::csub(rot_h, vec3::cscale(vec3::cadd(e, vec3::cscale(rot_e, b.into())), I * a));
    Ok((vec3::cmax_abs(r12), vec3::cmax_abs(r13)))
}
