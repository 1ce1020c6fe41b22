//! Ellipsoidal surfaces, quasi-uniform spiral sampling and tangent frames.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::vec3::{self, Point3};

/// Smallest admissible `sin ν` of a sample.
const POLE_TOLERANCE: f64 = 1e-12;

/// `x1 = a cos η sin ν, x2 = b sin η sin ν, x3 = c cos ν`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ellipsoid {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Ellipsoid {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0 && c > 0.0) || !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(Error::InvalidParameter(format!("semi-axes must be positive, got ({a}, {b}, {c})")));
        }
        Ok(Self { a, b, c })
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { a: self.a * s, b: self.b * s, c: self.c * s }
    }

    /// Level-set value `(x/a)² + (y/b)² + (z/c)²`; below 1 inside.
    pub fn level(&self, x: Point3) -> f64 {
        (x[0] / self.a).powi(2) + (x[1] / self.b).powi(2) + (x[2] / self.c).powi(2)
    }

    /// Sample at parameters `(η, ν)`.
    pub fn sample(&self, eta: f64, nu: f64) -> Result<SurfaceSample> {
        let (se, ce) = eta.sin_cos();
        let (sn, cn) = nu.sin_cos();
        if sn.abs() < POLE_TOLERANCE {
            return Err(Error::DegenerateSample { nu });
        }
        let pos = [self.a * ce * sn, self.b * se * sn, self.c * cn];
        let d_eta = [-self.a * se * sn, self.b * ce * sn, 0.0];
        let d_nu = [self.a * ce * cn, self.b * se * cn, -self.c * sn];
        let t1 = vec3::normalize(d_eta);
        let mut t2 = vec3::normalize(vec3::sub(d_nu, vec3::scale(t1, vec3::dot(d_nu, t1))));
        let mut normal = vec3::cross(t1, t2);
        let gradient_dir = [pos[0] / (self.a * self.a), pos[1] / (self.b * self.b), pos[2] / (self.c * self.c)];
        if vec3::dot(normal, gradient_dir) < 0.0 {
            t2 = vec3::scale(t2, -1.0);
            normal = vec3::scale(normal, -1.0);
        }
        Ok(SurfaceSample { pos, normal, t1, t2 })
    }
}

/// Surface point with outward unit normal and orthonormal tangent frame,
/// `normal = t1 × t2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceSample {
    pub pos: Point3,
    pub normal: Point3,
    pub t1: Point3,
    pub t2: Point3,
}

/// `count` points on the ellipsoid with semi-axes scaled by `scale`, placed on
/// a golden-angle spiral: `cos ν_k = 1 - 2(k+½)/count`, `η_k = k π(3-√5) mod 2π`.
pub fn sample_surface(surface: &Ellipsoid, count: usize, scale: f64) -> Result<Vec<SurfaceSample>> {
    if count == 0 {
        return Err(Error::InvalidParameter("sample count must be at least 1".into()));
    }
    if !(scale > 0.0) {
        return Err(Error::InvalidParameter(format!("surface scale must be positive, got {scale}")));
    }
    let s = surface.scaled(scale);
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| {
            let nu = (1.0 - 2.0 * (k as f64 + 0.5) / count as f64).acos();
            let eta = (k as f64 * golden).rem_euclid(2.0 * PI);
            s.sample(eta, nu)
        })
        .collect()
}

/// Tensor grid `η = 2πi/n_eta`, `ν = (j+½)π/n_nu` on the scaled ellipsoid; poles are never hit.
pub fn evaluation_grid(surface: &Ellipsoid, scale: f64, n_eta: usize, n_nu: usize) -> Result<Vec<SurfaceSample>> {
    if n_eta == 0 || n_nu == 0 {
        return Err(Error::InvalidParameter("evaluation grid needs at least one point per direction".into()));
    }
    let s = surface.scaled(scale);
    let mut out = Vec::with_capacity(n_eta * n_nu);
    for j in 0..n_nu {
        let nu = (j as f64 + 0.5) * PI / n_nu as f64;
        for i in 0..n_eta {
            out.push(s.sample(2.0 * PI * i as f64 / n_eta as f64, nu)?);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: Point3, b: Point3) -> bool {
        (0..3).all(|k| (a[k] - b[k]).abs() < 1e-12)
    }

    #[test]
    fn equator_point_on_long_axis() {
        let s = Ellipsoid::new(5.0, 3.0, 2.0).unwrap().sample(0.0, PI / 2.0).unwrap();
        assert!(close(s.pos, [5.0, 0.0, 0.0]));
        assert!(close(s.normal, [1.0, 0.0, 0.0]));
    }

    #[test]
    fn frames_are_orthonormal_and_outward() {
        let e = Ellipsoid::new(5.0, 3.0, 2.0).unwrap();
        for s in sample_surface(&e, 70, 1.0).unwrap() {
            assert!((e.level(s.pos) - 1.0).abs() < 1e-12);
            assert!((vec3::norm(s.normal) - 1.0).abs() < 1e-12);
            assert!(vec3::dot(s.normal, s.t1).abs() < 1e-12 && vec3::dot(s.t1, s.t2).abs() < 1e-12);
            assert!(close(vec3::cross(s.t1, s.t2), s.normal));
            // outward: stepping along the normal leaves the ellipsoid
            assert!(e.level(vec3::add(s.pos, vec3::scale(s.normal, 1e-3))) > 1.0);
        }
    }

    #[test]
    fn scaled_samples_stay_in_box() {
        let e = Ellipsoid::new(5.0, 3.0, 2.0).unwrap();
        for s in sample_surface(&e, 35, 0.15).unwrap() {
            assert!(s.pos[0].abs() <= 0.75 + 1e-12 && s.pos[1].abs() <= 0.45 + 1e-12 && s.pos[2].abs() <= 0.30 + 1e-12);
        }
    }

    #[test]
    fn spiral_has_no_duplicates() {
        let e = Ellipsoid::new(5.0, 3.0, 2.0).unwrap();
        let pts = sample_surface(&e, 70, 1.0).unwrap();
        for i in 0..pts.len() {
            for j in 0..i {
                assert!(vec3::norm(vec3::sub(pts[i].pos, pts[j].pos)) > 1e-3);
            }
        }
    }

    #[test]
    fn poles_are_rejected() {
        let e = Ellipsoid::new(1.0, 1.0, 1.0).unwrap();
        assert!(matches!(e.sample(0.3, 0.0), Err(Error::DegenerateSample { .. })));
        assert!(matches!(e.sample(0.3, PI), Err(Error::DegenerateSample { .. })));
        assert!(Ellipsoid::new(1.0, -1.0, 1.0).is_err());
        assert!(sample_surface(&e, 0, 1.0).is_err());
    }

    #[test]
    fn evaluation_grid_size() {
        let e = Ellipsoid::new(5.0, 3.0, 2.0).unwrap();
        let g = evaluation_grid(&e, 5.0, 24, 12).unwrap();
        assert_eq!(g.len(), 288);
        assert!(g.iter().all(|s| (e.scaled(5.0).level(s.pos) - 1.0).abs() < 1e-12));
    }
}
