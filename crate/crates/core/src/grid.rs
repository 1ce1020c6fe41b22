//! Uniform 3D lattices carrying complex or biquaternion samples, and their
//! time-sampled counterparts.
//!
//! Every grid records a `margin`: the number of boundary layers whose values
//! are not defined. Stencil operators widen the margin by their reach, and
//! norms only ever look at the valid interior.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use rayon::prelude::*;

use crate::algebra::Biquaternion;
use crate::error::{Error, Result};
use crate::vec3::Point3;

/// Smallest admissible node count along any axis.
pub const MIN_NODES: usize = 5;

/// Values that live on grid nodes.
pub trait GridValue:
    Copy + Default + Send + Sync + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self>
{
    fn max_abs(&self) -> f64;
}

impl GridValue for Complex64 {
    fn max_abs(&self) -> f64 {
        self.norm()
    }
}

impl GridValue for Biquaternion {
    fn max_abs(&self) -> f64 {
        Biquaternion::max_abs(self)
    }
}

/// Uniformly spaced lattice `origin + h (i, j, k)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub origin: Point3,
    pub h: f64,
    pub dims: [usize; 3],
}

impl Lattice {
    pub fn new(origin: Point3, h: f64, dims: [usize; 3]) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid spacing must be positive, got {h}")));
        }
        if dims.iter().any(|&d| d < MIN_NODES) {
            return Err(Error::GridTooSmall {
                what: format!("dims {dims:?}; at least {MIN_NODES} nodes per axis are required"),
            });
        }
        Ok(Self { origin, h, dims })
    }

    /// Cube of edge `side` centred at `center`, `round(side/h) + 1` nodes per axis.
    pub fn cube(center: Point3, side: f64, h: f64) -> Result<Self> {
        let n = (side / h).round() as usize + 1;
        let half = 0.5 * h * (n - 1) as f64;
        let origin = [center[0] - half, center[1] - half, center[2] - half];
        Self::new(origin, h, [n; 3])
    }

    pub fn len(&self) -> usize {
        self.dims[0] * self.dims[1] * self.dims[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn stride(&self, axis: usize) -> usize {
        match axis {
            0 => self.dims[1] * self.dims[2],
            1 => self.dims[2],
            _ => 1,
        }
    }

    pub fn index(&self, node: [usize; 3]) -> usize {
        node[0] * self.stride(0) + node[1] * self.stride(1) + node[2]
    }

    pub fn node(&self, index: usize) -> [usize; 3] {
        let k = index % self.dims[2];
        let j = (index / self.dims[2]) % self.dims[1];
        let i = index / (self.dims[1] * self.dims[2]);
        [i, j, k]
    }

    pub fn point(&self, node: [usize; 3]) -> Point3 {
        [
            self.origin[0] + self.h * node[0] as f64,
            self.origin[1] + self.h * node[1] as f64,
            self.origin[2] + self.h * node[2] as f64,
        ]
    }

    /// Node closest to `x`, clamped into the lattice.
    pub fn nearest_node(&self, x: Point3) -> [usize; 3] {
        let mut node = [0; 3];
        for a in 0..3 {
            let t = ((x[a] - self.origin[a]) / self.h).round();
            node[a] = t.clamp(0.0, (self.dims[a] - 1) as f64) as usize;
        }
        node
    }

    fn is_inside(&self, node: [usize; 3], margin: usize) -> bool {
        (0..3).all(|a| node[a] >= margin && node[a] + margin < self.dims[a])
    }

    fn interior_exists(&self, margin: usize) -> bool {
        self.dims.iter().all(|&d| d > 2 * margin)
    }
}

/// Samples of type `T` on a [`Lattice`].
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    lattice: Lattice,
    margin: usize,
    values: Vec<T>,
}

pub type ScalarGrid = Grid<Complex64>;
pub type QuaternionGrid = Grid<Biquaternion>;

impl<T: GridValue> Grid<T> {
    pub fn from_fn<F>(lattice: Lattice, f: F) -> Self
    where
        F: Fn(Point3) -> T + Sync,
    {
        let values = (0..lattice.len())
            .into_par_iter()
            .map(|idx| f(lattice.point(lattice.node(idx))))
            .collect();
        Self { lattice, margin: 0, values }
    }

    pub fn from_values(lattice: Lattice, margin: usize, values: Vec<T>) -> Result<Self> {
        if values.len() != lattice.len() {
            return Err(Error::InvalidParameter(format!(
                "expected {} values, got {}",
                lattice.len(),
                values.len()
            )));
        }
        Ok(Self { lattice, margin, values })
    }

    pub fn constant(lattice: Lattice, value: T) -> Self {
        Self { lattice, margin: 0, values: vec![value; lattice.len()] }
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn margin(&self) -> usize {
        self.margin
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn get(&self, node: [usize; 3]) -> T {
        self.values[self.lattice.index(node)]
    }

    pub fn is_valid(&self, node: [usize; 3]) -> bool {
        self.lattice.is_inside(node, self.margin)
    }

    /// Nodes whose values are defined.
    pub fn valid_nodes(&self) -> impl Iterator<Item = [usize; 3]> + '_ {
        let m = self.margin;
        let d = self.lattice.dims;
        (m..d[0].saturating_sub(m)).flat_map(move |i| {
            (m..d[1].saturating_sub(m)).flat_map(move |j| (m..d[2].saturating_sub(m)).map(move |k| [i, j, k]))
        })
    }

    /// Grid with at least `margin` invalid layers.
    pub fn with_margin(mut self, margin: usize) -> Self {
        self.margin = self.margin.max(margin);
        self
    }

    pub fn map<U: GridValue, F: Fn(T) -> U + Sync>(&self, f: F) -> Grid<U> {
        let values = self.values.par_iter().map(|&v| f(v)).collect();
        Grid { lattice: self.lattice, margin: self.margin, values }
    }

    /// Nodewise combination; the result is valid where both inputs are.
    pub fn zip_with<U, V, F>(&self, other: &Grid<U>, f: F) -> Result<Grid<V>>
    where
        U: GridValue,
        V: GridValue,
        F: Fn(T, U) -> V + Sync,
    {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch);
        }
        let values = self.values.par_iter().zip(other.values.par_iter()).map(|(&a, &b)| f(a, b)).collect();
        Ok(Grid { lattice: self.lattice, margin: self.margin.max(other.margin), values })
    }

    /// Second-order central difference along `axis`; widens the margin by one.
    pub fn partial(&self, axis: usize) -> Result<Self> {
        self.stencil(1, |values, idx, lat| {
            let s = lat.stride(axis);
            (values[idx + s] - values[idx - s]) * (0.5 / lat.h)
        })
    }

    /// Compact seven-point Laplacian; widens the margin by one.
    pub fn laplacian(&self) -> Result<Self> {
        self.stencil(1, |values, idx, lat| {
            let centre = values[idx];
            let mut acc = centre * -6.0;
            for axis in 0..3 {
                let s = lat.stride(axis);
                acc = acc + values[idx + s] + values[idx - s];
            }
            acc * (1.0 / (lat.h * lat.h))
        })
    }

    fn stencil<F>(&self, reach: usize, op: F) -> Result<Self>
    where
        F: Fn(&[T], usize, &Lattice) -> T + Sync,
    {
        let margin = self.margin + reach;
        if !self.lattice.interior_exists(margin) {
            return Err(Error::GridTooSmall {
                what: format!("dims {:?} leave no interior at margin {margin}", self.lattice.dims),
            });
        }
        let lat = self.lattice;
        let values = (0..lat.len())
            .into_par_iter()
            .map(|idx| {
                if lat.is_inside(lat.node(idx), margin) {
                    op(&self.values, idx, &lat)
                } else {
                    T::default()
                }
            })
            .collect();
        Ok(Self { lattice: lat, margin, values })
    }

    /// Maximum componentwise modulus over valid nodes.
    pub fn max_norm(&self) -> f64 {
        self.valid_nodes().map(|n| self.get(n).max_abs()).fold(0.0, f64::max)
    }

    pub fn min_norm(&self) -> f64 {
        self.valid_nodes().map(|n| self.get(n).max_abs()).fold(f64::INFINITY, f64::min)
    }
}

impl<T: GridValue> Add for &Grid<T> {
    type Output = Result<Grid<T>>;
    fn add(self, rhs: Self) -> Result<Grid<T>> {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl<T: GridValue> Sub for &Grid<T> {
    type Output = Result<Grid<T>>;
    fn sub(self, rhs: Self) -> Result<Grid<T>> {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl ScalarGrid {
    /// `g` embedded as the scalar part of a biquaternion field.
    pub fn to_quaternion(&self) -> QuaternionGrid {
        self.map(Biquaternion::scalar)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        self.map(|v| v * s)
    }
}

impl QuaternionGrid {
    pub fn scalar_part(&self) -> ScalarGrid {
        self.map(|q| q.s)
    }

    pub fn vector_part(&self) -> QuaternionGrid {
        self.map(|q| q.vec())
    }

    pub fn component(&self, k: usize) -> ScalarGrid {
        self.map(move |q| q.components()[k])
    }

    pub fn quat_conj(&self) -> Self {
        self.map(|q| q.quat_conj())
    }

    pub fn complex_conj(&self) -> Self {
        self.map(|q| q.complex_conj())
    }

    /// Every valid node has a purely real vector value.
    pub fn is_real_vector(&self) -> bool {
        self.valid_nodes()
            .all(|n| self.get(n).components().iter().all(|c| c.im == 0.0) && self.get(n).s == Complex64::new(0.0, 0.0))
    }

    /// Nodewise product with a scalar field on the left.
    pub fn scale_by(&self, s: &ScalarGrid) -> Result<Self> {
        self.zip_with(s, |q, c| q * c)
    }
}

/// Time slices `t0 + n ht`, `n = 0..nt`, of a biquaternion field on one lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeGrid {
    t0: f64,
    ht: f64,
    time_margin: usize,
    slices: Vec<QuaternionGrid>,
}

impl SpaceTimeGrid {
    pub fn from_fn<F>(lattice: Lattice, t0: f64, ht: f64, nt: usize, f: F) -> Result<Self>
    where
        F: Fn(f64, Point3) -> Biquaternion + Sync,
    {
        if nt == 0 || !(ht > 0.0) {
            return Err(Error::InvalidParameter(format!("need nt >= 1 and ht > 0 (nt = {nt}, ht = {ht})")));
        }
        let slices = (0..nt)
            .map(|n| {
                let t = t0 + ht * n as f64;
                QuaternionGrid::from_fn(lattice, |x| f(t, x))
            })
            .collect();
        Ok(Self { t0, ht, time_margin: 0, slices })
    }

    pub fn from_slices(t0: f64, ht: f64, time_margin: usize, slices: Vec<QuaternionGrid>) -> Result<Self> {
        let first = slices.first().ok_or_else(|| Error::InvalidParameter("no time slices".into()))?;
        if slices.iter().any(|s| s.lattice() != first.lattice()) {
            return Err(Error::LatticeMismatch);
        }
        Ok(Self { t0, ht, time_margin, slices })
    }

    pub fn lattice(&self) -> &Lattice {
        self.slices[0].lattice()
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn ht(&self) -> f64 {
        self.ht
    }

    pub fn nt(&self) -> usize {
        self.slices.len()
    }

    pub fn time_margin(&self) -> usize {
        self.time_margin
    }

    pub fn slices(&self) -> &[QuaternionGrid] {
        &self.slices
    }

    pub fn slice(&self, n: usize) -> &QuaternionGrid {
        &self.slices[n]
    }

    pub fn time(&self, n: usize) -> f64 {
        self.t0 + self.ht * n as f64
    }

    /// Indices of slices with defined values.
    pub fn valid_times(&self) -> std::ops::Range<usize> {
        self.time_margin..self.nt().saturating_sub(self.time_margin)
    }

    pub fn map_slices<F>(&self, f: F) -> Result<Self>
    where
        F: Fn(&QuaternionGrid) -> Result<QuaternionGrid>,
    {
        let slices = self.slices.iter().map(f).collect::<Result<Vec<_>>>()?;
        Ok(Self { t0: self.t0, ht: self.ht, time_margin: self.time_margin, slices })
    }

    pub fn zip_with<F>(&self, other: &Self, f: F) -> Result<Self>
    where
        F: Fn(Biquaternion, Biquaternion) -> Biquaternion + Sync,
    {
        if self.nt() != other.nt() || self.t0 != other.t0 || self.ht != other.ht {
            return Err(Error::LatticeMismatch);
        }
        let slices = self
            .slices
            .iter()
            .zip(&other.slices)
            .map(|(a, b)| a.zip_with(b, &f))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { t0: self.t0, ht: self.ht, time_margin: self.time_margin.max(other.time_margin), slices })
    }

    pub fn map<F>(&self, f: F) -> Self
    where
        F: Fn(Biquaternion) -> Biquaternion + Sync,
    {
        let slices = self.slices.iter().map(|s| s.map(&f)).collect();
        Self { t0: self.t0, ht: self.ht, time_margin: self.time_margin, slices }
    }

    /// Central difference in time; widens the time margin by one.
    pub fn time_derivative(&self) -> Result<Self> {
        let margin = self.time_margin + 1;
        if self.nt() <= 2 * margin {
            return Err(Error::GridTooSmall {
                what: format!("{} time slices leave no interior at time margin {margin}", self.nt()),
            });
        }
        let scale = 0.5 / self.ht;
        let mut slices = Vec::with_capacity(self.nt());
        for n in 0..self.nt() {
            if n >= margin && n + margin < self.nt() {
                slices.push((&self.slices[n + 1] - &self.slices[n - 1])?.map(|q| q * scale));
            } else {
                slices.push(QuaternionGrid::constant(*self.lattice(), Biquaternion::ZERO).with_margin(usize::MAX / 4));
            }
        }
        // Invalid slices carry a huge margin; keep the spatial margins of the valid ones.
        Ok(Self { t0: self.t0, ht: self.ht, time_margin: margin, slices })
    }

    /// Maximum componentwise modulus over valid slices and nodes.
    pub fn max_norm(&self) -> f64 {
        self.valid_times().map(|n| self.slices[n].max_norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lattice_indexing_round_trips() {
        let lat = Lattice::new([0.0, 1.0, 2.0], 0.1, [5, 6, 7]).unwrap();
        for idx in [0, 17, 100, lat.len() - 1] {
            assert_eq!(lat.index(lat.node(idx)), idx);
        }
        let p = lat.point([1, 2, 3]);
        assert!((p[0] - 0.1).abs() < 1e-15 && (p[1] - 1.2).abs() < 1e-15 && (p[2] - 2.3).abs() < 1e-15);
        assert!(matches!(Lattice::new([0.0; 3], 0.1, [4, 5, 5]), Err(Error::GridTooSmall { .. })));
    }

    #[test]
    fn cube_is_centred() {
        let lat = Lattice::cube([1.0, 1.0, 1.0], 0.5, 0.05).unwrap();
        assert_eq!(lat.dims, [11; 3]);
        let c = lat.point([5, 5, 5]);
        assert!(c.iter().all(|&v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn partial_of_linear_is_exact() {
        let lat = Lattice::new([0.0; 3], 0.1, [6, 6, 6]).unwrap();
        let g = ScalarGrid::from_fn(lat, |x| Complex64::new(2.0 * x[1] - x[2], 0.0));
        let dy = g.partial(1).unwrap();
        assert_eq!(dy.margin(), 1);
        assert!(dy.valid_nodes().all(|n| (dy.get(n) - Complex64::new(2.0, 0.0)).norm() < 1e-12));
        assert_eq!(dy.valid_nodes().count(), 4 * 4 * 4);
        let two = dy.partial(0).unwrap();
        assert!(matches!(two.partial(0), Err(Error::GridTooSmall { .. })));
    }

    #[test]
    fn zip_requires_same_lattice() {
        let a = ScalarGrid::constant(Lattice::new([0.0; 3], 0.1, [5; 3]).unwrap(), Complex64::new(1.0, 0.0));
        let b = ScalarGrid::constant(Lattice::new([0.0; 3], 0.2, [5; 3]).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(&a - &b, Err(Error::LatticeMismatch));
    }

    #[test]
    fn time_derivative_of_linear_signal() {
        let lat = Lattice::new([0.0; 3], 0.1, [5; 3]).unwrap();
        let f = SpaceTimeGrid::from_fn(lat, 0.0, 0.01, 5, |t, _| Biquaternion::scalar(3.0 * t)).unwrap();
        let d = f.time_derivative().unwrap();
        assert_eq!(d.valid_times(), 1..4);
        assert!((d.max_norm() - 3.0).abs() < 1e-12);
    }
}
