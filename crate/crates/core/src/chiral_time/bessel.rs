//! Bessel functions `J0`, `J1` of real argument by the power series.
//!
//! The alternating series loses about `z / ln 10` digits to cancellation, so
//! the partial sums are carried in double-double arithmetic.

use crate::error::{Error, Result};

/// Largest supported argument.
pub const MAX_ARGUMENT: f64 = 40.0;

/// Terms below this fraction of the partial sum stop the series.
const TRUNCATION: f64 = 1e-17;

#[derive(Debug, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn new(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn two_sum(a: f64, b: f64) -> Self {
        let s = a + b;
        let bb = s - a;
        Self { hi: s, lo: (a - (s - bb)) + (b - bb) }
    }

    fn quick(a: f64, b: f64) -> Self {
        let s = a + b;
        Self { hi: s, lo: b - (s - a) }
    }

    fn add(self, o: Self) -> Self {
        let s = Self::two_sum(self.hi, o.hi);
        Self::quick(s.hi, s.lo + self.lo + o.lo)
    }

    fn mul(self, o: Self) -> Self {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        Self::quick(p, e + self.hi * o.lo + self.lo * o.hi)
    }

    fn div_f64(self, d: f64) -> Self {
        let q1 = self.hi / d;
        let p = q1 * d;
        let e = q1.mul_add(d, -p);
        let r = (self.hi - p - e + self.lo) / d;
        Self::quick(q1, r)
    }

    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

/// `J_n(z)` for `n ∈ {0, 1}` and `0 ≤ z ≤ 40`.
pub fn bessel_j(order: u32, z: f64) -> Result<f64> {
    if order > 1 {
        return Err(Error::InvalidParameter(format!("Bessel order {order} is not supported")));
    }
    if !(0.0..=MAX_ARGUMENT).contains(&z) {
        return Err(Error::ArgumentOutOfRange { z });
    }
    let half = Dd::new(z * 0.5);
    let q = half.mul(half).neg();
    let mut term = if order == 0 { Dd::new(1.0) } else { half };
    let mut sum = term;
    let peak = (z * 0.5).ceil() as usize;
    let mut k = 0usize;
    loop {
        let kk = (k + 1) as f64;
        term = q.mul(term).div_f64(kk * (kk + order as f64));
        sum = sum.add(term);
        k += 1;
        if k > peak && term.hi.abs() <= TRUNCATION * sum.hi.abs() {
            break;
        }
        if term.hi == 0.0 || k > 400 {
            break;
        }
    }
    Ok(sum.to_f64())
}

pub fn bessel_j0(z: f64) -> Result<f64> {
    bessel_j(0, z)
}

pub fn bessel_j1(z: f64) -> Result<f64> {
    bessel_j(1, z)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Plain f64 series with a fixed, generous term count; reliable where
    /// cancellation is mild.
    fn naive(order: u32, z: f64) -> f64 {
        let mut term = if order == 0 { 1.0 } else { z / 2.0 };
        let mut sum = term;
        for k in 1..120 {
            term *= -(z * z / 4.0) / (k as f64 * (k as f64 + order as f64));
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

    #[test]
    fn values_at_zero() {
        assert_eq!(bessel_j0(0.0).unwrap(), 1.0);
        assert_eq!(bessel_j1(0.0).unwrap(), 0.0);
    }

    #[test]
    fn first_root_of_j0() {
        let oracle = bisect(|z| naive(0, z), 2.0, 3.0);
        let root = bisect(|z| bessel_j0(z).unwrap(), 2.0, 3.0);
        assert!((root - oracle).abs() < 1e-9);
        assert!((root - 2.404825557695773).abs() < 1e-9);
        assert!(bessel_j0(2.404825557695773).unwrap().abs() < 1e-9);
    }

    #[test]
    fn reference_values() {
        // 30-digit reference values
        let cases = [
            (0, 0.5, 0.938469807240812904228404673599713),
            (0, 10.0, -0.245935764451348335197760862485329),
            (0, 25.0, 0.0962667832759581161735033407540245),
            (0, 39.5, 0.0672680985097538596732556004813087),
            (1, 0.5, 0.242268457674873886383954576141532),
            (1, 2.404825557695773, 0.519147497289466762738088793789114),
            (1, 10.0, 0.0434727461688614366697487680258593),
            (1, 25.0, -0.125350249580289904651809271057251),
            (1, 39.5, 0.108519946401141579797329270564843),
        ];
        for (n, z, v) in cases {
            let got = bessel_j(n, z).unwrap();
            assert!((got - v).abs() <= 1e-10 * v.abs(), "J{n}({z}) = {got} vs {v}");
        }
    }

    #[test]
    fn agrees_with_naive_series_for_small_arguments() {
        for i in 0..50 {
            let z = i as f64 * 0.1;
            for n in 0..2 {
                assert!((bessel_j(n, z).unwrap() - naive(n, z)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn out_of_range() {
        assert!(matches!(bessel_j0(40.5), Err(Error::ArgumentOutOfRange { .. })));
        assert!(matches!(bessel_j1(-1.0), Err(Error::ArgumentOutOfRange { .. })));
        assert!(bessel_j(2, 1.0).is_err());
    }
}
