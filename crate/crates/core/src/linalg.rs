//! Dense complex solves for collocation systems.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative pivot threshold for [`Error::SingularMatrix`].
pub const PIVOT_TOLERANCE: f64 = 1e-14;

/// Condition estimates above this trigger a warning.
pub const CONDITION_WARNING: f64 = 1e13;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    Lu,
    LeastSquares,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseSolution {
    pub x: CVector,
    /// 1-norm condition estimate for square systems, ratio of extreme
    /// singular values of R for least squares.
    pub condition: f64,
    pub method: SolveMethod,
}

fn max_row_norm(a: &CMatrix) -> f64 {
    a.row_iter().map(|r| r.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

fn one_norm(a: &CMatrix) -> f64 {
    a.column_iter().map(|c| c.iter().map(|z| z.norm()).sum::<f64>()).fold(0.0, f64::max)
}

fn check_pivots<'a>(diag: impl Iterator<Item = &'a Complex64>, threshold: f64) -> Result<()> {
    for d in diag {
        if !(d.norm() >= threshold) {
            return Err(Error::SingularMatrix { pivot: d.norm(), threshold });
        }
    }
    Ok(())
}

/// Solve `A x = b`: partial-pivot LU for square `A`, Householder QR least
/// squares when `A` has more rows than columns.
pub fn solve_dense(a: &CMatrix, b: &CVector) -> Result<DenseSolution> {
    let (rows, cols) = a.shape();
    if rows != b.len() {
        return Err(Error::InvalidParameter(format!("matrix has {rows} rows but rhs has {}", b.len())));
    }
    if rows < cols || cols == 0 {
        return Err(Error::InvalidParameter(format!("cannot solve a {rows}x{cols} system")));
    }
    let threshold = PIVOT_TOLERANCE * max_row_norm(a);
    let sol = if rows == cols {
        let lu = a.clone().lu();
        let u = lu.u();
        check_pivots(u.diagonal().iter(), threshold)?;
        let x = lu.solve(b).ok_or(Error::SingularMatrix { pivot: 0.0, threshold })?;
        let inv = lu.try_inverse().ok_or(Error::SingularMatrix { pivot: 0.0, threshold })?;
        DenseSolution { x, condition: one_norm(a) * one_norm(&inv), method: SolveMethod::Lu }
    } else {
        let qr = a.clone().qr();
        let r = qr.r();
        check_pivots(r.diagonal().iter(), threshold)?;
        let qtb = qr.q().adjoint() * b;
        let x = r.solve_upper_triangular(&qtb).ok_or(Error::SingularMatrix { pivot: 0.0, threshold })?;
        let sv = r.singular_values();
        let (mx, mn) = sv.iter().fold((0.0f64, f64::INFINITY), |(mx, mn), &s| (mx.max(s), mn.min(s)));
        DenseSolution { x, condition: mx / mn, method: SolveMethod::LeastSquares }
    };
    if sol.condition > CONDITION_WARNING {
        log::warn!(
            "condition estimate {:.3e}: the wavenumber may be close to a Dirichlet eigenvalue of the auxiliary domain",
            sol.condition
        );
    }
    Ok(sol)
}

/// `‖A x − b‖₂ / ‖b‖₂`.
pub fn relative_residual(a: &CMatrix, x: &CVector, b: &CVector) -> f64 {
    (a * x - b).norm() / b.norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize) -> CMatrix {
        CMatrix::from_fn(r, c, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
    }

    #[test]
    fn identity_system() {
        let a = CMatrix::identity(5, 5);
        let mut b = CVector::zeros(5);
        b[0] = Complex64::new(1.0, 0.0);
        let s = solve_dense(&a, &b).unwrap();
        assert_eq!(s.x, b);
        assert!((s.condition - 1.0).abs() < 1e-15);
    }

    #[test]
    fn random_square_system() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_matrix(&mut rng, 16, 16) + CMatrix::identity(16, 16) * Complex64::new(4.0, 0.0);
        let b = random_matrix(&mut rng, 16, 1).column(0).into_owned();
        let s = solve_dense(&a, &b).unwrap();
        assert_eq!(s.method, SolveMethod::Lu);
        assert!(relative_residual(&a, &s.x, &b) <= 1e-12);
    }

    #[test]
    fn least_squares_consistent_system() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_matrix(&mut rng, 30, 12);
        let x0 = random_matrix(&mut rng, 12, 1).column(0).into_owned();
        let b = &a * &x0;
        let s = solve_dense(&a, &b).unwrap();
        assert_eq!(s.method, SolveMethod::LeastSquares);
        assert!((&s.x - &x0).norm() < 1e-12 * x0.norm());
    }

    #[test]
    fn duplicated_row_is_singular() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut a = random_matrix(&mut rng, 8, 8);
        let row = a.row(2).into_owned();
        a.set_row(5, &row);
        let b = CVector::from_element(8, Complex64::new(1.0, 0.0));
        assert!(matches!(solve_dense(&a, &b), Err(Error::SingularMatrix { .. })));
    }

    #[test]
    fn underdetermined_is_rejected() {
        let a = CMatrix::zeros(2, 3);
        let b = CVector::zeros(2);
        assert!(matches!(solve_dense(&a, &b), Err(Error::InvalidParameter(_))));
    }
}
