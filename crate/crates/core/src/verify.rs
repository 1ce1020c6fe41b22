//! Refinement-study helpers shared by tests, the check suites and the CLI.

/// Accepted window for the residual ratio when the grid spacing is halved.
pub const RATIO_WINDOW: (f64, f64) = (3.2, 4.8);

/// Residuals below this level are treated as exact (round-off only).
pub const ROUNDOFF_FLOOR: f64 = 1e-10;

/// Residuals measured at spacing `h` and `h/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Refinement {
    pub coarse: f64,
    pub fine: f64,
}

impl Refinement {
    pub fn new(coarse: f64, fine: f64) -> Self {
        Self { coarse, fine }
    }

    pub fn ratio(&self) -> f64 {
        self.coarse / self.fine
    }

    pub fn observed_order(&self) -> f64 {
        self.ratio().log2()
    }

    /// Both levels vanish to round-off.
    pub fn is_exact(&self) -> bool {
        self.coarse <= ROUNDOFF_FLOOR && self.fine <= ROUNDOFF_FLOOR
    }

    /// Second-order convergence: the ratio lies in [`RATIO_WINDOW`], or the
    /// residual is exact at both levels.
    pub fn is_second_order(&self) -> bool {
        if self.is_exact() {
            return true;
        }
        let r = self.ratio();
        r >= RATIO_WINDOW.0 && r <= RATIO_WINDOW.1
    }

    /// Convergence of second order or faster: the ratio is at least the lower
    /// end of [`RATIO_WINDOW`], or the residual is exact at both levels.
    pub fn is_at_least_second_order(&self) -> bool {
        self.is_exact() || self.ratio() >= RATIO_WINDOW.0
    }
}

/// Ratios across a chain of residuals at successively halved spacings.
pub fn refinement_chain(residuals: &[f64]) -> Vec<Refinement> {
    residuals.windows(2).map(|w| Refinement::new(w[0], w[1])).collect()
}
