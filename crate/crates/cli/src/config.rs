//! JSON experiment configuration.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use biquat::kernels::ChiralMedium;
use biquat::scattering::{default_moment, BoundaryKind, Ellipsoid, SelfTestSource, SweepSetup, BENCHMARK_N};
use biquat::suites::{Suite, DEFAULT_SEED};
use biquat::Complex64;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// One configuration document; every section is optional.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub seed: Option<u64>,
    pub threads: Option<usize>,
    pub format: Option<Format>,
    pub out: Option<PathBuf>,
    pub scatter: ScatterConfig,
    pub check: CheckConfig,
    pub green_eval: GreenEvalConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SemiAxes {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BoundaryConfig {
    Pec,
    Impedance { xi: [f64; 2] },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProblemKind {
    Dipole,
    ChiralSelftest,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SourceConfig {
    pub center: [f64; 3],
    pub moment_plus: [f64; 3],
    pub moment_minus: [f64; 3],
}

impl Default for SourceConfig {
    fn default() -> Self {
        let s = SelfTestSource::default();
        Self { center: s.center, moment_plus: s.moment_plus, moment_minus: s.moment_minus }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScatterConfig {
    pub problem: ProblemKind,
    pub ellipsoid: SemiAxes,
    /// `[re, im]`
    pub alpha: [f64; 2],
    pub beta: f64,
    pub source_scale: f64,
    pub eval_scale: f64,
    pub n_list: Vec<usize>,
    pub moment: [f64; 3],
    pub boundary: BoundaryConfig,
    pub oversampling: f64,
    pub eval_grid: [usize; 2],
    pub boundary_grid: [usize; 2],
    pub source: SourceConfig,
}

impl Default for ScatterConfig {
    fn default() -> Self {
        Self {
            problem: ProblemKind::Dipole,
            ellipsoid: SemiAxes { a: 5.0, b: 3.0, c: 2.0 },
            alpha: [1.0, 0.3],
            beta: 0.0,
            source_scale: 0.15,
            eval_scale: 5.0,
            n_list: BENCHMARK_N.to_vec(),
            moment: default_moment(),
            boundary: BoundaryConfig::Pec,
            oversampling: 1.0,
            eval_grid: [24, 12],
            boundary_grid: [24, 12],
            source: SourceConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CheckConfig {
    pub suite: String,
    pub algebra_samples: usize,
    pub green_points: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self { suite: "all".into(), algebra_samples: 10_000, green_points: 4 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GreenEvalConfig {
    pub t: f64,
    pub x: [f64; 3],
    pub beta: f64,
    pub eps: f64,
    pub mu: f64,
    /// Print a residual refinement table instead of the value.
    pub sweep: bool,
    pub steps: Vec<f64>,
}

impl Default for GreenEvalConfig {
    fn default() -> Self {
        Self { t: 1.0, x: [0.6, 0.5, 0.4], beta: 1.0, eps: 1.0, mu: 1.0, sweep: false, steps: vec![0.04, 0.02, 0.01] }
    }
}

fn bad(field: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("{field}: {msg}"))
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::Config(format!("{path}: {}", e.into_inner()))
        })
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    /// SHA-256 of the experiment-defining part (sections and seed).
    pub fn digest(&self) -> String {
        use sha2::{Digest, Sha256};
        let key = serde_json::json!({
            "seed": self.seed(),
            "scatter": self.scatter,
            "check": self.check,
            "green_eval": self.green_eval,
        });
        let bytes = Sha256::digest(key.to_string().as_bytes());
        bytes.iter().map(|b| format!("{b:02x}")).collect()
    }
}

impl ScatterConfig {
    pub fn alpha(&self) -> Complex64 {
        Complex64::new(self.alpha[0], self.alpha[1])
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let e = self.ellipsoid;
        for (name, v) in [("a", e.a), ("b", e.b), ("c", e.c)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(bad(&format!("scatter.ellipsoid.{name}"), "semi-axis must be positive"));
            }
        }
        if !(self.source_scale > 0.0 && self.source_scale < 1.0) {
            return Err(bad("scatter.source_scale", "must lie in (0, 1) for an exterior problem"));
        }
        if !(self.eval_scale > 1.0 && self.eval_scale.is_finite()) {
            return Err(bad("scatter.eval_scale", "must exceed 1"));
        }
        if !(self.alpha.iter().all(|v| v.is_finite()) && self.alpha[1] >= 0.0) {
            return Err(bad("scatter.alpha", "needs finite components and Im(alpha) >= 0"));
        }
        if self.alpha() == Complex64::new(0.0, 0.0) {
            return Err(bad("scatter.alpha", "must be nonzero"));
        }
        if !self.beta.is_finite() {
            return Err(bad("scatter.beta", "must be finite"));
        }
        if self.problem == ProblemKind::Dipole && self.beta != 0.0 {
            return Err(bad("scatter.beta", "the dipole benchmark is achiral; use problem \"chiral_selftest\" for beta != 0"));
        }
        ChiralMedium::with_alpha(self.alpha(), self.beta).map_err(|err| bad("scatter.beta", err))?;
        if self.n_list.is_empty() || self.n_list.contains(&0) {
            return Err(bad("scatter.n_list", "needs at least one positive source count"));
        }
        if !(self.oversampling >= 1.0 && self.oversampling.is_finite()) {
            return Err(bad("scatter.oversampling", "must be at least 1"));
        }
        for (name, g) in [("scatter.eval_grid", self.eval_grid), ("scatter.boundary_grid", self.boundary_grid)] {
            if g[0] < 1 || g[1] < 1 {
                return Err(bad(name, "counts must be positive"));
            }
        }
        if let BoundaryConfig::Impedance { xi } = self.boundary {
            if !xi.iter().all(|v| v.is_finite()) {
                return Err(bad("scatter.boundary.xi", "must be finite"));
            }
        }
        if self.problem == ProblemKind::ChiralSelftest {
            if self.moment_is_zero(self.source.moment_plus) && self.moment_is_zero(self.source.moment_minus) {
                return Err(bad("scatter.source", "at least one moment must be nonzero"));
            }
            let c = self.source.center;
            let level = (c[0] / e.a).powi(2) + (c[1] / e.b).powi(2) + (c[2] / e.c).powi(2);
            if !(level < 1.0) {
                return Err(bad("scatter.source.center", "must lie strictly inside the ellipsoid"));
            }
        } else if self.moment_is_zero(self.moment) {
            return Err(bad("scatter.moment", "must be nonzero"));
        }
        Ok(())
    }

    fn moment_is_zero(&self, m: [f64; 3]) -> bool {
        m.iter().all(|v| *v == 0.0)
    }

    pub fn setup(&self) -> SweepSetup {
        let e = self.ellipsoid;
        SweepSetup {
            surface: Ellipsoid { a: e.a, b: e.b, c: e.c },
            source_scale: self.source_scale,
            boundary_kind: match self.boundary {
                BoundaryConfig::Pec => BoundaryKind::PerfectConductor,
                BoundaryConfig::Impedance { xi } => BoundaryKind::Impedance(Complex64::new(xi[0], xi[1])),
            },
            oversampling: self.oversampling,
            eval_scale: self.eval_scale,
            eval_grid: (self.eval_grid[0], self.eval_grid[1]),
            boundary_grid: (self.boundary_grid[0], self.boundary_grid[1]),
            ..SweepSetup::default()
        }
    }
}

impl CheckConfig {
    pub fn suite(&self) -> Result<Suite, CliError> {
        self.suite.parse().map_err(|e| bad("check.suite", e))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.suite()?;
        if self.algebra_samples == 0 {
            return Err(bad("check.algebra_samples", "must be positive"));
        }
        if self.green_points == 0 {
            return Err(bad("check.green_points", "must be positive"));
        }
        Ok(())
    }
}

impl GreenEvalConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        if !(self.t.is_finite() && self.x.iter().all(|v| v.is_finite())) {
            return Err(bad("green_eval", "t and x must be finite"));
        }
        if self.beta == 0.0 || !self.beta.is_finite() {
            return Err(bad("green_eval.beta", "must be finite and nonzero"));
        }
        for (name, v) in [("green_eval.eps", self.eps), ("green_eval.mu", self.mu)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(bad(name, "must be positive"));
            }
        }
        if self.x.iter().all(|v| *v == 0.0) {
            return Err(bad("green_eval.x", "the Green function is singular at the origin"));
        }
        if self.sweep && (self.steps.len() < 2 || self.steps.iter().any(|h| !(*h > 0.0))) {
            return Err(bad("green_eval.steps", "a sweep needs at least two positive steps"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_gives_defaults() {
        let c = ExperimentConfig::parse("{}").unwrap();
        assert_eq!(c, ExperimentConfig::default());
        assert!(c.scatter.validate().is_ok());
        assert_eq!(c.scatter.n_list, vec![10, 15, 20, 25, 30, 35]);
    }

    #[test]
    fn missing_semi_axis_names_the_field() {
        let err = ExperimentConfig::parse(r#"{"scatter": {"ellipsoid": {"a": 5, "b": 3}}}"#).unwrap_err();
        let CliError::Config(msg) = err else { panic!() };
        assert!(msg.contains("scatter.ellipsoid") && msg.contains("`c`"), "{msg}");
    }

    #[test]
    fn unknown_field_is_rejected_with_path() {
        let err = ExperimentConfig::parse(r#"{"check": {"suit": "all"}}"#).unwrap_err();
        let CliError::Config(msg) = err else { panic!() };
        assert!(msg.starts_with("check"), "{msg}");
    }

    #[test]
    fn validation_catches_physical_errors() {
        let mut s = ScatterConfig::default();
        s.ellipsoid.b = -1.0;
        assert!(s.validate().is_err());
        let mut s = ScatterConfig::default();
        s.beta = 0.1;
        assert!(s.validate().is_err());
        s.problem = ProblemKind::ChiralSelftest;
        assert!(s.validate().is_ok());
        s.source.center = [10.0, 0.0, 0.0];
        assert!(s.validate().is_err());
        let c = CheckConfig { suite: "nope".into(), ..CheckConfig::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn digest_ignores_presentation_fields() {
        let a = ExperimentConfig::default();
        let b = ExperimentConfig { threads: Some(3), format: Some(Format::Json), ..ExperimentConfig::default() };
        assert_eq!(a.digest(), b.digest());
        let c = ExperimentConfig { seed: Some(1), ..ExperimentConfig::default() };
        assert_ne!(a.digest(), c.digest());
    }
}
