//! Subcommand implementations.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::time::{SystemTime, UNIX_EPOCH};

use biquat::chiral_time::{green_function, green_residual_at, SpaceTimePoint};
use biquat::kernels::ChiralMedium;
use biquat::scattering::{chiral_selftest, run_benchmark, ConvergenceRow, SelfTestSource};
use biquat::suites::{run_suite, SuiteOptions};
use biquat::verify::Refinement;

use crate::config::{ExperimentConfig, Format, ProblemKind};
use crate::report::{Cell, Metadata, Report};
use crate::{CliError, Command, Common, EXIT_CHECK_FAILED, EXIT_OK};

/// Load the config document and apply the shared flag overrides.
pub fn resolve(common: &Common) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &common.config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if common.seed.is_some() {
        cfg.seed = common.seed;
    }
    if common.threads.is_some() {
        cfg.threads = common.threads;
    }
    if common.format.is_some() {
        cfg.format = common.format;
    }
    if common.out.is_some() {
        cfg.out = common.out.clone();
    }
    if cfg.threads == Some(0) {
        return Err(CliError::Config("threads: must be positive".into()));
    }
    Ok(cfg)
}

pub fn execute(command: Command) -> Result<i32, CliError> {
    let (cfg, name) = match &command {
        Command::Scatter { common, n_list } => {
            let mut cfg = resolve(common)?;
            if let Some(n) = n_list {
                cfg.scatter.n_list = n.clone();
            }
            cfg.scatter.validate()?;
            (cfg, "scatter")
        }
        Command::Check { common, suite } => {
            let mut cfg = resolve(common)?;
            if let Some(s) = suite {
                cfg.check.suite = s.clone();
            }
            cfg.check.validate()?;
            (cfg, "check")
        }
        Command::GreenEval { common, t, x, beta, eps, mu, sweep } => {
            let mut cfg = resolve(common)?;
            let g = &mut cfg.green_eval;
            g.t = t.unwrap_or(g.t);
            if let Some(x) = x {
                g.x = x
                    .as_slice()
                    .try_into()
                    .map_err(|_| CliError::Config(format!("--x needs 3 comma-separated values, got {}", x.len())))?;
            }
            g.beta = beta.unwrap_or(g.beta);
            g.eps = eps.unwrap_or(g.eps);
            g.mu = mu.unwrap_or(g.mu);
            g.sweep |= *sweep;
            g.validate()?;
            (cfg, "green-eval")
        }
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Config(format!("threads: {e}")))?;
    let (columns, rows, code) = pool.install(|| match name {
        "scatter" => scatter(&cfg),
        "check" => check(&cfg),
        _ => green_eval(&cfg),
    })?;
    let report = Report {
        metadata: Metadata {
            command: name.into(),
            config_sha256: cfg.digest(),
            seed: cfg.seed(),
            timestamp_unix: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
        },
        columns,
        rows,
    };
    let format = cfg.format.unwrap_or(Format::Csv);
    match &cfg.out {
        Some(path) => {
            let mut w = BufWriter::new(File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?);
            report.write(format, &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = std::io::stdout();
            report.write(format, &mut stdout.lock())?;
        }
    }
    Ok(code)
}

type Table = (Vec<&'static str>, Vec<Vec<Cell>>, i32);

fn row_cells(r: &ConvergenceRow) -> Vec<Cell> {
    vec![
        Cell::Int(r.n as u64),
        Cell::Real(r.err_e),
        Cell::Real(r.err_h),
        Cell::Real(r.cond),
        Cell::Real(r.sc_leak),
        Cell::Real(r.boundary_err),
        Cell::Real(r.wall_ms),
    ]
}

fn scatter(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let s = &cfg.scatter;
    let setup = s.setup();
    let rows: Vec<ConvergenceRow> = match s.problem {
        ProblemKind::Dipole => run_benchmark(&setup, s.alpha(), s.moment, &s.n_list)?.rows,
        ProblemKind::ChiralSelftest => {
            let medium = ChiralMedium::with_alpha(s.alpha(), s.beta)?;
            let src = SelfTestSource { center: s.source.center, moment_plus: s.source.moment_plus, moment_minus: s.source.moment_minus };
            s.n_list.iter().map(|&n| chiral_selftest(&setup, medium, src, n).map(|r| r.row)).collect::<Result<_, _>>()?
        }
    };
    let columns = vec!["N", "errE", "errH", "cond", "sc_leak", "boundary_err", "wall_ms"];
    Ok((columns, rows.iter().map(row_cells).collect(), EXIT_OK))
}

fn check(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let opts = SuiteOptions { seed: cfg.seed(), algebra_samples: cfg.check.algebra_samples, green_points: cfg.check.green_points };
    let rows = run_suite(cfg.check.suite()?, &opts)?;
    let code = if rows.iter().all(|r| r.pass) { EXIT_OK } else { EXIT_CHECK_FAILED };
    for r in rows.iter().filter(|r| !r.pass) {
        log::warn!("check failed: {}/{} measured {:e}", r.suite, r.check, r.measured);
    }
    let cells = rows
        .into_iter()
        .map(|r| {
            vec![Cell::Text(r.suite.into()), Cell::Text(r.check), Cell::Real(r.measured), Cell::Real(r.lower), Cell::Real(r.upper), Cell::Bool(r.pass)]
        })
        .collect();
    Ok((vec!["suite", "check", "measured", "lower", "upper", "pass"], cells, code))
}

fn green_eval(cfg: &ExperimentConfig) -> Result<Table, CliError> {
    let g = &cfg.green_eval;
    let medium = ChiralMedium::time_domain(g.eps, g.mu, g.beta)?;
    let p = SpaceTimePoint::new(g.t, g.x);
    if g.sweep {
        let res: Vec<f64> = g.steps.iter().map(|&h| green_residual_at(p, &medium, h)).collect::<Result<_, _>>()?;
        let rows = g
            .steps
            .iter()
            .zip(&res)
            .enumerate()
            .map(|(i, (&h, &r))| {
                let ratio = if i == 0 { f64::NAN } else { Refinement::new(res[i - 1], r).ratio() };
                vec![Cell::Real(h), Cell::Real(r), Cell::Real(ratio)]
            })
            .collect();
        return Ok((vec!["h", "residual", "ratio"], rows, EXIT_OK));
    }
    let f = green_function(p, &medium)?;
    let cells = f.components().iter().flat_map(|z| [Cell::Precise(z.re), Cell::Precise(z.im)]).collect();
    Ok((vec!["s_re", "s_im", "v1_re", "v1_im", "v2_re", "v2_im", "v3_re", "v3_im"], vec![cells], EXIT_OK))
}
