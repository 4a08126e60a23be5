//! Subcommand bodies. Each takes the merged configuration and returns the
//! table to emit plus any notes for standard error.

use crate::error::Error;
use crate::fullsim::{monte_carlo, MonteCarloConfig, MAX_STATES};
use crate::optimizer::{default_params, optimize_params};
use crate::protocol::{
    copies_needed, measurement_bound, min_gap_probability, min_measurements, run_cooling,
    run_schedule, strategy_one, CoolingParams, StrategyOneConfig,
};
use crate::thermal::ThermalSpec;
use crate::verify::{run_all, VerifyConfig};

use super::config::{field_error, ConfigError, ExperimentConfig};
use super::output::{num, Table};

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug, thiserror::Error)]
pub enum CommandError {
    #[error("{0}")]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Compute(Error),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl From<Error> for CommandError {
    fn from(e: Error) -> Self {
        match e {
            // bad inputs that only the library can detect are still the
            // caller's fault
            Error::InvalidParameter { .. }
            | Error::Infeasible { .. }
            | Error::BoundInvalid { .. } => CommandError::Config(ConfigError(e.to_string())),
            other => CommandError::Compute(other),
        }
    }
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Config(_) => 2,
            CommandError::Compute(_) | CommandError::Io(_) => 1,
        }
    }
}

pub type CommandResult = Result<CommandOutput, CommandError>;

#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub table: Table,
    /// Lines for standard error.
    pub notes: Vec<String>,
    /// False when the command ran but found a failure (exit code 1).
    pub success: bool,
}

impl CommandOutput {
    fn table(table: Table) -> Self {
        CommandOutput {
            table,
            notes: Vec::new(),
            success: true,
        }
    }
}

fn require_finite(field: &str, x: f64) -> Result<f64, ConfigError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(field_error(field, format!("{x} is not finite")))
    }
}

fn n_states(cfg: &ExperimentConfig, default: f64) -> Result<f64, ConfigError> {
    let n = require_finite("N", cfg.n_states.unwrap_or(default))?;
    if n < 2.0 {
        return Err(field_error("N", format!("need at least 2 states, got {n}")));
    }
    Ok(n)
}

fn p_target(cfg: &ExperimentConfig) -> Result<Option<f64>, ConfigError> {
    match cfg.p_target {
        None => Ok(None),
        Some(p) if p > 0.0 && p < 1.0 => Ok(Some(p)),
        Some(p) => Err(field_error(
            "P_target",
            format!("must lie in (0, 1), got {p}"),
        )),
    }
}

/// A thermal state per requested temperature, or a single one when `p0` is
/// given. The first tuple element is the temperature label for the output.
fn thermal_specs(
    cfg: &ExperimentConfig,
    default_n: f64,
    default_dt: &[f64],
) -> Result<Vec<(Option<f64>, ThermalSpec)>, ConfigError> {
    let n = n_states(cfg, default_n)?;
    if let Some(p0) = cfg.p0 {
        if cfg.dt_ratio.is_some() {
            return Err(field_error("p0", "give either p0 or dT_ratio, not both"));
        }
        if !(p0 > 0.0 && p0 <= 1.0) {
            return Err(field_error("p0", format!("must lie in (0, 1], got {p0}")));
        }
        return Ok(vec![(None, ThermalSpec::with_p0(n, p0))]);
    }
    let dts = cfg
        .dt_ratio
        .clone()
        .map(|d| d.into_vec())
        .unwrap_or_else(|| default_dt.to_vec());
    if dts.is_empty() {
        return Err(field_error("dT_ratio", "list is empty"));
    }
    dts.into_iter()
        .map(|dt| {
            if !(dt.is_finite() && dt >= 0.0) {
                return Err(field_error(
                    "dT_ratio",
                    format!("must be finite and >= 0, got {dt}"),
                ));
            }
            Ok((Some(dt), ThermalSpec::new(n, dt)))
        })
        .collect()
}

fn label(dt: Option<f64>) -> String {
    dt.map(num).unwrap_or_default()
}

/// Optimal parameters, with any of γ, δ, t replaced by explicit values.
fn cooling_params(cfg: &ExperimentConfig) -> Result<CoolingParams, CommandError> {
    let base = default_params();
    let params = CoolingParams::new(
        require_finite("gamma", cfg.gamma.unwrap_or(base.gamma))?,
        require_finite("delta", cfg.delta.unwrap_or(base.delta))?,
        require_finite("t", cfg.t.unwrap_or(base.t))?,
    );
    params.validate()?;
    Ok(params)
}

fn strategy_one_config(cfg: &ExperimentConfig) -> Result<StrategyOneConfig, CommandError> {
    let s = StrategyOneConfig {
        delta1: require_finite("delta1", cfg.delta1.unwrap_or(0.1))?,
        delta2: require_finite("delta2", cfg.delta2.unwrap_or(0.1))?,
        j1: cfg.j1.unwrap_or(0),
        j2: cfg.j2.unwrap_or(0),
    };
    s.validate()?;
    Ok(s)
}

pub fn optimize(cfg: &ExperimentConfig) -> CommandResult {
    let t = cfg.t.ok_or_else(|| {
        ConfigError("optimize requires `t` (flag --t or config key \"t\")".into())
    })?;
    let t = require_finite("t", t)?;
    let branch = cfg.branch.unwrap_or(1);
    let r = optimize_params(t, branch)?;
    let mut table = Table::new(&[
        "t",
        "branch",
        "gamma",
        "delta",
        "b0",
        "b1",
        "b2",
        "inv_b2",
        "objective",
        "b0_residual",
    ]);
    table.push(vec![
        num(r.t),
        r.branch.to_string(),
        num(r.gamma),
        num(r.delta),
        num(r.b0),
        num(r.b1),
        num(r.b2),
        num(1.0 / r.b2),
        num(r.objective),
        num(r.b0_residual),
    ]);
    Ok(CommandOutput::table(table))
}

pub fn fig2(cfg: &ExperimentConfig) -> CommandResult {
    let specs = thermal_specs(cfg, 1e23, &[0.0, 1.0, 3.0, 9.0])?;
    let params = cooling_params(cfg)?;
    let m_max = cfg.m_max.unwrap_or(10);
    let target = p_target(cfg)?;
    let mut table = Table::new(&[
        "M",
        "dT_ratio",
        "cooling_probability",
        "survival_probability",
    ]);
    let mut notes = Vec::new();
    if target.is_some() {
        notes.push("dT_ratio,P_target,M_min,bound".to_string());
    }
    for (dt, spec) in &specs {
        let report = run_cooling(spec, &params, m_max)?;
        for row in &report.trace {
            table.push(vec![
                row.m.to_string(),
                label(*dt),
                num(row.cooling_probability),
                num(row.survival_probability),
            ]);
        }
        if let Some(p) = target {
            let m_min = match min_measurements(spec, &params, p) {
                Ok(m) => m.to_string(),
                Err(Error::Unreachable { .. }) => "unreachable".to_string(),
                Err(e) => return Err(e.into()),
            };
            let bound = match measurement_bound(spec, params.retention(1.0, 1.0), p) {
                Ok(b) => num(b),
                Err(Error::BoundInvalid { .. }) => "invalid".to_string(),
                Err(e) => return Err(e.into()),
            };
            notes.push(format!("{},{},{m_min},{bound}", label(*dt), num(p)));
        }
    }
    Ok(CommandOutput {
        table,
        notes,
        success: true,
    })
}

fn default_r_grid() -> Vec<f64> {
    (0..=30).map(|i| i as f64 / 100.0).collect()
}

pub fn fig4(cfg: &ExperimentConfig) -> CommandResult {
    let specs = thermal_specs(cfg, 1e23, &[0.0, 1.0, 3.0])?;
    let params = cooling_params(cfg)?;
    let m = cfg.m_max.unwrap_or(4);
    let grid = cfg
        .r_grid
        .clone()
        .map(|g| g.into_vec())
        .unwrap_or_else(default_r_grid);
    if grid.is_empty() {
        return Err(field_error("r_grid", "list is empty").into());
    }
    for &r in &grid {
        if !(r.is_finite() && (0.0..1.0).contains(&r)) {
            return Err(field_error("r_grid", format!("r must lie in [0, 1), got {r}")).into());
        }
    }
    let mut table = Table::new(&["r", "dT_ratio", "min_cooling_probability"]);
    let mut notes = Vec::new();
    for (dt, spec) in &specs {
        let mut values = Vec::with_capacity(grid.len());
        for &r in &grid {
            let p = min_gap_probability(spec, &params, m, r)?;
            table.push(vec![num(r), label(*dt), num(p)]);
            values.push((r, p));
        }
        let mut sorted = values.clone();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        let nonincreasing = sorted.windows(2).all(|w| w[1].1 <= w[0].1);
        notes.push(format!(
            "dT_ratio={} nonincreasing={nonincreasing}",
            label(*dt)
        ));
    }
    Ok(CommandOutput {
        table,
        notes,
        success: true,
    })
}

pub fn strategy1(cfg: &ExperimentConfig) -> CommandResult {
    let specs = thermal_specs(cfg, 1e23, &[0.0])?;
    let s = strategy_one_config(cfg)?;
    let target = p_target(cfg)?;
    let mut table = Table::new(&[
        "dT_ratio",
        "p0",
        "delta1",
        "delta2",
        "j1",
        "j2",
        "t1",
        "t2",
        "b0_step1",
        "b0_step2",
        "p_success",
        "formula_estimate",
        "conditional_fidelity",
        "lower_bound",
        "lower_bound_holds",
        "P_target",
        "copies_needed",
    ]);
    for (dt, spec) in &specs {
        let r = strategy_one(spec, &s)?;
        let copies = match target {
            Some(p) => copies_needed(r.p_success, p)?.to_string(),
            None => String::new(),
        };
        table.push(vec![
            label(*dt),
            num(r.p0),
            num(s.delta1),
            num(s.delta2),
            s.j1.to_string(),
            s.j2.to_string(),
            num(s.t1()),
            num(s.t2()),
            num(r.b0_step1),
            num(r.b0_step2),
            num(r.p_success),
            num(r.formula_estimate),
            num(r.report.conditional_fidelity),
            num(r.lower_bound),
            r.lower_bound_holds.to_string(),
            target.map(num).unwrap_or_default(),
            copies,
        ]);
    }
    Ok(CommandOutput::table(table))
}

/// Deviation in units of σ, infinite when σ vanishes but the values differ.
fn z_score(diff: f64, sigma: f64) -> f64 {
    if sigma > 0.0 {
        diff / sigma
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    }
}

pub fn trajectory(cfg: &ExperimentConfig) -> CommandResult {
    let n = n_states(cfg, 16.0)?;
    if n.fract() != 0.0 || n > MAX_STATES as f64 {
        return Err(field_error(
            "N",
            format!("trajectories need an integer N <= {MAX_STATES}, got {n}"),
        )
        .into());
    }
    let specs = thermal_specs(cfg, 16.0, &[0.0])?;
    let [(_, spec)] = specs.as_slice() else {
        return Err(field_error("dT_ratio", "trajectory takes a single temperature").into());
    };
    let w = cfg.w.unwrap_or(0);
    if w >= n as usize {
        return Err(field_error("w", format!("must be below N = {n}, got {w}")).into());
    }
    let stages: Vec<CoolingParams> = match cfg.strategy.unwrap_or(2) {
        1 => strategy_one_config(cfg)?.stages().to_vec(),
        2 => vec![cooling_params(cfg)?; cfg.m_max.unwrap_or(3) as usize],
        s => return Err(field_error("strategy", format!("must be 1 or 2, got {s}")).into()),
    };
    let mc = MonteCarloConfig::new(cfg.trials.unwrap_or(10_000), cfg.seed.unwrap_or(42));
    let stats = monte_carlo(spec, w, &stages, &mc)?;
    let analytic = run_schedule(spec, &stages)?;
    let (ps, pf) = (analytic.survival_probability, analytic.conditional_fidelity);
    let es = stats.empirical_survival();
    let ss = stats.survival_sigma(ps);
    let mut table = Table::new(&["metric", "value"]);
    let mut put = |k: &str, v: String| table.push(vec![k.to_string(), v]);
    put("trials", stats.trials.to_string());
    put("measurements_per_attempt", stages.len().to_string());
    put("successes", stats.successes.to_string());
    put("attempts", stats.attempts.to_string());
    put("measurements", stats.measurements.to_string());
    put("answer_hits", stats.answer_hits.to_string());
    put("empirical_survival", num(es));
    put("analytic_survival", num(ps));
    put("survival_sigma", num(ss));
    put("survival_z", num(z_score((es - ps).abs(), ss)));
    if stats.successes > 0 {
        let ef = stats.empirical_fidelity();
        let sf = stats.fidelity_sigma(pf);
        put("empirical_fidelity", num(ef));
        put("analytic_fidelity", num(pf));
        put("fidelity_sigma", num(sf));
        put("fidelity_z", num(z_score((ef - pf).abs(), sf)));
    } else {
        put("analytic_fidelity", num(pf));
    }
    for (k, v) in &stats.reset_histogram {
        put(&format!("resets={k}"), v.to_string());
    }
    for (k, v) in &stats.measurements_to_success {
        put(&format!("measurements_to_success={k}"), v.to_string());
    }
    Ok(CommandOutput::table(table))
}

pub fn verify(cfg: &ExperimentConfig) -> CommandResult {
    let defaults = VerifyConfig::default();
    let vc = VerifyConfig {
        n_states: cfg.fullsim_n.unwrap_or(defaults.n_states),
        cases: cfg.cases.unwrap_or(defaults.cases),
        seed: cfg.seed.unwrap_or(defaults.seed),
    };
    if vc.n_states < 4 || vc.n_states > MAX_STATES {
        return Err(field_error(
            "fullsim_N",
            format!("must lie in [4, {MAX_STATES}], got {}", vc.n_states),
        )
        .into());
    }
    if vc.cases == 0 {
        return Err(field_error("cases", "must be at least 1").into());
    }
    let results = run_all(&vc)?;
    let mut table = Table::new(&["check", "cases", "max_error", "tolerance", "passed"]);
    let mut notes = Vec::new();
    let mut failed = 0;
    for r in &results {
        table.push(vec![
            r.name.to_string(),
            r.cases.to_string(),
            num(r.max_error),
            num(r.tolerance),
            r.passed.to_string(),
        ]);
        if !r.passed {
            failed += 1;
        }
        notes.push(format!(
            "{} {:<36} cases={:<5} max_error={:<10.3e} tol={:.0e} ({:.2}s)",
            if r.passed { "ok  " } else { "FAIL" },
            r.name,
            r.cases,
            r.max_error,
            r.tolerance,
            r.seconds
        ));
    }
    notes.push(format!(
        "verify: {} of {} checks passed (N = {}, {} cases, seed {})",
        results.len() - failed,
        results.len(),
        vc.n_states,
        vc.cases,
        vc.seed
    ));
    Ok(CommandOutput {
        table,
        notes,
        success: failed == 0,
    })
}
