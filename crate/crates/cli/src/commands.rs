use std::path::Path;

use obliq_core::estimators::estimate_all;
use obliq_core::measurement_error::madansky_variances;
use obliq_core::simulation::{run_kappa_misspecification, run_study, ErrorPair, DEFAULT_SEED};
use obliq_core::tables::{self, TableReport};
use obliq_core::{
    summarize, validate, PairedSample, SimulationConfig, SimulationReport, XDistribution,
};

use crate::config::parse_config;
use crate::error::{CliError, CliResult};
use crate::input::read_pairs_from_path;
use crate::report::{Cell, Table};

pub const SEED_ENV: &str = "OBLIQ_SEED";

/// Outcome of a command: the tables to write and, when the data were
/// degenerate, the error to exit with after writing them.
pub struct CommandOutput {
    pub tables: Vec<Table>,
    pub deferred: Option<CliError>,
}

pub fn fit(data: &Path, kappa: Option<f64>) -> CliResult<CommandOutput> {
    if let Some(k) = kappa {
        if k.is_nan() || k < 0.0 {
            return Err(CliError::Input(format!(
                "--kappa must be non-negative (got {})",
                k
            )));
        }
    }
    let pairs = read_pairs_from_path(data)?;
    let sample = PairedSample::from_pairs(&pairs)?;
    let stats = summarize(&sample)?;
    let flags = validate(&stats);
    let estimates = estimate_all(&stats, kappa);

    let mut fits = Table::new(
        "fit",
        format!("Slope estimates for {}", data.display()),
        vec![
            "method",
            "slope",
            "intercept",
            "lambda",
            "theta_deg",
            "sigma_delta_sq",
            "sigma_tau_sq",
            "kappa_tilde",
            "notes",
        ],
    );
    for outcome in &estimates.outcomes {
        let method = Cell::from(outcome.method.tag());
        match &outcome.result {
            Ok(f) => {
                let moments = madansky_variances(f.beta1, &stats).ok();
                let notes: Vec<&str> = f.notes.iter().map(|n| n.tag()).collect();
                fits.push(vec![
                    method,
                    f.beta1.into(),
                    f.beta0.into(),
                    f.lambda.into(),
                    f.theta_deg.into(),
                    moments.map(|m| m.sigma_delta_sq).into(),
                    moments.map(|m| m.sigma_tau_sq).into(),
                    moments.map(|m| m.kappa_tilde).into(),
                    notes.join(";").into(),
                ]);
            }
            Err(e) => {
                let mut row = vec![method];
                row.extend(std::iter::repeat_n(Cell::Empty, 7));
                row.push(format!("error: {}", e).into());
                fits.push(row);
            }
        }
    }

    let mut summary = Table::new("summary", "Summary statistics", vec!["quantity", "value"]);
    let quantities: [(&str, Cell); 10] = [
        ("n", stats.n.into()),
        ("x_bar", stats.x_bar.into()),
        ("y_bar", stats.y_bar.into()),
        ("sxx", stats.sxx.into()),
        ("syy", stats.syy.into()),
        ("sxy", stats.sxy.into()),
        ("rho", stats.rho.into()),
        ("sxxxy", stats.sxxxy.into()),
        ("sxyyy", stats.sxyyy.into()),
        ("mle_kappa", estimates.mle_kappa.into()),
    ];
    for (name, value) in quantities {
        summary.push(vec![name.into(), value]);
    }
    summary.push(vec!["flags".into(), flags.names().join(";").into()]);

    let deferred = flags
        .is_degenerate()
        .then(|| CliError::Degenerate(flags.names().join(", ")));
    Ok(CommandOutput {
        tables: vec![fits, summary],
        deferred,
    })
}

/// `--seed`, then the config file, then `OBLIQ_SEED`, then the default.
pub fn resolve_seed(flag: Option<u64>, config: Option<u64>, env: Option<&str>) -> CliResult<u64> {
    if let Some(s) = flag.or(config) {
        return Ok(s);
    }
    match env {
        Some(text) => text.trim().parse().map_err(|_| {
            CliError::Input(format!(
                "{} must be an unsigned 64-bit integer (got `{}`)",
                SEED_ENV, text
            ))
        }),
        None => Ok(DEFAULT_SEED),
    }
}

pub fn load_config(path: &Path, seed_flag: Option<u64>) -> CliResult<SimulationConfig> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Input(format!("cannot read config {}: {}", path.display(), e)))?;
    let parsed = parse_config(&text)?;
    let env = std::env::var(SEED_ENV).ok();
    let seed = resolve_seed(seed_flag, parsed.seed, env.as_deref())?;
    Ok(SimulationConfig {
        seed,
        ..parsed.config
    })
}

pub fn simulate(path: &Path, seed_flag: Option<u64>) -> CliResult<CommandOutput> {
    let config = load_config(path, seed_flag)?;
    let report = run_study(&config)?;
    let mut tables = vec![study_rows(&report), study_parameters(&report)];

    if !config.assumed_kappas.is_empty() {
        let pair = ErrorPair {
            sigma_delta: config.sigma_delta,
            sigma_tau: config.sigma_tau,
        };
        let matrix = run_kappa_misspecification(&config, &[pair])?;
        let mut t = Table::new(
            "assumed_ratios",
            format!(
                "Likelihood slope bias under assumed ratios (true kappa {})",
                config.kappa()
            ),
            vec!["assumed_kappa", "percent_bias", "failures"],
        );
        for (k, row) in matrix.assumed_kappas.iter().zip(&matrix.percent_bias) {
            t.push(vec![(*k).into(), row[0].into(), matrix.failures[0].into()]);
        }
        tables.push(t);
    }
    Ok(CommandOutput {
        tables,
        deferred: None,
    })
}

fn study_rows(report: &SimulationReport) -> Table {
    let mut t = Table::new(
        "simulation",
        "Estimator comparison",
        vec![
            "method",
            "count",
            "failures",
            "mean_slope",
            "percent_bias",
            "mse",
            "mse_e3",
            "mean_lambda",
            "theta_deg",
        ],
    );
    for r in &report.rows {
        t.push(vec![
            r.method.tag().into(),
            r.count.into(),
            r.failures.into(),
            r.mean_slope.into(),
            r.percent_bias.into(),
            r.mse.into(),
            r.mse_e3.into(),
            r.mean_lambda.into(),
            r.mean_theta_deg.into(),
        ]);
    }
    if let Some(ols) = report.ols_average {
        t.push(vec![
            "OLS*".into(),
            Cell::Empty,
            Cell::Empty,
            Cell::Empty,
            ols.mean_abs_percent_bias.into(),
            ols.mse.into(),
            ols.mse_e3.into(),
            Cell::Empty,
            Cell::Empty,
        ]);
    }
    t
}

fn study_parameters(report: &SimulationReport) -> Table {
    let c = &report.config;
    let mut t = Table::new("study", "Study parameters and counts", vec!["key", "value"]);
    let distribution = match c.x_distribution {
        XDistribution::Exponential { mean } => format!("exponential(mean={})", mean),
        XDistribution::Normal { mean, sd } => format!("normal(mean={}, sd={})", mean, sd),
    };
    let rows: Vec<(&str, Cell)> = vec![
        ("distribution", distribution.into()),
        ("beta0", c.beta0.into()),
        ("beta1", c.beta1.into()),
        ("sigma_delta", c.sigma_delta.into()),
        ("sigma_tau", c.sigma_tau.into()),
        ("kappa", c.kappa().into()),
        ("n", c.n.into()),
        ("replications", c.replications.into()),
        ("seed", c.seed.into()),
        ("radicand_negative", report.counts.radicand_negative.into()),
        ("clamped_low", report.counts.clamped_low.into()),
        ("clamped_high", report.counts.clamped_high.into()),
        ("copas_ties", report.counts.copas_ties.into()),
    ];
    for (k, v) in rows {
        t.push(vec![k.into(), v]);
    }
    t
}

/// Parses `1,4,6`, `2-5` or `all`.
pub fn parse_table_ids(text: &str) -> CliResult<Vec<u8>> {
    let bad = |part: &str| {
        CliError::Input(format!(
            "unknown table id `{}` (tables run from 1 to 8)",
            part
        ))
    };
    let valid = |s: &str| s.parse::<u8>().ok().filter(|id| (1..=8).contains(id));
    if text.trim().eq_ignore_ascii_case("all") {
        return Ok((1..=8).collect());
    }
    let mut ids = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b) = (
                    valid(a.trim()).ok_or_else(|| bad(part))?,
                    valid(b.trim()).ok_or_else(|| bad(part))?,
                );
                if a > b {
                    return Err(bad(part));
                }
                ids.extend(a..=b);
            }
            None => ids.push(valid(part).ok_or_else(|| bad(part))?),
        }
    }
    if ids.is_empty() {
        return Err(bad(text));
    }
    ids.dedup();
    Ok(ids)
}

/// Whether a computed cell sits within the reproduction tolerance of its
/// published value, and the tolerance used.
fn tolerance(id: u8, column: &str, computed: f64, published: f64) -> Option<(&'static str, bool)> {
    let diff = if computed == published {
        0.0
    } else {
        (computed - published).abs()
    };
    match (id, column) {
        (1 | 2, _) => Some(("abs 0.001", diff <= 1e-3)),
        (3, _) => Some((
            "rel 1e-10",
            diff <= 1e-10 * computed.abs().max(published.abs()),
        )),
        (4, _) => Some(("abs 0.0005", diff <= 5e-4)),
        (6..=8, "percent_bias") => Some((
            "abs 1.5pp",
            diff <= 1.5 && computed.signum() == published.signum(),
        )),
        (6..=8, "mse_e3") => Some(("factor 2", (0.5..=2.0).contains(&(computed / published)))),
        _ => None,
    }
}

pub fn table_report(report: &TableReport) -> Table {
    let mut t = Table::new(
        format!("table{}", report.id),
        format!("Table {}: {}", report.id, report.title),
        vec![
            "row",
            "column",
            "computed",
            "published",
            "abs_diff",
            "tolerance",
            "within",
        ],
    );
    for e in &report.entries {
        let check = e
            .published
            .and_then(|p| tolerance(report.id, &e.column, e.computed, p));
        t.push(vec![
            e.row.clone().into(),
            e.column.clone().into(),
            e.computed.into(),
            e.published.into(),
            e.abs_diff().into(),
            check.map_or(Cell::Empty, |c| c.0.into()),
            check.map_or(Cell::Empty, |c| if c.1 { "yes" } else { "no" }.into()),
        ]);
    }
    t
}

pub fn tables_command(ids: &[u8]) -> CliResult<CommandOutput> {
    let mut out = Vec::with_capacity(ids.len());
    for &id in ids {
        let report = tables::table(id)?;
        out.push(table_report(&report));
    }
    Ok(CommandOutput {
        tables: out,
        deferred: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_precedence() {
        assert_eq!(resolve_seed(Some(1), Some(2), Some("3")).unwrap(), 1);
        assert_eq!(resolve_seed(None, Some(2), Some("3")).unwrap(), 2);
        assert_eq!(resolve_seed(None, None, Some(" 3 ")).unwrap(), 3);
        assert_eq!(resolve_seed(None, None, None).unwrap(), DEFAULT_SEED);
        assert!(resolve_seed(None, None, Some("x")).is_err());
    }

    #[test]
    fn table_ids() {
        assert_eq!(parse_table_ids("1,4,6").unwrap(), vec![1, 4, 6]);
        assert_eq!(parse_table_ids("2-4,8").unwrap(), vec![2, 3, 4, 8]);
        assert_eq!(parse_table_ids("all").unwrap().len(), 8);
        for bad in ["9", "0", "x", "", "5-3"] {
            assert!(parse_table_ids(bad).is_err(), "{}", bad);
        }
    }

    #[test]
    fn deterministic_tables_are_within_tolerance() {
        for id in [1, 2, 3, 4] {
            let t = table_report(&tables::table(id).unwrap());
            assert!(
                t.rows.iter().all(|r| r[6] == Cell::from("yes")),
                "table {}",
                id
            );
        }
    }
}
