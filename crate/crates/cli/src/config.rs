//! Flat `key = value` simulation config.
//!
//! ```text
//! # table 6 setup
//! distribution = exponential
//! mu_x = 10
//! beta0 = 0
//! beta1 = 1
//! sigma_delta = 2
//! sigma_tau = 1
//! n = 100
//! replications = 1000
//! seed = 42
//! estimators = VER, HOR, PER, GM, MOM, COPAS, MD
//! assumed_kappas = 0.25, 1, 4
//! ```

use std::collections::HashSet;

use obliq_core::{Method, SimulationConfig, XDistribution};

use crate::error::{CliError, CliResult};

pub const KEYS: [&str; 13] = [
    "distribution",
    "mu_x",
    "sd_x",
    "beta0",
    "beta1",
    "sigma_delta",
    "sigma_tau",
    "n",
    "replications",
    "seed",
    "assumed_kappas",
    "estimators",
    "mle_kappa",
];

/// A parsed config; `seed` stays separate so the caller can apply the
/// command-line and environment fallbacks.
#[derive(Debug, Clone, PartialEq)]
pub struct ParsedConfig {
    pub config: SimulationConfig,
    pub seed: Option<u64>,
}

fn invalid(key: &str, value: &str, expected: &str) -> CliError {
    CliError::Input(format!(
        "config key `{}`: invalid value `{}` ({})",
        key, value, expected
    ))
}

fn number(key: &str, value: &str) -> CliResult<f64> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| invalid(key, value, "expected a finite number"))
}

fn count(key: &str, value: &str) -> CliResult<usize> {
    value
        .parse()
        .map_err(|_| invalid(key, value, "expected a non-negative integer"))
}

pub fn parse_config(text: &str) -> CliResult<ParsedConfig> {
    let mut config = SimulationConfig::default();
    let mut seed = None;
    let mut distribution = "exponential".to_string();
    let mut mu_x = None;
    let mut sd_x = None;
    let mut seen = HashSet::new();

    for (index, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Input(format!("config line {}: expected `key = value`", index + 1))
        })?;
        let (key, value) = (key.trim(), value.trim());
        if !KEYS.contains(&key) {
            return Err(CliError::Input(format!(
                "config line {}: unknown key `{}` (known keys: {})",
                index + 1,
                key,
                KEYS.join(", ")
            )));
        }
        if !seen.insert(key.to_string()) {
            return Err(CliError::Input(format!("config key `{}` given twice", key)));
        }
        match key {
            "distribution" => {
                let d = value.to_ascii_lowercase();
                if d != "exponential" && d != "normal" {
                    return Err(invalid(key, value, "expected `exponential` or `normal`"));
                }
                distribution = d;
            }
            "mu_x" => mu_x = Some(number(key, value)?),
            "sd_x" => sd_x = Some(number(key, value)?),
            "beta0" => config.beta0 = number(key, value)?,
            "beta1" => config.beta1 = number(key, value)?,
            "sigma_delta" => config.sigma_delta = number(key, value)?,
            "sigma_tau" => config.sigma_tau = number(key, value)?,
            "n" => config.n = count(key, value)?,
            "replications" => config.replications = count(key, value)?,
            "seed" => {
                seed = Some(
                    value
                        .parse()
                        .map_err(|_| invalid(key, value, "expected an unsigned 64-bit integer"))?,
                )
            }
            "mle_kappa" => config.mle_kappa = Some(number(key, value)?),
            "assumed_kappas" => {
                config.assumed_kappas = list(value)
                    .map(|v| number(key, v))
                    .collect::<CliResult<_>>()?;
            }
            "estimators" => {
                config.estimators = list(value)
                    .map(|v| {
                        v.parse::<Method>().map_err(|_| {
                            invalid(key, v, "expected estimator names such as VER, GM, MD")
                        })
                    })
                    .collect::<CliResult<_>>()?;
            }
            _ => unreachable!("key list checked above"),
        }
    }

    config.x_distribution = match distribution.as_str() {
        "normal" => XDistribution::Normal {
            mean: mu_x.unwrap_or(10.0),
            sd: sd_x.unwrap_or(1.0),
        },
        _ => {
            if sd_x.is_some() {
                return Err(invalid(
                    "sd_x",
                    "given",
                    "only used with distribution = normal",
                ));
            }
            XDistribution::Exponential {
                mean: mu_x.unwrap_or(10.0),
            }
        }
    };
    config.validate()?;
    Ok(ParsedConfig { config, seed })
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|v| !v.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_config() {
        let text = "# comment\ndistribution = normal\nmu_x = 5\nsd_x = 2\nsigma_delta = 2\n\
                    n = 50\nreplications = 10\nseed = 7\nestimators = VER, md\nassumed_kappas = 0.5, 2\n";
        let parsed = parse_config(text).unwrap();
        assert_eq!(parsed.seed, Some(7));
        let c = parsed.config;
        assert_eq!(
            c.x_distribution,
            XDistribution::Normal { mean: 5.0, sd: 2.0 }
        );
        assert_eq!(c.sigma_delta, 2.0);
        assert_eq!((c.n, c.replications), (50, 10));
        assert_eq!(c.estimators, vec![Method::Ver, Method::Md]);
        assert_eq!(c.assumed_kappas, vec![0.5, 2.0]);
    }

    #[test]
    fn empty_config_is_the_default() {
        let parsed = parse_config("").unwrap();
        assert_eq!(parsed.config, SimulationConfig::default());
        assert_eq!(parsed.seed, None);
    }

    #[test]
    fn errors_name_the_key() {
        for (text, key) in [
            ("sigma_x = 1", "sigma_x"),
            ("n = ten", "n"),
            ("replications = 0", "replications"),
            ("estimators = VER, XYZ", "estimators"),
            ("seed = -1", "seed"),
            ("sigma_tau = -2", "sigma_tau"),
        ] {
            let err = parse_config(text).unwrap_err().to_string();
            assert!(err.contains(key), "{} -> {}", text, err);
        }
    }

    #[test]
    fn rejects_duplicates_and_bare_lines() {
        assert!(parse_config("n = 5\nn = 6").is_err());
        assert!(parse_config("n 5").is_err());
    }
}
