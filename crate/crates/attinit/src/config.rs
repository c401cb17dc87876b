//! Experiment specs: the built-in cases and the TOML file format.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use attinit_core::{Method, ScenarioConfig};
use serde::{Deserialize, Serialize};

use crate::error::AppError;

/// One named experiment: a scenario, the methods to compare on it, and where
/// its files go.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub name: String,
    pub methods: Vec<Method>,
    pub outputs: PathBuf,
    #[serde(default)]
    pub scenario: ScenarioConfig,
}

pub const BUILTIN_NAMES: [&str; 6] = ["case1", "case2", "case3", "case4", "bias_sweep", "smoke"];

/// Bias levels of the default sweep, deg/h.
pub const DEFAULT_SWEEP_BIASES: [f64; 5] = [0.01, 0.1, 1.0, 10.0, 100.0];

impl ExperimentSpec {
    pub fn new(name: &str, methods: Vec<Method>, scenario: ScenarioConfig) -> Self {
        Self { name: name.to_owned(), methods, outputs: PathBuf::from("out").join(name), scenario }
    }

    pub fn validate(&self) -> Result<(), AppError> {
        if self.name.trim().is_empty() {
            return Err(AppError::Config("name must be non-empty".into()));
        }
        if self.methods.is_empty() {
            return Err(AppError::Config("methods must be non-empty".into()));
        }
        self.scenario.validate().map_err(|e| AppError::Config(format!("scenario: {e}")))?;
        // with R = 0 the 3x3 innovation covariance has rank 2 and every update fails
        if self.scenario.star_noise_rad == 0.0 && self.methods.iter().any(|&m| m != Method::Optimal) {
            return Err(AppError::Config("scenario.star_noise_rad must be > 0 when an MEKF method is selected".into()));
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self, AppError> {
        let spec: Self = toml::from_str(text).map_err(|e| AppError::Config(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> Result<String, AppError> {
        toml::to_string_pretty(self).map_err(|e| AppError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, AppError> {
        let text = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        Self::from_toml(&text)
    }

    /// Built-in spec by name, or `None`.
    pub fn builtin(name: &str) -> Option<Self> {
        let base = ScenarioConfig::default();
        let all = Method::ALL.to_vec();
        let spec = match name {
            "case1" => Self::new(name, all, base),
            "case2" => Self::new(
                name,
                all,
                ScenarioConfig { init_att_err_deg: [30.0, 30.0, 60.0], mekf_att_std_deg: 25.0, ..base },
            ),
            "case3" => Self::new(name, all, ScenarioConfig { bias_degph: [10.0; 3], bias_std_degph: 10.0, ..base }),
            "case4" => Self::new(
                name,
                all,
                ScenarioConfig {
                    bias_degph: [10.0; 3],
                    bias_std_degph: 10.0,
                    init_att_err_deg: [30.0, 30.0, 60.0],
                    mekf_att_std_deg: 25.0,
                    ..base
                },
            ),
            "bias_sweep" => Self::new(name, vec![Method::Optimal], base),
            "smoke" => Self::new(
                name,
                all,
                ScenarioConfig {
                    duration_s: 600.0,
                    bias_degph: [0.0; 3],
                    gyro_noise: 0.0,
                    mc_runs: 1,
                    ..base
                },
            ),
            _ => return None,
        };
        Some(spec)
    }

    /// A built-in name or a path to a TOML spec.
    pub fn resolve(name_or_path: &str) -> Result<Self, AppError> {
        match Self::builtin(name_or_path) {
            Some(spec) => Ok(spec),
            None => {
                let path = Path::new(name_or_path);
                if !path.exists() {
                    return Err(AppError::Config(format!(
                        "'{name_or_path}' is neither a built-in case ({}) nor an existing file",
                        BUILTIN_NAMES.join(", ")
                    )));
                }
                Self::load(path)
            }
        }
    }

    /// One-line parameter summary.
    pub fn summary(&self) -> String {
        let s = &self.scenario;
        let methods: Vec<&str> = self.methods.iter().map(Method::name).collect();
        format!(
            "bias {} deg/h, init err [{}] deg, MEKF att cov ({} deg)², handoff att cov ({} deg)², \
             bias cov ({} deg/h)², star noise {:e} rad, {} runs x {} s, methods {}",
            fmt_axes(&s.bias_degph),
            s.init_att_err_deg.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","),
            s.mekf_att_std_deg,
            s.handoff_att_std_deg,
            s.bias_std_degph,
            s.star_noise_rad,
            s.mc_runs,
            s.duration_s,
            methods.join(","),
        )
    }
}

fn fmt_axes(v: &[f64; 3]) -> String {
    if v[0] == v[1] && v[1] == v[2] {
        v[0].to_string()
    } else {
        format!("[{},{},{}]", v[0], v[1], v[2])
    }
}

/// Text listing of every built-in spec.
pub fn list_cases() -> String {
    let mut out = String::new();
    for name in BUILTIN_NAMES {
        let spec = ExperimentSpec::builtin(name).expect("built-in");
        let _ = writeln!(out, "{name:<11} {}", spec.summary());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins_round_trip_through_toml() {
        for name in BUILTIN_NAMES {
            let spec = ExperimentSpec::builtin(name).unwrap();
            spec.validate().unwrap();
            let text = spec.to_toml().unwrap();
            let back = ExperimentSpec::from_toml(&text).unwrap();
            assert_eq!(back, spec, "{name}\n{text}");
        }
    }

    #[test]
    fn listing_shows_published_settings() {
        let text = list_cases();
        let line = |n: &str| text.lines().find(|l| l.starts_with(n)).unwrap().to_owned();
        let c1 = line("case1");
        assert!(c1.contains("bias 0.1 deg/h") && c1.contains("init err [10,10,30] deg"), "{c1}");
        assert!(line("case3").contains("bias 10 deg/h"));
        let c2 = line("case2");
        assert!(c2.contains("init err [30,30,60] deg") && c2.contains("(25 deg)²"), "{c2}");
        for n in BUILTIN_NAMES {
            assert!(text.contains(n));
        }
    }

    #[test]
    fn partial_file_uses_defaults() {
        let spec = ExperimentSpec::from_toml(
            "name = \"mine\"\nmethods = [\"Optimal\"]\noutputs = \"o\"\n[scenario]\nmc_runs = 3\n",
        )
        .unwrap();
        assert_eq!(spec.scenario.mc_runs, 3);
        assert_eq!(spec.scenario.duration_s, 5400.0);
    }

    #[test]
    fn invalid_values_name_the_field() {
        let err = ExperimentSpec::from_toml(
            "name = \"x\"\nmethods = [\"Optimal\"]\noutputs = \"o\"\n[scenario]\nmc_runs = 0\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("mc_runs"), "{err}");
        let err = ExperimentSpec::from_toml(
            "name = \"x\"\nmethods = [\"Optimal\"]\noutputs = \"o\"\n[scenario]\nstar_noise = 1.0\n",
        )
        .unwrap_err();
        assert!(err.to_string().contains("star_noise"), "{err}");
        let err = ExperimentSpec::from_toml("name = \"x\"\nmethods = []\noutputs = \"o\"\n").unwrap_err();
        assert!(err.to_string().contains("methods"));
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn filter_methods_need_star_noise() {
        let mut spec = ExperimentSpec::builtin("smoke").unwrap();
        spec.scenario.star_noise_rad = 0.0;
        assert!(spec.validate().unwrap_err().to_string().contains("star_noise_rad"));
        spec.methods = vec![Method::Optimal];
        spec.validate().unwrap();
    }

    #[test]
    fn unknown_case_is_config_error() {
        let err = ExperimentSpec::resolve("case9").unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}
