//! Experiment configuration and the flat `key=value` config-file format.

use std::fmt;
use std::str::FromStr;

use rcsm_core::model::{IndexVector, SystemDims};
use serde::{Deserialize, Serialize};

use crate::{HarnessError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DetectorKind {
    Correlator,
    MlGa,
    Cavi,
    ExactMixture,
}

impl DetectorKind {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Correlator => "correlator",
            Self::MlGa => "ml-ga",
            Self::Cavi => "cavi",
            Self::ExactMixture => "exact-mixture",
        }
    }
}

impl fmt::Display for DetectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DetectorKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "correlator" => Ok(Self::Correlator),
            "ml-ga" | "ml_ga" => Ok(Self::MlGa),
            "cavi" => Ok(Self::Cavi),
            "exact-mixture" | "exact_mixture" => Ok(Self::ExactMixture),
            other => Err(HarnessError::Config(format!("unknown detector '{other}'"))),
        }
    }
}

/// Parameters a sweep may vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    Mu,
    Iters,
    SnrDb,
    M,
    L,
    K,
    N,
}

impl SweepParam {
    pub const WHITELIST: [&'static str; 7] = ["mu", "iters", "snr_db", "m", "l", "k", "n"];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Mu => "mu",
            Self::Iters => "iters",
            Self::SnrDb => "snr_db",
            Self::M => "m",
            Self::L => "l",
            Self::K => "k",
            Self::N => "n",
        }
    }
}

impl FromStr for SweepParam {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "mu" => Ok(Self::Mu),
            "iters" | "n_run" => Ok(Self::Iters),
            "snr_db" | "snr" => Ok(Self::SnrDb),
            "m" => Ok(Self::M),
            "l" => Ok(Self::L),
            "k" => Ok(Self::K),
            "n" => Ok(Self::N),
            _ => Err(HarnessError::Config(format!(
                "'{s}' cannot be swept; allowed: {}",
                Self::WHITELIST.join(", ")
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub param: SweepParam,
    pub values: Vec<f64>,
}

impl FromStr for Sweep {
    type Err = HarnessError;

    /// Parses `name=v1,v2,...`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, list) = s
            .split_once('=')
            .ok_or_else(|| HarnessError::Config(format!("sweep '{s}' is not of the form name=v1,v2")))?;
        let param = name.trim().parse()?;
        let values = list
            .split(',')
            .map(|v| {
                v.trim()
                    .parse::<f64>()
                    .map_err(|_| HarnessError::Config(format!("bad sweep value '{v}'")))
            })
            .collect::<Result<Vec<_>>>()?;
        if values.is_empty() {
            return Err(HarnessError::Config("sweep needs at least one value".into()));
        }
        Ok(Self { param, values })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dims: SystemDims,
    pub snr_db: f64,
    pub order: usize,
    pub detector: DetectorKind,
    pub step_size: f64,
    pub iterations: usize,
    pub trials: usize,
    pub seed: u64,
    pub sweep: Option<Sweep>,
    /// Draw supports from all `C(L, K)` subsets instead of the `2^{B_im}` addressable ones.
    pub all_subsets: bool,
    /// Use this support in every trial instead of drawing one.
    pub fixed_support: Option<IndexVector>,
    /// Worker threads for trial-level parallelism; 1 runs in order on the caller.
    pub threads: usize,
    /// Record detector wall time; off makes sweep output fully reproducible.
    pub timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dims: SystemDims {
                l: 20,
                n: 10,
                k: 2,
                m: 4,
            },
            snr_db: 10.0,
            order: 4,
            detector: DetectorKind::Cavi,
            step_size: 0.5,
            iterations: 10,
            trials: 1000,
            seed: 1,
            sweep: None,
            all_subsets: false,
            fixed_support: None,
            threads: 1,
            timing: true,
        }
    }
}

fn as_count(param: SweepParam, value: f64) -> Result<usize> {
    if value >= 0.0 && value.fract() == 0.0 && value <= u32::MAX as f64 {
        Ok(value as usize)
    } else {
        Err(HarnessError::Config(format!(
            "sweep value {value} for '{}' must be a non-negative integer",
            param.name()
        )))
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let d = self.dims;
        SystemDims::new(d.l, d.n, d.k, d.m)?;
        if self.trials == 0 {
            return Err(HarnessError::Config("trials must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.step_size) {
            return Err(HarnessError::Config(format!(
                "mu must lie in [0, 1], got {}",
                self.step_size
            )));
        }
        if self.iterations == 0 {
            return Err(HarnessError::Config("iters must be at least 1".into()));
        }
        if !self.snr_db.is_finite() {
            return Err(HarnessError::Config("snr_db must be finite".into()));
        }
        if let Some(x) = &self.fixed_support {
            if x.l() != d.l || x.k() != d.k {
                return Err(HarnessError::Config(format!(
                    "fixed support {x} does not match L={}, K={}",
                    d.l, d.k
                )));
            }
        }
        rcsm_core::model::qam_constellation(self.order)?;
        Ok(())
    }

    /// Copy of this config with one swept parameter replaced.
    pub fn with_param(&self, param: SweepParam, value: f64) -> Result<Self> {
        let mut cfg = self.clone();
        cfg.sweep = None;
        match param {
            SweepParam::Mu => cfg.step_size = value,
            SweepParam::Iters => cfg.iterations = as_count(param, value)?,
            SweepParam::SnrDb => cfg.snr_db = value,
            SweepParam::M => cfg.dims.m = as_count(param, value)?,
            SweepParam::L => cfg.dims.l = as_count(param, value)?,
            SweepParam::K => cfg.dims.k = as_count(param, value)?,
            SweepParam::N => cfg.dims.n = as_count(param, value)?,
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Turns a flat `key=value` file into command-line flags (`--key value`).
///
/// Blank lines and `#` comments are skipped. Boolean keys take
/// `true`/`false`; `true` emits the bare flag.
pub fn config_file_args(text: &str) -> Result<Vec<String>> {
    const BOOLEAN: [&str; 2] = ["all-subsets", "no-timing"];
    let mut args = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| HarnessError::Config(format!("line {}: expected key=value", lineno + 1)))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        if key == "config" {
            return Err(HarnessError::Config(
                "config files cannot include other config files".into(),
            ));
        }
        if BOOLEAN.contains(&key.as_str()) {
            match value {
                "true" | "1" | "yes" => args.push(format!("--{key}")),
                "false" | "0" | "no" => {}
                _ => {
                    return Err(HarnessError::Config(format!(
                        "line {}: '{key}' expects true or false",
                        lineno + 1
                    )))
                }
            }
        } else {
            args.push(format!("--{key}"));
            args.push(value.to_string());
        }
    }
    Ok(args)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_parsing() {
        let s: Sweep = "mu=0.1,0.5, 0.9".parse().unwrap();
        assert_eq!(s.param, SweepParam::Mu);
        assert_eq!(s.values, vec![0.1, 0.5, 0.9]);
        assert_eq!("snr-db=0,5".parse::<Sweep>().unwrap().param, SweepParam::SnrDb);
        assert!("seed=1,2".parse::<Sweep>().is_err());
        assert!("mu".parse::<Sweep>().is_err());
        assert!("mu=a".parse::<Sweep>().is_err());
    }

    #[test]
    fn with_param_validates() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cfg.with_param(SweepParam::K, 3.0).unwrap().dims.k, 3);
        assert!(cfg.with_param(SweepParam::K, 2.5).is_err());
        assert!(cfg.with_param(SweepParam::K, 21.0).is_err());
        assert!(cfg.with_param(SweepParam::Mu, 1.5).is_err());
    }

    #[test]
    fn config_file_to_args() {
        let text = "# scenario\nn = 40\nsnr_db=10\nall-subsets=true\nno-timing=false\nsweep=m=1,2,3\n";
        let args = config_file_args(text).unwrap();
        assert_eq!(
            args,
            vec!["--n", "40", "--snr-db", "10", "--all-subsets", "--sweep", "m=1,2,3"]
        );
        assert!(config_file_args("n 40").is_err());
        assert!(config_file_args("all-subsets=maybe").is_err());
    }

    #[test]
    fn detector_names_round_trip() {
        for d in [
            DetectorKind::Correlator,
            DetectorKind::MlGa,
            DetectorKind::Cavi,
            DetectorKind::ExactMixture,
        ] {
            assert_eq!(d.name().parse::<DetectorKind>().unwrap(), d);
        }
        assert!("sphere".parse::<DetectorKind>().is_err());
    }
}
