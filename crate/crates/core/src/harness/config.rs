//! Experiment configuration: one JSON document drives every subcommand.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::bayes::MIN_GRID;
use crate::error::{Error, Result};
use crate::qalgebra::DeformationParameter;
use crate::states::CatParity;

/// Seed used when a config names none.
pub const DEFAULT_SEED: u64 = 271_828;

/// How a requested total mean is shared between the two input modes. The
/// figure axes quote one photon number without naming the split, so both
/// readings are available and the active one is echoed in output metadata.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitRule {
    /// Each mode receives mean_total / 2.
    #[default]
    EqualSplit,
    /// The quoted number is read as the common per-mode mean.
    PerMode,
}

impl SplitRule {
    /// (mean_a, mean_b) for a requested total.
    pub fn per_mode_means(self, mean_total: f64) -> (f64, f64) {
        match self {
            SplitRule::EqualSplit => (0.5 * mean_total, 0.5 * mean_total),
            SplitRule::PerMode => (mean_total, mean_total),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SplitRule::EqualSplit => "equal_split",
            SplitRule::PerMode => "per_mode",
        }
    }
}

/// What to sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SweepSpec {
    /// QFI versus photon number: the cross product of per-mode means and qs.
    QfiVsN { means: Vec<f64>, qs: Vec<f64> },
    /// QFI versus deformation at one total mean (split per the config rule).
    QfiVsQ { qs: Vec<f64>, mean_total: f64 },
    /// Bayesian Monte-Carlo at each total mean.
    Bayes { mean_totals: Vec<f64> },
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        let check_qs = |qs: &[f64]| -> Result<()> {
            for &q in qs {
                DeformationParameter::new(q)?;
            }
            Ok(())
        };
        let check_means = |ms: &[f64], what: &str| -> Result<()> {
            for &m in ms {
                if !(m >= 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "{what} must be >= 0, got {m}"
                    )));
                }
            }
            Ok(())
        };
        match self {
            SweepSpec::QfiVsN { means, qs } => {
                if means.is_empty() || qs.is_empty() {
                    return Err(Error::EmptySweep);
                }
                check_qs(qs)?;
                check_means(means, "per-mode mean")
            }
            SweepSpec::QfiVsQ { qs, mean_total } => {
                if qs.is_empty() {
                    return Err(Error::EmptySweep);
                }
                check_qs(qs)?;
                check_means(&[*mean_total], "mean_total")
            }
            SweepSpec::Bayes { mean_totals } => {
                if mean_totals.is_empty() {
                    return Err(Error::EmptySweep);
                }
                check_means(mean_totals, "mean_total")
            }
        }
    }
}

/// Default photon-number grid: 0.5 then the integers 1..=20 (per mode).
pub fn default_mean_grid() -> Vec<f64> {
    std::iter::once(0.5).chain((1..=20).map(f64::from)).collect()
}

/// Default deformation grid 0.10, 0.15, ..., 1.00.
pub fn default_q_grid() -> Vec<f64> {
    (2..=20).map(|i| f64::from(i) / 20.0).collect()
}

/// Default sweep for `qfi-sweep`.
pub fn default_qfi_vs_n_sweep() -> SweepSpec {
    SweepSpec::QfiVsN { means: default_mean_grid(), qs: vec![0.5, 0.8, 0.9, 1.0] }
}

/// Default sweep for `qfi-vs-q` at a given total mean.
pub fn default_qfi_vs_q_sweep(mean_total: f64) -> SweepSpec {
    SweepSpec::QfiVsQ { qs: default_q_grid(), mean_total }
}

/// Default sweep for `bayes-sim`.
pub fn default_bayes_sweep() -> SweepSpec {
    SweepSpec::Bayes { mean_totals: vec![10.0, 15.0, 20.0] }
}

/// Full experiment description. Serialized verbatim into output metadata so
/// every artifact names the run that produced it.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub q: f64,
    pub parity: CatParity,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_b: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_total: Option<f64>,
    pub split_rule: SplitRule,
    pub n_max: usize,
    pub phi_true: f64,
    pub nu: u32,
    pub runs: u32,
    pub grid_g: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            q: 0.9,
            parity: CatParity::Even,
            mean_a: None,
            mean_b: None,
            mean_total: None,
            split_rule: SplitRule::default(),
            n_max: 30,
            phi_true: FRAC_PI_2,
            nu: 30,
            runs: 100,
            grid_g: crate::bayes::DEFAULT_GRID,
            seed: DEFAULT_SEED,
            sweep: None,
            output_dir: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        DeformationParameter::new(self.q)?;
        if !(0.0..=PI).contains(&self.phi_true) {
            return Err(Error::InvalidConfig(format!(
                "phi_true must lie in [0, pi], got {}",
                self.phi_true
            )));
        }
        if self.n_max == 0 {
            return Err(Error::InvalidConfig("n_max must be positive".into()));
        }
        if self.runs == 0 {
            return Err(Error::InvalidConfig("runs must be positive".into()));
        }
        if self.grid_g < MIN_GRID {
            return Err(Error::GridTooCoarse { got: self.grid_g, min: MIN_GRID });
        }
        for (name, v) in [
            ("mean_a", self.mean_a),
            ("mean_b", self.mean_b),
            ("mean_total", self.mean_total),
        ] {
            if let Some(m) = v {
                if !(m >= 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "{name} must be >= 0, got {m}"
                    )));
                }
            }
        }
        if let Some(sweep) = &self.sweep {
            sweep.validate()?;
        }
        Ok(())
    }

    /// Per-mode means for a single operating point: explicit mean_a/mean_b,
    /// or mean_total shared by the split rule. Exactly one form must be given.
    pub fn resolve_means(&self) -> Result<(f64, f64)> {
        match (self.mean_a, self.mean_b, self.mean_total) {
            (Some(a), Some(b), None) => Ok((a, b)),
            (None, None, Some(t)) => Ok(self.split_rule.per_mode_means(t)),
            (None, None, None) => Err(Error::InvalidConfig(
                "specify mean_a and mean_b together, or mean_total".into(),
            )),
            _ => Err(Error::InvalidConfig(
                "mean_a/mean_b and mean_total are mutually exclusive".into(),
            )),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn from_json_file(path: &std::path::Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        ExperimentConfig::default().validate().unwrap();
    }

    #[test]
    fn split_rules() {
        assert_eq!(SplitRule::EqualSplit.per_mode_means(20.0), (10.0, 10.0));
        assert_eq!(SplitRule::PerMode.per_mode_means(20.0), (20.0, 20.0));
    }

    #[test]
    fn bad_configs_are_rejected() {
        let mut c = ExperimentConfig { q: 1.5, ..Default::default() };
        assert!(c.validate().is_err());
        c.q = 0.9;
        c.phi_true = -0.1;
        assert!(c.validate().is_err());
        c.phi_true = FRAC_PI_2;
        c.runs = 0;
        assert!(c.validate().is_err());
        c.runs = 1;
        c.grid_g = 8;
        assert!(matches!(c.validate(), Err(Error::GridTooCoarse { .. })));
        c.grid_g = 2048;
        c.sweep = Some(SweepSpec::Bayes { mean_totals: vec![] });
        assert!(matches!(c.validate(), Err(Error::EmptySweep)));
    }

    #[test]
    fn mean_resolution() {
        let mut c = ExperimentConfig::default();
        assert!(c.resolve_means().is_err());
        c.mean_total = Some(20.0);
        assert_eq!(c.resolve_means().unwrap(), (10.0, 10.0));
        c.split_rule = SplitRule::PerMode;
        assert_eq!(c.resolve_means().unwrap(), (20.0, 20.0));
        c.mean_a = Some(1.0);
        assert!(c.resolve_means().is_err());
        c.mean_b = Some(2.0);
        c.mean_total = None;
        assert_eq!(c.resolve_means().unwrap(), (1.0, 2.0));
    }

    #[test]
    fn config_json_round_trip() {
        let c = ExperimentConfig {
            mean_total: Some(20.0),
            sweep: Some(default_qfi_vs_q_sweep(20.0)),
            ..Default::default()
        };
        let s = serde_json::to_string(&c).unwrap();
        let back = ExperimentConfig::from_json_str(&s).unwrap();
        assert_eq!(back.sweep, c.sweep);
        assert_eq!(back.seed, c.seed);
        assert_eq!(back.split_rule, c.split_rule);
    }

    #[test]
    fn unknown_config_keys_are_rejected() {
        assert!(ExperimentConfig::from_json_str("{\"nmax\": 10}").is_err());
    }

    #[test]
    fn default_grids() {
        let means = default_mean_grid();
        assert_eq!(means.len(), 21);
        assert_eq!(means[0], 0.5);
        assert_eq!(*means.last().unwrap(), 20.0);
        let qs = default_q_grid();
        assert_eq!(qs.len(), 19);
        assert_eq!(qs[0], 0.1);
        assert_eq!(*qs.last().unwrap(), 1.0);
    }
}
