//! Experiment configuration: TOML on disk, flags on top.

use std::path::PathBuf;

use halfspace::geometry::UnitVector;
use halfspace::learner::{InitRule, StepSchedule};
use halfspace::synthetic::{self, InstanceSpec, MarginalFamily, MarginalSpec, NoiseSpec};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseConfig {
    ConstantRate { rate: f64 },
    MarginPowerLaw { scale: f64 },
    Adversarialish { sectors: usize, min_gap: f64 },
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig::ConstantRate { rate: 0.2 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TargetConfig {
    /// "random" (drawn from the instance seed) or "first_axis".
    Named(String),
    Explicit(Vec<f64>),
}

impl Default for TargetConfig {
    fn default() -> Self {
        TargetConfig::Named("random".into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InstanceConfig {
    pub family: String,
    pub dim: usize,
    pub alpha: f64,
    /// Raises the tail constant above the profile's own value.
    pub big_a: Option<f64>,
    pub noise: NoiseConfig,
    pub target: TargetConfig,
}

impl Default for InstanceConfig {
    fn default() -> Self {
        Self {
            family: "gaussian".into(),
            dim: 5,
            alpha: 0.5,
            big_a: None,
            noise: NoiseConfig::default(),
            target: TargetConfig::default(),
        }
    }
}

impl InstanceConfig {
    pub fn family(&self) -> Result<MarginalFamily, CliError> {
        self.family.parse().map_err(|_| CliError::InvalidConfig(format!("unknown family {:?}", self.family)))
    }

    pub fn marginal(&self) -> Result<MarginalSpec, CliError> {
        Ok(MarginalSpec::new(self.family()?, self.dim)?)
    }

    pub fn noise_spec(&self, seed: u64) -> Result<NoiseSpec, CliError> {
        let marginal = self.marginal()?;
        let mut spec = match self.noise {
            NoiseConfig::ConstantRate { rate } => NoiseSpec::constant_rate(self.alpha, rate)?,
            NoiseConfig::MarginPowerLaw { scale } => NoiseSpec::margin_power_law(self.alpha, scale, &marginal)?,
            NoiseConfig::Adversarialish { sectors, min_gap } => {
                NoiseSpec::adversarialish(self.alpha, seed, sectors, min_gap)?
            }
        };
        if let Some(a) = self.big_a {
            if !(a >= spec.big_a) {
                return Err(CliError::InvalidConfig(format!(
                    "big_a {a} is below the value {} the noise profile needs",
                    spec.big_a
                )));
            }
            spec.big_a = a;
        }
        Ok(spec)
    }

    pub fn target(&self, seed: u64) -> Result<UnitVector, CliError> {
        match &self.target {
            TargetConfig::Named(n) if n == "random" => Ok(synthetic::random_direction(self.dim, seed ^ TARGET_SALT)),
            TargetConfig::Named(n) if n == "first_axis" => Ok(UnitVector::basis(self.dim, 0)?),
            TargetConfig::Named(n) => Err(CliError::InvalidConfig(format!("unknown target {n:?}"))),
            TargetConfig::Explicit(v) => {
                if v.len() != self.dim {
                    return Err(CliError::InvalidConfig(format!(
                        "target has {} entries, dim is {}",
                        v.len(),
                        self.dim
                    )));
                }
                Ok(UnitVector::normalize(v.clone())?)
            }
        }
    }

    pub fn instance(&self, seed: u64) -> Result<InstanceSpec, CliError> {
        Ok(InstanceSpec::new(self.marginal()?, self.target(seed)?, self.noise_spec(seed)?, seed)?)
    }
}

const TARGET_SALT: u64 = 0x7461_7267_6574;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum OracleKind {
    WellBehaved,
    LogConcave,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SourceKind {
    /// One budget split into search / holdout / loss partitions.
    Pool,
    /// A new batch of N/T per round.
    Fresh,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LearnerSection {
    pub epsilon: f64,
    pub delta: f64,
    /// Defaults to the well-behaved closed form at ε.
    pub rho_eps: Option<f64>,
    pub max_rounds: usize,
    pub samples_n: usize,
    pub source: SourceKind,
    pub schedule: StepSchedule,
    pub random_init: bool,
    pub auto_c: bool,
    /// Examples used to estimate the final 0-1 disagreement.
    pub eval_n: usize,
}

impl Default for LearnerSection {
    fn default() -> Self {
        Self {
            epsilon: 0.15,
            delta: 0.1,
            rho_eps: None,
            max_rounds: 200,
            samples_n: 1_000_000,
            source: SourceKind::Pool,
            schedule: StepSchedule::AdaptiveRegret,
            random_init: true,
            auto_c: false,
            eval_n: 200_000,
        }
    }
}

impl LearnerSection {
    pub fn init(&self, seed: u64) -> InitRule {
        if self.random_init {
            InitRule::Random(seed ^ INIT_SALT)
        } else {
            InitRule::FirstAxis
        }
    }
}

const INIT_SALT: u64 = 0x696e_6974;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepGrid {
    pub alpha: Option<Vec<f64>>,
    pub big_a: Option<Vec<f64>>,
    pub dim: Option<Vec<usize>>,
    pub n: Option<Vec<usize>>,
    pub epsilon: Option<Vec<f64>>,
}

/// One grid coordinate; unset axes keep the base config value.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub alpha: Option<f64>,
    pub big_a: Option<f64>,
    pub dim: Option<usize>,
    pub n: Option<usize>,
    pub epsilon: Option<f64>,
}

impl SweepGrid {
    /// Cartesian product of the set axes, in alpha, big_a, dim, n, epsilon order.
    pub fn points(&self) -> Result<Vec<GridPoint>, CliError> {
        let axes = [
            self.alpha.as_ref().map(Vec::len),
            self.big_a.as_ref().map(Vec::len),
            self.dim.as_ref().map(Vec::len),
            self.n.as_ref().map(Vec::len),
            self.epsilon.as_ref().map(Vec::len),
        ];
        if axes.iter().all(Option::is_none) || axes.contains(&Some(0)) {
            return Err(CliError::InvalidConfig("sweep grid is empty".into()));
        }
        let mut pts = vec![GridPoint::default()];
        fn expand<T: Copy>(
            pts: Vec<GridPoint>,
            vals: &Option<Vec<T>>,
            set: impl Fn(&mut GridPoint, T),
        ) -> Vec<GridPoint> {
            let Some(vals) = vals else { return pts };
            pts.into_iter()
                .flat_map(|p| {
                    vals.iter()
                        .map(|v| {
                            let mut q = p;
                            set(&mut q, *v);
                            q
                        })
                        .collect::<Vec<_>>()
                })
                .collect()
        }
        pts = expand(pts, &self.alpha, |p, v| p.alpha = Some(v));
        pts = expand(pts, &self.big_a, |p, v| p.big_a = Some(v));
        pts = expand(pts, &self.dim, |p, v| p.dim = Some(v));
        pts = expand(pts, &self.n, |p, v| p.n = Some(v));
        pts = expand(pts, &self.epsilon, |p, v| p.epsilon = Some(v));
        Ok(pts)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub repeats: usize,
    pub oracle: OracleKind,
    pub output_dir: PathBuf,
    pub instance: InstanceConfig,
    pub learner: LearnerSection,
    pub sweep: Option<SweepGrid>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            repeats: 1,
            oracle: OracleKind::WellBehaved,
            output_dir: PathBuf::from("thl-out"),
            instance: InstanceConfig::default(),
            learner: LearnerSection::default(),
            sweep: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::InvalidConfig(e.to_string()))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config always serializes")
    }

    /// Hex SHA-256 of the effective config (output directory excluded).
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.output_dir = PathBuf::new();
        hex::encode(Sha256::digest(c.to_toml().as_bytes()))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let l = &self.learner;
        if self.repeats == 0 {
            return Err(CliError::InvalidConfig("repeats must be at least 1".into()));
        }
        if !(l.epsilon > 0.0 && l.epsilon <= std::f64::consts::PI) {
            return Err(CliError::InvalidConfig(format!("epsilon {} outside (0, π]", l.epsilon)));
        }
        if !(l.delta > 0.0 && l.delta < 1.0) {
            return Err(CliError::InvalidConfig(format!("delta {} outside (0, 1)", l.delta)));
        }
        if l.max_rounds == 0 || l.samples_n < 4 || l.eval_n == 0 {
            return Err(CliError::InvalidConfig("max_rounds, samples_n and eval_n must be positive".into()));
        }
        if let Some(r) = l.rho_eps {
            if !(r > 0.0 && r <= 1.0) {
                return Err(CliError::InvalidConfig(format!("rho_eps {r} outside (0, 1]")));
            }
        }
        self.instance.instance(self.seed)?;
        if let Some(g) = &self.sweep {
            g.points()?;
        }
        Ok(())
    }

    /// This config with one sweep coordinate applied.
    pub fn at(&self, p: &GridPoint) -> ExperimentConfig {
        let mut c = self.clone();
        c.sweep = None;
        if let Some(a) = p.alpha {
            c.instance.alpha = a;
        }
        if let Some(a) = p.big_a {
            c.instance.big_a = Some(a);
        }
        if let Some(d) = p.dim {
            c.instance.dim = d;
            if let TargetConfig::Explicit(_) = c.instance.target {
                c.instance.target = TargetConfig::default();
            }
        }
        if let Some(n) = p.n {
            c.learner.samples_n = n;
        }
        if let Some(e) = p.epsilon {
            c.learner.epsilon = e;
        }
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let c = ExperimentConfig::default();
        let back = ExperimentConfig::from_toml(&c.to_toml()).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
    }

    #[test]
    fn partial_file_fills_defaults() {
        let c = ExperimentConfig::from_toml(
            "seed = 4\n[instance]\ndim = 3\nnoise = { kind = \"margin_power_law\", scale = 1.0 }\n",
        )
        .unwrap();
        assert_eq!(c.seed, 4);
        assert_eq!(c.instance.dim, 3);
        assert_eq!(c.learner.epsilon, 0.15);
        c.validate().unwrap();
    }

    #[test]
    fn grid_is_cartesian() {
        let g = SweepGrid { alpha: Some(vec![0.5, 0.8]), n: Some(vec![10, 20, 30]), ..Default::default() };
        let pts = g.points().unwrap();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[1], GridPoint { alpha: Some(0.5), n: Some(20), ..Default::default() });
        assert!(SweepGrid::default().points().is_err());
        assert!(SweepGrid { n: Some(vec![]), ..Default::default() }.points().is_err());
    }

    #[test]
    fn epsilon_out_of_range_rejected() {
        let mut c = ExperimentConfig::default();
        c.learner.epsilon = 2.0 * std::f64::consts::PI;
        assert!(matches!(c.validate(), Err(CliError::InvalidConfig(_))));
    }

    #[test]
    fn big_a_cannot_shrink() {
        let mut c = ExperimentConfig::default();
        c.instance.big_a = Some(0.5);
        assert!(c.validate().is_err());
        c.instance.big_a = Some(50.0);
        c.validate().unwrap();
    }
}
