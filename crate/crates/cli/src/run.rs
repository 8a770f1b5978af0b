//! One seeded learning run: build source and oracle, learn, score.

use std::time::Instant;

use halfspace::certificate::CertSearchConfig;
use halfspace::geometry::{self, UnitVector};
use halfspace::learner::{
    self, AutoThreshold, CertOutcome, CertificateOracle, FreshSource, LearnerConfig, LearnerTrace, LogConcaveOracle,
    PoolSource, RoundRecord, SampleSource, WellBehavedOracle,
};
use halfspace::synthetic::{self, InstanceSpec, WellBehavedParams};
use halfspace::warmstart::WarmStartConfig;

use crate::config::{ExperimentConfig, NoiseConfig, OracleKind, SourceKind};
use crate::metrics::{MetricsRow, SCHEMA_VERSION};
use crate::CliError;

/// Search / holdout / loss sizes carved out of a budget of `n`.
pub fn split_budget(n: usize) -> (usize, usize, usize) {
    let search = n / 2;
    let holdout = n / 4;
    (search, holdout, n - search - holdout)
}

pub fn build_oracle(
    cfg: &ExperimentConfig,
    spec: &InstanceSpec,
    params: &WellBehavedParams,
    seed: u64,
    search_n: usize,
    holdout_n: usize,
) -> Box<dyn CertificateOracle + Send> {
    let eps = cfg.learner.epsilon;
    let mut search = CertSearchConfig::new(params, &spec.noise, eps);
    search.seed = seed;
    search.samples_per_round = search_n;
    search.holdout_n = holdout_n;
    let auto_c = cfg.learner.auto_c.then(AutoThreshold::default);
    let d = spec.dim();
    match cfg.oracle {
        OracleKind::WellBehaved => {
            let mut o = WellBehavedOracle::new(*params, spec.noise.clone(), search, d);
            o.auto_c = auto_c;
            o.rho_override = cfg.learner.rho_eps;
            Box::new(o)
        }
        OracleKind::LogConcave => {
            let warm = WarmStartConfig::new(spec.noise.alpha, spec.noise.big_a, eps, seed);
            let mut o = LogConcaveOracle::new(*params, spec.noise.clone(), search, warm, d);
            o.auto_c = auto_c;
            o.rho_override = cfg.learner.rho_eps;
            Box::new(o)
        }
    }
}

pub struct RunOutput {
    pub w: UnitVector,
    pub trace: LearnerTrace,
    pub row: MetricsRow,
    pub wall_ms: u128,
}

/// Runs repeat `repeat` of `cfg` (seed `cfg.seed + repeat`), reporting each
/// round to `on_round`.
pub fn run_once(
    cfg: &ExperimentConfig,
    point: usize,
    repeat: usize,
    on_round: &mut dyn FnMut(&RoundRecord),
) -> Result<RunOutput, CliError> {
    let start = Instant::now();
    let seed = cfg.seed + repeat as u64;
    let spec = cfg.instance.instance(seed)?;
    let params = synthetic::well_behaved_params(&spec.marginal)?;
    let l = &cfg.learner;
    let n = l.samples_n;
    let (mut source, per_round): (Box<dyn SampleSource>, usize) = match l.source {
        SourceKind::Pool => {
            let (s, h, o) = split_budget(n);
            (Box::new(PoolSource::from_instance(&spec, s, h, o)), n)
        }
        SourceKind::Fresh => (Box::new(FreshSource::new(spec.clone())), (n / l.max_rounds).max(4)),
    };
    let (search_n, holdout_n, loss_n) = split_budget(per_round);
    let mut oracle = build_oracle(cfg, &spec, &params, seed, search_n, holdout_n);
    let rho_eps = oracle.rho(l.epsilon);
    let lcfg = LearnerConfig {
        max_rounds: l.max_rounds,
        loss_batch: loss_n,
        schedule: l.schedule,
        init: l.init(seed),
        reference: Some(spec.target.clone()),
        ..LearnerConfig::new(l.epsilon, l.delta, rho_eps)
    };
    let (w, trace) = learner::learn_observed(source.as_mut(), oracle.as_mut(), &lcfg, on_round)?;
    let final_angle = geometry::angle(&w, &spec.target);
    let err = synthetic::disagreement_error(&spec, &w, l.eval_n).mean;
    let cert_value =
        trace.rounds.iter().rev().find(|r| r.cert_outcome == CertOutcome::Witness).and_then(|r| r.cert_value);
    let row = MetricsRow {
        schema_version: SCHEMA_VERSION,
        point,
        repeat,
        seed,
        family: format!("{:?}", spec.marginal.family),
        dim: spec.dim(),
        alpha: spec.noise.alpha,
        big_a: spec.noise.big_a,
        noise: noise_label(&cfg.instance.noise).into(),
        n,
        epsilon: l.epsilon,
        oracle: oracle_label(cfg.oracle).into(),
        final_angle,
        final_01_error: err.clamp(0.0, 1.0),
        error_budget: learner::angle_to_error(final_angle, &params, l.epsilon),
        rounds_used: trace.rounds.len(),
        samples_used: trace.samples_used,
        cert_value,
        stop_reason: serde_json::to_value(trace.stop_reason)?.as_str().unwrap_or_default().to_string(),
    };
    Ok(RunOutput { w, trace, row, wall_ms: start.elapsed().as_millis() })
}

pub fn noise_label(n: &NoiseConfig) -> &'static str {
    match n {
        NoiseConfig::ConstantRate { .. } => "constant_rate",
        NoiseConfig::MarginPowerLaw { .. } => "margin_power_law",
        NoiseConfig::Adversarialish { .. } => "adversarialish",
    }
}

pub fn oracle_label(o: OracleKind) -> &'static str {
    match o {
        OracleKind::WellBehaved => "well_behaved",
        OracleKind::LogConcave => "log_concave",
    }
}
