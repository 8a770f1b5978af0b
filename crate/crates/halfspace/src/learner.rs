//! Projected online gradient descent driven by a certificate oracle.
//!
//! Each round asks the oracle whether the current direction can be refuted.
//! A refutation T turns into the linear loss ℓ(w) = ⟨w, −E[(T(x)+ρ/2)·y·x]⟩;
//! the first round the oracle cannot refute ends the run.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certificate::{self, CertSearchConfig, CertificateError, CertificateWitness, TransformConfig};
use crate::geometry::{self, GeometryError, UnitVector};
use crate::stats::{Estimate, MeanVar};
use crate::synthetic::{self, Dataset, InstanceSpec, NoiseSpec, WellBehavedParams};
use crate::warmstart::{self, WarmStartConfig, WarmStartError};

#[derive(Debug, Error)]
pub enum LearnerError {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("sample source exhausted: {0}")]
    SourceExhausted(String),
    #[error(transparent)]
    Certificate(#[from] CertificateError),
    #[error(transparent)]
    WarmStart(#[from] WarmStartError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// What a batch will be used for. Pooled sources keep the roles on
/// disjoint partitions; fresh sources ignore it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleRole {
    Search,
    Holdout,
    Loss,
}

pub trait SampleSource {
    fn dim(&self) -> usize;
    fn draw(&mut self, role: SampleRole, n: usize) -> Result<Arc<Dataset>, LearnerError>;
    /// Number of distinct examples handed out so far.
    fn distinct_samples(&self) -> usize;
}

/// Every draw is a new independent stream of the example oracle.
#[derive(Debug, Clone)]
pub struct FreshSource {
    spec: InstanceSpec,
    next_stream: u64,
    drawn: usize,
}

impl FreshSource {
    pub fn new(spec: InstanceSpec) -> Self {
        Self { spec, next_stream: 1, drawn: 0 }
    }
}

impl SampleSource for FreshSource {
    fn dim(&self) -> usize {
        self.spec.dim()
    }

    fn draw(&mut self, _role: SampleRole, n: usize) -> Result<Arc<Dataset>, LearnerError> {
        let ds = synthetic::sample_stream(&self.spec, n, self.next_stream);
        self.next_stream += 1;
        self.drawn += n;
        Ok(Arc::new(ds))
    }

    fn distinct_samples(&self) -> usize {
        self.drawn
    }
}

/// A fixed budget split once into search / holdout / loss partitions that
/// are handed out again on every draw.
#[derive(Debug, Clone)]
pub struct PoolSource {
    search: Arc<Dataset>,
    holdout: Arc<Dataset>,
    loss: Arc<Dataset>,
    touched: [bool; 3],
}

impl PoolSource {
    pub fn new(search: Dataset, holdout: Dataset, loss: Dataset) -> Self {
        Self { search: Arc::new(search), holdout: Arc::new(holdout), loss: Arc::new(loss), touched: [false; 3] }
    }

    /// Draws `search + holdout + loss` examples from `spec` and splits them.
    pub fn from_instance(spec: &InstanceSpec, search: usize, holdout: usize, loss: usize) -> Self {
        let all = synthetic::sample_stream(spec, search + holdout + loss, 1);
        Self::new(
            all.slice(0..search),
            all.slice(search..search + holdout),
            all.slice(search + holdout..search + holdout + loss),
        )
    }

    pub fn total(&self) -> usize {
        self.search.len() + self.holdout.len() + self.loss.len()
    }
}

impl SampleSource for PoolSource {
    fn dim(&self) -> usize {
        self.search.dim()
    }

    fn draw(&mut self, role: SampleRole, n: usize) -> Result<Arc<Dataset>, LearnerError> {
        let (part, idx) = match role {
            SampleRole::Search => (&self.search, 0),
            SampleRole::Holdout => (&self.holdout, 1),
            SampleRole::Loss => (&self.loss, 2),
        };
        if n > part.len() {
            return Err(LearnerError::SourceExhausted(format!("{role:?} pool has {} < {n}", part.len())));
        }
        self.touched[idx] = true;
        if n == part.len() {
            Ok(Arc::clone(part))
        } else {
            Ok(Arc::new(part.slice(0..n)))
        }
    }

    fn distinct_samples(&self) -> usize {
        let parts = [&self.search, &self.holdout, &self.loss];
        parts.iter().zip(self.touched).filter(|(_, t)| *t).map(|(p, _)| p.len()).sum()
    }
}

/// A bounded certifying function handed back by an oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub witness: CertificateWitness,
    /// Angle guess under which the certificate was found.
    pub guess: f64,
    pub rho: f64,
    /// Holdout estimate of the projected window value.
    pub holdout: Estimate,
}

impl Certificate {
    /// T(x) scaled so that sup T ≤ 1.
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.witness.evaluate_bounded(x)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleAnswer {
    Refuted(Certificate),
    Fail,
}

/// One-sided refutation procedure: may only return a certificate when the
/// queried direction is at least `theta` away from the target.
pub trait CertificateOracle {
    fn query(
        &mut self,
        w: &UnitVector,
        theta: f64,
        delta: f64,
        source: &mut dyn SampleSource,
    ) -> Result<OracleAnswer, LearnerError>;

    /// The certificate magnitude ρ(θ) the oracle promises.
    fn rho(&self, theta: f64) -> f64;
}

/// Order in which angle guesses are tried.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GuessOrder {
    /// π/2, π/4, … down to θ.
    Descending,
    /// θ, 2θ, … up to π/2.
    Ascending,
}

/// Angle guesses between `theta` and π/2 by powers of two.
pub fn angle_guesses(theta: f64, order: GuessOrder) -> Vec<f64> {
    let top = std::f64::consts::FRAC_PI_2;
    let mut gs = Vec::new();
    match order {
        GuessOrder::Descending => {
            let mut g = top;
            while g > theta {
                gs.push(g);
                g /= 2.0;
            }
            gs.push(theta.min(top));
        }
        GuessOrder::Ascending => {
            let mut g = theta;
            while g < top {
                gs.push(g);
                g *= 2.0;
            }
            gs.push(top);
        }
    }
    gs
}

/// Halving calibration of the acceptance threshold c.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AutoThreshold {
    pub c0: f64,
    /// Standard errors of the best training window below which c never goes.
    pub floor_multiple: f64,
}

impl Default for AutoThreshold {
    fn default() -> Self {
        Self { c0: 0.02, floor_multiple: 10.0 }
    }
}

fn search_on_guess(
    train: &Dataset,
    holdout: &Dataset,
    w: &UnitVector,
    guess: f64,
    v0: Option<&UnitVector>,
    cfg: &CertSearchConfig,
    auto_c: Option<AutoThreshold>,
) -> Result<Option<Certificate>, LearnerError> {
    let rho = (guess / (w.dim() as f64).sqrt()).min(1.0);
    let tcfg = TransformConfig::new(w.clone(), rho, cfg.r)?;
    let (train_p, hold_p) = match (certificate::transform(train, &tcfg), certificate::transform(holdout, &tcfg)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(CertificateError::EmptyBand { .. }), _) | (_, Err(CertificateError::EmptyBand { .. })) => return Ok(None),
        (Err(e), _) | (_, Err(e)) => return Err(e.into()),
    };
    let mut local = cfg.clone();
    local.theta_min = guess;
    let out = match auto_c {
        None => certificate::certify_with_restarts(&train_p, &hold_p, &tcfg, v0, &local)?,
        Some(a) => certificate::certify_auto_c(&train_p, &hold_p, &tcfg, v0, &local, a.c0, a.floor_multiple)?.result,
    };
    Ok(match out.outcome {
        certificate::SearchOutcome::Witness { witness, report } => Some(Certificate {
            witness,
            guess,
            rho,
            holdout: report.holdout.expect("witness carries its holdout estimate"),
        }),
        certificate::SearchOutcome::Fail { .. } => None,
    })
}

/// Certificate search from random starting directions.
#[derive(Debug, Clone)]
pub struct WellBehavedOracle {
    pub params: WellBehavedParams,
    pub noise: NoiseSpec,
    pub search: CertSearchConfig,
    pub dim: usize,
    pub order: GuessOrder,
    pub rho_override: Option<f64>,
    pub auto_c: Option<AutoThreshold>,
    queries: u64,
}

impl WellBehavedOracle {
    pub fn new(params: WellBehavedParams, noise: NoiseSpec, search: CertSearchConfig, dim: usize) -> Self {
        Self { params, noise, search, dim, order: GuessOrder::Descending, rho_override: None, auto_c: None, queries: 0 }
    }
}

impl CertificateOracle for WellBehavedOracle {
    fn query(
        &mut self,
        w: &UnitVector,
        theta: f64,
        _delta: f64,
        source: &mut dyn SampleSource,
    ) -> Result<OracleAnswer, LearnerError> {
        self.queries += 1;
        let train = source.draw(SampleRole::Search, self.search.samples_per_round)?;
        let holdout = source.draw(SampleRole::Holdout, self.search.holdout_n)?;
        for (k, guess) in angle_guesses(theta, self.order).into_iter().enumerate() {
            let mut cfg = self.search.clone();
            cfg.seed = self.search.seed.wrapping_add(self.queries.wrapping_mul(1_000_003)).wrapping_add(k as u64);
            if let Some(c) = search_on_guess(&train, &holdout, w, guess, None, &cfg, self.auto_c)? {
                return Ok(OracleAnswer::Refuted(c));
            }
        }
        Ok(OracleAnswer::Fail)
    }

    fn rho(&self, theta: f64) -> f64 {
        self.rho_override.unwrap_or_else(|| rho_for_well_behaved(theta, &self.params, &self.noise, self.dim))
    }
}

/// Certificate search seeded by the spectral warm start, one guess at a time.
#[derive(Debug, Clone)]
pub struct LogConcaveOracle {
    pub params: WellBehavedParams,
    pub noise: NoiseSpec,
    pub search: CertSearchConfig,
    pub warm: WarmStartConfig,
    pub dim: usize,
    pub order: GuessOrder,
    pub rho_override: Option<f64>,
    pub auto_c: Option<AutoThreshold>,
    queries: u64,
    /// Warm-start failures seen so far.
    pub warm_failures: usize,
}

impl LogConcaveOracle {
    pub fn new(
        params: WellBehavedParams,
        noise: NoiseSpec,
        search: CertSearchConfig,
        warm: WarmStartConfig,
        dim: usize,
    ) -> Self {
        Self {
            params,
            noise,
            search,
            warm,
            dim,
            order: GuessOrder::Ascending,
            rho_override: None,
            auto_c: None,
            queries: 0,
            warm_failures: 0,
        }
    }
}

impl CertificateOracle for LogConcaveOracle {
    fn query(
        &mut self,
        w: &UnitVector,
        theta: f64,
        _delta: f64,
        source: &mut dyn SampleSource,
    ) -> Result<OracleAnswer, LearnerError> {
        self.queries += 1;
        let train = source.draw(SampleRole::Search, self.search.samples_per_round)?;
        let holdout = source.draw(SampleRole::Holdout, self.search.holdout_n)?;
        for (k, guess) in angle_guesses(theta, self.order).into_iter().enumerate() {
            let seed = self.search.seed.wrapping_add(self.queries.wrapping_mul(1_000_003)).wrapping_add(k as u64);
            let mut wcfg = self.warm.clone();
            wcfg.epsilon = guess;
            wcfg.seed = seed;
            // a failed warm start leaves only the random restarts
            let v0 = match warmstart::warm_start(&train, w, &wcfg) {
                Ok(r) => Some(r.v),
                Err(_) => {
                    self.warm_failures += 1;
                    None
                }
            };
            let mut cfg = self.search.clone();
            cfg.seed = seed;
            if let Some(c) = search_on_guess(&train, &holdout, w, guess, v0.as_ref(), &cfg, self.auto_c)? {
                return Ok(OracleAnswer::Refuted(c));
            }
        }
        Ok(OracleAnswer::Fail)
    }

    fn rho(&self, theta: f64) -> f64 {
        self.rho_override.unwrap_or_else(|| rho_for_well_behaved(theta, &self.params, &self.noise, self.dim))
    }
}

/// ρ(θ) = (θLR/(Ad))^{2/α}·θ/(βd), clamped to (0, 1].
pub fn rho_for_well_behaved(theta: f64, params: &WellBehavedParams, noise: &NoiseSpec, d: usize) -> f64 {
    let d = d as f64;
    let base = (theta * params.l * params.r / (noise.big_a * d)).powf(2.0 / noise.alpha);
    (base * theta / (params.beta * d)).clamp(f64::MIN_POSITIVE, 1.0)
}

/// err ≤ U·β²·ln²(1/ε)·θ + ε.
pub fn angle_to_error(theta: f64, params: &WellBehavedParams, eps: f64) -> f64 {
    let l = (1.0 / eps).ln();
    params.u * params.beta * params.beta * l * l * theta + eps
}

/// −E[(T(x) + ρ/2)·y·x]; with no certificate only the ρ/2 term remains.
pub fn loss_gradient<F: Fn(&[f64]) -> f64>(samples: &Dataset, t: Option<F>, rho_eps: f64) -> Vec<f64> {
    let mut g = vec![0.0; samples.dim()];
    for (x, y) in samples.iter() {
        let tx = t.as_ref().map_or(0.0, |f| f(x));
        geometry::axpy(-(tx + rho_eps / 2.0) * f64::from(y), x, &mut g);
    }
    if !samples.is_empty() {
        geometry::scale(1.0 / samples.len() as f64, &mut g);
    }
    g
}

/// w − η·grad, radially projected onto the unit ball.
pub fn ogd_step(w: &[f64], grad: &[f64], eta: f64) -> Vec<f64> {
    let mut next = w.to_vec();
    geometry::axpy(-eta, grad, &mut next);
    let n = geometry::norm(&next);
    if n > 1.0 {
        geometry::scale(1.0 / n, &mut next);
    }
    next
}

/// Step-size schedule for the OGD iterates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepSchedule {
    /// η_t = 1/(√t + ρ).
    Fixed,
    /// η_t = K/(G_t·√t) with K = 2 and G_t the largest gradient norm so far.
    AdaptiveRegret,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitRule {
    /// w^{(0)} = e1.
    FirstAxis,
    /// Uniform on the sphere.
    Random(u64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub rho_eps: f64,
    pub max_rounds: usize,
    /// Loss-estimation examples per round.
    pub loss_batch: usize,
    pub schedule: StepSchedule,
    pub init: InitRule,
    /// Ground truth used only to annotate the trace.
    pub reference: Option<UnitVector>,
    /// Re-check each witness on the loss batch.
    pub contract_check: bool,
}

impl LearnerConfig {
    pub fn new(epsilon: f64, delta: f64, rho_eps: f64) -> Self {
        Self {
            epsilon,
            delta,
            rho_eps,
            max_rounds: 500,
            loss_batch: 250_000,
            schedule: StepSchedule::AdaptiveRegret,
            init: InitRule::FirstAxis,
            reference: None,
            contract_check: true,
        }
    }

    pub fn validate(&self) -> Result<(), LearnerError> {
        if self.max_rounds == 0
            || !(self.epsilon > 0.0 && self.epsilon <= std::f64::consts::PI)
            || !(self.delta > 0.0 && self.delta < 1.0)
            || !(self.rho_eps > 0.0 && self.rho_eps <= 1.0)
            || self.loss_batch == 0
        {
            return Err(LearnerError::InvalidConfig(format!(
                "epsilon {}, delta {}, rho {}, rounds {}, loss batch {}",
                self.epsilon, self.delta, self.rho_eps, self.max_rounds, self.loss_batch
            )));
        }
        Ok(())
    }
}

/// Key constant of the regret bound: ‖w − u‖ ≤ 2 on the unit ball.
pub const DOMAIN_DIAMETER: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertOutcome {
    Witness,
    Fail,
    ZeroVector,
    Violation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub t: usize,
    /// Iterate at which the loss was built.
    pub w: Vec<f64>,
    /// ℓ̂_t(w_t) = ⟨w_t, grad⟩.
    pub loss: f64,
    pub grad: Vec<f64>,
    pub cert_outcome: CertOutcome,
    pub step: f64,
    /// E[T(x)·y·⟨w,x⟩] on the loss batch, for witness rounds.
    pub cert_value: Option<f64>,
    pub cert_se: Option<f64>,
    pub guess: Option<f64>,
    pub angle: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    OracleFail,
    ContractViolation,
    RoundsExhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerTrace {
    pub rounds: Vec<RoundRecord>,
    pub final_w: UnitVector,
    pub stop_reason: StopReason,
    /// True when the output came from the least-refuted-round fallback.
    pub fallback_used: bool,
    pub samples_used: usize,
}

impl LearnerTrace {
    /// Σ_t (ℓ̂_t(w_t) − ℓ̂_t(u)) over all rounds that took a step.
    pub fn regret_against(&self, u: &[f64]) -> f64 {
        self.stepped().map(|r| r.loss - geometry::dot(u, &r.grad)).sum()
    }

    /// Largest gradient norm over stepped rounds.
    pub fn max_grad_norm(&self) -> f64 {
        self.stepped().map(|r| geometry::norm(&r.grad)).fold(0.0, f64::max)
    }

    /// (3/2)·G·K·√T with K the domain diameter.
    pub fn regret_bound(&self) -> f64 {
        let t = self.stepped().count() as f64;
        1.5 * self.max_grad_norm() * DOMAIN_DIAMETER * t.sqrt()
    }

    fn stepped(&self) -> impl Iterator<Item = &RoundRecord> + '_ {
        self.rounds.iter().filter(|r| matches!(r.cert_outcome, CertOutcome::Witness | CertOutcome::ZeroVector))
    }
}

fn initial_iterate(d: usize, rule: InitRule) -> Result<UnitVector, LearnerError> {
    Ok(match rule {
        InitRule::FirstAxis => UnitVector::basis(d, 0)?,
        InitRule::Random(seed) => synthetic::random_direction(d, seed),
    })
}

/// Runs the OGD loop until the oracle fails or `max_rounds` pass.
pub fn learn(
    source: &mut dyn SampleSource,
    oracle: &mut dyn CertificateOracle,
    cfg: &LearnerConfig,
) -> Result<(UnitVector, LearnerTrace), LearnerError> {
    learn_observed(source, oracle, cfg, &mut |_| {})
}

/// [`learn`], calling `on_round` as soon as each round is recorded.
pub fn learn_observed(
    source: &mut dyn SampleSource,
    oracle: &mut dyn CertificateOracle,
    cfg: &LearnerConfig,
    on_round: &mut dyn FnMut(&RoundRecord),
) -> Result<(UnitVector, LearnerTrace), LearnerError> {
    cfg.validate()?;
    let d = source.dim();
    let mut w: Vec<f64> = initial_iterate(d, cfg.init)?.into_inner();
    let mut rounds = Vec::new();
    let mut g_max: f64 = 0.0;
    let mut best_fallback: Option<(f64, Vec<f64>)> = None;
    let delta_round = cfg.delta / cfg.max_rounds as f64;
    let angle_of = |w: &[f64]| {
        let r = cfg.reference.as_ref()?;
        let u = UnitVector::normalize(w.to_vec()).ok()?;
        Some(geometry::angle(&u, r))
    };
    let finish = |w: &[f64], rounds: Vec<RoundRecord>, reason, fallback, source: &dyn SampleSource| {
        let final_w = UnitVector::normalize(w.to_vec()).unwrap_or_else(|_| UnitVector::basis(w.len(), 0).unwrap());
        let trace = LearnerTrace {
            rounds,
            final_w: final_w.clone(),
            stop_reason: reason,
            fallback_used: fallback,
            samples_used: source.distinct_samples(),
        };
        Ok((final_w, trace))
    };

    for t in 1..=cfg.max_rounds {
        let wn = geometry::norm(&w);
        let mut record = RoundRecord {
            t,
            w: w.clone(),
            loss: 0.0,
            grad: vec![0.0; d],
            cert_outcome: CertOutcome::ZeroVector,
            step: 0.0,
            cert_value: None,
            cert_se: None,
            guess: None,
            angle: angle_of(&w),
        };
        let grad = if wn < 1e-12 {
            let batch = source.draw(SampleRole::Loss, cfg.loss_batch)?;
            loss_gradient(&batch, None::<fn(&[f64]) -> f64>, cfg.rho_eps)
        } else {
            let unit = UnitVector::normalize(w.clone())?;
            match oracle.query(&unit, cfg.epsilon, delta_round, source)? {
                OracleAnswer::Fail => {
                    record.cert_outcome = CertOutcome::Fail;
                    on_round(&record);
                    rounds.push(record);
                    return finish(&w, rounds, StopReason::OracleFail, false, source);
                }
                OracleAnswer::Refuted(cert) => {
                    let batch = source.draw(SampleRole::Loss, cfg.loss_batch)?;
                    let lifted: Estimate = batch
                        .iter()
                        .map(|(x, y)| cert.eval(x) * f64::from(y) * unit.dot(x))
                        .collect::<MeanVar>()
                        .estimate();
                    record.cert_value = Some(lifted.mean);
                    record.cert_se = Some(lifted.se);
                    record.guess = Some(cert.guess);
                    if cfg.contract_check && lifted.lower(3.0) > -cfg.rho_eps / 4.0 {
                        record.cert_outcome = CertOutcome::Violation;
                        on_round(&record);
                        rounds.push(record);
                        return finish(&w, rounds, StopReason::ContractViolation, false, source);
                    }
                    if best_fallback.as_ref().is_none_or(|(v, _)| lifted.mean > *v) {
                        best_fallback = Some((lifted.mean, w.clone()));
                    }
                    record.cert_outcome = CertOutcome::Witness;
                    loss_gradient(&batch, Some(|x: &[f64]| cert.eval(x)), cfg.rho_eps)
                }
            }
        };
        let gn = geometry::norm(&grad);
        g_max = g_max.max(gn);
        let eta = match cfg.schedule {
            StepSchedule::Fixed => 1.0 / ((t as f64).sqrt() + cfg.rho_eps),
            StepSchedule::AdaptiveRegret if g_max > 0.0 => DOMAIN_DIAMETER / (g_max * (t as f64).sqrt()),
            StepSchedule::AdaptiveRegret => 0.0,
        };
        record.loss = geometry::dot(&w, &grad);
        record.step = eta;
        record.grad = grad.clone();
        on_round(&record);
        rounds.push(record);
        w = ogd_step(&w, &grad, eta);
    }
    let fallback_w = best_fallback.map(|(_, w)| w).unwrap_or(w);
    finish(&fallback_w, rounds, StopReason::RoundsExhausted, true, source)
}

#[cfg(test)]
mod tests {
    use super::*;

    struct AlwaysFail;
    impl CertificateOracle for AlwaysFail {
        fn query(
            &mut self,
            _: &UnitVector,
            _: f64,
            _: f64,
            _: &mut dyn SampleSource,
        ) -> Result<OracleAnswer, LearnerError> {
            Ok(OracleAnswer::Fail)
        }
        fn rho(&self, _: f64) -> f64 {
            0.1
        }
    }

    fn tiny_source() -> PoolSource {
        let mut ds = Dataset::with_dim(2);
        ds.push(&[1.0, 0.0], 1);
        PoolSource::new(ds.clone(), ds.clone(), ds)
    }

    #[test]
    fn loss_gradient_examples() {
        let mut ds = Dataset::with_dim(2);
        ds.push(&[1.0, 0.0], 1);
        assert_eq!(loss_gradient(&ds, None::<fn(&[f64]) -> f64>, 0.0), vec![0.0, 0.0]);
        assert_eq!(loss_gradient(&ds, Some(|_: &[f64]| 1.0), 1.0), vec![-1.5, 0.0]);
    }

    #[test]
    fn ogd_step_examples() {
        assert_eq!(ogd_step(&[0.3, 0.4], &[0.0, 0.0], 1.0), vec![0.3, 0.4]);
        assert_eq!(ogd_step(&[1.0, 0.0], &[-1.0, 0.0], 1.0), vec![1.0, 0.0]);
        assert_eq!(ogd_step(&[0.0, 0.0], &[0.0, -1.0], 0.5), vec![0.0, 0.5]);
    }

    #[test]
    fn failing_oracle_returns_first_axis() {
        let mut src = tiny_source();
        let cfg = LearnerConfig { loss_batch: 1, ..LearnerConfig::new(0.1, 0.1, 0.1) };
        let (w, trace) = learn(&mut src, &mut AlwaysFail, &cfg).unwrap();
        assert_eq!(w.as_slice(), &[1.0, 0.0]);
        assert_eq!(trace.rounds.len(), 1);
        assert_eq!(trace.stop_reason, StopReason::OracleFail);
    }

    #[test]
    fn guesses_cover_range() {
        let g = angle_guesses(0.15, GuessOrder::Descending);
        assert_eq!(g.first().copied(), Some(std::f64::consts::FRAC_PI_2));
        assert_eq!(g.last().copied(), Some(0.15));
        let g = angle_guesses(0.15, GuessOrder::Ascending);
        assert_eq!(g[0], 0.15);
        assert_eq!(g.last().copied(), Some(std::f64::consts::FRAC_PI_2));
        assert!(g.windows(2).all(|p| p[0] < p[1]));
    }

    #[test]
    fn rho_is_monotone_and_clamped() {
        let p = WellBehavedParams { k: 3, l: 0.0385, r: 1.0, u: 0.0635, beta: 1.0 };
        let n = NoiseSpec::constant_rate(0.5, 0.2).unwrap();
        let a = rho_for_well_behaved(std::f64::consts::PI, &p, &n, 5);
        assert!(a > 0.0 && a <= 1.0);
        assert!(rho_for_well_behaved(0.5, &p, &n, 5) < rho_for_well_behaved(1.0, &p, &n, 5));
    }

    #[test]
    fn angle_to_error_shape() {
        let p = WellBehavedParams { k: 3, l: 0.0385, r: 1.0, u: 0.0635, beta: 1.0 };
        assert_eq!(angle_to_error(0.0, &p, 0.2), 0.2);
        let one = angle_to_error(0.1, &p, 0.2) - 0.2;
        let two = angle_to_error(0.2, &p, 0.2) - 0.2;
        assert!((two - 2.0 * one).abs() < 1e-15);
    }
}
