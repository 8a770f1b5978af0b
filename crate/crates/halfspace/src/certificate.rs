//! Certificates of non-optimality for a candidate direction `w`.
//!
//! Samples are conditioned on the band ⟨w,x⟩ ∈ [ρR/2, ρR/√2] and mapped
//! through the perspective projection. In the projected space the clean
//! labels form a biased halfspace, and a window {−t1 ≤ ⟨v,z⟩ ≤ −t2} with
//! negative label mass certifies that `w` is not the target.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{self, Band, GeometryError, UnitVector};
use crate::stats::{Estimate, MeanVar};
use crate::synthetic::{Dataset, Label, NoiseSpec, WellBehavedParams};

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error("no sample fell inside the band [{lo}, {hi}]")]
    EmptyBand { lo: f64, hi: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Band and scale used by the perspective transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformConfig {
    pub w: UnitVector,
    pub rho: f64,
    /// Radius R of the anti-concentration ball.
    pub radius: f64,
}

impl TransformConfig {
    pub fn new(w: UnitVector, rho: f64, radius: f64) -> Result<Self, CertificateError> {
        if !(rho > 0.0 && rho <= 1.0) || !(radius > 0.0) {
            return Err(CertificateError::InvalidConfig(format!("rho {rho}, radius {radius}")));
        }
        Ok(Self { w, rho, radius })
    }

    pub fn sigma1(&self) -> f64 {
        self.rho * self.radius / 2.0
    }

    pub fn sigma2(&self) -> f64 {
        self.rho * self.radius * std::f64::consts::FRAC_1_SQRT_2
    }

    pub fn band(&self) -> Band {
        Band { normal: self.w.clone(), lo: self.sigma1(), hi: self.sigma2() }
    }
}

/// One projected point z ∈ w⊥ with its label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectedSample {
    pub z: Vec<f64>,
    pub y: Label,
}

/// Band survivors after the perspective projection.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedSet {
    dim: usize,
    zs: Vec<f64>,
    ys: Vec<Label>,
    n_input: usize,
}

impl ProjectedSet {
    /// Row-major `zs` of width `dim`, one label per row.
    pub fn from_parts(dim: usize, zs: Vec<f64>, ys: Vec<Label>, n_input: usize) -> Self {
        assert_eq!(zs.len(), dim * ys.len(), "ragged projected set");
        Self { dim, zs, ys, n_input }
    }

    pub fn from_samples(dim: usize, samples: &[ProjectedSample], n_input: usize) -> Self {
        let mut set = Self { dim, zs: Vec::new(), ys: Vec::new(), n_input };
        for s in samples {
            set.zs.extend_from_slice(&s.z);
            set.ys.push(s.y);
        }
        set
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ys.is_empty()
    }

    /// Number of raw samples the set was built from.
    pub fn n_input(&self) -> usize {
        self.n_input
    }

    pub fn survival_fraction(&self) -> f64 {
        if self.n_input == 0 {
            0.0
        } else {
            self.len() as f64 / self.n_input as f64
        }
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (&[f64], Label)> + '_ {
        self.zs.chunks_exact(self.dim).zip(self.ys.iter().copied())
    }

    pub fn z(&self, i: usize) -> &[f64] {
        &self.zs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn y(&self, i: usize) -> Label {
        self.ys[i]
    }

    pub fn features(&self) -> &[f64] {
        &self.zs
    }

    pub fn labels(&self) -> &[Label] {
        &self.ys
    }

    pub fn to_samples(&self) -> Vec<ProjectedSample> {
        self.iter().map(|(z, y)| ProjectedSample { z: z.to_vec(), y }).collect()
    }
}

/// Keeps points with ⟨w,x⟩ in the band and applies π_w.
pub fn transform(samples: &Dataset, cfg: &TransformConfig) -> Result<ProjectedSet, CertificateError> {
    let (lo, hi) = (cfg.sigma1(), cfg.sigma2());
    let d = samples.dim();
    if d != cfg.w.dim() {
        return Err(GeometryError::DimensionMismatch(d, cfg.w.dim()).into());
    }
    let mut set = ProjectedSet { dim: d, zs: Vec::new(), ys: Vec::new(), n_input: samples.len() };
    for (x, y) in samples.iter() {
        let m = cfg.w.dot(x);
        if m >= lo && m <= hi {
            set.zs.extend(geometry::perspective_projection(x, &cfg.w)?);
            set.ys.push(y);
        }
    }
    if set.is_empty() {
        return Err(CertificateError::EmptyBand { lo, hi });
    }
    Ok(set)
}

fn window_terms<'a>(set: &'a ProjectedSet, v: &'a UnitVector, t_lo: f64, t_hi: f64) -> impl Iterator<Item = f64> + 'a {
    set.iter().map(move |(z, y)| {
        let p = v.dot(z);
        if p >= -t_hi && p <= -t_lo {
            f64::from(y)
        } else {
            0.0
        }
    })
}

/// Empirical E[1{−t_hi ≤ ⟨v,z⟩ ≤ −t_lo}·y].
pub fn certificate_value(set: &ProjectedSet, v: &UnitVector, t_lo: f64, t_hi: f64) -> f64 {
    certificate_estimate(set, v, t_lo, t_hi).mean
}

/// As [`certificate_value`], with its standard error.
pub fn certificate_estimate(set: &ProjectedSet, v: &UnitVector, t_lo: f64, t_hi: f64) -> Estimate {
    window_terms(set, v, t_lo, t_hi).collect::<MeanVar>().estimate()
}

/// Best window start found by the threshold scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdHit {
    pub t0: f64,
    pub value: f64,
    /// Standard error of `value` on the scanned set.
    pub se: f64,
}

/// Minimizes the empirical value of the window [t0, R] over t0 ∈ (R/2, R].
///
/// Candidates are the sample projections that land in the range plus the
/// endpoint R. Ties go to the larger t0. Returns the minimizer whether or
/// not it clears `c`; see [`scan_thresholds`] for the thresholded form.
pub fn scan_minimum(set: &ProjectedSet, v: &UnitVector, r: f64) -> Option<ThresholdHit> {
    let n = set.len();
    if n == 0 {
        return None;
    }
    let mut pts: Vec<(f64, f64)> = set
        .iter()
        .filter_map(|(z, y)| {
            let t = -v.dot(z);
            (t > r / 2.0 && t <= r).then_some((t, f64::from(y)))
        })
        .collect();
    pts.sort_by(|a, b| b.0.total_cmp(&a.0));
    let nf = n as f64;
    let mut best = ThresholdHit { t0: r, value: 0.0, se: 0.0 };
    let (mut sum, mut count) = (0.0, 0usize);
    let mut i = 0;
    while i < pts.len() {
        let t = pts[i].0;
        while i < pts.len() && pts[i].0 == t {
            sum += pts[i].1;
            count += 1;
            i += 1;
        }
        let value = sum / nf;
        if value < best.value {
            // terms are in {−1,0,1}; count of nonzero terms gives the second moment
            let var = (count as f64 / nf - value * value).max(0.0) * nf / (nf - 1.0).max(1.0);
            best = ThresholdHit { t0: t, value, se: (var / nf).sqrt() };
        }
    }
    Some(best)
}

/// t0 ∈ (R/2, R] with empirical window value ≤ −c, if any.
pub fn scan_thresholds(set: &ProjectedSet, v: &UnitVector, r: f64, c: f64) -> Option<f64> {
    scan_minimum(set, v, r).filter(|h| h.value <= -c).map(|h| h.t0)
}

/// ĝ = mean of 1{−R ≤ ⟨v,z⟩ ≤ −R/2}·y·proj_{v⊥}(z).
pub fn update_direction(set: &ProjectedSet, v: &UnitVector, r: f64) -> Vec<f64> {
    let mut g = vec![0.0; set.dim()];
    if set.is_empty() {
        return g;
    }
    for (z, y) in set.iter() {
        let p = v.dot(z);
        if p >= -r && p <= -r / 2.0 {
            geometry::axpy(f64::from(y), z, &mut g);
        }
    }
    geometry::scale(1.0 / set.len() as f64, &mut g);
    geometry::remove_component(&mut g, v.as_slice());
    g
}

/// How the direction update scales ĝ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum StepRule {
    /// v ← normalize(v + λ·ĝ).
    Fixed(f64),
    /// v ← normalize(v + (κ/‖ĝ‖)·ĝ): a rotation of roughly κ radians per step.
    Normalized(f64),
}

/// Knobs of the certificate search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertSearchConfig {
    pub alpha: f64,
    pub big_a: f64,
    pub l: f64,
    pub r: f64,
    pub beta: f64,
    /// Smallest angle between w and the target the search must detect.
    pub theta_min: f64,
    pub max_iters: usize,
    pub step: StepRule,
    pub threshold_c: f64,
    /// Raw samples drawn for the search set.
    pub samples_per_round: usize,
    /// Raw samples drawn for holdout validation.
    pub holdout_n: usize,
    /// Projected window radius is `window_scale / ρ`.
    pub window_scale: f64,
    /// Number of initial directions tried (v0, −v0, then fresh random ones).
    pub restarts: usize,
    /// Standard errors of slack demanded by holdout validation.
    pub validation_z: f64,
    pub seed: u64,
}

impl CertSearchConfig {
    pub fn new(params: &WellBehavedParams, noise: &NoiseSpec, theta_min: f64) -> Self {
        let threshold_c = default_threshold(params, noise);
        Self {
            alpha: noise.alpha,
            big_a: noise.big_a,
            l: params.l,
            r: params.r,
            beta: params.beta,
            theta_min,
            max_iters: 40,
            step: StepRule::Normalized(0.3),
            threshold_c,
            samples_per_round: 500_000,
            holdout_n: 250_000,
            window_scale: 3.0,
            restarts: 4,
            validation_z: 3.0,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), CertificateError> {
        let positive = [self.l, self.r, self.beta, self.threshold_c, self.window_scale, self.big_a];
        if positive.iter().any(|p| !(*p > 0.0))
            || !(self.theta_min > 0.0 && self.theta_min <= std::f64::consts::PI)
            || !(self.alpha > 0.0 && self.alpha < 1.0)
            || self.max_iters == 0
            || self.restarts == 0
        {
            return Err(CertificateError::InvalidConfig(format!("{self:?}")));
        }
        match self.step {
            StepRule::Fixed(s) | StepRule::Normalized(s) if s > 0.0 => Ok(()),
            _ => Err(CertificateError::InvalidConfig("step must be positive".into())),
        }
    }

    /// ρ = min(1, θ_min/√d).
    pub fn rho(&self, d: usize) -> f64 {
        (self.theta_min / (d as f64).sqrt()).min(1.0)
    }

    pub fn transform_config(&self, w: &UnitVector) -> Result<TransformConfig, CertificateError> {
        TransformConfig::new(w.clone(), self.rho(w.dim()), self.r)
    }

    /// The step λ = c/(2β³) of the correlation-improvement bound.
    pub fn improvement_step(&self) -> f64 {
        self.threshold_c / (2.0 * self.beta.powi(3))
    }
}

/// c = (RL/(4A))^{2/α}/8.
pub fn default_threshold(params: &WellBehavedParams, noise: &NoiseSpec) -> f64 {
    (params.r * params.l / (4.0 * noise.big_a)).powf(2.0 / noise.alpha) / 8.0
}

/// Projected window radius for a transform.
pub fn window_radius(tcfg: &TransformConfig, cfg: &CertSearchConfig) -> f64 {
    cfg.window_scale / tcfg.rho
}

/// A certifying function T_w(x) = 1{σ1 ≤ ⟨w,x⟩ ≤ σ2, −t1 ≤ ⟨v,π_w(x)⟩ ≤ −t2}/⟨w,x⟩.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateWitness {
    pub w: UnitVector,
    pub v: UnitVector,
    pub sigma1: f64,
    pub sigma2: f64,
    pub t1: f64,
    pub t2: f64,
    /// Holdout estimate of the projected window value.
    pub value: f64,
    pub n_used: usize,
}

impl CertificateWitness {
    /// Whether x lies in the support of T_w.
    pub fn covers(&self, x: &[f64]) -> bool {
        let m = self.w.dot(x);
        if !(m >= self.sigma1 && m <= self.sigma2) {
            return false;
        }
        // ⟨v, π_w(x)⟩ = ⟨v,x⟩/⟨w,x⟩ because v ⟂ w
        let p = self.v.dot(x) / m;
        p >= -self.t1 && p <= -self.t2
    }

    /// T_w(x).
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        if self.covers(x) {
            1.0 / self.w.dot(x)
        } else {
            0.0
        }
    }

    /// σ1·T_w(x), which is bounded by 1.
    pub fn evaluate_bounded(&self, x: &[f64]) -> f64 {
        self.sigma1 * self.evaluate(x)
    }

    pub fn sup_norm(&self) -> f64 {
        1.0 / self.sigma1
    }
}

/// Diagnostics of one search run.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    /// Directions v^{(0)}, v^{(1)}, … visited.
    pub trajectory: Vec<UnitVector>,
    pub train_value: Option<f64>,
    pub holdout: Option<Estimate>,
    /// Best (most negative) training window value seen, with its s.e.
    pub best_scan: Option<ThresholdHit>,
}

impl SearchReport {
    pub fn updates(&self) -> usize {
        self.trajectory.len().saturating_sub(1)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SearchOutcome {
    Witness { witness: CertificateWitness, report: SearchReport },
    Fail { report: SearchReport },
}

impl SearchOutcome {
    pub fn witness(&self) -> Option<&CertificateWitness> {
        match self {
            SearchOutcome::Witness { witness, .. } => Some(witness),
            SearchOutcome::Fail { .. } => None,
        }
    }

    pub fn report(&self) -> &SearchReport {
        match self {
            SearchOutcome::Witness { report, .. } | SearchOutcome::Fail { report } => report,
        }
    }
}

/// Runs the threshold-scan / direction-update loop from `v0`.
///
/// `train` is the empirical distribution the loop works on; a candidate
/// window is accepted only if its value on `holdout` is at most −c with
/// `validation_z` standard errors to spare.
pub fn compute_certificate(
    train: &ProjectedSet,
    holdout: &ProjectedSet,
    tcfg: &TransformConfig,
    v0: &UnitVector,
    cfg: &CertSearchConfig,
) -> Result<SearchOutcome, CertificateError> {
    cfg.validate()?;
    let w = &tcfg.w;
    let r = window_radius(tcfg, cfg);
    let c = cfg.threshold_c;
    let mut v = geometry::orth_component(v0, w)?;
    let mut report = SearchReport { trajectory: vec![v.clone()], train_value: None, holdout: None, best_scan: None };
    for _ in 0..cfg.max_iters {
        if let Some(hit) = scan_minimum(train, &v, r) {
            if report.best_scan.is_none_or(|b| hit.value < b.value) {
                report.best_scan = Some(hit);
            }
            if hit.value <= -c {
                let est = certificate_estimate(holdout, &v, hit.t0, r);
                if est.upper(cfg.validation_z) <= -c {
                    report.train_value = Some(hit.value);
                    report.holdout = Some(est);
                    let witness = CertificateWitness {
                        w: w.clone(),
                        v: v.clone(),
                        sigma1: tcfg.sigma1(),
                        sigma2: tcfg.sigma2(),
                        t1: r,
                        t2: hit.t0,
                        value: est.mean,
                        n_used: train.n_input() + holdout.n_input(),
                    };
                    return Ok(SearchOutcome::Witness { witness, report });
                }
            }
        }
        let g = update_direction(train, &v, r);
        let gn = geometry::norm(&g);
        if gn < 1e-15 {
            break;
        }
        let step = match cfg.step {
            StepRule::Fixed(l) => l,
            StepRule::Normalized(k) => k / gn,
        };
        let next = geometry::normalized_update(&v, &g, step)?;
        v = geometry::orth_component(&next, w)?;
        report.trajectory.push(v.clone());
    }
    Ok(SearchOutcome::Fail { report })
}

/// Uniform unit vector in w⊥.
pub fn random_init(w: &UnitVector, seed: u64) -> UnitVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_init_with(w, &mut rng)
}

pub fn random_init_with<R: Rng + ?Sized>(w: &UnitVector, rng: &mut R) -> UnitVector {
    loop {
        let mut g: Vec<f64> = (0..w.dim()).map(|_| rng.sample(StandardNormal)).collect();
        geometry::remove_component(&mut g, w.as_slice());
        if let Ok(v) = UnitVector::normalize(g) {
            return v;
        }
    }
}

/// Result of a search with several starting directions.
#[derive(Debug, Clone, PartialEq)]
pub struct RestartOutcome {
    pub outcome: SearchOutcome,
    /// 0-based index of the start that produced `outcome`.
    pub start_index: usize,
    pub starts_tried: usize,
}

/// Tries v0, −v0 and then fresh random directions, `cfg.restarts` starts in
/// total, returning the first validated witness. Without `v0` the first
/// start is itself random.
pub fn certify_with_restarts(
    train: &ProjectedSet,
    holdout: &ProjectedSet,
    tcfg: &TransformConfig,
    v0: Option<&UnitVector>,
    cfg: &CertSearchConfig,
) -> Result<RestartOutcome, CertificateError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let first = match v0 {
        Some(v) => v.clone(),
        None => random_init_with(&tcfg.w, &mut rng),
    };
    let mut last = None;
    for k in 0..cfg.restarts {
        let start = match k {
            0 => first.clone(),
            1 => first.neg(),
            _ => random_init_with(&tcfg.w, &mut rng),
        };
        let outcome = compute_certificate(train, holdout, tcfg, &start, cfg)?;
        if outcome.witness().is_some() {
            return Ok(RestartOutcome { outcome, start_index: k, starts_tried: k + 1 });
        }
        last = Some(outcome);
    }
    Ok(RestartOutcome {
        outcome: last.expect("restarts ≥ 1"),
        start_index: cfg.restarts - 1,
        starts_tried: cfg.restarts,
    })
}

/// Outcome of the halving calibration of c.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibratedOutcome {
    pub result: RestartOutcome,
    pub c: f64,
    pub c_floor: f64,
}

/// Starts at `c0` and halves c until a validated witness appears or c drops
/// below `floor_multiple` standard errors of the best training window value.
pub fn certify_auto_c(
    train: &ProjectedSet,
    holdout: &ProjectedSet,
    tcfg: &TransformConfig,
    v0: Option<&UnitVector>,
    cfg: &CertSearchConfig,
    c0: f64,
    floor_multiple: f64,
) -> Result<CalibratedOutcome, CertificateError> {
    let mut c = c0;
    let mut floor = 0.0;
    loop {
        let mut local = cfg.clone();
        local.threshold_c = c;
        let result = certify_with_restarts(train, holdout, tcfg, v0, &local)?;
        if result.outcome.witness().is_some() {
            return Ok(CalibratedOutcome { result, c, c_floor: floor });
        }
        if let Some(best) = result.outcome.report().best_scan {
            floor = floor.max(floor_multiple * best.se);
        } else {
            floor = floor.max(floor_multiple / (train.len() as f64).sqrt());
        }
        if c / 2.0 < floor || c < 1e-12 {
            return Ok(CalibratedOutcome { result, c, c_floor: floor });
        }
        c /= 2.0;
    }
}

/// Empirical E[T_w(x)·y·⟨w,x⟩] over raw samples.
pub fn lift_certificate(witness: &CertificateWitness, samples: &Dataset) -> f64 {
    lift_estimate(witness, samples).mean
}

pub fn lift_estimate(witness: &CertificateWitness, samples: &Dataset) -> Estimate {
    samples.iter().map(|(x, y)| witness.evaluate(x) * f64::from(y) * witness.w.dot(x)).collect::<MeanVar>().estimate()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uv(v: &[f64]) -> UnitVector {
        UnitVector::normalize(v.to_vec()).unwrap()
    }

    fn set2(zs: &[[f64; 2]], ys: &[Label]) -> ProjectedSet {
        let samples: Vec<ProjectedSample> =
            zs.iter().zip(ys).map(|(z, &y)| ProjectedSample { z: z.to_vec(), y }).collect();
        ProjectedSet::from_samples(2, &samples, samples.len())
    }

    #[test]
    fn transform_hand_example() {
        let w = uv(&[1.0, 0.0, 0.0]);
        // ρR/2 = 0.25 and ρR/√2 ≈ 0.354 with ρ = 0.5, R = 1
        let cfg = TransformConfig::new(w, 0.5, 1.0).unwrap();
        let mut ds = Dataset::with_dim(3);
        ds.push(&[0.3, 1.0, 2.0], 1);
        ds.push(&[0.9, 1.0, 2.0], 1);
        let set = transform(&ds, &cfg).unwrap();
        assert_eq!(set.len(), 1);
        let z = set.iter().next().unwrap().0;
        assert_eq!(z[0], 0.0);
        assert!((z[1] - 10.0 / 3.0).abs() < 1e-12 && (z[2] - 20.0 / 3.0).abs() < 1e-12);
        assert_eq!(set.survival_fraction(), 0.5);
        let mut empty = Dataset::with_dim(3);
        empty.push(&[2.0, 0.0, 0.0], 1);
        assert!(matches!(transform(&empty, &cfg), Err(CertificateError::EmptyBand { .. })));
    }

    #[test]
    fn value_examples() {
        let v = uv(&[1.0, 0.0]);
        let set = set2(&[[-0.6, 0.0], [-0.7, 1.0]], &[-1, -1]);
        assert_eq!(certificate_value(&set, &v, 0.5, 1.0), -1.0);
        let pos = set2(&[[-0.6, 0.0], [-0.7, 1.0]], &[1, 1]);
        assert!(certificate_value(&pos, &v, 0.5, 1.0) >= 0.0);
    }

    #[test]
    fn scan_examples() {
        let v = uv(&[1.0, 0.0]);
        let one = set2(&[[-0.8, 0.0]], &[-1]);
        assert_eq!(scan_thresholds(&one, &v, 1.0, 0.5), Some(0.8));
        let pos = set2(&[[-0.8, 0.0], [-0.6, 0.0]], &[1, 1]);
        assert_eq!(scan_thresholds(&pos, &v, 1.0, 1e-9), None);
        // windows starting at 0.9 and at 0.6 both reach −1/3; the larger start wins
        let tie = set2(&[[-0.9, 0.0], [-0.7, 0.0], [-0.6, 0.0]], &[-1, 1, -1]);
        assert_eq!(scan_thresholds(&tie, &v, 1.0, 0.1), Some(0.9));
    }

    #[test]
    fn update_direction_examples() {
        let v = uv(&[1.0, 0.0]);
        let one = set2(&[[-0.75, 2.0]], &[1]);
        assert_eq!(update_direction(&one, &v, 1.0), vec![0.0, 2.0]);
        let none = set2(&[[0.75, 2.0]], &[1]);
        assert_eq!(update_direction(&none, &v, 1.0), vec![0.0, 0.0]);
    }

    #[test]
    fn witness_lift_matches_band_mass_times_value() {
        let w = uv(&[1.0, 0.0]);
        let witness = CertificateWitness {
            w: w.clone(),
            v: uv(&[0.0, 1.0]),
            sigma1: 0.2,
            sigma2: 0.3,
            t1: 10.0,
            t2: 1.0,
            value: -0.5,
            n_used: 0,
        };
        let mut ds = Dataset::with_dim(2);
        ds.push(&[0.25, -1.0], -1); // p = −4: inside, contributes −1
        ds.push(&[0.25, 1.0], -1); // p = +4: outside
        ds.push(&[0.5, -1.0], 1); // outside band
        ds.push(&[0.25, -0.1], 1); // p = −0.4: outside window
        assert!((lift_certificate(&witness, &ds) + 0.25).abs() < 1e-15);
        assert!(witness.evaluate_bounded(&[0.2, -1.0]) <= 1.0 + 1e-15);
        assert_eq!(lift_certificate(&witness, &Dataset::with_dim(2)), 0.0);
    }

    #[test]
    fn random_init_in_two_dimensions_is_signed_axis() {
        let w = uv(&[1.0, 0.0]);
        for s in 0..20 {
            let v = random_init(&w, s);
            assert!(v.as_slice()[0].abs() < 1e-15);
            assert!((v.as_slice()[1].abs() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn witness_json_is_flat() {
        let w = CertificateWitness {
            w: uv(&[1.0, 0.0]),
            v: uv(&[0.0, 1.0]),
            sigma1: 0.1,
            sigma2: 0.2,
            t1: 3.0,
            t2: 2.0,
            value: -0.01,
            n_used: 5,
        };
        let s = serde_json::to_value(&w).unwrap();
        let keys: Vec<&str> = s.as_object().unwrap().keys().map(|k| k.as_str()).collect();
        for k in ["w", "v", "sigma1", "sigma2", "t1", "t2", "value", "n_used"] {
            assert!(keys.contains(&k));
        }
        assert_eq!(keys.len(), 8);
        let back: CertificateWitness = serde_json::from_value(s).unwrap();
        assert_eq!(back, w);
    }
}
