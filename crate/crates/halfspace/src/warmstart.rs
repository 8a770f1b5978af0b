//! Spectral warm start for isotropic log-concave marginals.
//!
//! Condition on a thin random band ⟨w,x⟩ ∈ [x0, x0+s'], project orthogonally
//! onto w⊥, reweight by rejection sampling until the projected cloud is close
//! to isotropic, then read a direction off the degree-1 and degree-2 Chow
//! parameters.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::certificate::ProjectedSet;
use crate::geometry::{self, GeometryError, UnitVector};
use crate::synthetic::Dataset;

#[derive(Debug, Error)]
pub enum WarmStartError {
    #[error("no sample fell inside the band [{lo}, {hi}]")]
    EmptyBand { lo: f64, hi: f64 },
    #[error("input exhausted after {accepted} of {wanted} acceptances")]
    SourceExhausted { accepted: usize, wanted: usize },
    #[error("empirical covariance is singular (min eigenvalue {0:e})")]
    SingularCovariance(f64),
    #[error("no direction above the cutoff {zeta:e}")]
    EmptySubspace { zeta: f64 },
    #[error("projected SGD stalled at reweighted-mean norm {g_norm:e}")]
    Nonconvergence { g_norm: f64, r: Vec<f64> },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Where the random band sits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomBandConfig {
    pub epsilon: f64,
    pub s: f64,
    pub s_prime: f64,
    pub x0: f64,
    pub seed: u64,
}

impl RandomBandConfig {
    /// Draws x0 uniformly from [s, 2s].
    pub fn draw(epsilon: f64, s: f64, s_prime: f64, seed: u64) -> Result<Self, WarmStartError> {
        if !(s > 0.0 && s_prime > 0.0 && s_prime < s) {
            return Err(WarmStartError::InvalidConfig(format!("need 0 < s' < s, got s={s}, s'={s_prime}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x0 = s + s * rng.random::<f64>();
        Ok(Self { epsilon, s, s_prime, x0, seed })
    }
}

/// Band offset scale: αε/(8·ln(A·ln(A+e)/(αε) + e)), capped at 0.1.
pub fn default_band_offset(alpha: f64, big_a: f64, epsilon: f64) -> f64 {
    let e = std::f64::consts::E;
    let ae = alpha * epsilon;
    (ae / (8.0 * (big_a * (big_a + e).ln() / ae + e).ln())).min(0.1)
}

/// Noise margin ξ = (s/A)^{1/α}.
pub fn noise_margin(alpha: f64, big_a: f64, s: f64) -> f64 {
    (s / big_a).powf(1.0 / alpha)
}

/// Keeps x with ⟨w,x⟩ ∈ [x0, x0+s'] and returns x − ⟨w,x⟩w.
pub fn random_band_project(
    samples: &Dataset,
    w: &UnitVector,
    cfg: &RandomBandConfig,
) -> Result<ProjectedSet, WarmStartError> {
    let (lo, hi) = (cfg.x0, cfg.x0 + cfg.s_prime);
    let d = samples.dim();
    if d != w.dim() {
        return Err(GeometryError::DimensionMismatch(d, w.dim()).into());
    }
    let mut zs = Vec::new();
    let mut ys = Vec::new();
    for (x, y) in samples.iter() {
        let m = w.dot(x);
        if m >= lo && m <= hi {
            let start = zs.len();
            zs.extend_from_slice(x);
            geometry::axpy(-m, w.as_slice(), &mut zs[start..]);
            ys.push(y);
        }
    }
    if ys.is_empty() {
        return Err(WarmStartError::EmptyBand { lo, hi });
    }
    Ok(ProjectedSet::from_parts(d, zs, ys, samples.len()))
}

/// Expresses points of w⊥ in the coordinates of `basis`.
pub fn to_coordinates(set: &ProjectedSet, basis: &[Vec<f64>]) -> ProjectedSet {
    let m = basis.len();
    let mut zs = Vec::with_capacity(set.len() * m);
    for (z, _) in set.iter() {
        zs.extend(basis.iter().map(|b| geometry::dot(b, z)));
    }
    ProjectedSet::from_parts(m, zs, set.labels().to_vec(), set.n_input())
}

/// g(r) = mean of x·min(1, e^{−⟨r,x⟩}).
pub fn reweighted_mean(points: &[f64], dim: usize, r: &[f64]) -> Vec<f64> {
    let mut g = vec![0.0; dim];
    let n = points.len() / dim;
    for x in points.chunks_exact(dim) {
        let wgt = (-geometry::dot(r, x)).exp().min(1.0);
        geometry::axpy(wgt, x, &mut g);
    }
    if n > 0 {
        geometry::scale(1.0 / n as f64, &mut g);
    }
    g
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsgdConfig {
    /// Target stationarity ‖g(r)‖.
    pub gamma: f64,
    /// Feasible set is the ball ‖r‖ ≤ radius.
    pub radius: f64,
    pub iters: usize,
    /// Minibatch size drawn from each half per step.
    pub batch: usize,
    /// Steps are boost·step_scale/(L̂·√k).
    pub step_scale: f64,
    /// Cap on the boost, which doubles after an improving step and shrinks by a quarter
    /// otherwise. 1 gives the plain schedule.
    pub max_boost: f64,
    pub seed: u64,
}

impl Default for PsgdConfig {
    fn default() -> Self {
        Self { gamma: 0.02, radius: 10.0, iters: 600, batch: 4096, step_scale: 1.0, max_boost: 64.0, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsgdResult {
    pub r: Vec<f64>,
    /// ‖g(r)‖ measured on all points.
    pub g_norm: f64,
    pub iters_run: usize,
    pub smoothness: f64,
}

fn second_moment(points: &[f64], dim: usize) -> DMatrix<f64> {
    let n = (points.len() / dim).max(1) as f64;
    let mut m = DMatrix::zeros(dim, dim);
    for x in points.chunks_exact(dim) {
        for i in 0..dim {
            for j in 0..=i {
                m[(i, j)] += x[i] * x[j];
            }
        }
    }
    for i in 0..dim {
        for j in 0..i {
            m[(j, i)] = m[(i, j)];
        }
    }
    m / n
}

/// Projected SGD on F(r) = ‖g(r)‖², best iterate kept.
///
/// Each step forms 2·Ĵ_B·ĝ_A from minibatches of two disjoint halves, where
/// J(r) = −E[xxᵀ·1{⟨r,x⟩>0}·e^{−⟨r,x⟩}] is the Jacobian of g.
pub fn psgd_stationary_point(points: &[f64], dim: usize, cfg: &PsgdConfig) -> Result<PsgdResult, WarmStartError> {
    let n = points.len() / dim;
    if n < 2 || !(cfg.gamma > 0.0) || !(cfg.radius > 0.0) || !(cfg.max_boost >= 1.0) {
        return Err(WarmStartError::InvalidConfig(format!("n={n}, {cfg:?}")));
    }
    let half = n / 2;
    let lmax = SymmetricEigen::new(second_moment(points, dim)).eigenvalues.max().max(1e-12);
    let smoothness = 2.0 * lmax * lmax;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut r = vec![0.0; dim];
    let mut best_r = r.clone();
    let mut best = geometry::norm(&reweighted_mean(points, dim, &r));
    let mut iters_run = 0;
    let mut boost = 1.0;
    let row = |i: usize| &points[i * dim..(i + 1) * dim];
    for k in 1..=cfg.iters {
        if best <= cfg.gamma / 4.0 {
            break;
        }
        iters_run = k;
        let mut ga = vec![0.0; dim];
        let mut jb = DMatrix::<f64>::zeros(dim, dim);
        for _ in 0..cfg.batch {
            let xa = row(rng.random_range(0..half));
            let wa = (-geometry::dot(&r, xa)).exp().min(1.0);
            geometry::axpy(wa, xa, &mut ga);
            let xb = row(half + rng.random_range(0..n - half));
            let s = geometry::dot(&r, xb);
            // ≥ rather than >: at r = 0 the one-sided derivative is −E[xxᵀ]
            if s >= 0.0 {
                let wb = (-s).exp();
                for i in 0..dim {
                    for j in 0..dim {
                        jb[(i, j)] -= wb * xb[i] * xb[j];
                    }
                }
            }
        }
        let b = cfg.batch as f64;
        let grad = (jb / b) * DVector::from_vec(ga) * (2.0 / b);
        let eta = boost * cfg.step_scale / (smoothness * (k as f64).sqrt());
        geometry::axpy(-eta, grad.as_slice(), &mut r);
        let rn = geometry::norm(&r);
        if rn > cfg.radius {
            geometry::scale(cfg.radius / rn, &mut r);
        }
        let g_norm = geometry::norm(&reweighted_mean(points, dim, &r));
        if g_norm < best {
            best = g_norm;
            best_r.clone_from(&r);
            boost = (boost * 2.0).min(cfg.max_boost);
        } else {
            boost = (boost * 0.75).max(1.0);
        }
    }
    if best > 10.0 * cfg.gamma {
        return Err(WarmStartError::Nonconvergence { g_norm: best, r: best_r });
    }
    Ok(PsgdResult { r: best_r, g_norm: best, iters_run, smoothness })
}

/// Accepted subsample with bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct Resampled {
    pub set: ProjectedSet,
    pub consumed: usize,
    pub acceptance_rate: f64,
}

/// Passes every input through the acceptance test min(1, e^{−⟨r,x⟩}).
pub fn rejection_filter(points: &ProjectedSet, r: &[f64], seed: u64) -> Resampled {
    rejection_until(points, r, usize::MAX, seed)
}

fn rejection_until(points: &ProjectedSet, r: &[f64], target: usize, seed: u64) -> Resampled {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dim = points.dim();
    let (mut zs, mut ys) = (Vec::new(), Vec::new());
    let mut consumed = 0;
    for (x, y) in points.iter() {
        if ys.len() >= target {
            break;
        }
        consumed += 1;
        let p = (-geometry::dot(r, x)).exp().min(1.0);
        if rng.random::<f64>() < p {
            zs.extend_from_slice(x);
            ys.push(y);
        }
    }
    let accepted = ys.len();
    Resampled {
        set: ProjectedSet::from_parts(dim, zs, ys, consumed),
        consumed,
        acceptance_rate: if consumed == 0 { 0.0 } else { accepted as f64 / consumed as f64 },
    }
}

/// Consumes inputs until `target_n` are accepted.
pub fn rejection_resample(
    points: &ProjectedSet,
    r: &[f64],
    target_n: usize,
    seed: u64,
) -> Result<Resampled, WarmStartError> {
    let out = rejection_until(points, r, target_n, seed);
    if out.set.len() < target_n {
        return Err(WarmStartError::SourceExhausted { accepted: out.set.len(), wanted: target_n });
    }
    Ok(out)
}

/// Whitened points and the affine map that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardized {
    pub set: ProjectedSet,
    pub mean: Vec<f64>,
    pub cov_sqrt: DMatrix<f64>,
    pub cov_inv_sqrt: DMatrix<f64>,
}

/// Mean and (1/n-normalized) covariance.
pub fn mean_and_covariance(points: &[f64], dim: usize) -> (Vec<f64>, DMatrix<f64>) {
    let n = (points.len() / dim).max(1) as f64;
    let mut mean = vec![0.0; dim];
    for x in points.chunks_exact(dim) {
        geometry::axpy(1.0, x, &mut mean);
    }
    geometry::scale(1.0 / n, &mut mean);
    let mut cov = DMatrix::zeros(dim, dim);
    for x in points.chunks_exact(dim) {
        for i in 0..dim {
            let di = x[i] - mean[i];
            for j in 0..=i {
                cov[(i, j)] += di * (x[j] - mean[j]);
            }
        }
    }
    for i in 0..dim {
        for j in 0..i {
            cov[(j, i)] = cov[(i, j)];
        }
    }
    (mean, cov / n)
}

/// z = Cov^{−1/2}(x − mean).
pub fn standardize(points: &ProjectedSet) -> Result<Standardized, WarmStartError> {
    let dim = points.dim();
    let (mean, cov) = mean_and_covariance(points.features(), dim);
    let eig = SymmetricEigen::new(cov);
    let min = eig.eigenvalues.min();
    if !(min > 1e-8) {
        return Err(WarmStartError::SingularCovariance(min));
    }
    let q = &eig.eigenvectors;
    let sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(f64::sqrt));
    let inv_sqrt = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l.sqrt()));
    let cov_sqrt = q * sqrt * q.transpose();
    let cov_inv_sqrt = q * inv_sqrt * q.transpose();
    let mut zs = Vec::with_capacity(points.features().len());
    let mut centered = vec![0.0; dim];
    for (x, _) in points.iter() {
        for i in 0..dim {
            centered[i] = x[i] - mean[i];
        }
        for i in 0..dim {
            zs.push((0..dim).map(|j| cov_inv_sqrt[(i, j)] * centered[j]).sum());
        }
    }
    Ok(Standardized {
        set: ProjectedSet::from_parts(dim, zs, points.labels().to_vec(), points.n_input()),
        mean,
        cov_sqrt,
        cov_inv_sqrt,
    })
}

/// Degree-1 and degree-2 Chow parameters with the spectrum of the latter,
/// eigenpairs sorted by decreasing |eigenvalue|.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChowParameters {
    pub t1: Vec<f64>,
    pub t2: Vec<Vec<f64>>,
    pub eigvals: Vec<f64>,
    pub eigvecs: Vec<Vec<f64>>,
    pub n_used: usize,
}

impl ChowParameters {
    /// uᵀ·T2·u.
    pub fn quadratic_form(&self, u: &[f64]) -> f64 {
        self.t2.iter().zip(u).map(|(row, ui)| ui * geometry::dot(row, u)).sum()
    }
}

/// T1 = E[y·z], T2 = E[y·(zzᵀ − I)].
pub fn chow_parameters(set: &ProjectedSet) -> ChowParameters {
    let m = set.dim();
    let n = set.len().max(1) as f64;
    let mut t1 = vec![0.0; m];
    let mut t2 = DMatrix::<f64>::zeros(m, m);
    for (z, y) in set.iter() {
        let yf = f64::from(y);
        geometry::axpy(yf, z, &mut t1);
        for i in 0..m {
            for j in 0..=i {
                t2[(i, j)] += yf * z[i] * z[j];
            }
            t2[(i, i)] -= yf;
        }
    }
    for i in 0..m {
        for j in 0..i {
            t2[(j, i)] = t2[(i, j)];
        }
    }
    geometry::scale(1.0 / n, &mut t1);
    let t2 = t2 / n;
    let eig = SymmetricEigen::new(t2.clone());
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].abs().total_cmp(&eig.eigenvalues[a].abs()));
    ChowParameters {
        t1,
        t2: (0..m).map(|i| t2.row(i).iter().copied().collect()).collect(),
        eigvals: order.iter().map(|&k| eig.eigenvalues[k]).collect(),
        eigvecs: order.iter().map(|&k| eig.eigenvectors.column(k).iter().copied().collect()).collect(),
        n_used: set.len(),
    }
}

/// Orthonormal basis of span{T1} ∪ {eigenvectors with |λ| ≥ ζ}. T1 counts
/// only when its norm also reaches ζ, so label-independent data yields an
/// empty subspace.
pub fn build_subspace(chow: &ChowParameters, zeta: f64) -> Result<Vec<Vec<f64>>, WarmStartError> {
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    if geometry::norm(&chow.t1) >= zeta {
        candidates.push(chow.t1.clone());
    }
    for (l, v) in chow.eigvals.iter().zip(&chow.eigvecs) {
        if l.abs() >= zeta {
            candidates.push(v.clone());
        }
    }
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for mut c in candidates {
        let n0 = geometry::norm(&c);
        for b in &basis {
            geometry::remove_component(&mut c, b);
        }
        let n = geometry::norm(&c);
        if n > 1e-8 * n0.max(1e-300) && n > 1e-12 {
            geometry::scale(1.0 / n, &mut c);
            basis.push(c);
        }
    }
    if basis.is_empty() {
        return Err(WarmStartError::EmptySubspace { zeta });
    }
    Ok(basis)
}

/// p(x) = a·x + b·(x² − 1), the normalized form of (x − θb)(x + 1/θb).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadraticProbe {
    pub a: f64,
    pub b: f64,
}

impl QuadraticProbe {
    /// Normalizes q(x) = (x − θb)(x + 1/θb) to unit empirical second
    /// moment over the projections ⟨u, z⟩.
    pub fn fit(set: &ProjectedSet, u: &[f64], theta_b: f64) -> Self {
        let lin = 1.0 / theta_b - theta_b;
        let n = set.len().max(1) as f64;
        let m2: f64 = set
            .iter()
            .map(|(z, _)| {
                let x = geometry::dot(u, z);
                let q = x * x - 1.0 + lin * x;
                q * q
            })
            .sum::<f64>()
            / n;
        let norm = m2.sqrt();
        Self { a: lin / norm, b: 1.0 / norm }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.a * x + self.b * (x * x - 1.0)
    }

    /// a·⟨u,T1⟩ + b·uᵀT2u.
    pub fn chow_correlation(&self, chow: &ChowParameters, u: &[f64]) -> f64 {
        self.a * geometry::dot(u, &chow.t1) + self.b * chow.quadratic_form(u)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarmStartConfig {
    pub alpha: f64,
    pub big_a: f64,
    pub epsilon: f64,
    /// Band offset scale; default from [`default_band_offset`].
    pub s: Option<f64>,
    /// Band width; default s/2.
    pub s_prime: Option<f64>,
    /// Eigenvalue cutoff; default max(ξ², noise floor).
    pub zeta: Option<f64>,
    /// Reweighted-mean target; default 1/ln(1/ξ).
    pub gamma: Option<f64>,
    /// Multiple of √(m/n) below which the cutoff never goes.
    pub noise_floor: f64,
    pub zeta_retries: usize,
    pub psgd: PsgdConfig,
    pub seed: u64,
}

impl WarmStartConfig {
    pub fn new(alpha: f64, big_a: f64, epsilon: f64, seed: u64) -> Self {
        Self {
            alpha,
            big_a,
            epsilon,
            s: None,
            s_prime: None,
            zeta: None,
            gamma: None,
            noise_floor: 5.0,
            zeta_retries: 5,
            psgd: PsgdConfig::default(),
            seed,
        }
    }

    pub fn band_offset(&self) -> f64 {
        self.s.unwrap_or_else(|| default_band_offset(self.alpha, self.big_a, self.epsilon))
    }
}

/// Output of the warm start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarmStartResult {
    pub v: UnitVector,
    pub subspace_dim: usize,
    pub xi: f64,
    pub diagnostics: BTreeMap<String, f64>,
}

/// Band → reweighting → whitening → Chow parameters → random subspace vector.
pub fn warm_start(samples: &Dataset, w: &UnitVector, cfg: &WarmStartConfig) -> Result<WarmStartResult, WarmStartError> {
    if !(cfg.alpha > 0.0 && cfg.alpha < 1.0 && cfg.big_a > 0.0 && cfg.epsilon > 0.0) {
        return Err(WarmStartError::InvalidConfig(format!("{cfg:?}")));
    }
    let mut diag = BTreeMap::new();
    let s = cfg.band_offset();
    let s_prime = cfg.s_prime.unwrap_or(s / 2.0);
    let xi = noise_margin(cfg.alpha, cfg.big_a, s);
    let band = RandomBandConfig::draw(cfg.epsilon, s, s_prime, cfg.seed)?;
    let projected = random_band_project(samples, w, &band)?;
    diag.insert("s".into(), s);
    diag.insert("s_prime".into(), s_prime);
    diag.insert("x0".into(), band.x0);
    diag.insert("band_survival".into(), projected.survival_fraction());
    diag.insert("band_count".into(), projected.len() as f64);

    let basis = geometry::complement_basis(w);
    let m = basis.len();
    let coords = to_coordinates(&projected, &basis);
    if coords.len() < 8 {
        return Err(WarmStartError::SourceExhausted { accepted: coords.len(), wanted: 8 });
    }
    let half = coords.len() / 2;
    let fit_part = &coords.features()[..half * m];
    let rest = ProjectedSet::from_parts(
        m,
        coords.features()[half * m..].to_vec(),
        coords.labels()[half..].to_vec(),
        coords.len() - half,
    );

    let gamma = cfg.gamma.unwrap_or_else(|| 1.0 / (1.0 / xi).ln().max(1.0));
    let mut psgd_cfg = cfg.psgd.clone();
    psgd_cfg.gamma = gamma;
    let mut converged = 1.0;
    let mut psgd = None;
    for attempt in 0..3u64 {
        psgd_cfg.seed = cfg.psgd.seed ^ cfg.seed.wrapping_add(attempt.wrapping_mul(0x9e37_79b9));
        match psgd_stationary_point(fit_part, m, &psgd_cfg) {
            Ok(res) => {
                psgd = Some(res);
                break;
            }
            Err(WarmStartError::Nonconvergence { g_norm, r }) => {
                converged = 0.0;
                if psgd.as_ref().is_none_or(|p: &PsgdResult| g_norm < p.g_norm) {
                    psgd = Some(PsgdResult { r, g_norm, iters_run: psgd_cfg.iters, smoothness: f64::NAN });
                }
            }
            Err(e) => return Err(e),
        }
    }
    let psgd = psgd.expect("at least one attempt");
    diag.insert("gamma_target".into(), gamma);
    diag.insert("gamma_out".into(), psgd.g_norm);
    diag.insert("psgd_converged".into(), converged);
    diag.insert("shift_norm".into(), geometry::norm(&psgd.r));

    let accepted = rejection_filter(&rest, &psgd.r, cfg.seed.wrapping_add(17));
    diag.insert("acceptance_rate".into(), accepted.acceptance_rate);
    diag.insert("accepted".into(), accepted.set.len() as f64);
    let std = standardize(&accepted.set)?;
    let chow = chow_parameters(&std.set);

    let floor = cfg.noise_floor * (m as f64 / accepted.set.len().max(1) as f64).sqrt();
    let mut zeta = cfg.zeta.unwrap_or(xi * xi).max(floor);
    let mut retries = 0;
    let sub = loop {
        match build_subspace(&chow, zeta) {
            Ok(b) => break b,
            Err(WarmStartError::EmptySubspace { .. }) if retries < cfg.zeta_retries && zeta / 2.0 >= floor => {
                zeta /= 2.0;
                retries += 1;
            }
            Err(e) => return Err(e),
        }
    };
    diag.insert("zeta".into(), zeta);
    diag.insert("subspace_dim".into(), sub.len() as f64);
    diag.insert("t1_norm".into(), geometry::norm(&chow.t1));
    for (i, l) in chow.eigvals.iter().filter(|l| l.abs() >= zeta).enumerate() {
        diag.insert(format!("eig_{i}"), *l);
    }
    diag.insert("dim_bound_exceeded".into(), if (sub.len() as f64) > 10.0 * zeta.powi(-4) { 1.0 } else { 0.0 });

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(0x5151));
    let mut u = vec![0.0; m];
    for b in &sub {
        let c: f64 = rng.sample(StandardNormal);
        geometry::axpy(c, b, &mut u);
    }
    let pulled = &std.cov_sqrt * DVector::from_vec(u);
    let mut v = vec![0.0; w.dim()];
    for (c, b) in pulled.iter().zip(&basis) {
        geometry::axpy(*c, b, &mut v);
    }
    geometry::remove_component(&mut v, w.as_slice());
    let v = UnitVector::normalize(v)?;
    Ok(WarmStartResult { v, subspace_dim: sub.len(), xi, diagnostics: diag })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::Label;

    fn uv(v: &[f64]) -> UnitVector {
        UnitVector::normalize(v.to_vec()).unwrap()
    }

    fn set(dim: usize, rows: &[&[f64]], ys: &[Label]) -> ProjectedSet {
        let zs: Vec<f64> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        ProjectedSet::from_parts(dim, zs, ys.to_vec(), ys.len())
    }

    #[test]
    fn band_projection_is_orthogonal() {
        let w = uv(&[1.0, 0.0, 0.0]);
        let mut ds = Dataset::with_dim(3);
        ds.push(&[0.1, 3.0, 4.0], 1);
        ds.push(&[0.5, 3.0, 4.0], 1);
        let cfg = RandomBandConfig { epsilon: 0.1, s: 0.05, s_prime: 0.1, x0: 0.05, seed: 0 };
        let out = random_band_project(&ds, &w, &cfg).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out.z(0), &[0.0, 3.0, 4.0]);
        let far = RandomBandConfig { x0: 9.0, ..cfg };
        assert!(matches!(random_band_project(&ds, &w, &far), Err(WarmStartError::EmptyBand { .. })));
    }

    #[test]
    fn x0_lies_in_range() {
        for seed in 0..50 {
            let c = RandomBandConfig::draw(0.1, 0.02, 0.01, seed).unwrap();
            assert!(c.x0 >= 0.02 && c.x0 <= 0.04);
        }
        assert!(RandomBandConfig::draw(0.1, 0.02, 0.03, 0).is_err());
    }

    #[test]
    fn rejection_with_zero_shift_accepts_all() {
        let s = set(2, &[&[1.0, 2.0], &[-3.0, 0.5], &[0.0, 0.0]], &[1, -1, 1]);
        let out = rejection_resample(&s, &[0.0, 0.0], 3, 1).unwrap();
        assert_eq!(out.set.len(), 3);
        assert_eq!(out.acceptance_rate, 1.0);
        // ⟨r,x⟩ ≤ 0 everywhere also accepts everything
        let nonpos = set(2, &[&[1.0, 2.0], &[3.0, -1.0], &[0.0, 0.0]], &[1, -1, 1]);
        assert_eq!(rejection_filter(&nonpos, &[-1.0, -1.0], 1).set.len(), 3);
        assert!(rejection_resample(&s, &[0.0, 0.0], 4, 1).is_err());
    }

    #[test]
    fn standardize_two_points() {
        let s = set(1, &[&[-1.0], &[1.0]], &[1, 1]);
        let out = standardize(&s).unwrap();
        assert!(out.mean[0].abs() < 1e-15);
        assert!((out.cov_sqrt[(0, 0)] - 1.0).abs() < 1e-12);
        assert_eq!(out.set.features(), &[-1.0, 1.0]);
        let flat = set(2, &[&[1.0, 1.0], &[2.0, 2.0]], &[1, 1]);
        assert!(matches!(standardize(&flat), Err(WarmStartError::SingularCovariance(_))));
    }

    #[test]
    fn subspace_examples() {
        let mk = |t1: Vec<f64>, vals: Vec<f64>, vecs: Vec<Vec<f64>>| ChowParameters {
            t1,
            t2: vec![vec![0.0; 3]; 3],
            eigvals: vals,
            eigvecs: vecs,
            n_used: 1,
        };
        let e = |i: usize| {
            let mut v = vec![0.0; 3];
            v[i] = 1.0;
            v
        };
        let c = mk(e(0), vec![0.0, 0.0, 0.0], vec![e(0), e(1), e(2)]);
        assert_eq!(build_subspace(&c, 0.1).unwrap(), vec![e(0)]);
        let c = mk(vec![0.0; 3], vec![0.5, 0.01, 0.0], vec![e(0), e(1), e(2)]);
        assert_eq!(build_subspace(&c, 0.1).unwrap(), vec![e(0)]);
        let c = mk(e(0), vec![0.5, 0.01, 0.0], vec![e(0), e(1), e(2)]);
        assert_eq!(build_subspace(&c, 0.1).unwrap().len(), 1);
        let c = mk(vec![0.0; 3], vec![0.01, 0.0, 0.0], vec![e(0), e(1), e(2)]);
        assert!(matches!(build_subspace(&c, 0.1), Err(WarmStartError::EmptySubspace { .. })));
    }

    #[test]
    fn chow_is_symmetric_with_valid_eigenpairs() {
        let s = set(3, &[&[1.0, 0.2, -0.3], &[-0.5, 1.5, 0.1], &[0.3, -0.7, 2.0], &[0.0, 0.4, -1.1]], &[1, -1, 1, -1]);
        let c = chow_parameters(&s);
        for i in 0..3 {
            for j in 0..3 {
                assert!((c.t2[i][j] - c.t2[j][i]).abs() < 1e-12);
            }
        }
        for (l, v) in c.eigvals.iter().zip(&c.eigvecs) {
            let tv: Vec<f64> = c.t2.iter().map(|row| geometry::dot(row, v)).collect();
            let res: f64 = tv.iter().zip(v).map(|(a, b)| (a - l * b).powi(2)).sum::<f64>().sqrt();
            assert!(res < 1e-9);
        }
    }

    #[test]
    fn psgd_leaves_symmetric_data_at_origin() {
        let pts = vec![1.0, 0.0, -1.0, 0.0, 0.0, 1.0, 0.0, -1.0];
        let out = psgd_stationary_point(&pts, 2, &PsgdConfig { gamma: 0.01, ..PsgdConfig::default() }).unwrap();
        assert_eq!(out.r, vec![0.0, 0.0]);
        assert!(out.g_norm <= 0.01);
    }

    #[test]
    fn psgd_shifts_toward_positive_mean() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<f64> = (0..20_000).map(|_| 0.4 + rng.sample::<f64, _>(StandardNormal)).collect();
        let out = psgd_stationary_point(&pts, 1, &PsgdConfig { gamma: 0.01, ..PsgdConfig::default() }).unwrap();
        assert!(out.r[0] > 0.0);
        assert!(out.g_norm <= 0.1);
    }
}
