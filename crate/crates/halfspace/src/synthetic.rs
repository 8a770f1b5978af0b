//! Tsybakov example oracles over isotropic log-concave marginals.

use std::f64::consts::PI;
use std::io::{BufRead, Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::geometry::{self, GeometryError, UnitVector};
use crate::stats::{Estimate, MeanVar};

#[derive(Debug, Error)]
pub enum SyntheticError {
    #[error("unsupported family {0:?} for this operation")]
    UnsupportedFamily(MarginalFamily),
    #[error("invalid noise parameters: {0}")]
    InvalidNoise(String),
    #[error("dimension mismatch: marginal has {marginal}, target has {target}")]
    DimensionMismatch { marginal: usize, target: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed dataset: {0}")]
    Malformed(String),
}

/// A ±1 label.
pub type Label = i8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MarginalFamily {
    StandardGaussian,
    IsotropicLogistic,
    IsotropicLaplace,
    UniformBall,
}

impl MarginalFamily {
    pub fn is_log_concave(self) -> bool {
        // every shipped family is; the hook exists for the warm-start gate
        true
    }
}

impl std::str::FromStr for MarginalFamily {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace(['-', '_'], "").as_str() {
            "gaussian" | "standardgaussian" => Ok(Self::StandardGaussian),
            "logistic" | "isotropiclogistic" => Ok(Self::IsotropicLogistic),
            "laplace" | "isotropiclaplace" => Ok(Self::IsotropicLaplace),
            "ball" | "uniformball" => Ok(Self::UniformBall),
            other => Err(format!("unknown marginal family '{other}'")),
        }
    }
}

/// Logistic scale giving unit variance.
const LOGISTIC_SCALE: f64 = 0.551_328_895_421_792_1; // sqrt(3)/pi
/// Laplace scale giving unit variance.
const LAPLACE_SCALE: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MarginalSpec {
    pub family: MarginalFamily,
    pub dim: usize,
}

impl MarginalSpec {
    pub fn new(family: MarginalFamily, dim: usize) -> Result<Self, SyntheticError> {
        if dim < 2 {
            return Err(GeometryError::DimensionTooSmall(dim).into());
        }
        Ok(Self { family, dim })
    }

    fn ball_radius(&self) -> f64 {
        ((self.dim + 2) as f64).sqrt()
    }

    /// Fills `out` with one isotropic draw.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match self.family {
            MarginalFamily::StandardGaussian => {
                for c in out.iter_mut() {
                    *c = rng.sample(StandardNormal);
                }
            }
            MarginalFamily::IsotropicLogistic => {
                for c in out.iter_mut() {
                    let u: f64 = open01(rng);
                    *c = LOGISTIC_SCALE * (u / (1.0 - u)).ln();
                }
            }
            MarginalFamily::IsotropicLaplace => {
                for c in out.iter_mut() {
                    let u: f64 = open01(rng) - 0.5;
                    *c = -LAPLACE_SCALE * u.signum() * (1.0 - 2.0 * u.abs()).ln();
                }
            }
            MarginalFamily::UniformBall => {
                let mut n2 = 0.0;
                for c in out.iter_mut() {
                    *c = rng.sample(StandardNormal);
                    n2 += *c * *c;
                }
                let u: f64 = rng.random();
                let r = self.ball_radius() * u.powf(1.0 / self.dim as f64) / n2.sqrt();
                geometry::scale(r, out);
            }
        }
    }

    /// Upper bound on the density of ⟨u, x⟩ for any unit u.
    pub fn projected_density_bound(&self) -> f64 {
        match self.family {
            MarginalFamily::StandardGaussian => 1.0 / (2.0 * PI).sqrt(),
            // symmetric isotropic log-concave densities on the line peak at most at 1/√2
            MarginalFamily::IsotropicLogistic | MarginalFamily::IsotropicLaplace => std::f64::consts::FRAC_1_SQRT_2,
            MarginalFamily::UniformBall => {
                let d = self.dim as f64;
                (ln_unit_ball_volume(d - 1.0) - ln_unit_ball_volume(d)).exp() / self.ball_radius()
            }
        }
    }
}

fn open01<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let u: f64 = rng.random();
        if u > 0.0 {
            return u;
        }
    }
}

fn ln_unit_ball_volume(m: f64) -> f64 {
    0.5 * m * PI.ln() - ln_gamma(0.5 * m + 1.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NoiseProfile {
    /// η(x) = rate everywhere.
    ConstantRate { rate: f64 },
    /// η(x) = 1/2 − min(1/2, (|⟨w*,x⟩|/scale)^{(1−α)/α}/2).
    MarginPowerLaw { scale: f64 },
    /// η(x) = 1/2 − gap[sector], sectors taken over the angle of x inside the
    /// plane spanned by w* and a seeded axis orthogonal to it.
    Adversarialish { axis_seed: u64, gaps: Vec<f64> },
}

/// Label-noise model with its Tsybakov parameters (α, A).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub alpha: f64,
    pub big_a: f64,
    pub profile: NoiseProfile,
}

fn check_alpha(alpha: f64) -> Result<(), SyntheticError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(SyntheticError::InvalidNoise(format!("alpha {alpha} outside (0,1)")));
    }
    Ok(())
}

impl NoiseSpec {
    /// Exponent α/(1−α) of the tail bound.
    pub fn tail_exponent(&self) -> f64 {
        self.alpha / (1.0 - self.alpha)
    }

    /// A·t^{α/(1−α)}.
    pub fn tail_bound(&self, t: f64) -> f64 {
        self.big_a * t.powf(self.tail_exponent())
    }

    /// α((1−α)/A)^{(1−α)/α}: the constant of the slab-expectation inequality.
    pub fn expectation_constant(&self) -> f64 {
        let a = self.alpha;
        a * ((1.0 - a) / self.big_a).powf((1.0 - a) / a)
    }

    pub fn constant_rate(alpha: f64, rate: f64) -> Result<Self, SyntheticError> {
        check_alpha(alpha)?;
        if !(0.0..0.5).contains(&rate) {
            return Err(SyntheticError::InvalidNoise(format!("rate {rate} outside [0,1/2)")));
        }
        let kappa = alpha / (1.0 - alpha);
        let big_a = (0.5 - rate).powf(-kappa).max(1.0);
        Ok(Self { alpha, big_a, profile: NoiseProfile::ConstantRate { rate } })
    }

    /// A follows from Pr[|⟨w*,x⟩| ≤ s] ≤ 2·U1·s with U1 the marginal's 1-d density bound.
    pub fn margin_power_law(alpha: f64, scale: f64, marginal: &MarginalSpec) -> Result<Self, SyntheticError> {
        check_alpha(alpha)?;
        if !(scale > 0.0) {
            return Err(SyntheticError::InvalidNoise(format!("scale {scale} must be positive")));
        }
        let kappa = alpha / (1.0 - alpha);
        let u1 = marginal.projected_density_bound();
        let big_a = 2f64.powf(kappa) * (2.0 * u1 * scale).max(1.0);
        Ok(Self { alpha, big_a, profile: NoiseProfile::MarginPowerLaw { scale } })
    }

    /// Seeded piecewise-constant margins drawn from [min_gap, 1/2].
    pub fn adversarialish(alpha: f64, seed: u64, sectors: usize, min_gap: f64) -> Result<Self, SyntheticError> {
        check_alpha(alpha)?;
        if sectors == 0 || !(min_gap > 0.0 && min_gap <= 0.5) {
            return Err(SyntheticError::InvalidNoise(format!(
                "need sectors ≥ 1 and min_gap in (0,1/2], got {sectors}, {min_gap}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut gaps: Vec<f64> = (0..sectors).map(|_| rng.random_range(min_gap..=0.5)).collect();
        gaps[0] = min_gap;
        let kappa = alpha / (1.0 - alpha);
        let big_a = min_gap.powf(-kappa);
        Ok(Self { alpha, big_a, profile: NoiseProfile::Adversarialish { axis_seed: seed, gaps } })
    }
}

/// A full ground-truth generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub marginal: MarginalSpec,
    pub target: UnitVector,
    pub noise: NoiseSpec,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn new(
        marginal: MarginalSpec,
        target: UnitVector,
        noise: NoiseSpec,
        seed: u64,
    ) -> Result<Self, SyntheticError> {
        if marginal.dim != target.dim() {
            return Err(SyntheticError::DimensionMismatch { marginal: marginal.dim, target: target.dim() });
        }
        Ok(Self { marginal, target, noise, seed })
    }

    pub fn dim(&self) -> usize {
        self.marginal.dim
    }

    /// Precomputes whatever η(x) needs so repeated evaluation is cheap.
    pub fn noise_model(&self) -> NoiseModel<'_> {
        let axis = match &self.noise.profile {
            NoiseProfile::Adversarialish { axis_seed, .. } => Some(adversarial_axis(&self.target, *axis_seed)),
            _ => None,
        };
        NoiseModel { spec: self, axis }
    }
}

fn adversarial_axis(target: &UnitVector, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_a11a_5eed_a11a);
    loop {
        let g: Vec<f64> = (0..target.dim()).map(|_| rng.sample(StandardNormal)).collect();
        if let Ok(u) = UnitVector::normalize(g) {
            if let Ok(a) = geometry::orth_component(&u, target) {
                return a.into_inner();
            }
        }
    }
}

/// η(x) evaluator bound to an instance.
#[derive(Debug, Clone)]
pub struct NoiseModel<'a> {
    spec: &'a InstanceSpec,
    axis: Option<Vec<f64>>,
}

impl NoiseModel<'_> {
    pub fn rate(&self, x: &[f64]) -> f64 {
        let noise = &self.spec.noise;
        match &noise.profile {
            NoiseProfile::ConstantRate { rate } => *rate,
            NoiseProfile::MarginPowerLaw { scale } => {
                let m = self.spec.target.dot(x).abs();
                let k = (1.0 - noise.alpha) / noise.alpha;
                0.5 - (0.5 * (m / scale).powf(k)).min(0.5)
            }
            NoiseProfile::Adversarialish { gaps, .. } => {
                let axis = self.axis.as_deref().expect("axis computed for this profile");
                let phi = geometry::dot(axis, x).atan2(self.spec.target.dot(x));
                let k = gaps.len();
                let idx = (((phi + PI) / (2.0 * PI)) * k as f64).floor() as usize;
                0.5 - gaps[idx.min(k - 1)]
            }
        }
    }
}

/// η(x) for a single point.
pub fn noise_rate(spec: &InstanceSpec, x: &[f64]) -> f64 {
    spec.noise_model().rate(x)
}

/// Clean label sign(⟨w,x⟩), with sign(0) = +1.
pub fn clean_label(w: &[f64], x: &[f64]) -> Label {
    if geometry::dot(w, x) >= 0.0 {
        1
    } else {
        -1
    }
}

/// One labeled point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabeledSample {
    pub x: Vec<f64>,
    pub y: Label,
}

/// A batch of labeled points stored row-major.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    dim: usize,
    xs: Vec<f64>,
    ys: Vec<Label>,
}

impl Dataset {
    pub fn with_dim(dim: usize) -> Self {
        Self { dim, xs: Vec::new(), ys: Vec::new() }
    }

    pub fn from_parts(dim: usize, xs: Vec<f64>, ys: Vec<Label>) -> Result<Self, DatasetError> {
        if dim == 0 || xs.len() != dim * ys.len() {
            return Err(DatasetError::Malformed(format!(
                "{} coordinates do not fit {} rows of dimension {dim}",
                xs.len(),
                ys.len()
            )));
        }
        if ys.iter().any(|&y| y != 1 && y != -1) {
            return Err(DatasetError::Malformed("labels must be ±1".into()));
        }
        Ok(Self { dim, xs, ys })
    }

    pub fn from_samples(dim: usize, samples: &[LabeledSample]) -> Result<Self, DatasetError> {
        let mut ds = Self::with_dim(dim);
        for s in samples {
            if s.x.len() != dim {
                return Err(DatasetError::Malformed("ragged sample".into()));
            }
            ds.push(&s.x, s.y);
        }
        Ok(ds)
    }

    pub fn push(&mut self, x: &[f64], y: Label) {
        debug_assert_eq!(x.len(), self.dim);
        self.xs.extend_from_slice(x);
        self.ys.push(y);
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

    pub fn x(&self, i: usize) -> &[f64] {
        &self.xs[i * self.dim..(i + 1) * self.dim]
    }

    pub fn y(&self, i: usize) -> Label {
        self.ys[i]
    }

    pub fn labels(&self) -> &[Label] {
        &self.ys
    }

    pub fn features(&self) -> &[f64] {
        &self.xs
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = (&[f64], Label)> + '_ {
        self.xs.chunks_exact(self.dim).zip(self.ys.iter().copied())
    }

    pub fn to_samples(&self) -> Vec<LabeledSample> {
        self.iter().map(|(x, y)| LabeledSample { x: x.to_vec(), y }).collect()
    }

    /// Rows `range` as a new dataset.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Dataset {
        Dataset {
            dim: self.dim,
            xs: self.xs[range.start * self.dim..range.end * self.dim].to_vec(),
            ys: self.ys[range].to_vec(),
        }
    }

    pub fn extend_from(&mut self, other: &Dataset) {
        debug_assert_eq!(self.dim, other.dim);
        self.xs.extend_from_slice(&other.xs);
        self.ys.extend_from_slice(&other.ys);
    }
}

const CHUNK: usize = 4096;

/// Independent generator for chunk `chunk` of batch `batch` under `seed`.
pub fn stream_rng(seed: u64, batch: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((batch << 24) | (chunk & 0xff_ffff));
    rng
}

/// `n` draws from the example oracle; batch index 0.
pub fn sample_batch(spec: &InstanceSpec, n: usize) -> Dataset {
    sample_stream(spec, n, 0)
}

/// `n` draws from the independent stream `batch`. Output depends only on
/// (spec, n, batch), not on thread count.
pub fn sample_stream(spec: &InstanceSpec, n: usize, batch: u64) -> Dataset {
    let d = spec.dim();
    let model = spec.noise_model();
    let chunks: Vec<(Vec<f64>, Vec<Label>)> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let len = CHUNK.min(n - c * CHUNK);
            let mut rng = stream_rng(spec.seed, batch, c as u64);
            let mut xs = vec![0.0; len * d];
            let mut ys = Vec::with_capacity(len);
            for x in xs.chunks_exact_mut(d) {
                spec.marginal.sample_into(&mut rng, x);
                let clean = clean_label(spec.target.as_slice(), x);
                let u: f64 = rng.random();
                ys.push(if u < model.rate(x) { -clean } else { clean });
            }
            (xs, ys)
        })
        .collect();
    let mut ds = Dataset { dim: d, xs: Vec::with_capacity(n * d), ys: Vec::with_capacity(n) };
    for (xs, ys) in chunks {
        ds.xs.extend(xs);
        ds.ys.extend(ys);
    }
    ds
}

/// Uniform direction on the sphere from `seed`.
pub fn random_direction(dim: usize, seed: u64) -> UnitVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let g: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        if let Ok(u) = UnitVector::normalize(g) {
            return u;
        }
    }
}

/// Marginal-only draws (no labels) from stream `batch`.
pub fn sample_marginal(marginal: &MarginalSpec, seed: u64, n: usize, batch: u64) -> Vec<f64> {
    let d = marginal.dim;
    let parts: Vec<Vec<f64>> = (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let len = CHUNK.min(n - c * CHUNK);
            let mut rng = stream_rng(seed, batch, c as u64);
            let mut xs = vec![0.0; len * d];
            for x in xs.chunks_exact_mut(d) {
                marginal.sample_into(&mut rng, x);
            }
            xs
        })
        .collect();
    parts.concat()
}

/// Constants (k, L, R, U, β) of the anti-concentration / tail conditions
/// for 3-dimensional projections.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WellBehavedParams {
    pub k: usize,
    pub l: f64,
    pub r: f64,
    pub u: f64,
    pub beta: f64,
}

fn logistic_density(t: f64) -> f64 {
    let e = (-t.abs() / LOGISTIC_SCALE).exp();
    e / (LOGISTIC_SCALE * (1.0 + e) * (1.0 + e))
}

fn laplace_density(t: f64) -> f64 {
    (-t.abs() / LAPLACE_SCALE).exp() / (2.0 * LAPLACE_SCALE)
}

/// Minimum over the unit sphere of the product density ∏ f(y_i) in R^3, by grid.
fn min_product_density_on_sphere(f: impl Fn(f64) -> f64) -> f64 {
    let steps = 400;
    let mut best = f64::INFINITY;
    for i in 0..=steps {
        let theta = PI * i as f64 / steps as f64;
        for j in 0..=steps {
            let phi = 0.5 * PI * j as f64 / steps as f64;
            let y = [theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()];
            best = best.min(f(y[0]) * f(y[1]) * f(y[2]));
        }
    }
    best
}

/// Safety factor applied to grid-searched lower bounds for product families.
const PRODUCT_SAFETY: f64 = 0.5;

pub fn well_behaved_params(spec: &MarginalSpec) -> Result<WellBehavedParams, SyntheticError> {
    let r = 1.0;
    match spec.family {
        MarginalFamily::StandardGaussian => {
            let u = (2.0 * PI).powf(-1.5);
            Ok(WellBehavedParams { k: 3, l: u * (-0.5f64).exp(), r, u, beta: 1.0 })
        }
        MarginalFamily::IsotropicLogistic => Ok(WellBehavedParams {
            k: 3,
            l: PRODUCT_SAFETY * min_product_density_on_sphere(logistic_density),
            r,
            u: logistic_density(0.0).powi(3),
            beta: 1.0,
        }),
        MarginalFamily::IsotropicLaplace => Ok(WellBehavedParams {
            k: 3,
            l: PRODUCT_SAFETY * min_product_density_on_sphere(laplace_density),
            r,
            u: laplace_density(0.0).powi(3),
            beta: 1.0,
        }),
        MarginalFamily::UniformBall => {
            if spec.dim < 3 {
                return Err(SyntheticError::UnsupportedFamily(spec.family));
            }
            // 3-d marginal of the uniform ball of radius ρ in R^d:
            // vol_{d−3}(ρ² − |y|²)^{(d−3)/2} / vol_d(ρ)
            let d = spec.dim as f64;
            let rho = spec.ball_radius();
            let ln_c = ln_unit_ball_volume(d - 3.0) - ln_unit_ball_volume(d) - d * rho.ln();
            let dens = |s: f64| (ln_c + 0.5 * (d - 3.0) * (rho * rho - s * s).ln()).exp();
            Ok(WellBehavedParams { k: 3, l: dens(r), r, u: dens(0.0), beta: 1.0 })
        }
    }
}

/// Monte-Carlo Pr[sign⟨h,x⟩ ≠ sign⟨w*,x⟩] on a dedicated stream.
pub fn disagreement_error(spec: &InstanceSpec, h: &UnitVector, n: usize) -> Estimate {
    let xs = sample_marginal(&spec.marginal, spec.seed, n, DISAGREEMENT_STREAM);
    xs.chunks_exact(spec.dim())
        .map(|x| {
            let a = clean_label(spec.target.as_slice(), x);
            let b = clean_label(h.as_slice(), x);
            if a != b {
                1.0
            } else {
                0.0
            }
        })
        .collect::<MeanVar>()
        .estimate()
}

/// Stream index reserved for error estimation.
pub const DISAGREEMENT_STREAM: u64 = (1 << 39) + 1;

/// Writes the text format: header `d n seed`, then one row per sample.
pub fn write_text<W: Write>(ds: &Dataset, seed: u64, mut out: W) -> Result<(), DatasetError> {
    writeln!(out, "{} {} {}", ds.dim(), ds.len(), seed)?;
    let mut line = String::new();
    for (x, y) in ds.iter() {
        line.clear();
        for c in x {
            line.push_str(&format!("{c:?} "));
        }
        line.push_str(&y.to_string());
        writeln!(out, "{line}")?;
    }
    Ok(())
}

pub fn read_text<R: BufRead>(input: R) -> Result<(Dataset, u64), DatasetError> {
    let mut lines = input.lines();
    let header = lines.next().ok_or_else(|| DatasetError::Malformed("empty file".into()))??;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 3 {
        return Err(DatasetError::Malformed(format!("bad header '{header}'")));
    }
    let parse_u = |s: &str| s.parse::<u64>().map_err(|e| DatasetError::Malformed(format!("{s}: {e}")));
    let (d, n, seed) = (parse_u(h[0])? as usize, parse_u(h[1])? as usize, parse_u(h[2])?);
    let mut ds = Dataset::with_dim(d);
    let mut x = vec![0.0; d];
    for i in 0..n {
        let line = lines.next().ok_or_else(|| DatasetError::Malformed(format!("missing row {i}")))??;
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != d + 1 {
            return Err(DatasetError::Malformed(format!("row {i} has {} fields", toks.len())));
        }
        for (c, t) in x.iter_mut().zip(&toks) {
            *c = t.parse().map_err(|e| DatasetError::Malformed(format!("row {i}: {e}")))?;
        }
        let y: Label = toks[d].parse().map_err(|e| DatasetError::Malformed(format!("row {i}: {e}")))?;
        if y != 1 && y != -1 {
            return Err(DatasetError::Malformed(format!("row {i}: label {y}")));
        }
        ds.push(&x, y);
    }
    Ok((ds, seed))
}

pub const BINARY_MAGIC: &[u8; 5] = b"THSD1";

pub fn write_binary<W: Write>(ds: &Dataset, mut out: W) -> Result<(), DatasetError> {
    out.write_all(BINARY_MAGIC)?;
    out.write_all(&(ds.dim() as u32).to_le_bytes())?;
    out.write_all(&(ds.len() as u64).to_le_bytes())?;
    for (x, y) in ds.iter() {
        for c in x {
            out.write_all(&c.to_le_bytes())?;
        }
        out.write_all(&y.to_le_bytes())?;
    }
    Ok(())
}

pub fn read_binary<R: Read>(mut input: R) -> Result<Dataset, DatasetError> {
    let mut magic = [0u8; 5];
    input.read_exact(&mut magic)?;
    if &magic != BINARY_MAGIC {
        return Err(DatasetError::Malformed("bad magic".into()));
    }
    let mut b4 = [0u8; 4];
    let mut b8 = [0u8; 8];
    input.read_exact(&mut b4)?;
    let d = u32::from_le_bytes(b4) as usize;
    input.read_exact(&mut b8)?;
    let n = u64::from_le_bytes(b8) as usize;
    if d == 0 {
        return Err(DatasetError::Malformed("zero dimension".into()));
    }
    let mut ds = Dataset::with_dim(d);
    let mut x = vec![0.0; d];
    let mut b1 = [0u8; 1];
    for _ in 0..n {
        for c in x.iter_mut() {
            input.read_exact(&mut b8)?;
            *c = f64::from_le_bytes(b8);
        }
        input.read_exact(&mut b1)?;
        let y = i8::from_le_bytes(b1);
        if y != 1 && y != -1 {
            return Err(DatasetError::Malformed(format!("label {y}")));
        }
        ds.push(&x, y);
    }
    Ok(ds)
}
