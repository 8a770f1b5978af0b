//! Monte-Carlo checks against independently computed reference values.

use halfspace::certificate::ProjectedSet;
use halfspace::certificate::{self, CertSearchConfig, TransformConfig};
use halfspace::geometry::{self, UnitVector};
use halfspace::learner::{self, CertificateOracle, LearnerConfig, OracleAnswer, PoolSource, WellBehavedOracle};
use halfspace::synthetic::{self, Dataset, InstanceSpec, MarginalFamily, MarginalSpec, NoiseSpec};
use halfspace::warmstart::{self, PsgdConfig, RandomBandConfig};
use statrs::distribution::{Beta, ContinuousCDF, Normal};

fn phi_cdf(x: f64) -> f64 {
    Normal::new(0.0, 1.0).unwrap().cdf(x)
}

fn uv(v: &[f64]) -> UnitVector {
    UnitVector::normalize(v.to_vec()).unwrap()
}

fn gaussian(d: usize) -> MarginalSpec {
    MarginalSpec::new(MarginalFamily::StandardGaussian, d).unwrap()
}

fn instance(d: usize, target: UnitVector, rate: f64, seed: u64) -> InstanceSpec {
    InstanceSpec::new(gaussian(d), target, NoiseSpec::constant_rate(0.5, rate).unwrap(), seed).unwrap()
}

/// Mean and standard error of a slice.
fn mean_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0);
    (m, (var / n).sqrt())
}

#[test]
fn constant_rate_flip_fraction() {
    let spec = instance(4, UnitVector::basis(4, 0).unwrap(), 0.3, 11);
    let ds = synthetic::sample_batch(&spec, 100_000);
    let flips = ds.iter().filter(|(x, y)| (if x[0] >= 0.0 { 1 } else { -1 }) != *y).count();
    let rate = flips as f64 / ds.len() as f64;
    assert!((rate - 0.3).abs() <= 0.005, "flip rate {rate}");
}

#[test]
fn logistic_constants_are_finite_positive() {
    let p = synthetic::well_behaved_params(&MarginalSpec::new(MarginalFamily::IsotropicLogistic, 4).unwrap()).unwrap();
    for c in [p.l, p.r, p.u, p.beta] {
        assert!(c.is_finite() && c > 0.0);
    }
}

#[test]
fn gaussian_disagreement_is_angle_over_pi() {
    let spec = instance(5, UnitVector::basis(5, 0).unwrap(), 0.0, 3);
    for theta in [std::f64::consts::FRAC_PI_4, 0.3, 1.2] {
        let mut h = vec![0.0; 5];
        h[0] = theta.cos();
        h[2] = theta.sin();
        let e = synthetic::disagreement_error(&spec, &uv(&h), 200_000);
        let want = theta / std::f64::consts::PI;
        assert!((e.mean - want).abs() <= 3.0 * e.se, "θ={theta}: {} vs {want}", e.mean);
    }
}

#[test]
fn angle_to_error_dominates_gaussian_disagreement() {
    let p = synthetic::well_behaved_params(&gaussian(5)).unwrap();
    for theta in [0.01, 0.1, 0.5] {
        assert!(theta / std::f64::consts::PI <= learner::angle_to_error(theta, &p, theta));
    }
}

#[test]
fn band_survival_matches_gaussian_cdf() {
    let spec = instance(3, UnitVector::basis(3, 1).unwrap(), 0.0, 5);
    let ds = synthetic::sample_batch(&spec, 400_000);
    let tcfg = TransformConfig::new(UnitVector::basis(3, 0).unwrap(), 0.5, 1.0).unwrap();
    let set = certificate::transform(&ds, &tcfg).unwrap();
    let p = set.survival_fraction();
    let want = phi_cdf(0.5 / 2f64.sqrt()) - phi_cdf(0.25);
    let se = (want * (1.0 - want) / ds.len() as f64).sqrt();
    assert!((p - want).abs() <= 3.0 * se, "{p} vs {want}");
    assert!((want - 0.0397).abs() < 5e-4);
}

/// Population window value for the noiseless 2-d instance with w = e2,
/// w* = e1: −Pr[−t_hi ≤ x1/x2 ≤ −t_lo | x2 in band], by quadrature.
fn trapezoid_value(lo: f64, hi: f64, t_lo: f64, t_hi: f64) -> f64 {
    let n = 20_000;
    let h = (hi - lo) / n as f64;
    let dens = |t: f64| (-t * t / 2.0).exp();
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..n {
        let x2 = lo + (i as f64 + 0.5) * h;
        num += dens(x2) * (phi_cdf(-t_lo * x2) - phi_cdf(-t_hi * x2));
        den += dens(x2);
    }
    -num / den
}

fn two_d_projected(n: usize, seed: u64, radius: f64) -> (ProjectedSet, TransformConfig) {
    let spec = instance(2, UnitVector::basis(2, 0).unwrap(), 0.0, seed);
    let ds = synthetic::sample_batch(&spec, n);
    let tcfg = TransformConfig::new(UnitVector::basis(2, 1).unwrap(), 1.0, radius).unwrap();
    (certificate::transform(&ds, &tcfg).unwrap(), tcfg)
}

#[test]
fn window_value_matches_quadrature_and_scan_finds_it() {
    let r = 1.0;
    let (set, tcfg) = two_d_projected(400_000, 8, r);
    let v = UnitVector::basis(2, 0).unwrap();
    let est = certificate::certificate_estimate(&set, &v, r / 2.0, r);
    let want = trapezoid_value(tcfg.sigma1(), tcfg.sigma2(), r / 2.0, r);
    assert!(est.mean < 0.0);
    assert!((est.mean - want).abs() <= 3.0 * est.se, "{} vs {want}", est.mean);
    let c = want.abs() / 2.0;
    let t0 = certificate::scan_thresholds(&set, &v, r, c).expect("scan finds a threshold");
    assert!(t0 > r / 2.0 && t0 <= r);
    assert!(certificate::certificate_value(&set, &v, t0, r) <= -c);
}

#[test]
fn update_direction_correlates_with_target_perp() {
    let d = 3;
    let target = UnitVector::basis(d, 0).unwrap();
    let w = UnitVector::basis(d, 1).unwrap();
    let vstar = geometry::orth_component(&target, &w).unwrap();
    let v = uv(&[-0.3, 0.0, (1.0f64 - 0.09).sqrt()]);
    let rho = 0.5;
    let r = 3.0 / rho;
    let tcfg = TransformConfig::new(w.clone(), rho, 1.0).unwrap();
    let small =
        certificate::transform(&synthetic::sample_batch(&instance(d, target.clone(), 0.0, 1), 300_000), &tcfg).unwrap();
    let big =
        certificate::transform(&synthetic::sample_stream(&instance(d, target, 0.0, 1), 3_000_000, 9), &tcfg).unwrap();
    let g = certificate::update_direction(&small, &v, r);
    assert!(geometry::dot(&g, v.as_slice()).abs() < 1e-9);
    let pop = geometry::dot(&certificate::update_direction(&big, &v, r), vstar.as_slice());
    // per-sample contributions for the standard error
    let contrib: Vec<f64> = small
        .iter()
        .map(|(z, y)| {
            let p = v.dot(z);
            if (-r..=-r / 2.0).contains(&p) {
                let mut q = z.to_vec();
                geometry::remove_component(&mut q, v.as_slice());
                f64::from(y) * geometry::dot(&q, vstar.as_slice())
            } else {
                0.0
            }
        })
        .collect();
    let (m, se) = mean_se(&contrib);
    let got = geometry::dot(&g, vstar.as_slice());
    assert!((got - m).abs() < 1e-12);
    assert!(pop > 0.0 && got > 0.0);
    assert!(got >= pop - 3.0 * se, "{got} vs population {pop}");
}

#[test]
fn certificate_search_and_lift_on_noiseless_instance() {
    let d = 3;
    let target = UnitVector::basis(d, 0).unwrap();
    let w = UnitVector::basis(d, 1).unwrap();
    let vstar = geometry::orth_component(&target, &w).unwrap();
    let params = synthetic::well_behaved_params(&gaussian(d)).unwrap();
    let noise = NoiseSpec::constant_rate(0.5, 0.0).unwrap();
    let cfg = CertSearchConfig::new(&params, &noise, std::f64::consts::FRAC_PI_2);
    let tcfg = cfg.transform_config(&w).unwrap();
    let spec = instance(d, target, 0.0, 21);
    let train = certificate::transform(&synthetic::sample_stream(&spec, 300_000, 1), &tcfg).unwrap();
    let hold = certificate::transform(&synthetic::sample_stream(&spec, 150_000, 2), &tcfg).unwrap();
    // start with correlation 0.1 to the target direction
    let v0 = uv(&[0.1, 0.0, -(1.0f64 - 0.01).sqrt()]);
    assert!((v0.dot(vstar.as_slice()) - 0.1).abs() < 1e-12);
    let out = certificate::compute_certificate(&train, &hold, &tcfg, &v0, &cfg).unwrap();
    let wit = out.witness().expect("witness").clone();
    assert!(out.report().updates() <= cfg.max_iters);
    assert!(wit.value <= -cfg.threshold_c);
    // sign test on fresh raw samples: a certificate must be negative for w
    let fresh = synthetic::sample_stream(&spec, 300_000, 3);
    let lifted: Vec<f64> = fresh.iter().map(|(x, y)| wit.evaluate(x) * f64::from(y) * w.dot(x)).collect();
    let (lm, lse) = mean_se(&lifted);
    assert!(lm + 3.0 * lse < 0.0, "lifted {lm} ± {lse}");
    // lifted = band mass × projected value on the same sample
    let fresh_p = certificate::transform(&fresh, &tcfg).unwrap();
    let pv = certificate::certificate_value(&fresh_p, &wit.v, wit.t2, wit.t1);
    assert!((lm - fresh_p.survival_fraction() * pv).abs() < 1e-12);
    let scale = cfg.threshold_c * params.l * params.r.powi(3) * tcfg.rho;
    eprintln!("lifted / (c·L·R³·ρ) = {:.3e}", lm.abs() / scale);
    assert!(lm.abs() >= scale);
}

#[test]
fn random_init_coordinate_follows_beta_law() {
    let d = 100;
    let w = UnitVector::basis(d, 0).unwrap();
    let u = UnitVector::basis(d, 1).unwrap();
    let a = 0.1 / ((d - 1) as f64).sqrt();
    let draws = 5000;
    let hits = (0..draws).filter(|s| certificate::random_init(&w, *s as u64).dot(u.as_slice()).abs() >= a).count();
    let frac = hits as f64 / draws as f64;
    // v1² ~ Beta(1/2, (m−1)/2) on the sphere of w⊥, m = d − 1
    let m = (d - 1) as f64;
    let want = 1.0 - Beta::new(0.5, (m - 1.0) / 2.0).unwrap().cdf(a * a);
    let se = (want * (1.0 - want) / draws as f64).sqrt();
    assert!(frac >= 0.5);
    assert!((frac - want).abs() <= 3.0 * se, "{frac} vs {want}");
}

#[test]
fn random_band_survival_matches_density() {
    let spec = instance(4, UnitVector::basis(4, 1).unwrap(), 0.0, 2);
    let ds = synthetic::sample_batch(&spec, 1_000_000);
    let band = RandomBandConfig { epsilon: 0.1, s: 0.05, s_prime: 0.02, x0: 0.07, seed: 0 };
    let set = warmstart::random_band_project(&ds, &UnitVector::basis(4, 0).unwrap(), &band).unwrap();
    let want = phi_cdf(band.x0 + band.s_prime) - phi_cdf(band.x0);
    let se = (want * (1.0 - want) / ds.len() as f64).sqrt();
    let p = set.survival_fraction();
    assert!((p - want).abs() <= 3.0 * se, "{p} vs {want}");
    let density = (-band.x0 * band.x0 / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt() * band.s_prime;
    assert!((want - density).abs() / density < 0.01);
}

/// Shifted 2-d Gaussian with mean (0.3, 0).
fn shifted_points(n: usize, seed: u64) -> ProjectedSet {
    let ds = synthetic::sample_marginal(&gaussian(2), seed, n, 0);
    let zs: Vec<f64> = ds.chunks_exact(2).flat_map(|x| [x[0] + 0.3, x[1]]).collect();
    ProjectedSet::from_parts(2, zs, vec![1; n], n)
}

/// Dense grid search for the root of r ↦ mean of x1·min(1, e^{−r·x1}).
fn grid_root(points: &ProjectedSet) -> f64 {
    let x1: Vec<f64> = points.iter().map(|(z, _)| z[0]).collect();
    let g = |r: f64| x1.iter().map(|x| x * (-r * x).exp().min(1.0)).sum::<f64>() / x1.len() as f64;
    let mut best = (f64::INFINITY, 0.0);
    for i in 0..=2000 {
        let r = i as f64 * 0.001;
        let v = g(r).abs();
        if v < best.0 {
            best = (v, r);
        }
    }
    best.1
}

#[test]
fn psgd_and_rejection_center_a_shifted_gaussian() {
    let pts = shifted_points(200_000, 4);
    let cfg = PsgdConfig { gamma: 0.02, ..PsgdConfig::default() };
    let res = warmstart::psgd_stationary_point(pts.features(), 2, &cfg).unwrap();
    assert!(res.g_norm <= 0.05, "g norm {}", res.g_norm);
    let root = grid_root(&pts);
    assert!(res.r[0] > 0.0);
    assert!((res.r[0] - root).abs() <= 0.2 * root, "psgd r1 {} vs grid {root}", res.r[0]);
    let acc = warmstart::rejection_resample(&pts, &res.r, 50_000, 7).unwrap();
    let mut mean = [0.0; 2];
    for (z, _) in acc.set.iter() {
        mean[0] += z[0];
        mean[1] += z[1];
    }
    let m = geometry::norm(&mean) / acc.set.len() as f64;
    assert!(m <= 0.05, "accepted mean norm {m}");
    assert!(acc.acceptance_rate >= 0.05);
}

#[test]
fn chow_t1_of_gaussian_halfspace() {
    let m = 4;
    let u = uv(&[0.5, -0.5, 0.5, 0.5]);
    let zs = synthetic::sample_marginal(&gaussian(m), 31, 400_000, 0);
    let ys: Vec<i8> = zs.chunks_exact(m).map(|z| if u.dot(z) >= 0.0 { 1 } else { -1 }).collect();
    let n = ys.len();
    let set = ProjectedSet::from_parts(m, zs.clone(), ys.clone(), n);
    let chow = warmstart::chow_parameters(&set);
    let c = (2.0 / std::f64::consts::PI).sqrt();
    for i in 0..m {
        let col: Vec<f64> = zs.chunks_exact(m).zip(&ys).map(|(z, y)| f64::from(*y) * z[i]).collect();
        let (mean, se) = mean_se(&col);
        assert!((chow.t1[i] - mean).abs() < 1e-12);
        assert!((chow.t1[i] - c * u.as_slice()[i]).abs() <= 3.0 * se, "coord {i}: {}", chow.t1[i]);
    }
}

#[test]
fn certificate_loss_bounds_on_noiseless_instance() {
    let d = 5;
    let target = UnitVector::basis(d, 0).unwrap();
    let w = UnitVector::basis(d, 1).unwrap();
    let noise = NoiseSpec::constant_rate(0.5, 0.0).unwrap();
    let params = synthetic::well_behaved_params(&gaussian(d)).unwrap();
    let spec = instance(d, target.clone(), 0.0, 41);
    let mut src = PoolSource::from_instance(&spec, 500_000, 250_000, 0);
    let cfg = CertSearchConfig::new(&params, &noise, 0.15);
    let mut oracle = WellBehavedOracle::new(params, noise.clone(), cfg, d);
    let rho = oracle.rho(0.15);
    let OracleAnswer::Refuted(cert) = oracle.query(&w, 0.15, 0.1, &mut src).unwrap() else {
        panic!("no certificate for an orthogonal direction");
    };
    let loss = synthetic::sample_stream(&spec, 400_000, 77);
    let grad = learner::loss_gradient(&loss, Some(|x: &[f64]| cert.eval(x)), rho);
    // ⟨grad, u⟩ as a per-sample mean for u = w and u = w*
    let per = |u: &UnitVector| -> Vec<f64> {
        loss.iter().map(|(x, y)| -(cert.eval(x) + rho / 2.0) * f64::from(y) * u.dot(x)).collect()
    };
    let (gw, se_w) = mean_se(&per(&w));
    let (gs, se_s) = mean_se(&per(&target));
    assert!((gw - geometry::dot(&grad, w.as_slice())).abs() < 1e-12);
    assert!(gw >= rho / 2.0 - 3.0 * se_w, "⟨grad, w⟩ = {gw}");
    assert!(gs + 3.0 * se_s < 0.0, "comparator {gs} ± {se_s}");
}

#[test]
fn default_rho_is_below_achievable_certificate() {
    let d = 5;
    let params = synthetic::well_behaved_params(&gaussian(d)).unwrap();
    let noise = NoiseSpec::constant_rate(0.5, 0.2).unwrap();
    let target = UnitVector::basis(d, 0).unwrap();
    let theta: f64 = 0.3;
    let mut wv = vec![0.0; d];
    wv[0] = theta.cos();
    wv[1] = theta.sin();
    let w = uv(&wv);
    let spec = InstanceSpec::new(gaussian(d), target, noise.clone(), 6).unwrap();
    let mut src = PoolSource::from_instance(&spec, 500_000, 250_000, 0);
    let mut oracle = WellBehavedOracle::new(params, noise.clone(), CertSearchConfig::new(&params, &noise, theta), d);
    let OracleAnswer::Refuted(cert) = oracle.query(&w, theta, 0.1, &mut src).unwrap() else {
        panic!("no certificate at θ = 0.3");
    };
    let hold = synthetic::sample_stream(&spec, 500_000, 99);
    let vals: Vec<f64> = hold.iter().map(|(x, y)| cert.eval(x) * f64::from(y) * w.dot(x)).collect();
    let (m, se) = mean_se(&vals);
    let rho = learner::rho_for_well_behaved(theta, &params, &noise, d);
    assert!(m + 3.0 * se < 0.0);
    assert!(m.abs() > rho, "magnitude {} vs ρ {rho}", m.abs());
}

/// Returns one fixed handle whose gradient is −ρ·w*/2 on the pool below.
struct FixedHandle(learner::Certificate);

impl CertificateOracle for FixedHandle {
    fn query(
        &mut self,
        _: &UnitVector,
        _: f64,
        _: f64,
        _: &mut dyn learner::SampleSource,
    ) -> Result<OracleAnswer, learner::LearnerError> {
        Ok(OracleAnswer::Refuted(self.0.clone()))
    }
    fn rho(&self, _: f64) -> f64 {
        0.2
    }
}

#[test]
fn fixed_handle_drifts_toward_target() {
    let d = 3;
    let target = uv(&[0.0, 0.6, 0.8]);
    let mut pool = Dataset::with_dim(d);
    pool.push(target.as_slice(), 1);
    // an empty band makes T ≡ 0, so the gradient is −(ρ/2)·w*
    let witness = certificate::CertificateWitness {
        w: UnitVector::basis(d, 0).unwrap(),
        v: UnitVector::basis(d, 1).unwrap(),
        sigma1: 2.0,
        sigma2: 1.0,
        t1: 1.0,
        t2: 0.5,
        value: -1.0,
        n_used: 0,
    };
    let cert = learner::Certificate {
        witness,
        guess: 1.0,
        rho: 1.0,
        holdout: halfspace::stats::Estimate { mean: -1.0, se: 0.0 },
    };
    let mut src = PoolSource::new(pool.clone(), pool.clone(), pool);
    let cfg =
        LearnerConfig { max_rounds: 30, loss_batch: 1, contract_check: false, ..LearnerConfig::new(0.1, 0.1, 0.2) };
    let (_, trace) = learner::learn(&mut src, &mut FixedHandle(cert), &cfg).unwrap();
    assert_eq!(trace.rounds.len(), 30);
    let g = learner::loss_gradient(
        &Dataset::from_parts(d, target.as_slice().to_vec(), vec![1]).unwrap(),
        None::<fn(&[f64]) -> f64>,
        0.2,
    );
    for (a, b) in g.iter().zip(target.as_slice()) {
        assert!((a + 0.1 * b).abs() < 1e-15);
    }
    let corr: Vec<f64> = trace.rounds.iter().map(|r| geometry::dot(&r.w, target.as_slice())).collect();
    assert!(corr.windows(2).all(|p| p[1] >= p[0] - 1e-15), "{corr:?}");
    assert!(corr.last().unwrap() > corr.first().unwrap());
    assert!(trace.rounds.iter().all(|r| geometry::norm(&r.w) <= 1.0 + 1e-12));
}
