//! Acceptance checks, one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p rgm --test acceptance`. Every criterion is
//! attempted and reported; the binary exits non-zero only when a check
//! cannot run at all (a panic or library error).

use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rgm::baselines::{ols_pair, run_baseline, Method};
use rgm::benchmark::{aggregate, aggregate_csv, find, replicate_csv, run_benchmark, BenchmarkConfig};
use rgm::distributions::{
    sample_beta, sample_gig, sample_inverse_gamma, sample_matrix_normal, standard_normal, GigParams, MatrixNormalParams,
};
use rgm::linalg::min_eigenvalue;
use rgm::mcmc::{run_chain, run_chain_observed, Hyperparameters, InstrumentMode, LatentState, McmcConfig, Sampler};
use rgm::model::{
    compute_sufficient_stats, log_likelihood_raw, log_likelihood_summary, Mask, Matrix, ModelParameters, RawDataSet,
};
use rgm::parallel::Execution;
use rgm::seed::derive;
use rgm::simulation::{gen_data, gen_truth, sample_outcomes, Case, CaseSpec};
use rgm::summary::{summarize, Thresholds};

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

type Criterion = (&'static str, Option<Duration>, fn() -> rgm::Result<Outcome>);

fn main() {
    let criteria: [Criterion; 9] = [
        ("likelihood oracle", Some(Duration::from_secs(10)), likelihood_oracle),
        (
            "distribution moments",
            Some(Duration::from_secs(60)),
            distribution_moments,
        ),
        ("geweke joint distribution", Some(Duration::from_secs(300)), geweke),
        ("positive definite covariance", None, positive_definite),
        ("case I desk scale", Some(Duration::from_secs(20 * 60)), case_one),
        ("case III desk scale", Some(Duration::from_secs(30 * 60)), case_three),
        ("baseline sanity", Some(Duration::from_secs(30)), baseline_sanity),
        ("performance p=10", Some(Duration::from_secs(300)), performance),
        ("determinism", None, determinism),
    ];
    let mut passed = 0;
    let mut broken = false;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = run();
        let secs = start.elapsed();
        match result {
            Ok(o) => {
                let in_time = limit.is_none_or(|l| secs <= l);
                let pass = o.pass && in_time;
                passed += pass as usize;
                let time_note = if in_time { "" } else { " runtime over limit;" };
                println!(
                    "criterion {} {name}: {} ({}{time_note} {:.1}s)",
                    i + 1,
                    if pass { "PASS" } else { "FAIL" },
                    o.detail,
                    secs.as_secs_f64()
                );
            }
            Err(e) => {
                broken = true;
                println!("criterion {} {name}: FAIL (error: {e})", i + 1);
            }
        }
    }
    println!("acceptance: {passed}/{} criteria passed", criteria.len());
    if broken {
        std::process::exit(1);
    }
}

fn rng(seed: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(seed)
}

fn normal_matrix<R: Rng>(r: usize, c: usize, sd: f64, rng: &mut R) -> Matrix {
    Matrix::from_fn(r, c, |_, _| sd * standard_normal(rng))
}

fn likelihood_oracle() -> rgm::Result<Outcome> {
    let mut r = rng(101);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let p = r.random_range(1..=4);
        let k = r.random_range(0..=6);
        let l = r.random_range(0..=2);
        let n = r.random_range(p + k + l + 1..=50);
        let mut a = normal_matrix(p, p, 0.3, &mut r);
        a.fill_diagonal(0.0);
        let low = normal_matrix(p, p, 0.5, &mut r);
        let params = ModelParameters {
            a,
            b: normal_matrix(p, k, 1.0, &mut r),
            c: normal_matrix(p, l, 1.0, &mut r),
            sigma_star: &low * low.transpose() + Matrix::identity(p, p) * 0.5,
        };
        let data = RawDataSet::new(
            normal_matrix(n, p, 2.0, &mut r),
            normal_matrix(n, k, 1.0, &mut r),
            normal_matrix(n, l, 1.0, &mut r),
        )?;
        let raw = log_likelihood_raw(&params, &data)?;
        let summary = log_likelihood_summary(&params, &compute_sufficient_stats(&data)?)?;
        worst = worst.max((raw - summary).abs() / raw.abs().max(1.0));
    }
    Ok(check(
        worst <= 1e-8,
        format!("200 instances, max relative gap {worst:.2e}"),
    ))
}

/// `ln K_ν(x)` from `K_ν(x) = ∫₀^∞ exp(-x cosh t) cosh(ν t) dt` by the
/// trapezoid rule in log space.
fn log_bessel_k(nu: f64, x: f64) -> f64 {
    let nu = nu.abs();
    let f = |t: f64| -x * t.cosh() + nu * t + (0.5 * (1.0 + (-2.0 * nu * t).exp())).ln();
    let peak = (nu / x).asinh();
    let top = f(peak);
    let mut end = peak + 1.0;
    while f(end) > top - 60.0 {
        end += 1.0;
    }
    let steps = 200_000;
    let h = end / steps as f64;
    let mut acc = 0.0;
    for i in 0..=steps {
        let w = if i == 0 || i == steps { 0.5 } else { 1.0 };
        acc += w * (f(i as f64 * h) - top).exp();
    }
    top + (acc * h).ln()
}

/// `E[X^r]` under `GIG(p, a, b)`.
fn gig_moment(p: f64, a: f64, b: f64, r: f64) -> f64 {
    let w = (a * b).sqrt();
    ((r / 2.0) * (b / a).ln() + log_bessel_k(p + r, w) - log_bessel_k(p, w)).exp()
}

/// z-scores of the sample first and second moments against exact
/// moments `m1..m4`.
fn moment_z(xs: &[f64], m: [f64; 4]) -> [f64; 2] {
    let n = xs.len() as f64;
    let s1 = xs.iter().sum::<f64>() / n;
    let s2 = xs.iter().map(|x| x * x).sum::<f64>() / n;
    let se1 = ((m[1] - m[0] * m[0]) / n).sqrt();
    let se2 = ((m[3] - m[1] * m[1]) / n).sqrt();
    [(s1 - m[0]) / se1, (s2 - m[1]) / se2]
}

fn distribution_moments() -> rgm::Result<Outcome> {
    const N: usize = 100_000;
    let mut r = rng(202);
    let mut worst: (f64, String) = (0.0, String::new());
    let mut record = |name: String, z: &[f64]| {
        for &v in z {
            if v.abs() > worst.0 || !v.is_finite() {
                worst = (v.abs(), name.clone());
            }
        }
    };

    for (p, a, b) in [
        (-0.5, 1.0, 1.0),
        (2.5, 0.5, 3.0),
        (0.1, 0.01, 0.02),
        (-15.0, 2.0, 100.0),
        (50.0, 20.0, 1.0),
        (-4999.0, 5.0, 5.0e4),
    ] {
        let g = GigParams::new(p, a, b)?;
        let xs: Vec<f64> = (0..N).map(|_| sample_gig(g, &mut r)).collect::<rgm::Result<_>>()?;
        let m = [1.0, 2.0, 3.0, 4.0].map(|k| gig_moment(p, a, b, k));
        record(format!("GIG({p}, {a}, {b})"), &moment_z(&xs, m));
    }

    // Inverse gamma with finite fourth moment, and the shape-1 case used by
    // the sampler through its reciprocal.
    let (al, be) = (6.0, 2.0);
    let xs: Vec<f64> = (0..N)
        .map(|_| sample_inverse_gamma(al, be, &mut r))
        .collect::<rgm::Result<_>>()?;
    let ig = |k: i32| be.powi(k) / (1..=k).map(|i| al - i as f64).product::<f64>();
    record(format!("IG({al}, {be})"), &moment_z(&xs, [ig(1), ig(2), ig(3), ig(4)]));
    let (al, be) = (1.0, 3.0);
    let inv: Vec<f64> = (0..N)
        .map(|_| sample_inverse_gamma(al, be, &mut r).map(|x| 1.0 / x))
        .collect::<rgm::Result<_>>()?;
    let gm = |k: i32| (0..k).map(|i| al + i as f64).product::<f64>() / be.powi(k);
    record(
        format!("1/IG({al}, {be})"),
        &moment_z(&inv, [gm(1), gm(2), gm(3), gm(4)]),
    );

    for (a, b) in [(1.0, 1.0), (2.0, 5.0), (0.5, 0.5)] {
        let xs: Vec<f64> = (0..N).map(|_| sample_beta(a, b, &mut r)).collect::<rgm::Result<_>>()?;
        let bm = |k: i32| (0..k).map(|i| (a + i as f64) / (a + b + i as f64)).product::<f64>();
        record(format!("Beta({a}, {b})"), &moment_z(&xs, [bm(1), bm(2), bm(3), bm(4)]));
    }

    let mean = Matrix::from_row_slice(2, 3, &[1.0, -2.0, 0.5, 0.0, 3.0, -1.0]);
    let row = Matrix::from_row_slice(2, 2, &[2.0, 0.6, 0.6, 1.0]);
    let col = Matrix::from_row_slice(3, 3, &[1.0, 0.3, 0.0, 0.3, 2.0, -0.4, 0.0, -0.4, 0.5]);
    let mn = MatrixNormalParams::new(mean.clone(), row.clone(), col.clone())?;
    let draws: Vec<Matrix> = (0..N)
        .map(|_| sample_matrix_normal(&mn, &mut r))
        .collect::<rgm::Result<_>>()?;
    let idx: Vec<(usize, usize)> = (0..2).flat_map(|i| (0..3).map(move |j| (i, j))).collect();
    for &(i, j) in &idx {
        let xs: Vec<f64> = draws.iter().map(|d| d[(i, j)]).collect();
        let n = xs.len() as f64;
        let m = xs.iter().sum::<f64>() / n;
        let se = (row[(i, i)] * col[(j, j)] / n).sqrt();
        record(format!("MN mean ({i},{j})"), &[(m - mean[(i, j)]) / se]);
    }
    for (s, &(i, j)) in idx.iter().enumerate() {
        for &(k, l) in &idx[s..] {
            let prods: Vec<f64> = draws
                .iter()
                .map(|d| (d[(i, j)] - mean[(i, j)]) * (d[(k, l)] - mean[(k, l)]))
                .collect();
            let n = prods.len() as f64;
            let m = prods.iter().sum::<f64>() / n;
            let v = prods.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (n - 1.0);
            let exact = row[(i, k)] * col[(j, l)];
            record(format!("MN cov ({i},{j})x({k},{l})"), &[(m - exact) / (v / n).sqrt()]);
        }
    }

    Ok(check(
        worst.0 <= 4.0,
        format!("{N} draws per law, largest |z| = {:.2} at {}", worst.0, worst.1),
    ))
}

/// Micro-model for the joint-distribution test: `p = 2`, `k = 2`, `l = 0`,
/// `n = 30` with fixed instruments.
struct Micro {
    hyper: Hyperparameters,
    x: Matrix,
    u: Matrix,
    support: Mask,
}

impl Micro {
    fn new(mode: InstrumentMode) -> Self {
        let mut r = rng(303);
        Micro {
            hyper: Hyperparameters {
                nu1: 0.1,
                nu2: 0.1,
                omega1: 1.0,
                omega2: 0.05,
                lambda: 0.2,
                xi_a: 0.5,
                xi_b: 0.5,
                b_prior_sd: 0.7,
                instrument_mode: mode,
                ..Default::default()
            },
            x: normal_matrix(30, 2, 1.0, &mut r),
            u: Matrix::zeros(30, 0),
            support: Mask::from_fn(2, 2, |i, j| i == j),
        }
    }

    fn half_cauchy_scale<R: Rng>(&self, r: &mut R) -> rgm::Result<f64> {
        let eps = sample_inverse_gamma(0.5, 1.0, r)?;
        sample_inverse_gamma(0.5, 1.0 / eps, r)
    }

    /// Exact draw from the joint prior. The covariance prior is restricted to
    /// positive definite matrices, so its unrestricted product form is
    /// sampled until the draw is positive definite.
    fn prior<R: Rng>(&self, r: &mut R) -> rgm::Result<(ModelParameters, LatentState)> {
        let h = &self.hyper;
        let mut lat = LatentState::initial(2, 2);
        let mut a = Matrix::zeros(2, 2);
        for (j, k) in [(0, 1), (1, 0)] {
            lat.rho[(j, k)] = sample_beta(h.a_rho, h.b_rho, r)?;
            lat.gamma[(j, k)] = r.random::<f64>() < lat.rho[(j, k)];
            lat.tau[(j, k)] = self.half_cauchy_scale(r)?;
            let var = lat.tau[(j, k)] * if lat.gamma[(j, k)] { 1.0 } else { h.nu1 };
            a[(j, k)] = var.sqrt() * standard_normal(r);
        }
        let mut b = Matrix::zeros(2, 2);
        for j in 0..2 {
            for k in 0..2 {
                match h.instrument_mode {
                    InstrumentMode::FixedMap => {
                        if self.support[(j, k)] {
                            b[(j, k)] = h.b_prior_sd * standard_normal(r);
                        }
                        lat.phi[(j, k)] = self.support[(j, k)];
                    }
                    InstrumentMode::Selection => {
                        lat.psi[(j, k)] = sample_beta(h.a_psi, h.b_psi, r)?;
                        lat.phi[(j, k)] = r.random::<f64>() < lat.psi[(j, k)];
                        lat.eta[(j, k)] = self.half_cauchy_scale(r)?;
                        let var = lat.eta[(j, k)] * if lat.phi[(j, k)] { 1.0 } else { h.nu2 };
                        b[(j, k)] = var.sqrt() * standard_normal(r);
                    }
                }
            }
        }
        let sigma_star = loop {
            let z = r.random::<f64>() < h.pi_z;
            let sd = if z { h.omega1 } else { h.omega2 };
            let off = sd * standard_normal(r);
            let rate = h.lambda / 2.0;
            let d0 = -r.random::<f64>().ln() / rate;
            let d1 = -r.random::<f64>().ln() / rate;
            if d0 * d1 > off * off {
                lat.z = Mask::from_fn(2, 2, |i, j| i == j || z);
                break Matrix::from_row_slice(2, 2, &[d0, off, off, d1]);
            }
        };
        let params = ModelParameters {
            a,
            b,
            c: Matrix::zeros(2, 0),
            sigma_star,
        };
        Ok((params, lat))
    }

    fn config(&self, seed: u64) -> McmcConfig {
        McmcConfig {
            iterations: 1,
            burn_in: 0,
            thin: 1,
            seed,
            hyper: self.hyper.clone(),
            fixed_b_support: match self.hyper.instrument_mode {
                InstrumentMode::FixedMap => Some(self.support.clone()),
                InstrumentMode::Selection => None,
            },
            adapt_proposals: false,
            adapt_target: 0.35,
        }
    }

    /// Bounded or light-tailed functions of the parameters.
    fn features(&self, p: &ModelParameters, l: &LatentState) -> Vec<f64> {
        let ind = |b: bool| if b { 1.0 } else { 0.0 };
        let s = &p.sigma_star;
        let mut v = vec![
            p.a[(0, 1)].tanh(),
            p.a[(1, 0)].tanh(),
            ind(l.gamma[(0, 1)]),
            ind(l.gamma[(1, 0)]),
            l.rho[(0, 1)],
            l.tau[(1, 0)].ln().atan(),
            s[(0, 0)].ln().atan(),
            s[(1, 1)].ln().atan(),
            s[(0, 1)] / (s[(0, 0)] * s[(1, 1)]).sqrt(),
            ind(l.z[(0, 1)]),
        ];
        match self.hyper.instrument_mode {
            InstrumentMode::FixedMap => v.extend([p.b[(0, 0)], p.b[(1, 1)]]),
            InstrumentMode::Selection => v.extend([
                p.b[(0, 0)].tanh(),
                p.b[(0, 1)].tanh(),
                ind(l.phi[(0, 0)]),
                ind(l.phi[(1, 0)]),
                l.eta[(1, 1)].ln().atan(),
            ]),
        }
        v
    }
}

/// Largest |z| between marginal-conditional and successive-conditional
/// first and second moments; batch means for the dependent sequence.
fn geweke_run(mode: InstrumentMode, sweeps: usize, seed: u64) -> rgm::Result<f64> {
    let micro = Micro::new(mode);
    let mut r = rng(seed);
    let mut marginal: Vec<Vec<f64>> = Vec::with_capacity(sweeps);
    for _ in 0..sweeps {
        let (p, l) = micro.prior(&mut r)?;
        marginal.push(micro.features(&p, &l));
    }
    let (mut params, mut latent) = micro.prior(&mut r)?;
    let mut successive: Vec<Vec<f64>> = Vec::with_capacity(sweeps);
    for t in 0..sweeps {
        let y = sample_outcomes(&params, &micro.x, &micro.u, &mut r)?;
        let stats = compute_sufficient_stats(&RawDataSet::new(y, micro.x.clone(), micro.u.clone())?)?;
        let cfg = micro.config(derive(seed, t as u64));
        let mut sampler = Sampler::with_state(&stats, &cfg, params, latent)?;
        sampler.step()?;
        params = sampler.state().params.clone();
        latent = sampler.state().latent.clone();
        successive.push(micro.features(&params, &latent));
    }
    let dims = marginal[0].len();
    let batches = 50;
    let size = sweeps / batches;
    let mut worst: f64 = 0.0;
    for d in 0..dims {
        for power in [1, 2] {
            let g = |v: &Vec<f64>| v[d].powi(power);
            let m: Vec<f64> = marginal.iter().map(g).collect();
            let s: Vec<f64> = successive.iter().map(g).collect();
            let n = m.len() as f64;
            let mm = m.iter().sum::<f64>() / n;
            let mv = m.iter().map(|x| (x - mm) * (x - mm)).sum::<f64>() / (n - 1.0);
            let bm: Vec<f64> = s.chunks(size).map(|c| c.iter().sum::<f64>() / c.len() as f64).collect();
            let sm = bm.iter().sum::<f64>() / bm.len() as f64;
            let sv = bm.iter().map(|x| (x - sm) * (x - sm)).sum::<f64>() / (bm.len() as f64 - 1.0);
            let se = (mv / n + sv / bm.len() as f64).sqrt();
            if se > 0.0 {
                worst = worst.max((mm - sm).abs() / se);
            }
        }
    }
    Ok(worst)
}

fn geweke() -> rgm::Result<Outcome> {
    let fixed = geweke_run(InstrumentMode::FixedMap, 50_000, 404)?;
    let selection = geweke_run(InstrumentMode::Selection, 50_000, 405)?;
    Ok(check(
        fixed <= 4.0 && selection <= 4.0,
        format!("50000 sweeps, largest |z| {fixed:.2} (fixed map), {selection:.2} (selection)"),
    ))
}

fn fixed_map_config(truth_support: &Mask, iterations: usize, burn_in: usize, seed: u64) -> McmcConfig {
    McmcConfig {
        iterations,
        burn_in,
        thin: 10,
        seed,
        fixed_b_support: Some(truth_support.clone()),
        ..Default::default()
    }
}

fn positive_definite() -> rgm::Result<Outcome> {
    let truth = gen_truth(&CaseSpec::new(Case::I, 5, 505))?;
    let stats = compute_sufficient_stats(&gen_data(&truth, 2000, 505)?)?;
    let cfg = fixed_map_config(&truth.b_support, 50_000, 10_000, 506);
    let mut lowest = f64::INFINITY;
    let mut bad = 0usize;
    run_chain_observed(&stats, &cfg, |s| {
        let m = min_eigenvalue(&s.params.sigma_star);
        lowest = lowest.min(m);
        bad += (m <= 0.0 || !m.is_finite()) as usize;
    })?;
    Ok(check(
        bad == 0,
        format!("50000 iterations, {bad} non-PD states, smallest eigenvalue {lowest:.3e}"),
    ))
}

fn desk_scale(case: Case) -> rgm::Result<Vec<rgm::benchmark::AggregateRow>> {
    let cfg = BenchmarkConfig::new(case, 5, 10_000, 5, 606 + case as u64);
    let jobs = std::thread::available_parallelism().map_or(1, |n| n.get());
    Ok(aggregate(&run_benchmark(&cfg, Execution::from_jobs(jobs))?))
}

fn metric(rows: &[rgm::benchmark::AggregateRow], method: &str, name: &str) -> f64 {
    find(rows, method, name).map_or(f64::NAN, |r| r.mean)
}

fn case_one() -> rgm::Result<Outcome> {
    let rows = desk_scale(Case::I)?;
    let auc = metric(&rows, "rgm", "graph_auc");
    let mad = metric(&rows, "rgm", "effect_mean_abs_dev");
    let conf = metric(&rows, "rgm", "confounding_auc");
    Ok(check(
        auc >= 0.90 && mad <= 0.03 && conf >= 0.85,
        format!(
            "5 replicates: graph AUC {auc:.3} (need >= 0.90), effect MAD {mad:.4} (need <= 0.03), confounding AUC {conf:.3} (need >= 0.85)"
        ),
    ))
}

fn case_three() -> rgm::Result<Outcome> {
    let rows = desk_scale(Case::III)?;
    let auc = metric(&rows, "rgm-plus", "graph_auc");
    let inst = metric(&rows, "rgm-plus", "instrument_auc");
    Ok(check(
        auc >= 0.90 && inst >= 0.90,
        format!("5 replicates: graph AUC {auc:.3} (need >= 0.90), instrument-selection AUC {inst:.3} (need >= 0.90)"),
    ))
}

fn baseline_sanity() -> rgm::Result<Outcome> {
    let n = 30_000;
    let mut r = rng(707);
    let x = normal_matrix(n, 6, 1.0, &mut r);
    let mut y = Matrix::zeros(n, 2);
    for i in 0..n {
        let u = standard_normal(&mut r);
        let y1 = x[(i, 0)] + x[(i, 1)] + x[(i, 2)] + u + standard_normal(&mut r);
        y[(i, 0)] = y1;
        y[(i, 1)] = 0.1 * y1 + x[(i, 3)] + x[(i, 4)] + x[(i, 5)] + u + standard_normal(&mut r);
    }
    let data = RawDataSet::new(y, x, Matrix::zeros(n, 0))?;
    let stats = compute_sufficient_stats(&data)?;
    let map = Mask::from_fn(2, 6, |j, k| k / 3 == j);
    let ivw = run_baseline(Method::Ivw, &stats, None, &map, 1)?.effect[(1, 0)];
    let tsls = run_baseline(Method::Tsls, &stats, Some(&data), &map, 1)?.effect[(1, 0)];
    let ols = ols_pair(&data, 0, 1)?.effect;
    Ok(check(
        (ivw - 0.1).abs() <= 0.02 && (tsls - 0.1).abs() <= 0.02 && (ols - 0.1).abs() > 0.05,
        format!("IVW {ivw:.4}, 2SLS {tsls:.4}, OLS {ols:.4} against a21 = 0.1"),
    ))
}

fn performance() -> rgm::Result<Outcome> {
    let truth = gen_truth(&CaseSpec::new(Case::I, 10, 808))?;
    let stats = compute_sufficient_stats(&gen_data(&truth, 10_000, 808)?)?;
    let cfg = fixed_map_config(&truth.b_support, 50_000, 10_000, 809);
    let start = Instant::now();
    let chain = run_chain(&stats, &cfg)?;
    let secs = start.elapsed().as_secs_f64();
    Ok(check(
        secs <= 300.0 && chain.samples.len() == cfg.retained(),
        format!("50000 iterations at p=10 in {secs:.1}s (limit 300s)"),
    ))
}

fn determinism() -> rgm::Result<Outcome> {
    let truth = gen_truth(&CaseSpec::new(Case::II, 4, 909))?;
    let stats = compute_sufficient_stats(&gen_data(&truth, 1000, 909)?)?;
    let cfg = fixed_map_config(&truth.b_support, 3000, 1000, 910);
    let (c1, c2) = (run_chain(&stats, &cfg)?, run_chain(&stats, &cfg)?);
    let chains = c1 == c2;
    let to_json = |c: &rgm::mcmc::Chain| {
        serde_json::to_string(&summarize(c, Thresholds::default()).expect("summary")).expect("json")
    };
    let summaries = to_json(&c1) == to_json(&c2);

    let mut bench = BenchmarkConfig::new(Case::III, 4, 800, 4, 911);
    bench.iterations = 1500;
    bench.burn_in = 500;
    bench.baselines = Method::ALL.to_vec();
    let csv = |exec| -> rgm::Result<String> {
        let res = run_benchmark(&bench, exec)?;
        Ok(aggregate_csv(&aggregate(&res)) + &replicate_csv(&res))
    };
    let runs = [
        csv(Execution::Sequential)?,
        csv(Execution::Sequential)?,
        csv(Execution::Parallel(2))?,
        csv(Execution::Parallel(4))?,
    ];
    let tables = runs.iter().all(|t| t == &runs[0]);
    Ok(check(
        chains && summaries && tables,
        format!(
            "chains equal {chains}, summaries equal {summaries}, benchmark CSVs equal across runs and jobs {tables}"
        ),
    ))
}
