//! Classical two-sample style Mendelian randomization estimators, applied to
//! every ordered pair of traits.
//!
//! All estimators target the total effect of the exposure on the outcome.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::distributions::standard_normal;
use crate::error::{Result, RgmError};
use crate::linalg;
use crate::model::{Mask, Matrix, RawDataSet, SummaryStatistics};

/// Exposure associations smaller than this are treated as zero.
const MIN_EXPOSURE_EFFECT: f64 = 1e-10;
/// First-stage F below this marks a weak instrument set.
pub const WEAK_INSTRUMENT_F: f64 = 10.0;
const BOOTSTRAP_DRAWS: usize = 500;

/// Per-instrument marginal regressions of each trait, without intercept.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionSummary {
    /// `k x p`: `r[(g, j)]` is the coefficient of `Y_j` on `X_g`.
    pub r: Matrix,
    pub se: Matrix,
}

pub fn regression_summary(stats: &SummaryStatistics) -> Result<RegressionSummary> {
    let d = stats.dims;
    if d.n < 3 {
        return Err(RgmError::InvalidParameter("marginal regressions need n >= 3".into()));
    }
    let n = stats.n();
    let mut r = Matrix::zeros(d.k, d.p);
    let mut se = Matrix::zeros(d.k, d.p);
    for g in 0..d.k {
        let sxx = stats.s_xx[(g, g)];
        if sxx <= 0.0 {
            return Err(RgmError::InvalidParameter(format!("instrument {g} has zero variance")));
        }
        for j in 0..d.p {
            let coef = stats.s_yx[(j, g)] / sxx;
            let resid = (stats.s_yy[(j, j)] - coef * stats.s_yx[(j, g)]).max(0.0) * n / (n - 1.0);
            r[(g, j)] = coef;
            se[(g, j)] = (resid / (n * sxx)).sqrt().max(f64::MIN_POSITIVE);
        }
    }
    Ok(RegressionSummary { r, se })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub effect: f64,
    pub se: f64,
}

impl Estimate {
    pub fn t_stat(&self) -> f64 {
        self.effect / self.se
    }

    /// Two-sided normal p-value.
    pub fn p_value(&self) -> f64 {
        erfc(self.t_stat().abs() / std::f64::consts::SQRT_2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RatioEstimate {
    pub instrument: usize,
    pub ratio: f64,
    /// First-order delta-method standard error.
    pub se: f64,
    /// `|r_exposure| / se_exposure` of the instrument.
    pub strength: f64,
}

/// `r[outcome, g] / r[exposure, g]` for each instrument `g` in `instruments`.
pub fn ratio_estimates(
    reg: &RegressionSummary,
    exposure: usize,
    outcome: usize,
    instruments: &[usize],
) -> Vec<RatioEstimate> {
    let mut out = Vec::with_capacity(instruments.len());
    for &g in instruments {
        let (rx, sx) = (reg.r[(g, exposure)], reg.se[(g, exposure)]);
        let (ry, sy) = (reg.r[(g, outcome)], reg.se[(g, outcome)]);
        if rx.abs() < MIN_EXPOSURE_EFFECT || !rx.is_finite() {
            log::warn!("instrument {g} has no association with exposure {exposure}; skipped");
            continue;
        }
        let ratio = ry / rx;
        let se = ((sy / rx).powi(2) + (ry * sx / (rx * rx)).powi(2)).sqrt();
        out.push(RatioEstimate {
            instrument: g,
            ratio,
            se,
            strength: rx.abs() / sx,
        });
    }
    out
}

/// Inverse-variance weighted mean of ratio estimates.
pub fn ivw(ratios: &[f64], ses: &[f64]) -> Result<Estimate> {
    check_pairs(ratios, ses)?;
    if let ([r], [s]) = (ratios, ses) {
        return Ok(Estimate { effect: *r, se: *s });
    }
    let w: Vec<f64> = ses.iter().map(|s| 1.0 / (s * s)).collect();
    let total: f64 = w.iter().sum();
    let effect = ratios.iter().zip(&w).map(|(r, w)| r * w).sum::<f64>() / total;
    Ok(Estimate {
        effect,
        se: total.powf(-0.5),
    })
}

fn check_pairs(values: &[f64], other: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(RgmError::Empty("no ratio estimates".into()));
    }
    if values.len() != other.len() {
        return Err(RgmError::InvalidParameter("ratio and weight lengths differ".into()));
    }
    if other.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(RgmError::InvalidParameter(
            "standard errors and weights must be positive".into(),
        ));
    }
    Ok(())
}

pub fn simple_median(ratios: &[f64]) -> Result<f64> {
    if ratios.is_empty() {
        return Err(RgmError::Empty("no ratio estimates".into()));
    }
    let mut v = ratios.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len();
    Ok(if m % 2 == 1 {
        v[m / 2]
    } else {
        0.5 * (v[m / 2 - 1] + v[m / 2])
    })
}

/// First order statistic whose cumulative normalized weight reaches one
/// half, interpolating linearly from the previous order statistic.
pub fn weighted_median(ratios: &[f64], weights: &[f64]) -> Result<f64> {
    check_pairs(ratios, weights)?;
    let mut idx: Vec<usize> = (0..ratios.len()).collect();
    idx.sort_by(|&a, &b| ratios[a].total_cmp(&ratios[b]));
    let total: f64 = weights.iter().sum();
    let mut cum = 0.0;
    let mut prev: Option<(f64, f64)> = None;
    for &i in &idx {
        let next = cum + weights[i] / total;
        if next >= 0.5 {
            return Ok(match prev {
                None => ratios[i],
                Some((c0, r0)) => r0 + (0.5 - c0) / (next - c0) * (ratios[i] - r0),
            });
        }
        cum = next;
        prev = Some((cum, ratios[i]));
    }
    Ok(ratios[*idx.last().expect("non-empty")])
}

/// Parametric bootstrap standard error of a median-type estimator: each
/// ratio is redrawn from `N(ratio, se^2)`.
fn bootstrap_se<F: Fn(&[f64]) -> Result<f64>>(est: &[RatioEstimate], seed: u64, f: F) -> Result<f64> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut draws = Vec::with_capacity(BOOTSTRAP_DRAWS);
    let mut buf = vec![0.0; est.len()];
    for _ in 0..BOOTSTRAP_DRAWS {
        for (b, e) in buf.iter_mut().zip(est) {
            *b = e.ratio + e.se * standard_normal(&mut rng);
        }
        draws.push(f(&buf)?);
    }
    let mean = draws.iter().sum::<f64>() / draws.len() as f64;
    let var = draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (draws.len() - 1) as f64;
    Ok(var.sqrt().max(f64::MIN_POSITIVE))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TslsEstimate {
    pub effect: f64,
    pub se: f64,
    pub first_stage_f: f64,
}

fn centered(v: nalgebra::DVectorView<'_, f64>) -> nalgebra::DVector<f64> {
    let m = v.mean();
    v.map(|x| x - m)
}

/// Two-stage least squares of `outcome` on `exposure` with the given
/// instrument columns of `X`; intercepts are included in both stages.
pub fn tsls_pair(data: &RawDataSet, exposure: usize, outcome: usize, instruments: &[usize]) -> Result<TslsEstimate> {
    let n = data.y.nrows();
    let m = instruments.len();
    if m == 0 {
        return Err(RgmError::Empty(
            "two-stage least squares needs at least one instrument".into(),
        ));
    }
    if n <= m + 2 {
        return Err(RgmError::InvalidParameter(format!(
            "n = {n} too small for {m} instruments"
        )));
    }
    let z = Matrix::from_fn(n, m, |i, c| data.x[(i, instruments[c])]);
    let zc = Matrix::from_columns(&(0..m).map(|c| centered(z.column(c))).collect::<Vec<_>>());
    let x = centered(data.y.column(exposure));
    let y = centered(data.y.column(outcome));
    let gram = zc.transpose() * &zc;
    let coef = linalg::cholesky(&gram)
        .ok_or_else(|| RgmError::Numerical("instrument matrix is rank deficient".into()))?
        .solve(&(zc.transpose() * &x));
    let fitted = &zc * coef;
    let ss_fit = fitted.norm_squared();
    let ss_tot = x.norm_squared();
    let ss_res = (ss_tot - ss_fit).max(0.0);
    let first_stage_f = if ss_res > 0.0 {
        (ss_fit / m as f64) / (ss_res / (n - m - 1) as f64)
    } else {
        f64::INFINITY
    };
    if first_stage_f < WEAK_INSTRUMENT_F {
        log::warn!("weak instruments for exposure {exposure}: first-stage F = {first_stage_f:.2}");
    }
    if ss_fit <= 0.0 {
        return Err(RgmError::Numerical("instruments do not predict the exposure".into()));
    }
    let effect = fitted.dot(&y) / ss_fit;
    let resid = &y - &x * effect;
    let sigma2 = resid.norm_squared() / (n - 2) as f64;
    Ok(TslsEstimate {
        effect,
        se: (sigma2 / ss_fit).sqrt(),
        first_stage_f,
    })
}

/// Ordinary least squares of `outcome` on `exposure` with intercept.
pub fn ols_pair(data: &RawDataSet, exposure: usize, outcome: usize) -> Result<Estimate> {
    let n = data.y.nrows();
    if n < 3 {
        return Err(RgmError::InvalidParameter("OLS needs n >= 3".into()));
    }
    let x = centered(data.y.column(exposure));
    let y = centered(data.y.column(outcome));
    let sxx = x.norm_squared();
    if sxx == 0.0 {
        return Err(RgmError::Numerical("exposure has zero variance".into()));
    }
    let effect = x.dot(&y) / sxx;
    let sigma2 = (&y - &x * effect).norm_squared() / (n - 2) as f64;
    Ok(Estimate {
        effect,
        se: (sigma2 / sxx).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Ratio from the single strongest instrument of the exposure.
    Ratio,
    Ivw,
    Median,
    #[serde(rename = "wmedian")]
    WeightedMedian,
    Tsls,
}

impl Method {
    pub const ALL: [Method; 5] = [
        Method::Ratio,
        Method::Ivw,
        Method::Median,
        Method::WeightedMedian,
        Method::Tsls,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Method::Ratio => "ratio",
            Method::Ivw => "ivw",
            Method::Median => "median",
            Method::WeightedMedian => "wmedian",
            Method::Tsls => "tsls",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = RgmError;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| RgmError::InvalidParameter(format!("unknown baseline method '{s}'")))
    }
}

/// Pairwise estimates; entry `(j, h)` is the effect of trait `h` on trait `j`.
/// Diagonals are zero, and pairs without usable instruments get effect 0
/// with p-value 1.
#[derive(Debug, Clone, PartialEq)]
pub struct BaselineResult {
    pub method: Method,
    pub effect: Matrix,
    pub se: Matrix,
    /// `|effect| / se`.
    pub score: Matrix,
    pub pvalue: Matrix,
}

impl BaselineResult {
    /// Edges called at the given significance level.
    pub fn calls(&self, alpha: f64) -> Mask {
        Mask::from_fn(self.pvalue.nrows(), self.pvalue.ncols(), |j, h| {
            j != h && self.pvalue[(j, h)] < alpha
        })
    }
}

/// Run one estimator over all ordered trait pairs. `map` is the `p x k`
/// instrument assignment; two-stage least squares needs `data`.
pub fn run_baseline(
    method: Method,
    stats: &SummaryStatistics,
    data: Option<&RawDataSet>,
    map: &Mask,
    seed: u64,
) -> Result<BaselineResult> {
    let d = stats.dims;
    if map.shape() != (d.p, d.k) {
        return Err(RgmError::dimension("instrument map", (d.p, d.k), map.shape()));
    }
    let reg = regression_summary(stats)?;
    let mut effect = Matrix::zeros(d.p, d.p);
    let mut se = Matrix::from_element(d.p, d.p, f64::INFINITY);
    for h in 0..d.p {
        let instruments: Vec<usize> = (0..d.k).filter(|&g| map[(h, g)]).collect();
        for j in 0..d.p {
            if j == h {
                continue;
            }
            let est = ratio_estimates(&reg, h, j, &instruments);
            let pair_seed = crate::seed::derive(seed, (h * d.p + j) as u64);
            let e = match method {
                Method::Tsls => {
                    let data = data.ok_or_else(|| {
                        RgmError::InvalidParameter("two-stage least squares needs individual-level data".into())
                    })?;
                    if instruments.is_empty() {
                        None
                    } else {
                        let t = tsls_pair(data, h, j, &instruments)?;
                        Some(Estimate {
                            effect: t.effect,
                            se: t.se,
                        })
                    }
                }
                _ if est.is_empty() => None,
                Method::Ratio => {
                    let best = est
                        .iter()
                        .max_by(|a, b| a.strength.total_cmp(&b.strength))
                        .expect("non-empty");
                    Some(Estimate {
                        effect: best.ratio,
                        se: best.se,
                    })
                }
                Method::Ivw => {
                    let (r, s): (Vec<f64>, Vec<f64>) = est.iter().map(|e| (e.ratio, e.se)).unzip();
                    Some(ivw(&r, &s)?)
                }
                Method::Median => {
                    let r: Vec<f64> = est.iter().map(|e| e.ratio).collect();
                    Some(Estimate {
                        effect: simple_median(&r)?,
                        se: bootstrap_se(&est, pair_seed, simple_median)?,
                    })
                }
                Method::WeightedMedian => {
                    let r: Vec<f64> = est.iter().map(|e| e.ratio).collect();
                    let w: Vec<f64> = est.iter().map(|e| e.se.powi(-2)).collect();
                    Some(Estimate {
                        effect: weighted_median(&r, &w)?,
                        se: bootstrap_se(&est, pair_seed, |b| weighted_median(b, &w))?,
                    })
                }
            };
            if let Some(e) = e {
                effect[(j, h)] = e.effect;
                se[(j, h)] = e.se;
            }
        }
    }
    let score = Matrix::from_fn(d.p, d.p, |j, h| {
        if j == h {
            0.0
        } else {
            (effect[(j, h)] / se[(j, h)]).abs()
        }
    });
    let pvalue = Matrix::from_fn(d.p, d.p, |j, h| {
        if j == h {
            1.0
        } else {
            Estimate {
                effect: effect[(j, h)],
                se: se[(j, h)],
            }
            .p_value()
        }
    });
    se.fill_diagonal(0.0);
    Ok(BaselineResult {
        method,
        effect,
        se,
        score,
        pvalue,
    })
}
