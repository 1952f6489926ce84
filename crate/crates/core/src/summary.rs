//! Posterior summaries of a chain.

use serde::{Deserialize, Serialize};

use crate::error::{Result, RgmError};
use crate::io::rows;
use crate::mcmc::{Chain, InstrumentMode, Sample};
use crate::model::{Mask, Matrix};

/// Equal-tailed credible level of the reported intervals.
pub const CREDIBLE_LEVEL: f64 = 0.95;

/// Inclusion-probability cut-offs for `A`, `B`, and the off-diagonal of `Σ*`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Thresholds {
    pub a: f64,
    pub b: f64,
    pub z: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { a: 0.5, b: 0.5, z: 0.5 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    #[serde(with = "rows")]
    pub lower: Matrix,
    #[serde(with = "rows")]
    pub upper: Matrix,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub samples: usize,
    pub mode: InstrumentMode,
    pub thresholds: Thresholds,
    #[serde(with = "rows")]
    pub pip_a: Matrix,
    /// Under a fixed instrument map this is the support itself.
    #[serde(with = "rows")]
    pub pip_b: Matrix,
    #[serde(with = "rows")]
    pub pip_z: Matrix,
    #[serde(with = "rows")]
    pub mean_a: Matrix,
    #[serde(with = "rows")]
    pub mean_b: Matrix,
    #[serde(with = "rows")]
    pub mean_c: Matrix,
    #[serde(with = "rows")]
    pub mean_sigma_star: Matrix,
    #[serde(with = "rows")]
    pub sparse_a: Matrix,
    #[serde(with = "rows")]
    pub sparse_b: Matrix,
    #[serde(with = "rows")]
    pub sparse_sigma_star: Matrix,
    pub ci_a: Interval,
    pub ci_b: Interval,
    pub ci_c: Interval,
    pub ci_sigma_star: Interval,
}

fn mean_of<F: Fn(&Sample) -> Matrix>(samples: &[Sample], f: F) -> Matrix {
    let mut acc = f(&samples[0]);
    for s in &samples[1..] {
        acc += f(s);
    }
    acc / samples.len() as f64
}

fn indicator(m: &Mask) -> Matrix {
    m.map(|b| if b { 1.0 } else { 0.0 })
}

/// Linear-interpolation quantile of sorted values.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

fn interval_of<F: Fn(&Sample) -> &Matrix>(samples: &[Sample], f: F) -> Interval {
    let (r, c) = f(&samples[0]).shape();
    let tail = (1.0 - CREDIBLE_LEVEL) / 2.0;
    let mut lower = Matrix::zeros(r, c);
    let mut upper = Matrix::zeros(r, c);
    let mut buf = Vec::with_capacity(samples.len());
    for i in 0..r {
        for j in 0..c {
            buf.clear();
            buf.extend(samples.iter().map(|s| f(s)[(i, j)]));
            buf.sort_by(f64::total_cmp);
            lower[(i, j)] = quantile(&buf, tail);
            upper[(i, j)] = quantile(&buf, 1.0 - tail);
        }
    }
    Interval { lower, upper }
}

/// `mean ∘ 1[pip ≥ threshold]`.
pub fn sparsify(mean: &Matrix, pip: &Matrix, threshold: f64) -> Matrix {
    mean.zip_map(pip, |m, q| if q >= threshold { m } else { 0.0 })
}

pub fn summarize(chain: &Chain, thresholds: Thresholds) -> Result<FitSummary> {
    summarize_samples(&chain.samples, chain.mode, chain.fixed_b_support.as_ref(), thresholds)
}

/// Summaries from raw samples. `support` supplies `pip_b` in fixed-map mode.
pub fn summarize_samples(
    samples: &[Sample],
    mode: InstrumentMode,
    support: Option<&Mask>,
    thresholds: Thresholds,
) -> Result<FitSummary> {
    if samples.is_empty() {
        return Err(RgmError::Empty("chain has no retained samples".into()));
    }
    for (name, t) in [("a", thresholds.a), ("b", thresholds.b), ("z", thresholds.z)] {
        if !(0.0..=1.0).contains(&t) {
            return Err(RgmError::InvalidParameter(format!(
                "threshold {name} must lie in [0, 1], got {t}"
            )));
        }
    }
    let mut pip_a = mean_of(samples, |s| indicator(&s.gamma));
    pip_a.fill_diagonal(0.0);
    let pip_b = match (mode, support) {
        (InstrumentMode::FixedMap, Some(mask)) => indicator(mask),
        (InstrumentMode::FixedMap, None) => mean_of(samples, |s| s.b.map(|v| if v != 0.0 { 1.0 } else { 0.0 })),
        (InstrumentMode::Selection, _) => mean_of(samples, |s| indicator(&s.phi)),
    };
    let pip_z = mean_of(samples, |s| indicator(&s.z));
    let mean_a = mean_of(samples, |s| s.a.clone());
    let mean_b = mean_of(samples, |s| s.b.clone());
    let mean_c = mean_of(samples, |s| s.c.clone());
    let mean_sigma_star = mean_of(samples, |s| s.sigma_star.clone());
    let mut sparse_a = sparsify(&mean_a, &pip_a, thresholds.a);
    sparse_a.fill_diagonal(0.0);
    let sparse_b = sparsify(&mean_b, &pip_b, thresholds.b);
    let mut sparse_sigma_star = sparsify(&mean_sigma_star, &pip_z, thresholds.z);
    sparse_sigma_star.set_diagonal(&mean_sigma_star.diagonal());
    Ok(FitSummary {
        samples: samples.len(),
        mode,
        thresholds,
        pip_a,
        pip_b,
        pip_z,
        sparse_a,
        sparse_b,
        sparse_sigma_star,
        ci_a: interval_of(samples, |s| &s.a),
        ci_b: interval_of(samples, |s| &s.b),
        ci_c: interval_of(samples, |s| &s.c),
        ci_sigma_star: interval_of(samples, |s| &s.sigma_star),
        mean_a,
        mean_b,
        mean_c,
        mean_sigma_star,
    })
}

/// Total effect of trait 2 on trait 1 in a three-trait system, through the
/// direct path and the path mediated by trait 3, amplified by the 1-3 loop:
/// `(a12 + a13 a32) / |1 - a13 a31|` (0-based indices in `a`).
pub fn total_effect_trivariate(a: &Matrix) -> Result<f64> {
    if a.shape() != (3, 3) {
        return Err(RgmError::dimension("A", (3, 3), a.shape()));
    }
    let denom = (1.0 - a[(0, 2)] * a[(2, 0)]).abs();
    if denom == 0.0 {
        return Err(RgmError::Numerical("1 - a13 a31 is zero".into()));
    }
    Ok((a[(0, 1)] + a[(0, 2)] * a[(2, 1)]) / denom)
}
