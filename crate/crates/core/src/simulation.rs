//! Synthetic cyclic networks and data sets.

use rand::seq::index::sample as sample_indices;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::distributions::standard_normal;
use crate::error::{Result, RgmError};
use crate::linalg;
use crate::model::{Mask, Matrix, ModelParameters, RawDataSet};
use crate::seed::{stream, Stream};

/// Instruments dedicated to each trait.
pub const INSTRUMENTS_PER_TRAIT: usize = 3;
/// Half-width of the uniform distribution of the causal effects.
pub const EFFECT_RANGE: f64 = 0.1;
/// Diagonal of the independent noise covariance.
pub const NOISE_VARIANCE: f64 = 9.0;
const MAX_GRAPH_DRAWS: usize = 1000;
const MAX_EFFECT_DRAWS: usize = 1000;
const MIN_ABS_DET: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Case {
    /// Scale-free network.
    I,
    /// Small-world network.
    II,
    /// Small-world network with one instrument shared by each consecutive
    /// trait pair.
    III,
}

impl std::str::FromStr for Case {
    type Err = RgmError;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "I" | "1" => Ok(Case::I),
            "II" | "2" => Ok(Case::II),
            "III" | "3" => Ok(Case::III),
            _ => Err(RgmError::InvalidParameter(format!(
                "unknown case '{s}', expected I, II or III"
            ))),
        }
    }
}

impl std::fmt::Display for Case {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Case::I => "I",
            Case::II => "II",
            Case::III => "III",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CaseSpec {
    pub case: Case,
    pub p: usize,
    pub seed: u64,
    /// Number of latent confounders; `None` means `ceil(p / 2)`.
    #[serde(default)]
    pub t: Option<usize>,
    /// Probability that an oriented edge also gets its reverse.
    #[serde(default = "default_reciprocal")]
    pub reciprocal_prob: f64,
}

fn default_reciprocal() -> f64 {
    0.2
}

impl CaseSpec {
    pub fn new(case: Case, p: usize, seed: u64) -> Self {
        CaseSpec {
            case,
            p,
            seed,
            t: None,
            reciprocal_prob: default_reciprocal(),
        }
    }

    pub fn confounders(&self) -> usize {
        self.t.unwrap_or(self.p.div_ceil(2))
    }

    pub fn instruments(&self) -> usize {
        INSTRUMENTS_PER_TRAIT * self.p + if self.case == Case::III { self.p - 1 } else { 0 }
    }

    fn validate(&self) -> Result<()> {
        if self.p < 2 {
            return Err(RgmError::InvalidParameter(format!("need p >= 2, got {}", self.p)));
        }
        if !(0.0..=1.0).contains(&self.reciprocal_prob) {
            return Err(RgmError::InvalidParameter("reciprocal_prob must lie in [0, 1]".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTruth {
    pub case: Case,
    pub a_true: Matrix,
    pub b_support: Mask,
    pub b_true: Matrix,
    /// `p x t` confounder loadings.
    pub d: Matrix,
    pub sigma_noise: Matrix,
    pub graph_truth: Mask,
    pub confounding_truth: Mask,
    /// Instrument map handed to methods that need one instrument per
    /// exposure: shared instruments go to one of their two traits at random.
    pub baseline_map: Mask,
}

impl SimulationTruth {
    pub fn p(&self) -> usize {
        self.a_true.nrows()
    }

    pub fn k(&self) -> usize {
        self.b_true.ncols()
    }

    /// `Σ* = D Dᵀ + Σ`.
    pub fn sigma_star(&self) -> Matrix {
        &self.d * self.d.transpose() + &self.sigma_noise
    }

    /// The data-generating process with confounders marginalized into `Σ*`.
    pub fn params(&self) -> ModelParameters {
        ModelParameters {
            a: self.a_true.clone(),
            b: self.b_true.clone(),
            c: Matrix::zeros(self.p(), 0),
            sigma_star: self.sigma_star(),
        }
    }
}

fn undirected_scale_free<R: Rng + ?Sized>(p: usize, rng: &mut R) -> Vec<(usize, usize)> {
    // Preferential attachment, one edge per new node.
    let mut edges = vec![(0, 1)];
    let mut ends = vec![0, 1];
    for v in 2..p {
        let target = ends[rng.random_range(0..ends.len())];
        edges.push((target, v));
        ends.push(target);
        ends.push(v);
    }
    edges
}

fn undirected_small_world<R: Rng + ?Sized>(p: usize, rewire: f64, rng: &mut R) -> Vec<(usize, usize)> {
    let mut adj = vec![vec![false; p]; p];
    let ring: Vec<(usize, usize)> = if p == 2 {
        vec![(0, 1)]
    } else {
        (0..p).map(|i| (i, (i + 1) % p)).collect()
    };
    for &(i, j) in &ring {
        adj[i][j] = true;
        adj[j][i] = true;
    }
    for &(i, j) in &ring {
        if rng.random::<f64>() < rewire {
            let free: Vec<usize> = (0..p).filter(|&m| m != i && !adj[i][m]).collect();
            if free.is_empty() {
                continue;
            }
            let m = free[rng.random_range(0..free.len())];
            adj[i][j] = false;
            adj[j][i] = false;
            adj[i][m] = true;
            adj[m][i] = true;
        }
    }
    (0..p)
        .flat_map(|i| (i + 1..p).map(move |j| (i, j)))
        .filter(|&(i, j)| adj[i][j])
        .collect()
}

fn has_two_cycle(g: &Mask) -> bool {
    let p = g.nrows();
    (0..p).any(|i| (i + 1..p).any(|j| g[(i, j)] && g[(j, i)]))
}

/// Directed adjacency (`g[(j, h)]` is the edge `h -> j`) with at least one
/// reciprocal pair.
pub fn gen_graph<R: Rng + ?Sized>(case: Case, p: usize, reciprocal_prob: f64, rng: &mut R) -> Result<Mask> {
    if p < 2 {
        return Err(RgmError::InvalidParameter(format!("need p >= 2, got {p}")));
    }
    let mut last = None;
    for _ in 0..MAX_GRAPH_DRAWS {
        let skeleton = match case {
            Case::I => undirected_scale_free(p, rng),
            Case::II | Case::III => undirected_small_world(p, 0.1, rng),
        };
        let mut g = Mask::from_element(p, p, false);
        for &(u, v) in &skeleton {
            let (from, to) = if rng.random::<bool>() { (u, v) } else { (v, u) };
            g[(to, from)] = true;
            if rng.random::<f64>() < reciprocal_prob {
                g[(from, to)] = true;
            }
        }
        if has_two_cycle(&g) {
            return Ok(g);
        }
        last = Some((g, skeleton));
    }
    let (mut g, skeleton) = last.expect("at least one draw");
    let (u, v) = skeleton[rng.random_range(0..skeleton.len())];
    g[(u, v)] = true;
    g[(v, u)] = true;
    Ok(g)
}

/// Spectral radius from Gelfand's formula `lim ||A^m||^(1/m)` with
/// `m = 2^30`, by normalized repeated squaring. Slightly above the true value
/// for defective matrices, never below.
pub fn spectral_radius(a: &Matrix) -> f64 {
    let mut b = a.clone();
    let mut log_norm = 0.0;
    for i in 0..30 {
        let nrm = b.norm();
        if nrm == 0.0 {
            return 0.0;
        }
        b /= nrm;
        log_norm = if i == 0 { nrm.ln() } else { 2.0 * log_norm + nrm.ln() };
        b = &b * &b;
    }
    let nrm = b.norm();
    if nrm == 0.0 {
        return 0.0;
    }
    ((2.0 * log_norm + nrm.ln()) / (1u64 << 30) as f64).exp()
}

pub fn gen_truth(spec: &CaseSpec) -> Result<SimulationTruth> {
    spec.validate()?;
    let p = spec.p;
    let mut graph_rng = ChaCha12Rng::seed_from_u64(stream(spec.seed, Stream::Graph));
    let graph = gen_graph(spec.case, p, spec.reciprocal_prob, &mut graph_rng)?;
    let mut rng = ChaCha12Rng::seed_from_u64(stream(spec.seed, Stream::Truth));

    let mut a_true = None;
    for _ in 0..MAX_EFFECT_DRAWS {
        let a = graph.map(|on| {
            if on {
                rng.random_range(-EFFECT_RANGE..=EFFECT_RANGE)
            } else {
                0.0
            }
        });
        let det = (Matrix::identity(p, p) - &a).determinant().abs();
        if det > MIN_ABS_DET && spectral_radius(&a) < 1.0 {
            a_true = Some(a);
            break;
        }
    }
    let a_true = a_true.ok_or_else(|| RgmError::Numerical("could not draw a stable effect matrix".into()))?;

    let k = spec.instruments();
    let mut b_support = Mask::from_element(p, k, false);
    for j in 0..p {
        for g in 0..INSTRUMENTS_PER_TRAIT {
            b_support[(j, INSTRUMENTS_PER_TRAIT * j + g)] = true;
        }
    }
    let mut baseline_map = b_support.clone();
    if spec.case == Case::III {
        for j in 0..p - 1 {
            let col = INSTRUMENTS_PER_TRAIT * p + j;
            b_support[(j, col)] = true;
            b_support[(j + 1, col)] = true;
            baseline_map[(if rng.random::<bool>() { j } else { j + 1 }, col)] = true;
        }
    }
    let b_true = b_support.map(|on| if on { 1.0 } else { 0.0 });

    let t = spec.confounders();
    let mut d = Matrix::zeros(p, t);
    for c in 0..t {
        let size = rng.random_range(2..=3).min(p);
        for j in sample_indices(&mut rng, p, size) {
            d[(j, c)] = if rng.random::<bool>() { 1.0 } else { -1.0 };
        }
    }
    let sigma_noise = Matrix::identity(p, p) * NOISE_VARIANCE;
    let confounding_truth = confounding_truth(&d, &sigma_noise)?;
    Ok(SimulationTruth {
        case: spec.case,
        graph_truth: graph,
        a_true,
        b_support,
        b_true,
        d,
        sigma_noise,
        confounding_truth,
        baseline_map,
    })
}

/// Off-diagonal confounding edges: `|Σ*_true|` off the diagonal, min-max
/// normalized, thresholded strictly above its mean. When all values coincide
/// they are edges iff the common value is positive.
pub fn confounding_truth(d: &Matrix, sigma_noise: &Matrix) -> Result<Mask> {
    let p = d.nrows();
    if sigma_noise.shape() != (p, p) {
        return Err(RgmError::dimension("Sigma_noise", (p, p), sigma_noise.shape()));
    }
    let sigma = d * d.transpose() + sigma_noise;
    let mut out = Mask::from_element(p, p, false);
    let vals: Vec<f64> = (0..p)
        .flat_map(|i| (i + 1..p).map(move |j| (i, j)))
        .map(|(i, j)| sigma[(i, j)].abs())
        .collect();
    if vals.is_empty() {
        return Ok(out);
    }
    let lo = vals.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut idx = 0;
    for i in 0..p {
        for j in i + 1..p {
            let v = vals[idx];
            idx += 1;
            let edge = if hi > lo {
                let mean = vals.iter().map(|x| (x - lo) / (hi - lo)).sum::<f64>() / vals.len() as f64;
                (v - lo) / (hi - lo) > mean
            } else {
                hi > 0.0
            };
            out[(i, j)] = edge;
            out[(j, i)] = edge;
        }
    }
    Ok(out)
}

fn gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| standard_normal(rng))
}

/// Individual-level data: `X`, confounders `W`, noise `E` independent with
/// standard normal `X` and `W`, then `Y` from the reduced form.
pub fn gen_data(truth: &SimulationTruth, n: usize, seed: u64) -> Result<RawDataSet> {
    if n == 0 {
        return Err(RgmError::InvalidParameter("n must be positive".into()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(stream(seed, Stream::Data));
    let p = truth.p();
    let x = gaussian(n, truth.k(), &mut rng);
    let w = gaussian(n, truth.d.ncols(), &mut rng);
    let noise_root = linalg::cholesky(&truth.sigma_noise)
        .ok_or_else(|| RgmError::InvalidParameter("Sigma_noise is not positive definite".into()))?
        .l();
    let e = gaussian(n, p, &mut rng) * noise_root.transpose();
    let structural = &x * truth.b_true.transpose() + &w * truth.d.transpose() + e;
    let y = solve_reduced_form(&truth.a_true, structural)?;
    RawDataSet::new(y, x, Matrix::zeros(n, 0))
}

/// Rows `y` of the result solve `(I - A) y = s` for the rows `s` of `structural`.
fn solve_reduced_form(a: &Matrix, structural: Matrix) -> Result<Matrix> {
    let p = a.nrows();
    let lu = (Matrix::identity(p, p) - a).lu();
    let inv_t = lu
        .try_inverse()
        .ok_or_else(|| RgmError::Numerical("I - A is singular".into()))?
        .transpose();
    Ok(structural * inv_t)
}

/// Outcomes drawn from the model given `X`, `U` and parameters, with
/// `E* ~ N(0, Σ*)`.
pub fn sample_outcomes<R: Rng + ?Sized>(
    params: &ModelParameters,
    x: &Matrix,
    u: &Matrix,
    rng: &mut R,
) -> Result<Matrix> {
    let p = params.p();
    params.check_dims(p, x.ncols(), u.ncols())?;
    let root = linalg::cholesky(&params.sigma_star)
        .ok_or_else(|| RgmError::InvalidParameter("Sigma_star is not positive definite".into()))?
        .l();
    let e = gaussian(x.nrows(), p, rng) * root.transpose();
    let structural = x * params.b.transpose() + u * params.c.transpose() + e;
    solve_reduced_form(&params.a, structural)
}

/// Total effects `T[j, h] = [(I-A)⁻¹]_{jh} / [(I-A)⁻¹]_{hh}`: the change in
/// `Y_j` per unit change of `Y_h` induced by an instrument acting on `h` only.
/// The diagonal is zero.
pub fn total_effects(a: &Matrix) -> Result<Matrix> {
    let p = a.nrows();
    let inv = linalg::inverse(&(Matrix::identity(p, p) - a))
        .ok_or_else(|| RgmError::Numerical("I - A is singular".into()))?;
    Ok(Matrix::from_fn(p, p, |j, h| {
        if j == h {
            0.0
        } else {
            inv[(j, h)] / inv[(h, h)]
        }
    }))
}
