use std::f64::consts::PI;

use crate::error::{Result, RgmError};
use crate::linalg;
use crate::model::{Mask, Matrix, ModelParameters, SummaryStatistics};

/// Spike-and-slab indicators and scales for one state of the chain.
///
/// `gamma`, `rho`, `tau` belong to `A`; `phi`, `psi`, `eta` to `B`; `z` marks
/// the non-zero off-diagonal entries of `Σ*` and is symmetric with a unit
/// diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentState {
    pub gamma: Mask,
    pub rho: Matrix,
    pub tau: Matrix,
    pub phi: Mask,
    pub psi: Matrix,
    pub eta: Matrix,
    pub z: Mask,
}

impl LatentState {
    /// All indicators on, `ρ = ψ = 0.5`, `τ = η = 1`.
    pub fn initial(p: usize, k: usize) -> Self {
        LatentState {
            gamma: Mask::from_fn(p, p, |j, h| j != h),
            rho: Matrix::from_element(p, p, 0.5),
            tau: Matrix::from_element(p, p, 1.0),
            phi: Mask::from_element(p, k, true),
            psi: Matrix::from_element(p, k, 0.5),
            eta: Matrix::from_element(p, k, 1.0),
            z: Mask::from_element(p, p, true),
        }
    }
}

/// Cached pieces of the summary likelihood that allow `O(p)` evaluation of a
/// single-entry change in `A` or `B`.
///
/// With `W = [I-A, -B, -C]` and `G` the joint second-moment matrix,
/// `Q = tr(Σ*⁻¹ W G Wᵀ)`. A change `δ` in `W[j, c]` moves `Q` by
/// `2δ (Σ*⁻¹ (W G)[:, c])_j + δ² G[c, c] Σ*⁻¹[j, j]`.
#[derive(Debug, Clone)]
pub(crate) struct LikelihoodCache {
    joint: Matrix,
    /// `G Wᵀ`
    gw: Matrix,
    pub(crate) precision: Matrix,
    log_det_sigma: f64,
    pub(crate) inv_i_minus_a: Matrix,
    log_det_ia: f64,
    quad: f64,
    n: f64,
    p: usize,
}

impl LikelihoodCache {
    pub(crate) fn build(params: &ModelParameters, stats: &SummaryStatistics) -> Result<Self> {
        let d = stats.dims;
        params.check_dims(d.p, d.k, d.l)?;
        let joint = stats.joint();
        let w = weight_matrix(params);
        let gw = &joint * w.transpose();
        let chol = linalg::cholesky(&params.sigma_star)
            .ok_or_else(|| RgmError::Numerical("Sigma_star is not positive definite".into()))?;
        let precision = linalg::symmetrize(&chol.inverse());
        let i_a = params.i_minus_a();
        let log_det_ia = linalg::log_abs_det(&i_a).ok_or_else(|| RgmError::Numerical("I - A is singular".into()))?;
        let inv_i_minus_a = i_a
            .try_inverse()
            .ok_or_else(|| RgmError::Numerical("I - A is singular".into()))?;
        let resid = &w * &gw;
        let quad = linalg::trace_of_product(&precision, &resid);
        Ok(LikelihoodCache {
            joint,
            gw,
            precision,
            log_det_sigma: linalg::chol_log_det(&chol),
            inv_i_minus_a,
            log_det_ia,
            quad,
            n: stats.n(),
            p: d.p,
        })
    }

    pub(crate) fn log_lik(&self) -> f64 {
        -0.5 * self.n * self.p as f64 * (2.0 * PI).ln() - 0.5 * self.n * self.log_det_sigma + self.n * self.log_det_ia
            - 0.5 * self.n * self.quad
    }

    /// Change in `Q` when `W[j, col]` moves by `delta_w`.
    pub(crate) fn delta_quad(&self, j: usize, col: usize, delta_w: f64) -> f64 {
        let v = self.gw.row(col);
        let cross: f64 = (0..self.p).map(|r| self.precision[(j, r)] * v[r]).sum();
        2.0 * delta_w * cross + delta_w * delta_w * self.joint[(col, col)] * self.precision[(j, j)]
    }

    pub(crate) fn apply_w_change(&mut self, j: usize, col: usize, delta_w: f64, delta_quad: f64) {
        let g_col = self.joint.column(col).clone_owned();
        let mut target = self.gw.column_mut(j);
        target.axpy(delta_w, &g_col, 1.0);
        self.quad += delta_quad;
    }

    /// `det(I - A')/det(I - A)` when `a[(j, h)]` moves by `delta_a`.
    pub(crate) fn det_ratio_a(&self, j: usize, h: usize, delta_a: f64) -> f64 {
        1.0 - delta_a * self.inv_i_minus_a[(h, j)]
    }

    /// Sherman–Morrison update after an accepted change of `a[(j, h)]`.
    pub(crate) fn apply_a_change(&mut self, j: usize, h: usize, delta_a: f64, ratio: f64) {
        let col_j = self.inv_i_minus_a.column(j).clone_owned();
        let row_h = self.inv_i_minus_a.row(h).clone_owned();
        self.inv_i_minus_a += (col_j * row_h) * (delta_a / ratio);
        self.log_det_ia += ratio.abs().ln();
    }
}

fn weight_matrix(params: &ModelParameters) -> Matrix {
    let p = params.p();
    let k = params.b.ncols();
    let l = params.c.ncols();
    let mut w = Matrix::zeros(p, p + k + l);
    w.view_mut((0, 0), (p, p)).copy_from(&params.i_minus_a());
    w.view_mut((0, p), (p, k)).copy_from(&(-&params.b));
    w.view_mut((0, p + k), (p, l)).copy_from(&(-&params.c));
    w
}

/// Per-entry random-walk standard deviations and acceptance counters.
#[derive(Debug, Clone)]
pub(crate) struct ProposalScales {
    pub(crate) a_sd: Matrix,
    pub(crate) b_sd: Matrix,
    pub(crate) a_accepted: u64,
    pub(crate) a_proposed: u64,
    pub(crate) b_accepted: u64,
    pub(crate) b_proposed: u64,
    /// Robbins–Monro gain applied to `ln sd` after each proposal; zero
    /// freezes the scales.
    pub(crate) gain: f64,
    pub(crate) target: f64,
}

const MIN_SD: f64 = 1e-6;
const MAX_SD: f64 = 10.0;

impl ProposalScales {
    pub(crate) fn new(p: usize, k: usize, xi_a: f64, xi_b: f64, target: f64) -> Self {
        ProposalScales {
            a_sd: Matrix::from_element(p, p, xi_a.sqrt()),
            b_sd: Matrix::from_element(p, k, xi_b.sqrt()),
            a_accepted: 0,
            a_proposed: 0,
            b_accepted: 0,
            b_proposed: 0,
            gain: 0.0,
            target,
        }
    }

    pub(crate) fn adapt(sd: &mut f64, gain: f64, target: f64, accepted: bool) {
        if gain > 0.0 {
            let signal = if accepted { 1.0 } else { 0.0 } - target;
            *sd = (*sd * (gain * signal).exp()).clamp(MIN_SD, MAX_SD);
        }
    }

    pub(crate) fn reset_counters(&mut self) {
        self.a_accepted = 0;
        self.a_proposed = 0;
        self.b_accepted = 0;
        self.b_proposed = 0;
    }
}

/// One state of the chain: parameters, latent variables, and a cached
/// log-likelihood that always equals `log_likelihood_summary(params, stats)`.
#[derive(Debug, Clone)]
pub struct ChainState {
    pub params: ModelParameters,
    pub latent: LatentState,
    pub log_lik: f64,
    pub iteration: usize,
    pub(crate) cache: LikelihoodCache,
    pub(crate) proposals: ProposalScales,
}

impl ChainState {
    pub(crate) fn new(
        params: ModelParameters,
        latent: LatentState,
        stats: &SummaryStatistics,
        proposals: ProposalScales,
    ) -> Result<Self> {
        let cache = LikelihoodCache::build(&params, stats)?;
        let log_lik = cache.log_lik();
        if !log_lik.is_finite() {
            return Err(RgmError::Numerical(
                "non-finite log-likelihood at initialization".into(),
            ));
        }
        Ok(ChainState {
            params,
            latent,
            log_lik,
            iteration: 0,
            cache,
            proposals,
        })
    }

    /// Recompute every cached quantity from the current parameters.
    pub fn resync(&mut self, stats: &SummaryStatistics) -> Result<()> {
        self.cache = LikelihoodCache::build(&self.params, stats)?;
        self.log_lik = self.cache.log_lik();
        Ok(())
    }

    /// Acceptance rates of the `A` and `B` random-walk steps since the last
    /// counter reset (end of burn-in).
    pub fn acceptance_rates(&self) -> (Option<f64>, Option<f64>) {
        let rate = |acc: u64, prop: u64| (prop > 0).then(|| acc as f64 / prop as f64);
        (
            rate(self.proposals.a_accepted, self.proposals.a_proposed),
            rate(self.proposals.b_accepted, self.proposals.b_proposed),
        )
    }
}
