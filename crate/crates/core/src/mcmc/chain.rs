use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Result, RgmError};
use crate::linalg;
use crate::model::{
    log_likelihood_summary, residual_scatter, Dimensions, Mask, Matrix, ModelParameters, SummaryStatistics,
};

use super::config::{InstrumentMode, McmcConfig};
use super::state::{ChainState, LatentState, ProposalScales};
use super::steps;

/// Ridge added to `S_xx` for the initial instrument regressions.
const INIT_RIDGE: f64 = 1e-3;
/// Interval (in iterations) of the cache coherence check.
const COHERENCE_INTERVAL: usize = 1000;

/// One retained draw.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub iteration: usize,
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
    pub sigma_star: Matrix,
    pub gamma: Mask,
    pub phi: Mask,
    pub z: Mask,
    pub log_lik: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize, serde::Deserialize)]
pub struct AcceptanceRates {
    pub a: Option<f64>,
    pub b: Option<f64>,
}

/// Output of [`run_chain`].
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub dims: Dimensions,
    pub mode: InstrumentMode,
    pub fixed_b_support: Option<Mask>,
    pub samples: Vec<Sample>,
    /// Log-likelihood after every iteration, burn-in included.
    pub log_lik_trace: Vec<f64>,
    /// Post-burn-in acceptance rates of the random-walk steps.
    pub acceptance: AcceptanceRates,
    /// Largest relative gap between the cached and a fresh log-likelihood
    /// seen at the periodic coherence checks.
    pub max_cache_drift: f64,
}

/// Starting point: `A = 0`, `C = 0`, ridge-regressed `B` on the fixed map (zero
/// under selection), and `Σ*` equal to the diagonal of the residual second
/// moments.
pub fn initial_state(stats: &SummaryStatistics, config: &McmcConfig) -> Result<ChainState> {
    let d = stats.dims;
    let mut params = ModelParameters::null(&d);
    if let (InstrumentMode::FixedMap, Some(mask)) = (config.hyper.instrument_mode, &config.fixed_b_support) {
        for j in 0..d.p {
            let cols: Vec<usize> = (0..d.k).filter(|&h| mask[(j, h)]).collect();
            if cols.is_empty() {
                continue;
            }
            let m = cols.len();
            let gram =
                Matrix::from_fn(m, m, |r, c| stats.s_xx[(cols[r], cols[c])]) + Matrix::identity(m, m) * INIT_RIDGE;
            let rhs = nalgebra::DVector::from_fn(m, |r, _| stats.s_yx[(j, cols[r])]);
            let coef = linalg::cholesky(&gram)
                .ok_or_else(|| RgmError::Numerical("initial instrument regression failed".into()))?
                .solve(&rhs);
            for (r, &h) in cols.iter().enumerate() {
                params.b[(j, h)] = coef[r];
            }
        }
    }
    let scatter = residual_scatter(&params, stats, config.hyper.tau_c)?;
    for j in 0..d.p {
        let v = scatter[(j, j)] / stats.n();
        params.sigma_star[(j, j)] = if v > 1e-8 && v.is_finite() { v } else { 1.0 };
    }
    let mut latent = LatentState::initial(d.p, d.k);
    if let Some(mask) = &config.fixed_b_support {
        if config.hyper.instrument_mode == InstrumentMode::FixedMap {
            latent.phi = mask.clone();
        }
    }
    let proposals = ProposalScales::new(d.p, d.k, config.hyper.xi_a, config.hyper.xi_b, config.adapt_target);
    ChainState::new(params, latent, stats, proposals)
}

/// Drives a single chain one sweep at a time.
pub struct Sampler<'a> {
    stats: &'a SummaryStatistics,
    config: &'a McmcConfig,
    state: ChainState,
    rng: ChaCha12Rng,
    max_drift: f64,
}

impl<'a> Sampler<'a> {
    pub fn new(stats: &'a SummaryStatistics, config: &'a McmcConfig) -> Result<Self> {
        config.validate(&stats.dims)?;
        let state = initial_state(stats, config)?;
        Ok(Sampler {
            stats,
            config,
            state,
            rng: ChaCha12Rng::seed_from_u64(config.seed),
            max_drift: 0.0,
        })
    }

    /// Start from a caller-supplied state instead of the default
    /// initialization.
    pub fn with_state(
        stats: &'a SummaryStatistics,
        config: &'a McmcConfig,
        params: ModelParameters,
        latent: LatentState,
    ) -> Result<Self> {
        config.validate(&stats.dims)?;
        let d = stats.dims;
        let proposals = ProposalScales::new(d.p, d.k, config.hyper.xi_a, config.hyper.xi_b, config.adapt_target);
        let state = ChainState::new(params, latent, stats, proposals)?;
        Ok(Sampler {
            stats,
            config,
            state,
            rng: ChaCha12Rng::seed_from_u64(config.seed),
            max_drift: 0.0,
        })
    }

    pub fn state(&self) -> &ChainState {
        &self.state
    }

    pub fn rng(&mut self) -> &mut ChaCha12Rng {
        &mut self.rng
    }

    /// Swap the data the chain conditions on, keeping the current parameters.
    pub fn set_stats(&mut self, stats: &'a SummaryStatistics) -> Result<()> {
        if stats.dims.p != self.stats.dims.p || stats.dims.k != self.stats.dims.k || stats.dims.l != self.stats.dims.l {
            return Err(RgmError::InvalidParameter(
                "replacement statistics change the model size".into(),
            ));
        }
        self.stats = stats;
        self.state.resync(stats)
    }

    pub fn max_cache_drift(&self) -> f64 {
        self.max_drift
    }

    /// Run steps 1-11 once.
    pub fn step(&mut self) -> Result<()> {
        let it = self.state.iteration;
        let hyper = &self.config.hyper;
        let stats = self.stats;
        let rng = &mut self.rng;
        let state = &mut self.state;
        state.proposals.gain = if self.config.adapt_proposals && it < self.config.burn_in {
            ((it + 1) as f64).powf(-0.6)
        } else {
            0.0
        };
        let support = match hyper.instrument_mode {
            InstrumentMode::Selection => {
                steps::update_psi(state, hyper, rng)?;
                steps::update_eta(state, hyper, rng)?;
                steps::update_phi(state, hyper, rng)?;
                None
            }
            InstrumentMode::FixedMap => self.config.fixed_b_support.as_ref(),
        };
        steps::update_b(state, stats, hyper, support, rng)?;
        steps::update_rho(state, hyper, rng)?;
        steps::update_tau(state, hyper, rng)?;
        steps::update_gamma(state, hyper, rng)?;
        steps::update_a(state, stats, hyper, rng)?;
        if (it + 1).is_multiple_of(COHERENCE_INTERVAL) {
            let fresh = log_likelihood_summary(&state.params, stats)?;
            let drift = (fresh - state.log_lik).abs() / fresh.abs().max(1.0);
            self.max_drift = self.max_drift.max(drift);
        }
        steps::update_c(state, stats, hyper, rng)?;
        steps::update_z(state, hyper, rng)?;
        steps::update_sigma_star(state, stats, hyper, rng)?;
        state.iteration = it + 1;
        if state.iteration == self.config.burn_in {
            state.proposals.reset_counters();
        }
        Ok(())
    }

    fn snapshot(&self) -> Sample {
        let s = &self.state;
        Sample {
            iteration: s.iteration,
            a: s.params.a.clone(),
            b: s.params.b.clone(),
            c: s.params.c.clone(),
            sigma_star: s.params.sigma_star.clone(),
            gamma: s.latent.gamma.clone(),
            phi: s.latent.phi.clone(),
            z: s.latent.z.clone(),
            log_lik: s.log_lik,
        }
    }
}

/// Run a full chain and keep thinned post-burn-in samples.
pub fn run_chain(stats: &SummaryStatistics, config: &McmcConfig) -> Result<Chain> {
    run_chain_observed(stats, config, |_| {})
}

/// As [`run_chain`], calling `observer` after every iteration.
pub fn run_chain_observed<F>(stats: &SummaryStatistics, config: &McmcConfig, mut observer: F) -> Result<Chain>
where
    F: FnMut(&ChainState),
{
    let mut sampler = Sampler::new(stats, config)?;
    let mut samples = Vec::with_capacity(config.retained());
    let mut trace = Vec::with_capacity(config.iterations);
    for it in 0..config.iterations {
        sampler.step()?;
        if it >= config.burn_in && (it - config.burn_in).is_multiple_of(config.thin) {
            samples.push(sampler.snapshot());
        }
        trace.push(sampler.state.log_lik);
        observer(&sampler.state);
    }
    let (a, b) = sampler.state.acceptance_rates();
    Ok(Chain {
        dims: stats.dims,
        mode: config.hyper.instrument_mode,
        fixed_b_support: config.fixed_b_support.clone(),
        samples,
        log_lik_trace: trace,
        acceptance: AcceptanceRates { a, b },
        max_cache_drift: sampler.max_drift,
    })
}
