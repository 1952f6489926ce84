//! The eleven updates of one sweep, in sweep order.
//!
//! Steps 1-3 and 5-7 are Gibbs updates of the spike-and-slab hierarchy on
//! `B` and `A`; steps 4 and 8 are single-site random-walk Metropolis-Hastings
//! on the entries of `B` and `A`; step 9 draws `C` from its matrix-normal full
//! conditional; step 10 resamples the confounding indicators; step 11 is the
//! column-wise blocked Gibbs update of `Σ*`. Entries are visited row-major.

use nalgebra::DVector;
use rand::Rng;

use crate::distributions::{
    sample_bernoulli, sample_beta, sample_gig, sample_inverse_gamma, sample_matrix_normal, standard_normal, GigParams,
    MatrixNormalParams,
};
use crate::error::{Result, RgmError};
use crate::linalg;
use crate::model::{residual_scatter, Mask, Matrix, SummaryStatistics};

use super::config::Hyperparameters;
use super::state::{ChainState, ProposalScales};

/// Floor applied to the GIG `1/x` rate in the covariance update.
pub const GIG_RATE_FLOOR: f64 = 1e-12;

/// Logistic of `log_slab - log_spike`.
fn inclusion_probability(log_slab: f64, log_spike: f64) -> f64 {
    let d = log_spike - log_slab;
    if d > 0.0 {
        let e = (-d).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + d.exp())
    }
}

/// `p_φ` (or `p_γ`): posterior odds of the slab `N(0, scale)` against the
/// spike `N(0, ν·scale)` for a coefficient `value` with prior weight `prior`.
pub fn slab_probability(value: f64, scale: f64, prior: f64, nu: f64) -> f64 {
    if prior >= 1.0 {
        return 1.0;
    }
    if prior <= 0.0 {
        return 0.0;
    }
    let sq = value * value;
    let log_slab = -sq / (2.0 * scale) + prior.ln();
    let log_spike = -sq / (2.0 * nu * scale) + (1.0 - prior).ln() - 0.5 * nu.ln();
    inclusion_probability(log_slab, log_spike)
}

/// `p_z`: slab `N(0, ω₁²)` against spike `N(0, ω₂²)` for an off-diagonal
/// covariance entry.
pub fn confounding_probability(sigma: f64, hyper: &Hyperparameters) -> f64 {
    let pi = hyper.pi_z;
    if pi >= 1.0 {
        return 1.0;
    }
    if pi <= 0.0 {
        return 0.0;
    }
    let sq = sigma * sigma;
    let (w1, w2) = (hyper.omega1, hyper.omega2);
    let log_slab = -w1.ln() - sq / (2.0 * w1 * w1) + pi.ln();
    let log_spike = -w2.ln() - sq / (2.0 * w2 * w2) + (1.0 - pi).ln();
    inclusion_probability(log_slab, log_spike)
}

/// Step 1: `ψ_jh ~ Beta(φ_jh + a_ψ, 1 - φ_jh + b_ψ)`.
pub fn update_psi<R: Rng + ?Sized>(state: &mut ChainState, hyper: &Hyperparameters, rng: &mut R) -> Result<()> {
    let lat = &mut state.latent;
    for j in 0..lat.psi.nrows() {
        for h in 0..lat.psi.ncols() {
            let on = if lat.phi[(j, h)] { 1.0 } else { 0.0 };
            lat.psi[(j, h)] = sample_beta(on + hyper.a_psi, 1.0 - on + hyper.b_psi, rng)?;
        }
    }
    Ok(())
}

/// Half-Cauchy scale update shared by steps 2 and 6: redraw the auxiliary
/// `ε ~ IG(1, 1 + 1/s)`, then `s ~ IG(1, x²/(2c) + 1/ε)` with `c = 1` in the
/// slab and `c = ν` in the spike.
pub fn half_cauchy_scale<R: Rng + ?Sized>(scale: f64, value: f64, slab: bool, nu: f64, rng: &mut R) -> Result<f64> {
    let eps = sample_inverse_gamma(1.0, 1.0 + 1.0 / scale, rng)?;
    let spread = if slab { 1.0 } else { nu };
    sample_inverse_gamma(1.0, value * value / (2.0 * spread) + 1.0 / eps, rng)
}

/// Step 2.
pub fn update_eta<R: Rng + ?Sized>(state: &mut ChainState, hyper: &Hyperparameters, rng: &mut R) -> Result<()> {
    let b = &state.params.b;
    let lat = &mut state.latent;
    for j in 0..b.nrows() {
        for h in 0..b.ncols() {
            lat.eta[(j, h)] = half_cauchy_scale(lat.eta[(j, h)], b[(j, h)], lat.phi[(j, h)], hyper.nu2, rng)?;
        }
    }
    Ok(())
}

/// Step 3.
pub fn update_phi<R: Rng + ?Sized>(state: &mut ChainState, hyper: &Hyperparameters, rng: &mut R) -> Result<()> {
    let b = &state.params.b;
    let lat = &mut state.latent;
    for j in 0..b.nrows() {
        for h in 0..b.ncols() {
            let q = slab_probability(b[(j, h)], lat.eta[(j, h)], lat.psi[(j, h)], hyper.nu2);
            lat.phi[(j, h)] = sample_bernoulli(q, rng)?;
        }
    }
    Ok(())
}

fn normal_log_kernel(x: f64, var: f64) -> f64 {
    -x * x / (2.0 * var)
}

/// Step 4: random-walk Metropolis-Hastings on every active entry of `B`.
///
/// With `support = None` every entry is active and the prior is the
/// spike-and-slab mixture; with a support mask only its entries move and the
/// prior is `N(0, b_prior_sd²)`.
pub fn update_b<R: Rng + ?Sized>(
    state: &mut ChainState,
    stats: &SummaryStatistics,
    hyper: &Hyperparameters,
    support: Option<&Mask>,
    rng: &mut R,
) -> Result<()> {
    let n = stats.n();
    let (p, k) = state.params.b.shape();
    for j in 0..p {
        for h in 0..k {
            let prior_var = match support {
                Some(mask) if !mask[(j, h)] => continue,
                Some(_) => hyper.b_prior_sd * hyper.b_prior_sd,
                None => {
                    let eta = state.latent.eta[(j, h)];
                    if state.latent.phi[(j, h)] {
                        eta
                    } else {
                        hyper.nu2 * eta
                    }
                }
            };
            let current = state.params.b[(j, h)];
            let sd = state.proposals.b_sd[(j, h)];
            let proposal = current + sd * standard_normal(rng);
            let delta = proposal - current;
            let col = p + h;
            let dq = state.cache.delta_quad(j, col, -delta);
            let log_alpha =
                -0.5 * n * dq + normal_log_kernel(proposal, prior_var) - normal_log_kernel(current, prior_var);
            let accepted = log_alpha.is_finite() && (log_alpha >= 0.0 || rng.random::<f64>().ln() < log_alpha);
            if accepted {
                state.cache.apply_w_change(j, col, -delta, dq);
                state.params.b[(j, h)] = proposal;
                state.proposals.b_accepted += 1;
            }
            state.proposals.b_proposed += 1;
            let (gain, target) = (state.proposals.gain, state.proposals.target);
            ProposalScales::adapt(&mut state.proposals.b_sd[(j, h)], gain, target, accepted);
        }
    }
    state.log_lik = state.cache.log_lik();
    Ok(())
}

/// Step 5: `ρ_jh ~ Beta(γ_jh + a_ρ, 1 - γ_jh + b_ρ)` off the diagonal.
pub fn update_rho<R: Rng + ?Sized>(state: &mut ChainState, hyper: &Hyperparameters, rng: &mut R) -> Result<()> {
    let lat = &mut state.latent;
    let p = lat.rho.nrows();
    for j in 0..p {
        for h in 0..p {
            if j == h {
                continue;
            }
            let on = if lat.gamma[(j, h)] { 1.0 } else { 0.0 };
            lat.rho[(j, h)] = sample_beta(on + hyper.a_rho, 1.0 - on + hyper.b_rho, rng)?;
        }
    }
    Ok(())
}

/// Step 6.
pub fn update_tau<R: Rng + ?Sized>(state: &mut ChainState, hyper: &Hyperparameters, rng: &mut R) -> Result<()> {
    let a = &state.params.a;
    let lat = &mut state.latent;
    let p = a.nrows();
    for j in 0..p {
        for h in 0..p {
            if j != h {
                lat.tau[(j, h)] = half_cauchy_scale(lat.tau[(j, h)], a[(j, h)], lat.gamma[(j, h)], hyper.nu1, rng)?;
            }
        }
    }
    Ok(())
}

/// Step 7.
pub fn update_gamma<R: Rng + ?Sized>(state: &mut ChainState, hyper: &Hyperparameters, rng: &mut R) -> Result<()> {
    let a = &state.params.a;
    let lat = &mut state.latent;
    let p = a.nrows();
    for j in 0..p {
        for h in 0..p {
            if j != h {
                let q = slab_probability(a[(j, h)], lat.tau[(j, h)], lat.rho[(j, h)], hyper.nu1);
                lat.gamma[(j, h)] = sample_bernoulli(q, rng)?;
            }
        }
    }
    Ok(())
}

/// Step 8: random-walk Metropolis-Hastings on the off-diagonal entries of
/// `A`. Proposals that make `I - A` singular have zero likelihood and are
/// rejected.
pub fn update_a<R: Rng + ?Sized>(
    state: &mut ChainState,
    stats: &SummaryStatistics,
    hyper: &Hyperparameters,
    rng: &mut R,
) -> Result<()> {
    let n = stats.n();
    let p = state.params.a.nrows();
    for j in 0..p {
        for h in 0..p {
            if j == h {
                continue;
            }
            let tau = state.latent.tau[(j, h)];
            let prior_var = if state.latent.gamma[(j, h)] {
                tau
            } else {
                hyper.nu1 * tau
            };
            let current = state.params.a[(j, h)];
            let sd = state.proposals.a_sd[(j, h)];
            let proposal = current + sd * standard_normal(rng);
            let delta = proposal - current;
            let ratio = state.cache.det_ratio_a(j, h, delta);
            let mut accepted = false;
            if ratio.abs() >= linalg::SINGULAR_PIVOT {
                let dq = state.cache.delta_quad(j, h, -delta);
                let log_alpha = n * ratio.abs().ln() - 0.5 * n * dq + normal_log_kernel(proposal, prior_var)
                    - normal_log_kernel(current, prior_var);
                accepted = log_alpha.is_finite() && (log_alpha >= 0.0 || rng.random::<f64>().ln() < log_alpha);
                if accepted {
                    state.cache.apply_w_change(j, h, -delta, dq);
                    state.cache.apply_a_change(j, h, delta, ratio);
                    state.params.a[(j, h)] = proposal;
                    state.proposals.a_accepted += 1;
                }
            }
            state.proposals.a_proposed += 1;
            let (gain, target) = (state.proposals.gain, state.proposals.target);
            ProposalScales::adapt(&mut state.proposals.a_sd[(j, h)], gain, target, accepted);
        }
    }
    state.log_lik = state.cache.log_lik();
    Ok(())
}

/// Moments of the matrix-normal full conditional of `C`.
pub fn c_conditional(
    state: &ChainState,
    stats: &SummaryStatistics,
    hyper: &Hyperparameters,
) -> Result<MatrixNormalParams> {
    let n = stats.n();
    let l = stats.dims.l;
    let precision = &stats.s_uu * n + Matrix::identity(l, l) / hyper.tau_c;
    let col_cov = linalg::spd_inverse(&precision)
        .ok_or_else(|| RgmError::Numerical("n S_uu + I/tau_c is not positive definite".into()))?;
    let lhs = state.params.i_minus_a() * &stats.s_yu * n - &state.params.b * &stats.s_xu * n;
    MatrixNormalParams::new(lhs * &col_cov, state.params.sigma_star.clone(), col_cov)
}

/// Step 9: exact Gibbs draw of `C`. No-op when `l = 0`.
pub fn update_c<R: Rng + ?Sized>(
    state: &mut ChainState,
    stats: &SummaryStatistics,
    hyper: &Hyperparameters,
    rng: &mut R,
) -> Result<()> {
    if stats.dims.l == 0 {
        return Ok(());
    }
    let cond = c_conditional(state, stats, hyper)?;
    state.params.c = sample_matrix_normal(&cond, rng)?;
    state.resync(stats)
}

/// Step 10: `z_jh = z_hj ~ Bernoulli(p_z)` for `j < h`.
pub fn update_z<R: Rng + ?Sized>(state: &mut ChainState, hyper: &Hyperparameters, rng: &mut R) -> Result<()> {
    let sigma = &state.params.sigma_star;
    let z = &mut state.latent.z;
    let p = sigma.nrows();
    for j in 0..p {
        z[(j, j)] = true;
        for h in (j + 1)..p {
            let on = sample_bernoulli(confounding_probability(sigma[(j, h)], hyper), rng)?;
            z[(j, h)] = on;
            z[(h, j)] = on;
        }
    }
    Ok(())
}

/// Step 11: blocked Gibbs update of `Σ*`, one column at a time.
///
/// For column `j` with `u = σ₁₂` and `v = σ₂₂ - uᵀ Σ₁₁⁻¹ u`:
///
/// ```text
/// u | v ~ N((Ω + diag(v₁₂⁻¹))⁻¹ w, (Ω + diag(v₁₂⁻¹))⁻¹)
///     Ω = Σ₁₁⁻¹ S₁₁ Σ₁₁⁻¹ / v + λ Σ₁₁⁻¹,   w = Σ₁₁⁻¹ s₁₂ / v
/// v | u ~ GIG(1 - (n + l)/2, λ, uᵀ Σ₁₁⁻¹ S₁₁ Σ₁₁⁻¹ u - 2 s₁₂ᵀ Σ₁₁⁻¹ u + s₂₂)
/// ```
///
/// `Σ₁₁⁻¹` comes from the running precision matrix, which is updated in
/// closed form after every column and refactored at the end of the sweep.
/// The `l` in the GIG order accounts for the `det(Σ*)^(-l/2)` factor of the
/// matrix-normal prior on `C`.
pub fn update_sigma_star<R: Rng + ?Sized>(
    state: &mut ChainState,
    stats: &SummaryStatistics,
    hyper: &Hyperparameters,
    rng: &mut R,
) -> Result<()> {
    let scatter = residual_scatter(&state.params, stats, hyper.tau_c)?;
    let p = stats.dims.p;
    let order = 1.0 - (stats.dims.n + stats.dims.l) as f64 / 2.0;
    let lambda = hyper.lambda;
    let mut sigma = state.params.sigma_star.clone();
    let mut prec = state.cache.precision.clone();

    if p == 1 {
        let rate = clamp_rate(scatter[(0, 0)]);
        sigma[(0, 0)] = sample_gig(GigParams::new(order, lambda, rate)?, rng)?;
    } else {
        for j in 0..p {
            let m22 = prec[(j, j)];
            let m12 = linalg::column_without(&prec, j);
            let sigma11_inv = linalg::symmetrize(&(linalg::minor(&prec, j) - &m12 * m12.transpose() / m22));
            let u_cur = linalg::column_without(&sigma, j);
            let v_cur = sigma[(j, j)] - u_cur.dot(&(&sigma11_inv * &u_cur));
            if v_cur.is_nan() || v_cur <= 0.0 {
                return Err(RgmError::Numerical(format!(
                    "Schur complement {v_cur} for column {j} is not positive"
                )));
            }
            let s11 = linalg::minor(&scatter, j);
            let s12 = linalg::column_without(&scatter, j);
            let s22 = scatter[(j, j)];
            let sandwich = linalg::symmetrize(&(&sigma11_inv * &s11 * &sigma11_inv));

            let mut precision_u = &sandwich / v_cur + &sigma11_inv * lambda;
            let mut r = 0;
            for i in 0..p {
                if i == j {
                    continue;
                }
                let sd = if state.latent.z[(i, j)] {
                    hyper.omega1
                } else {
                    hyper.omega2
                };
                precision_u[(r, r)] += 1.0 / (sd * sd);
                r += 1;
            }
            let w = &sigma11_inv * &s12 / v_cur;
            let chol = linalg::cholesky(&precision_u)
                .ok_or_else(|| RgmError::Numerical(format!("u-precision for column {j} is not positive definite")))?;
            let mean = chol.solve(&w);
            let z = DVector::from_fn(p - 1, |_, _| standard_normal(rng));
            let noise = chol
                .l_dirty()
                .lower_triangle()
                .transpose()
                .solve_upper_triangular(&z)
                .ok_or_else(|| RgmError::Numerical("triangular solve failed".into()))?;
            let u = mean + noise;

            let t = &sigma11_inv * &u;
            let rate = clamp_rate(u.dot(&(&sandwich * &u)) - 2.0 * s12.dot(&t) + s22);
            let v = sample_gig(GigParams::new(order, lambda, rate)?, rng)?;

            let mut r = 0;
            for i in 0..p {
                if i == j {
                    continue;
                }
                sigma[(i, j)] = u[r];
                sigma[(j, i)] = u[r];
                r += 1;
            }
            sigma[(j, j)] = v + u.dot(&t);

            // precision of the updated matrix from the block inverse
            let mut r = 0;
            let outer = &t * t.transpose() / v;
            for i in 0..p {
                if i == j {
                    continue;
                }
                prec[(i, j)] = -t[r] / v;
                prec[(j, i)] = -t[r] / v;
                let mut c = 0;
                for i2 in 0..p {
                    if i2 == j {
                        continue;
                    }
                    prec[(i, i2)] = sigma11_inv[(r, c)] + outer[(r, c)];
                    c += 1;
                }
                r += 1;
            }
            prec[(j, j)] = 1.0 / v;
        }
    }
    if linalg::cholesky(&sigma).is_none() {
        return Err(RgmError::Numerical("Sigma_star lost positive definiteness".into()));
    }
    state.params.sigma_star = sigma;
    state.resync(stats)
}

fn clamp_rate(rate: f64) -> f64 {
    if rate > GIG_RATE_FLOOR {
        rate
    } else {
        log::warn!("GIG rate {rate:e} clamped to {GIG_RATE_FLOOR:e}");
        GIG_RATE_FLOOR
    }
}
