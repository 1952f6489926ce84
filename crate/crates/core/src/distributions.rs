//! Samplers for the non-standard conditionals of the chain.
//!
//! The generalized inverse Gaussian uses the convention
//! `f(x) ∝ x^(p-1) exp(-(a x + b / x) / 2)` for `x > 0` and is drawn with the
//! Hörmann–Leydold family of rejection schemes (ratio-of-uniforms with or
//! without mode shift, and a non-T-concave hat for small `√(ab)`), which is
//! uniformly fast across the whole parameter range including the very
//! negative orders produced by the covariance update.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Beta, Distribution, Gamma, StandardNormal};

use crate::error::{Result, RgmError};
use crate::linalg;

/// Generalized inverse Gaussian parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GigParams {
    /// Power parameter.
    pub p_order: f64,
    /// Rate multiplying `x`.
    pub a: f64,
    /// Rate multiplying `1/x`.
    pub b: f64,
}

impl GigParams {
    pub fn new(p_order: f64, a: f64, b: f64) -> Result<Self> {
        let g = GigParams { p_order, a, b };
        g.validate()?;
        Ok(g)
    }

    /// Valid when `b > 0, a > 0`; `b > 0, a = 0, p < 0` (inverse gamma); or
    /// `b = 0, a > 0, p > 0` (gamma).
    pub fn validate(&self) -> Result<()> {
        let GigParams { p_order, a, b } = *self;
        let finite = p_order.is_finite() && a.is_finite() && b.is_finite();
        let ok = finite
            && ((b > 0.0 && a > 0.0)
                || (b > 0.0 && a == 0.0 && p_order < 0.0)
                || (b == 0.0 && a > 0.0 && p_order > 0.0));
        if ok {
            Ok(())
        } else {
            Err(RgmError::InvalidParameter(format!(
                "GIG(p={p_order}, a={a}, b={b}) is not a proper distribution"
            )))
        }
    }
}

pub fn sample_gig<R: Rng + ?Sized>(params: GigParams, rng: &mut R) -> Result<f64> {
    params.validate()?;
    let GigParams { p_order, a, b } = params;
    if b == 0.0 {
        // Gamma(p, rate a/2)
        let g = Gamma::new(p_order, 2.0 / a).map_err(|e| RgmError::InvalidParameter(e.to_string()))?;
        return Ok(positive(g.sample(rng)));
    }
    if a == 0.0 {
        return sample_inverse_gamma(-p_order, b / 2.0, rng);
    }
    let omega = (a * b).sqrt();
    let alpha = (b / a).sqrt();
    let lambda = p_order.abs();
    let x = if lambda > 2.0 || omega > 3.0 {
        rou_shift(lambda, omega, rng)
    } else if lambda >= 1.0 - 2.25 * omega * omega || omega > 0.2 {
        rou_noshift(lambda, omega, rng)
    } else {
        concave_hat(lambda, omega, rng)
    };
    let out = if p_order < 0.0 { alpha / x } else { alpha * x };
    Ok(positive(out))
}

fn positive(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        f64::MIN_POSITIVE
    }
}

/// Mode of the standardized density `x^(λ-1) exp(-ω(x + 1/x)/2)`.
fn gig_mode(lambda: f64, omega: f64) -> f64 {
    if lambda >= 1.0 {
        (((lambda - 1.0) * (lambda - 1.0) + omega * omega).sqrt() + (lambda - 1.0)) / omega
    } else {
        omega / (((1.0 - lambda) * (1.0 - lambda) + omega * omega).sqrt() + (1.0 - lambda))
    }
}

fn rou_noshift<R: Rng + ?Sized>(lambda: f64, omega: f64, rng: &mut R) -> f64 {
    let t = 0.5 * (lambda - 1.0);
    let s = 0.25 * omega;
    let xm = gig_mode(lambda, omega);
    let nc = t * xm.ln() - s * (xm + 1.0 / xm);
    let ym = ((lambda + 1.0) + ((lambda + 1.0) * (lambda + 1.0) + omega * omega).sqrt()) / omega;
    let um = (0.5 * (lambda + 1.0) * ym.ln() - s * (ym + 1.0 / ym) - nc).exp();
    loop {
        let u = um * rng.random::<f64>();
        let v: f64 = rng.random();
        let x = u / v;
        if x > 0.0 && x.is_finite() && v.ln() <= t * x.ln() - s * (x + 1.0 / x) - nc {
            return x;
        }
    }
}

fn rou_shift<R: Rng + ?Sized>(lambda: f64, omega: f64, rng: &mut R) -> f64 {
    let t = 0.5 * (lambda - 1.0);
    let s = 0.25 * omega;
    let xm = gig_mode(lambda, omega);
    let nc = t * xm.ln() - s * (xm + 1.0 / xm);

    // Roots of the cubic bounding the shifted ratio-of-uniforms region.
    let ca = -(2.0 * (lambda + 1.0) / omega + xm);
    let cb = 2.0 * (lambda - 1.0) * xm / omega - 1.0;
    let cc = xm;
    let pp = cb - ca * ca / 3.0;
    let qq = 2.0 * ca * ca * ca / 27.0 - ca * cb / 3.0 + cc;
    let arg = (-qq / (2.0 * (-pp * pp * pp / 27.0).sqrt())).clamp(-1.0, 1.0);
    let fi = arg.acos();
    let fak = 2.0 * (-pp / 3.0).sqrt();
    let y1 = fak * (fi / 3.0).cos() - ca / 3.0;
    let y2 = fak * (fi / 3.0 + 4.0 / 3.0 * PI).cos() - ca / 3.0;
    let uplus = (y1 - xm) * (t * y1.ln() - s * (y1 + 1.0 / y1) - nc).exp();
    let uminus = (y2 - xm) * (t * y2.ln() - s * (y2 + 1.0 / y2) - nc).exp();
    loop {
        let u = uminus + rng.random::<f64>() * (uplus - uminus);
        let v: f64 = rng.random();
        let x = u / v + xm;
        if x > 0.0 && x.is_finite() && v.ln() <= t * x.ln() - s * (x + 1.0 / x) - nc {
            return x;
        }
    }
}

/// Rejection from a piecewise hat for `λ < 1` and small `ω`, where the
/// density is not T-concave.
fn concave_hat<R: Rng + ?Sized>(lambda: f64, omega: f64, rng: &mut R) -> f64 {
    let xm = gig_mode(lambda, omega);
    let x0 = omega / (1.0 - lambda);
    let k0 = ((lambda - 1.0) * xm.ln() - 0.5 * omega * (xm + 1.0 / xm)).exp();
    let a0 = k0 * x0;
    let (k1, a1, k2, a2);
    if x0 >= 2.0 / omega {
        k1 = 0.0;
        a1 = 0.0;
        k2 = x0.powf(lambda - 1.0);
        a2 = k2 * 2.0 * (-omega * x0 / 2.0).exp() / omega;
    } else {
        k1 = (-omega).exp();
        a1 = if lambda == 0.0 {
            k1 * (2.0 / (omega * omega)).ln()
        } else {
            k1 / lambda * ((2.0 / omega).powf(lambda) - x0.powf(lambda))
        };
        k2 = (2.0 / omega).powf(lambda - 1.0);
        a2 = k2 * 2.0 * (-1.0f64).exp() / omega;
    }
    let total = a0 + a1 + a2;
    loop {
        let mut v = total * rng.random::<f64>();
        let (x, hx);
        if v <= a0 {
            x = x0 * v / a0;
            hx = k0;
        } else {
            v -= a0;
            if v <= a1 {
                if lambda == 0.0 {
                    x = omega * (omega.exp() * v).exp();
                    hx = k1 / x;
                } else {
                    x = (x0.powf(lambda) + lambda / k1 * v).powf(1.0 / lambda);
                    hx = k1 * x.powf(lambda - 1.0);
                }
            } else {
                v -= a1;
                let edge = x0.max(2.0 / omega);
                x = -2.0 / omega * ((-omega / 2.0 * edge).exp() - omega / (2.0 * k2) * v).ln();
                hx = k2 * (-omega / 2.0 * x).exp();
            }
        }
        if !(x > 0.0 && x.is_finite()) {
            continue;
        }
        let u = rng.random::<f64>() * hx;
        if u.ln() <= (lambda - 1.0) * x.ln() - omega / 2.0 * (x + 1.0 / x) {
            return x;
        }
    }
}

/// Inverse gamma with density `∝ x^(-shape-1) exp(-scale/x)`.
pub fn sample_inverse_gamma<R: Rng + ?Sized>(shape: f64, scale: f64, rng: &mut R) -> Result<f64> {
    if !(shape > 0.0 && scale > 0.0) || !shape.is_finite() || !scale.is_finite() {
        return Err(RgmError::InvalidParameter(format!(
            "inverse gamma needs positive shape and scale, got ({shape}, {scale})"
        )));
    }
    let g = Gamma::new(shape, 1.0 / scale).map_err(|e| RgmError::InvalidParameter(e.to_string()))?;
    let draw: f64 = g.sample(rng);
    Ok(if draw > 0.0 { 1.0 / draw } else { f64::MAX })
}

pub fn sample_beta<R: Rng + ?Sized>(a: f64, b: f64, rng: &mut R) -> Result<f64> {
    let d = Beta::new(a, b).map_err(|e| RgmError::InvalidParameter(format!("Beta({a}, {b}): {e}")))?;
    let x: f64 = d.sample(rng);
    // keep strictly inside (0, 1)
    Ok(x.clamp(f64::EPSILON, 1.0 - f64::EPSILON))
}

const BERNOULLI_SLACK: f64 = 1e-12;

pub fn sample_bernoulli<R: Rng + ?Sized>(q: f64, rng: &mut R) -> Result<bool> {
    if !(-BERNOULLI_SLACK..=1.0 + BERNOULLI_SLACK).contains(&q) {
        return Err(RgmError::InvalidParameter(format!(
            "Bernoulli probability {q} outside [0, 1]"
        )));
    }
    let q = q.clamp(0.0, 1.0);
    Ok(rng.random::<f64>() < q)
}

pub fn standard_normal<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    StandardNormal.sample(rng)
}

/// Matrix normal `MN(M, RowCov, ColCov)`: `vec(X) ~ N(vec(M), ColCov ⊗ RowCov)`.
#[derive(Debug, Clone, PartialEq)]
pub struct MatrixNormalParams {
    pub mean: DMatrix<f64>,
    pub row_cov: DMatrix<f64>,
    pub col_cov: DMatrix<f64>,
}

impl MatrixNormalParams {
    pub fn new(mean: DMatrix<f64>, row_cov: DMatrix<f64>, col_cov: DMatrix<f64>) -> Result<Self> {
        if row_cov.shape() != (mean.nrows(), mean.nrows()) {
            return Err(RgmError::dimension(
                "RowCov",
                (mean.nrows(), mean.nrows()),
                row_cov.shape(),
            ));
        }
        if col_cov.shape() != (mean.ncols(), mean.ncols()) {
            return Err(RgmError::dimension(
                "ColCov",
                (mean.ncols(), mean.ncols()),
                col_cov.shape(),
            ));
        }
        Ok(MatrixNormalParams { mean, row_cov, col_cov })
    }

    pub fn log_density(&self, x: &DMatrix<f64>) -> Result<f64> {
        let (p, l) = self.mean.shape();
        if x.shape() != (p, l) {
            return Err(RgmError::dimension("X", (p, l), x.shape()));
        }
        let row = linalg::cholesky(&self.row_cov).ok_or_else(|| not_pd("RowCov"))?;
        let col = linalg::cholesky(&self.col_cov).ok_or_else(|| not_pd("ColCov"))?;
        let diff = x - &self.mean;
        // tr(ColCov⁻¹ Dᵀ RowCov⁻¹ D)
        let right = row.solve(&diff);
        let left = col.solve(&diff.transpose());
        let quad = linalg::trace_of_product(&left, &right);
        Ok(-0.5 * (p * l) as f64 * (2.0 * PI).ln()
            - 0.5 * l as f64 * linalg::chol_log_det(&row)
            - 0.5 * p as f64 * linalg::chol_log_det(&col)
            - 0.5 * quad)
    }
}

fn not_pd(name: &str) -> RgmError {
    RgmError::InvalidParameter(format!("{name} is not positive definite"))
}

pub fn sample_matrix_normal<R: Rng + ?Sized>(params: &MatrixNormalParams, rng: &mut R) -> Result<DMatrix<f64>> {
    let (p, l) = params.mean.shape();
    let row = linalg::cholesky(&params.row_cov).ok_or_else(|| not_pd("RowCov"))?;
    let col = linalg::cholesky(&params.col_cov).ok_or_else(|| not_pd("ColCov"))?;
    let z = DMatrix::from_fn(p, l, |_, _| standard_normal(rng));
    let lr = row.l();
    let lc = col.l();
    Ok(&params.mean + lr * z * lc.transpose())
}
