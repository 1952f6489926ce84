//! The cyclic structural equation model
//!
//! ```text
//! Y = A Y + B X + C U + E*,    E* ~ N_p(0, Σ*)
//! ```
//!
//! together with its two interchangeable log-likelihood evaluators (raw data
//! and second-moment summaries) and the residual scatter matrix used by the
//! covariance update.

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{Result, RgmError};
use crate::linalg;

pub type Matrix = DMatrix<f64>;
pub type Mask = DMatrix<bool>;

/// Problem size: `p` traits, `k` instruments, `l` covariates, `n` samples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub struct Dimensions {
    pub p: usize,
    pub k: usize,
    pub l: usize,
    pub n: usize,
}

impl Dimensions {
    pub fn new(p: usize, k: usize, l: usize, n: usize) -> Result<Self> {
        if p == 0 {
            return Err(RgmError::InvalidParameter("trait count p must be >= 1".into()));
        }
        if n == 0 {
            return Err(RgmError::InvalidParameter("sample size n must be >= 1".into()));
        }
        Ok(Dimensions { p, k, l, n })
    }

    /// Side length of the joint (Y, X, U) second-moment matrix.
    pub fn joint(&self) -> usize {
        self.p + self.k + self.l
    }
}

/// The six `1/n`-scaled second-moment blocks plus the sample size.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryStatistics {
    pub s_yy: Matrix,
    pub s_yx: Matrix,
    pub s_yu: Matrix,
    pub s_xx: Matrix,
    pub s_xu: Matrix,
    pub s_uu: Matrix,
    pub dims: Dimensions,
}

const SYMMETRY_TOL: f64 = 1e-9;
const PSD_TOL: f64 = 1e-8;

fn check_shape(block: &str, m: &Matrix, rows: usize, cols: usize) -> Result<()> {
    if m.nrows() != rows || m.ncols() != cols {
        return Err(RgmError::dimension(block, (rows, cols), m.shape()));
    }
    Ok(())
}

impl SummaryStatistics {
    /// Validates shapes, symmetry of the diagonal blocks and positive
    /// semidefiniteness of the assembled joint matrix.
    pub fn new(
        s_yy: Matrix,
        s_yx: Matrix,
        s_yu: Matrix,
        s_xx: Matrix,
        s_xu: Matrix,
        s_uu: Matrix,
        n: usize,
    ) -> Result<Self> {
        let p = s_yy.nrows();
        let k = s_xx.nrows();
        let l = s_uu.nrows();
        let dims = Dimensions::new(p, k, l, n)?;
        check_shape("S_yy", &s_yy, p, p)?;
        check_shape("S_yx", &s_yx, p, k)?;
        check_shape("S_yu", &s_yu, p, l)?;
        check_shape("S_xx", &s_xx, k, k)?;
        check_shape("S_xu", &s_xu, k, l)?;
        check_shape("S_uu", &s_uu, l, l)?;
        for (name, m) in [("S_yy", &s_yy), ("S_xx", &s_xx), ("S_uu", &s_uu)] {
            if !linalg::is_symmetric(m, SYMMETRY_TOL) {
                return Err(RgmError::InvalidParameter(format!("{name} is not symmetric")));
            }
        }
        let stats = SummaryStatistics {
            s_yy,
            s_yx,
            s_yu,
            s_xx,
            s_xu,
            s_uu,
            dims,
        };
        let joint = stats.joint();
        if joint.iter().any(|v| !v.is_finite()) {
            return Err(RgmError::InvalidParameter(
                "second-moment matrices contain non-finite entries".into(),
            ));
        }
        let scale = joint.diagonal().iter().map(|d| d.abs()).fold(1.0, f64::max);
        if linalg::min_eigenvalue(&linalg::symmetrize(&joint)) < -PSD_TOL * scale {
            return Err(RgmError::InvalidParameter(
                "joint second-moment matrix is not positive semidefinite".into(),
            ));
        }
        Ok(stats)
    }

    /// The `(p+k+l)`-square joint second-moment matrix of `(Y, X, U)`.
    pub fn joint(&self) -> Matrix {
        let Dimensions { p, k, l, .. } = self.dims;
        let mut g = Matrix::zeros(p + k + l, p + k + l);
        g.view_mut((0, 0), (p, p)).copy_from(&self.s_yy);
        g.view_mut((0, p), (p, k)).copy_from(&self.s_yx);
        g.view_mut((0, p + k), (p, l)).copy_from(&self.s_yu);
        g.view_mut((p, 0), (k, p)).copy_from(&self.s_yx.transpose());
        g.view_mut((p, p), (k, k)).copy_from(&self.s_xx);
        g.view_mut((p, p + k), (k, l)).copy_from(&self.s_xu);
        g.view_mut((p + k, 0), (l, p)).copy_from(&self.s_yu.transpose());
        g.view_mut((p + k, p), (l, k)).copy_from(&self.s_xu.transpose());
        g.view_mut((p + k, p + k), (l, l)).copy_from(&self.s_uu);
        g
    }

    pub fn n(&self) -> f64 {
        self.dims.n as f64
    }
}

/// `(A, B, C, Σ*)`. `a[(j, h)]` is the direct effect of trait `h` on trait `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParameters {
    pub a: Matrix,
    pub b: Matrix,
    pub c: Matrix,
    pub sigma_star: Matrix,
}

impl ModelParameters {
    /// `A = B = C = 0`, `Σ* = I`.
    pub fn null(dims: &Dimensions) -> Self {
        ModelParameters {
            a: Matrix::zeros(dims.p, dims.p),
            b: Matrix::zeros(dims.p, dims.k),
            c: Matrix::zeros(dims.p, dims.l),
            sigma_star: Matrix::identity(dims.p, dims.p),
        }
    }

    pub fn p(&self) -> usize {
        self.a.nrows()
    }

    /// Shape checks against `(p, k, l)` and the no-self-loop constraint.
    pub fn check_dims(&self, p: usize, k: usize, l: usize) -> Result<()> {
        check_shape("A", &self.a, p, p)?;
        check_shape("B", &self.b, p, k)?;
        check_shape("C", &self.c, p, l)?;
        check_shape("Sigma_star", &self.sigma_star, p, p)?;
        if self.a.diagonal().iter().any(|d| *d != 0.0) {
            return Err(RgmError::InvalidParameter("diag(A) must be zero".into()));
        }
        Ok(())
    }

    /// `I - A`.
    pub fn i_minus_a(&self) -> Matrix {
        Matrix::identity(self.p(), self.p()) - &self.a
    }
}

/// Individual-level data, one row per sample.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataSet {
    pub y: Matrix,
    pub x: Matrix,
    pub u: Matrix,
}

impl RawDataSet {
    pub fn new(y: Matrix, x: Matrix, u: Matrix) -> Result<Self> {
        let n = y.nrows();
        check_shape("X", &x, n, x.ncols())?;
        check_shape("U", &u, n, u.ncols())?;
        Ok(RawDataSet { y, x, u })
    }

    pub fn dims(&self) -> Result<Dimensions> {
        Dimensions::new(self.y.ncols(), self.x.ncols(), self.u.ncols(), self.y.nrows())
    }
}

/// Raw (uncentered) second moments `S_ab = (1/n) Σ a_i b_iᵀ`.
pub fn compute_sufficient_stats(data: &RawDataSet) -> Result<SummaryStatistics> {
    let n = data.y.nrows();
    if data.x.nrows() != n {
        return Err(RgmError::dimension("X", (n, data.x.ncols()), data.x.shape()));
    }
    if data.u.nrows() != n {
        return Err(RgmError::dimension("U", (n, data.u.ncols()), data.u.shape()));
    }
    let inv_n = 1.0 / n.max(1) as f64;
    let yt = data.y.transpose();
    let xt = data.x.transpose();
    let s_yy = linalg::symmetrize(&(&yt * &data.y)) * inv_n;
    let s_yx = &yt * &data.x * inv_n;
    let s_yu = &yt * &data.u * inv_n;
    let s_xx = linalg::symmetrize(&(&xt * &data.x)) * inv_n;
    let s_xu = &xt * &data.u * inv_n;
    let s_uu = linalg::symmetrize(&(data.u.transpose() * &data.u)) * inv_n;
    SummaryStatistics::new(s_yy, s_yx, s_yu, s_xx, s_xu, s_uu, n)
}

/// Sum over samples of `log N((I-A)y_i - B x_i - C u_i | 0, Σ*)` plus the
/// Jacobian `n ln|det(I-A)|`. Returns `-inf` for singular `I - A` or
/// non-positive-definite `Σ*`.
pub fn log_likelihood_raw(params: &ModelParameters, data: &RawDataSet) -> Result<f64> {
    let p = params.p();
    params.check_dims(p, data.x.ncols(), data.u.ncols())?;
    if data.y.ncols() != p {
        return Err(RgmError::dimension("Y", (data.y.nrows(), p), data.y.shape()));
    }
    let n = data.y.nrows() as f64;
    let i_a = params.i_minus_a();
    let Some(log_det_ia) = linalg::log_abs_det(&i_a) else {
        return Ok(f64::NEG_INFINITY);
    };
    let Some(chol) = linalg::cholesky(&params.sigma_star) else {
        return Ok(f64::NEG_INFINITY);
    };
    let log_det_sigma = linalg::chol_log_det(&chol);
    // residuals, one column per sample
    let resid = &i_a * data.y.transpose() - &params.b * data.x.transpose() - &params.c * data.u.transpose();
    let whitened = chol
        .l_dirty()
        .lower_triangle()
        .solve_lower_triangular(&resid)
        .ok_or_else(|| RgmError::Numerical("triangular solve failed".into()))?;
    let per_sample = -0.5 * p as f64 * (2.0 * PI).ln() - 0.5 * log_det_sigma;
    let quad: f64 = whitened.iter().map(|v| v * v).sum();
    Ok(n * per_sample - 0.5 * quad + n * log_det_ia)
}

/// The trace form `Q` of the summary likelihood, or `None` if `Σ*` is not
/// positive definite.
pub fn quadratic_term(params: &ModelParameters, stats: &SummaryStatistics) -> Result<Option<f64>> {
    let d = stats.dims;
    params.check_dims(d.p, d.k, d.l)?;
    let Some(prec) = linalg::spd_inverse(&params.sigma_star) else {
        return Ok(None);
    };
    let i_a = params.i_minus_a();
    let prec_ia = &prec * &i_a;
    let prec_b = &prec * &params.b;
    let prec_c = &prec * &params.c;
    let bt = params.b.transpose();
    let ct = params.c.transpose();
    let q = linalg::trace_of_product(&stats.s_yy, &(i_a.transpose() * &prec_ia))
        - 2.0 * linalg::trace_of_product(&stats.s_yx, &(&bt * &prec_ia))
        - 2.0 * linalg::trace_of_product(&stats.s_yu, &(&ct * &prec_ia))
        + linalg::trace_of_product(&stats.s_xx, &(&bt * &prec_b))
        + linalg::trace_of_product(&stats.s_uu, &(&ct * &prec_c))
        + 2.0 * linalg::trace_of_product(&stats.s_xu, &(&ct * &prec_b));
    Ok(Some(q))
}

/// Log-likelihood from the second-moment summaries:
///
/// ```text
/// -(np/2) ln 2π - (n/2) ln det Σ* + n ln|det(I-A)| - (n/2) Q
/// ```
pub fn log_likelihood_summary(params: &ModelParameters, stats: &SummaryStatistics) -> Result<f64> {
    let d = stats.dims;
    let Some(q) = quadratic_term(params, stats)? else {
        return Ok(f64::NEG_INFINITY);
    };
    let Some(log_det_ia) = linalg::log_abs_det(&params.i_minus_a()) else {
        return Ok(f64::NEG_INFINITY);
    };
    let Some(chol) = linalg::cholesky(&params.sigma_star) else {
        return Ok(f64::NEG_INFINITY);
    };
    let n = stats.n();
    Ok(-0.5 * n * d.p as f64 * (2.0 * PI).ln() - 0.5 * n * linalg::chol_log_det(&chol) + n * log_det_ia - 0.5 * n * q)
}

/// Residual scatter `n·(W G Wᵀ) + C Cᵀ/τ_C` with `W = [I-A, -B, -C]` and `G`
/// the joint second-moment matrix; expanded blockwise below.
pub fn residual_scatter(params: &ModelParameters, stats: &SummaryStatistics, tau_c: f64) -> Result<Matrix> {
    let d = stats.dims;
    params.check_dims(d.p, d.k, d.l)?;
    if tau_c.is_nan() || tau_c <= 0.0 {
        return Err(RgmError::InvalidParameter("tau_c must be positive".into()));
    }
    let i_a = params.i_minus_a();
    let b = &params.b;
    let c = &params.c;
    let ia_yx_bt = &i_a * &stats.s_yx * b.transpose();
    let ia_yu_ct = &i_a * &stats.s_yu * c.transpose();
    let b_xu_ct = b * &stats.s_xu * c.transpose();
    let inner = &i_a * &stats.s_yy * i_a.transpose() - &ia_yx_bt - ia_yx_bt.transpose()
        + b * &stats.s_xx * b.transpose()
        + c * &stats.s_uu * c.transpose()
        - &ia_yu_ct
        - ia_yu_ct.transpose()
        + &b_xu_ct
        + b_xu_ct.transpose();
    let s = inner * stats.n() + c * c.transpose() / tau_c;
    Ok(linalg::symmetrize(&s))
}

/// Reduced-form coefficients `(I-A)⁻¹B`, `(I-A)⁻¹C` and covariance
/// `(I-A)⁻¹ Σ* (I-A)⁻ᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedForm {
    pub gx: Matrix,
    pub gu: Matrix,
    pub v: Matrix,
}

pub fn reduced_form(params: &ModelParameters) -> Result<ReducedForm> {
    let inv = linalg::inverse(&params.i_minus_a()).ok_or_else(|| RgmError::Numerical("I - A is singular".into()))?;
    let v = &inv * &params.sigma_star * inv.transpose();
    Ok(ReducedForm {
        gx: &inv * &params.b,
        gu: &inv * &params.c,
        v: linalg::symmetrize(&v),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ln2pi() -> f64 {
        (2.0 * PI).ln()
    }

    #[test]
    fn single_outer_product() {
        let data = RawDataSet::new(
            Matrix::from_row_slice(1, 2, &[1.0, 2.0]),
            Matrix::zeros(1, 0),
            Matrix::zeros(1, 0),
        )
        .unwrap();
        let s = compute_sufficient_stats(&data).unwrap();
        assert_eq!(s.s_yy, Matrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 4.0]));
        assert_eq!(s.dims, Dimensions { p: 2, k: 0, l: 0, n: 1 });
    }

    #[test]
    fn zero_data_gives_zero_blocks() {
        let data = RawDataSet::new(Matrix::zeros(5, 2), Matrix::zeros(5, 3), Matrix::zeros(5, 0)).unwrap();
        let s = compute_sufficient_stats(&data).unwrap();
        assert!(s
            .s_yy
            .iter()
            .chain(s.s_yx.iter())
            .chain(s.s_xx.iter())
            .all(|v| *v == 0.0));
    }

    #[test]
    fn row_count_mismatch_names_block() {
        let err = RawDataSet::new(Matrix::zeros(5, 2), Matrix::zeros(4, 3), Matrix::zeros(5, 0)).unwrap_err();
        assert!(err.to_string().contains('X'), "{err}");
    }

    #[test]
    fn non_psd_stats_rejected() {
        let err = SummaryStatistics::new(
            Matrix::from_row_slice(1, 1, &[-1.0]),
            Matrix::zeros(1, 0),
            Matrix::zeros(1, 0),
            Matrix::zeros(0, 0),
            Matrix::zeros(0, 0),
            Matrix::zeros(0, 0),
            3,
        )
        .unwrap_err();
        assert!(matches!(err, RgmError::InvalidParameter(_)));
    }

    #[test]
    fn standard_normal_density() {
        let dims = Dimensions::new(1, 0, 0, 1).unwrap();
        let params = ModelParameters::null(&dims);
        let data = RawDataSet::new(
            Matrix::from_element(1, 1, 1.0),
            Matrix::zeros(1, 0),
            Matrix::zeros(1, 0),
        )
        .unwrap();
        let expected = -0.5 * ln2pi() - 0.5;
        assert!((log_likelihood_raw(&params, &data).unwrap() - expected).abs() < 1e-12);
        let stats = compute_sufficient_stats(&data).unwrap();
        assert!((log_likelihood_summary(&params, &stats).unwrap() - expected).abs() < 1e-12);
        assert!((expected + 1.418939).abs() < 1e-6);
    }

    fn upper_coupled() -> ModelParameters {
        let dims = Dimensions::new(2, 0, 0, 1).unwrap();
        let mut params = ModelParameters::null(&dims);
        params.a[(0, 1)] = 0.5;
        params
    }

    #[test]
    fn bivariate_transformed_residual_density() {
        let params = upper_coupled();
        let data = RawDataSet::new(
            Matrix::from_row_slice(1, 2, &[1.0, 1.0]),
            Matrix::zeros(1, 0),
            Matrix::zeros(1, 0),
        )
        .unwrap();
        // residual (0.5, 1), det(I - A) = 1
        let expected = -ln2pi() - 0.625;
        assert!((log_likelihood_raw(&params, &data).unwrap() - expected).abs() < 1e-12);
        assert!((expected + 2.462877).abs() < 1e-6);
    }

    #[test]
    fn bivariate_summary_identity_moments() {
        let params = upper_coupled();
        let stats = SummaryStatistics::new(
            Matrix::identity(2, 2),
            Matrix::zeros(2, 0),
            Matrix::zeros(2, 0),
            Matrix::zeros(0, 0),
            Matrix::zeros(0, 0),
            Matrix::zeros(0, 0),
            1,
        )
        .unwrap();
        let expected = -ln2pi() - 1.125;
        assert!((log_likelihood_summary(&params, &stats).unwrap() - expected).abs() < 1e-12);
        assert!((expected + 2.962877).abs() < 1e-6);
    }

    #[test]
    fn singular_jacobian_is_neg_infinity() {
        let dims = Dimensions::new(2, 0, 0, 1).unwrap();
        let mut params = ModelParameters::null(&dims);
        params.a[(0, 1)] = 1.0;
        params.a[(1, 0)] = 1.0;
        let data = RawDataSet::new(
            Matrix::from_row_slice(1, 2, &[1.0, -1.0]),
            Matrix::zeros(1, 0),
            Matrix::zeros(1, 0),
        )
        .unwrap();
        assert_eq!(log_likelihood_raw(&params, &data).unwrap(), f64::NEG_INFINITY);
        let stats = compute_sufficient_stats(&data).unwrap();
        assert_eq!(log_likelihood_summary(&params, &stats).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn non_pd_sigma_is_neg_infinity() {
        let dims = Dimensions::new(2, 0, 0, 1).unwrap();
        let mut params = ModelParameters::null(&dims);
        params.sigma_star = Matrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        let data = RawDataSet::new(
            Matrix::from_row_slice(1, 2, &[1.0, -1.0]),
            Matrix::zeros(1, 0),
            Matrix::zeros(1, 0),
        )
        .unwrap();
        assert_eq!(log_likelihood_raw(&params, &data).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn scatter_reduces_to_scaled_moments() {
        let stats = SummaryStatistics::new(
            Matrix::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0]),
            Matrix::zeros(2, 0),
            Matrix::zeros(2, 0),
            Matrix::zeros(0, 0),
            Matrix::zeros(0, 0),
            Matrix::zeros(0, 0),
            7,
        )
        .unwrap();
        let dims = stats.dims;
        let mut params = ModelParameters::null(&dims);
        let s = residual_scatter(&params, &stats, 10.0).unwrap();
        assert!((s - &stats.s_yy * 7.0).amax() < 1e-12);
        params.a[(1, 0)] = 0.4;
        let s = residual_scatter(&params, &stats, 10.0).unwrap();
        let ia = params.i_minus_a();
        assert!((s - &ia * &stats.s_yy * ia.transpose() * 7.0).amax() < 1e-12);
    }

    #[test]
    fn reduced_form_identity_when_acyclic_free() {
        let dims = Dimensions::new(2, 2, 1, 1).unwrap();
        let mut params = ModelParameters::null(&dims);
        params.b = Matrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 2.0]);
        params.c = Matrix::from_row_slice(2, 1, &[0.5, -0.5]);
        let rf = reduced_form(&params).unwrap();
        assert_eq!(rf.gx, params.b);
        assert_eq!(rf.gu, params.c);
        assert_eq!(rf.v, params.sigma_star);
    }

    #[test]
    fn reduced_form_bivariate_closed_form() {
        let (a12, a21, b1, b2) = (0.3, 0.1, 1.5, 0.7);
        let dims = Dimensions::new(2, 2, 0, 1).unwrap();
        let mut params = ModelParameters::null(&dims);
        params.a[(0, 1)] = a12;
        params.a[(1, 0)] = a21;
        params.b = Matrix::from_row_slice(2, 2, &[b1, 0.0, 0.0, b2]);
        let rf = reduced_form(&params).unwrap();
        let f = 1.0 / (1.0 - a12 * a21);
        let expected = Matrix::from_row_slice(2, 2, &[f * b1, f * a12 * b2, f * b1 * a21, f * b2]);
        assert!((rf.gx - expected).amax() < 1e-14);
    }

    #[test]
    fn reduced_form_singular_is_error() {
        let dims = Dimensions::new(2, 0, 0, 1).unwrap();
        let mut params = ModelParameters::null(&dims);
        params.a[(0, 1)] = 2.0;
        params.a[(1, 0)] = 0.5;
        assert!(matches!(reduced_form(&params), Err(RgmError::Numerical(_))));
    }

    fn arb_stats_and_params() -> impl Strategy<Value = (SummaryStatistics, ModelParameters)> {
        (1usize..4, 0usize..4, 0usize..3, 3usize..30, any::<u64>()).prop_map(|(p, k, l, n, seed)| {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut gen = |r: usize, c: usize| Matrix::from_fn(r, c, |_, _| rng.random_range(-1.0..1.0));
            let data = RawDataSet::new(gen(n, p), gen(n, k), gen(n, l)).unwrap();
            let stats = compute_sufficient_stats(&data).unwrap();
            let mut a = gen(p, p) * 0.3;
            a.fill_diagonal(0.0);
            let root = gen(p, p);
            let params = ModelParameters {
                a,
                b: gen(p, k),
                c: gen(p, l),
                sigma_star: &root * root.transpose() + Matrix::identity(p, p),
            };
            (stats, params)
        })
    }

    proptest! {
        #[test]
        fn quadratic_term_invariant_to_transposed_symmetric_blocks((stats, params) in arb_stats_and_params()) {
            let mut t = stats.clone();
            t.s_yy = t.s_yy.transpose();
            t.s_xx = t.s_xx.transpose();
            t.s_uu = t.s_uu.transpose();
            let q0 = quadratic_term(&params, &stats).unwrap().unwrap();
            let q1 = quadratic_term(&params, &t).unwrap().unwrap();
            prop_assert!((q0 - q1).abs() <= 1e-12 * q0.abs().max(1.0));
        }

        #[test]
        fn scatter_trace_identity((stats, params) in arb_stats_and_params(), tau in 0.1f64..20.0) {
            let s = residual_scatter(&params, &stats, tau).unwrap();
            prop_assert!(linalg::is_symmetric(&s, 1e-12));
            let prec = linalg::spd_inverse(&params.sigma_star).unwrap();
            let lhs = linalg::trace_of_product(&prec, &s);
            let q = quadratic_term(&params, &stats).unwrap().unwrap();
            let cct = &params.c * params.c.transpose();
            let rhs = stats.n() * q + linalg::trace_of_product(&prec, &cct) / tau;
            prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0), "{} vs {}", lhs, rhs);
        }

        #[test]
        fn reduced_form_solves_structural_equation((_stats, params) in arb_stats_and_params()) {
            let rf = reduced_form(&params).unwrap();
            let back = params.i_minus_a() * &rf.gx;
            prop_assert!((back - &params.b).amax() < 1e-12);
        }
    }
}
