use serde::{Deserialize, Serialize};

use crate::error::{Result, RgmError};
use crate::model::{Dimensions, Mask};

/// Fixed instrument map (`MR.RGM`) or spike-and-slab selection over every
/// instrument-trait pair (`MR.RGM+`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstrumentMode {
    FixedMap,
    Selection,
}

/// Prior and proposal constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Hyperparameters {
    /// Spike variance multiplier for `A`.
    pub nu1: f64,
    /// Spike variance multiplier for `B`.
    pub nu2: f64,
    pub a_rho: f64,
    pub b_rho: f64,
    pub a_psi: f64,
    pub b_psi: f64,
    /// Slab standard deviation of the off-diagonal entries of `Σ*`.
    pub omega1: f64,
    /// Spike standard deviation of the off-diagonal entries of `Σ*`.
    pub omega2: f64,
    pub pi_z: f64,
    /// Rate of the `Exp(λ/2)` diagonal prior; also the GIG linear rate.
    pub lambda: f64,
    /// Column scale of the matrix-normal prior on `C`.
    pub tau_c: f64,
    /// Random-walk proposal variance for `A`.
    pub xi_a: f64,
    /// Random-walk proposal variance for `B`.
    pub xi_b: f64,
    pub instrument_mode: InstrumentMode,
    /// Prior standard deviation of the free entries of `B` under a fixed map.
    pub b_prior_sd: f64,
}

impl Default for Hyperparameters {
    fn default() -> Self {
        Hyperparameters {
            nu1: 0.01,
            nu2: 0.01,
            a_rho: 1.0,
            b_rho: 1.0,
            a_psi: 1.0,
            b_psi: 1.0,
            omega1: 1.0,
            omega2: 0.01,
            pi_z: 0.5,
            lambda: 5.0,
            tau_c: 10.0,
            xi_a: 0.01,
            xi_b: 0.01,
            instrument_mode: InstrumentMode::FixedMap,
            b_prior_sd: 10.0,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(RgmError::InvalidConfig(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

impl Hyperparameters {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("nu1", self.nu1), ("nu2", self.nu2)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(RgmError::InvalidConfig(format!("{name} must lie in (0, 1), got {v}")));
            }
        }
        for (name, v) in [
            ("a_rho", self.a_rho),
            ("b_rho", self.b_rho),
            ("a_psi", self.a_psi),
            ("b_psi", self.b_psi),
            ("omega1", self.omega1),
            ("omega2", self.omega2),
            ("lambda", self.lambda),
            ("tau_c", self.tau_c),
            ("xi_a", self.xi_a),
            ("xi_b", self.xi_b),
            ("b_prior_sd", self.b_prior_sd),
        ] {
            positive(name, v)?;
        }
        if !(self.pi_z >= 0.0 && self.pi_z <= 1.0) {
            return Err(RgmError::InvalidConfig(format!(
                "pi_z must lie in [0, 1], got {}",
                self.pi_z
            )));
        }
        if self.omega2 < 0.01 || self.omega1 / self.omega2 > 1000.0 {
            return Err(RgmError::InvalidConfig(format!(
                "covariance prior needs omega2 >= 0.01 and omega1/omega2 <= 1000, got omega1={}, omega2={}",
                self.omega1, self.omega2
            )));
        }
        Ok(())
    }
}

/// Run length, seeding and the instrument map for one chain.
#[derive(Debug, Clone, PartialEq)]
pub struct McmcConfig {
    pub iterations: usize,
    pub burn_in: usize,
    pub thin: usize,
    pub seed: u64,
    pub hyper: Hyperparameters,
    /// `p x k` support of `B`; required in fixed-map mode.
    pub fixed_b_support: Option<Mask>,
    /// Robbins–Monro tuning of the per-entry random-walk scales during burn-in.
    pub adapt_proposals: bool,
    pub adapt_target: f64,
}

impl Default for McmcConfig {
    fn default() -> Self {
        McmcConfig {
            iterations: 50_000,
            burn_in: 10_000,
            thin: 10,
            seed: 1,
            hyper: Hyperparameters::default(),
            fixed_b_support: None,
            adapt_proposals: true,
            adapt_target: 0.35,
        }
    }
}

impl McmcConfig {
    pub fn validate(&self, dims: &Dimensions) -> Result<()> {
        self.hyper.validate()?;
        if self.iterations == 0 || self.burn_in >= self.iterations {
            return Err(RgmError::InvalidConfig(format!(
                "need 0 <= burn_in < iterations, got burn_in={} iterations={}",
                self.burn_in, self.iterations
            )));
        }
        if self.thin == 0 {
            return Err(RgmError::InvalidConfig("thin must be >= 1".into()));
        }
        if !(self.adapt_target > 0.0 && self.adapt_target < 1.0) {
            return Err(RgmError::InvalidConfig("adapt_target must lie in (0, 1)".into()));
        }
        match (self.hyper.instrument_mode, &self.fixed_b_support) {
            (InstrumentMode::FixedMap, None) => {
                return Err(RgmError::InvalidConfig(
                    "fixed-map mode requires fixed_b_support".into(),
                ))
            }
            (InstrumentMode::FixedMap, Some(mask)) => {
                if mask.shape() != (dims.p, dims.k) {
                    return Err(RgmError::dimension("fixed_b_support", (dims.p, dims.k), mask.shape()));
                }
            }
            (InstrumentMode::Selection, _) => {}
        }
        Ok(())
    }

    /// Number of samples retained after burn-in and thinning.
    pub fn retained(&self) -> usize {
        (self.iterations - self.burn_in).div_ceil(self.thin)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        Hyperparameters::default().validate().unwrap();
    }

    #[test]
    fn unstable_covariance_prior_rejected() {
        let h = Hyperparameters {
            omega2: 0.001,
            ..Default::default()
        };
        assert!(h.validate().is_err());
        let h = Hyperparameters {
            omega1: 20.0,
            ..Default::default()
        };
        assert!(h.validate().is_err());
    }

    #[test]
    fn config_checks() {
        let dims = Dimensions::new(2, 3, 0, 10).unwrap();
        let mut cfg = McmcConfig::default();
        assert!(cfg.validate(&dims).is_err(), "fixed map without support");
        cfg.fixed_b_support = Some(Mask::from_element(2, 3, true));
        cfg.validate(&dims).unwrap();
        cfg.burn_in = cfg.iterations;
        assert!(cfg.validate(&dims).is_err());
        cfg.burn_in = 0;
        cfg.thin = 0;
        assert!(cfg.validate(&dims).is_err());
    }

    #[test]
    fn retained_count() {
        let cfg = McmcConfig {
            iterations: 11,
            burn_in: 10,
            thin: 1,
            ..Default::default()
        };
        assert_eq!(cfg.retained(), 1);
        let cfg = McmcConfig::default();
        assert_eq!(cfg.retained(), 4000);
    }

    #[test]
    fn unknown_hyperparameter_key_is_error() {
        let err = serde_json::from_str::<Hyperparameters>(r#"{"nu_1": 0.1}"#).unwrap_err();
        assert!(err.to_string().contains("unknown field"));
        let h: Hyperparameters = serde_json::from_str(r#"{"lambda": 10, "instrument_mode": "selection"}"#).unwrap();
        assert_eq!(h.lambda, 10.0);
        assert_eq!(h.instrument_mode, InstrumentMode::Selection);
    }
}
