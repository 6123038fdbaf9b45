//! Model parameters for both forms of the degenerate diffusion equation and
//! the exact algebra connecting them.
//!
//! Non-divergence form:  tau0 u_t + u^gamma |u_x|^beta (drift u_x - (sigma^2/2) u_xx) = 0
//! Divergence form:      v_t = q0 (v^gamma0 |v_x|^m v_x)_x
//!
//! With alpha = gamma / (1 - gamma) and u = v^(alpha+1), a solution of the
//! first maps onto a solution of the second with gamma0 = alpha (beta + 1),
//! m = beta, and q0 = (sigma^2 / 2) (alpha + 1)^beta / (beta + 1). The
//! 1/(beta+1) comes from (|u_x|^beta u_x)_x = (beta+1) |u_x|^beta u_xx when
//! the second-derivative form is rewritten as a divergence; the identity is
//! exercised numerically by the mapping-residual diagnostic.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Parameters of the non-divergence equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NonDivParams {
    /// Exponent of u in the diffusivity.
    pub gamma: f64,
    /// Exponent of |u_x| in the diffusivity.
    pub beta: f64,
    /// Jump variance sigma^2 > 0.
    pub sigma2: f64,
    /// Time scale tau0 > 0.
    pub tau0: f64,
    /// Expected drift. Retained for the residual form; must be 0 for all
    /// numerical operations.
    pub drift: f64,
}

impl NonDivParams {
    pub fn new(gamma: f64, beta: f64, sigma2: f64, tau0: f64, drift: f64) -> Result<Self> {
        if !(sigma2 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "sigma2 must be positive, got {sigma2}"
            )));
        }
        if !(tau0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tau0 must be positive, got {tau0}"
            )));
        }
        if !gamma.is_finite() || !beta.is_finite() || !drift.is_finite() {
            return Err(Error::InvalidParameter(
                "gamma, beta and drift must be finite".into(),
            ));
        }
        Ok(Self {
            gamma,
            beta,
            sigma2,
            tau0,
            drift,
        })
    }

    /// Check the extra requirements of the numerical modules (1D, no drift).
    pub fn validate_for_numerics(&self) -> Result<()> {
        if self.drift != 0.0 {
            return Err(Error::InvalidParameter(format!(
                "numerical operations require drift = 0, got {}",
                self.drift
            )));
        }
        Ok(())
    }

    /// Map to the divergence-form parameters.
    pub fn to_divergence(&self) -> Result<DivParams> {
        to_divergence(self)
    }
}

/// Parameters of the divergence-form equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DivParams {
    /// Exponent of v in the flux, gamma0 >= 0.
    pub gamma0: f64,
    /// Exponent of |v_x| in the flux, m > -1 (m >= 0 fully supported).
    pub m: f64,
    /// Flux coefficient q0 > 0 (removable by rescaling time).
    pub q0: f64,
    /// The mapping exponent: u = v^(alpha + 1).
    pub alpha: f64,
}

impl DivParams {
    /// Build from the divergence-form exponents directly. `alpha` is filled
    /// in as gamma0 / (m + 1), the value consistent with the mapping.
    pub fn new(gamma0: f64, m: f64, q0: f64) -> Result<Self> {
        if !(gamma0 >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma0 must be nonnegative, got {gamma0}"
            )));
        }
        if !(m > -1.0) {
            return Err(Error::InvalidParameter(format!(
                "m must be greater than -1, got {m}"
            )));
        }
        if !(q0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "q0 must be positive, got {q0}"
            )));
        }
        Ok(Self {
            gamma0,
            m,
            q0,
            alpha: gamma0 / (m + 1.0),
        })
    }

    /// Same parameters with q0 normalized to 1 (time variable t' = q0 t).
    pub fn normalized(&self) -> Self {
        Self { q0: 1.0, ..*self }
    }
}

/// alpha = gamma / (1 - gamma), the mapping exponent. Requires 0 <= gamma < 1.
pub fn alpha_from_gamma(gamma: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::GammaOutOfRange(gamma));
    }
    Ok(gamma / (1.0 - gamma))
}

/// Inverse of [`alpha_from_gamma`]: gamma = alpha / (1 + alpha).
pub fn gamma_from_alpha(alpha: f64) -> Result<f64> {
    if !(alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be nonnegative, got {alpha}"
        )));
    }
    Ok(alpha / (1.0 + alpha))
}

/// Map non-divergence parameters to the equivalent divergence form.
pub fn to_divergence(p: &NonDivParams) -> Result<DivParams> {
    p.validate_for_numerics()?;
    let alpha = alpha_from_gamma(p.gamma)?;
    Ok(DivParams {
        gamma0: alpha * (p.beta + 1.0),
        m: p.beta,
        q0: 0.5 * p.sigma2 * (alpha + 1.0).powf(p.beta) / (p.beta + 1.0),
        alpha,
    })
}

/// Pointwise mapping u = v^(alpha + 1). Preserves zeros, so the support of u
/// equals the support of v. A negative entry signals a solver undershoot and
/// is an error.
pub fn map_v_to_u(v: &[f64], alpha: f64) -> Result<Vec<f64>> {
    if !(alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "alpha must be nonnegative, got {alpha}"
        )));
    }
    let expo = alpha + 1.0;
    v.iter()
        .enumerate()
        .map(|(index, &value)| {
            if value < 0.0 {
                Err(Error::NegativeValue { index, value })
            } else {
                Ok(value.powf(expo))
            }
        })
        .collect()
}

/// Rescaled time t' = q0 t, in which the divergence equation is
/// coefficient-free.
pub fn rescale_time(t: f64, q0: f64) -> Result<f64> {
    if !(q0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "q0 must be positive, got {q0}"
        )));
    }
    Ok(q0 * t)
}
