//! Closed-form self-similar point-source solution of the divergence-form
//! equation v_t = (v^gamma0 |v_x|^m v_x)_x.
//!
//! The solution is v(x, t) = V t^(-nu) f(xi) with xi = x t^(-nu) / eta_f,
//! where f is an even compactly supported profile on [-1, 1],
//! nu = 1 / (gamma0 + 2m + 2) and the front constant eta_f is fixed by unit
//! total mass. Two independent routes to eta_f are provided: the closed
//! Gamma-function expression and direct quadrature of the profile.

use crate::error::{Error, Result};
use crate::params::DivParams;
use crate::quadrature;
use crate::special;
use serde::{Deserialize, Serialize};

/// Derivative of the profile, tagged so that the singular front case
/// (gamma0 > 1, |f'| -> infinity as |xi| -> 1 from inside) is an explicit
/// value rather than a raw infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Slope {
    /// Finite derivative value.
    Finite(f64),
    /// |f'| diverges approaching the front from inside; the sign there is
    /// -sign(xi).
    SingularAtFront,
}

impl Slope {
    pub fn value(&self) -> Option<f64> {
        match self {
            Slope::Finite(v) => Some(*v),
            Slope::SingularAtFront => None,
        }
    }

    pub fn is_singular(&self) -> bool {
        matches!(self, Slope::SingularAtFront)
    }
}

fn validate_profile_params(gamma0: f64, m: f64) -> Result<()> {
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
    if !(gamma0 + m > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "profile requires gamma0 + m > 0, got {gamma0} + {m}"
        )));
    }
    Ok(())
}

/// Spreading exponent nu = 1 / (gamma0 + 2m + 2).
pub fn exponent_nu(gamma0: f64, m: f64) -> Result<f64> {
    let denom = gamma0 + 2.0 * m + 2.0;
    if !(denom > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "spreading-exponent denominator gamma0 + 2m + 2 = {denom} must be positive"
        )));
    }
    Ok(1.0 / denom)
}

/// Profile coefficient A, inner exponent p and outer exponent s, so that
/// f(xi) = [A (1 - |xi|^p)]^s.
fn profile_coefficients(gamma0: f64, m: f64) -> (f64, f64, f64) {
    let denom = gamma0 + 2.0 * m + 2.0;
    let a = (gamma0 + m) / (m + 2.0) * denom.powf(-1.0 / (m + 1.0));
    let p = (m + 2.0) / (m + 1.0);
    let s = (m + 1.0) / (gamma0 + m);
    (a, p, s)
}

/// The similarity profile f(xi). Even in xi, zero at |xi| >= 1 (compact
/// support; out-of-support arguments are not an error).
pub fn profile_f(xi: f64, gamma0: f64, m: f64) -> Result<f64> {
    validate_profile_params(gamma0, m)?;
    let xi = xi.abs();
    if xi >= 1.0 {
        return Ok(0.0);
    }
    let (a, p, s) = profile_coefficients(gamma0, m);
    Ok((a * (1.0 - xi.powf(p))).powf(s))
}

/// The profile derivative f'(xi), odd in xi. At the front (|xi| = 1) the
/// value depends on (1 - gamma0) / (gamma0 + m): zero when positive, the
/// finite limit -(gamma0 + 2m + 2)^(-1/(m+1)) when gamma0 = 1, and a tagged
/// singularity when negative.
pub fn profile_fprime(xi: f64, gamma0: f64, m: f64) -> Result<Slope> {
    validate_profile_params(gamma0, m)?;
    let sign = if xi < 0.0 { -1.0 } else { 1.0 };
    let xi = xi.abs();
    if xi > 1.0 {
        return Ok(Slope::Finite(0.0));
    }
    if xi == 1.0 {
        return Ok(match front_slope(gamma0, m)? {
            Slope::Finite(v) => Slope::Finite(sign * v),
            Slope::SingularAtFront => Slope::SingularAtFront,
        });
    }
    let (a, p, _) = profile_coefficients(gamma0, m);
    let nu = 1.0 / (gamma0 + 2.0 * m + 2.0);
    let value = -nu.powf(1.0 / (m + 1.0))
        * xi.powf(1.0 / (m + 1.0))
        * (a * (1.0 - xi.powf(p))).powf((1.0 - gamma0) / (gamma0 + m));
    Ok(Slope::Finite(sign * value))
}

/// Limit of f' as xi -> 1 from inside.
pub fn front_slope(gamma0: f64, m: f64) -> Result<Slope> {
    validate_profile_params(gamma0, m)?;
    let regularity = (1.0 - gamma0) / (gamma0 + m);
    Ok(if regularity > 0.0 {
        Slope::Finite(0.0)
    } else if regularity == 0.0 {
        // gamma0 = 1: the bracket in f' carries exponent zero, leaving the
        // finite limit -(gamma0 + 2m + 2)^(-1/(m+1)).
        Slope::Finite(-(gamma0 + 2.0 * m + 2.0).powf(-1.0 / (m + 1.0)))
    } else {
        Slope::SingularAtFront
    })
}

/// Front constant from the closed Gamma-function expression.
pub fn front_constant_gamma(gamma0: f64, m: f64) -> Result<f64> {
    validate_profile_params(gamma0, m)?;
    let denom = gamma0 + 2.0 * m + 2.0;
    let a = (m + 1.0) / (m + 2.0);
    let b = (m + 1.0) / (m + gamma0);
    let ratio = special::gamma(a + b + 1.0)? / (special::gamma(a)? * special::gamma(b + 1.0)?);
    let bracket = 0.5 * (m + 2.0) / (m + 1.0) * ratio;
    Ok(((m + 2.0) / (gamma0 + m)).powf((m + 1.0) / denom)
        * denom.powf(1.0 / denom)
        * bracket.powf((gamma0 + m) / denom))
}

/// Front constant by quadrature of the profile, the independent oracle for
/// [`front_constant_gamma`]: eta_f = [integral of f over (-1, 1)]^(-(gamma0+m)/(gamma0+2m+2)).
pub fn front_constant_quadrature(gamma0: f64, m: f64) -> Result<f64> {
    validate_profile_params(gamma0, m)?;
    let (a, p, s) = profile_coefficients(gamma0, m);
    let half = quadrature::integrate(
        |xi| (a * (1.0 - xi.powf(p))).powf(s),
        0.0,
        1.0,
        1e-12,
    )?;
    let integral = 2.0 * half.value;
    let denom = gamma0 + 2.0 * m + 2.0;
    Ok(integral.powf(-(gamma0 + m) / denom))
}

/// Residual of the first integral nu xi f + f^gamma0 |f'|^m f' of the
/// profile ODE, evaluated with the closed forms. Zero up to roundoff for
/// every valid (xi, gamma0, m) with 0 < xi < 1.
pub fn first_integral_residual(xi: f64, gamma0: f64, m: f64) -> Result<f64> {
    if !(xi > 0.0 && xi < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "first integral is checked on 0 < xi < 1, got {xi}"
        )));
    }
    let nu = exponent_nu(gamma0, m)?;
    let f = profile_f(xi, gamma0, m)?;
    let fp = match profile_fprime(xi, gamma0, m)? {
        Slope::Finite(v) => v,
        Slope::SingularAtFront => unreachable!("interior slope is finite"),
    };
    // f' < 0 on (0, 1), so |f'|^m f' = -(-f')^(m+1).
    Ok(nu * xi * f - f.powf(gamma0) * (-fp).powf(m + 1.0))
}

/// Precomputed self-similar point-source solution with unit mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelfSimilarSolution {
    /// Divergence-form exponents with q0 normalized away.
    pub params: DivParams,
    /// Spreading exponent.
    pub nu: f64,
    /// Front constant.
    pub eta_f: f64,
    /// Amplitude V = eta_f^((m+2)/(gamma0+m)).
    pub amplitude: f64,
    /// Total mass (fixed to 1 by the normalization).
    pub mass: f64,
}

impl SelfSimilarSolution {
    pub fn new(gamma0: f64, m: f64) -> Result<Self> {
        validate_profile_params(gamma0, m)?;
        let nu = exponent_nu(gamma0, m)?;
        let eta_f = front_constant_gamma(gamma0, m)?;
        let amplitude = eta_f.powf((m + 2.0) / (gamma0 + m));
        Ok(Self {
            params: DivParams::new(gamma0, m, 1.0)?,
            nu,
            eta_f,
            amplitude,
            mass: 1.0,
        })
    }

    /// v(x, t) = V t^(-nu) f(x t^(-nu) / eta_f). Zero for |x| beyond the
    /// front. The point-source solution is singular at t = 0, so t must be
    /// positive.
    pub fn evaluate(&self, x: f64, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "self-similar solution requires t > 0, got {t}"
            )));
        }
        let scale = t.powf(-self.nu);
        let xi = x * scale / self.eta_f;
        Ok(self.amplitude * scale * profile_f(xi, self.params.gamma0, self.params.m)?)
    }

    /// Front position x_f(t) = eta_f t^nu.
    pub fn front_position(&self, t: f64) -> Result<f64> {
        if !(t > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "front position requires t > 0, got {t}"
            )));
        }
        Ok(self.eta_f * t.powf(self.nu))
    }
}
