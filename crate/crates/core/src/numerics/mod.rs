//! Special functions and quadrature behind the closed-form outage
//! expressions: modified Bessel functions of the first kind, the
//! generalized Marcum Q-function, central and non-central chi-square laws
//! with an even number of degrees of freedom, and adaptive Simpson
//! integration.
//!
//! Every function here is pure. Probabilities are clamped to `[0, 1]`
//! before they are returned.

mod bessel;
mod chi2;
mod quad;

pub use bessel::{bessel_i, bessel_i_scaled, ln_bessel_i};
pub use chi2::{
    chi2_cdf_even, marcum_q, marcum_q_with, noncentral_chi2_cdf, noncentral_chi2_cdf_with,
    noncentral_chi2_pdf,
};
pub use quad::integrate;

use crate::error::{Error, Result};

/// Largest Bessel order / Marcum-Q index accepted by this module.
pub const MAX_ORDER: u32 = 64;

/// Truncation and budget settings shared by the series and quadrature code.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ToleranceConfig {
    /// Absolute truncation tolerance for infinite series.
    pub series_tol: f64,
    /// Absolute tolerance for adaptive quadrature.
    pub quad_tol: f64,
    pub max_terms: usize,
    pub max_subdivisions: usize,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            series_tol: 1e-12,
            quad_tol: 1e-9,
            max_terms: 200_000,
            max_subdivisions: 1_000_000,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let ok = self.series_tol > 0.0
            && self.series_tol.is_finite()
            && self.quad_tol > 0.0
            && self.quad_tol.is_finite()
            && self.max_terms >= 1
            && self.max_subdivisions >= 1;
        if ok {
            Ok(())
        } else {
            Err(Error::domain(
                "ToleranceConfig",
                format!("invalid tolerances {self:?}"),
            ))
        }
    }
}

pub(crate) fn clamp_probability(p: f64) -> f64 {
    p.clamp(0.0, 1.0)
}

/// `ln(n!)` by direct summation; callers only need modest `n`.
pub(crate) fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}
