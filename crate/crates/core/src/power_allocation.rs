//! Splitting the total power `P` between the satellite (`alpha P`) and the
//! jamming relay (`(1 - alpha) P`).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::RelayLinkModel;
use crate::error::{Error, Result};
use crate::secrecy::{
    check_alpha, secrecy_capacity_alpha, sop_closed_rayleigh, sop_closed_rician, SecrecyParams,
    SnrBundle,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AllocationMethod {
    Uniform,
    OptimalInstantaneous,
    StatisticalTraversal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AllocationResult {
    pub alpha: f64,
    pub method: AllocationMethod,
    /// Secrecy capacity reached at `alpha` (optimal), closed-form SOP at
    /// `alpha` (traversal), or `None` (uniform).
    pub objective: Option<f64>,
}

pub fn alpha_uniform() -> AllocationResult {
    AllocationResult {
        alpha: 0.5,
        method: AllocationMethod::Uniform,
        objective: None,
    }
}

fn check_gammas(op: &'static str, gamma_sd: f64, gamma_re: f64) -> Result<()> {
    for g in [gamma_sd, gamma_re] {
        if !(g > 0.0) || !g.is_finite() {
            return Err(Error::domain(
                op,
                format!("gamma {g} must be positive and finite"),
            ));
        }
    }
    Ok(())
}

/// `F(alpha) = (1 + alpha g_sd) / (1 + alpha g_sd / ((1 - alpha) g_re + 1))`
/// written as a rational function of `alpha`; `log2 F` is the secrecy capacity.
pub fn objective_f(alpha: f64, gamma_sd: f64, gamma_re: f64) -> Result<f64> {
    check_alpha("objective_f", alpha)?;
    check_gammas("objective_f", gamma_sd, gamma_re)?;
    let num = -gamma_sd * gamma_re * alpha * alpha
        + (gamma_sd * gamma_re + gamma_sd - gamma_re) * alpha
        + gamma_re
        + 1.0;
    let den = (gamma_sd - gamma_re) * alpha + gamma_re + 1.0;
    if !(den > 0.0) {
        return Err(Error::Degenerate {
            op: "objective_f",
            reason: format!("denominator {den} is not positive"),
        });
    }
    Ok(num / den)
}

/// Maximizer of [`objective_f`] over `(0, 1)`:
///
/// `alpha* = (g_re + 1 - sqrt((g_re + 1)(g_sd + 1))) / (g_re - g_sd)`,
///
/// evaluated as `sqrt(g_re + 1) / (sqrt(g_re + 1) + sqrt(g_sd + 1))`, which is
/// the same number without the cancellation near `g_re = g_sd`.
pub fn alpha_optimal(gamma_sd: f64, gamma_re: f64) -> Result<AllocationResult> {
    check_gammas("alpha_optimal", gamma_sd, gamma_re)?;
    let alpha = if (gamma_re - gamma_sd).abs() <= 1e-9 * gamma_re.max(gamma_sd) {
        0.5
    } else {
        let a = (gamma_re + 1.0).sqrt();
        let b = (gamma_sd + 1.0).sqrt();
        a / (a + b)
    };
    Ok(AllocationResult {
        alpha,
        method: AllocationMethod::OptimalInstantaneous,
        objective: Some(secrecy_capacity_alpha(
            alpha,
            &SnrBundle::similar(gamma_sd, gamma_re),
        )?),
    })
}

/// [`alpha_optimal`] from one trial's channel gains.
pub fn alpha_optimal_from_channels(
    big_p: f64,
    h_sd_norm_sq: f64,
    residual: f64,
    noise_bob: f64,
    noise_eve: f64,
) -> Result<AllocationResult> {
    for v in [big_p, noise_bob, noise_eve] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::domain(
                "alpha_optimal_from_channels",
                format!("power and noise values must be positive, got {v}"),
            ));
        }
    }
    alpha_optimal(
        big_p * h_sd_norm_sq / noise_bob,
        big_p * residual / noise_eve,
    )
}

/// Inputs of the statistical-CSI traversal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraversalConfig {
    /// Grid step `delta_alpha`.
    pub step: f64,
    pub relay_link_model: RelayLinkModel,
    /// `E[||h_sd||^2]`, used as the deterministic satellite gain.
    pub mean_power_sd: f64,
    /// `E[||h_re||^2]` of the chosen relay.
    pub mean_power_re: f64,
    /// Rician factor of the relay-to-Eve link; ignored for Rayleigh links.
    pub rician_k_re: f64,
    pub big_p: f64,
    pub params: SecrecyParams,
    pub n_r: u32,
}

impl TraversalConfig {
    pub fn validate(&self) -> Result<()> {
        const OP: &str = "TraversalConfig";
        if !(self.step > 0.0 && self.step < 0.5) {
            return Err(Error::domain(
                OP,
                format!("step {} must lie in (0, 0.5)", self.step),
            ));
        }
        for (name, v) in [
            ("mean_power_sd", self.mean_power_sd),
            ("mean_power_re", self.mean_power_re),
            ("big_p", self.big_p),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(OP, format!("{name} {v} must be positive")));
            }
        }
        if self.relay_link_model == RelayLinkModel::Rician
            && (!(self.rician_k_re >= 0.0) || !self.rician_k_re.is_finite())
        {
            return Err(Error::domain(
                OP,
                format!("rician_k_re {} invalid", self.rician_k_re),
            ));
        }
        if self.n_r < 2 {
            return Err(Error::domain(OP, format!("n_r {} must be >= 2", self.n_r)));
        }
        self.params.validate()
    }

    /// `{step * i : i = 1, ..., ceil(1 / step) - 1}`.
    pub fn grid(&self) -> Vec<f64> {
        let n = (1.0 / self.step - 1e-9).ceil() as usize - 1;
        (1..=n).map(|i| self.step * i as f64).collect()
    }

    /// Closed-form SOP at `alpha` for these statistics.
    pub fn sop_at(&self, alpha: f64) -> Result<f64> {
        let k = match self.relay_link_model {
            RelayLinkModel::Rayleigh => 0.0,
            RelayLinkModel::Rician => self.rician_k_re,
        };
        let sigma_re_sq = self.mean_power_re / (2.0 * self.n_r as f64 * (k + 1.0));
        match self.relay_link_model {
            RelayLinkModel::Rayleigh => sop_closed_rayleigh(
                alpha,
                self.big_p,
                self.mean_power_sd,
                &self.params,
                self.n_r,
                sigma_re_sq,
            ),
            RelayLinkModel::Rician => sop_closed_rician(
                alpha,
                self.big_p,
                self.mean_power_sd,
                &self.params,
                self.n_r,
                (k * self.mean_power_re / (k + 1.0)).sqrt(),
                sigma_re_sq,
            ),
        }
    }
}

/// Grid search of the closed-form SOP; the first grid point wins ties.
pub fn alpha_statistical(cfg: &TraversalConfig) -> Result<AllocationResult> {
    cfg.validate()?;
    let grid = cfg.grid();
    let sops = grid
        .par_iter()
        .map(|&a| cfg.sop_at(a))
        .collect::<Result<Vec<f64>>>()?;
    let mut best = 0;
    for (i, &s) in sops.iter().enumerate() {
        if s < sops[best] {
            best = i;
        }
    }
    Ok(AllocationResult {
        alpha: grid[best],
        method: AllocationMethod::StatisticalTraversal,
        objective: Some(sops[best]),
    })
}
