//! SINRs, secrecy capacity and secrecy outage probability (SOP).
//!
//! The satellite-to-Eve link is taken equal to the satellite-to-Bob link
//! throughout (the "similar channels" regime), so Eve's only handicap is the
//! artificial noise that leaks through the relay's null-space precoder.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{
    null_space_basis, residual_interference_power, sample_channel, sample_modeled_residual,
    ChannelModel, ChannelSpec,
};
use crate::error::{Error, Result};
use crate::numerics::{
    chi2_cdf_even, clamp_probability, integrate, marcum_q_with, noncentral_chi2_cdf_with,
    noncentral_chi2_pdf, ToleranceConfig,
};
use crate::rng::{LinkLabel, RngStreams};

/// Smallest Monte-Carlo run accepted by [`sop_monte_carlo`].
pub const MIN_TRIALS: u64 = 1000;

const MC_BATCH: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SecrecyParams {
    /// Target secrecy rate `R_s` in bit/s/Hz.
    pub rate_threshold: f64,
    pub noise_bob: f64,
    pub noise_eve: f64,
}

impl SecrecyParams {
    pub fn new(rate_threshold: f64, noise_bob: f64, noise_eve: f64) -> Result<Self> {
        let p = Self {
            rate_threshold,
            noise_bob,
            noise_eve,
        };
        p.validate()?;
        Ok(p)
    }

    /// Unit noise at both receivers.
    pub fn unit_noise(rate_threshold: f64) -> Result<Self> {
        Self::new(rate_threshold, 1.0, 1.0)
    }

    /// A zero rate is accepted: it asks whether secrecy is positive at all.
    pub fn validate(&self) -> Result<()> {
        if !(self.rate_threshold >= 0.0) || !self.rate_threshold.is_finite() {
            return Err(Error::domain(
                "SecrecyParams",
                format!(
                    "rate_threshold {} must be finite and >= 0",
                    self.rate_threshold
                ),
            ));
        }
        for (name, v) in [("noise_bob", self.noise_bob), ("noise_eve", self.noise_eve)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(
                    "SecrecyParams",
                    format!("{name} {v} must be positive and finite"),
                ));
            }
        }
        Ok(())
    }

    /// `2^{R_s}`.
    pub fn rate_factor(&self) -> f64 {
        self.rate_threshold.exp2()
    }
}

/// Total power and the share `alpha` given to the satellite.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerSplit {
    pub total: f64,
    pub alpha: f64,
}

impl PowerSplit {
    pub fn new(total: f64, alpha: f64) -> Result<Self> {
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::domain(
                "PowerSplit",
                format!("total power {total} must be positive and finite"),
            ));
        }
        check_alpha("PowerSplit", alpha)?;
        Ok(Self { total, alpha })
    }

    pub fn satellite_power(&self) -> f64 {
        self.alpha * self.total
    }

    pub fn relay_power(&self) -> f64 {
        (1.0 - self.alpha) * self.total
    }
}

pub(crate) fn check_alpha(op: &'static str, alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(
            op,
            format!("alpha {alpha} must lie in (0, 1)"),
        ))
    }
}

/// SNRs normalized by the total power `P`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrBundle {
    pub gamma_sd: f64,
    pub gamma_se: f64,
    pub gamma_rd: f64,
    pub gamma_re: f64,
}

impl SnrBundle {
    /// Bundle for the similar-channel regime, `gamma_se = gamma_sd`.
    pub fn similar(gamma_sd: f64, gamma_re: f64) -> Self {
        Self {
            gamma_sd,
            gamma_se: gamma_sd,
            gamma_rd: 0.0,
            gamma_re,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SopMethod {
    MonteCarlo,
    Quadrature,
    ClosedForm,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SopEstimate {
    pub value: f64,
    /// Half-width of the 95% confidence interval; zero for deterministic methods.
    pub half_width_95: f64,
    pub trials: u64,
    pub method: SopMethod,
}

fn check_noise(op: &'static str, noise: f64) -> Result<()> {
    if noise > 0.0 && noise.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(
            op,
            format!("noise power {noise} must be positive"),
        ))
    }
}

pub fn sinr_bob(p_s: f64, h_sd_norm_sq: f64, noise_bob: f64) -> Result<f64> {
    check_noise("sinr_bob", noise_bob)?;
    Ok(p_s * h_sd_norm_sq / noise_bob)
}

pub fn sinr_eve(
    p_s: f64,
    h_se_norm_sq: f64,
    p_r: f64,
    residual: f64,
    noise_eve: f64,
) -> Result<f64> {
    check_noise("sinr_eve", noise_eve)?;
    let jamming = if p_r == 0.0 { 0.0 } else { p_r * residual };
    Ok(p_s * h_se_norm_sq / (jamming + noise_eve))
}

/// `[log2(1 + gamma_d) - log2(1 + gamma_e)]^+`.
pub fn secrecy_capacity(gamma_d: f64, gamma_e: f64) -> f64 {
    (gamma_d.ln_1p() - gamma_e.ln_1p()).max(0.0) / std::f64::consts::LN_2
}

/// Secrecy capacity under the split `P_s = alpha P`, `P_r = (1 - alpha) P`.
pub fn secrecy_capacity_alpha(alpha: f64, snr: &SnrBundle) -> Result<f64> {
    check_alpha("secrecy_capacity_alpha", alpha)?;
    let gamma_d = alpha * snr.gamma_sd;
    let gamma_e = alpha * snr.gamma_se / ((1.0 - alpha) * snr.gamma_re + 1.0);
    Ok(secrecy_capacity(gamma_d, gamma_e))
}

/// 95% half-width for `events` successes out of `trials`.
///
/// Uses the normal approximation, switching to the Wilson score interval
/// when either the event or the non-event count is below 10. The Wilson
/// interval is not centred on the point estimate; the larger of its two
/// sides is reported.
pub fn ci95_half_width(events: u64, trials: u64) -> f64 {
    const Z: f64 = 1.959_963_984_540_054;
    if trials == 0 {
        return 0.0;
    }
    let n = trials as f64;
    let p = events as f64 / n;
    if events.min(trials - events) >= 10 {
        return Z * (p * (1.0 - p) / n).sqrt();
    }
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n;
    let centre = (p + z2 / (2.0 * n)) / denom;
    let spread = Z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    (p - (centre - spread)).max(centre + spread - p)
}

/// How the residual interference is drawn in Monte-Carlo runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResidualModel {
    /// Sample both relay links and project through the null-space basis.
    Physical,
    /// Draw the residual directly from the law assumed by the analysis.
    Modeled,
}

/// The links of one satellite/relay pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkSetup {
    pub satellite: ChannelSpec,
    pub relay_bob: ChannelSpec,
    pub relay_eve: ChannelSpec,
    pub residual: ResidualModel,
}

impl LinkSetup {
    pub fn validate(&self) -> Result<()> {
        if self.relay_bob.dim != self.relay_eve.dim {
            return Err(Error::DimensionMismatch {
                op: "LinkSetup",
                expected: self.relay_bob.dim,
                actual: self.relay_eve.dim,
            });
        }
        if self.relay_eve.dim < 2 {
            return Err(Error::domain(
                "LinkSetup",
                "relays need at least 2 antennas",
            ));
        }
        Ok(())
    }

    /// One trial's `||h_sd||^2`.
    pub fn draw_gain(&self, streams: &RngStreams, trial: u64) -> f64 {
        if self.satellite.model == ChannelModel::GaussianApprox {
            return self.satellite.mean_power;
        }
        let mut rng = streams.stream(trial, LinkLabel::Satellite);
        sample_channel(&self.satellite, &mut rng).norm_sq()
    }

    /// One trial's residual interference power of relay `relay`.
    pub fn draw_residual(&self, streams: &RngStreams, trial: u64, relay: u32) -> Result<f64> {
        match self.residual {
            ResidualModel::Modeled => {
                let mut rng = streams.stream(trial, LinkLabel::ModeledResidual(relay));
                Ok(sample_modeled_residual(&self.relay_eve, &mut rng))
            }
            ResidualModel::Physical => {
                let h_rd = sample_channel(
                    &self.relay_bob,
                    &mut streams.stream(trial, LinkLabel::RelayBob(relay)),
                );
                let h_re = sample_channel(
                    &self.relay_eve,
                    &mut streams.stream(trial, LinkLabel::RelayEve(relay)),
                );
                residual_interference_power(&h_re, &null_space_basis(&h_rd)?)
            }
        }
    }
}

/// True when a trial with gain `x` and residual `r` is in secrecy outage.
pub fn is_outage(split: &PowerSplit, params: &SecrecyParams, gain: f64, residual: f64) -> bool {
    let p_s = split.satellite_power();
    let gamma_d = p_s * gain / params.noise_bob;
    let gamma_e = p_s * gain / (split.relay_power() * residual + params.noise_eve);
    secrecy_capacity(gamma_d, gamma_e) < params.rate_threshold
}

/// Fraction of trials with `C_s < R_s`, trial `t` drawing from stream `t`.
pub fn sop_monte_carlo(
    setup: &LinkSetup,
    split: &PowerSplit,
    params: &SecrecyParams,
    trials: u64,
    streams: &RngStreams,
) -> Result<SopEstimate> {
    setup.validate()?;
    params.validate()?;
    if trials < MIN_TRIALS {
        return Err(Error::domain(
            "sop_monte_carlo",
            format!("trials {trials} below the minimum {MIN_TRIALS}"),
        ));
    }
    let batches = trials.div_ceil(MC_BATCH);
    let events = (0..batches)
        .into_par_iter()
        .map(|b| {
            let mut count = 0u64;
            for t in b * MC_BATCH..((b + 1) * MC_BATCH).min(trials) {
                let gain = setup.draw_gain(streams, t);
                let residual = setup.draw_residual(streams, t, 0)?;
                count += is_outage(split, params, gain, residual) as u64;
            }
            Ok(count)
        })
        .sum::<Result<u64>>()?;
    Ok(SopEstimate {
        value: events as f64 / trials as f64,
        half_width_95: ci95_half_width(events, trials),
        trials,
        method: SopMethod::MonteCarlo,
    })
}

/// Law of the residual interference power assumed by the analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualLaw {
    /// Number of complex dimensions, `N_r - 1`.
    pub half_dof: u32,
    pub noncentrality: f64,
    pub component_variance: f64,
}

impl ResidualLaw {
    pub fn for_relay(relay_eve: &ChannelSpec) -> Result<Self> {
        if relay_eve.model == ChannelModel::GaussianApprox {
            return Err(Error::domain(
                "ResidualLaw",
                "relay links must be Rayleigh or Rician",
            ));
        }
        if relay_eve.dim < 2 {
            return Err(Error::domain(
                "ResidualLaw",
                "relays need at least 2 antennas",
            ));
        }
        Ok(Self {
            half_dof: relay_eve.dim as u32 - 1,
            noncentrality: relay_eve.noncentrality(),
            component_variance: relay_eve.component_variance(),
        })
    }

    pub fn cdf(&self, r: f64, cfg: &ToleranceConfig) -> Result<f64> {
        if r == f64::INFINITY {
            return Ok(1.0);
        }
        if self.noncentrality == 0.0 {
            chi2_cdf_even(self.half_dof, r, self.component_variance)
        } else {
            noncentral_chi2_cdf_with(
                self.half_dof,
                self.noncentrality,
                r,
                self.component_variance,
                cfg,
            )
        }
    }
}

/// Residual power below which a trial with Bob-side SNR `a = alpha P x / noise_bob`
/// is in outage; `+inf` when Bob's own rate cannot exceed `R_s`.
fn residual_threshold(a: f64, alpha: f64, params: &SecrecyParams, big_p: f64) -> f64 {
    let t = params.rate_factor();
    let d = 1.0 + a - t;
    if d <= 0.0 {
        return f64::INFINITY;
    }
    let v = (1.0 + a) * (t - 1.0) / (d * (1.0 - alpha));
    v * params.noise_eve / big_p
}

/// SOP by numerical integration over the law of `||h_sd||^2`:
///
/// `P_out = F_sd(x_0) + int_{x_0}^inf p_sd(x) F_re(V_re(x)) dx`
///
/// where below `x_0 = (2^{R_s} - 1) sigma_d^2 / (alpha P)` Bob's capacity alone
/// is short of `R_s`, and above it the outage event is `residual < V_re(x)`.
pub fn sop_quadrature(
    alpha: f64,
    big_p: f64,
    setup: &LinkSetup,
    params: &SecrecyParams,
    cfg: &ToleranceConfig,
) -> Result<SopEstimate> {
    const OP: &str = "sop_quadrature";
    check_alpha(OP, alpha)?;
    params.validate()?;
    cfg.validate()?;
    if !(big_p > 0.0) || !big_p.is_finite() {
        return Err(Error::domain(OP, format!("power {big_p} must be positive")));
    }
    let law = ResidualLaw::for_relay(&setup.relay_eve)?;
    let estimate = |value: f64| SopEstimate {
        value: clamp_probability(value),
        half_width_95: 0.0,
        trials: 1,
        method: SopMethod::Quadrature,
    };
    let outage_given_gain = |x: f64| -> Result<f64> {
        let a = alpha * big_p * x / params.noise_bob;
        law.cdf(residual_threshold(a, alpha, params, big_p), cfg)
    };

    let sat = &setup.satellite;
    if sat.model == ChannelModel::GaussianApprox {
        return Ok(estimate(outage_given_gain(sat.mean_power)?));
    }
    let half_dof = sat.dim as u32;
    let s_sd = sat.noncentrality();
    let var_sd = sat.component_variance();
    let cdf_sd = |x: f64| noncentral_chi2_cdf_with(half_dof, s_sd, x, var_sd, cfg);

    let x0 = (params.rate_factor() - 1.0) * params.noise_bob / (alpha * big_p);
    let below = cdf_sd(x0)?;

    let mean = s_sd * s_sd + 2.0 * half_dof as f64 * var_sd;
    let sd = 2.0 * (var_sd * (var_sd * half_dof as f64 + s_sd * s_sd)).sqrt();
    let mut x_hi = (mean + 10.0 * sd).max(x0 * 2.0 + sd);
    while 1.0 - cdf_sd(x_hi)? > 1e-14 {
        x_hi *= 2.0;
    }
    if x_hi <= x0 {
        return Ok(estimate(below));
    }

    let failure = std::cell::Cell::new(None);
    let integrand = |x: f64| -> f64 {
        let eval = || -> Result<f64> {
            Ok(noncentral_chi2_pdf(half_dof, s_sd, x, var_sd)? * outage_given_gain(x)?)
        };
        match eval() {
            Ok(v) => v,
            Err(e) => {
                failure.set(Some(e.to_string()));
                f64::NAN
            }
        }
    };
    let above = integrate(integrand, x0, x_hi, cfg);
    if let Some(reason) = failure.take() {
        return Err(Error::non_convergence(OP, reason));
    }
    Ok(estimate(below + above?))
}

fn closed_form_threshold(
    op: &'static str,
    alpha: f64,
    big_p: f64,
    gain_a: f64,
    params: &SecrecyParams,
    n_r: u32,
) -> Result<f64> {
    check_alpha(op, alpha)?;
    params.validate()?;
    if !(big_p > 0.0) || !big_p.is_finite() || !(gain_a > 0.0) || !gain_a.is_finite() {
        return Err(Error::domain(
            op,
            format!("power {big_p} and gain {gain_a} must be positive and finite"),
        ));
    }
    if n_r < 2 {
        return Err(Error::domain(op, format!("n_r {n_r} must be >= 2")));
    }
    let p_prime = big_p / params.noise_bob;
    let branch_point = (params.rate_factor() - 1.0) / (p_prime * gain_a);
    if alpha == branch_point {
        return Ok(f64::INFINITY);
    }
    Ok(residual_threshold(
        alpha * p_prime * gain_a,
        alpha,
        params,
        big_p,
    ))
}

/// Closed-form SOP with a deterministic satellite gain `gain_a` and Rayleigh
/// relay links (central chi-square residual with `N_r - 1` complex dimensions).
///
/// At and below the branch point `alpha = (2^{R_s} - 1) / (P' A)` Bob cannot
/// reach `R_s` and the SOP is 1.
pub fn sop_closed_rayleigh(
    alpha: f64,
    big_p: f64,
    gain_a: f64,
    params: &SecrecyParams,
    n_r: u32,
    sigma_re_sq: f64,
) -> Result<f64> {
    const OP: &str = "sop_closed_rayleigh";
    if !(sigma_re_sq > 0.0) || !sigma_re_sq.is_finite() {
        return Err(Error::domain(
            OP,
            format!("sigma_re_sq {sigma_re_sq} must be positive"),
        ));
    }
    let r = closed_form_threshold(OP, alpha, big_p, gain_a, params, n_r)?;
    if r == f64::INFINITY {
        return Ok(1.0);
    }
    chi2_cdf_even(n_r - 1, r, sigma_re_sq)
}

/// As [`sop_closed_rayleigh`] for Rician relay links, through
/// `1 - Q_{N_r - 1}(s_re / sigma_re, sqrt(r) / sigma_re)`.
pub fn sop_closed_rician(
    alpha: f64,
    big_p: f64,
    gain_a: f64,
    params: &SecrecyParams,
    n_r: u32,
    s_re: f64,
    sigma_re_sq: f64,
) -> Result<f64> {
    const OP: &str = "sop_closed_rician";
    if !(sigma_re_sq > 0.0) || !sigma_re_sq.is_finite() {
        return Err(Error::domain(
            OP,
            format!("sigma_re_sq {sigma_re_sq} must be positive"),
        ));
    }
    if !(s_re >= 0.0) || !s_re.is_finite() {
        return Err(Error::domain(
            OP,
            format!("s_re {s_re} must be finite and >= 0"),
        ));
    }
    let r = closed_form_threshold(OP, alpha, big_p, gain_a, params, n_r)?;
    if r == f64::INFINITY {
        return Ok(1.0);
    }
    let sigma = sigma_re_sq.sqrt();
    let q = marcum_q_with(
        n_r - 1,
        s_re / sigma,
        r.sqrt() / sigma,
        &ToleranceConfig::default(),
    )?;
    Ok(clamp_probability(1.0 - q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn setup(
        sat: ChannelSpec,
        relay_k: Option<f64>,
        n_r: usize,
        residual: ResidualModel,
    ) -> LinkSetup {
        let relay = match relay_k {
            None => ChannelSpec::rayleigh(n_r, 1.0).unwrap(),
            Some(k) => ChannelSpec::rician(n_r, k, 1.0).unwrap(),
        };
        LinkSetup {
            satellite: sat,
            relay_bob: relay,
            relay_eve: relay,
            residual,
        }
    }

    #[test]
    fn sinr_examples() {
        assert_eq!(sinr_bob(10.0, 1.0, 1.0).unwrap(), 10.0);
        assert_eq!(sinr_bob(0.0, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(sinr_bob(5.0, 2.0, 0.5).unwrap(), 20.0);
        assert!(sinr_bob(1.0, 1.0, 0.0).is_err());
        assert_eq!(sinr_eve(10.0, 1.0, 0.0, 123.0, 1.0).unwrap(), 10.0);
        assert_eq!(sinr_eve(10.0, 1.0, 10.0, 0.0, 1.0).unwrap(), 10.0);
        assert!((sinr_eve(10.0, 1.0, 10.0, 0.9, 1.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(sinr_eve(1.0, 1.0, 1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn capacity_examples() {
        assert_eq!(secrecy_capacity(7.0, 7.0), 0.0);
        assert!((secrecy_capacity(3.0, 1.0) - 1.0).abs() < 1e-15);
        assert_eq!(secrecy_capacity(1.0, 3.0), 0.0);
    }

    #[test]
    fn capacity_alpha_matches_direct_arithmetic() {
        let snr = SnrBundle::similar(10.0, 100.0);
        // log2(1 + 5) - log2(1 + 5 / 51)
        let want = (6.0f64).log2() - (1.0 + 5.0 / 51.0f64).log2();
        assert!((secrecy_capacity_alpha(0.5, &snr).unwrap() - want).abs() < 1e-14);
        for a in [0.1, 0.5, 0.9] {
            assert_eq!(
                secrecy_capacity_alpha(a, &SnrBundle::similar(10.0, 0.0)).unwrap(),
                0.0
            );
        }
        let mut last = -1.0;
        for re in [0.0, 1.0, 10.0, 100.0] {
            let c = secrecy_capacity_alpha(0.4, &SnrBundle::similar(10.0, re)).unwrap();
            assert!(c >= last);
            last = c;
        }
        assert!(secrecy_capacity_alpha(1.0, &snr).is_err());
        assert!(secrecy_capacity_alpha(0.0, &snr).is_err());
    }

    #[test]
    fn confidence_intervals() {
        let hw = ci95_half_width(500, 1000);
        assert!((hw - 1.959_963_984_540_054 * (0.25f64 / 1000.0).sqrt()).abs() < 1e-15);
        // Wilson upper bound for zero events is z^2 / (n + z^2)
        let z2 = 1.959_963_984_540_054f64.powi(2);
        assert!((ci95_half_width(0, 1000) - z2 / (1000.0 + z2)).abs() < 1e-12);
        assert!(ci95_half_width(1000, 1000) > 0.0);
        assert!(ci95_half_width(3, 1000) > 0.0);
    }

    #[test]
    fn params_validation() {
        assert!(SecrecyParams::new(1.0, 1.0, 1.0).is_ok());
        assert!(SecrecyParams::new(0.0, 1.0, 1.0).is_ok());
        assert!(SecrecyParams::new(-1.0, 1.0, 1.0).is_err());
        assert!(SecrecyParams::new(1.0, 0.0, 1.0).is_err());
        assert!(PowerSplit::new(10.0, 1.0).is_err());
        assert!(PowerSplit::new(0.0, 0.5).is_err());
        let s = PowerSplit::new(10.0, 0.3).unwrap();
        assert!((s.satellite_power() - 3.0).abs() < 1e-15 && (s.relay_power() - 7.0).abs() < 1e-15);
    }

    #[test]
    fn monte_carlo_trivial_rates() {
        let streams = RngStreams::new(1);
        let su = setup(
            ChannelSpec::rician(4, 10.0, 1.0).unwrap(),
            None,
            4,
            ResidualModel::Physical,
        );
        let split = PowerSplit::new(10.0, 0.5).unwrap();
        let zero = sop_monte_carlo(
            &su,
            &split,
            &SecrecyParams::unit_noise(0.0).unwrap(),
            5000,
            &streams,
        )
        .unwrap();
        assert_eq!(zero.value, 0.0);
        let huge = sop_monte_carlo(
            &su,
            &split,
            &SecrecyParams::unit_noise(1e3).unwrap(),
            5000,
            &streams,
        )
        .unwrap();
        assert_eq!(huge.value, 1.0);
        assert!(sop_monte_carlo(
            &su,
            &split,
            &SecrecyParams::unit_noise(1.0).unwrap(),
            999,
            &streams
        )
        .is_err());
    }

    #[test]
    fn secrecy_is_positive_on_every_trial() {
        let streams = RngStreams::new(2);
        let su = setup(
            ChannelSpec::rician(4, 10.0, 1.0).unwrap(),
            None,
            4,
            ResidualModel::Physical,
        );
        let split = PowerSplit::new(10.0, 0.5).unwrap();
        for t in 0..10_000 {
            let x = su.draw_gain(&streams, t);
            let r = su.draw_residual(&streams, t, 0).unwrap();
            let gd = sinr_bob(split.satellite_power(), x, 1.0).unwrap();
            let ge = sinr_eve(split.satellite_power(), x, split.relay_power(), r, 1.0).unwrap();
            assert!(secrecy_capacity(gd, ge) > 0.0);
        }
    }

    #[test]
    fn monte_carlo_is_deterministic_and_monotone_in_rate() {
        let streams = RngStreams::new(3);
        let su = setup(
            ChannelSpec::rician(4, 10.0, 1.0).unwrap(),
            None,
            4,
            ResidualModel::Physical,
        );
        let split = PowerSplit::new(10.0, 0.5).unwrap();
        let run = |rs: f64| {
            sop_monte_carlo(
                &su,
                &split,
                &SecrecyParams::unit_noise(rs).unwrap(),
                20_000,
                &streams,
            )
            .unwrap()
        };
        assert_eq!(run(1.5), run(1.5));
        let mut last = 0.0;
        for rs in [0.5, 1.0, 1.5, 2.0, 2.5] {
            let v = run(rs).value;
            assert!(v >= last, "rs={rs}");
            last = v;
        }
    }

    #[test]
    fn monte_carlo_matches_quadrature() {
        let su = setup(
            ChannelSpec::rician(4, 10.0, 1.0).unwrap(),
            None,
            4,
            ResidualModel::Physical,
        );
        let params = SecrecyParams::unit_noise(2.0).unwrap();
        let big_p = 10.0;
        let mc = sop_monte_carlo(
            &su,
            &PowerSplit::new(big_p, 0.5).unwrap(),
            &params,
            400_000,
            &RngStreams::new(4),
        )
        .unwrap();
        let q = sop_quadrature(0.5, big_p, &su, &params, &ToleranceConfig::default()).unwrap();
        let tol = (3.0 * mc.half_width_95).max(0.005);
        assert!(
            (mc.value - q.value).abs() <= tol,
            "mc {} quad {}",
            mc.value,
            q.value
        );
        assert_eq!(q.method, SopMethod::Quadrature);
        assert_eq!(q.half_width_95, 0.0);
    }

    #[test]
    fn quadrature_tends_to_one_when_bob_is_too_weak() {
        let su = setup(
            ChannelSpec::rician(4, 1e4, 1.0).unwrap(),
            None,
            4,
            ResidualModel::Physical,
        );
        let params = SecrecyParams::unit_noise(2.0).unwrap();
        // (2^2 - 1) / (P E[x]) = 0.3 at P = 10
        let q = sop_quadrature(0.25, 10.0, &su, &params, &ToleranceConfig::default()).unwrap();
        assert!(q.value > 0.999, "{}", q.value);
    }

    #[test]
    fn quadrature_at_large_k_matches_closed_form() {
        let su = setup(
            ChannelSpec::rician(4, 50.0, 1.0).unwrap(),
            None,
            4,
            ResidualModel::Physical,
        );
        let params = SecrecyParams::unit_noise(1.0).unwrap();
        for (alpha, big_p) in [(0.3, 10.0), (0.5, 10.0), (0.7, 31.6)] {
            let q =
                sop_quadrature(alpha, big_p, &su, &params, &ToleranceConfig::default()).unwrap();
            let c = sop_closed_rayleigh(alpha, big_p, 1.0, &params, 4, 1.0 / 8.0).unwrap();
            assert!(
                (q.value - c).abs() <= 0.01,
                "alpha={alpha}: {} vs {c}",
                q.value
            );
        }
    }

    #[test]
    fn quadrature_with_deterministic_satellite_is_the_closed_form() {
        let su = setup(
            ChannelSpec::gaussian_approx(4, 1.0).unwrap(),
            Some(1.0),
            4,
            ResidualModel::Modeled,
        );
        let params = SecrecyParams::unit_noise(1.0).unwrap();
        let q = sop_quadrature(0.5, 10.0, &su, &params, &ToleranceConfig::default()).unwrap();
        let law = ResidualLaw::for_relay(&su.relay_eve).unwrap();
        let c = sop_closed_rician(
            0.5,
            10.0,
            1.0,
            &params,
            4,
            law.noncentrality,
            law.component_variance,
        )
        .unwrap();
        assert!((q.value - c).abs() < 1e-10);
    }

    #[test]
    fn closed_form_branches() {
        let params = SecrecyParams::unit_noise(1.0).unwrap();
        // branch point (2 - 1) / (10 * 1) = 0.1
        assert_eq!(
            sop_closed_rayleigh(0.1, 10.0, 1.0, &params, 4, 0.125).unwrap(),
            1.0
        );
        assert_eq!(
            sop_closed_rician(0.1, 10.0, 1.0, &params, 4, 0.5, 0.0625).unwrap(),
            1.0
        );
        assert_eq!(
            sop_closed_rayleigh(0.05, 10.0, 1.0, &params, 4, 0.125).unwrap(),
            1.0
        );
        let above = sop_closed_rayleigh(0.1 + 1e-9, 10.0, 1.0, &params, 4, 0.125).unwrap();
        let below = sop_closed_rayleigh(0.1 - 1e-9, 10.0, 1.0, &params, 4, 0.125).unwrap();
        assert!(above > 0.99 && below > 0.99);
        let above = sop_closed_rician(0.1 + 1e-9, 10.0, 1.0, &params, 4, 0.5, 0.0625).unwrap();
        assert!(above > 0.99);
        // continuity on the open upper branch
        let mut prev = sop_closed_rayleigh(0.2, 10.0, 1.0, &params, 4, 0.125).unwrap();
        for i in 1..=600 {
            let a = 0.2 + i as f64 * 1e-3;
            let v = sop_closed_rayleigh(a, 10.0, 1.0, &params, 4, 0.125).unwrap();
            assert!((v - prev).abs() < 0.01, "jump at alpha={a}");
            prev = v;
        }
    }

    #[test]
    fn closed_form_matches_its_own_formula() {
        // x = (aPA + 1)(2^Rs - 1) / (2 P' (1 - a)(1 + aPA - 2^Rs) sigma^2), F = 1 - e^-x sum x^m / m!
        let (alpha, p, a, sigma2): (f64, f64, f64, f64) = (0.5, 10.0, 1.0, 0.125);
        let x = (alpha * p * a + 1.0) * 1.0
            / (2.0 * p * (1.0 - alpha) * (1.0 + alpha * p * a - 2.0) * sigma2);
        let want = 1.0 - (-x).exp() * (1.0 + x + x * x / 2.0);
        let got = sop_closed_rayleigh(
            alpha,
            p,
            a,
            &SecrecyParams::unit_noise(1.0).unwrap(),
            4,
            sigma2,
        )
        .unwrap();
        assert!((got - want).abs() < 1e-14, "{got} vs {want}");
    }

    #[test]
    fn rician_with_zero_noncentrality_is_rayleigh() {
        let params = SecrecyParams::unit_noise(1.5).unwrap();
        for alpha in [0.2, 0.4, 0.6, 0.8] {
            let a = sop_closed_rayleigh(alpha, 20.0, 1.0, &params, 4, 0.125).unwrap();
            let b = sop_closed_rician(alpha, 20.0, 1.0, &params, 4, 0.0, 0.125).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn closed_form_domain_errors() {
        let params = SecrecyParams::unit_noise(1.0).unwrap();
        assert!(sop_closed_rayleigh(0.0, 10.0, 1.0, &params, 4, 0.125).is_err());
        assert!(sop_closed_rayleigh(0.5, -1.0, 1.0, &params, 4, 0.125).is_err());
        assert!(sop_closed_rayleigh(0.5, 10.0, 1.0, &params, 1, 0.125).is_err());
        assert!(sop_closed_rayleigh(0.5, 10.0, 1.0, &params, 4, 0.0).is_err());
        assert!(sop_closed_rician(0.5, 10.0, 1.0, &params, 4, -0.1, 0.125).is_err());
    }

    proptest! {
        #[test]
        fn closed_form_is_a_probability_and_monotone_in_rate(
            alpha in 0.01f64..0.99, p_db in 0.0f64..25.0, rs in 0.1f64..3.0, s in 0.0f64..1.5,
        ) {
            let p = 10f64.powf(p_db / 10.0);
            let lo = SecrecyParams::unit_noise(rs).unwrap();
            let hi = SecrecyParams::unit_noise(rs + 0.25).unwrap();
            let a = sop_closed_rician(alpha, p, 1.0, &lo, 4, s, 0.0625).unwrap();
            let b = sop_closed_rician(alpha, p, 1.0, &hi, 4, s, 0.0625).unwrap();
            prop_assert!((0.0..=1.0).contains(&a));
            prop_assert!(b >= a - 1e-12);
        }
    }
}
