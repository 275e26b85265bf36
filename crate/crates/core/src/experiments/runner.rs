use std::collections::BTreeMap;

use rayon::prelude::*;

use super::scenario::{Scenario, Scheme, XAxis};
use crate::channel::{ChannelSpec, RelayLinkModel};
use crate::error::Result;
use crate::power_allocation::{alpha_optimal_from_channels, alpha_statistical, TraversalConfig};
use crate::relay_selection::{select_instantaneous, select_statistical};
use crate::rng::RngStreams;
use crate::secrecy::{ci95_half_width, secrecy_capacity, LinkSetup, ResidualModel, SecrecyParams};

const BATCH: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SopPoint {
    pub x: f64,
    pub sop: f64,
    pub half_width_95: f64,
    pub trials: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SopCurve {
    pub label: String,
    pub x_name: String,
    pub points: Vec<SopPoint>,
}

/// One curve's fixed parameters.
#[derive(Debug, Clone, Copy)]
struct CurveSpec {
    scheme: Scheme,
    model: RelayLinkModel,
    n_r: u32,
    rate: f64,
    /// Used unless `K_sd` is the x axis.
    k_sd: f64,
    /// Used unless the power is the x axis.
    power_db: f64,
    delta_alpha: f64,
}

/// Channel realizations depend on these only; everything else is evaluated
/// on top of shared draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct DrawKey {
    n_r: u32,
    model: u8,
    k_sd_bits: u64,
}

struct Draws {
    gains: Vec<f64>,
    /// Row-major, `relay_count` residuals per trial.
    residuals: Vec<f64>,
    relays: usize,
}

struct Job {
    curve: usize,
    point: usize,
    x: f64,
    power_db: f64,
}

fn model_code(model: RelayLinkModel) -> u8 {
    match model {
        RelayLinkModel::Rayleigh => 0,
        RelayLinkModel::Rician => 1,
    }
}

fn fmt_param(v: f64) -> String {
    format!("{v}")
}

fn curve_specs(s: &Scenario) -> Vec<(CurveSpec, String)> {
    let axis = s.x_axis();
    let mut out = Vec::new();
    for scheme in s.schemes() {
        let alphas: &[f64] = if scheme == Scheme::Statistical {
            &s.delta_alpha
        } else {
            &s.delta_alpha[..1]
        };
        for &model in &s.relay_link_model {
            for &n_r in &s.n_r {
                for &rate in &s.rate_thresholds {
                    let k_list: &[f64] = if axis == XAxis::KSd {
                        &s.k_sd[..1]
                    } else {
                        &s.k_sd
                    };
                    for &k_sd in k_list {
                        let p_list: &[f64] = if axis == XAxis::PowerDb {
                            &s.power_grid_db[..1]
                        } else {
                            &s.power_grid_db
                        };
                        for &power_db in p_list {
                            for &delta_alpha in alphas {
                                let mut label = scheme.name().to_string();
                                if s.relay_link_model.len() > 1 {
                                    label += &format!(" relay={}", model.name());
                                }
                                if s.n_r.len() > 1 {
                                    label += &format!(" N_r={n_r}");
                                }
                                if s.rate_thresholds.len() > 1 {
                                    label += &format!(" R_s={}", fmt_param(rate));
                                }
                                if axis != XAxis::KSd && s.k_sd.len() > 1 {
                                    label += &format!(" K_sd={}", fmt_param(k_sd));
                                }
                                if scheme == Scheme::Statistical && s.delta_alpha.len() > 1 {
                                    label += &format!(" dalpha={}", fmt_param(delta_alpha));
                                }
                                out.push((
                                    CurveSpec {
                                        scheme,
                                        model,
                                        n_r,
                                        rate,
                                        k_sd,
                                        power_db,
                                        delta_alpha,
                                    },
                                    label,
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    out
}

fn link_setups(s: &Scenario, key: &DrawKey, model: RelayLinkModel) -> Result<Vec<LinkSetup>> {
    let n_r = key.n_r as usize;
    let n_s = s.n_s.map_or(n_r, |n| n as usize);
    let k_sd = f64::from_bits(key.k_sd_bits);
    let satellite = ChannelSpec::rician(n_s, k_sd, s.mean_powers.sd)?;
    let relay_bob = model.spec(n_r, s.k_re, s.mean_powers.rd)?;
    s.mean_powers
        .re
        .iter()
        .map(|&re| {
            Ok(LinkSetup {
                satellite,
                relay_bob,
                relay_eve: model.spec(n_r, s.k_re, re)?,
                residual: ResidualModel::Physical,
            })
        })
        .collect()
}

fn draw(setups: &[LinkSetup], trials: u64, streams: &RngStreams) -> Result<Draws> {
    let relays = setups.len();
    let rows = (0..trials)
        .into_par_iter()
        .map(|t| {
            let gain = setups[0].draw_gain(streams, t);
            let residuals = setups
                .iter()
                .enumerate()
                .map(|(k, su)| su.draw_residual(streams, t, k as u32))
                .collect::<Result<Vec<f64>>>()?;
            Ok((gain, residuals))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut gains = Vec::with_capacity(rows.len());
    let mut residuals = Vec::with_capacity(rows.len() * relays);
    for (g, r) in rows {
        gains.push(g);
        residuals.extend(r);
    }
    Ok(Draws {
        gains,
        residuals,
        relays,
    })
}

fn outage(alpha: f64, big_p: f64, gain: f64, residual: f64, rate: f64) -> bool {
    let gamma_d = alpha * big_p * gain;
    let gamma_e = gamma_d / ((1.0 - alpha) * big_p * residual + 1.0);
    secrecy_capacity(gamma_d, gamma_e) < rate
}

fn evaluate(s: &Scenario, c: &CurveSpec, power_db: f64, draws: &Draws) -> Result<(u64, u64)> {
    let big_p = 10f64.powf(power_db / 10.0);
    let stat_relay = select_statistical(&s.mean_powers.re)? - 1;
    let fixed_alpha = match c.scheme {
        Scheme::Statistical => Some(
            alpha_statistical(&TraversalConfig {
                step: c.delta_alpha,
                relay_link_model: c.model,
                mean_power_sd: s.mean_powers.sd,
                mean_power_re: s.mean_powers.re[stat_relay],
                rician_k_re: s.k_re,
                big_p,
                params: SecrecyParams::unit_noise(c.rate)?,
                n_r: c.n_r,
            })?
            .alpha,
        ),
        Scheme::Optimal => None,
        _ => Some(0.5),
    };
    let m = draws.relays;
    let trials = draws.gains.len();
    let events = (0..trials.div_ceil(BATCH))
        .into_par_iter()
        .map(|b| {
            let mut count = 0u64;
            for t in b * BATCH..((b + 1) * BATCH).min(trials) {
                let gain = draws.gains[t];
                let row = &draws.residuals[t * m..(t + 1) * m];
                let relay = match c.scheme {
                    Scheme::InstantaneousSelection => select_instantaneous(row)? - 1,
                    _ => stat_relay,
                };
                let residual = row[relay];
                let alpha = match fixed_alpha {
                    Some(a) => a,
                    None => alpha_optimal_from_channels(big_p, gain, residual, 1.0, 1.0)?.alpha,
                };
                count += outage(alpha, big_p, gain, residual, c.rate) as u64;
            }
            Ok(count)
        })
        .sum::<Result<u64>>()?;
    Ok((events, trials as u64))
}

/// Runs every curve of a scenario.
///
/// Trial `t` of every curve that shares `(N_r, relay model, K_sd)` sees the
/// same channel realization, so schemes, rates and powers are compared on
/// common random numbers. Curves come back in a fixed order: scheme, relay
/// model, `N_r`, `R_s`, `K_sd`, `delta_alpha`.
///
/// Allocation schemes use the relay picked from statistical CSI; with a
/// single relay that is the only one.
pub fn run_scenario(s: &Scenario) -> Result<Vec<SopCurve>> {
    s.validate()?;
    let axis = s.x_axis();
    let xs: &[f64] = match axis {
        XAxis::PowerDb => &s.power_grid_db,
        XAxis::KSd => &s.k_sd,
    };
    let specs = curve_specs(s);
    let mut groups: BTreeMap<DrawKey, (RelayLinkModel, Vec<Job>)> = BTreeMap::new();
    for (ci, (c, _)) in specs.iter().enumerate() {
        for (pi, &x) in xs.iter().enumerate() {
            let (k_sd, power_db) = match axis {
                XAxis::PowerDb => (c.k_sd, x),
                XAxis::KSd => (x, c.power_db),
            };
            let key = DrawKey {
                n_r: c.n_r,
                model: model_code(c.model),
                k_sd_bits: k_sd.to_bits(),
            };
            groups
                .entry(key)
                .or_insert_with(|| (c.model, Vec::new()))
                .1
                .push(Job {
                    curve: ci,
                    point: pi,
                    x,
                    power_db,
                });
        }
    }

    let streams = RngStreams::new(s.seed);
    let mut points: Vec<Vec<Option<SopPoint>>> = vec![vec![None; xs.len()]; specs.len()];
    for (key, (model, jobs)) in &groups {
        let draws = draw(&link_setups(s, key, *model)?, s.trials, &streams)?;
        for job in jobs {
            let (events, trials) = evaluate(s, &specs[job.curve].0, job.power_db, &draws)?;
            points[job.curve][job.point] = Some(SopPoint {
                x: job.x,
                sop: events as f64 / trials as f64,
                half_width_95: ci95_half_width(events, trials),
                trials,
            });
        }
    }
    Ok(specs
        .into_iter()
        .zip(points)
        .map(|((_, label), pts)| SopCurve {
            label,
            x_name: axis.name().to_string(),
            points: pts
                .into_iter()
                .map(|p| p.expect("every point is scheduled"))
                .collect(),
        })
        .collect())
}
