//! Choosing the jamming relay from instantaneous or statistical CSI.
//!
//! The best relay for secrecy is the one whose artificial noise leaks the
//! most power onto Eve. With instantaneous CSI that is the largest residual
//! interference; with only statistics it is the relay with the strongest
//! mean link to Eve, since the residual CDF falls as that mean grows.

use crate::channel::ChannelSpec;
use crate::error::{Error, Result};
use crate::numerics::chi2_cdf_even;

/// First index (1-based) holding the maximum; NaN entries are rejected.
fn argmax_first(op: &'static str, values: &[f64]) -> Result<usize> {
    if values.is_empty() {
        return Err(Error::domain(op, "no relays to choose from"));
    }
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v.is_nan() {
            return Err(Error::domain(op, format!("entry {} is NaN", i + 1)));
        }
        if v > values[best] {
            best = i;
        }
    }
    Ok(best + 1)
}

/// Relay with the largest residual interference power `||h_re^H G||^2`.
pub fn select_instantaneous(residuals: &[f64]) -> Result<usize> {
    if let Some(r) = residuals.iter().find(|r| **r < 0.0) {
        return Err(Error::domain(
            "select_instantaneous",
            format!("residual {r} is negative"),
        ));
    }
    argmax_first("select_instantaneous", residuals)
}

/// Relay with the largest mean relay-to-Eve power `E[||h_re||^2]`.
pub fn select_statistical(mean_powers_re: &[f64]) -> Result<usize> {
    if let Some(p) = mean_powers_re.iter().find(|p| !(**p > 0.0)) {
        return Err(Error::domain(
            "select_statistical",
            format!("mean power {p} must be positive"),
        ));
    }
    argmax_first("select_statistical", mean_powers_re)
}

/// CDF of the residual interference power behind a Rayleigh relay with
/// `n_r` antennas and mean relay-to-Eve power `mean_power_re`.
pub fn residual_cdf(r: f64, n_r: u32, mean_power_re: f64) -> Result<f64> {
    if n_r < 2 {
        return Err(Error::domain(
            "residual_cdf",
            format!("n_r {n_r} must be >= 2"),
        ));
    }
    if !(mean_power_re > 0.0) {
        return Err(Error::domain(
            "residual_cdf",
            format!("mean power {mean_power_re} must be positive"),
        ));
    }
    chi2_cdf_even(n_r - 1, r, mean_power_re / (2.0 * n_r as f64))
}

/// The `M` candidate relays: per relay, the relay-to-Bob and relay-to-Eve links.
#[derive(Debug, Clone, PartialEq)]
pub struct RelayEnsemble {
    specs: Vec<(ChannelSpec, ChannelSpec)>,
}

impl RelayEnsemble {
    pub fn new(specs: Vec<(ChannelSpec, ChannelSpec)>) -> Result<Self> {
        if specs.is_empty() {
            return Err(Error::domain("RelayEnsemble", "count must be >= 1"));
        }
        for (rd, re) in &specs {
            if rd.dim != re.dim {
                return Err(Error::DimensionMismatch {
                    op: "RelayEnsemble",
                    expected: rd.dim,
                    actual: re.dim,
                });
            }
        }
        Ok(Self { specs })
    }

    pub fn count(&self) -> usize {
        self.specs.len()
    }

    pub fn specs(&self) -> &[(ChannelSpec, ChannelSpec)] {
        &self.specs
    }

    pub fn mean_powers_re(&self) -> Vec<f64> {
        self.specs.iter().map(|(_, re)| re.mean_power).collect()
    }

    pub fn select_statistical(&self) -> usize {
        select_statistical(&self.mean_powers_re()).expect("specs hold positive mean powers")
    }
}
