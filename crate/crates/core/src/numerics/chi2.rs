//! Chi-square laws with `2n` degrees of freedom, written in terms of the
//! per-component variance `scale` of the underlying real Gaussians.
//!
//! With `y = x / (2 scale)` the central CDF is the Poisson upper tail
//! `Pr[Pois(y) >= n]`. The non-central law is a Poisson(`lambda`) mixture of
//! central laws with `n + k` halves, `lambda = s^2 / (2 scale)`, which gives
//! the canonical double series for the Marcum Q-function:
//!
//! `Q_n(a, b) = sum_k Pois(k; a^2/2) * Pr[Pois(b^2/2) <= n + k - 1]`.

use super::{bessel::ln_bessel_i, clamp_probability, ln_factorial, ToleranceConfig, MAX_ORDER};
use crate::error::{Error, Result};

fn ln_poisson(j: u64, y: f64, ln_fact_j: f64) -> f64 {
    -y + j as f64 * y.ln() - ln_fact_j
}

/// Regularized incomplete gamma pair `(P(n, y), Q(n, y))` for integer `n`,
/// each summed on the side that avoids cancellation.
fn gamma_pq(n: u64, y: f64) -> (f64, f64) {
    debug_assert!(n >= 1);
    if y <= 0.0 {
        return (0.0, 1.0);
    }
    if y < n as f64 {
        // P = sum_{j >= n} pois(j; y), terms shrink from j = n onward.
        let mut term = ln_poisson(n, y, ln_factorial(n)).exp();
        let mut sum = term;
        let mut j = n as f64;
        while term > 0.0 {
            j += 1.0;
            term *= y / j;
            sum += term;
            if term <= sum * 1e-17 {
                break;
            }
        }
        let p = sum.min(1.0);
        (p, 1.0 - p)
    } else {
        // Q = sum_{j < n} pois(j; y), terms shrink from j = n - 1 downward.
        let top = n - 1;
        let mut term = ln_poisson(top, y, ln_factorial(top)).exp();
        let mut sum = term;
        let mut j = top as f64;
        while j > 0.0 && term > 0.0 {
            term *= j / y;
            j -= 1.0;
            sum += term;
            if term <= sum * 1e-17 {
                break;
            }
        }
        let q = sum.min(1.0);
        (1.0 - q, q)
    }
}

/// Central chi-square CDF with `2 * half_dof` degrees of freedom and
/// per-component variance `scale`:
/// `1 - exp(-x/(2 scale)) * sum_{m < half_dof} (x/(2 scale))^m / m!`.
pub fn chi2_cdf_even(half_dof: u32, x: f64, scale: f64) -> Result<f64> {
    if half_dof == 0 {
        return Err(Error::domain("chi2_cdf_even", "half_dof must be >= 1"));
    }
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::domain(
            "chi2_cdf_even",
            format!("scale {scale} must be positive and finite"),
        ));
    }
    if x.is_nan() {
        return Err(Error::domain("chi2_cdf_even", "x is NaN"));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    if x == f64::INFINITY {
        return Ok(1.0);
    }
    Ok(clamp_probability(
        gamma_pq(half_dof as u64, x / (2.0 * scale)).0,
    ))
}

/// `(cdf, survival)` of the non-central law in Poisson-mixture form.
fn noncentral_pair(
    op: &'static str,
    n: u32,
    lambda: f64,
    y: f64,
    cfg: &ToleranceConfig,
) -> Result<(f64, f64)> {
    if y <= 0.0 {
        return Ok((0.0, 1.0));
    }
    if y == f64::INFINITY {
        return Ok((1.0, 0.0));
    }
    let (mut p_k, mut q_k) = gamma_pq(n as u64, y);
    if lambda == 0.0 {
        return Ok((clamp_probability(p_k), clamp_probability(q_k)));
    }
    let ln_lambda = lambda.ln();
    let ln_y = y.ln();
    let mut ln_w = -lambda;
    // ln pois(n + k; y), advanced alongside k
    let mut j = n as f64;
    let mut ln_pj = ln_poisson(n as u64, y, ln_factorial(n as u64));
    let mut cdf = 0.0;
    let mut sf = 0.0;
    let mut k = 0usize;
    loop {
        let w = ln_w.exp();
        cdf += w * p_k;
        sf += w * q_k;

        // Poisson tail beyond k is bounded by a geometric series once k > lambda.
        let kf = k as f64;
        if kf + 1.0 > lambda {
            let ratio = lambda / (kf + 2.0);
            let tail = w * lambda / (kf + 1.0) / (1.0 - ratio);
            if tail <= cfg.series_tol * 1e-3 {
                break;
            }
        }
        k += 1;
        if k >= cfg.max_terms {
            return Err(Error::non_convergence(
                op,
                format!("Poisson mixture needs more than {} terms", cfg.max_terms),
            ));
        }
        ln_w += ln_lambda - (k as f64).ln();
        let pj = ln_pj.exp();
        p_k = (p_k - pj).max(0.0);
        q_k += pj;
        j += 1.0;
        ln_pj += ln_y - j.ln();
    }
    Ok((clamp_probability(cdf), clamp_probability(sf)))
}

fn check_marcum(op: &'static str, m: u32, a: f64, b: f64) -> Result<()> {
    if m == 0 || m > MAX_ORDER {
        return Err(Error::domain(
            op,
            format!("order {m} outside 1..={MAX_ORDER}"),
        ));
    }
    if !(a >= 0.0) || !(b >= 0.0) || !a.is_finite() || b.is_nan() {
        return Err(Error::domain(
            op,
            format!("arguments a={a}, b={b} must be finite and >= 0"),
        ));
    }
    Ok(())
}

/// Generalized Marcum Q-function `Q_m(a, b)`.
pub fn marcum_q(m: u32, a: f64, b: f64) -> Result<f64> {
    marcum_q_with(m, a, b, &ToleranceConfig::default())
}

pub fn marcum_q_with(m: u32, a: f64, b: f64, cfg: &ToleranceConfig) -> Result<f64> {
    check_marcum("marcum_q", m, a, b)?;
    if b == 0.0 {
        return Ok(1.0);
    }
    let (_, sf) = noncentral_pair("marcum_q", m, 0.5 * a * a, 0.5 * b * b, cfg)?;
    Ok(sf)
}

/// CDF of `||g + mu||^2` where `g` has `2 * half_dof` real Gaussian
/// components of variance `scale` and `||mu|| = noncentrality_amplitude`;
/// equals `1 - Q_n(s / sigma, sqrt(x) / sigma)`.
pub fn noncentral_chi2_cdf(
    half_dof: u32,
    noncentrality_amplitude: f64,
    x: f64,
    scale: f64,
) -> Result<f64> {
    noncentral_chi2_cdf_with(
        half_dof,
        noncentrality_amplitude,
        x,
        scale,
        &ToleranceConfig::default(),
    )
}

pub fn noncentral_chi2_cdf_with(
    half_dof: u32,
    noncentrality_amplitude: f64,
    x: f64,
    scale: f64,
    cfg: &ToleranceConfig,
) -> Result<f64> {
    const OP: &str = "noncentral_chi2_cdf";
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::domain(OP, format!("scale {scale} must be positive")));
    }
    if x.is_nan() {
        return Err(Error::domain(OP, "x is NaN"));
    }
    check_marcum(OP, half_dof, noncentrality_amplitude, x.max(0.0))?;
    if x <= 0.0 {
        return Ok(0.0);
    }
    let lambda = noncentrality_amplitude * noncentrality_amplitude / (2.0 * scale);
    let (cdf, _) = noncentral_pair(OP, half_dof, lambda, x / (2.0 * scale), cfg)?;
    Ok(cdf)
}

/// Density of the same law:
/// `1/(2 scale) (x/s^2)^((n-1)/2) exp(-(s^2+x)/(2 scale)) I_{n-1}(s sqrt(x)/scale)`,
/// reducing to the central density when `s = 0`.
pub fn noncentral_chi2_pdf(
    half_dof: u32,
    noncentrality_amplitude: f64,
    x: f64,
    scale: f64,
) -> Result<f64> {
    const OP: &str = "noncentral_chi2_pdf";
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::domain(OP, format!("scale {scale} must be positive")));
    }
    if x.is_nan() {
        return Err(Error::domain(OP, "x is NaN"));
    }
    check_marcum(OP, half_dof, noncentrality_amplitude, x.max(0.0))?;
    let n = half_dof as f64;
    let s = noncentrality_amplitude;
    let two_scale = 2.0 * scale;
    if x <= 0.0 {
        // with two real components the density stays positive at the origin
        return Ok(if x == 0.0 && half_dof == 1 {
            (-s * s / two_scale).exp() / two_scale
        } else {
            0.0
        });
    }
    let ln_p = if s == 0.0 {
        (n - 1.0) * x.ln() - x / two_scale - n * two_scale.ln() - ln_factorial(half_dof as u64 - 1)
    } else {
        let z = s * x.sqrt() / scale;
        -two_scale.ln() + 0.5 * (n - 1.0) * (x / (s * s)).ln() - (s * s + x) / two_scale
            + ln_bessel_i(half_dof as i64 - 1, z)?
    };
    Ok(ln_p.exp())
}
