use super::{ln_factorial, MAX_ORDER};
use crate::error::{Error, Result};

// Above this argument (and above order^2) the large-argument expansion is used.
const SERIES_LIMIT: f64 = 20.0;
const RESCALE: f64 = 1e250;

fn check(order: i64, x: f64) -> Result<u32> {
    if order < 0 || order > MAX_ORDER as i64 {
        return Err(Error::domain(
            "bessel_i",
            format!("order {order} outside 0..={MAX_ORDER}"),
        ));
    }
    if !x.is_finite() || x < 0.0 {
        return Err(Error::domain(
            "bessel_i",
            format!("argument {x} must be finite and >= 0"),
        ));
    }
    Ok(order as u32)
}

/// Modified Bessel function of the first kind, `I_order(x)`.
pub fn bessel_i(order: i64, x: f64) -> Result<f64> {
    Ok(ln_bessel_i(order, x)?.exp())
}

/// `exp(-x) * I_order(x)`, finite for every admissible argument.
pub fn bessel_i_scaled(order: i64, x: f64) -> Result<f64> {
    Ok((ln_bessel_i(order, x)? - x).exp())
}

/// Natural logarithm of `I_order(x)`; `-inf` when the function vanishes
/// (positive order at `x = 0`).
pub fn ln_bessel_i(order: i64, x: f64) -> Result<f64> {
    let nu = check(order, x)?;
    if x == 0.0 {
        return Ok(if nu == 0 { 0.0 } else { f64::NEG_INFINITY });
    }
    let nu_f = nu as f64;
    if x > SERIES_LIMIT && x > nu_f * nu_f {
        Ok(ln_asymptotic(nu_f, x))
    } else {
        Ok(ln_series(nu, x))
    }
}

/// Ascending series sum_k (x/2)^(2k+nu) / (k! (k+nu)!), accumulated
/// relative to its first term with periodic rescaling.
fn ln_series(nu: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let quarter_sq = half * half;
    let mut ln_scale = nu as f64 * half.ln() - ln_factorial(nu as u64);
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut k = 0.0_f64;
    loop {
        let ratio = quarter_sq / ((k + 1.0) * (k + 1.0 + nu as f64));
        term *= ratio;
        sum += term;
        k += 1.0;
        if ratio < 1.0 && term <= sum * 1e-17 {
            break;
        }
        if sum > RESCALE {
            sum /= RESCALE;
            term /= RESCALE;
            ln_scale += RESCALE.ln();
        }
    }
    ln_scale + sum.ln()
}

/// I_nu(x) ~ e^x / sqrt(2 pi x) * sum_k (-1)^k a_k(nu) / x^k.
fn ln_asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut k = 1.0_f64;
    loop {
        let odd = 2.0 * k - 1.0;
        let next = -term * (mu - odd * odd) / (8.0 * k * x);
        if next.abs() >= term.abs() || next.abs() <= 1e-17 * sum.abs() {
            if next.abs() < term.abs() {
                sum += next;
            }
            break;
        }
        sum += next;
        term = next;
        k += 1.0;
    }
    x - 0.5 * (2.0 * std::f64::consts::PI * x).ln() + sum.ln()
}
