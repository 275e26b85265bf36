//! Fading channel vectors, null-space bases and artificial noise.
//!
//! Complex Gaussian convention: an entry of power `p` has independent real
//! and imaginary parts, each zero-mean with variance `p / 2`.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Below this norm a channel has no usable direction.
pub const DEGENERATE_NORM: f64 = 1e-12;

/// Complex gain vector of one link (one entry per transmit antenna).
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexVector(Vec<Complex64>);

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::domain("ComplexVector", "dimension must be >= 1"));
        }
        if entries
            .iter()
            .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::domain("ComplexVector", "entries must be finite"));
        }
        Ok(Self(entries))
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.0
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `self^H other`.
    pub fn inner(&self, other: &ComplexVector) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                op: "inner",
                expected: self.dim(),
                actual: other.dim(),
            });
        }
        Ok(self.0.iter().zip(&other.0).map(|(a, b)| a.conj() * b).sum())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelModel {
    Rayleigh,
    Rician,
    /// Deterministic vector with `||h||^2 = mean_power`: the large-K limit
    /// of a Rician link.
    GaussianApprox,
}

/// Fading model of the relay-to-ground links.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelayLinkModel {
    Rayleigh,
    Rician,
}

impl RelayLinkModel {
    /// Link spec for this model; `rician_k` is ignored for Rayleigh links.
    pub fn spec(self, dim: usize, rician_k: f64, mean_power: f64) -> Result<ChannelSpec> {
        match self {
            RelayLinkModel::Rayleigh => ChannelSpec::rayleigh(dim, mean_power),
            RelayLinkModel::Rician => ChannelSpec::rician(dim, rician_k, mean_power),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            RelayLinkModel::Rayleigh => "rayleigh",
            RelayLinkModel::Rician => "rician",
        }
    }
}

/// Statistical description of one link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelSpec {
    pub model: ChannelModel,
    /// Rician factor; ignored unless `model` is `Rician`.
    pub rician_k: f64,
    /// `E[||h||^2]`.
    pub mean_power: f64,
    pub dim: usize,
}

impl ChannelSpec {
    pub fn rayleigh(dim: usize, mean_power: f64) -> Result<Self> {
        Self::new(ChannelModel::Rayleigh, 0.0, mean_power, dim)
    }

    pub fn rician(dim: usize, rician_k: f64, mean_power: f64) -> Result<Self> {
        Self::new(ChannelModel::Rician, rician_k, mean_power, dim)
    }

    pub fn gaussian_approx(dim: usize, mean_power: f64) -> Result<Self> {
        Self::new(ChannelModel::GaussianApprox, 0.0, mean_power, dim)
    }

    pub fn new(model: ChannelModel, rician_k: f64, mean_power: f64, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::domain("ChannelSpec", "dim must be >= 1"));
        }
        if !(mean_power > 0.0) || !mean_power.is_finite() {
            return Err(Error::domain(
                "ChannelSpec",
                format!("mean_power {mean_power} must be positive and finite"),
            ));
        }
        if model == ChannelModel::Rician && (!(rician_k >= 0.0) || !rician_k.is_finite()) {
            return Err(Error::domain(
                "ChannelSpec",
                format!("rician_k {rician_k} must be finite and >= 0"),
            ));
        }
        Ok(Self {
            model,
            rician_k: if model == ChannelModel::Rician {
                rician_k
            } else {
                0.0
            },
            mean_power,
            dim,
        })
    }

    /// Fraction of the mean power carried by the line-of-sight component.
    pub fn los_fraction(&self) -> f64 {
        match self.model {
            ChannelModel::Rayleigh => 0.0,
            ChannelModel::Rician => self.rician_k / (self.rician_k + 1.0),
            ChannelModel::GaussianApprox => 1.0,
        }
    }

    /// Norm of the mean vector, `s = sqrt(K E[||h||^2] / (K + 1))`.
    pub fn noncentrality(&self) -> f64 {
        (self.los_fraction() * self.mean_power).sqrt()
    }

    /// Variance of each real Gaussian component of the scattered part,
    /// `E[||h||^2] / (2 dim (K + 1))`.
    pub fn component_variance(&self) -> f64 {
        (1.0 - self.los_fraction()) * self.mean_power / (2.0 * self.dim as f64)
    }
}

fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, power: f64) -> Complex64 {
    let sd = (0.5 * power).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(re * sd, im * sd)
}

/// Draws one realization of a link.
///
/// The line-of-sight component is the all-equal-phase vector scaled to the
/// LOS share of the mean power.
pub fn sample_channel<R: Rng + ?Sized>(spec: &ChannelSpec, rng: &mut R) -> ComplexVector {
    let dim = spec.dim as f64;
    let los = (spec.los_fraction() * spec.mean_power / dim).sqrt();
    let scatter_power = (1.0 - spec.los_fraction()) * spec.mean_power / dim;
    let entries = (0..spec.dim)
        .map(|_| {
            let mut z = Complex64::new(los, 0.0);
            if scatter_power > 0.0 {
                z += complex_gaussian(rng, scatter_power);
            }
            z
        })
        .collect();
    ComplexVector(entries)
}

/// Orthonormal basis `G` of the orthogonal complement of a channel `h`,
/// so that `h^H G = 0`. Stored column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct NullSpaceBasis {
    columns: Vec<ComplexVector>,
}

impl NullSpaceBasis {
    pub fn columns(&self) -> &[ComplexVector] {
        &self.columns
    }

    /// Ambient dimension (length of each column).
    pub fn dim(&self) -> usize {
        self.columns[0].dim()
    }

    pub fn rank(&self) -> usize {
        self.columns.len()
    }
}

/// Builds the basis from a Householder reflector that maps `e_1` onto the
/// direction of `h`; its remaining columns span `h`'s orthogonal complement.
pub fn null_space_basis(h: &ComplexVector) -> Result<NullSpaceBasis> {
    let n = h.dim();
    if n < 2 {
        return Err(Error::domain("null_space_basis", "dimension must be >= 2"));
    }
    let norm = h.norm_sq().sqrt();
    if norm < DEGENERATE_NORM {
        return Err(Error::Degenerate {
            op: "null_space_basis",
            reason: format!("channel norm {norm:e} below {DEGENERATE_NORM:e}"),
        });
    }
    let u: Vec<Complex64> = h.0.iter().map(|z| z / norm).collect();
    // w = -e^{i theta} e_1 - u with theta = arg(u_1); ||w||^2 = 2 + 2|u_1| >= 2.
    let phase = if u[0].norm() > 0.0 {
        u[0] / u[0].norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let mut w: Vec<Complex64> = u.iter().map(|z| -z).collect();
    w[0] -= phase;
    let w_norm_sq: f64 = w.iter().map(|z| z.norm_sqr()).sum();
    let columns = (1..n)
        .map(|j| {
            // (I - 2 w w^H / ||w||^2) e_j
            let coeff = 2.0 * w[j].conj() / w_norm_sq;
            let col = (0..n)
                .map(|i| {
                    let delta = if i == j { 1.0 } else { 0.0 };
                    Complex64::new(delta, 0.0) - w[i] * coeff
                })
                .collect();
            ComplexVector(col)
        })
        .collect();
    Ok(NullSpaceBasis { columns })
}

/// Artificial noise `G z` with `z` i.i.d. circularly-symmetric Gaussian,
/// normalized so that `E[||G z||^2] = 1`.
pub fn an_signal<R: Rng + ?Sized>(basis: &NullSpaceBasis, rng: &mut R) -> ComplexVector {
    let per_coeff = 1.0 / basis.rank() as f64;
    let mut out = vec![Complex64::new(0.0, 0.0); basis.dim()];
    for col in &basis.columns {
        let z = complex_gaussian(rng, per_coeff);
        for (o, g) in out.iter_mut().zip(col.entries()) {
            *o += g * z;
        }
    }
    ComplexVector(out)
}

/// Jamming power leaking to the eavesdropper, `||h_re^H G||^2`.
pub fn residual_interference_power(h_re: &ComplexVector, basis: &NullSpaceBasis) -> Result<f64> {
    if h_re.dim() != basis.dim() {
        return Err(Error::DimensionMismatch {
            op: "residual_interference_power",
            expected: basis.dim(),
            actual: h_re.dim(),
        });
    }
    basis
        .columns
        .iter()
        .map(|g| g.inner(h_re).map(|z| z.norm_sqr()))
        .sum()
}

/// Draws a residual interference power directly from its modeled law: the
/// squared norm of a `(dim - 1)`-dimensional complex Gaussian vector with the
/// relay-to-Eve link's component variance and noncentrality.
///
/// For Rayleigh links this coincides with the physical projection. For
/// Rician links it is the law the closed-form outage expressions assume.
pub fn sample_modeled_residual<R: Rng + ?Sized>(relay_eve: &ChannelSpec, rng: &mut R) -> f64 {
    let sd = relay_eve.component_variance().sqrt();
    let s = relay_eve.noncentrality();
    let comps = 2 * (relay_eve.dim - 1);
    (0..comps)
        .map(|c| {
            let g: f64 = rng.sample::<f64, _>(StandardNormal) * sd + if c == 0 { s } else { 0.0 };
            g * g
        })
        .sum()
}
