//! Closed-form Bayes-regret upper bounds for ReUCB with known variances.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    pub arms: u64,
    pub horizon: u64,
    pub sigma0_sq: f64,
    pub sigma_sq: f64,
    pub a: f64,
}

impl BoundInputs {
    fn validate(&self) -> Result<()> {
        if self.arms == 0 || self.horizon == 0 {
            return Err(Error::domain("arms and horizon must be at least 1"));
        }
        if !(self.sigma0_sq > 0.0 && self.sigma_sq > 0.0 && self.a > 0.0)
            || !(self.sigma0_sq.is_finite() && self.sigma_sq.is_finite() && self.a.is_finite())
        {
            return Err(Error::domain("variances and a must be positive and finite"));
        }
        Ok(())
    }

    /// Price of learning the common mean, `1 + sigma_sq / (K sigma0_sq)`.
    pub fn beta(&self) -> f64 {
        1.0 + self.sigma_sq / (self.arms as f64 * self.sigma0_sq)
    }

    /// `sigma0_sq / log(1 + sigma0_sq / sigma_sq)`.
    pub fn gamma(&self) -> f64 {
        self.sigma0_sq / (1.0 + self.sigma0_sq / self.sigma_sq).ln()
    }

    /// `log(1 + sigma0_sq n / sigma_sq) / log(1 + sigma0_sq / sigma_sq)`.
    fn log_ratio(&self) -> f64 {
        let snr = self.sigma0_sq / self.sigma_sq;
        (snr * self.horizon as f64).ln_1p() / snr.ln_1p()
    }

    fn tail_sqrt_n(&self) -> f64 {
        let (s0, s, k, n) = (
            self.sigma0_sq,
            self.sigma_sq,
            self.arms as f64,
            self.horizon as f64,
        );
        (k * s0 + s) / s0 * (8.0 * n * s0 * s / (PI * (s0 + s))).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaussianBoundVariant {
    /// Valid for `a >= 1`.
    AtLeast1,
    /// Valid for `a >= 2`.
    AtLeast2,
}

/// Bayes-regret bound for Gaussian rewards and a Gaussian prior.
pub fn gaussian_regret_bound(inputs: &BoundInputs, variant: GaussianBoundVariant) -> Result<f64> {
    inputs.validate()?;
    let required = match variant {
        GaussianBoundVariant::AtLeast1 => 1.0,
        GaussianBoundVariant::AtLeast2 => 2.0,
    };
    if inputs.a < required {
        return Err(Error::domain(format!(
            "this bound needs a >= {required}, got {}",
            inputs.a
        )));
    }
    let (s0, s, k, n) = (
        inputs.sigma0_sq,
        inputs.sigma_sq,
        inputs.arms as f64,
        inputs.horizon as f64,
    );
    let lead = 2.0 * (inputs.a * inputs.log_ratio() * inputs.beta() * s0 * k * n * n.ln()).sqrt();
    let tail = match variant {
        GaussianBoundVariant::AtLeast1 => inputs.tail_sqrt_n(),
        GaussianBoundVariant::AtLeast2 => {
            (1.0 + n.ln()) * (k + s / s0) * (2.0 * s0 * s / (PI * (s + s0))).sqrt()
        }
    };
    Ok(lead + tail)
}

/// Leading term of the same bound for an agent that ignores the shared mean,
/// treating each arm as having prior variance `sigma_q_sq + sigma0_sq` around a known zero mean.
pub fn unstructured_leading_term(inputs: &BoundInputs, sigma_q_sq: f64) -> Result<f64> {
    inputs.validate()?;
    if !(sigma_q_sq >= 0.0 && sigma_q_sq.is_finite()) {
        return Err(Error::domain("sigma_q_sq must be non-negative"));
    }
    let total = sigma_q_sq + inputs.sigma0_sq;
    let snr = total / inputs.sigma_sq;
    let (k, n) = (inputs.arms as f64, inputs.horizon as f64);
    let ratio = (snr * n).ln_1p() / snr.ln_1p();
    Ok(2.0 * (inputs.a * ratio * total * k * n * n.ln()).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundedBoundVariant {
    /// Valid for `a >= m`.
    AtLeastM,
    /// Valid for `a >= 2m`.
    AtLeast2M,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundedRegretBound {
    pub bound: f64,
    pub m: f64,
}

/// `m = [1 + sigma0_sq / (K (sigma0_sq + sigma_sq))]^-1 [1 + sigma / (sqrt(K) sigma0)]^2`.
pub fn bounded_means_m(arms: u64, sigma0_sq: f64, sigma_sq: f64) -> f64 {
    let k = arms as f64;
    let shrink = 1.0 + sigma0_sq / (k * (sigma0_sq + sigma_sq));
    let inflate = 1.0 + (sigma_sq / sigma0_sq).sqrt() / k.sqrt();
    inflate * inflate / shrink
}

/// Bayes-regret bound for sub-Gaussian rewards and means supported on `[0, 1]`.
pub fn bounded_regret_bound(
    inputs: &BoundInputs,
    variant: BoundedBoundVariant,
) -> Result<BoundedRegretBound> {
    inputs.validate()?;
    let m = bounded_means_m(inputs.arms, inputs.sigma0_sq, inputs.sigma_sq);
    let required = match variant {
        BoundedBoundVariant::AtLeastM => m,
        BoundedBoundVariant::AtLeast2M => 2.0 * m,
    };
    if inputs.a < required {
        return Err(Error::domain(format!(
            "this bound needs a >= {required} (m = {m}), got {}",
            inputs.a
        )));
    }
    let (s0, k, n) = (inputs.sigma0_sq, inputs.arms as f64, inputs.horizon as f64);
    let lead = 2.0 * inputs.beta() * (inputs.a * s0 * inputs.log_ratio() * k * n * n.ln()).sqrt();
    let tail = match variant {
        BoundedBoundVariant::AtLeastM => inputs.tail_sqrt_n(),
        BoundedBoundVariant::AtLeast2M => 2.0 * k * (1.0 + n.ln()),
    };
    Ok(BoundedRegretBound {
        bound: lead + tail,
        m,
    })
}
