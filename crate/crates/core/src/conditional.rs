//! Confidence intervals for `p(x)` built on the Nadaraya-Watson estimate and
//! the local equivalent sample size `nh·f̂ₕ(x)/R(K)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::proportion::{interval_from_rate, IntervalEstimate, IntervalKind, IntervalMethod};
use crate::smoothing::{kernel_sums, ratio_or_no_data, Bandwidth, Sample};
use crate::stats::two_sided_z;

/// `p̂ₕ(x)` together with the effective sample size behind it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionalPoint {
    pub x: f64,
    pub p_hat: f64,
    pub n_eff: f64,
    pub h: Bandwidth,
}

impl ConditionalPoint {
    pub fn new(x: f64, p_hat: f64, n_eff: f64, h: Bandwidth) -> Result<Self> {
        if !(0.0..=1.0).contains(&p_hat) {
            return Err(Error::InvalidConfig(format!(
                "p_hat = {p_hat} is outside [0, 1]"
            )));
        }
        if !(n_eff >= 0.0) || !n_eff.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "n_eff = {n_eff} must be finite and ≥ 0"
            )));
        }
        Ok(Self { x, p_hat, n_eff, h })
    }
}

/// Evaluates the smoother and the effective sample size at `x` from one pass
/// over the data.
pub fn conditional_point(
    sample: &Sample,
    x: f64,
    h: Bandwidth,
    kernel: &KernelSpec,
) -> Result<ConditionalPoint> {
    let (den, num) = kernel_sums(sample, x, h, kernel);
    let p_hat = ratio_or_no_data(num, den, x, h)?;
    Ok(ConditionalPoint {
        x,
        p_hat,
        n_eff: den / kernel.roughness(),
        h,
    })
}

pub fn conditional_interval(
    pt: &ConditionalPoint,
    method: IntervalMethod,
    alpha: f64,
) -> Result<IntervalEstimate> {
    let z = two_sided_z(alpha)?;
    conditional_interval_z(pt.p_hat, pt.n_eff, method, z, 1.0 - alpha)
}

#[inline]
pub(crate) fn conditional_interval_z(
    p_hat: f64,
    n_eff: f64,
    method: IntervalMethod,
    z: f64,
    level: f64,
) -> Result<IntervalEstimate> {
    if !(n_eff > 0.0) {
        return Err(Error::ZeroEffectiveSample);
    }
    Ok(interval_from_rate(
        method,
        p_hat,
        n_eff,
        z,
        level,
        IntervalKind::Conditional,
    ))
}

pub fn wald_cond(pt: &ConditionalPoint, alpha: f64) -> Result<IntervalEstimate> {
    conditional_interval(pt, IntervalMethod::Wald, alpha)
}

pub fn wilson_cond(pt: &ConditionalPoint, alpha: f64) -> Result<IntervalEstimate> {
    conditional_interval(pt, IntervalMethod::Wilson, alpha)
}

pub fn agresti_coull_cond(pt: &ConditionalPoint, alpha: f64) -> Result<IntervalEstimate> {
    conditional_interval(pt, IntervalMethod::AgrestiCoull, alpha)
}
