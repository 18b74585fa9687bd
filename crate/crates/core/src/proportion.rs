//! Classical binomial intervals (Wald, Wilson, Agresti-Coull) and the Wald
//! pivot bias term.
//!
//! Every interval in the crate, classical or kernel-conditional, is produced
//! by [`interval_from_rate`], which takes a point estimate and a (possibly
//! non-integer) sample size. The classical functions call it with `(Ŷ/n, n)`;
//! the conditional ones with `(p̂ₕ(x), nh·f̂ₕ(x)/R(K))`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::two_sided_z;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalMethod {
    Wald,
    Wilson,
    AgrestiCoull,
}

impl IntervalMethod {
    pub const ALL: [IntervalMethod; 3] = [Self::Wald, Self::Wilson, Self::AgrestiCoull];

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Wald => "wald",
            Self::Wilson => "wilson",
            Self::AgrestiCoull => "agresti_coull",
        }
    }
}

impl fmt::Display for IntervalMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Wald => "Wald",
            Self::Wilson => "Wilson",
            Self::AgrestiCoull => "Agresti-Coull",
        })
    }
}

impl std::str::FromStr for IntervalMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wald" => Ok(Self::Wald),
            "wilson" => Ok(Self::Wilson),
            "ac" | "agresti_coull" | "agresti-coull" => Ok(Self::AgrestiCoull),
            other => Err(Error::InvalidConfig(format!(
                "unknown interval method `{other}`"
            ))),
        }
    }
}

/// Whether an interval targets an unconditional proportion, `p(x)` through
/// the kernel smoother, or `p(x)` through a fitted logistic model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntervalKind {
    Classical,
    Conditional,
    Logistic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalEstimate {
    pub lower: f64,
    pub upper: f64,
    pub center: f64,
    pub method: IntervalMethod,
    pub kind: IntervalKind,
    /// Nominal confidence level `1 − α`.
    pub level: f64,
    /// True iff a bound was clipped to `[0, 1]`.
    pub truncated: bool,
}

impl IntervalEstimate {
    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, p: f64) -> bool {
        self.lower <= p && p <= self.upper
    }

    pub fn is_degenerate(&self) -> bool {
        self.lower == self.upper
    }

    /// Clips raw bounds to `[0, 1]` and records whether clipping happened.
    pub(crate) fn truncate(
        lower: f64,
        upper: f64,
        center: f64,
        method: IntervalMethod,
        kind: IntervalKind,
        level: f64,
    ) -> Self {
        let truncated = lower < 0.0 || upper > 1.0;
        Self {
            lower: lower.max(0.0),
            upper: upper.min(1.0),
            center,
            method,
            kind,
            level,
            truncated,
        }
    }
}

/// `Ŷ` successes out of `n` trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinomialCount {
    successes: u64,
    trials: u64,
}

impl BinomialCount {
    pub fn new(successes: u64, trials: u64) -> Result<Self> {
        if trials == 0 || successes > trials {
            return Err(Error::InvalidCount { successes, trials });
        }
        Ok(Self { successes, trials })
    }

    pub fn successes(&self) -> u64 {
        self.successes
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn proportion(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

/// Shared core of all three interval families.
///
/// `p_hat ∈ [0, 1]` is the point estimate and `n > 0` the (effective) number
/// of trials; `z` is the two-sided critical value.
pub fn interval_from_rate(
    method: IntervalMethod,
    p_hat: f64,
    n: f64,
    z: f64,
    level: f64,
    kind: IntervalKind,
) -> IntervalEstimate {
    let z2 = z * z;
    let (center, half) = match method {
        IntervalMethod::Wald => (p_hat, z * (p_hat * (1.0 - p_hat) / n).sqrt()),
        IntervalMethod::Wilson => {
            let center = (p_hat * n + z2 / 2.0) / (n + z2);
            let half = n.sqrt() * z / (n + z2) * (p_hat * (1.0 - p_hat) + z2 / (4.0 * n)).sqrt();
            (center, half)
        }
        IntervalMethod::AgrestiCoull => {
            let n_tilde = n + z2;
            let p_tilde = (p_hat * n + z2 / 2.0) / n_tilde;
            (p_tilde, z * (p_tilde * (1.0 - p_tilde) / n_tilde).sqrt())
        }
    };
    IntervalEstimate::truncate(center - half, center + half, center, method, kind, level)
}

pub fn classical_interval(
    count: BinomialCount,
    method: IntervalMethod,
    alpha: f64,
) -> Result<IntervalEstimate> {
    let z = two_sided_z(alpha)?;
    Ok(interval_from_rate(
        method,
        count.proportion(),
        count.trials as f64,
        z,
        1.0 - alpha,
        IntervalKind::Classical,
    ))
}

/// Wald interval `p̂ ± z·√(p̂(1−p̂)/n)`. Degenerate `[0,0]`/`[1,1]` results
/// at `Ŷ ∈ {0, n}` are returned unchanged.
pub fn wald_prop(count: BinomialCount, alpha: f64) -> Result<IntervalEstimate> {
    classical_interval(count, IntervalMethod::Wald, alpha)
}

/// Wilson score interval.
pub fn wilson_prop(count: BinomialCount, alpha: f64) -> Result<IntervalEstimate> {
    classical_interval(count, IntervalMethod::Wilson, alpha)
}

/// Agresti-Coull interval around `p̃ = (Ŷ + z²/2)/(n + z²)`.
pub fn agresti_coull_prop(count: BinomialCount, alpha: f64) -> Result<IntervalEstimate> {
    classical_interval(count, IntervalMethod::AgrestiCoull, alpha)
}

/// Leading terms of `E[√n(p̂ − p)/√(p̂(1−p̂))]`.
pub fn wald_bias_term(p: f64, n: u64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidProbability(p));
    }
    let n = n as f64;
    let d = p - 0.5;
    let v = p * (1.0 - p);
    Ok(d / (n * v).sqrt() * (1.0 + 7.0 / (2.0 * n) + 9.0 * d * d / (2.0 * n * v)))
}
