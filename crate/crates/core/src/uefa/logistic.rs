//! Parametric baseline: simple logistic regression fitted by IRLS, its
//! intercept-based interval for `p(0)`, and a grouped deviance test.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::proportion::{IntervalEstimate, IntervalKind, IntervalMethod};
use crate::smoothing::Sample;
use crate::stats::{chi_square_sf, logistic, two_sided_z};

const MAX_ITERATIONS: usize = 100;
const SCORE_TOL: f64 = 1e-8;
const LOGLIK_REL_TOL: f64 = 1e-10;
/// |β| beyond this is taken as a sign of separation.
const SEPARATION_BOUND: f64 = 50.0;

/// Fitted `logit p(x) = α + βx`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticFit {
    pub alpha_hat: f64,
    pub beta_hat: f64,
    /// Inverse observed information at the optimum.
    pub covariance: [[f64; 2]; 2],
    pub converged: bool,
    pub iterations: usize,
    pub deviance: f64,
}

impl LogisticFit {
    pub fn predict(&self, x: f64) -> f64 {
        logistic(self.alpha_hat + self.beta_hat * x)
    }

    pub fn alpha_se(&self) -> f64 {
        self.covariance[0][0].max(0.0).sqrt()
    }

    pub fn beta_se(&self) -> f64 {
        self.covariance[1][1].max(0.0).sqrt()
    }
}

#[inline]
fn softplus(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

struct Evaluation {
    loglik: f64,
    score: [f64; 2],
    info: [[f64; 2]; 2],
}

fn evaluate(sample: &Sample, a: f64, b: f64) -> Evaluation {
    let mut loglik = 0.0;
    let mut score = [0.0; 2];
    let mut info = [[0.0; 2]; 2];
    for (&x, &y) in sample.xs().iter().zip(sample.ys()) {
        let eta = a + b * x;
        let p = logistic(eta);
        let y = f64::from(u8::from(y));
        loglik += y * eta - softplus(eta);
        let r = y - p;
        score[0] += r;
        score[1] += r * x;
        let w = p * (1.0 - p);
        info[0][0] += w;
        info[0][1] += w * x;
        info[1][1] += w * x * x;
    }
    info[1][0] = info[0][1];
    Evaluation {
        loglik,
        score,
        info,
    }
}

/// Log-likelihood of `logit p(x) = α + βx` on `sample`.
pub fn logistic_log_likelihood(sample: &Sample, alpha: f64, beta: f64) -> f64 {
    evaluate(sample, alpha, beta).loglik
}

/// Gradient of [`logistic_log_likelihood`] with respect to `(α, β)`.
pub fn logistic_score(sample: &Sample, alpha: f64, beta: f64) -> [f64; 2] {
    evaluate(sample, alpha, beta).score
}

fn invert(m: [[f64; 2]; 2]) -> Result<[[f64; 2]; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let scale = m[0][0].abs().max(m[1][1].abs());
    if !(det > scale * scale * 1e-14) {
        return Err(Error::SingularInformation);
    }
    Ok([
        [m[1][1] / det, -m[0][1] / det],
        [-m[1][0] / det, m[0][0] / det],
    ])
}

/// With one covariate the MLE fails to exist exactly when some threshold
/// splits successes from failures (ties at the threshold allowed).
fn is_separated(sample: &Sample) -> bool {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    for (&x, &y) in sample.xs().iter().zip(sample.ys()) {
        let k = usize::from(y);
        lo[k] = lo[k].min(x);
        hi[k] = hi[k].max(x);
    }
    hi[0] <= lo[1] || hi[1] <= lo[0]
}

/// Maximum-likelihood fit of `logit p(x) = α + βx` by Newton/IRLS with step
/// halving.
///
/// Stops when the largest score component drops below 1e-8 or the relative
/// change in log-likelihood below 1e-10.
pub fn fit_logistic(sample: &Sample) -> Result<LogisticFit> {
    if sample.len() < 3 {
        return Err(Error::TooFewObservations {
            needed: 3,
            got: sample.len(),
        });
    }
    let k = sample.successes();
    if k == 0 || k == sample.len() as u64 {
        return Err(Error::DegenerateResponses);
    }

    let x0 = sample.xs()[0];
    if sample.xs().iter().all(|&x| x == x0) {
        return Err(Error::SingularInformation);
    }
    if is_separated(sample) {
        return Err(Error::Separation);
    }

    let ybar = sample.mean_response();
    let (mut a, mut b) = ((ybar / (1.0 - ybar)).ln(), 0.0);
    let mut ev = evaluate(sample, a, b);
    let mut converged = false;
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        if ev.score[0].abs().max(ev.score[1].abs()) < SCORE_TOL {
            converged = true;
            break;
        }
        iterations += 1;
        let inv = invert(ev.info)?;
        let da = inv[0][0] * ev.score[0] + inv[0][1] * ev.score[1];
        let db = inv[1][0] * ev.score[0] + inv[1][1] * ev.score[1];

        let mut step = 1.0;
        let mut next = evaluate(sample, a + da, b + db);
        while next.loglik < ev.loglik && step > 1e-6 {
            step *= 0.5;
            next = evaluate(sample, a + step * da, b + step * db);
        }
        a += step * da;
        b += step * db;
        if b.abs() > SEPARATION_BOUND || !a.is_finite() {
            return Err(Error::Separation);
        }
        let rel = (next.loglik - ev.loglik).abs() / (ev.loglik.abs() + 1e-300);
        ev = next;
        if rel < LOGLIK_REL_TOL {
            // One more Newton step from here is quadratically small; take it
            // so the reported score is at the optimum.
            if let Ok(inv) = invert(ev.info) {
                a += inv[0][0] * ev.score[0] + inv[0][1] * ev.score[1];
                b += inv[1][0] * ev.score[0] + inv[1][1] * ev.score[1];
                ev = evaluate(sample, a, b);
            }
            converged = true;
            break;
        }
    }

    Ok(LogisticFit {
        alpha_hat: a,
        beta_hat: b,
        covariance: invert(ev.info)?,
        converged,
        iterations,
        deviance: -2.0 * ev.loglik,
    })
}

/// Wald interval `α̂ ± z·se(α̂)` for the intercept.
pub fn intercept_interval(fit: &LogisticFit, alpha: f64) -> Result<(f64, f64)> {
    if !fit.converged {
        return Err(Error::NotConverged);
    }
    let z = two_sided_z(alpha)?;
    let half = z * fit.alpha_se();
    Ok((fit.alpha_hat - half, fit.alpha_hat + half))
}

/// Interval for `p(0) = e^α/(1+e^α)`: the intercept interval mapped through
/// the logistic function.
pub fn logistic_p0_interval(fit: &LogisticFit, alpha: f64) -> Result<IntervalEstimate> {
    let (lo, hi) = intercept_interval(fit, alpha)?;
    Ok(IntervalEstimate {
        lower: logistic(lo),
        upper: logistic(hi),
        center: logistic(fit.alpha_hat),
        method: IntervalMethod::Wald,
        kind: IntervalKind::Logistic,
        level: 1.0 - alpha,
        truncated: false,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodnessOfFit {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    pub groups: usize,
}

fn xlogy_ratio(a: f64, b: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        a * (a / b).ln()
    }
}

/// Deviance of the fit against the saturated model on covariate groups.
///
/// Observations are grouped by `x` rounded to three decimals; the statistic
/// is referred to χ² with `groups − 2` degrees of freedom. With continuous
/// covariates and few repeats per group the χ² reference is unreliable.
pub fn deviance_gof(fit: &LogisticFit, sample: &Sample) -> Result<GoodnessOfFit> {
    if !fit.converged {
        return Err(Error::NotConverged);
    }
    // key → (trials, successes, expected successes)
    let mut groups: BTreeMap<i64, (f64, f64, f64)> = BTreeMap::new();
    for (&x, &y) in sample.xs().iter().zip(sample.ys()) {
        let g = groups.entry((x * 1000.0).round() as i64).or_default();
        g.0 += 1.0;
        g.1 += f64::from(u8::from(y));
        g.2 += fit.predict(x);
    }
    if groups.len() <= 2 {
        return Err(Error::TooFewGroups(groups.len()));
    }
    let statistic = 2.0
        * groups
            .values()
            .map(|&(m, y, mu)| xlogy_ratio(y, mu) + xlogy_ratio(m - y, m - mu))
            .sum::<f64>();
    let dof = groups.len() - 2;
    Ok(GoodnessOfFit {
        statistic,
        dof,
        p_value: chi_square_sf(statistic.max(0.0), dof as f64),
        groups: groups.len(),
    })
}
