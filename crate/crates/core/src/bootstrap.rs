//! Bootstrap selection of the bandwidth used to build a conditional interval.
//!
//! Starting from a pilot fit `p̂_{h₀}`, responses are resampled as
//! `Yᵢ* ~ Bernoulli(p̂_{h₀}(Xᵢ))` with the design held fixed. For every
//! candidate `h` the interval is rebuilt on each resample and the fraction
//! that contains `p̂_{h₀}(x)` estimates its coverage `P̂(x; h)`. The chosen
//! bandwidth is the mean of the grid values with `P̂ ≥ 1 − α`, or the
//! maximiser of `P̂` if there are none.
//!
//! # Determinism
//!
//! Replicate `b` draws from ChaCha8 seeded with `seed` on stream `b`, so it
//! depends only on `(seed, b)`. Coverage is reduced as integer counts, which
//! makes the curve independent of the rayon thread count.
//!
//! # Cost
//!
//! Kernel weights at `x` depend only on the design, so they are computed
//! once per grid value. A resample then only needs, per `h`, the sum of the
//! weights of its successes. That sum is accumulated in the same index order
//! as [`kernel_sums`](crate::smoothing::kernel_sums), so it reproduces
//! `nw_at` on the resample exactly.

use std::io::Write;
use std::path::Path;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::conditional::conditional_interval_z;
use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::proportion::IntervalMethod;
use crate::smoothing::{
    default_pilot_grid, nw_at, ratio_or_no_data, select_h0_aicc, Bandwidth, Sample,
};
use crate::stats::{linear_grid, stream_rng, two_sided_z};

/// Slack when comparing an exact fraction `k/B` against `1 − α`.
const LEVEL_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub b_resamples: usize,
    pub h_grid: Vec<f64>,
    pub alpha: f64,
    pub seed: u64,
    pub method: IntervalMethod,
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        Self {
            b_resamples: 1000,
            h_grid: Self::default_grid(),
            alpha: 0.05,
            seed: 0,
            method: IntervalMethod::Wilson,
        }
    }
}

impl BootstrapConfig {
    /// 200 equispaced bandwidths from 0.05 to 2.
    pub fn default_grid() -> Vec<f64> {
        linear_grid(0.05, 2.0, 200)
    }

    pub fn validate(&self) -> Result<()> {
        if self.b_resamples == 0 {
            return Err(Error::InvalidConfig("B must be at least 1".into()));
        }
        if self.h_grid.is_empty() {
            return Err(Error::InvalidConfig("bandwidth grid is empty".into()));
        }
        if self.h_grid.iter().any(|h| !(*h > 0.0) || !h.is_finite()) {
            return Err(Error::InvalidConfig(
                "grid bandwidths must be positive and finite".into(),
            ));
        }
        if self.h_grid.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::InvalidConfig(
                "bandwidth grid must be strictly increasing".into(),
            ));
        }
        two_sided_z(self.alpha)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionMode {
    ThresholdAverage,
    ArgmaxFallback,
}

/// Estimated coverage `P̂(x; h)` over the grid and the bandwidth picked from
/// it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageCurve {
    pub x: f64,
    pub method: IntervalMethod,
    pub h0: f64,
    /// `p̂_{h₀}(x)`, the value the bootstrap intervals are checked against.
    pub target: f64,
    pub alpha: f64,
    pub b_resamples: usize,
    pub seed: u64,
    pub h_values: Vec<f64>,
    pub coverage: Vec<f64>,
    pub selected_h: f64,
    pub selection_mode: SelectionMode,
}

impl CoverageCurve {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["h", "coverage"])?;
        for (h, c) in self.h_values.iter().zip(&self.coverage) {
            w.write_record([h.to_string(), c.to_string()])?;
        }
        w.flush().map_err(|e| Error::io("<csv>", e))?;
        Ok(())
    }

    pub fn save_csv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_csv(file)
    }

    pub fn save_json(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        serde_json::to_writer_pretty(file, self)?;
        Ok(())
    }
}

/// `p̂_{h₀}(Xᵢ)` at every design point.
pub fn pilot_fit(sample: &Sample, h0: Bandwidth, kernel: &KernelSpec) -> Result<Vec<f64>> {
    sample
        .xs()
        .iter()
        .map(|&x| nw_at(sample, x, h0, kernel))
        .collect()
}

#[inline]
fn fill_bernoulli<R: Rng + ?Sized>(probs: &[f64], rng: &mut R, out: &mut [bool]) {
    for (y, &p) in out.iter_mut().zip(probs) {
        *y = rng.gen::<f64>() < p;
    }
}

/// One bootstrap resample: same design, `Yᵢ* ~ Bernoulli(pilot_fit[i])`.
pub fn bootstrap_resample<R: Rng + ?Sized>(
    sample: &Sample,
    pilot_fit: &[f64],
    rng: &mut R,
) -> Result<Sample> {
    if pilot_fit.len() != sample.len() {
        return Err(Error::LengthMismatch {
            xs: sample.len(),
            ys: pilot_fit.len(),
        });
    }
    if pilot_fit.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::InvalidConfig(
            "pilot fit values must lie in [0, 1]".into(),
        ));
    }
    let mut ys = vec![false; sample.len()];
    fill_bernoulli(pilot_fit, rng, &mut ys);
    Ok(sample.with_responses(ys))
}

/// Picks a bandwidth from a coverage curve.
///
/// With at least one `P̂ ≥ 1 − α`, returns the mean of all such grid values;
/// otherwise the grid value with the largest `P̂` (first one on ties).
pub fn select_h_from_curve(h_values: &[f64], coverage: &[f64], alpha: f64) -> (f64, SelectionMode) {
    assert!(!h_values.is_empty() && h_values.len() == coverage.len());
    let threshold = 1.0 - alpha - LEVEL_EPS;
    let (sum, count) = h_values
        .iter()
        .zip(coverage)
        .filter(|(_, &c)| c >= threshold)
        .fold((0.0, 0usize), |(s, k), (&h, _)| (s + h, k + 1));
    if count > 0 {
        return (sum / count as f64, SelectionMode::ThresholdAverage);
    }
    let mut best = 0;
    for (i, &c) in coverage.iter().enumerate() {
        if c > coverage[best] {
            best = i;
        }
    }
    (h_values[best], SelectionMode::ArgmaxFallback)
}

/// Kernel weights of every design point at `x`, one row of grid values per
/// observation, plus their column sums.
struct DesignWeights {
    grid_len: usize,
    rows: Vec<f64>,
    den: Vec<f64>,
}

impl DesignWeights {
    fn new(sample: &Sample, x: f64, grid: &[f64], kernel: &KernelSpec) -> Self {
        let g = grid.len();
        let mut rows = Vec::with_capacity(sample.len() * g);
        let mut den = vec![0.0; g];
        for &xi in sample.xs() {
            for (k, &h) in grid.iter().enumerate() {
                let w = kernel.weight((x - xi) / h);
                den[k] += w;
                rows.push(w);
            }
        }
        Self {
            grid_len: g,
            rows,
            den,
        }
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.grid_len..(i + 1) * self.grid_len]
    }
}

/// Coverage curves at `x` for several interval methods from one shared set
/// of `B` resamples. `config.method` is ignored in favour of `methods`.
pub fn estimate_coverage_curves(
    sample: &Sample,
    x: f64,
    h0: Bandwidth,
    config: &BootstrapConfig,
    methods: &[IntervalMethod],
    kernel: &KernelSpec,
) -> Result<Vec<CoverageCurve>> {
    config.validate()?;
    let z = two_sided_z(config.alpha)?;
    let level = 1.0 - config.alpha;
    let target = nw_at(sample, x, h0, kernel)?;
    let pilot = pilot_fit(sample, h0, kernel)?;
    let grid = &config.h_grid;
    let g = grid.len();
    let n = sample.len();
    let weights = DesignWeights::new(sample, x, grid, kernel);
    let n_eff: Vec<f64> = weights.den.iter().map(|d| d / kernel.roughness()).collect();
    let bandwidths = grid
        .iter()
        .map(|&h| Bandwidth::new(h))
        .collect::<Result<Vec<_>>>()?;
    let m = methods.len();

    let counts = (0..config.b_resamples)
        .into_par_iter()
        .fold(
            || (vec![0u32; m * g], vec![0.0f64; g], vec![false; n]),
            |(mut counts, mut acc, mut ys), b| {
                let mut rng = stream_rng(config.seed, b as u64);
                fill_bernoulli(&pilot, &mut rng, &mut ys);
                acc.fill(0.0);
                for (i, _) in ys.iter().enumerate().filter(|(_, &y)| y) {
                    for (a, w) in acc.iter_mut().zip(weights.row(i)) {
                        *a += w;
                    }
                }
                for k in 0..g {
                    // A resample with no local data at this h cannot produce
                    // an interval and counts as not covering.
                    let Ok(p_star) = ratio_or_no_data(acc[k], weights.den[k], x, bandwidths[k])
                    else {
                        continue;
                    };
                    for (j, &method) in methods.iter().enumerate() {
                        if let Ok(ci) = conditional_interval_z(p_star, n_eff[k], method, z, level) {
                            if ci.contains(target) {
                                counts[j * g + k] += 1;
                            }
                        }
                    }
                }
                (counts, acc, ys)
            },
        )
        .map(|(counts, _, _)| counts)
        .reduce(
            || vec![0u32; m * g],
            |mut a, b| {
                a.iter_mut().zip(&b).for_each(|(x, y)| *x += y);
                a
            },
        );

    let b_total = config.b_resamples as f64;
    Ok(methods
        .iter()
        .enumerate()
        .map(|(j, &method)| {
            let coverage: Vec<f64> = counts[j * g..(j + 1) * g]
                .iter()
                .map(|&c| f64::from(c) / b_total)
                .collect();
            let (selected_h, selection_mode) = select_h_from_curve(grid, &coverage, config.alpha);
            CoverageCurve {
                x,
                method,
                h0: h0.value(),
                target,
                alpha: config.alpha,
                b_resamples: config.b_resamples,
                seed: config.seed,
                h_values: grid.clone(),
                coverage,
                selected_h,
                selection_mode,
            }
        })
        .collect())
}

/// Coverage curve at `x` for `config.method`.
pub fn estimate_coverage_curve(
    sample: &Sample,
    x: f64,
    h0: Bandwidth,
    config: &BootstrapConfig,
    kernel: &KernelSpec,
) -> Result<CoverageCurve> {
    let mut curves = estimate_coverage_curves(sample, x, h0, config, &[config.method], kernel)?;
    Ok(curves.remove(0))
}

/// Pilot bandwidth used when none is supplied: corrected AIC over the
/// default pilot grid.
pub fn default_pilot(sample: &Sample, kernel: &KernelSpec) -> Result<Bandwidth> {
    select_h0_aicc(sample, kernel, &default_pilot_grid(sample))
}

/// Full selection procedure for `config.method`.
pub fn select_ci_bandwidth(
    sample: &Sample,
    x: f64,
    config: &BootstrapConfig,
    kernel: &KernelSpec,
    pilot: Option<Bandwidth>,
) -> Result<CoverageCurve> {
    let h0 = match pilot {
        Some(h) => h,
        None => default_pilot(sample, kernel)?,
    };
    estimate_coverage_curve(sample, x, h0, config, kernel)
}

/// Full selection procedure for several methods sharing one resample set.
pub fn select_ci_bandwidths(
    sample: &Sample,
    x: f64,
    config: &BootstrapConfig,
    methods: &[IntervalMethod],
    kernel: &KernelSpec,
    pilot: Option<Bandwidth>,
) -> Result<Vec<CoverageCurve>> {
    let h0 = match pilot {
        Some(h) => h,
        None => default_pilot(sample, kernel)?,
    };
    estimate_coverage_curves(sample, x, h0, config, methods, kernel)
}
