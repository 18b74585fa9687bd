//! Kernel density estimation, the Nadaraya-Watson estimator and pilot
//! bandwidth selection.
//!
//! All estimators here are evaluated pointwise through [`kernel_sums`], which
//! returns the pair `(Σ K((x−Xᵢ)/h), Σ K((x−Xᵢ)/h)·Yᵢ)`. The density
//! estimate, the regression estimate and the local equivalent sample size
//! are all simple functions of that pair.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::stats::{log_grid, quantile_sorted, std_dev};

/// Paired predictor values and binary responses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    xs: Vec<f64>,
    ys: Vec<bool>,
}

impl Sample {
    pub fn new(xs: Vec<f64>, ys: Vec<bool>) -> Result<Self> {
        if xs.len() != ys.len() {
            return Err(Error::LengthMismatch {
                xs: xs.len(),
                ys: ys.len(),
            });
        }
        if xs.is_empty() {
            return Err(Error::EmptySample);
        }
        if let Some(index) = xs.iter().position(|x| !x.is_finite()) {
            return Err(Error::NonFinitePredictor { index });
        }
        Ok(Self { xs, ys })
    }

    /// Builds a sample from numeric responses, each of which must be exactly
    /// 0 or 1.
    pub fn from_numeric(xs: Vec<f64>, ys: &[f64]) -> Result<Self> {
        let ys = ys
            .iter()
            .enumerate()
            .map(|(index, &value)| match value {
                0.0 => Ok(false),
                1.0 => Ok(true),
                value => Err(Error::NonBinaryResponse { index, value }),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(xs, ys)
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn ys(&self) -> &[bool] {
        &self.ys
    }

    pub fn successes(&self) -> u64 {
        self.ys.iter().filter(|&&y| y).count() as u64
    }

    /// Sample proportion `Ȳ`.
    pub fn mean_response(&self) -> f64 {
        self.successes() as f64 / self.len() as f64
    }

    /// Same design, new responses.
    pub(crate) fn with_responses(&self, ys: Vec<bool>) -> Self {
        debug_assert_eq!(ys.len(), self.xs.len());
        Self {
            xs: self.xs.clone(),
            ys,
        }
    }
}

/// A smoothing bandwidth, in the units of the predictor.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Bandwidth(f64);

impl Bandwidth {
    pub fn new(value: f64) -> Result<Self> {
        if value > 0.0 && value.is_finite() {
            Ok(Self(value))
        } else {
            Err(Error::InvalidBandwidth(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// `(Σ K((x−Xᵢ)/h), Σ K((x−Xᵢ)/h)·Yᵢ)`, accumulated in index order.
pub fn kernel_sums(sample: &Sample, x: f64, h: Bandwidth, kernel: &KernelSpec) -> (f64, f64) {
    let h = h.value();
    let mut den = 0.0;
    let mut num = 0.0;
    for (&xi, &yi) in sample.xs.iter().zip(&sample.ys) {
        let w = kernel.weight((x - xi) / h);
        den += w;
        if yi {
            num += w;
        }
    }
    (den, num)
}

/// Kernel density estimate `f̂ₕ(x) = (nh)⁻¹ Σ K((x−Xᵢ)/h)`.
pub fn kde_at(sample: &Sample, x: f64, h: Bandwidth, kernel: &KernelSpec) -> f64 {
    let (den, _) = kernel_sums(sample, x, h, kernel);
    den / (sample.len() as f64 * h.value())
}

/// Nadaraya-Watson estimate `p̂ₕ(x)`.
pub fn nw_at(sample: &Sample, x: f64, h: Bandwidth, kernel: &KernelSpec) -> Result<f64> {
    let (den, num) = kernel_sums(sample, x, h, kernel);
    ratio_or_no_data(num, den, x, h)
}

#[inline]
pub(crate) fn ratio_or_no_data(num: f64, den: f64, x: f64, h: Bandwidth) -> Result<f64> {
    if den > 0.0 {
        // num ≤ den term by term, but guard the last ulp anyway.
        Ok((num / den).min(1.0))
    } else {
        Err(Error::NoLocalData { x, h: h.value() })
    }
}

/// Local equivalent sample size `nh·f̂ₕ(x)/R(K) = Σ K((x−Xᵢ)/h) / R(K)`.
pub fn effective_sample_size(sample: &Sample, x: f64, h: Bandwidth, kernel: &KernelSpec) -> f64 {
    let (den, _) = kernel_sums(sample, x, h, kernel);
    den / kernel.roughness()
}

/// Default pilot search grid: 100 log-spaced values on `[0.05·sd, 5·sd]`.
pub fn default_pilot_grid(sample: &Sample) -> Vec<f64> {
    let sd = std_dev(sample.xs());
    if sd > 0.0 {
        log_grid(0.05 * sd, 5.0 * sd, 100)
    } else {
        Vec::new()
    }
}

fn validated_grid(grid: &[f64]) -> Result<Vec<Bandwidth>> {
    if grid.is_empty() {
        return Err(Error::NoValidBandwidth);
    }
    let mut hs = grid
        .iter()
        .map(|&h| Bandwidth::new(h))
        .collect::<Result<Vec<_>>>()?;
    hs.sort_by(|a, b| a.value().total_cmp(&b.value()));
    Ok(hs)
}

/// Row sums `Σⱼ K((Xᵢ−Xⱼ)/h)·Yⱼ` and `Σⱼ K((Xᵢ−Xⱼ)/h)` for every design
/// point, diagonal term included.
fn smoother_row_sums(sample: &Sample, h: Bandwidth, kernel: &KernelSpec) -> (Vec<f64>, Vec<f64>) {
    let n = sample.len();
    let xs = sample.xs();
    let ys = sample.ys();
    let inv_h = 1.0 / h.value();
    let k0 = kernel.weight(0.0);
    let mut den = vec![k0; n];
    let mut num: Vec<f64> = ys.iter().map(|&y| if y { k0 } else { 0.0 }).collect();
    for i in 0..n {
        for j in (i + 1)..n {
            let w = kernel.weight((xs[i] - xs[j]) * inv_h);
            if w == 0.0 {
                continue;
            }
            den[i] += w;
            den[j] += w;
            if ys[j] {
                num[i] += w;
            }
            if ys[i] {
                num[j] += w;
            }
        }
    }
    (num, den)
}

/// Corrected-AIC score of the NW smoother at `h`, or `None` when the trace
/// of the hat matrix leaves no residual degrees of freedom.
pub fn aicc_score(sample: &Sample, h: Bandwidth, kernel: &KernelSpec) -> Option<f64> {
    let n = sample.len() as f64;
    let (num, den) = smoother_row_sums(sample, h, kernel);
    let k0 = kernel.weight(0.0);
    let trace: f64 = den.iter().map(|d| k0 / d).sum();
    if trace + 2.0 >= n {
        return None;
    }
    let rss: f64 = num
        .iter()
        .zip(&den)
        .zip(sample.ys())
        .map(|((a, b), &y)| (f64::from(u8::from(y)) - (a / b).min(1.0)).powi(2))
        .sum();
    let sigma2 = rss / n;
    Some(sigma2.ln() + (1.0 + trace / n) / (1.0 - (trace + 2.0) / n))
}

/// Pilot bandwidth minimising the corrected AIC over `grid`.
///
/// Grid points with `tr(H) + 2 ≥ n` are skipped; ties go to the smaller
/// bandwidth.
pub fn select_h0_aicc(sample: &Sample, kernel: &KernelSpec, grid: &[f64]) -> Result<Bandwidth> {
    if sample.len() < 3 {
        return Err(Error::TooFewObservations {
            needed: 3,
            got: sample.len(),
        });
    }
    let hs = validated_grid(grid)?;
    argmin_first(
        hs.into_iter()
            .filter_map(|h| aicc_score(sample, h, kernel).map(|s| (h, s))),
    )
    .ok_or(Error::NoValidBandwidth)
}

/// Leave-one-out squared prediction error at `h`. Points whose leave-one-out
/// weights all vanish are predicted by the global mean.
pub fn lscv_score(sample: &Sample, h: Bandwidth, kernel: &KernelSpec) -> f64 {
    let (num, den) = smoother_row_sums(sample, h, kernel);
    let k0 = kernel.weight(0.0);
    let ybar = sample.mean_response();
    num.iter()
        .zip(&den)
        .zip(sample.ys())
        .map(|((&a, &d), &y)| {
            let y = f64::from(u8::from(y));
            let loo_den = d - k0;
            let pred = if loo_den > 0.0 {
                ((a - y * k0) / loo_den).clamp(0.0, 1.0)
            } else {
                ybar
            };
            (y - pred).powi(2)
        })
        .sum()
}

/// Pilot bandwidth minimising the leave-one-out squared error over `grid`.
pub fn select_h0_lscv(sample: &Sample, kernel: &KernelSpec, grid: &[f64]) -> Result<Bandwidth> {
    if sample.len() < 3 {
        return Err(Error::TooFewObservations {
            needed: 3,
            got: sample.len(),
        });
    }
    let hs = validated_grid(grid)?;
    argmin_first(hs.into_iter().map(|h| (h, lscv_score(sample, h, kernel))))
        .ok_or(Error::NoValidBandwidth)
}

fn argmin_first(scored: impl Iterator<Item = (Bandwidth, f64)>) -> Option<Bandwidth> {
    let mut best: Option<(Bandwidth, f64)> = None;
    for (h, s) in scored {
        match best {
            Some((_, bs)) if !(s < bs) => {}
            _ => best = Some((h, s)),
        }
    }
    best.map(|(h, _)| h)
}

/// Normal-reference bandwidth `1.06·min(sd, IQR/1.34)·n^(−1/5)` for the
/// density of the predictor.
pub fn select_density_bandwidth(sample: &Sample) -> Result<Bandwidth> {
    let n = sample.len();
    if n < 2 {
        return Err(Error::TooFewObservations { needed: 2, got: n });
    }
    let sd = std_dev(sample.xs());
    if !(sd > 0.0) {
        return Err(Error::DegenerateSample);
    }
    let mut sorted = sample.xs().to_vec();
    sorted.sort_by(f64::total_cmp);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
    let spread = match iqr / 1.34 {
        r if r > 0.0 => sd.min(r),
        _ => sd,
    };
    Bandwidth::new(1.06 * spread * (n as f64).powf(-0.2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::gaussian_kernel;

    fn bw(h: f64) -> Bandwidth {
        Bandwidth::new(h).unwrap()
    }

    fn three_point() -> Sample {
        Sample::new(vec![-1.0, 0.0, 1.0], vec![false, true, true]).unwrap()
    }

    #[test]
    fn sample_validation() {
        assert!(matches!(
            Sample::new(vec![1.0], vec![]),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            Sample::new(vec![], vec![]),
            Err(Error::EmptySample)
        ));
        assert!(matches!(
            Sample::new(vec![f64::NAN], vec![true]),
            Err(Error::NonFinitePredictor { index: 0 })
        ));
        assert!(matches!(
            Sample::from_numeric(vec![0.0, 1.0], &[1.0, 0.5]),
            Err(Error::NonBinaryResponse { index: 1, .. })
        ));
    }

    #[test]
    fn bandwidth_validation() {
        assert!(Bandwidth::new(0.0).is_err());
        assert!(Bandwidth::new(-1.0).is_err());
        assert!(Bandwidth::new(f64::INFINITY).is_err());
    }

    #[test]
    fn kde_examples() {
        let k = gaussian_kernel();
        let one = Sample::new(vec![0.0], vec![true]).unwrap();
        assert!((kde_at(&one, 0.0, bw(1.0), &k) - 0.398_942_3).abs() < 1e-7);
        // 30-digit direct sum: (φ(2) + φ(0) + φ(−2)) / 1.5
        assert!((kde_at(&three_point(), 0.0, bw(0.5), &k) - 0.337_949_475_618_539).abs() < 1e-12);
    }

    #[test]
    fn nw_examples() {
        let k = gaussian_kernel();
        assert!(
            (nw_at(&three_point(), 0.0, bw(0.5), &k).unwrap() - 0.893_493_021_080_799).abs()
                < 1e-12
        );
        let ones = Sample::new(vec![0.0, 3.0, 7.0], vec![true; 3]).unwrap();
        assert_eq!(nw_at(&ones, 1.3, bw(0.2), &k).unwrap(), 1.0);
    }

    #[test]
    fn nw_no_local_data() {
        let k = gaussian_kernel();
        let s = Sample::new(vec![0.0], vec![true]).unwrap();
        assert!(matches!(
            nw_at(&s, 100.0, bw(0.1), &k),
            Err(Error::NoLocalData { .. })
        ));
    }

    #[test]
    fn effective_sample_size_examples() {
        let k = gaussian_kernel();
        let one = Sample::new(vec![2.5], vec![false]).unwrap();
        assert!((effective_sample_size(&one, 2.5, bw(0.3), &k) - 2f64.sqrt()).abs() < 1e-12);
        assert!(
            (effective_sample_size(&three_point(), 0.0, bw(0.5), &k) - 1.796_999_548_414_739).abs()
                < 1e-12
        );
        let s = three_point();
        let big = effective_sample_size(&s, 0.0, bw(1e8), &k);
        assert!((big / (3.0 * 2f64.sqrt()) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn lscv_oracle() {
        // Scores computed independently: 0.50125084 at h = 0.5, 1.69590891 at h = 5.
        let k = gaussian_kernel();
        let s = Sample::new(vec![0.0, 1.0, 2.0, 3.0], vec![false, false, true, true]).unwrap();
        assert!((lscv_score(&s, bw(0.5), &k) - 0.501_250_836_901_071).abs() < 1e-10);
        assert!((lscv_score(&s, bw(5.0), &k) - 1.695_908_910_267_183).abs() < 1e-10);
        assert_eq!(select_h0_lscv(&s, &k, &[0.5, 5.0]).unwrap().value(), 0.5);
    }

    #[test]
    fn lscv_minimal_and_empty() {
        let k = gaussian_kernel();
        let s = Sample::new(vec![0.0, 1.0, 2.0], vec![false, true, true]).unwrap();
        assert!(select_h0_lscv(&s, &k, &[0.1, 1.0, 10.0]).is_ok());
        assert!(matches!(
            select_h0_lscv(&s, &k, &[]),
            Err(Error::NoValidBandwidth)
        ));
        let tiny = Sample::new(vec![0.0, 1.0], vec![false, true]).unwrap();
        assert!(select_h0_lscv(&tiny, &k, &[1.0]).is_err());
    }

    #[test]
    fn aicc_constant_response_picks_smallest_admissible() {
        let k = gaussian_kernel();
        let xs: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let s = Sample::new(xs, vec![true; 20]).unwrap();
        let grid = [0.01, 0.5, 1.0, 2.0];
        // h = 0.01 interpolates (trace = n) and is skipped.
        assert!(aicc_score(&s, bw(0.01), &k).is_none());
        assert_eq!(select_h0_aicc(&s, &k, &grid).unwrap().value(), 0.5);
    }

    #[test]
    fn aicc_all_skipped() {
        let k = gaussian_kernel();
        let s = Sample::new(vec![0.0, 10.0, 20.0], vec![true, false, true]).unwrap();
        assert!(matches!(
            select_h0_aicc(&s, &k, &[0.01]),
            Err(Error::NoValidBandwidth)
        ));
    }

    #[test]
    fn density_bandwidth() {
        let s = Sample::new(vec![1.0; 5], vec![true; 5]).unwrap();
        assert!(matches!(
            select_density_bandwidth(&s),
            Err(Error::DegenerateSample)
        ));
        // sd = 1.5811, IQR/1.34 = 1.4925 → 1.06·1.4925·5^(−1/5)
        let s = Sample::new(vec![1.0, 2.0, 3.0, 4.0, 5.0], vec![true; 5]).unwrap();
        let h = select_density_bandwidth(&s).unwrap().value();
        let expected = 1.06 * (2.0 / 1.34) * 5f64.powf(-0.2);
        assert!((h - expected).abs() < 1e-12);
    }
}
