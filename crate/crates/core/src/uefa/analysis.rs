//! End-to-end second-leg home advantage analysis on a set of ties.
//!
//! At `X = 0` the two clubs are equally strong, so `p(0) > 0.5` means the
//! team hosting the second leg qualifies more often than chance. The
//! analysis smooths `P(Y = 1 | X = x)`, picks the interval bandwidth at
//! `x = 0` by bootstrap, and sets the result beside a logistic baseline.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::logistic::{
    deviance_gof, fit_logistic, intercept_interval, logistic_p0_interval, GoodnessOfFit,
    LogisticFit,
};
use super::ties::{ties_to_sample, TieRecord};
use crate::bootstrap::{estimate_coverage_curves, BootstrapConfig, CoverageCurve, SelectionMode};
use crate::conditional::{conditional_interval, conditional_point};
use crate::error::{Error, Result};
use crate::kernel::KernelSpec;
use crate::proportion::{wilson_prop, BinomialCount, IntervalEstimate, IntervalMethod};
use crate::smoothing::{
    default_pilot_grid, kde_at, nw_at, select_density_bandwidth, select_h0_aicc, Bandwidth,
};
use crate::stats::{check_alpha, linear_grid};

/// Fewest ties the analysis will run on.
pub const MIN_TIES: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    pub exclude_extra_time: bool,
    pub alpha: f64,
    pub b_resamples: usize,
    pub h_grid: Vec<f64>,
    pub seed: u64,
    /// Point at which the conditional intervals are built.
    pub x: f64,
    /// Number of points on the grid used for the density and smoother curves.
    pub plot_points: usize,
    pub methods: Vec<IntervalMethod>,
    /// Skip the logistic baseline.
    pub skip_logistic: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            exclude_extra_time: false,
            alpha: 0.05,
            b_resamples: 1000,
            h_grid: BootstrapConfig::default_grid(),
            seed: 0,
            x: 0.0,
            plot_points: 201,
            methods: IntervalMethod::ALL.to_vec(),
            skip_logistic: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub x: f64,
    /// `None` where the estimate is undefined (no kernel mass).
    pub y: Option<f64>,
}

/// Interval for one method at its bootstrap-selected bandwidth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodInterval {
    pub method: IntervalMethod,
    pub selected_h: f64,
    pub selection_mode: SelectionMode,
    pub p_hat: Option<f64>,
    pub n_eff: Option<f64>,
    pub interval: Option<IntervalEstimate>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositiveShare {
    pub positive: u64,
    pub total: u64,
    pub fraction: f64,
    pub interval: IntervalEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogisticSummary {
    pub fit: LogisticFit,
    pub intercept_interval: (f64, f64),
    pub p0_interval: IntervalEstimate,
    pub gof: Option<GoodnessOfFit>,
    pub gof_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub options: AnalysisOptions,
    pub n_ties: usize,
    pub n_used: usize,
    pub extra_time_excluded: usize,
    pub h0: f64,
    pub p_hat_h0: f64,
    pub intervals: Vec<MethodInterval>,
    pub coverage_curves: Vec<CoverageCurve>,
    pub density_bandwidth: f64,
    pub density_curve: Vec<CurvePoint>,
    pub smoother_curve: Vec<CurvePoint>,
    pub positive_share: PositiveShare,
    pub logistic: Option<LogisticSummary>,
    pub logistic_error: Option<String>,
    /// Whether the Wilson conditional interval at `x` lies above one half.
    pub home_advantage_significant: bool,
}

impl AnalysisReport {
    pub fn interval(&self, method: IntervalMethod) -> Option<&MethodInterval> {
        self.intervals.iter().find(|m| m.method == method)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let o = &self.options;
        let level = 100.0 * (1.0 - o.alpha);
        let _ = writeln!(s, "ties read            {}", self.n_ties);
        let _ = writeln!(s, "ties used            {}", self.n_used);
        if o.exclude_extra_time {
            let _ = writeln!(s, "extra time excluded  {}", self.extra_time_excluded);
        }
        let _ = writeln!(s, "pilot bandwidth h0   {:.4}", self.h0);
        let _ = writeln!(s, "p_hat_h0({})          {:.4}", o.x, self.p_hat_h0);
        let _ = writeln!(s, "density bandwidth    {:.4}", self.density_bandwidth);
        let ps = &self.positive_share;
        let _ = writeln!(
            s,
            "share with X > 0     {:.4} ({}/{}), {level:.0}% Wilson [{:.4}, {:.4}]",
            ps.fraction, ps.positive, ps.total, ps.interval.lower, ps.interval.upper
        );
        let _ = writeln!(s);
        let _ = writeln!(
            s,
            "{level:.0}% conditional intervals for p({}) (B = {}):",
            o.x, o.b_resamples
        );
        let _ = writeln!(
            s,
            "{:<14} {:>8} {:>9} {:>8} {:>8} {:>8}",
            "method", "h", "mode", "p_hat", "lower", "upper"
        );
        for m in &self.intervals {
            let mode = match m.selection_mode {
                SelectionMode::ThresholdAverage => "average",
                SelectionMode::ArgmaxFallback => "argmax",
            };
            match &m.interval {
                Some(ci) => {
                    let _ = writeln!(
                        s,
                        "{:<14} {:>8.4} {:>9} {:>8.4} {:>8.4} {:>8.4}",
                        m.method.as_str(),
                        m.selected_h,
                        mode,
                        m.p_hat.unwrap_or(f64::NAN),
                        ci.lower,
                        ci.upper
                    );
                }
                None => {
                    let _ = writeln!(
                        s,
                        "{:<14} {:>8.4} {:>9} unavailable: {}",
                        m.method.as_str(),
                        m.selected_h,
                        mode,
                        m.error.as_deref().unwrap_or("unknown")
                    );
                }
            }
        }
        let _ = writeln!(s);
        match (&self.logistic, &self.logistic_error) {
            (Some(l), _) => {
                let _ = writeln!(
                    s,
                    "logistic fit         alpha {:.4} (se {:.4}), beta {:.4} (se {:.4})",
                    l.fit.alpha_hat,
                    l.fit.alpha_se(),
                    l.fit.beta_hat,
                    l.fit.beta_se()
                );
                let _ = writeln!(
                    s,
                    "logistic p({})        {:.4}, {level:.0}% [{:.4}, {:.4}]",
                    o.x, l.p0_interval.center, l.p0_interval.lower, l.p0_interval.upper
                );
                match (&l.gof, &l.gof_error) {
                    (Some(g), _) => {
                        let _ = writeln!(
                            s,
                            "deviance GoF         {:.3} on {} df, p = {:.4} ({} groups)",
                            g.statistic, g.dof, g.p_value, g.groups
                        );
                    }
                    (None, Some(e)) => {
                        let _ = writeln!(s, "deviance GoF         unavailable: {e}");
                    }
                    _ => {}
                }
            }
            (None, Some(e)) => {
                let _ = writeln!(s, "logistic fit         unavailable: {e}");
            }
            _ => {}
        }
        let _ = writeln!(
            s,
            "SLHA significant at level {}: {}",
            o.alpha,
            if self.home_advantage_significant {
                "yes"
            } else {
                "no"
            }
        );
        s
    }

    /// Writes `report.json`, `report.txt`, `density.csv`, `smoother.csv` and
    /// one `coverage_<method>.csv` per method into `dir`, creating it.
    pub fn save(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let write = |name: &str, body: &str| {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| Error::io(path, e))
        };
        write("report.json", &self.to_json()?)?;
        write("report.txt", &self.to_text())?;
        write_curve(&dir.join("density.csv"), "density", &self.density_curve)?;
        write_curve(&dir.join("smoother.csv"), "p_hat", &self.smoother_curve)?;
        for c in &self.coverage_curves {
            c.save_csv(&dir.join(format!("coverage_{}.csv", c.method.as_str())))?;
        }
        Ok(())
    }
}

fn write_curve(path: &Path, column: &str, points: &[CurvePoint]) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(["x", column])?;
    for p in points {
        let y = p.y.map(|v| v.to_string()).unwrap_or_default();
        w.write_record([p.x.to_string(), y])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Runs the full analysis on `ties`.
pub fn run_slha_analysis(
    ties: &[TieRecord],
    options: &AnalysisOptions,
    kernel: &KernelSpec,
) -> Result<AnalysisReport> {
    check_alpha(options.alpha)?;
    if options.methods.is_empty() {
        return Err(Error::InvalidConfig("no interval methods requested".into()));
    }
    if options.plot_points < 2 {
        return Err(Error::InvalidConfig("need at least two plot points".into()));
    }
    let used: Vec<TieRecord> = ties
        .iter()
        .filter(|t| !(options.exclude_extra_time && t.extra_time))
        .cloned()
        .collect();
    if used.len() < MIN_TIES {
        return Err(Error::TooFewObservations {
            needed: MIN_TIES,
            got: used.len(),
        });
    }
    let sample = ties_to_sample(&used)?;

    let h0 = select_h0_aicc(&sample, kernel, &default_pilot_grid(&sample))?;
    let p_hat_h0 = nw_at(&sample, options.x, h0, kernel)?;

    let config = BootstrapConfig {
        b_resamples: options.b_resamples,
        h_grid: options.h_grid.clone(),
        alpha: options.alpha,
        seed: options.seed,
        method: options.methods[0],
    };
    let curves =
        estimate_coverage_curves(&sample, options.x, h0, &config, &options.methods, kernel)?;

    let intervals = curves
        .iter()
        .map(|c| {
            let h = Bandwidth::new(c.selected_h)?;
            let at = conditional_point(&sample, options.x, h, kernel)
                .and_then(|pt| Ok((pt, conditional_interval(&pt, c.method, options.alpha)?)));
            Ok(match at {
                Ok((pt, ci)) => MethodInterval {
                    method: c.method,
                    selected_h: c.selected_h,
                    selection_mode: c.selection_mode,
                    p_hat: Some(pt.p_hat),
                    n_eff: Some(pt.n_eff),
                    interval: Some(ci),
                    error: None,
                },
                Err(e) => MethodInterval {
                    method: c.method,
                    selected_h: c.selected_h,
                    selection_mode: c.selection_mode,
                    p_hat: None,
                    n_eff: None,
                    interval: None,
                    error: Some(e.to_string()),
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let (lo, hi) = sample
        .xs()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| {
            (a.min(x), b.max(x))
        });
    let plot = linear_grid(lo, hi.max(lo + 1e-9), options.plot_points);
    let hd = select_density_bandwidth(&sample)?;
    let density_curve = plot
        .iter()
        .map(|&x| CurvePoint {
            x,
            y: Some(kde_at(&sample, x, hd, kernel)),
        })
        .collect();
    let smoother_curve = plot
        .iter()
        .map(|&x| CurvePoint {
            x,
            y: nw_at(&sample, x, h0, kernel).ok(),
        })
        .collect();

    let positive = sample.xs().iter().filter(|&&x| x > 0.0).count() as u64;
    let total = sample.len() as u64;
    let positive_share = PositiveShare {
        positive,
        total,
        fraction: positive as f64 / total as f64,
        interval: wilson_prop(BinomialCount::new(positive, total)?, options.alpha)?,
    };

    let (logistic, logistic_error) = if options.skip_logistic {
        (None, None)
    } else {
        match fit_logistic(&sample).and_then(|fit| {
            let ii = intercept_interval(&fit, options.alpha)?;
            let p0 = logistic_p0_interval(&fit, options.alpha)?;
            Ok((fit, ii, p0))
        }) {
            Ok((fit, intercept_interval, p0_interval)) => {
                let (gof, gof_error) = match deviance_gof(&fit, &sample) {
                    Ok(g) => (Some(g), None),
                    Err(e) => (None, Some(e.to_string())),
                };
                (
                    Some(LogisticSummary {
                        fit,
                        intercept_interval,
                        p0_interval,
                        gof,
                        gof_error,
                    }),
                    None,
                )
            }
            Err(e) => (None, Some(e.to_string())),
        }
    };

    let home_advantage_significant = intervals
        .iter()
        .find(|m| m.method == IntervalMethod::Wilson)
        .and_then(|m| m.interval.as_ref())
        .is_some_and(|ci| ci.lower > 0.5);

    Ok(AnalysisReport {
        options: options.clone(),
        n_ties: ties.len(),
        n_used: used.len(),
        extra_time_excluded: ties.len() - used.len(),
        h0: h0.value(),
        p_hat_h0,
        intervals,
        coverage_curves: curves,
        density_bandwidth: hd.value(),
        density_curve,
        smoother_curve,
        positive_share,
        logistic,
        logistic_error,
        home_advantage_significant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::gaussian_kernel;
    use crate::stats::{logistic, stream_rng};
    use crate::uefa::ties::Competition;
    use rand::Rng;

    fn synthetic_ties(n: usize, seed: u64) -> Vec<TieRecord> {
        let mut rng = stream_rng(seed, 0);
        (0..n)
            .map(|i| {
                let c1: f64 = rng.gen_range(1.0..100.0);
                let c2: f64 = rng.gen_range(1.0..100.0);
                let x = (c2 / c1).ln();
                TieRecord {
                    season: "2015-16".into(),
                    competition: Competition::EuropaLeague,
                    round: "R32".into(),
                    flht: format!("home{i}"),
                    slht: format!("away{i}"),
                    c1,
                    c2,
                    slht_qualified: rng.gen::<f64>() < logistic(0.3 + x),
                    extra_time: i % 9 == 0,
                }
            })
            .collect()
    }

    fn quick_options() -> AnalysisOptions {
        AnalysisOptions {
            b_resamples: 60,
            h_grid: linear_grid(0.2, 2.0, 10),
            plot_points: 21,
            ..AnalysisOptions::default()
        }
    }

    #[test]
    fn report_is_complete() {
        let ties = synthetic_ties(120, 4);
        let r = run_slha_analysis(&ties, &quick_options(), &gaussian_kernel()).unwrap();
        assert_eq!(r.n_used, 120);
        assert_eq!(r.intervals.len(), 3);
        assert_eq!(r.coverage_curves.len(), 3);
        assert_eq!(r.density_curve.len(), 21);
        assert!(r.logistic.is_some());
        for m in &r.intervals {
            let ci = m.interval.as_ref().unwrap();
            assert!(ci.lower <= ci.upper);
        }
        let wilson = r
            .interval(IntervalMethod::Wilson)
            .unwrap()
            .interval
            .unwrap();
        assert_eq!(r.home_advantage_significant, wilson.lower > 0.5);
        assert!(r.to_text().contains("wilson"));
    }

    #[test]
    fn extra_time_filter() {
        let ties = synthetic_ties(60, 5);
        let expected = ties.iter().filter(|t| t.extra_time).count();
        let opts = AnalysisOptions {
            exclude_extra_time: true,
            ..quick_options()
        };
        let r = run_slha_analysis(&ties, &opts, &gaussian_kernel()).unwrap();
        assert_eq!(r.extra_time_excluded, expected);
        assert_eq!(r.n_used, 60 - expected);
    }

    #[test]
    fn too_few_ties() {
        let ties = synthetic_ties(9, 6);
        assert!(matches!(
            run_slha_analysis(&ties, &quick_options(), &gaussian_kernel()),
            Err(Error::TooFewObservations { needed: 10, got: 9 })
        ));
    }

    #[test]
    fn deterministic_and_saved() {
        let ties = synthetic_ties(40, 7);
        let a = run_slha_analysis(&ties, &quick_options(), &gaussian_kernel()).unwrap();
        let b = run_slha_analysis(&ties, &quick_options(), &gaussian_kernel()).unwrap();
        assert_eq!(a, b);
        let dir = tempfile::tempdir().unwrap();
        a.save(dir.path()).unwrap();
        for f in [
            "report.json",
            "report.txt",
            "density.csv",
            "smoother.csv",
            "coverage_wilson.csv",
        ] {
            assert!(dir.path().join(f).exists(), "{f}");
        }
    }
}
