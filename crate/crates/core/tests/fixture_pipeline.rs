use std::path::PathBuf;

use condprop::stats::linear_grid;
use condprop::uefa::{
    build_predictor, load_ties, run_slha_analysis, ties_to_sample, AnalysisOptions,
};
use condprop::{gaussian_kernel, IntervalMethod};

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/fixture_ties.csv")
}

fn options() -> AnalysisOptions {
    AnalysisOptions {
        b_resamples: 200,
        h_grid: linear_grid(0.1, 3.0, 30),
        seed: 5,
        ..AnalysisOptions::default()
    }
}

#[test]
fn fixture_loads() {
    let ties = load_ties(&fixture()).unwrap();
    assert_eq!(ties.len(), 30);
    let s = ties_to_sample(&ties).unwrap();
    assert!(s.xs().iter().all(|x| x.is_finite()));
    // zero coefficients are floored rather than producing infinities
    assert!(ties.iter().any(|t| t.c1 == 0.0 || t.c2 == 0.0));
    assert!(ties.iter().map(build_predictor).all(f64::is_finite));
}

#[test]
fn analysis_runs_end_to_end() {
    let ties = load_ties(&fixture()).unwrap();
    let report = run_slha_analysis(&ties, &options(), &gaussian_kernel()).unwrap();
    assert_eq!(report.n_used, 30);
    for m in IntervalMethod::ALL {
        let mi = report.interval(m).unwrap();
        assert!(report.options.h_grid.first().unwrap() - 1e-12 <= mi.selected_h);
        assert!(mi.selected_h <= report.options.h_grid.last().unwrap() + 1e-12);
    }
    let text = report.to_text();
    assert!(text.contains("SLHA significant at level 0.05: "));

    let again = run_slha_analysis(&ties, &options(), &gaussian_kernel()).unwrap();
    assert_eq!(report.to_json().unwrap(), again.to_json().unwrap());
}

#[test]
fn extra_time_exclusion_drops_rows() {
    let ties = load_ties(&fixture()).unwrap();
    let flagged = ties.iter().filter(|t| t.extra_time).count();
    assert!(flagged > 0);
    let opts = AnalysisOptions {
        exclude_extra_time: true,
        ..options()
    };
    let report = run_slha_analysis(&ties, &opts, &gaussian_kernel()).unwrap();
    assert_eq!(report.n_used + flagged, ties.len());
    assert_eq!(report.extra_time_excluded, flagged);
}
