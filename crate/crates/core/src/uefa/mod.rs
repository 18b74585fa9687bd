//! Second-leg home advantage in UEFA two-legged knockout ties.

mod analysis;
mod logistic;
mod ties;

pub use analysis::{
    run_slha_analysis, AnalysisOptions, AnalysisReport, CurvePoint, LogisticSummary,
    MethodInterval, PositiveShare, MIN_TIES,
};
pub use logistic::{
    deviance_gof, fit_logistic, intercept_interval, logistic_log_likelihood, logistic_p0_interval,
    logistic_score, GoodnessOfFit, LogisticFit,
};
pub use ties::{
    build_predictor, build_predictor_with, load_ties, read_ties, ties_to_sample, Competition,
    TieRecord, TIE_HEADER, ZERO_COEFFICIENT_SUBSTITUTE,
};
