use std::io::Write;
use std::path::Path;

use anyhow::Context;
use condprop::stats::linear_grid;
use condprop::uefa::{run_slha_analysis, AnalysisOptions};
use condprop::{
    classical_interval, conditional_interval, conditional_point, gaussian_kernel,
    run_coverage_study, select_ci_bandwidths, Bandwidth, BinomialCount, BootstrapConfig,
    IntervalEstimate, PilotRule, Scenario, ScenarioSpec, SelectionMode,
};
use serde_json::json;

use crate::data::{load_sample, load_ties_from};
use crate::{usage, AnalyzeArgs, CiPropArgs, Failure, Format, PilotArg, SelectHArgs, SimulateArgs};

type CmdResult = Result<(), Failure>;

fn check_alpha(alpha: f64) -> CmdResult {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(usage(format!(
            "--alpha must lie strictly between 0 and 1, got {alpha}"
        )))
    }
}

fn check_b(b: usize) -> CmdResult {
    if b == 0 {
        Err(usage("--b must be at least 1"))
    } else {
        Ok(())
    }
}

fn emit(text: &str) -> CmdResult {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|()| out.flush())
        .context("cannot write to stdout")?;
    Ok(())
}

fn to_json(value: &impl serde::Serialize) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).context("cannot serialise output")?;
    s.push('\n');
    Ok(s)
}

fn warn_degenerate(ci: &IntervalEstimate) {
    if ci.is_degenerate() {
        eprintln!(
            "warning: {} interval has zero width at estimate {}; it cannot cover any other value",
            ci.method, ci.center
        );
    }
}

fn mode_str(mode: SelectionMode) -> &'static str {
    match mode {
        SelectionMode::ThresholdAverage => "threshold_average",
        SelectionMode::ArgmaxFallback => "argmax_fallback",
    }
}

fn prepare_out(dir: &Path) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .with_context(|| format!("cannot create output directory {}", dir.display()))?;
    Ok(())
}

pub fn ci_prop(args: &CiPropArgs, format: Format) -> CmdResult {
    check_alpha(args.alpha)?;
    if args.trials == 0 {
        return Err(usage("--trials must be at least 1"));
    }
    if args.successes > args.trials {
        return Err(usage(format!(
            "--successes ({}) exceeds --trials ({})",
            args.successes, args.trials
        )));
    }
    let count = BinomialCount::new(args.successes, args.trials)?;
    let intervals = args
        .method
        .methods()
        .into_iter()
        .map(|m| classical_interval(count, m, args.alpha))
        .collect::<condprop::Result<Vec<_>>>()?;
    intervals.iter().for_each(warn_degenerate);

    let d = args.digits;
    let body = match format {
        Format::Json => to_json(&intervals)?,
        Format::Csv => {
            let mut s = String::from("method,lower,upper,center,level,truncated\n");
            for ci in &intervals {
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    ci.method, ci.lower, ci.upper, ci.center, ci.level, ci.truncated
                ));
            }
            s
        }
        Format::Text => {
            let mut s = format!(
                "{}/{} = {:.d$}, level {}\n",
                args.successes,
                args.trials,
                count.proportion(),
                1.0 - args.alpha
            );
            for ci in &intervals {
                s.push_str(&format!(
                    "{:<14} [{:.d$}, {:.d$}]  center {:.d$}{}\n",
                    ci.method.as_str(),
                    ci.lower,
                    ci.upper,
                    ci.center,
                    if ci.truncated {
                        "  (truncated to [0, 1])"
                    } else {
                        ""
                    }
                ));
            }
            s
        }
    };
    emit(&body)
}

pub fn select_h(args: &SelectHArgs, format: Format) -> CmdResult {
    check_alpha(args.alpha)?;
    check_b(args.b)?;
    if !args.x.is_finite() {
        return Err(usage("--x must be finite"));
    }
    if !(args.grid_min > 0.0 && args.grid_min.is_finite() && args.grid_max.is_finite()) {
        return Err(usage(
            "--grid-min must be positive and both grid ends finite",
        ));
    }
    if args.grid_max <= args.grid_min {
        return Err(usage(format!(
            "--grid-max ({}) must exceed --grid-min ({})",
            args.grid_max, args.grid_min
        )));
    }
    if args.grid_steps < 2 {
        return Err(usage("--grid-steps must be at least 2"));
    }
    let pilot = match args.pilot.as_str() {
        "auto" => None,
        v => match v.parse::<f64>().ok().and_then(|h| Bandwidth::new(h).ok()) {
            Some(h) => Some(h),
            None => {
                return Err(usage(format!(
                    "--pilot must be `auto` or a positive number, got `{v}`"
                )))
            }
        },
    };

    let sample = load_sample(&args.data)?;
    let kernel = gaussian_kernel();
    let methods = args.method.methods();
    let config = BootstrapConfig {
        b_resamples: args.b,
        h_grid: linear_grid(args.grid_min, args.grid_max, args.grid_steps),
        alpha: args.alpha,
        seed: args.seed,
        method: methods[0],
    };
    let curves = select_ci_bandwidths(&sample, args.x, &config, &methods, &kernel, pilot)?;

    let mut summaries = Vec::new();
    for c in &curves {
        let interval = Bandwidth::new(c.selected_h)
            .and_then(|h| conditional_point(&sample, args.x, h, &kernel))
            .and_then(|pt| conditional_interval(&pt, c.method, args.alpha));
        if let Ok(ci) = &interval {
            warn_degenerate(ci);
        }
        summaries.push(json!({
            "method": c.method,
            "x": c.x,
            "h0": c.h0,
            "target": c.target,
            "selected_h": c.selected_h,
            "selection_mode": c.selection_mode,
            "interval": interval.as_ref().ok(),
            "error": interval.as_ref().err().map(ToString::to_string),
        }));
    }

    if let Some(dir) = &args.out.out {
        prepare_out(dir)?;
        for c in &curves {
            c.save_csv(&dir.join(format!("coverage_{}.csv", c.method.as_str())))?;
            c.save_json(&dir.join(format!("selection_{}.json", c.method.as_str())))?;
        }
    }

    let body = match format {
        Format::Json => to_json(&summaries)?,
        Format::Csv => {
            let mut s = String::from("method,h,coverage\n");
            for c in &curves {
                for (h, p) in c.h_values.iter().zip(&c.coverage) {
                    s.push_str(&format!("{},{h},{p}\n", c.method));
                }
            }
            s
        }
        Format::Text => {
            let mut s = format!(
                "n = {}, x = {}, pilot h0 = {:.4}, p_hat_h0(x) = {:.4}, B = {}\n",
                sample.len(),
                args.x,
                curves[0].h0,
                curves[0].target,
                args.b
            );
            for (c, summary) in curves.iter().zip(&summaries) {
                s.push_str(&format!(
                    "{:<14} selected h = {:.4} ({})",
                    c.method.as_str(),
                    c.selected_h,
                    mode_str(c.selection_mode)
                ));
                match summary["interval"].as_object() {
                    Some(ci) => s.push_str(&format!(
                        "  interval [{:.4}, {:.4}]\n",
                        ci["lower"].as_f64().unwrap_or(f64::NAN),
                        ci["upper"].as_f64().unwrap_or(f64::NAN)
                    )),
                    None => s.push_str(&format!(
                        "  interval unavailable: {}\n",
                        summary["error"].as_str().unwrap_or("unknown")
                    )),
                }
            }
            s
        }
    };
    emit(&body)
}

pub fn simulate(args: &SimulateArgs, format: Format) -> CmdResult {
    check_alpha(args.alpha)?;
    check_b(args.b)?;
    if args.n < 3 {
        return Err(usage("--n must be at least 3"));
    }
    if args.m == 0 {
        return Err(usage("--m must be at least 1"));
    }
    if args.x.iter().any(|x| !x.is_finite()) {
        return Err(usage("--x values must be finite"));
    }
    let scenario = Scenario::from_id(args.scenario).map_err(|e| usage(e.to_string()))?;
    let mut spec = ScenarioSpec::new(scenario, args.n);
    spec.m_replicates = args.m;
    spec.b_resamples = args.b;
    spec.alpha = args.alpha;
    spec.seed = args.seed;
    if !args.x.is_empty() {
        spec.eval_points = args.x.clone();
    }
    match args.pilot {
        Some(PilotArg::Fixed) => spec.pilot_rule = PilotRule::FixedFormula,
        Some(PilotArg::Aicc) => spec.pilot_rule = PilotRule::Aicc,
        None => {}
    }
    spec.validate().map_err(|e| usage(e.to_string()))?;

    let report = run_coverage_study(&spec, &gaussian_kernel())?;
    if let Some(dir) = &args.out.out {
        prepare_out(dir)?;
        report.save(dir)?;
    }

    let body = match format {
        Format::Json => to_json(&json!({ "spec": report.spec, "rows": report.rows }))?,
        Format::Csv => {
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            String::from_utf8(buf).context("CSV output is not UTF-8")?
        }
        Format::Text => report.to_text(),
    };
    emit(&body)
}

pub fn analyze(args: &AnalyzeArgs, format: Format) -> CmdResult {
    check_alpha(args.alpha)?;
    check_b(args.b)?;
    let ties = load_ties_from(&args.data)?;
    let options = AnalysisOptions {
        exclude_extra_time: args.exclude_extra_time,
        alpha: args.alpha,
        b_resamples: args.b,
        seed: args.seed,
        skip_logistic: args.no_logistic,
        ..AnalysisOptions::default()
    };
    let report = run_slha_analysis(&ties, &options, &gaussian_kernel())?;
    for m in &report.intervals {
        if let Some(ci) = &m.interval {
            warn_degenerate(ci);
        }
    }
    if let Some(dir) = &args.out.out {
        prepare_out(dir)?;
        report.save(dir)?;
    }

    let body = match format {
        Format::Json => format!("{}\n", report.to_json()?),
        Format::Csv => {
            let mut s = String::from("method,selected_h,selection_mode,p_hat,lower,upper\n");
            let opt = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
            for m in &report.intervals {
                s.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    m.method,
                    m.selected_h,
                    mode_str(m.selection_mode),
                    opt(m.p_hat),
                    opt(m.interval.as_ref().map(|c| c.lower)),
                    opt(m.interval.as_ref().map(|c| c.upper)),
                ));
            }
            s
        }
        Format::Text => report.to_text(),
    };
    emit(&body)
}
