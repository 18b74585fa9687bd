use condprop::simulation::{draw_scenario_sample, scenario1_pilot};
use condprop::stats::{log_grid, stream_rng};
use condprop::{
    default_pilot_grid, gaussian_kernel, select_density_bandwidth, select_h0_aicc, select_h0_lscv,
    Sample, Scenario,
};
use rand::Rng;
use rand_distr::StandardNormal;

#[test]
fn normal_reference_bandwidth_on_gaussian_data() {
    let mut rng = stream_rng(101, 0);
    let n = 2000;
    let xs: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let s = Sample::new(xs, vec![false; n]).unwrap();
    let h = select_density_bandwidth(&s).unwrap().value();
    let expected = 1.06 * (n as f64).powf(-0.2);
    assert!(
        (h / expected - 1.0).abs() < 0.1,
        "h = {h}, expected ≈ {expected}"
    );
}

#[test]
fn aicc_pilot_on_scenario_one_is_near_the_formula() {
    let mut rng = stream_rng(102, 0);
    let s = draw_scenario_sample(Scenario::One, 1000, &mut rng).unwrap();
    let h = select_h0_aicc(&s, &gaussian_kernel(), &default_pilot_grid(&s))
        .unwrap()
        .value();
    let reference = scenario1_pilot(1000).value();
    assert!((0.188 - reference).abs() < 1e-3);
    assert!(h > reference / 2.0 && h < reference * 2.0, "AICc chose {h}");
}

#[test]
fn lscv_prefers_heavy_smoothing_for_a_flat_truth() {
    let mut rng = stream_rng(103, 0);
    let n = 400;
    let xs: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
    let ys: Vec<bool> = (0..n).map(|_| rng.gen::<f64>() < 0.3).collect();
    let s = Sample::new(xs, ys).unwrap();
    let grid = log_grid(0.02, 4.0, 60);
    let h = select_h0_lscv(&s, &gaussian_kernel(), &grid)
        .unwrap()
        .value();
    assert!(h > 1.0, "LSCV chose {h} for a constant regression");
}
