use condprop::{
    classical_interval, conditional_interval, effective_sample_size, gaussian_kernel, kde_at,
    nw_at, Bandwidth, BinomialCount, ConditionalPoint, IntervalMethod, Sample,
};
use proptest::prelude::*;

fn method() -> impl Strategy<Value = IntervalMethod> {
    prop::sample::select(IntervalMethod::ALL.to_vec())
}

fn sample_strategy() -> impl Strategy<Value = (Vec<f64>, Vec<bool>)> {
    (1usize..40).prop_flat_map(|n| {
        (
            prop::collection::vec(-5.0f64..5.0, n),
            prop::collection::vec(any::<bool>(), n),
        )
    })
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #[test]
    fn smoother_ignores_order(
        (xs, ys) in sample_strategy(),
        x in -5.0f64..5.0,
        h in 0.3f64..4.0,
        shift in 0usize..40,
    ) {
        let k = gaussian_kernel();
        let h = Bandwidth::new(h).unwrap();
        let s = Sample::new(xs.clone(), ys.clone()).unwrap();
        let r = shift % xs.len();
        let mut xs2 = xs.clone();
        let mut ys2 = ys.clone();
        xs2.rotate_left(r);
        ys2.rotate_left(r);
        xs2.reverse();
        ys2.reverse();
        let s2 = Sample::new(xs2, ys2).unwrap();
        prop_assert!(close(kde_at(&s, x, h, &k), kde_at(&s2, x, h, &k)));
        match (nw_at(&s, x, h, &k), nw_at(&s2, x, h, &k)) {
            (Ok(a), Ok(b)) => prop_assert!(close(a, b)),
            (Err(_), Err(_)) => {}
            other => prop_assert!(false, "{other:?}"),
        }
    }

    #[test]
    fn duplicating_data_keeps_estimate((xs, ys) in sample_strategy(), x in -5.0f64..5.0, h in 0.3f64..4.0) {
        let k = gaussian_kernel();
        let h = Bandwidth::new(h).unwrap();
        let s = Sample::new(xs.clone(), ys.clone()).unwrap();
        let d = Sample::new([xs.clone(), xs].concat(), [ys.clone(), ys].concat()).unwrap();
        if let (Ok(a), Ok(b)) = (nw_at(&s, x, h, &k), nw_at(&d, x, h, &k)) {
            prop_assert!(close(a, b));
            prop_assert!((0.0..=1.0).contains(&a));
        }
        prop_assert!(close(kde_at(&s, x, h, &k), kde_at(&d, x, h, &k)));
        prop_assert!(close(
            2.0 * effective_sample_size(&s, x, h, &k),
            effective_sample_size(&d, x, h, &k)
        ));
    }

    #[test]
    fn intervals_stay_in_unit_range(p in 0.0f64..=1.0, n in 0.01f64..1e5, alpha in 0.001f64..0.5, m in method()) {
        let pt = ConditionalPoint::new(0.0, p, n, Bandwidth::new(1.0).unwrap()).unwrap();
        let ci = conditional_interval(&pt, m, alpha).unwrap();
        prop_assert!(0.0 <= ci.lower && ci.lower <= ci.upper && ci.upper <= 1.0);
        if m != IntervalMethod::Wald {
            prop_assert!(ci.contains(p) || (ci.lower - p).abs() < 1e-12 || (ci.upper - p).abs() < 1e-12);
        }
    }

    #[test]
    fn integral_sample_size_matches_classical(k in 0u64..500, extra in 0u64..500, alpha in 0.001f64..0.5, m in method()) {
        let n = (k + extra).max(1);
        let k = k.min(n);
        let classical = classical_interval(BinomialCount::new(k, n).unwrap(), m, alpha).unwrap();
        let pt = ConditionalPoint::new(0.0, k as f64 / n as f64, n as f64, Bandwidth::new(1.0).unwrap()).unwrap();
        let cond = conditional_interval(&pt, m, alpha).unwrap();
        prop_assert!((cond.lower - classical.lower).abs() < 1e-12);
        prop_assert!((cond.upper - classical.upper).abs() < 1e-12);
        prop_assert_eq!(cond.truncated, classical.truncated);
    }

    #[test]
    fn width_shrinks_with_sample_size(p in 0.05f64..0.95, n in 1.0f64..1e4, alpha in 0.001f64..0.5, m in method()) {
        let h = Bandwidth::new(1.0).unwrap();
        let at = |n: f64| {
            let pt = ConditionalPoint::new(0.0, p, n, h).unwrap();
            conditional_interval(&pt, m, alpha).unwrap()
        };
        let (small, large) = (at(n), at(2.0 * n));
        // truncation can only shorten the smaller-n interval, so compare the
        // untruncated ones
        if !small.truncated && !large.truncated {
            prop_assert!(large.length() < small.length());
        }
    }
}
