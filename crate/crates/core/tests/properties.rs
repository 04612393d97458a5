use proptest::prelude::*;

use pmroot::kernel::{inc_root_segment, OrbitSettings};
use pmroot::monotone::MonotoneSegment;
use pmroot::pm::{compose, iterate_with_budget, PmFunction};
use pmroot::verify::format_sig17;

/// Continuous PL self-map of [0, 1] with no flat pieces.
fn pl_map() -> impl Strategy<Value = PmFunction> {
    (prop::collection::vec(0.01f64..0.99, 0..6), prop::collection::vec(0.0f64..=1.0, 8))
        .prop_filter_map("flat or repeated", |(mut inner, ys)| {
            inner.sort_by(f64::total_cmp);
            let mut xs = vec![0.0];
            xs.extend(inner);
            xs.push(1.0);
            let ys = ys[..xs.len()].to_vec();
            PmFunction::new((0.0, 1.0), xs, ys).ok()
        })
}

/// Increasing PL map of [0, 1] with `Φ(x) > x` on `[0, 1)` and `Φ(1) = 1`.
fn pushing_map() -> impl Strategy<Value = (PmFunction, f64)> {
    (0.05f64..0.5, prop::collection::vec(0.05f64..0.95, 0..4), 0.1f64..0.9).prop_filter_map(
        "not strictly increasing",
        |(lift, mut inner, t)| {
            inner.sort_by(f64::total_cmp);
            inner.dedup();
            let mut xs = vec![0.0];
            xs.extend(inner);
            xs.push(1.0);
            let ys: Vec<f64> = xs.iter().map(|&x| x + lift * (1.0 - x) * (1.0 - 0.5 * x)).collect();
            if ys.windows(2).any(|w| w[1] <= w[0]) {
                return None;
            }
            let anchor = t * ys[0];
            PmFunction::new((0.0, 1.0), xs, ys).ok().map(|f| (f, anchor))
        },
    )
}

fn grid(n: usize) -> impl Iterator<Item = f64> {
    (0..n).map(move |i| i as f64 / (n - 1) as f64)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composition_is_pointwise(f in pl_map(), g in pl_map()) {
        let h = compose(&f, &g).unwrap();
        for x in grid(101) {
            prop_assert!((h.value_at(x) - f.value_at(g.value_at(x))).abs() <= 1e-12);
        }
    }

    #[test]
    fn mirror_is_an_involution(f in pl_map()) {
        let back = f.mirror_conjugate().mirror_conjugate();
        prop_assert_eq!(back.fort_count(), f.fort_count());
        for x in grid(51) {
            prop_assert!((back.value_at(x) - f.value_at(x)).abs() <= 1e-12);
        }
    }

    #[test]
    fn mirror_preserves_fort_count(f in pl_map()) {
        prop_assert_eq!(f.mirror_conjugate().fort_count(), f.fort_count());
    }

    #[test]
    fn fort_counts_never_drop(f in pl_map()) {
        let counts: Vec<usize> = (1..=3).map(|n| iterate_with_budget(&f, n, 1_000_000).unwrap().fort_count()).collect();
        prop_assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{:?}", counts);
    }

    #[test]
    fn orbit_extension_squares_to_the_map((f, anchor) in pushing_map()) {
        let phi = MonotoneSegment::from_lap(&f, 0);
        let root = inc_root_segment(&phi, anchor, OrbitSettings::default()).unwrap();
        prop_assert_eq!(root.eval(0.0).unwrap(), anchor);
        for x in grid(201) {
            let r = (root.eval(root.eval(x).unwrap()).unwrap() - phi.eval(x)).abs();
            prop_assert!(r <= 1e-9, "residual {} at {}", r, x);
        }
    }

    #[test]
    fn csv_numbers_round_trip(x in prop::num::f64::NORMAL | prop::num::f64::ZERO) {
        prop_assert_eq!(format_sig17(x).parse::<f64>().unwrap(), x);
    }
}
