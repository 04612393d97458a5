//! Worked examples with hand-checkable answers.

use pmroot::conditions::{
    check_kplus, check_kplus0, check_reversing_correspondence, classify_existence, match_t21, match_t22, match_t23,
    match_t24, InverseChoice, PatternMode, TheoremCase, Verdict,
};
use pmroot::engine::{construct, construct_auto, ConstructOptions, RootClass};
use pmroot::fixtures::{f1, f2, f3, identity, lin, tent};
use pmroot::kernel::{dec_root_on_k, inc_root_segment, OrbitSettings, Orientation};
use pmroot::monotone::MonotoneSegment;
use pmroot::pm::{characteristic_interval, compose, height, iterate, HeightValue, PmFunction};
use pmroot::verify::{sample, verify_root, VerifyOptions};
use pmroot::Error;

fn with_y(f: &PmFunction, i: usize, y: f64) -> PmFunction {
    let mut ys = f.ys().to_vec();
    ys[i] = y;
    PmFunction::new(f.domain(), f.xs().to_vec(), ys).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn forts_and_flat_segments() {
    assert_eq!(f1().forts().positions, vec![0.5, 0.6, 0.7, 0.8]);
    assert_eq!(f1().fort_count(), 4);
    assert_eq!(identity().fort_count(), 0);
    assert!(matches!(PmFunction::new((0.0, 1.0), vec![0.0, 1.0], vec![0.2, 0.2]), Err(Error::FlatSegment { .. })));
}

#[test]
fn pointwise_evaluation() {
    assert_eq!(tent().eval(0.5).unwrap(), 1.0);
    assert!(close(f1().eval(0.25).unwrap(), 0.2, 1e-15));
    assert_eq!(f1().eval(1.0).unwrap(), 0.45);
    assert!(matches!(f1().eval(1.5), Err(Error::OutOfDomain { .. })));
}

#[test]
fn composition_and_iteration() {
    let tt = compose(&tent(), &tent()).unwrap();
    assert_eq!(tt.fort_count(), 3);
    for (got, want) in tt.forts().positions.iter().zip([0.25, 0.5, 0.75]) {
        assert!(close(*got, want, 1e-15));
    }
    for g in [compose(&identity(), &f1()).unwrap(), compose(&f1(), &identity()).unwrap(), iterate(&f1(), 1).unwrap()] {
        for x in f1().xs() {
            assert!(close(g.value_at(*x), f1().value_at(*x), 1e-15));
        }
        assert_eq!(g.fort_count(), 4);
    }
    assert_eq!(iterate(&tent(), 3).unwrap().fort_count(), 7);
    assert_eq!(iterate(&identity(), 5).unwrap().fort_count(), 0);
}

#[test]
fn heights() {
    assert_eq!(height(&identity(), 32).unwrap().value, HeightValue::Finite(0));
    let h = height(&f1(), 32).unwrap();
    assert_eq!(h.value, HeightValue::Finite(1));
    assert_eq!(h.fort_counts, vec![0, 4, 4]);
    let h = height(&tent(), 8).unwrap();
    assert_eq!(h.value, HeightValue::Infinite { cap: 8 });
    assert_eq!(&h.fort_counts[..5], &[0, 1, 3, 7, 15]);
    assert_eq!(h.value.to_string(), "infinite(cap=8)");
}

#[test]
fn characteristic_intervals() {
    let k = characteristic_interval(&f1()).unwrap();
    assert_eq!((k.lap_index, k.bounds), (0, [0.0, 0.5]));
    let k = characteristic_interval(&f2()).unwrap();
    assert_eq!((k.lap_index, k.bounds), (3, [0.4, 0.6]));
    assert!(matches!(characteristic_interval(&tent()), Err(Error::NoCharacteristicInterval { .. })));
}

#[test]
fn lap_inverses() {
    assert_eq!(f1().lap_inverse_eval(0, 0.3).unwrap(), 0.5);
    assert_eq!(f1().lap_inverse_eval(1, 0.05).unwrap(), 0.6);
    assert!(close(f1().lap_inverse_eval(0, 0.2).unwrap(), 0.25, 1e-15));
}

#[test]
fn mirror_images() {
    let id = identity().mirror_conjugate();
    assert_eq!(id.fort_count(), 0);
    assert!(close(id.value_at(0.3), 0.3, 1e-15));
    let back = f1().mirror_conjugate().mirror_conjugate();
    for x in f1().xs() {
        assert!(close(back.value_at(*x), f1().value_at(*x), 1e-15));
    }
    let g = f1().mirror_conjugate();
    let k = characteristic_interval(&g).unwrap();
    assert_eq!(k.lap_index, g.lap_count() - 1);
    assert!(close(k.bounds[0], 0.5, 1e-15) && k.bounds[1] == 1.0);
}

#[test]
fn increasing_on_k() {
    assert!(check_kplus(&f1()).unwrap());
    assert!(check_kplus(&f2()).unwrap());
    // range [0.5, 1] sits in the decreasing last lap
    let g = PmFunction::new((0.0, 1.0), vec![0.0, 0.5, 1.0], vec![0.6, 1.0, 0.5]).unwrap();
    assert!(!check_kplus(&g).unwrap());
    assert!(!check_kplus(&g.mirror_conjugate()).unwrap());
}

#[test]
fn endpoints_condition() {
    let r = check_kplus0(&f1()).unwrap();
    assert!(!r.holds);
    assert!(r.witnesses.iter().any(|w| w.x == 0.8 && w.value == 0.0));
    let r = check_kplus0(&f2()).unwrap();
    assert!(!r.holds);
    let xs: Vec<f64> = r.witnesses.iter().map(|w| w.x).collect();
    assert!(xs.contains(&0.15) && xs.contains(&0.85));
    let r = check_kplus0(&identity()).unwrap();
    assert!(r.holds && r.witnesses.is_empty());
}

#[test]
fn first_lap_increasing_hypotheses() {
    let r = match_t21(&f1()).unwrap();
    assert_eq!(r.theorem_case, TheoremCase::T21Case3);
    assert_eq!(r.u_index, Some(4));
    assert!(!match_t21(&with_y(&f1(), 2, 0.10)).unwrap().matched());
    assert!(!match_t21(&with_y(&f1(), 4, 0.01)).unwrap().matched());
}

#[test]
fn middle_lap_increasing_hypotheses() {
    let r = match_t22(&f2(), PatternMode::Strict).unwrap();
    assert_eq!(r.theorem_case, TheoremCase::T22Case3);
    let p = r.pattern.unwrap();
    assert_eq!((p.left_seq.clone(), p.s), (vec![2, 0], Some(0)));
    assert_eq!((p.right_seq.clone(), p.t), (vec![5, 7], Some(0)));
    assert_eq!(p.left_pockets[0].max, 0.58);
    assert_eq!(p.right_pockets[0].min, 0.42);
    assert_eq!(p.left_schedule(), vec![InverseChoice::KPlus1]);
    // F(c_{k+1}) < F(c_{k-1}) broken
    assert!(!match_t22(&with_y(&f2(), 2, 0.54), PatternMode::Strict).map(|r| r.matched()).unwrap_or(false));
}

#[test]
fn first_lap_decreasing_hypotheses() {
    assert_eq!(match_t23(&f3()).unwrap().theorem_case, TheoremCase::T23);
    assert!(!match_t23(&with_y(&f3(), 2, 0.05)).unwrap().matched());
    assert!(!match_t23(&f1()).unwrap().matched());
}

#[test]
fn middle_lap_decreasing_hypotheses() {
    let r = match_t24(&f2(), PatternMode::Strict).unwrap();
    assert!(r.matched());
    assert_eq!(r.pattern, match_t22(&f2(), PatternMode::Strict).unwrap().pattern);
    assert!(!match_t24(&with_y(&f2(), 3, 0.56), PatternMode::Strict).map(|r| r.matched()).unwrap_or(false));
    assert!(matches!(match_t24(&f3(), PatternMode::Strict), Err(Error::WrongLap { .. })));
}

#[test]
fn reversing_correspondence() {
    let r = check_reversing_correspondence(&f3(), 0).unwrap();
    assert_eq!(r.fixed_points.len(), 1);
    assert!(close(r.center_fixed, 0.25, 1e-15) && r.is_reversing);
    let r = check_reversing_correspondence(&f2(), 3).unwrap();
    assert!(close(r.center_fixed, 0.5, 1e-15) && r.is_reversing);
    let flat = PmFunction::new((0.0, 1.0), vec![0.0, 0.5, 1.0], vec![0.0, 0.5, 0.2]).unwrap();
    assert!(matches!(check_reversing_correspondence(&flat, 0), Err(Error::NonIsolatedFixedPoints { .. })));
}

#[test]
fn existence_lookup() {
    assert_eq!(classify_existence(&f1(), 2, Orientation::Increasing, 1).unwrap().verdict, Verdict::Nonexistence);
    assert_eq!(classify_existence(&f1(), 2, Orientation::Decreasing, 1).unwrap().verdict, Verdict::Existence);
    assert_eq!(classify_existence(&f1(), 2, Orientation::Increasing, 2).unwrap().verdict, Verdict::Unknown);
}

#[test]
fn kernels() {
    let lin = MonotoneSegment::from_lap(&lin(), 0);
    let phi = inc_root_segment(&lin, 1.0 / 3.0, OrbitSettings::default()).unwrap();
    assert_eq!(phi.eval(0.0).unwrap(), 1.0 / 3.0);
    assert!(close(phi.eval(1.0 / 3.0).unwrap(), 0.5, 1e-15));
    assert_eq!(phi.eval(1.0).unwrap(), 1.0);

    let id = MonotoneSegment::from_lap(&identity(), 0);
    assert!(matches!(inc_root_segment(&id, 0.5, OrbitSettings::default()), Err(Error::NonIsolatedFixedPoints { .. })));

    let seg = MonotoneSegment::from_lap(&f3(), 0);
    let d = dec_root_on_k(&seg, 0.40, 0.0, OrbitSettings::default()).unwrap();
    assert_eq!(d.eval(0.0).unwrap(), 0.40);
    assert!(close(d.eval(0.25).unwrap(), 0.25, 1e-15));
    assert_eq!(d.eval(0.5).unwrap(), 0.0);

    let seg = MonotoneSegment::from_lap(&f2(), 3);
    let d = dec_root_on_k(&seg, 0.58, 0.42, OrbitSettings::default()).unwrap();
    assert_eq!(d.eval(0.4).unwrap(), 0.58);
    assert!(close(d.eval(0.6).unwrap(), 0.42, 1e-12));
    assert_eq!(d.eval(0.5).unwrap(), 0.5);
}

#[test]
fn dispatch() {
    let opts = ConstructOptions::default();
    let g = f1().mirror_conjugate();
    let r = construct_auto(&g, RootClass::Increasing, &opts).unwrap();
    assert!(r.mirrored());
    assert_eq!(construct_auto(&f2(), RootClass::Any, &opts).unwrap().source_theorem().to_string(), "T22");
    assert!(matches!(construct_auto(&tent(), RootClass::Any, &opts), Err(Error::NoApplicableTheorem { .. })));
}

#[test]
fn verification_examples() {
    let opts = ConstructOptions::default();
    let root = construct(&f1(), pmroot::conditions::Theorem::T21, &opts).unwrap();
    let r = verify_root(&f1(), &root, &VerifyOptions::default()).unwrap();
    assert!(r.passed && r.root_height == HeightValue::Finite(2));
    let r = verify_root(&f1(), &identity(), &VerifyOptions::default()).unwrap();
    assert!(!r.passed && close(r.sup_residual, 0.8, 1e-15));

    let rows = sample(&root, 1001).unwrap();
    assert!(rows.len() >= 1001);
    assert!(rows.windows(2).all(|w| w[1].0 > w[0].0));
    let rows = sample(&f1(), 3).unwrap();
    let xs: Vec<f64> = rows.iter().map(|r| r.0).collect();
    assert_eq!(xs, vec![0.0, 0.5, 0.6, 0.7, 0.8, 1.0]);
}
