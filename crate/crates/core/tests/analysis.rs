use qvpath::analysis::{
    backward_shift_check, covering_peak_check, detect_peaks, evolution_shift_check, fidelity, find_covering_n,
    origin_suppression_check, separation_sweep, sweep, AnalysisError, DEFAULT_MIN_HEIGHT_FRACTION,
};
use qvpath::engine::{distribution, gaussian_reference, Distribution};
use qvpath::models::{build_symmetric, build_tviolating};
use qvpath::symmetry::Lattice;
use proptest::prelude::*;

/// Odd site count at unit spacing that clears the 8x extent guard.
fn guarded_lattice(lambda: f64, n_max: usize) -> Lattice {
    let needed = 8.0 * 2.0 * lambda * (2.0 * n_max as f64).sqrt();
    Lattice::new((needed.ceil() as usize + 2) | 1, 1.0).unwrap()
}

#[test]
fn separation_law_across_lambda() {
    let steps = [1000, 2000, 4000];
    for lambda in [0.05, 0.1, 0.2] {
        let rows = separation_sweep(lambda, 1.0, guarded_lattice(lambda, 4000), &steps).unwrap();
        for pair in rows.windows(2) {
            assert!(pair[1].separation > pair[0].separation);
        }
        for r in &rows {
            assert!(r.rel_error < 0.01, "lambda {lambda} N {}: {}", r.steps, r.rel_error);
        }
    }
}

#[test]
fn zero_lambda_never_separates() {
    let rows = separation_sweep(0.0, 1.0, Lattice::new(41, 0.5).unwrap(), &[50, 100, 200]).unwrap();
    assert!(rows.iter().all(|r| r.separation == 0.0 && r.peak_count == 1));
}

#[test]
fn sweep_guards() {
    let small = Lattice::new(51, 1.0).unwrap();
    assert!(matches!(
        separation_sweep(0.1, 1.0, small, &[1000, 4000]),
        Err(AnalysisError::ExtentTooSmall { .. })
    ));
    let model = build_symmetric(small);
    assert!(matches!(sweep(&model, 1.0, &[]), Err(AnalysisError::EmptyStepList)));
    assert!(matches!(sweep(&model, 1.0, &[10, 10]), Err(AnalysisError::StepListNotIncreasing)));
}

#[test]
fn origin_suppression_resolves_with_n() {
    let early = build_tviolating(Lattice::new(41, 0.5).unwrap(), 0.1).unwrap();
    let s = origin_suppression_check(&distribution(&early.build_qvp(25, 1.0).unwrap()));
    assert!(s > 0.1, "{s}");
    let late = build_tviolating(guarded_lattice(0.1, 10_000), 0.1).unwrap();
    let s = origin_suppression_check(&distribution(&late.build_qvp(10_000, 1.0).unwrap()));
    assert!(s < 0.01, "{s}");
}

#[test]
fn gaussian_reference_peaks_at_origin() {
    let lattice = Lattice::new(61, 0.25).unwrap();
    let g = gaussian_reference(1.0, &lattice).unwrap();
    assert_eq!(origin_suppression_check(&g), 1.0);
    let report = detect_peaks(&g, DEFAULT_MIN_HEIGHT_FRACTION).unwrap();
    assert_eq!(report.peaks.len(), 1);
    assert!(report.peaks[0].center.abs() < 1e-12);
    assert!((report.peaks[0].width - 1.0).abs() < 0.01);
}

#[test]
fn neighbouring_members_have_high_fidelity() {
    let model = build_symmetric(Lattice::new(129, 0.25).unwrap());
    let a = model.build_qvp(5000, 1.0).unwrap();
    let b = model.build_qvp(6000, 1.0).unwrap();
    assert!(fidelity(&a, &b).unwrap() > 0.99);
    assert!((fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn forward_and_backward_evolution_move_peaks_apart_in_time() {
    let lattice = Lattice::new(205, 1.0).unwrap();
    let model = build_tviolating(lattice, 0.1).unwrap();
    let state = model.build_qvp(4000, 1.0).unwrap();
    for tau in [1.0, 5.0, 10.0] {
        let fwd = evolution_shift_check(&state, &model, tau).unwrap();
        let back = backward_shift_check(&state, &model, tau).unwrap();
        assert!(fwd.passed() && back.passed(), "tau {tau}: {fwd:?} {back:?}");
        assert!(fwd.shifts.iter().all(|&s| s > 0.0));
        assert!(back.shifts.iter().all(|&s| s < 0.0));
    }
    let zero = evolution_shift_check(&state, &model, 0.0).unwrap();
    assert!(zero.max_error() < 1e-12);
    assert!(evolution_shift_check(&state, &model, 100.0).is_err());
}

#[test]
fn symmetric_peak_follows_translation() {
    let lattice = Lattice::new(101, 0.5).unwrap();
    let model = build_symmetric(lattice);
    let state = model.build_qvp(600, 1.0).unwrap();
    let check = evolution_shift_check(&state, &model, 2.5).unwrap();
    assert!(check.passed(), "{check:?}");
    assert!((check.shifts[0] - 2.5).abs() < 1e-6);
}

#[test]
fn covering_n() {
    assert_eq!(find_covering_n(10.0, 0.1, 1.0).unwrap(), 5000);
    assert_eq!(find_covering_n(20.0, 0.1, 1.0).unwrap(), 20000);
    assert_eq!(find_covering_n(1e-9, 0.1, 1.0).unwrap(), 1);
    assert!(matches!(find_covering_n(10.0, 0.0, 1.0), Err(AnalysisError::NoDynamics)));
    let model = build_tviolating(Lattice::new(205, 1.0).unwrap(), 0.1).unwrap();
    let check = covering_peak_check(&model, 10.0, 1.0).unwrap();
    assert_eq!(check.steps, 5000);
    assert!(check.passed, "{check:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn peak_detection_is_deterministic(masses in prop::collection::vec(0.0..1.0f64, 31)) {
        prop_assume!(masses.iter().any(|&m| m > 1e-6));
        let d = Distribution::from_masses(Lattice::new(31, 1.0).unwrap(), masses).unwrap();
        let a = detect_peaks(&d, DEFAULT_MIN_HEIGHT_FRACTION).unwrap();
        let b = detect_peaks(&d, DEFAULT_MIN_HEIGHT_FRACTION).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(!a.peaks.is_empty());
        prop_assert!(a.peaks.windows(2).all(|p| p[0].center < p[1].center));
        let total: f64 = a.peaks.iter().map(|p| p.mass).sum();
        prop_assert!(total <= 1.0 + 1e-12);
    }
}
