use oscint_core::inverse_em::{em_estimate, em_profile, moments, s_bar_closed};
use oscint_core::mi::{mi_longman, HalfPeriodRule};
use oscint_core::precision::abs_diff;
use oscint_core::PrecisionContext;

fn ctx() -> PrecisionContext {
    PrecisionContext::new(40).unwrap()
}

#[test]
fn recurrence_matches_closed_forms() {
    let c = ctx();
    let t = moments(&c, 20).unwrap();
    for d in 0..=20 {
        assert!(abs_diff(t.s_bar(d), &s_bar_closed(&c, d)) < 1e-35, "d = {d}");
    }
}

#[test]
fn error_profile_shape() {
    let c = ctx();
    let reference = mi_longman(&c, 3, 128, 60, HalfPeriodRule::FilonSimpson).unwrap().value;
    let profile = em_profile(&c, 12, &reference).unwrap();
    let errors: Vec<f64> = profile.rows.iter().map(|r| r.abs_error.to_f64()).collect();
    let best = profile.best().unwrap();
    assert!((4..=8).contains(&best.d_max), "minimum at d = {}", best.d_max);
    assert!(best.d_max != 1 && best.d_max != 12);
    assert!(errors[0] > errors[1] && errors[1] > errors[2]);
    let min = best.abs_error.to_f64();
    assert!(errors[9..12].iter().any(|&e| e > min));

    // first computed profile, pinned to two significant digits
    let pinned = [
        0.0498, 0.0233, 0.0070, 0.00247, 0.0015, 5.2e-4, 4.5e-4, 1.8e-3, 5.2e-3, 0.0124, 0.029, 0.068,
    ];
    for (d, (got, want)) in errors.iter().zip(pinned).enumerate() {
        assert!((got / want - 1.0).abs() < 0.06, "d = {}: {got:e} vs {want:e}", d + 1);
    }
}

#[test]
fn start_point_changes_the_estimate() {
    let c = ctx();
    let a = em_estimate(&c, 6, 1).unwrap();
    let b = em_estimate(&c, 6, 3).unwrap();
    assert!(abs_diff(&a, &b) > 1e-6);
}
