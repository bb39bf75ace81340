use proptest::prelude::*;
use rug::ops::Pow;
use rug::{Integer, Rational};

use oscint_core::integrand::{alpha_table, beta_table, f_derivative, CoefficientTable, MAX_ORDER};
use oscint_core::precision::{abs_diff, bernoulli_rational, format_decimals, pow_self_root};
use oscint_core::quadrature::{
    filon_panel_weights, filon_simpson_composite, gauss_legendre_composite, simpson_composite,
};
use oscint_core::series_accel::{cvz_accelerate, direct_sum, euler_accelerate, mrb_constant, AlternatingSeries, Method};
use oscint_core::{Complex, PrecisionContext, Real};

fn ctx(digits: u32) -> PrecisionContext {
    PrecisionContext::new(digits).unwrap()
}

fn rel_gap(a: &Real, b: &Real) -> f64 {
    let d = Real::with_val(a.prec(), a - b).abs();
    (d / Real::with_val(b.prec(), b.abs_ref())).to_f64()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn self_root_raised_back(x in 0.05f64..200.0) {
        let c = ctx(40);
        let x = c.real(x);
        let root = pow_self_root(&c, &x).unwrap();
        let back = root.pow(&x);
        prop_assert!(rel_gap(&back, &x) < 1e-40);
    }

    #[test]
    fn decimal_round_trip(mantissa in -1.0e6f64..1.0e6, digits in 30usize..70) {
        let c = ctx(digits as u32);
        let x = Real::with_val(c.prec(), mantissa) / 7u32;
        let text = format_decimals(&x, digits);
        let back = c.parse_real(&text).unwrap();
        let ulp = Real::with_val(c.prec(), 10u32).pow(-(digits as i32));
        prop_assert!(Real::with_val(c.prec(), &back - &x).abs() <= ulp);
    }

    #[test]
    fn filon_panel_exact_on_quadratics(
        q0 in -1.0f64..1.0, q1 in -1.0f64..1.0, q2 in -1.0f64..1.0,
        y0 in -3.0f64..3.0, h in 1.0e-3f64..0.5,
    ) {
        let c = ctx(40);
        let (y0, h) = (c.real(y0), c.real(h));
        let q = |y: &Real| {
            let mut v = Real::with_val(c.prec(), y * q2) + q1;
            v *= y;
            v += q0;
            v
        };
        let rule = filon_panel_weights(&c, &y0, &h).unwrap();
        let nodes: Vec<Complex> = (0..3u32)
            .map(|j| c.complex(q(&(Real::with_val(c.prec(), &h * j) + &y0))))
            .collect();
        let got = rule.apply(&c, &nodes[0], &nodes[1], &nodes[2]);
        let hi = Real::with_val(c.prec(), &h * 2u32) + &y0;
        let exact = gauss_legendre_composite(
            &c,
            |y| {
                let mut v = c.exp_i_pi(y);
                v *= q(y);
                v
            },
            &y0,
            &hi,
            1,
            40,
        )
        .unwrap()
        .value;
        prop_assert!(abs_diff(&got, &exact) < 1e-32);
    }

    #[test]
    fn finite_alternating_sums(coeffs in prop::collection::vec(-5.0f64..5.0, 1..8), offset in 0u64..3) {
        let c = ctx(40);
        let k_last = offset + coeffs.len() as u64 - 1;
        let term = |k: u64| {
            if k >= offset && k <= k_last {
                c.complex(coeffs[(k - offset) as usize])
            } else {
                c.zero()
            }
        };
        let series = AlternatingSeries::new(offset, term);
        let direct = direct_sum(&c, &series, k_last.max(1)).unwrap().value;
        let euler = euler_accelerate(&c, &series, 240).unwrap().value;
        let cvz = cvz_accelerate(&c, &series, 90).unwrap().value;
        prop_assert!(abs_diff(&direct, &euler) < 1e-45);
        prop_assert!(abs_diff(&direct, &cvz) < 1e-45);
    }
}

#[test]
fn self_root_at_integers() {
    let c = ctx(50);
    for x in [2u32, 3, 5, 10] {
        let x = c.real(x);
        let back = pow_self_root(&c, &x).unwrap().pow(&x);
        assert!(rel_gap(&back, &x) < 1e-50);
    }
}

#[test]
fn bernoulli_defining_identity() {
    for n in (2..=30u32).step_by(2) {
        let mut sum = Rational::new();
        for k in 0..=n {
            sum += Rational::from(Integer::binomial_u(n + 1, k)) * bernoulli_rational(k);
        }
        assert_eq!(sum, 0, "n = {n}");
    }
}

#[test]
fn cvz_differences_shrink() {
    let c = ctx(70);
    let values: Vec<Complex> = (10..=90)
        .step_by(10)
        .map(|n| mrb_constant(&c, Method::Cvz, n).unwrap().value)
        .collect();
    let gaps: Vec<f64> = values.windows(2).map(|w| abs_diff(&w[0], &w[1]).to_f64()).collect();
    for w in gaps.windows(2) {
        assert!(w[1] < w[0], "{gaps:?}");
    }
}

#[test]
fn euler_and_cvz_agree_on_mrb() {
    let c = ctx(70);
    let e = mrb_constant(&c, Method::Euler, 200).unwrap().value;
    let v = mrb_constant(&c, Method::Cvz, 100).unwrap().value;
    assert!(abs_diff(&e, &v) < 1e-55);
}

#[test]
fn derivative_tables_match_finite_differences() {
    let c = ctx(50);
    let h = c.real(1e-8);
    for x in [1.5, 2.0, 5.0] {
        let x = c.real(x);
        let up = Real::with_val(c.prec(), &x + &h);
        let down = Real::with_val(c.prec(), &x - &h);
        for n in 1..=6 {
            let fd = (f_derivative(&c, n - 1, &up).unwrap() - f_derivative(&c, n - 1, &down).unwrap())
                / Real::with_val(c.prec(), &h * 2u32);
            let exact = f_derivative(&c, n, &x).unwrap();
            assert!(rel_gap(&fd, &exact) < 1e-10, "n = {n}, x = {}", x.to_f64());
        }
    }
}

#[test]
fn coefficient_index_bounds() {
    for n in 0..=12 {
        let a = alpha_table(n).unwrap();
        let b = beta_table(n).unwrap();
        for &(r, s) in a.entries().keys() {
            assert!(r <= 2 * n && s <= n, "alpha {n}: ({r},{s})");
        }
        for &(r, s) in b.entries().keys() {
            assert!(r <= 2 * n + 2 && s <= n + 1, "beta {n}: ({r},{s})");
        }
    }
    assert!(alpha_table(MAX_ORDER + 1).is_err());
}

#[test]
fn both_tables_share_one_recurrence() {
    for n in 0..=10 {
        let from_beta_seed = CoefficientTable::from_seed(CoefficientTable::beta_seed(), n);
        assert_eq!(from_beta_seed.entries(), beta_table(n).unwrap().entries());
        let from_alpha_seed = CoefficientTable::from_seed(CoefficientTable::alpha_seed(), n);
        assert_eq!(from_alpha_seed.entries(), alpha_table(n).unwrap().entries());
    }
}

#[test]
fn filon_beats_simpson() {
    let c = ctx(40);
    let (zero, one) = (c.real(0), c.real(1));
    let g = |y: &Real| c.complex(Real::with_val(c.prec(), y + 1u32).recip());
    let reference = gauss_legendre_composite(
        &c,
        |y| {
            let mut v = c.exp_i_pi(y);
            v *= Real::with_val(c.prec(), y + 1u32).recip();
            v
        },
        &zero,
        &one,
        8,
        40,
    )
    .unwrap()
    .value;
    let filon = filon_simpson_composite(&c, g, &zero, &one, 64).unwrap().value;
    let simpson = simpson_composite(
        &c,
        |y| {
            let mut v = c.exp_i_pi(y);
            v *= Real::with_val(c.prec(), y + 1u32).recip();
            v
        },
        &zero,
        &one,
        128,
    )
    .unwrap()
    .value;
    assert!(abs_diff(&filon, &reference) < abs_diff(&simpson, &reference));
}

#[test]
fn composite_rules_are_reproducible() {
    let c = ctx(40);
    let (zero, one) = (c.real(0), c.real(1));
    let run = || {
        simpson_composite(&c, |y| c.exp_i_pi(y), &zero, &one, 1000)
            .unwrap()
            .value
    };
    assert_eq!(run(), run());
}
