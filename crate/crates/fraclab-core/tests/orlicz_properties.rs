//! Property tests for the discrete norms and Orlicz machinery.

use fraclab_core::*;
use proptest::prelude::*;

fn grid() -> GridSpec {
    make_grid(1, 10.0, 128).unwrap()
}

prop_compose! {
    fn arb_field()(bumps in prop::collection::vec(
        (-2.0..2.0f64, -4.0..4.0f64, 0.3..2.0f64),
        1..5,
    )) -> GridFunction {
        GridFunction::from_fn(grid(), move |x| {
            bumps
                .iter()
                .map(|(a, c, w)| a * (-(x[0] - c).powi(2) / (w * w)).exp())
                .sum()
        })
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn luxemburg_norm_is_homogeneous(u in arb_field()) {
        prop_assume!(!u.is_zero());
        let gauge = OrliczGauge::exp_lp(2.0).unwrap();
        let base = luxemburg_norm(&u, gauge, 1e-12).unwrap().norm;
        for alpha in [0.1, 2.0, 10.0] {
            let scaled = luxemburg_norm(&u.scale(alpha), gauge, 1e-12).unwrap().norm;
            prop_assert!(
                (scaled - alpha * base).abs() <= 1e-10 * alpha * base,
                "alpha={alpha}: {scaled} vs {}", alpha * base
            );
        }
    }

    #[test]
    fn luxemburg_norm_satisfies_the_triangle_inequality(u in arb_field(), v in arb_field()) {
        let gauge = OrliczGauge::exp_lp(2.0).unwrap();
        let sum = u.zip(&v, |a, b| a + b).unwrap();
        let lhs = luxemburg_norm(&sum, gauge, 1e-11).unwrap().norm;
        let rhs = luxemburg_norm(&u, gauge, 1e-11).unwrap().norm
            + luxemburg_norm(&v, gauge, 1e-11).unwrap().norm;
        prop_assert!(lhs <= rhs * (1.0 + 1e-8) + 1e-12, "{lhs} vs {rhs}");
    }

    #[test]
    fn gauge_integral_at_the_norm_stays_admissible(u in arb_field()) {
        prop_assume!(!u.is_zero());
        for gauge in [
            OrliczGauge::exp_lp(1.5).unwrap(),
            OrliczGauge::exp_lp_reduced(2.0).unwrap(),
            OrliczGauge::power(3.0).unwrap(),
        ] {
            let norm = luxemburg_norm(&u, gauge, 1e-11).unwrap().norm;
            let integral = gauge_integral(&u, gauge, norm).unwrap();
            prop_assert!(integral <= 1.0 + 1e-8, "{gauge:?}: integral {integral}");
        }
    }

    #[test]
    fn lq_norm_monotone_under_pointwise_domination(u in arb_field(), v in arb_field()) {
        // |u| <= |u| + |v| nodewise, so every norm is ordered.
        let dominating = u.zip(&v, |a, b| a.abs() + b.abs()).unwrap();
        for q in [1.0, 2.0, 5.0, f64::INFINITY] {
            let small = lq_norm(&u, q).unwrap();
            let large = lq_norm(&dominating, q).unwrap();
            prop_assert!(small <= large * (1.0 + 1e-12), "q={q}: {small} vs {large}");
        }
    }

    #[test]
    fn interpolation_inequality_on_random_fields(u in arb_field(), q in 1.0..4.0f64, extra in 0.0..5.0f64) {
        let r = q + extra;
        let lhs = lq_norm(&u, r).unwrap();
        let rhs = lq_norm(&u, q).unwrap().powf(q / r)
            * lq_norm(&u, f64::INFINITY).unwrap().powf(1.0 - q / r);
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-300, "q={q} r={r}: {lhs} vs {rhs}");
    }

    #[test]
    fn reduced_gauge_embedding_with_computed_constant(u in arb_field(), p in 1.0..3.0f64, q_frac in 0.0..1.0f64) {
        // ||u||_{reduced} <= C(p)(||u||_q + ||u||_inf) for q <= 2p.
        prop_assume!(!u.is_zero());
        let q = 1.0 + q_frac * (2.0 * p - 1.0);
        let c = reduced_gauge_constant(p).unwrap();
        let lhs = luxemburg_norm(&u, OrliczGauge::exp_lp_reduced(p).unwrap(), 1e-10).unwrap().norm;
        let rhs = c * (lq_norm(&u, q).unwrap() + lq_norm(&u, f64::INFINITY).unwrap());
        prop_assert!(lhs <= rhs * (1.0 + 1e-8), "p={p} q={q}: {lhs} vs {rhs}");
    }

    #[test]
    fn reduced_norm_never_exceeds_the_full_gauge_norm(u in arb_field(), p in 1.0..3.0f64) {
        prop_assume!(!u.is_zero());
        let reduced = luxemburg_norm(&u, OrliczGauge::exp_lp_reduced(p).unwrap(), 1e-11).unwrap().norm;
        let full = luxemburg_norm(&u, OrliczGauge::exp_lp(p).unwrap(), 1e-11).unwrap().norm;
        prop_assert!(reduced <= full * (1.0 + 1e-10), "{reduced} vs {full}");
    }
}

/// The equivalence ratio (||u||_p + ||u||_red) / ||u||_{exp L^p} stays inside
/// one fixed positive bracket across a seeded corpus; the bracket itself is
/// empirical and gets printed for the record.
#[test]
fn norm_equivalence_bracket_over_corpus() {
    let g = grid();
    let mut rng = rng::CounterRng::new(0xe9_0140);
    let mut lo = f64::INFINITY;
    let mut hi = 0.0f64;
    for _ in 0..100 {
        let u = rng::random_smooth_field(&mut rng, g);
        if u.is_zero() {
            continue;
        }
        let ratio = norm_equivalence_reduced(&u, 2.0).unwrap();
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    println!("equivalence ratio bracket over corpus: [{lo:.6}, {hi:.6}]");
    assert!(lo > 0.0 && hi.is_finite() && lo <= hi);
}
