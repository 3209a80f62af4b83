//! Property tests for the branch-consistent square root and the
//! nonnegative-power projection.

use num_complex::Complex64;
use proptest::prelude::*;

use scurve::algebra::{laurent_at_infinity, oplus_part, BranchedRadical, Polynomial};

fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Well-separated one- or two-pair endpoint configurations.
fn endpoint_pairs() -> impl Strategy<Value = Vec<(Complex64, Complex64)>> {
    let pair1 = (-1.5f64..-0.2, -1.0f64..1.0, 0.3f64..1.2, -0.8f64..0.8)
        .prop_map(|(x, y, dx, dy)| (c64(x - dx, y - dy), c64(x + 0.1, y)));
    let two = (pair1.clone(), 0.5f64..2.0, -0.9f64..0.9).prop_map(|((a, b), off, tilt)| {
        // second pair shifted well to the right of the first
        let base = b + c64(1.0 + off, tilt);
        vec![(a, b), (base, base + c64(0.8, tilt * 0.5))]
    });
    prop_oneof![
        pair1.prop_map(|(a, b)| vec![(a, b)]),
        two,
    ]
}

fn coeffs() -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-2.0f64..2.0, -2.0f64..2.0).prop_map(|(re, im)| c64(re, im)), 1..5)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn w_squares_back_to_the_endpoint_product(pairs in endpoint_pairs(), zr in -4.0f64..4.0, zi in -4.0f64..4.0) {
        let rad = BranchedRadical::new(pairs).unwrap();
        let z = c64(zr, zi);
        if let Ok(w) = rad.eval(z) {
            let prod = Polynomial::from_roots(&rad.endpoints()).eval(z);
            prop_assert!((w * w - prod).norm() <= 1e-11 * prod.norm().max(1.0));
        }
    }

    #[test]
    fn oplus_remainder_vanishes_at_infinity(pairs in endpoint_pairs(), cs in coeffs()) {
        let rad = BranchedRadical::new(pairs).unwrap();
        let num = Polynomial::from_coeffs(cs);
        prop_assume!(!num.is_zero());
        let proj = oplus_part(&num, &rad);
        let rem = |z: Complex64| num.eval(z) / rad.eval_unchecked(z) - proj.eval(z);
        let r3 = rem(c64(0.6e3, 0.8e3)).norm();
        let r4 = rem(c64(0.6e4, 0.8e4)).norm();
        // O(1/z): bounded at 1e3 and at least tenfold smaller at 1e4
        prop_assert!(r3 < 1e-1);
        if r3 > 1e-9 {
            prop_assert!(r3 / r4 > 9.0, "decay ratio {}", r3 / r4);
        }
    }

    #[test]
    fn laurent_series_evaluates_the_function(pairs in endpoint_pairs(), cs in coeffs()) {
        let rad = BranchedRadical::new(pairs).unwrap();
        let num = Polynomial::from_coeffs(cs);
        prop_assume!(!num.is_zero());
        let series = laurent_at_infinity(&num, &rad, 12);
        let z = c64(50.0, 35.0);
        let direct = num.eval(z) / rad.eval_unchecked(z);
        let via_series = series.eval(z);
        prop_assert!(
            (direct - via_series).norm() < 1e-10 * direct.norm().max(1.0),
            "series mismatch: {direct} vs {via_series}"
        );
    }

    #[test]
    fn continuation_around_even_loops_is_single_valued(pairs in endpoint_pairs(), radius in 2.5f64..4.0) {
        let rad = BranchedRadical::new(pairs).unwrap();
        // a loop around everything encloses an even number of endpoints
        let center = rad.endpoints().iter().sum::<Complex64>() / rad.endpoints().len() as f64;
        let r = radius * (1.0 + rad.scale());
        let n = 240;
        let path: Vec<Complex64> = (0..=n)
            .map(|k| {
                let ang = 2.0 * std::f64::consts::PI * k as f64 / n as f64;
                center + r * c64(ang.cos(), ang.sin())
            })
            .collect();
        let start = rad.eval(path[0]).unwrap();
        let looped = rad.continue_along(&path).unwrap();
        prop_assert!((looped - start).norm() < 1e-9 * start.norm().max(1.0));
    }
}
