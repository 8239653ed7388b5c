use std::f64::consts::PI;

use hh_core::constants::{conjugate_exponent, cstar_bilinear, cstar_classical, Mode};
use hh_core::group::{HomogeneousGroup, QuasiNormKind};
use hh_core::kernels::{catalog, CatalogKernel};
use hh_core::quad::Tolerance;
use hh_core::verify::{bilinear_form, lp_norm, sharpness_sweep, verify_hh, RadialFunction};
use proptest::prelude::*;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn ratio(f: &RadialFunction, g: &RadialFunction, p: f64) -> f64 {
    let k = catalog(&CatalogKernel::Hilbert {}).unwrap();
    let line = HomogeneousGroup::half_line();
    let q = conjugate_exponent(p).unwrap();
    bilinear_form(&k, f, g, &line, &tol()).unwrap().value
        / (lp_norm(f, p, &line, &tol()).unwrap().value * lp_norm(g, q, &line, &tol()).unwrap().value)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hilbert_constant_is_pi_over_sine(p in 1.05f64..12.0) {
        let c = cstar_classical(&catalog(&CatalogKernel::Hilbert {}).unwrap(), p, &tol()).unwrap();
        let exact = PI / (PI / p).sin();
        prop_assert!((c.value - exact).abs() <= 1e-8 * exact, "{} vs {exact}", c.value);
    }

    #[test]
    fn transposing_swaps_the_exponent(lambda in 0.3f64..3.0, p in 1.2f64..5.0, k_exp in 1.2f64..5.0) {
        let k = catalog(&CatalogKernel::WeightedHilbert { lambda, p, k_exp }).unwrap();
        let q = conjugate_exponent(p).unwrap();
        let a = cstar_classical(&k.transposed(), p, &tol()).unwrap();
        let b = cstar_classical(&k, q, &tol()).unwrap();
        prop_assume!(a.is_finite() && b.is_finite());
        prop_assert!((a.value - b.value).abs() <= 1e-8 * a.value, "{} vs {}", a.value, b.value);
    }

    #[test]
    fn weighted_bilinear_constant_has_its_closed_form(lambda in 0.3f64..3.0, p in 1.2f64..5.0, k_exp in 1.2f64..5.0) {
        let k = catalog(&CatalogKernel::WeightedHilbert { lambda, p, k_exp }).unwrap();
        let c = cstar_bilinear(&k, p, Mode::Classical, &HomogeneousGroup::half_line(), &tol()).unwrap();
        let m = conjugate_exponent(k_exp).unwrap();
        let exact = PI / (lambda * (PI / m).sin());
        prop_assert!((c.value - exact).abs() <= 1e-7 * exact, "{} vs {exact}", c.value);
    }

    #[test]
    fn hilbert_inequality_holds_on_cutoffs(p in 1.3f64..6.0, bf in 0.05f64..1.0, bg in 0.05f64..1.0) {
        let k = catalog(&CatalogKernel::Hilbert {}).unwrap();
        let line = HomogeneousGroup::half_line();
        let q = conjugate_exponent(p).unwrap();
        let c = cstar_bilinear(&k, p, Mode::Classical, &line, &tol()).unwrap();
        let f = RadialFunction::power_cutoff(bf, p, 1.0).unwrap();
        let g = RadialFunction::power_cutoff(bg, q, 1.0).unwrap();
        let r = verify_hh(&k, &f, &g, p, &line, &c, &tol()).unwrap();
        prop_assert!(r.holds && r.ratio < 1.0, "{r:?}");
    }

    #[test]
    fn critical_ratio_ignores_dilation(a in 0.05f64..20.0, lo in 0.1f64..1.0, width in 0.5f64..4.0) {
        let f = RadialFunction::indicator(lo, lo + width).unwrap();
        let g = RadialFunction::power_cutoff(0.4, 2.0, 1.0).unwrap();
        let base = ratio(&f, &g, 2.0);
        let scaled = ratio(&f.clone().scaled(a).unwrap(), &g.clone().scaled(a).unwrap(), 2.0);
        prop_assert!((base - scaled).abs() <= 1e-8 * base, "{base} vs {scaled}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sweep_ratios_climb_towards_one(p in 1.3f64..6.0) {
        let k = catalog(&CatalogKernel::Hilbert {}).unwrap();
        let sweep = sharpness_sweep(&k, p, Mode::Classical, &HomogeneousGroup::half_line(), &[0.5, 0.2, 0.1, 0.05], &tol()).unwrap();
        prop_assert!(sweep.passes(), "{sweep:?}");
        prop_assert!(sweep.entries.windows(2).all(|w| w[1].ratio >= w[0].ratio));
    }

    #[test]
    fn radial_integral_of_a_ball_is_its_volume(r in 0.2f64..5.0, v in 1.0f64..3.0) {
        let group = HomogeneousGroup::new(vec![1.0, v], QuasiNormKind::MaxAnisotropic)
            .unwrap()
            .with_sphere_override((1.0 + v) * 4.0)
            .unwrap();
        let ball = RadialFunction::indicator(0.0, r).unwrap();
        let integral = lp_norm(&ball, 1.0, &group, &tol()).unwrap().value;
        let volume = group.ball_volume(r).unwrap();
        prop_assert!((integral - volume).abs() <= 1e-9 * volume, "{integral} vs {volume}");
    }
}
