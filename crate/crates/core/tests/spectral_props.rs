use dpmult::spectral::{
    delta_z_report, range_witness_step8, resolvent_probe, spectral_radius_table, step8_defect, symbol_spectrum_image, Verdict,
};
use dpmult::{canonical, eval_symbol, Exponent, FinSeq};
use num_complex::Complex64;
use proptest::prelude::*;

fn exp(p: f64) -> Exponent {
    Exponent::new(p).unwrap()
}

proptest! {
    #[test]
    fn step8_identity(log_mod in -1.0f64..=1.0, arg in 0.0f64..6.3, n in 0usize..=64) {
        let lambda = Complex64::from_polar(10f64.powf(log_mod), arg);
        prop_assert!(step8_defect(lambda, n).unwrap() <= 1e-12);
        let (a, img) = range_witness_step8(lambda, n).unwrap();
        prop_assert_eq!(a.len(), n + 1);
        prop_assert_eq!(img.len(), n + 2);
    }

    #[test]
    fn spectrum_is_pointwise_symbol(b in prop::collection::vec(-2.0f64..2.0, 1..10), radial in 1usize..6, angular in 3usize..20) {
        let b = FinSeq::from_real(&b).unwrap();
        let cloud = symbol_spectrum_image(&b, radial, angular).unwrap();
        prop_assert_eq!(cloud.points.len(), radial * angular);
        for (i, z) in cloud.points.iter().enumerate() {
            let w = cloud.grid.point(i);
            prop_assert!(w.norm() <= 1.0 + 1e-15);
            prop_assert_eq!(*z, eval_symbol(&b, w));
        }
    }

    #[test]
    fn delta_z_sandwich(r in 0.0f64..0.95, t in 0.0f64..6.3, p in prop_oneof![Just(1.25), Just(1.5), Just(2.0), Just(3.0), Just(5.0)]) {
        let rep = delta_z_report(Complex64::from_polar(r, t), exp(p), 2000).unwrap();
        prop_assert!(rep.sandwich_holds());
    }
}

#[test]
fn resolvent_dichotomy_sampled() {
    for p in [1.0, 2.0, 3.0] {
        for &m in &[0.1, 0.3, 0.6, 0.9, 0.99, 1.0] {
            for k in 0..3 {
                let lambda = Complex64::from_polar(m, 1.1 * k as f64);
                assert_eq!(resolvent_probe(lambda, exp(p), 1024).unwrap().verdict, Verdict::Diverges, "|lambda|={m} p={p}");
            }
        }
        for &m in &[1.05, 1.2, 3.0, 100.0] {
            let lambda = Complex64::from_polar(m, 2.0);
            assert_eq!(resolvent_probe(lambda, exp(p), 1024).unwrap().verdict, Verdict::Converges, "|lambda|={m} p={p}");
        }
    }
}

#[test]
fn shift_cloud_fills_disc() {
    let e1 = canonical(1, 2).unwrap();
    let cloud = symbol_spectrum_image(&e1, 64, 256).unwrap();
    assert_eq!(cloud.points.len(), 16384);
    assert!((cloud.max_modulus() - 1.0).abs() < 1e-15);
    // every radius j/64 is hit, so the gap between covered radii is 1/64
    let mut radii: Vec<f64> = cloud.points.iter().map(|z| z.norm()).collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    assert_eq!(radii.len(), 64);
    assert!(radii.windows(2).all(|w| w[1] - w[0] <= 1.0 / 64.0 + 1e-12));
}

#[test]
fn point_evaluation_p_one_grid() {
    for r in [0.0, 0.1, 0.5, 0.9, 0.999] {
        for k in 0..5 {
            let z = Complex64::from_polar(r, k as f64);
            assert_eq!(delta_z_report(z, exp(1.0), 500).unwrap().ces_norm_truncated, 1.0);
        }
    }
}

#[test]
fn radius_table_formula() {
    for p in [1.0, 1.5, 2.0, 3.0] {
        let t = spectral_radius_table(exp(p), 5000).unwrap();
        for (i, &v) in t.iter().enumerate() {
            let n = (i + 1) as f64;
            assert!((v - ((n.ln_1p()) / (p * n)).exp()).abs() <= 1e-15);
        }
    }
}
